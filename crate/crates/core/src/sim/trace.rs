//! Timed traces: initial valuation plus proposition changes over a horizon.
//!
//! Text format:
//!
//! ```text
//! # decmon trace v1
//! horizon 100.000000
//! prop a 0 0
//! prop b 1 0
//! 2.100000 a 1
//! ```
//!
//! `prop` lines give name, owner and initial value in proposition order;
//! event lines give time, proposition and new value. Blank lines and lines
//! starting with `#` are ignored.

use std::fmt::Write as _;

use crate::ltl::{ApTable, AtomicProposition, Letter, ProcessId, PropId};
use crate::time::Time;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("initial valuation has {got} entries, expected {expected}")]
    InitialLength { expected: usize, got: usize },
    #[error("event {index}: unknown proposition {prop}")]
    UnknownProp { index: usize, prop: PropId },
    #[error("event {index}: time {time} is not inside (0, horizon)")]
    OutOfRange { index: usize, time: Time },
    #[error("horizon must be positive")]
    ZeroHorizon,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Simultaneous changes of one process: time, owner, `(prop, value)` pairs.
pub type Batch = (Time, ProcessId, Vec<(PropId, bool)>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    pub time: Time,
    pub prop: PropId,
    pub value: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    aps: ApTable,
    initial: Letter,
    events: Vec<TraceEvent>,
    horizon: Time,
}

impl Trace {
    /// Events are stably sorted by time; simultaneous events apply in the
    /// given order.
    pub fn new(aps: ApTable, initial: &[bool], mut events: Vec<TraceEvent>, horizon: Time) -> Result<Self, TraceError> {
        if initial.len() != aps.len() {
            return Err(TraceError::InitialLength { expected: aps.len(), got: initial.len() });
        }
        if horizon == Time::ZERO {
            return Err(TraceError::ZeroHorizon);
        }
        for (index, e) in events.iter().enumerate() {
            if e.prop >= aps.len() {
                return Err(TraceError::UnknownProp { index, prop: e.prop });
            }
            if e.time == Time::ZERO || e.time >= horizon {
                return Err(TraceError::OutOfRange { index, time: e.time });
            }
        }
        events.sort_by_key(|e| e.time);
        let initial = initial.iter().enumerate().filter(|(_, &v)| v).map(|(p, _)| 1 << p).sum();
        Ok(Trace { aps, initial, events, horizon })
    }

    /// A trace with no changes and every proposition false.
    pub fn quiet(aps: ApTable, horizon: Time) -> Self {
        Trace { aps, initial: 0, events: Vec::new(), horizon }
    }

    pub fn aps(&self) -> &ApTable {
        &self.aps
    }

    pub fn initial_letter(&self) -> Letter {
        self.initial
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn horizon(&self) -> Time {
        self.horizon
    }

    /// Number of events that actually change a proposition's value.
    pub fn num_changes(&self) -> usize {
        let mut v = self.initial;
        let mut n = 0;
        for e in &self.events {
            let bit = 1 << e.prop;
            if (v & bit != 0) != e.value {
                n += 1;
                v ^= bit;
            }
        }
        n
    }

    /// Global state as `(start, letter)` segments; the first starts at zero
    /// and each holds until the next start. Consecutive equal letters merge.
    pub fn segments(&self) -> Vec<(Time, Letter)> {
        let mut out = vec![(Time::ZERO, self.initial)];
        let mut v = self.initial;
        let mut i = 0;
        while i < self.events.len() {
            let t = self.events[i].time;
            while i < self.events.len() && self.events[i].time == t {
                let e = self.events[i];
                if e.value {
                    v |= 1 << e.prop;
                } else {
                    v &= !(1 << e.prop);
                }
                i += 1;
            }
            if v != out.last().expect("nonempty").1 {
                out.push((t, v));
            }
        }
        out
    }

    /// Changes grouped by `(time, owner)` in that order, each group listing
    /// the final value of every proposition it touches.
    pub fn batches(&self) -> Vec<Batch> {
        let mut out: Vec<Batch> = Vec::new();
        let mut i = 0;
        while i < self.events.len() {
            let t = self.events[i].time;
            let mut j = i;
            while j < self.events.len() && self.events[j].time == t {
                j += 1;
            }
            let mut group: Vec<(ProcessId, PropId, bool)> =
                self.events[i..j].iter().map(|e| (self.aps.owner(e.prop), e.prop, e.value)).collect();
            // Stable sort keeps the last write per proposition last.
            group.sort_by_key(|g| (g.0, g.1));
            for (owner, prop, value) in group {
                match out.last_mut() {
                    Some((bt, bp, ups)) if *bt == t && *bp == owner => match ups.last_mut() {
                        Some(last) if last.0 == prop => last.1 = value,
                        _ => ups.push((prop, value)),
                    },
                    _ => out.push((t, owner, vec![(prop, value)])),
                }
            }
            i = j;
        }
        out
    }

    /// Keeps the events at or before `t`.
    pub fn truncated(&self, t: Time) -> Trace {
        Trace {
            aps: self.aps.clone(),
            initial: self.initial,
            events: self.events.iter().copied().filter(|e| e.time <= t).collect(),
            horizon: self.horizon,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# decmon trace v1\n");
        let _ = writeln!(s, "horizon {}", self.horizon);
        for (p, ap) in self.aps.props().iter().enumerate() {
            let _ = writeln!(s, "prop {} {} {}", ap.name, ap.owner, u8::from(self.initial & (1 << p) != 0));
        }
        for e in &self.events {
            let _ = writeln!(s, "{} {} {}", e.time, self.aps.name(e.prop), u8::from(e.value));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Trace, TraceError> {
        let err = |line: usize, msg: &str| TraceError::Parse { line, msg: msg.to_string() };
        let mut horizon = None;
        let mut props = Vec::new();
        let mut initial = Vec::new();
        let mut raw = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["horizon", t] => {
                    horizon = Some(t.parse::<Time>().map_err(|e| err(line_no, &e.to_string()))?);
                }
                ["prop", name, owner, init] => {
                    if !raw.is_empty() {
                        return Err(err(line_no, "prop line after events"));
                    }
                    let owner = owner.parse().map_err(|_| err(line_no, "bad owner"))?;
                    props.push(AtomicProposition::new(*name, owner));
                    initial.push(parse_bit(init).ok_or_else(|| err(line_no, "initial value must be 0 or 1"))?);
                }
                [t, name, v] => {
                    let time = t.parse::<Time>().map_err(|e| err(line_no, &e.to_string()))?;
                    let value = parse_bit(v).ok_or_else(|| err(line_no, "value must be 0 or 1"))?;
                    raw.push((line_no, time, name.to_string(), value));
                }
                _ => return Err(err(line_no, "unrecognized line")),
            }
        }
        let aps = ApTable::new(props).map_err(|e| err(0, &e.to_string()))?;
        let horizon = horizon.ok_or_else(|| err(0, "missing horizon"))?;
        let mut events = Vec::with_capacity(raw.len());
        for (line_no, time, name, value) in raw {
            let prop = aps.lookup(&name).ok_or_else(|| err(line_no, &format!("unknown proposition `{name}`")))?;
            events.push(TraceEvent { time, prop, value });
        }
        Trace::new(aps, &initial, events, horizon)
    }
}

fn parse_bit(s: &str) -> Option<bool> {
    match s {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}
