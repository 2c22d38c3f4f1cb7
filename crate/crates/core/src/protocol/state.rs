//! One process's monitor: enabling-time detection with Delegate messages,
//! checked-transition dissemination with Aggregate messages, and location
//! changes.
//!
//! Knowledge is inclusive: `t_lu[j] = Some(t)` means the gpsr already
//! excludes every instant in `[t_llc, t]` at which one of `p_j`'s literals
//! was false. The candidate `m = min(gpsr)` is the enabling time once every
//! associated process knows through `m`.

use std::collections::{BTreeMap, BTreeSet};

use crate::interval::{Interval, IntervalSet};
use crate::ltl::{Letter, Literal, LocationId, ProcessId, PropId, ProtocolAutomaton, TrId, Verdict};
use crate::time::Time;

use super::message::{LastUpdate, Message, StepId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProtocolError {
    #[error("p{process}: Tr{tr} is not an outgoing transition of q{location} that p{process} is associated with")]
    UnknownTransition { process: ProcessId, tr: TrId, location: LocationId },
    #[error("p{process}: message for step {step} names q{got}, local location is q{expected}")]
    LocationMismatch { process: ProcessId, step: StepId, expected: LocationId, got: LocationId },
    #[error("p{process}: Delegate for Tr{tr} carries last-update entries for the wrong processes")]
    BadLastUpdate { process: ProcessId, tr: TrId },
    #[error("p{process}: Aggregate names Tr{tr}, which does not leave q{location}")]
    ForeignTransition { process: ProcessId, tr: TrId, location: LocationId },
    #[error("p{process}: location changes at {at} revisit a location")]
    ChainCycle { process: ProcessId, at: Time },
}

/// A detected location change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Announcement {
    pub process: ProcessId,
    pub step: StepId,
    pub from: LocationId,
    pub to: LocationId,
    pub tr: TrId,
    /// Enabling time of `tr`, which is the start of the next step.
    pub at: Time,
    pub verdict: Option<Verdict>,
}

/// Everything a handler produced.
#[derive(Debug, Default)]
pub struct Outbox {
    pub sends: Vec<(ProcessId, Message)>,
    pub announcements: Vec<Announcement>,
}

/// Per-transition view of a process associated with the transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionView {
    pub tr: TrId,
    pub gpsr: IntervalSet,
    /// One entry per associated process, ascending by process.
    pub t_lu: Vec<LastUpdate>,
    pub is_coordinator: bool,
    own: Vec<Literal>,
}

impl TransitionView {
    fn last_update(&self, p: ProcessId) -> Option<Time> {
        self.t_lu.iter().find(|(q, _)| *q == p).and_then(|(_, t)| *t)
    }

    fn set_last_update(&mut self, p: ProcessId, t: Time) {
        if let Some(e) = self.t_lu.iter_mut().find(|(q, _)| *q == p) {
            e.1 = Some(t);
        }
    }

    /// `min(gpsr)` once every associated process knows through it.
    pub fn enabling_time(&self) -> Option<Time> {
        let m = self.gpsr.min_point()?;
        self.t_lu.iter().all(|(_, t)| t.is_some_and(|t| t >= m)).then_some(m)
    }
}

/// True when knowledge through `t_lu` covers every instant before `bound`.
fn covers(t_lu: Option<Time>, bound: Time) -> bool {
    t_lu.is_some_and(|t| t.succ() >= bound)
}

/// Transition keys are ordered by `(enabling time, id)`. A transition `tr`
/// precedes `(t_e, e)` only through instants before this bound.
fn precede_bound(tr: TrId, (t_e, e): (Time, TrId)) -> Time {
    if tr < e {
        t_e.succ()
    } else {
        t_e
    }
}

/// Timed valuation of the propositions a process owns, kept from the start
/// of the current step.
#[derive(Debug, Clone)]
struct OwnHistory {
    since: Time,
    base: Letter,
    changes: Vec<(Time, Letter)>,
}

impl OwnHistory {
    fn current(&self) -> Letter {
        self.changes.last().map_or(self.base, |c| c.1)
    }

    fn apply(&mut self, now: Time, updates: &[(PropId, bool)]) {
        let mut v = self.current();
        for &(p, on) in updates {
            if on {
                v |= 1 << p;
            } else {
                v &= !(1 << p);
            }
        }
        match self.changes.last_mut() {
            Some(last) if last.0 == now => last.1 = v,
            _ if now <= self.since => self.base = v,
            _ => self.changes.push((now, v)),
        }
    }

    fn prune(&mut self, t: Time) {
        if t <= self.since {
            return;
        }
        let keep = self.changes.partition_point(|c| c.0 <= t);
        if keep > 0 {
            self.base = self.changes[keep - 1].1;
            self.changes.drain(..keep);
        }
        self.since = t;
    }

    /// Instants in `[lo, hi]` at which some literal in `lits` is false.
    fn falsified(&self, lits: &[Literal], lo: Time, hi: Time) -> IntervalSet {
        let holds = |v: Letter| lits.iter().all(|l| l.holds(v));
        let end = hi.succ();
        let mut spans = Vec::new();
        // Segment k covers [start_k, start_{k+1}); segment 0 starts at `since`.
        let first = self.changes.partition_point(|c| c.0 <= lo);
        let mut seg_lo = lo;
        let mut value = if first == 0 { self.base } else { self.changes[first - 1].1 };
        for &(t, v) in &self.changes[first..] {
            if t >= end {
                break;
            }
            if !holds(value) {
                spans.push(Interval::new(seg_lo, t));
            }
            seg_lo = t;
            value = v;
        }
        if !holds(value) {
            spans.push(Interval::new(seg_lo, end));
        }
        IntervalSet::from_intervals(spans)
    }
}

enum Progress {
    Idle,
    Moved,
    Finished,
}

/// Protocol state of process `id`.
#[derive(Debug, Clone)]
pub struct MonitorState<'a> {
    pa: &'a ProtocolAutomaton,
    id: ProcessId,
    step: StepId,
    q_c: LocationId,
    trc: BTreeSet<TrId>,
    tr_e: Option<(Time, TrId)>,
    views: Vec<TransitionView>,
    step_start_seen: bool,
    /// Set on the process that entered the current step by announcing it;
    /// it alone resolves a constant-true transition.
    initiator: bool,
    trc_changed: bool,
    history: OwnHistory,
    finished: Option<(Verdict, Time)>,
}

impl<'a> MonitorState<'a> {
    /// State at time zero. `initial` holds the process's own propositions
    /// (other bits are ignored).
    pub fn new(pa: &'a ProtocolAutomaton, id: ProcessId, initial: Letter) -> Self {
        let own_mask: Letter = pa.aps().owned_by(id).map(|p| 1 << p).sum();
        let mut s = MonitorState {
            pa,
            id,
            step: StepId::INITIAL,
            q_c: pa.initial(),
            trc: BTreeSet::new(),
            tr_e: None,
            views: Vec::new(),
            step_start_seen: true,
            initiator: id == 0,
            trc_changed: false,
            history: OwnHistory { since: Time::ZERO, base: initial & own_mask, changes: Vec::new() },
            finished: None,
        };
        s.build_views();
        for v in &mut s.views {
            v.is_coordinator = pa.transition(v.tr).initial_coordinator() == Some(id);
        }
        s
    }

    pub fn id(&self) -> ProcessId {
        self.id
    }

    pub fn step(&self) -> StepId {
        self.step
    }

    pub fn location(&self) -> LocationId {
        self.q_c
    }

    pub fn trc(&self) -> &BTreeSet<TrId> {
        &self.trc
    }

    /// Earliest transition found so far, with its enabling time.
    pub fn tr_e(&self) -> Option<(Time, TrId)> {
        self.tr_e
    }

    pub fn views(&self) -> &[TransitionView] {
        &self.views
    }

    pub fn view(&self, tr: TrId) -> Option<&TransitionView> {
        self.views.iter().find(|v| v.tr == tr)
    }

    pub fn finished(&self) -> Option<(Verdict, Time)> {
        self.finished
    }

    fn build_views(&mut self) {
        let pa = self.pa;
        let id = self.id;
        self.views = pa
            .outgoing(self.q_c)
            .iter()
            .map(|&tr| pa.transition(tr))
            .filter(|t| t.is_associated(id))
            .map(|t| TransitionView {
                tr: t.id,
                gpsr: IntervalSet::from_time(self.step.t_llc),
                t_lu: t.associated.iter().map(|&p| (p, None)).collect(),
                is_coordinator: false,
                own: t.literals_of(pa.aps(), id).collect(),
            })
            .collect();
    }

    fn reset(&mut self, step: StepId, location: LocationId) {
        self.step = step;
        self.q_c = location;
        self.trc.clear();
        self.tr_e = None;
        self.step_start_seen = false;
        self.initiator = false;
        self.trc_changed = false;
        self.history.prune(step.t_llc);
        self.build_views();
    }

    /// Handles the simulation start at time zero.
    pub fn on_start(&mut self, now: Time, out: &mut Outbox) -> Result<(), ProtocolError> {
        self.run_update(now, out)
    }

    /// Applies simultaneous changes of the process's own propositions.
    pub fn on_local_change(
        &mut self,
        now: Time,
        updates: &[(PropId, bool)],
        out: &mut Outbox,
    ) -> Result<(), ProtocolError> {
        self.history.apply(now, updates);
        if self.finished.is_some() {
            return Ok(());
        }
        self.run_update(now, out)
    }

    pub fn on_message(&mut self, now: Time, msg: &Message, out: &mut Outbox) -> Result<(), ProtocolError> {
        if self.finished.is_some() {
            return Ok(());
        }
        let Some((step, location)) = msg.step() else {
            if let Message::Verdict { verdict, at } = msg {
                self.finished = Some((*verdict, *at));
            }
            return Ok(());
        };
        if step < self.step {
            return Ok(());
        }
        if step > self.step {
            self.reset(step, location);
        } else if location != self.q_c {
            return Err(ProtocolError::LocationMismatch {
                process: self.id,
                step,
                expected: self.q_c,
                got: location,
            });
        }
        match msg {
            Message::Delegate { tr, gpsr, t_lu, .. } => {
                let id = self.id;
                let q_c = self.q_c;
                let view = self
                    .views
                    .iter_mut()
                    .find(|v| v.tr == *tr)
                    .ok_or(ProtocolError::UnknownTransition { process: id, tr: *tr, location: q_c })?;
                if view.t_lu.len() != t_lu.len() || view.t_lu.iter().zip(t_lu).any(|(a, b)| a.0 != b.0) {
                    return Err(ProtocolError::BadLastUpdate { process: id, tr: *tr });
                }
                view.gpsr = gpsr.clone();
                view.t_lu = t_lu.clone();
                view.is_coordinator = true;
            }
            Message::Aggregate { trc, tr_e, t_tr_e, .. } => {
                let out_trs = self.pa.outgoing(self.q_c);
                for &tr in trc {
                    if out_trs.binary_search(&tr).is_err() {
                        return Err(ProtocolError::ForeignTransition { process: self.id, tr, location: self.q_c });
                    }
                }
                let before = self.trc.len();
                self.trc.extend(trc.iter().copied());
                if self.trc.len() != before {
                    self.trc_changed = true;
                }
                if let (Some(e), Some(t)) = (*tr_e, *t_tr_e) {
                    if self.tr_e.is_none_or(|cur| (t, e) < cur) {
                        self.tr_e = Some((t, e));
                        self.trc_changed = true;
                    }
                }
            }
            Message::StepStart { coordinated, .. } => {
                if self.step_start_seen {
                    return Ok(());
                }
                self.step_start_seen = true;
                for &tr in coordinated {
                    let id = self.id;
                    let q_c = self.q_c;
                    let view = self
                        .views
                        .iter_mut()
                        .find(|v| v.tr == tr)
                        .ok_or(ProtocolError::UnknownTransition { process: id, tr, location: q_c })?;
                    view.is_coordinator = true;
                }
            }
            Message::Verdict { .. } => unreachable!("handled above"),
        }
        self.run_update(now, out)
    }

    fn run_update(&mut self, now: Time, out: &mut Outbox) -> Result<(), ProtocolError> {
        // Locations entered at the current instant. Successive changes at
        // one instant never revisit a location of a counter-free automaton.
        let mut entered: Vec<LocationId> = Vec::new();
        loop {
            let (from, t_before) = (self.q_c, self.step.t_llc);
            match self.update_once(now, out) {
                Progress::Idle | Progress::Finished => return Ok(()),
                Progress::Moved => {
                    if self.step.t_llc != t_before {
                        entered.clear();
                    }
                    entered.push(from);
                    if entered.contains(&self.q_c) {
                        return Err(ProtocolError::ChainCycle { process: self.id, at: self.step.t_llc });
                    }
                }
            }
        }
    }

    fn update_once(&mut self, now: Time, out: &mut Outbox) -> Progress {
        if self.finished.is_some() {
            return Progress::Finished;
        }
        let pa = self.pa;
        let outgoing = pa.outgoing(self.q_c);
        if self.initiator {
            if let [only] = outgoing {
                if pa.transition(*only).is_constant_true() {
                    return self.announce(*only, self.step.t_llc, out);
                }
            }
        }

        // Fold in own literal history up to now.
        for v in &mut self.views {
            let from = match v.last_update(self.id) {
                Some(t) => t.succ(),
                None => self.step.t_llc,
            };
            if from <= now {
                let f = self.history.falsified(&v.own, from, now);
                if !f.is_empty() {
                    v.gpsr = v.gpsr.subtract(&f);
                }
            }
            v.set_last_update(self.id, now);
        }

        let mut changed = std::mem::take(&mut self.trc_changed);
        for v in &self.views {
            if self.trc.contains(&v.tr) {
                continue;
            }
            if let Some(m) = v.enabling_time() {
                self.trc.insert(v.tr);
                changed = true;
                if self.tr_e.is_none_or(|cur| (m, v.tr) < cur) {
                    self.tr_e = Some((m, v.tr));
                }
            }
        }
        if let Some(e) = self.tr_e {
            for v in &self.views {
                if self.trc.contains(&v.tr) {
                    continue;
                }
                let bound = precede_bound(v.tr, e);
                if v.gpsr.is_empty_before(bound) || v.t_lu.iter().all(|(_, t)| covers(*t, bound)) {
                    self.trc.insert(v.tr);
                    changed = true;
                }
            }
        }

        for v in &mut self.views {
            if self.trc.contains(&v.tr) || !v.is_coordinator {
                continue;
            }
            if !v.gpsr.min_point().is_some_and(|m| m <= now) {
                continue;
            }
            let next = v
                .t_lu
                .iter()
                .filter(|(p, _)| *p != self.id)
                .min_by_key(|(p, t)| (*t, *p))
                .map(|(p, _)| *p);
            let Some(next) = next else { continue };
            out.sends.push((
                next,
                Message::Delegate {
                    step: self.step,
                    location: self.q_c,
                    tr: v.tr,
                    gpsr: v.gpsr.clone(),
                    t_lu: v.t_lu.clone(),
                },
            ));
            v.is_coordinator = false;
        }

        if !changed {
            return Progress::Idle;
        }
        if !outgoing.is_empty() && outgoing.iter().all(|tr| self.trc.contains(tr)) {
            let (at, tr) = self.tr_e.expect("a complete TrC contains a detected transition");
            return self.announce(tr, at, out);
        }
        self.send_aggregates(out);
        Progress::Idle
    }

    fn send_aggregates(&self, out: &mut Outbox) {
        let pa = self.pa;
        let mut recipients = BTreeSet::new();
        for &tr in pa.outgoing(self.q_c) {
            if self.trc.contains(&tr) {
                continue;
            }
            let t = pa.transition(tr);
            match self.views.iter().find(|v| v.tr == tr) {
                None => recipients.extend(t.associated.iter().copied()),
                Some(v) => {
                    for &(q, lu) in &v.t_lu {
                        let needs = match self.tr_e {
                            Some(e) => !covers(lu, precede_bound(tr, e)),
                            None => true,
                        };
                        if needs {
                            recipients.insert(q);
                        }
                    }
                }
            }
        }
        recipients.remove(&self.id);
        for q in recipients {
            out.sends.push((
                q,
                Message::Aggregate {
                    step: self.step,
                    location: self.q_c,
                    trc: self.trc.clone(),
                    tr_e: self.tr_e.map(|e| e.1),
                    t_tr_e: self.tr_e.map(|e| e.0),
                },
            ));
        }
    }

    fn announce(&mut self, tr: TrId, at: Time, out: &mut Outbox) -> Progress {
        let pa = self.pa;
        let target = pa.transition(tr).target;
        let label = pa.label(target);
        out.announcements.push(Announcement {
            process: self.id,
            step: self.step,
            from: self.q_c,
            to: target,
            tr,
            at,
            verdict: label.is_terminal().then_some(label),
        });
        if label.is_terminal() {
            self.finished = Some((label, at));
            for p in 0..pa.num_processes() {
                if p != self.id {
                    out.sends.push((p, Message::Verdict { verdict: label, at }));
                }
            }
            return Progress::Finished;
        }
        let step = self.step.next(at);
        self.reset(step, target);
        self.step_start_seen = true;
        self.initiator = true;
        let mut notify: BTreeMap<ProcessId, BTreeSet<TrId>> = BTreeMap::new();
        for &t in pa.outgoing(target) {
            if let Some(c) = pa.transition(t).initial_coordinator() {
                notify.entry(c).or_default().insert(t);
            }
        }
        if let Some(mine) = notify.remove(&self.id) {
            for v in &mut self.views {
                if mine.contains(&v.tr) {
                    v.is_coordinator = true;
                }
            }
        }
        for (p, coordinated) in notify {
            out.sends.push((p, Message::StepStart { step, location: target, coordinated }));
        }
        Progress::Moved
    }
}
