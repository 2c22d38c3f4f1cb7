//! Byte-exact message encoding.
//!
//! Every value is a netstring `<len>:<bytes>,`. A message is one netstring
//! whose payload is the concatenation of its fields in declaration order,
//! preceded by a one-letter tag (`D`, `A`, `S`, `V`). Times are decimal
//! microticks; absent values are `-`. Lists (`gpsr`, `t_lu`, `trc`,
//! `coordinated`) are netstrings of element netstrings. An interval is
//! `lo-hi`, or `lo-` when unbounded; a last-update entry is `p=ticks`.

use std::collections::BTreeSet;

use crate::interval::{Interval, IntervalSet};
use crate::ltl::Verdict;
use crate::time::Time;

use super::message::{LastUpdate, Message, StepId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WireError {
    #[error("truncated input at byte {0}")]
    Truncated(usize),
    #[error("malformed netstring at byte {0}")]
    Malformed(usize),
    #[error("unknown message tag `{0}`")]
    UnknownTag(String),
    #[error("invalid field `{0}`")]
    InvalidField(String),
    #[error("{0} trailing bytes")]
    Trailing(usize),
}

fn put(out: &mut Vec<u8>, payload: &[u8]) {
    out.extend_from_slice(payload.len().to_string().as_bytes());
    out.push(b':');
    out.extend_from_slice(payload);
    out.push(b',');
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    put(out, s.as_bytes());
}

fn put_list<I: IntoIterator<Item = String>>(out: &mut Vec<u8>, items: I) {
    let mut inner = Vec::new();
    for it in items {
        put_str(&mut inner, &it);
    }
    put(out, &inner);
}

fn opt_ticks(t: Option<Time>) -> String {
    t.map_or_else(|| "-".into(), |t| t.ticks().to_string())
}

fn put_step(out: &mut Vec<u8>, step: StepId, location: usize) {
    put_str(out, &step.t_llc.ticks().to_string());
    put_str(out, &step.index.to_string());
    put_str(out, &location.to_string());
}

pub fn encode(msg: &Message) -> Vec<u8> {
    let mut body = Vec::new();
    match msg {
        Message::Delegate { step, location, tr, gpsr, t_lu } => {
            put_str(&mut body, "D");
            put_step(&mut body, *step, *location);
            put_str(&mut body, &tr.to_string());
            put_list(
                &mut body,
                gpsr.intervals().iter().map(|i| {
                    format!("{}-{}", i.lo.ticks(), i.hi.map_or_else(String::new, |h| h.ticks().to_string()))
                }),
            );
            put_list(&mut body, t_lu.iter().map(|(p, t)| format!("{p}={}", opt_ticks(*t))));
        }
        Message::Aggregate { step, location, trc, tr_e, t_tr_e } => {
            put_str(&mut body, "A");
            put_step(&mut body, *step, *location);
            put_list(&mut body, trc.iter().map(|t| t.to_string()));
            put_str(&mut body, &tr_e.map_or_else(|| "-".into(), |t| t.to_string()));
            put_str(&mut body, &opt_ticks(*t_tr_e));
        }
        Message::StepStart { step, location, coordinated } => {
            put_str(&mut body, "S");
            put_step(&mut body, *step, *location);
            put_list(&mut body, coordinated.iter().map(|t| t.to_string()));
        }
        Message::Verdict { verdict, at } => {
            put_str(&mut body, "V");
            put_str(&mut body, verdict.ascii());
            put_str(&mut body, &at.ticks().to_string());
        }
    }
    let mut out = Vec::with_capacity(body.len() + 8);
    put(&mut out, &body);
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    base: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8], base: usize) -> Self {
        Reader { buf, pos: 0, base }
    }

    fn at_end(&self) -> bool {
        self.pos == self.buf.len()
    }

    fn next(&mut self) -> Result<(&'a [u8], usize), WireError> {
        let start = self.pos;
        let colon = self.buf[start..]
            .iter()
            .position(|&b| b == b':')
            .ok_or(WireError::Truncated(self.base + start))?;
        let digits = &self.buf[start..start + colon];
        if digits.is_empty() || !digits.iter().all(u8::is_ascii_digit) || (digits.len() > 1 && digits[0] == b'0') {
            return Err(WireError::Malformed(self.base + start));
        }
        let len: usize = std::str::from_utf8(digits)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(WireError::Malformed(self.base + start))?;
        let body_start = start + colon + 1;
        let end = body_start.checked_add(len).ok_or(WireError::Malformed(self.base + start))?;
        if end >= self.buf.len() {
            return Err(WireError::Truncated(self.base + self.buf.len()));
        }
        if self.buf[end] != b',' {
            return Err(WireError::Malformed(self.base + end));
        }
        self.pos = end + 1;
        Ok((&self.buf[body_start..end], self.base + body_start))
    }

    fn str(&mut self) -> Result<&'a str, WireError> {
        let (b, at) = self.next()?;
        std::str::from_utf8(b).map_err(|_| WireError::Malformed(at))
    }

    fn num<T: std::str::FromStr>(&mut self) -> Result<T, WireError> {
        let s = self.str()?;
        parse_num(s)
    }

    fn list(&mut self) -> Result<Vec<&'a str>, WireError> {
        let (b, at) = self.next()?;
        let mut r = Reader::new(b, at);
        let mut items = Vec::new();
        while !r.at_end() {
            items.push(r.str()?);
        }
        Ok(items)
    }
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T, WireError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
        return Err(WireError::InvalidField(s.to_string()));
    }
    s.parse().map_err(|_| WireError::InvalidField(s.to_string()))
}

fn parse_opt_time(s: &str) -> Result<Option<Time>, WireError> {
    if s == "-" {
        Ok(None)
    } else {
        parse_num(s).map(|t| Some(Time::from_ticks(t)))
    }
}

fn read_step(r: &mut Reader<'_>) -> Result<(StepId, usize), WireError> {
    let t_llc = Time::from_ticks(r.num()?);
    let index = r.num()?;
    let location = r.num()?;
    Ok((StepId { t_llc, index }, location))
}

fn read_trs(items: Vec<&str>) -> Result<BTreeSet<usize>, WireError> {
    let mut out = BTreeSet::new();
    let mut prev: Option<usize> = None;
    for s in items {
        let v: usize = parse_num(s)?;
        // Canonical form lists ids strictly ascending.
        if prev.is_some_and(|p| p >= v) {
            return Err(WireError::InvalidField(s.to_string()));
        }
        prev = Some(v);
        out.insert(v);
    }
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<Message, WireError> {
    let mut outer = Reader::new(bytes, 0);
    let (body, at) = outer.next()?;
    if !outer.at_end() {
        return Err(WireError::Trailing(bytes.len() - outer.pos));
    }
    let mut r = Reader::new(body, at);
    let tag = r.str()?;
    let msg = match tag {
        "D" => {
            let (step, location) = read_step(&mut r)?;
            let tr = r.num()?;
            let mut spans = Vec::new();
            for s in r.list()? {
                let (lo, hi) = s.split_once('-').ok_or_else(|| WireError::InvalidField(s.into()))?;
                let lo = Time::from_ticks(parse_num(lo)?);
                let hi = if hi.is_empty() { None } else { Some(Time::from_ticks(parse_num(hi)?)) };
                spans.push(Interval { lo, hi });
            }
            let gpsr = IntervalSet::from_intervals(spans.iter().copied());
            if gpsr.intervals() != spans.as_slice() {
                return Err(WireError::InvalidField("non-canonical interval set".into()));
            }
            let mut t_lu: Vec<LastUpdate> = Vec::new();
            for s in r.list()? {
                let (p, t) = s.split_once('=').ok_or_else(|| WireError::InvalidField(s.into()))?;
                t_lu.push((parse_num(p)?, parse_opt_time(t)?));
            }
            Message::Delegate { step, location, tr, gpsr, t_lu }
        }
        "A" => {
            let (step, location) = read_step(&mut r)?;
            let trc = read_trs(r.list()?)?;
            let tr_e = match r.str()? {
                "-" => None,
                s => Some(parse_num(s)?),
            };
            let t_tr_e = parse_opt_time(r.str()?)?;
            Message::Aggregate { step, location, trc, tr_e, t_tr_e }
        }
        "S" => {
            let (step, location) = read_step(&mut r)?;
            let coordinated = read_trs(r.list()?)?;
            Message::StepStart { step, location, coordinated }
        }
        "V" => {
            let v = r.str()?;
            let verdict = match v {
                "top" => Verdict::Top,
                "bottom" => Verdict::Bottom,
                _ => return Err(WireError::InvalidField(v.into())),
            };
            Message::Verdict { verdict, at: Time::from_ticks(r.num()?) }
        }
        other => return Err(WireError::UnknownTag(other.to_string())),
    };
    if !r.at_end() {
        return Err(WireError::Trailing(body.len() - r.pos));
    }
    Ok(msg)
}
