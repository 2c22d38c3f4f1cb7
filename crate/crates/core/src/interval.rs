//! Finite unions of half-open time intervals.
//!
//! An [`IntervalSet`] is kept in canonical form at all times: intervals are
//! nonempty, sorted by their lower bound and separated by strictly positive
//! gaps. At most one interval is unbounded and it is always the last one.
//! Because the representation is canonical, structural equality is set
//! equality.
//!
//! A single instant `t` is the interval `[t, t + 1 tick)`.

use std::fmt;
use std::str::FromStr;

use crate::time::Time;

/// `[lo, hi)`, or `[lo, ∞)` when `hi` is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Time,
    pub hi: Option<Time>,
}

impl Interval {
    pub fn new(lo: Time, hi: Time) -> Self {
        Interval { lo, hi: Some(hi) }
    }

    pub fn from(lo: Time) -> Self {
        Interval { lo, hi: None }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.hi, Some(hi) if hi <= self.lo)
    }

    pub fn contains(&self, t: Time) -> bool {
        t >= self.lo && self.hi.is_none_or(|hi| t < hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntervalSet {
    spans: Vec<Interval>,
}

fn hi_lt(a: Option<Time>, b: Option<Time>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => a < b,
        (Some(_), None) => true,
        (None, _) => false,
    }
}

fn hi_min(a: Option<Time>, b: Option<Time>) -> Option<Time> {
    if hi_lt(a, b) {
        a
    } else {
        b
    }
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { spans: Vec::new() }
    }

    /// `[0, ∞)`.
    pub fn full() -> Self {
        Self::from_time(Time::ZERO)
    }

    /// `[t, ∞)`.
    pub fn from_time(t: Time) -> Self {
        IntervalSet { spans: vec![Interval::from(t)] }
    }

    /// `[lo, hi)`; empty when `hi <= lo`.
    pub fn span(lo: Time, hi: Time) -> Self {
        Self::from_intervals([Interval::new(lo, hi)])
    }

    /// `[t, t + 1 tick)`.
    pub fn instant(t: Time) -> Self {
        Self::span(t, t.succ())
    }

    /// Builds the canonical set covering every given interval. Input order
    /// and overlaps are irrelevant; empty intervals are ignored.
    pub fn from_intervals<I: IntoIterator<Item = Interval>>(intervals: I) -> Self {
        let mut v: Vec<Interval> = intervals.into_iter().filter(|i| !i.is_empty()).collect();
        v.sort_by_key(|i| i.lo);
        let mut spans: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            if let Some(last) = spans.last_mut() {
                // Merge overlapping or adjacent.
                match last.hi {
                    None => continue,
                    Some(hi) if iv.lo <= hi => {
                        if hi_lt(last.hi, iv.hi) {
                            last.hi = iv.hi;
                        }
                        continue;
                    }
                    _ => {}
                }
            }
            spans.push(iv);
        }
        IntervalSet { spans }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.spans
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn contains(&self, t: Time) -> bool {
        // First span whose lower bound is > t; the candidate is the one before it.
        let idx = self.spans.partition_point(|s| s.lo <= t);
        idx > 0 && self.spans[idx - 1].contains(t)
    }

    pub fn min_point(&self) -> Option<Time> {
        self.spans.first().map(|s| s.lo)
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (&self.spans, &other.spans);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = a[i].lo.max(b[j].lo);
            let hi = hi_min(a[i].hi, b[j].hi);
            if hi.is_none_or(|h| lo < h) {
                out.push(Interval { lo, hi });
            }
            // Advance whichever ends first.
            if hi_lt(a[i].hi, b[j].hi) {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet { spans: out }
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        Self::from_intervals(self.spans.iter().chain(other.spans.iter()).copied())
    }

    /// Complement with respect to `[0, ∞)`.
    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::with_capacity(self.spans.len() + 1);
        let mut cursor = Some(Time::ZERO);
        for s in &self.spans {
            let c = cursor.expect("only the final span is unbounded");
            if c < s.lo {
                out.push(Interval::new(c, s.lo));
            }
            cursor = s.hi;
        }
        if let Some(c) = cursor {
            out.push(Interval::from(c));
        }
        IntervalSet { spans: out }
    }

    pub fn subtract(&self, other: &IntervalSet) -> IntervalSet {
        if other.is_empty() || self.is_empty() {
            return self.clone();
        }
        self.intersect(&other.complement())
    }

    /// `self ∩ [0, t)`.
    pub fn restrict_before(&self, t: Time) -> IntervalSet {
        let mut out = Vec::new();
        for s in &self.spans {
            if s.lo >= t {
                break;
            }
            out.push(Interval { lo: s.lo, hi: Some(hi_min(s.hi, Some(t)).unwrap()) });
        }
        IntervalSet { spans: out }
    }

    /// `self ∩ [t, ∞)`.
    pub fn restrict_from(&self, t: Time) -> IntervalSet {
        self.intersect(&IntervalSet::from_time(t))
    }

    /// True when the set has no point strictly before `t`.
    pub fn is_empty_before(&self, t: Time) -> bool {
        self.min_point().is_none_or(|m| m >= t)
    }

    /// Removes `[lo, hi)` in place; cheaper than a full subtract for the
    /// common case of pruning a short window.
    pub fn remove_span(&mut self, lo: Time, hi: Time) {
        if hi <= lo || self.spans.is_empty() {
            return;
        }
        let mut out = Vec::with_capacity(self.spans.len() + 1);
        for s in &self.spans {
            let before_hi = hi_min(s.hi, Some(lo));
            if s.lo < lo {
                out.push(Interval { lo: s.lo, hi: before_hi });
            }
            if hi_lt(Some(hi), s.hi) {
                out.push(Interval { lo: s.lo.max(hi), hi: s.hi });
            }
        }
        *self = IntervalSet { spans: out.into_iter().filter(|i| !i.is_empty()).collect() };
    }
}

/// Textual form used in logs and tests: `[3.000000,4.000000)∪[5.000000,6.000000)`,
/// `∅`, `[16.000000,∞)`.
impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.spans.is_empty() {
            return f.write_str("∅");
        }
        for (k, s) in self.spans.iter().enumerate() {
            if k > 0 {
                f.write_str("∪")?;
            }
            match s.hi {
                Some(hi) => write!(f, "[{},{})", s.lo, hi)?,
                None => write!(f, "[{},∞)", s.lo)?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid interval set `{0}`")]
pub struct ParseIntervalSetError(pub String);

impl FromStr for IntervalSet {
    type Err = ParseIntervalSetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseIntervalSetError(s.to_string());
        let s = s.trim();
        if s == "∅" || s.is_empty() {
            return Ok(IntervalSet::empty());
        }
        let mut ivs = Vec::new();
        for part in s.split('∪') {
            let body = part
                .trim()
                .strip_prefix('[')
                .and_then(|p| p.strip_suffix(')'))
                .ok_or_else(err)?;
            let (lo, hi) = body.split_once(',').ok_or_else(err)?;
            let lo: Time = lo.trim().parse().map_err(|_| err())?;
            let hi = match hi.trim() {
                "∞" | "inf" => None,
                h => Some(h.parse::<Time>().map_err(|_| err())?),
            };
            ivs.push(Interval { lo, hi });
        }
        Ok(IntervalSet::from_intervals(ivs))
    }
}
