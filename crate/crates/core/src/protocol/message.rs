use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::interval::IntervalSet;
use crate::ltl::{LocationId, ProcessId, TrId, Verdict};
use crate::time::Time;

/// Identifies a monitoring step: the time of the location change that
/// started it plus the number of location changes so far. Several changes
/// can happen at the same instant, so the time alone is ambiguous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StepId {
    pub t_llc: Time,
    pub index: u64,
}

impl StepId {
    pub const INITIAL: StepId = StepId { t_llc: Time::ZERO, index: 0 };

    pub fn next(self, at: Time) -> StepId {
        StepId { t_llc: at, index: self.index + 1 }
    }
}

impl fmt::Display for StepId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.t_llc, self.index)
    }
}

/// Last-update time of one associated process. `None` means nothing is
/// known about that process in the current step yet.
pub type LastUpdate = (ProcessId, Option<Time>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Message {
    Delegate {
        step: StepId,
        location: LocationId,
        tr: TrId,
        gpsr: IntervalSet,
        t_lu: Vec<LastUpdate>,
    },
    Aggregate {
        step: StepId,
        location: LocationId,
        trc: BTreeSet<TrId>,
        tr_e: Option<TrId>,
        t_tr_e: Option<Time>,
    },
    StepStart {
        step: StepId,
        location: LocationId,
        coordinated: BTreeSet<TrId>,
    },
    Verdict {
        verdict: Verdict,
        at: Time,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    Delegate,
    Aggregate,
    StepStart,
    Verdict,
}

impl MessageKind {
    pub fn name(self) -> &'static str {
        match self {
            MessageKind::Delegate => "Delegate",
            MessageKind::Aggregate => "Aggregate",
            MessageKind::StepStart => "StepStart",
            MessageKind::Verdict => "Verdict",
        }
    }
}

impl Message {
    pub fn kind(&self) -> MessageKind {
        match self {
            Message::Delegate { .. } => MessageKind::Delegate,
            Message::Aggregate { .. } => MessageKind::Aggregate,
            Message::StepStart { .. } => MessageKind::StepStart,
            Message::Verdict { .. } => MessageKind::Verdict,
        }
    }

    /// Step and location the message belongs to; `None` for `Verdict`.
    pub fn step(&self) -> Option<(StepId, LocationId)> {
        match self {
            Message::Delegate { step, location, .. }
            | Message::Aggregate { step, location, .. }
            | Message::StepStart { step, location, .. } => Some((*step, *location)),
            Message::Verdict { .. } => None,
        }
    }
}

fn fmt_opt_time(t: Option<Time>) -> String {
    t.map_or_else(|| "-".to_string(), |t| t.to_string())
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Message::Delegate { step, location, tr, gpsr, t_lu } => {
                let lu: Vec<String> =
                    t_lu.iter().map(|(p, t)| format!("p{p}:{}", fmt_opt_time(*t))).collect();
                write!(f, "Delegate[{step} q{location} Tr{tr} gpsr={gpsr} lu={{{}}}]", lu.join(","))
            }
            Message::Aggregate { step, location, trc, tr_e, t_tr_e } => {
                let trc: Vec<String> = trc.iter().map(|t| format!("Tr{t}")).collect();
                let e = tr_e.map_or_else(|| "-".to_string(), |t| format!("Tr{t}"));
                write!(
                    f,
                    "Aggregate[{step} q{location} TrC={{{}}} Tr_e={e}@{}]",
                    trc.join(","),
                    fmt_opt_time(*t_tr_e)
                )
            }
            Message::StepStart { step, location, coordinated } => {
                let c: Vec<String> = coordinated.iter().map(|t| format!("Tr{t}")).collect();
                write!(f, "StepStart[{step} q{location} coord={{{}}}]", c.join(","))
            }
            Message::Verdict { verdict, at } => write!(f, "Verdict[{verdict}@{at}]"),
        }
    }
}
