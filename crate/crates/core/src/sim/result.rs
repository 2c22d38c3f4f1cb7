use serde::{Deserialize, Serialize};

use crate::ltl::{LocationId, TrId, Verdict};
use crate::protocol::MessageKind;
use crate::time::Time;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocationChange {
    pub time: Time,
    pub from: LocationId,
    pub to: LocationId,
    pub tr: TrId,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageCounts {
    pub delegate: u64,
    pub aggregate: u64,
    pub step_start: u64,
    /// State-change reports of the centralized baseline.
    pub update: u64,
}

impl MessageCounts {
    pub fn record(&mut self, kind: MessageKind) {
        match kind {
            MessageKind::Delegate => self.delegate += 1,
            MessageKind::Aggregate => self.aggregate += 1,
            MessageKind::StepStart => self.step_start += 1,
            MessageKind::Verdict => {}
        }
    }

    pub fn total(&self) -> u64 {
        self.delegate + self.aggregate + self.step_start + self.update
    }
}

/// Outcome of one monitored run. `Verdict` messages are not counted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub verdict: Verdict,
    /// Instant the verdict holds from (the enabling time of the final change).
    pub verdict_time: Option<Time>,
    /// Instant the monitor announced the verdict.
    pub emitted_at: Option<Time>,
    pub location_changes: Vec<LocationChange>,
    pub message_counts: MessageCounts,
    pub total_messages: u64,
}

impl RunResult {
    pub fn empty() -> Self {
        RunResult {
            verdict: Verdict::Unknown,
            verdict_time: None,
            emitted_at: None,
            location_changes: Vec::new(),
            message_counts: MessageCounts::default(),
            total_messages: 0,
        }
    }

    /// Verdict, verdict time and location changes, the parts every
    /// algorithm must agree on.
    pub fn observable(&self) -> (Verdict, Option<Time>, &[LocationChange]) {
        (self.verdict, self.verdict_time, &self.location_changes)
    }
}
