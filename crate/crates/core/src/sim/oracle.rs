//! Offline ground truth: the protocol automaton run directly over the global
//! piecewise-constant state.

use crate::ltl::{Letter, LocationId, ProtocolAutomaton, Verdict};
use crate::time::Time;

use super::result::{LocationChange, RunResult};
use super::trace::Trace;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("location changes at {0} revisit a location")]
    Cycle(Time),
}

/// Incremental oracle. Feed global-state segments in time order.
#[derive(Debug, Clone)]
pub struct OracleWalker<'a> {
    pa: &'a ProtocolAutomaton,
    location: LocationId,
    changes: Vec<LocationChange>,
    verdict: Option<(Verdict, Time)>,
}

impl<'a> OracleWalker<'a> {
    pub fn new(pa: &'a ProtocolAutomaton) -> Self {
        OracleWalker { pa, location: pa.initial(), changes: Vec::new(), verdict: None }
    }

    pub fn location(&self) -> LocationId {
        self.location
    }

    pub fn verdict(&self) -> Option<(Verdict, Time)> {
        self.verdict
    }

    pub fn changes(&self) -> &[LocationChange] {
        &self.changes
    }

    /// The global state is `letter` from `start` until the next segment.
    /// Within a segment the enabled transitions of a location are constant,
    /// so every change happens at a segment start.
    pub fn feed(&mut self, start: Time, letter: Letter) -> Result<(), OracleError> {
        let mut entered = vec![self.location];
        while self.verdict.is_none() {
            let Some(tr) = self.pa.enabled(self.location, letter) else { break };
            let to = self.pa.transition(tr).target;
            self.changes.push(LocationChange { time: start, from: self.location, to, tr });
            self.location = to;
            let label = self.pa.label(to);
            if label.is_terminal() {
                self.verdict = Some((label, start));
            } else if entered.contains(&to) {
                return Err(OracleError::Cycle(start));
            }
            entered.push(to);
        }
        Ok(())
    }

    pub fn finish(self) -> RunResult {
        let mut r = RunResult::empty();
        if let Some((v, t)) = self.verdict {
            r.verdict = v;
            r.verdict_time = Some(t);
        }
        r.location_changes = self.changes;
        r
    }
}

pub fn oracle_evaluate(pa: &ProtocolAutomaton, trace: &Trace) -> Result<RunResult, OracleError> {
    let mut w = OracleWalker::new(pa);
    for (start, letter) in trace.segments() {
        w.feed(start, letter)?;
        if w.verdict().is_some() {
            break;
        }
    }
    Ok(w.finish())
}
