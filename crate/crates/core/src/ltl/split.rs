//! Turns a monitor into the automaton the protocol runs on: self-loops are
//! dropped and every remaining guard becomes one transition per product term
//! of its minimal sum-of-products.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::formula::{ApTable, Letter, ProcessId, PropId};
use super::monitor::{LocationId, MonitorAutomaton, Verdict};
use super::qmc::minimal_cover;

pub type TrId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub prop: PropId,
    pub positive: bool,
}

impl Literal {
    pub fn holds(self, letter: Letter) -> bool {
        (letter & (1 << self.prop) != 0) == self.positive
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolTransition {
    pub id: TrId,
    pub source: LocationId,
    pub target: LocationId,
    /// Sorted by proposition; empty for a constant-true guard.
    pub conjunct: Vec<Literal>,
    /// Owners of the conjunct's propositions, ascending.
    pub associated: Vec<ProcessId>,
}

impl ProtocolTransition {
    pub fn holds(&self, letter: Letter) -> bool {
        self.conjunct.iter().all(|l| l.holds(letter))
    }

    pub fn is_constant_true(&self) -> bool {
        self.conjunct.is_empty()
    }

    pub fn is_associated(&self, p: ProcessId) -> bool {
        self.associated.binary_search(&p).is_ok()
    }

    /// The process that coordinates this transition when a step starts.
    pub fn initial_coordinator(&self) -> Option<ProcessId> {
        self.associated.first().copied()
    }

    /// Literals owned by `p`.
    pub fn literals_of<'a>(&'a self, aps: &'a ApTable, p: ProcessId) -> impl Iterator<Item = Literal> + 'a {
        self.conjunct.iter().copied().filter(move |l| aps.owner(l.prop) == p)
    }

    pub fn conjunct_display<'a>(&'a self, aps: &'a ApTable) -> ConjunctDisplay<'a> {
        ConjunctDisplay { lits: &self.conjunct, aps }
    }
}

pub struct ConjunctDisplay<'a> {
    lits: &'a [Literal],
    aps: &'a ApTable,
}

impl fmt::Display for ConjunctDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return f.write_str("true");
        }
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            if !l.positive {
                f.write_str("!")?;
            }
            f.write_str(self.aps.name(l.prop))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolAutomaton {
    monitor: MonitorAutomaton,
    transitions: Vec<ProtocolTransition>,
    outgoing: Vec<Vec<TrId>>,
}

impl ProtocolAutomaton {
    pub fn monitor(&self) -> &MonitorAutomaton {
        &self.monitor
    }

    pub fn aps(&self) -> &ApTable {
        self.monitor.aps()
    }

    pub fn num_processes(&self) -> usize {
        self.aps().num_processes()
    }

    pub fn num_locations(&self) -> usize {
        self.monitor.num_locations()
    }

    pub fn initial(&self) -> LocationId {
        self.monitor.initial()
    }

    pub fn label(&self, q: LocationId) -> Verdict {
        self.monitor.label(q)
    }

    pub fn transitions(&self) -> &[ProtocolTransition] {
        &self.transitions
    }

    pub fn transition(&self, id: TrId) -> &ProtocolTransition {
        &self.transitions[id]
    }

    /// Transition ids leaving `q`, ascending.
    pub fn outgoing(&self, q: LocationId) -> &[TrId] {
        &self.outgoing[q]
    }

    /// Lowest-id outgoing transition of `q` enabled by `letter`.
    pub fn enabled(&self, q: LocationId, letter: Letter) -> Option<TrId> {
        self.outgoing[q].iter().copied().find(|&t| self.transitions[t].holds(letter))
    }

    pub fn location_name(&self, q: LocationId) -> String {
        self.monitor.location_name(q)
    }
}

/// Splits every non-self-loop guard of `m` into its minimal sum-of-products.
/// Ids are assigned by source, then target, then literal order (by
/// proposition, positive before negative).
pub fn split_transitions(m: &MonitorAutomaton) -> ProtocolAutomaton {
    let aps = m.aps();
    let n = aps.len();
    let mut transitions = Vec::new();
    let mut outgoing = vec![Vec::new(); m.num_locations()];
    for (q, out) in outgoing.iter_mut().enumerate() {
        if m.label(q).is_terminal() {
            continue;
        }
        for target in m.successors(q) {
            if target == q {
                continue;
            }
            let guard = m.guard(q, target);
            for term in minimal_cover(&guard, n) {
                let conjunct: Vec<Literal> = term
                    .sort_key(n)
                    .into_iter()
                    .map(|(prop, negative)| Literal { prop, positive: !negative })
                    .collect();
                let mut associated: Vec<ProcessId> = conjunct.iter().map(|l| aps.owner(l.prop)).collect();
                associated.sort_unstable();
                associated.dedup();
                let id = transitions.len();
                out.push(id);
                transitions.push(ProtocolTransition { id, source: q, target, conjunct, associated });
            }
        }
    }
    ProtocolAutomaton { monitor: m.clone(), transitions, outgoing }
}
