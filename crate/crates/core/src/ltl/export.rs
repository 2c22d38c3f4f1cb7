//! Automaton export as JSON and Graphviz DOT.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::formula::AtomicProposition;
use super::monitor::{LocationId, Verdict};
use super::split::{Literal, ProtocolAutomaton, TrId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportedLocation {
    pub id: LocationId,
    pub name: String,
    pub label: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportedTransition {
    pub id: TrId,
    pub source: LocationId,
    pub target: LocationId,
    pub conjunct: String,
    pub literals: Vec<Literal>,
    pub associated: Vec<usize>,
}

/// Document layout of `compile --format json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportedAutomaton {
    pub formula: String,
    pub propositions: Vec<AtomicProposition>,
    pub initial: LocationId,
    pub locations: Vec<ExportedLocation>,
    pub transitions: Vec<ExportedTransition>,
    /// `delta[q][letter]` of the underlying monitor, letters as bitmasks.
    pub delta: Vec<Vec<LocationId>>,
}

impl ExportedAutomaton {
    pub fn new(pa: &ProtocolAutomaton, formula: &str) -> Self {
        let aps = pa.aps();
        let m = pa.monitor();
        ExportedAutomaton {
            formula: formula.to_string(),
            propositions: aps.props().to_vec(),
            initial: pa.initial(),
            locations: (0..pa.num_locations())
                .map(|q| ExportedLocation { id: q, name: pa.location_name(q), label: pa.label(q) })
                .collect(),
            transitions: pa
                .transitions()
                .iter()
                .map(|t| ExportedTransition {
                    id: t.id,
                    source: t.source,
                    target: t.target,
                    conjunct: t.conjunct_display(aps).to_string(),
                    literals: t.conjunct.clone(),
                    associated: t.associated.clone(),
                })
                .collect(),
            delta: (0..m.num_locations())
                .map(|q| (0..aps.num_letters() as u32).map(|l| m.step(q, l)).collect())
                .collect(),
        }
    }
}

pub fn to_json(pa: &ProtocolAutomaton, formula: &str) -> String {
    serde_json::to_string_pretty(&ExportedAutomaton::new(pa, formula)).expect("plain data serializes")
}

pub fn to_dot(pa: &ProtocolAutomaton) -> String {
    let aps = pa.aps();
    let mut out = String::from("digraph monitor {\n  rankdir=LR;\n  init [shape=point];\n");
    for q in 0..pa.num_locations() {
        let shape = match pa.label(q) {
            Verdict::Unknown => "circle",
            _ => "doublecircle",
        };
        let _ = writeln!(out, "  q{q} [label=\"{}\", shape={shape}];", pa.location_name(q));
    }
    let _ = writeln!(out, "  init -> q{};", pa.initial());
    for t in pa.transitions() {
        let _ = writeln!(
            out,
            "  q{} -> q{} [label=\"Tr{} = {}\"];",
            t.source,
            t.target,
            t.id,
            t.conjunct_display(aps)
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::formula::ApTable;
    use crate::ltl::monitor::build_monitor;
    use crate::ltl::parser::parse_ltl;
    use crate::ltl::split::split_transitions;

    #[test]
    fn json_roundtrips_and_dot_lists_transitions() {
        let aps = ApTable::from_pairs(&[("a", 0), ("b", 1), ("c", 2)]).unwrap();
        let src = "!a U (a U (b & c))";
        let pa = split_transitions(&build_monitor(&parse_ltl(src, &aps).unwrap(), &aps));
        let json = to_json(&pa, src);
        let back: ExportedAutomaton = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ExportedAutomaton::new(&pa, src));
        assert_eq!(back.transitions[4].conjunct, "!a & !b");
        assert_eq!(back.locations[2].label, Verdict::Top);
        let dot = to_dot(&pa);
        assert_eq!(dot.matches(" -> q").count(), 7);
        assert!(dot.contains("Tr3 = b & c"));
    }
}
