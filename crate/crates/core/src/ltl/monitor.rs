//! Three-valued monitor synthesis.
//!
//! For `f` and `¬f` we build a generalized Büchi automaton, keep the states
//! with a nonempty language, read the result as an NFA over finite words
//! (every kept state accepts), determinize both by subset construction and
//! run them in lockstep. A product state is `⊤` when the `¬f` side has no
//! live state left, `⊥` when the `f` side has none, `?` otherwise. The
//! product is then minimized with the labels as the initial partition.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::buchi::{NnfArena, Tgba};
use super::formula::{ApTable, Formula, Letter};

pub type LocationId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "top")]
    Top,
    #[serde(rename = "bottom")]
    Bottom,
    #[serde(rename = "unknown")]
    Unknown,
}

impl Verdict {
    pub fn is_terminal(self) -> bool {
        self != Verdict::Unknown
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Verdict::Top => "⊤",
            Verdict::Bottom => "⊥",
            Verdict::Unknown => "?",
        }
    }

    /// ASCII form used in CSV files and configs.
    pub fn ascii(self) -> &'static str {
        match self {
            Verdict::Top => "top",
            Verdict::Bottom => "bottom",
            Verdict::Unknown => "unknown",
        }
    }

    pub fn from_ascii(s: &str) -> Option<Verdict> {
        match s {
            "top" | "⊤" | "T" => Some(Verdict::Top),
            "bottom" | "⊥" | "F" => Some(Verdict::Bottom),
            "unknown" | "?" => Some(Verdict::Unknown),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Deterministic, total monitor over the alphabet `2^AP`, stored as a dense
/// successor table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonitorAutomaton {
    aps: ApTable,
    labels: Vec<Verdict>,
    initial: LocationId,
    delta: Vec<Vec<LocationId>>,
}

impl MonitorAutomaton {
    /// Builds a monitor from raw parts, checking shape but not semantics.
    pub fn from_parts(
        aps: ApTable,
        labels: Vec<Verdict>,
        initial: LocationId,
        delta: Vec<Vec<LocationId>>,
    ) -> Self {
        assert_eq!(labels.len(), delta.len());
        assert!(initial < labels.len());
        for row in &delta {
            assert_eq!(row.len(), aps.num_letters());
            assert!(row.iter().all(|&t| t < labels.len()));
        }
        MonitorAutomaton { aps, labels, initial, delta }
    }

    pub fn aps(&self) -> &ApTable {
        &self.aps
    }

    pub fn num_locations(&self) -> usize {
        self.labels.len()
    }

    pub fn initial(&self) -> LocationId {
        self.initial
    }

    pub fn label(&self, q: LocationId) -> Verdict {
        self.labels[q]
    }

    pub fn labels(&self) -> &[Verdict] {
        &self.labels
    }

    pub fn step(&self, q: LocationId, letter: Letter) -> LocationId {
        self.delta[q][letter as usize]
    }

    pub fn run(&self, word: &[Letter]) -> LocationId {
        word.iter().fold(self.initial, |q, &l| self.step(q, l))
    }

    /// Letters moving `from` to `to`, ascending.
    pub fn guard(&self, from: LocationId, to: LocationId) -> Vec<Letter> {
        self.delta[from]
            .iter()
            .enumerate()
            .filter(|(_, &t)| t == to)
            .map(|(l, _)| l as Letter)
            .collect()
    }

    /// Distinct successor locations of `q`, ascending.
    pub fn successors(&self, q: LocationId) -> Vec<LocationId> {
        let s: BTreeSet<LocationId> = self.delta[q].iter().copied().collect();
        s.into_iter().collect()
    }

    /// Display name: `?` locations are `q0, q1, ...`; terminals are `q⊤`/`q⊥`.
    pub fn location_name(&self, q: LocationId) -> String {
        match self.labels[q] {
            Verdict::Top => "q⊤".into(),
            Verdict::Bottom => "q⊥".into(),
            Verdict::Unknown => {
                format!("q{}", self.labels[..q].iter().filter(|l| **l == Verdict::Unknown).count())
            }
        }
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_locations()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(q) = stack.pop() {
            for t in self.successors(q) {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }
}

type Subset = Vec<usize>;

struct FiniteWordNfa {
    tgba: Tgba,
    live: Vec<bool>,
}

impl FiniteWordNfa {
    fn new(f: &Formula, negate: bool) -> Self {
        let mut arena = NnfArena::new();
        let root = arena.from_formula(f, negate);
        let tgba = Tgba::build(&arena, root);
        let live = tgba.nonempty_states();
        FiniteWordNfa { tgba, live }
    }

    fn initial(&self) -> Subset {
        if self.live[self.tgba.initial] {
            vec![self.tgba.initial]
        } else {
            Vec::new()
        }
    }

    fn step(&self, from: &Subset, letter: Letter) -> Subset {
        let mut out = BTreeSet::new();
        for &s in from {
            for e in &self.tgba.edges[s] {
                if self.live[e.target] && e.label.matches(letter) {
                    out.insert(e.target);
                }
            }
        }
        out.into_iter().collect()
    }
}

/// Synthesizes the minimal three-valued monitor for `f` over the alphabet of `aps`.
pub fn build_monitor(f: &Formula, aps: &ApTable) -> MonitorAutomaton {
    let pos = FiniteWordNfa::new(f, false);
    let neg = FiniteWordNfa::new(f, true);
    let num_letters = aps.num_letters();

    // Product of the two subset constructions, explored breadth-first.
    let mut ids: HashMap<(Subset, Subset), usize> = HashMap::new();
    let mut states: Vec<(Subset, Subset)> = Vec::new();
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let init = (pos.initial(), neg.initial());
    ids.insert(init.clone(), 0);
    states.push(init);
    let mut queue = VecDeque::from([0usize]);
    // The step cache keeps determinization linear in distinct subsets.
    let mut pos_cache: HashMap<(Subset, Letter), Subset> = HashMap::new();
    let mut neg_cache: HashMap<(Subset, Letter), Subset> = HashMap::new();
    while let Some(k) = queue.pop_front() {
        let (p, n) = states[k].clone();
        let mut row = Vec::with_capacity(num_letters);
        for letter in 0..num_letters as Letter {
            let p2 = pos_cache
                .entry((p.clone(), letter))
                .or_insert_with(|| pos.step(&p, letter))
                .clone();
            let n2 = neg_cache
                .entry((n.clone(), letter))
                .or_insert_with(|| neg.step(&n, letter))
                .clone();
            let key = (p2, n2);
            let id = match ids.get(&key) {
                Some(&id) => id,
                None => {
                    let id = states.len();
                    ids.insert(key.clone(), id);
                    states.push(key);
                    queue.push_back(id);
                    id
                }
            };
            row.push(id);
        }
        delta.push(row);
    }
    let labels: Vec<Verdict> = states
        .iter()
        .map(|(p, n)| match (p.is_empty(), n.is_empty()) {
            (false, true) => Verdict::Top,
            (true, false) => Verdict::Bottom,
            (false, false) => Verdict::Unknown,
            (true, true) => unreachable!("every ω-word satisfies f or ¬f"),
        })
        .collect();

    minimize(aps.clone(), &labels, 0, &delta)
}

/// Moore partition refinement starting from the label partition, followed by
/// canonical renumbering: `?` locations in breadth-first order from the
/// initial location, then `⊤`, then `⊥`. Terminal classes are absorbing by
/// construction and each collapses to a single location.
pub fn minimize(
    aps: ApTable,
    labels: &[Verdict],
    initial: usize,
    delta: &[Vec<usize>],
) -> MonitorAutomaton {
    let n = labels.len();
    let num_letters = aps.num_letters();
    let mut class: Vec<usize> = labels
        .iter()
        .map(|l| match l {
            Verdict::Unknown => 0,
            Verdict::Top => 1,
            Verdict::Bottom => 2,
        })
        .collect();
    let mut num_classes = 0;
    loop {
        let mut sig_ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next = vec![0; n];
        for s in 0..n {
            let sig: Vec<usize> = delta[s].iter().map(|&t| class[t]).collect();
            let len = sig_ids.len();
            next[s] = *sig_ids.entry((class[s], sig)).or_insert(len);
        }
        let count = sig_ids.len();
        class = next;
        if count == num_classes {
            break;
        }
        num_classes = count;
    }

    // Quotient, BFS order from the initial class.
    let mut order: Vec<usize> = Vec::new();
    let mut pos_of: HashMap<usize, usize> = HashMap::new();
    let mut rep: HashMap<usize, usize> = HashMap::new();
    for (s, &c) in class.iter().enumerate().take(n) {
        rep.entry(c).or_insert(s);
    }
    let mut queue = VecDeque::from([class[initial]]);
    pos_of.insert(class[initial], 0);
    order.push(class[initial]);
    while let Some(c) = queue.pop_front() {
        let r = rep[&c];
        for letter in 0..num_letters {
            let t = class[delta[r][letter]];
            if let std::collections::hash_map::Entry::Vacant(e) = pos_of.entry(t) {
                e.insert(order.len());
                order.push(t);
                queue.push_back(t);
            }
        }
    }
    let label_of = |c: usize| labels[rep[&c]];
    let mut sorted = order.clone();
    sorted.sort_by_key(|c| {
        let rank = match label_of(*c) {
            Verdict::Unknown => 0,
            Verdict::Top => 1,
            Verdict::Bottom => 2,
        };
        (rank, pos_of[c])
    });
    let new_id: HashMap<usize, usize> = sorted.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut out_labels = Vec::with_capacity(sorted.len());
    let mut out_delta = Vec::with_capacity(sorted.len());
    for c in &sorted {
        let l = label_of(*c);
        out_labels.push(l);
        let me = new_id[c];
        let r = rep[c];
        let row: Vec<usize> = if l.is_terminal() {
            vec![me; num_letters]
        } else {
            (0..num_letters).map(|letter| new_id[&class[delta[r][letter]]]).collect()
        };
        out_delta.push(row);
    }
    MonitorAutomaton::from_parts(aps, out_labels, new_id[&class[initial]], out_delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monitorability {
    Monitorable,
    NonMonitorable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonitorabilityReport {
    pub classification: Monitorability,
    /// Reachable `?` locations from which no terminal location is reachable.
    pub dead_locations: Vec<LocationId>,
}

impl MonitorabilityReport {
    pub fn is_monitorable(&self) -> bool {
        self.classification == Monitorability::Monitorable
    }
}

/// A property is monitorable when some terminal location is reachable from
/// the initial one. Stuck `?` locations are reported, not rejected.
pub fn check_monitorable(m: &MonitorAutomaton) -> MonitorabilityReport {
    let reach = m.reachable();
    let n = m.num_locations();
    let mut can_decide: Vec<bool> = (0..n).map(|q| m.label(q).is_terminal()).collect();
    loop {
        let mut changed = false;
        for q in 0..n {
            if !can_decide[q] && m.successors(q).iter().any(|&t| can_decide[t]) {
                can_decide[q] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let monitorable = (0..n).any(|q| reach[q] && m.label(q).is_terminal());
    MonitorabilityReport {
        classification: if monitorable {
            Monitorability::Monitorable
        } else {
            Monitorability::NonMonitorable
        },
        dead_locations: (0..n).filter(|&q| reach[q] && !can_decide[q]).collect(),
    }
}
