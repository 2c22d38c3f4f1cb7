//! Tableau translation of LTL into a transition-based generalized Büchi
//! automaton, plus per-state language nonemptiness.
//!
//! A state is a set of negation-normal-form obligations that must hold from
//! the current position on. Expanding a state yields transitions labeled by
//! a consistent conjunction of literals (a cube), the obligations for the
//! next position, and the set of until-obligations that were *not* postponed
//! on that transition. An until that is postponed forever is never
//! fulfilled, so a run is accepting iff every until is unpostponed
//! infinitely often.

use std::collections::{BTreeSet, HashMap};

use super::formula::{Formula, Letter, PropId};

pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Nnf {
    True,
    False,
    Lit(PropId, bool),
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    Next(NodeId),
    /// The until's acceptance index is assigned on interning.
    Until(NodeId, NodeId),
    Release(NodeId, NodeId),
}

/// Hash-consed NNF formulas.
#[derive(Debug, Default)]
pub struct NnfArena {
    nodes: Vec<Nnf>,
    index: HashMap<Nnf, NodeId>,
    until_index: HashMap<NodeId, usize>,
}

impl NnfArena {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, n: Nnf) -> NodeId {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        if matches!(n, Nnf::Until(..)) {
            let k = self.until_index.len();
            self.until_index.insert(id, k);
        }
        self.nodes.push(n.clone());
        self.index.insert(n, id);
        id
    }

    pub fn node(&self, id: NodeId) -> &Nnf {
        &self.nodes[id as usize]
    }

    pub fn num_untils(&self) -> usize {
        self.until_index.len()
    }

    /// Converts a core (or sugared) formula, negated when `negate` is set.
    pub fn from_formula(&mut self, f: &Formula, negate: bool) -> NodeId {
        use Formula as F;
        match (f, negate) {
            (F::True, false) | (F::False, true) => self.intern(Nnf::True),
            (F::True, true) | (F::False, false) => self.intern(Nnf::False),
            (F::Prop(p), neg) => self.intern(Nnf::Lit(*p, !neg)),
            (F::Not(g), neg) => self.from_formula(g, !neg),
            (F::Or(a, b), false) | (F::And(a, b), true) => {
                let (x, y) = (self.from_formula(a, negate), self.from_formula(b, negate));
                self.intern(Nnf::Or(x, y))
            }
            (F::And(a, b), false) | (F::Or(a, b), true) => {
                let (x, y) = (self.from_formula(a, negate), self.from_formula(b, negate));
                self.intern(Nnf::And(x, y))
            }
            (F::Implies(a, b), false) => {
                let (x, y) = (self.from_formula(a, true), self.from_formula(b, false));
                self.intern(Nnf::Or(x, y))
            }
            (F::Implies(a, b), true) => {
                let (x, y) = (self.from_formula(a, false), self.from_formula(b, true));
                self.intern(Nnf::And(x, y))
            }
            (F::Next(g), neg) => {
                let x = self.from_formula(g, neg);
                self.intern(Nnf::Next(x))
            }
            (F::Until(a, b), false) => {
                let (x, y) = (self.from_formula(a, false), self.from_formula(b, false));
                self.intern(Nnf::Until(x, y))
            }
            (F::Until(a, b), true) => {
                let (x, y) = (self.from_formula(a, true), self.from_formula(b, true));
                self.intern(Nnf::Release(x, y))
            }
            (F::Eventually(g), false) => {
                let (t, x) = (self.intern(Nnf::True), self.from_formula(g, false));
                self.intern(Nnf::Until(t, x))
            }
            (F::Eventually(g), true) => {
                let (fl, x) = (self.intern(Nnf::False), self.from_formula(g, true));
                self.intern(Nnf::Release(fl, x))
            }
            (F::Always(g), false) => {
                let (fl, x) = (self.intern(Nnf::False), self.from_formula(g, false));
                self.intern(Nnf::Release(fl, x))
            }
            (F::Always(g), true) => {
                let (t, x) = (self.intern(Nnf::True), self.from_formula(g, true));
                self.intern(Nnf::Until(t, x))
            }
        }
    }
}

/// A conjunction of literals: `letter & care == value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Cube {
    pub care: u32,
    pub value: u32,
}

impl Cube {
    pub const TRUE: Cube = Cube { care: 0, value: 0 };

    pub fn matches(&self, letter: Letter) -> bool {
        letter & self.care == self.value
    }

    fn with(self, p: PropId, positive: bool) -> Option<Cube> {
        let bit = 1u32 << p;
        if self.care & bit != 0 {
            return ((self.value & bit != 0) == positive).then_some(self);
        }
        Some(Cube { care: self.care | bit, value: if positive { self.value | bit } else { self.value } })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub label: Cube,
    pub target: usize,
    /// Bit `k` set iff until `k` is not postponed on this edge.
    pub accepting: u64,
}

/// Transition-based generalized Büchi automaton.
#[derive(Debug, Clone)]
pub struct Tgba {
    pub initial: usize,
    pub states: Vec<Vec<NodeId>>,
    pub edges: Vec<Vec<Edge>>,
    pub num_acceptance_sets: usize,
}

#[derive(Debug, Clone)]
struct Branch {
    todo: Vec<NodeId>,
    done: BTreeSet<NodeId>,
    label: Cube,
    next: BTreeSet<NodeId>,
    postponed: u64,
}

fn expand(arena: &NnfArena, obligations: &[NodeId]) -> Vec<(Cube, Vec<NodeId>, u64)> {
    let mut results = Vec::new();
    let mut stack = vec![Branch {
        todo: obligations.to_vec(),
        done: BTreeSet::new(),
        label: Cube::TRUE,
        next: BTreeSet::new(),
        postponed: 0,
    }];
    'branches: while let Some(mut b) = stack.pop() {
        while let Some(id) = b.todo.pop() {
            if !b.done.insert(id) {
                continue;
            }
            match arena.node(id) {
                Nnf::True => {}
                Nnf::False => continue 'branches,
                Nnf::Lit(p, pos) => match b.label.with(*p, *pos) {
                    Some(c) => b.label = c,
                    None => continue 'branches,
                },
                Nnf::And(x, y) => {
                    b.todo.push(*x);
                    b.todo.push(*y);
                }
                Nnf::Or(x, y) => {
                    let mut alt = b.clone();
                    alt.todo.push(*y);
                    stack.push(alt);
                    b.todo.push(*x);
                }
                Nnf::Next(x) => {
                    b.next.insert(*x);
                }
                Nnf::Until(x, y) => {
                    let k = arena.until_index[&id];
                    let mut later = b.clone();
                    later.todo.push(*x);
                    later.next.insert(id);
                    later.postponed |= 1 << k;
                    stack.push(later);
                    b.todo.push(*y);
                }
                Nnf::Release(x, y) => {
                    let mut later = b.clone();
                    later.todo.push(*y);
                    later.next.insert(id);
                    stack.push(later);
                    b.todo.push(*x);
                    b.todo.push(*y);
                }
            }
        }
        results.push((b.label, b.next.into_iter().collect(), b.postponed));
    }
    results.sort();
    results.dedup();
    results
}

impl Tgba {
    pub fn build(arena: &NnfArena, root: NodeId) -> Tgba {
        assert!(arena.num_untils() <= 64, "too many until subformulas");
        let all = if arena.num_untils() == 64 { u64::MAX } else { (1u64 << arena.num_untils()) - 1 };
        let mut states: Vec<Vec<NodeId>> = vec![vec![root]];
        let mut ids: HashMap<Vec<NodeId>, usize> = HashMap::from([(vec![root], 0)]);
        let mut edges: Vec<Vec<Edge>> = Vec::new();
        let mut k = 0;
        while k < states.len() {
            let mut out = Vec::new();
            for (label, next, postponed) in expand(arena, &states[k]) {
                let target = *ids.entry(next.clone()).or_insert_with(|| {
                    states.push(next);
                    states.len() - 1
                });
                out.push(Edge { label, target, accepting: all & !postponed });
            }
            edges.push(out);
            k += 1;
        }
        Tgba { initial: 0, states, edges, num_acceptance_sets: arena.num_untils() }
    }

    /// `live[s]` iff some infinite accepting run starts in `s`.
    pub fn nonempty_states(&self) -> Vec<bool> {
        let n = self.states.len();
        let all = if self.num_acceptance_sets == 64 {
            u64::MAX
        } else {
            (1u64 << self.num_acceptance_sets) - 1
        };
        let succ: Vec<Vec<usize>> =
            self.edges.iter().map(|es| es.iter().map(|e| e.target).collect()).collect();
        let comp = tarjan_scc(&succ);
        let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut has_edge = vec![false; ncomp];
        let mut acc = vec![0u64; ncomp];
        for (s, es) in self.edges.iter().enumerate() {
            for e in es {
                if comp[s] == comp[e.target] {
                    has_edge[comp[s]] = true;
                    acc[comp[s]] |= e.accepting;
                }
            }
        }
        let mut live: Vec<bool> = (0..n).map(|s| has_edge[comp[s]] && acc[comp[s]] == all).collect();
        // Backward closure over predecessors.
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (s, ts) in succ.iter().enumerate() {
            for &t in ts {
                pred[t].push(s);
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&s| live[s]).collect();
        while let Some(t) = stack.pop() {
            for &s in &pred[t] {
                if !live[s] {
                    live[s] = true;
                    stack.push(s);
                }
            }
        }
        live
    }
}

/// Iterative Tarjan; returns the component index of each node.
pub(crate) fn tarjan_scc(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSET; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i];
                *i += 1;
                if index[w] == UNSET {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::formula::ApTable;
    use crate::ltl::parser::parse_ltl;

    fn tgba(src: &str, negate: bool) -> (Tgba, Vec<bool>) {
        let aps = ApTable::from_pairs(&[("a", 0), ("b", 1), ("c", 2)]).unwrap();
        let f = parse_ltl(src, &aps).unwrap();
        let mut arena = NnfArena::new();
        let root = arena.from_formula(&f, negate);
        let t = Tgba::build(&arena, root);
        let live = t.nonempty_states();
        (t, live)
    }

    #[test]
    fn satisfiability() {
        assert!(tgba("a U b", false).1[0]);
        assert!(!tgba("false", false).1[0]);
        assert!(!tgba("a & !a", false).1[0]);
        assert!(!tgba("[]a & <>!a", false).1[0]);
        assert!(tgba("[]<>a", false).1[0]);
        assert!(!tgba("true", true).1[0]);
        // G F a & F G !a is unsatisfiable
        assert!(!tgba("[]<>a & <>[]!a", false).1[0]);
    }

    #[test]
    fn tarjan_finds_cycles() {
        let succ = vec![vec![1], vec![2], vec![0, 3], vec![]];
        let c = tarjan_scc(&succ);
        assert_eq!(c[0], c[1]);
        assert_eq!(c[1], c[2]);
        assert_ne!(c[2], c[3]);
    }

    #[test]
    fn cube_conflicts() {
        let c = Cube::TRUE.with(0, true).unwrap();
        assert!(c.with(0, false).is_none());
        assert!(c.matches(0b1));
        assert!(!c.matches(0b0));
    }
}
