//! Brute-force LTL3 verdicts over an explicit atom graph.
//!
//! An atom fixes a letter plus the truth of every `X` and `U` subformula.
//! Consecutive atoms must agree with the one-step expansion laws, and an
//! infinite atom path is a model when every until is infinitely often
//! either false or fulfilled. A prefix has a satisfying extension iff some
//! consistent atom path over the prefix starts in an atom satisfying the
//! formula and ends in an atom with a fair infinite continuation.

use decmon_core::{Formula, Verdict};

#[derive(Debug, Clone)]
enum Phi {
    True,
    Prop(usize),
    Not(Box<Phi>),
    And(Box<Phi>, Box<Phi>),
    /// Index into the temporal table.
    Temporal(usize),
}

#[derive(Debug, Clone)]
enum Temporal {
    Next(Phi),
    Until(Phi, Phi),
}

struct Builder {
    temporals: Vec<Temporal>,
}

impl Builder {
    fn lower(&mut self, f: &Formula) -> Phi {
        use Formula as F;
        let not = |p: Phi| Phi::Not(Box::new(p));
        let and = |a: Phi, b: Phi| Phi::And(Box::new(a), Box::new(b));
        let or = |a: Phi, b: Phi| not(and(not(a), not(b)));
        match f {
            F::True => Phi::True,
            F::False => not(Phi::True),
            F::Prop(p) => Phi::Prop(*p),
            F::Not(a) => not(self.lower(a)),
            F::And(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                and(a, b)
            }
            F::Or(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                or(a, b)
            }
            F::Implies(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                or(not(a), b)
            }
            F::Next(a) => {
                let a = self.lower(a);
                self.push(Temporal::Next(a))
            }
            F::Until(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                self.push(Temporal::Until(a, b))
            }
            F::Eventually(a) => {
                let a = self.lower(a);
                self.push(Temporal::Until(Phi::True, a))
            }
            F::Always(a) => {
                let a = self.lower(a);
                let ev = self.push(Temporal::Until(Phi::True, not(a)));
                not(ev)
            }
        }
    }

    fn push(&mut self, t: Temporal) -> Phi {
        self.temporals.push(t);
        Phi::Temporal(self.temporals.len() - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Atom {
    letter: u32,
    bits: u32,
}

fn holds(p: &Phi, a: Atom) -> bool {
    match p {
        Phi::True => true,
        Phi::Prop(i) => a.letter & (1 << i) != 0,
        Phi::Not(x) => !holds(x, a),
        Phi::And(x, y) => holds(x, a) && holds(y, a),
        Phi::Temporal(i) => a.bits & (1 << i) != 0,
    }
}

pub struct AtomGraph {
    root: Phi,
    atoms: Vec<Atom>,
    succ: Vec<Vec<usize>>,
    good: Vec<bool>,
}

impl AtomGraph {
    pub fn new(f: &Formula, num_props: usize) -> Self {
        let mut b = Builder { temporals: Vec::new() };
        let root = b.lower(f);
        let temporals = b.temporals;
        let nt = temporals.len();
        assert!(nt <= 12, "too many temporal subformulas for brute force");
        let atoms: Vec<Atom> = (0..1u32 << num_props)
            .flat_map(|letter| (0..1u32 << nt).map(move |bits| Atom { letter, bits }))
            .collect();
        let consistent = |a: Atom, b: Atom| {
            temporals.iter().enumerate().all(|(i, t)| {
                let now = a.bits & (1 << i) != 0;
                match t {
                    Temporal::Next(x) => now == holds(x, b),
                    Temporal::Until(x, y) => now == (holds(y, a) || (holds(x, a) && b.bits & (1 << i) != 0)),
                }
            })
        };
        let succ: Vec<Vec<usize>> = atoms
            .iter()
            .map(|&a| (0..atoms.len()).filter(|&j| consistent(a, atoms[j])).collect())
            .collect();
        let fulfilled = |a: Atom, i: usize| match &temporals[i] {
            Temporal::Until(_, y) => a.bits & (1 << i) == 0 || holds(y, a),
            Temporal::Next(_) => true,
        };
        // Fair SCCs: nontrivial, and every until is false or fulfilled somewhere.
        let comp = scc(&succ);
        let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut members = vec![Vec::new(); ncomp];
        for (v, &c) in comp.iter().enumerate() {
            members[c].push(v);
        }
        let mut fair = vec![false; ncomp];
        for (c, vs) in members.iter().enumerate() {
            let nontrivial = vs.iter().any(|&v| succ[v].iter().any(|&w| comp[w] == c));
            fair[c] = nontrivial && (0..nt).all(|i| vs.iter().any(|&v| fulfilled(atoms[v], i)));
        }
        // Backward reachability to fair components.
        let mut pred = vec![Vec::new(); atoms.len()];
        for (v, ws) in succ.iter().enumerate() {
            for &w in ws {
                pred[w].push(v);
            }
        }
        let mut good: Vec<bool> = (0..atoms.len()).map(|v| fair[comp[v]]).collect();
        let mut stack: Vec<usize> = (0..atoms.len()).filter(|&v| good[v]).collect();
        while let Some(w) = stack.pop() {
            for &v in &pred[w] {
                if !good[v] {
                    good[v] = true;
                    stack.push(v);
                }
            }
        }
        AtomGraph { root, atoms, succ, good }
    }

    /// Atoms for the first letter of a prefix, split by the root's truth.
    fn start(&self, letter: u32, positive: bool) -> Vec<usize> {
        (0..self.atoms.len())
            .filter(|&v| self.atoms[v].letter == letter && holds(&self.root, self.atoms[v]) == positive)
            .collect()
    }

    fn step(&self, set: &[usize], letter: u32) -> Vec<usize> {
        let mut mark = vec![false; self.atoms.len()];
        for &v in set {
            for &w in &self.succ[v] {
                if self.atoms[w].letter == letter {
                    mark[w] = true;
                }
            }
        }
        (0..self.atoms.len()).filter(|&v| mark[v]).collect()
    }

    fn extendable(&self, set: &[usize]) -> bool {
        set.iter().any(|&v| self.good[v])
    }

    fn any_model(&self, positive: bool) -> bool {
        (0..self.atoms.len()).any(|v| self.good[v] && holds(&self.root, self.atoms[v]) == positive)
    }

    /// LTL3 verdict of every prefix up to `max_len`, in depth-first order
    /// (the empty prefix first, then each letter's subtree in turn).
    pub fn verdicts(&self, num_letters: u32, max_len: usize) -> Vec<(Vec<u32>, Verdict)> {
        let mut out = Vec::new();
        out.push((Vec::new(), classify(self.any_model(true), self.any_model(false))));
        let mut prefix = Vec::new();
        for l in 0..num_letters {
            prefix.push(l);
            self.walk(&self.start(l, true), &self.start(l, false), &mut prefix, num_letters, max_len, &mut out);
            prefix.pop();
        }
        out
    }

    fn walk(
        &self,
        pos: &[usize],
        neg: &[usize],
        prefix: &mut Vec<u32>,
        num_letters: u32,
        max_len: usize,
        out: &mut Vec<(Vec<u32>, Verdict)>,
    ) {
        out.push((prefix.clone(), classify(self.extendable(pos), self.extendable(neg))));
        if prefix.len() == max_len {
            return;
        }
        for l in 0..num_letters {
            prefix.push(l);
            let (p, n) = (self.step(pos, l), self.step(neg, l));
            self.walk(&p, &n, prefix, num_letters, max_len, out);
            prefix.pop();
        }
    }
}

fn classify(can_satisfy: bool, can_violate: bool) -> Verdict {
    match (can_satisfy, can_violate) {
        (true, false) => Verdict::Top,
        (false, true) => Verdict::Bottom,
        (true, true) => Verdict::Unknown,
        (false, false) => unreachable!("every word either satisfies or violates"),
    }
}

/// Iterative Tarjan; returns the component index of every vertex.
fn scc(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work = vec![(root, 0usize)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on[root] = true;
        while let Some(&mut (v, ref mut i)) = work.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on[w] = true;
                    work.push((w, 0));
                } else if on[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(u, _)) = work.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("nonempty");
                        on[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}
