//! Exact two-level minimization: Quine–McCluskey prime generation followed by
//! an exact minimum cover (essential primes, then branch and bound).

use std::collections::{BTreeSet, HashSet};

use super::formula::Letter;

/// A product term over `n` variables. Bit `v` of `care` set means variable
/// `v` appears, with polarity given by bit `v` of `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub care: u32,
    pub value: u32,
}

impl Term {
    pub fn covers(self, letter: Letter) -> bool {
        letter & self.care == self.value
    }

    pub fn num_literals(self) -> u32 {
        self.care.count_ones()
    }

    /// Literals sorted by variable; `false` marks a positive literal so that
    /// positive sorts before negative on the same variable.
    pub fn sort_key(self, num_vars: usize) -> Vec<(usize, bool)> {
        (0..num_vars)
            .filter(|v| self.care & (1 << v) != 0)
            .map(|v| (v, self.value & (1 << v) == 0))
            .collect()
    }
}

/// All prime implicants of the on-set `on` over `num_vars` variables.
pub fn prime_implicants(on: &[Letter], num_vars: usize) -> Vec<Term> {
    let full = if num_vars == 32 { u32::MAX } else { (1u32 << num_vars) - 1 };
    let mut level: HashSet<Term> = on.iter().map(|&l| Term { care: full, value: l & full }).collect();
    let mut primes = Vec::new();
    while !level.is_empty() {
        let mut next = HashSet::new();
        let mut merged: HashSet<Term> = HashSet::new();
        for &t in &level {
            for v in 0..num_vars {
                let bit = 1u32 << v;
                if t.care & bit == 0 || t.value & bit != 0 {
                    continue;
                }
                let partner = Term { care: t.care, value: t.value | bit };
                if level.contains(&partner) {
                    merged.insert(t);
                    merged.insert(partner);
                    next.insert(Term { care: t.care & !bit, value: t.value });
                }
            }
        }
        primes.extend(level.iter().copied().filter(|t| !merged.contains(t)));
        level = next;
    }
    primes.sort_by_key(|t| t.sort_key(num_vars));
    primes
}

/// A minimum-cardinality cover of `on` by prime implicants. Ties go to fewer
/// literals, then to the lexicographically smallest sorted term list.
pub fn minimal_cover(on: &[Letter], num_vars: usize) -> Vec<Term> {
    if on.is_empty() {
        return Vec::new();
    }
    let primes = prime_implicants(on, num_vars);
    let minterms: Vec<Letter> = on.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let covering: Vec<Vec<usize>> = minterms
        .iter()
        .map(|&m| (0..primes.len()).filter(|&p| primes[p].covers(m)).collect())
        .collect();

    let mut chosen = vec![false; primes.len()];
    let mut covered = vec![false; minterms.len()];
    // Essential primes.
    for cov in &covering {
        if let [only] = cov.as_slice() {
            chosen[*only] = true;
        }
    }
    for (m, cov) in covering.iter().enumerate() {
        if cov.iter().any(|&p| chosen[p]) {
            covered[m] = true;
        }
    }

    let mut search = CoverSearch {
        primes: &primes,
        minterms: &minterms,
        covering: &covering,
        num_vars,
        best: None,
    };
    let mut current: Vec<usize> = (0..primes.len()).filter(|&p| chosen[p]).collect();
    search.branch(&mut current, &mut covered);
    let mut result: Vec<Term> = search.best.expect("primes always cover").into_iter().map(|p| primes[p]).collect();
    result.sort_by_key(|t| t.sort_key(num_vars));
    result
}

struct CoverSearch<'a> {
    primes: &'a [Term],
    minterms: &'a [Letter],
    covering: &'a [Vec<usize>],
    num_vars: usize,
    best: Option<Vec<usize>>,
}

impl CoverSearch<'_> {
    fn cost(&self, sel: &[usize]) -> (usize, u32) {
        (sel.len(), sel.iter().map(|&p| self.primes[p].num_literals()).sum())
    }

    fn key(&self, sel: &[usize]) -> Vec<Vec<(usize, bool)>> {
        let mut k: Vec<_> = sel.iter().map(|&p| self.primes[p].sort_key(self.num_vars)).collect();
        k.sort();
        k
    }

    fn better(&self, sel: &[usize]) -> bool {
        match &self.best {
            None => true,
            Some(b) => {
                let (c1, c2) = (self.cost(sel), self.cost(b));
                c1 < c2 || (c1 == c2 && self.key(sel) < self.key(b))
            }
        }
    }

    fn branch(&mut self, current: &mut Vec<usize>, covered: &mut Vec<bool>) {
        if let Some(b) = &self.best {
            // An incomplete selection needs at least one more term.
            let needs_more = covered.iter().any(|c| !c);
            if current.len() + usize::from(needs_more) > b.len() {
                return;
            }
        }
        // Uncovered minterm with the fewest candidate primes.
        let pick = (0..covered.len())
            .filter(|&m| !covered[m])
            .min_by_key(|&m| self.covering[m].len());
        let Some(m) = pick else {
            if self.better(current) {
                self.best = Some(current.clone());
            }
            return;
        };
        for &p in &self.covering[m] {
            let newly: Vec<usize> = (0..covered.len())
                .filter(|&k| !covered[k] && self.primes[p].covers(self.minterms[k]))
                .collect();
            for &k in &newly {
                covered[k] = true;
            }
            current.push(p);
            self.branch(current, covered);
            current.pop();
            for &k in &newly {
                covered[k] = false;
            }
        }
    }
}
