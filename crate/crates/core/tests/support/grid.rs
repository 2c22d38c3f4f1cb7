//! Interval sets as explicit membership over a finite tick grid.
//!
//! Every endpoint used with a `Grid` must lie below `SIZE`; points at or
//! beyond `SIZE` share the membership stored in `tail`.

use decmon_core::{IntervalSet, Time};
use rand::Rng;

pub const SIZE: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    cells: Vec<bool>,
    tail: bool,
}

impl Grid {
    pub fn empty() -> Self {
        Grid { cells: vec![false; SIZE as usize], tail: false }
    }

    pub fn span(lo: u64, hi: Option<u64>) -> Self {
        let mut g = Grid::empty();
        let end = hi.unwrap_or(SIZE).min(SIZE);
        for t in lo..end {
            g.cells[t as usize] = true;
        }
        g.tail = hi.is_none();
        g
    }

    pub fn contains(&self, t: u64) -> bool {
        if t < SIZE {
            self.cells[t as usize]
        } else {
            self.tail
        }
    }

    fn zip(&self, other: &Grid, f: impl Fn(bool, bool) -> bool) -> Grid {
        Grid {
            cells: self.cells.iter().zip(&other.cells).map(|(&a, &b)| f(a, b)).collect(),
            tail: f(self.tail, other.tail),
        }
    }

    pub fn union(&self, o: &Grid) -> Grid {
        self.zip(o, |a, b| a || b)
    }

    pub fn intersect(&self, o: &Grid) -> Grid {
        self.zip(o, |a, b| a && b)
    }

    pub fn subtract(&self, o: &Grid) -> Grid {
        self.zip(o, |a, b| a && !b)
    }

    pub fn complement(&self) -> Grid {
        Grid { cells: self.cells.iter().map(|c| !c).collect(), tail: !self.tail }
    }

    pub fn min_point(&self) -> Option<u64> {
        match self.cells.iter().position(|&c| c) {
            Some(i) => Some(i as u64),
            None if self.tail => Some(SIZE),
            None => None,
        }
    }
}

/// A random set of a few intervals with endpoints below `SIZE - 1`.
pub fn random_pair<R: Rng>(rng: &mut R) -> (IntervalSet, Grid) {
    let mut set = IntervalSet::empty();
    let mut grid = Grid::empty();
    for _ in 0..rng.random_range(0..4) {
        let lo = rng.random_range(0..SIZE - 1);
        let hi = if rng.random_bool(0.15) { None } else { Some(rng.random_range(lo..SIZE - 1)) };
        let s = match hi {
            Some(h) => IntervalSet::span(Time::from_ticks(lo), Time::from_ticks(h)),
            None => IntervalSet::from_time(Time::from_ticks(lo)),
        };
        set = set.union(&s);
        grid = grid.union(&Grid::span(lo, hi));
    }
    (set, grid)
}
