//! Random LTL formulas.

use decmon_core::Formula;
use rand::Rng;

/// A random formula over propositions `0..num_props` with at most
/// `max_temporal` temporal operators.
pub fn random_formula<R: Rng>(rng: &mut R, num_props: usize, max_temporal: usize) -> Formula {
    let mut budget = max_temporal;
    let size = rng.random_range(1..=6);
    build(rng, num_props, size, &mut budget)
}

fn leaf<R: Rng>(rng: &mut R, num_props: usize) -> Formula {
    match rng.random_range(0..20) {
        0 => Formula::True,
        1 => Formula::False,
        _ => Formula::Prop(rng.random_range(0..num_props)),
    }
}

fn build<R: Rng>(rng: &mut R, num_props: usize, size: usize, budget: &mut usize) -> Formula {
    if size <= 1 {
        return leaf(rng, num_props);
    }
    let temporal = *budget > 0 && rng.random_bool(0.6);
    if temporal {
        *budget -= 1;
        match rng.random_range(0..4) {
            0 => Formula::next(build(rng, num_props, size - 1, budget)),
            1 => Formula::eventually(build(rng, num_props, size - 1, budget)),
            2 => Formula::always(build(rng, num_props, size - 1, budget)),
            _ => {
                let l = rng.random_range(1..size);
                let a = build(rng, num_props, l, budget);
                Formula::until(a, build(rng, num_props, size - l, budget))
            }
        }
    } else {
        match rng.random_range(0..4) {
            0 => Formula::not(build(rng, num_props, size - 1, budget)),
            k => {
                let l = rng.random_range(1..size);
                let a = build(rng, num_props, l, budget);
                let b = build(rng, num_props, size - l, budget);
                match k {
                    1 => Formula::and(a, b),
                    2 => Formula::or(a, b),
                    _ => Formula::implies(a, b),
                }
            }
        }
    }
}
