//! Inputs shared by the benchmarks.

use decmon_core::experiment::{family_property, Family, Property};
use decmon_core::{generate_trace, InitialValuation, Time, Trace};

/// A family instance and a trace of `mu` changes per process over 100 units,
/// cut at the verdict like campaign traces.
pub fn workload(family: Family, k: usize, mu: f64, seed: u64) -> (Property, Trace) {
    let p = family_property(family, k);
    let trace = generate_trace(p.aps(), mu, Time::from_units(100), seed, InitialValuation::Random);
    let oracle = decmon_core::oracle_evaluate(&p.pa, &trace).expect("family automata are acyclic");
    let trace = match oracle.verdict_time {
        Some(t) => trace.truncated(t),
        None => trace,
    };
    (p, trace)
}
