//! Decentralized runs checked against the offline oracle.

use decmon_core::experiment::{family_property, Family};
use decmon_core::sim::{
    generate_trace, oracle_evaluate, run_simulation, DelayModel, InitialValuation, Trace, TraceEvent,
};
use decmon_core::{build_monitor, split_transitions, ApTable, ProtocolAutomaton, Time};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::formulas::random_formula;

/// A property under test with the trace shape used for it.
pub struct Subject {
    pub name: String,
    pub pa: ProtocolAutomaton,
    pub horizon: Time,
    pub mus: [f64; 3],
}

/// Every family instance for the given `ks`, plus the fixed-shape family.
pub fn family_subjects(ks: &[usize]) -> Vec<Subject> {
    let mut out = Vec::new();
    for fam in [Family::Phi1, Family::Phi2, Family::Phi3, Family::Phi4] {
        let ks: &[usize] = if fam.has_k() { ks } else { &[0] };
        for &k in ks {
            let p = family_property(fam, k);
            out.push(Subject { name: p.label.clone(), pa: p.pa, horizon: Time::from_units(100), mus: [2.0, 10.0, 30.0] });
        }
    }
    out
}

/// `count` random formulas over three propositions spread over up to three
/// processes, keeping only those with at least two protocol transitions.
pub fn random_subjects(count: usize, seed: u64) -> Vec<Subject> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = ["a", "b", "c"];
    let mut out = Vec::new();
    while out.len() < count {
        let pairs: Vec<(&str, usize)> = names.iter().map(|&n| (n, rng.random_range(0..3))).collect();
        let aps = ApTable::from_pairs(&pairs).unwrap();
        let f = random_formula(&mut rng, 3, 3);
        let pa = split_transitions(&build_monitor(&f, &aps));
        if pa.transitions().len() < 2 {
            continue;
        }
        let name = format!("{} {:?}", f.display(&aps), pairs.iter().map(|p| p.1).collect::<Vec<_>>());
        out.push(Subject { name, pa, horizon: Time::from_units(20), mus: [1.0, 4.0, 10.0] });
    }
    out
}

/// Moves every event up to the next whole unit so that changes of
/// different processes coincide.
pub fn coarsen(trace: &Trace) -> Trace {
    let unit = Time::from_units(1).ticks();
    let events = trace
        .events()
        .iter()
        .map(|e| TraceEvent { time: Time::from_ticks(e.time.ticks().div_ceil(unit) * unit), ..*e })
        .filter(|e| e.time < trace.horizon())
        .collect();
    let initial: Vec<bool> = (0..trace.aps().len()).map(|p| trace.initial_letter() & (1 << p) != 0).collect();
    Trace::new(trace.aps().clone(), &initial, events, trace.horizon()).unwrap()
}

pub fn subject_trace(s: &Subject, index: usize, seed: u64) -> Trace {
    let t = generate_trace(s.pa.aps(), s.mus[index % 3], s.horizon, seed, InitialValuation::Random);
    if index % 2 == 1 {
        coarsen(&t)
    } else {
        t
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Tally {
    pub runs: usize,
    pub terminal: usize,
    pub failures: usize,
}

/// Runs `trace` once and compares with the oracle. A terminal verdict must
/// also be emitted before `horizon + 20 n` units.
pub fn check(pa: &ProtocolAutomaton, trace: &Trace, delays: &DelayModel, seed: u64) -> Result<bool, String> {
    let oracle = oracle_evaluate(pa, trace).map_err(|e| format!("oracle: {e}"))?;
    let run = run_simulation(pa, trace, delays, seed, false).map_err(|e| format!("simulation: {e}"))?.result;
    if run.observable() != oracle.observable() {
        return Err(format!("oracle {:?}\nsim    {:?}", oracle.observable(), run.observable()));
    }
    let terminal = oracle.verdict.is_terminal();
    if terminal {
        let deadline = trace.horizon() + Time::from_units(20 * pa.num_processes() as u64);
        match run.emitted_at {
            Some(t) if t < deadline => {}
            other => return Err(format!("verdict emitted at {other:?}, deadline {deadline}")),
        }
    }
    Ok(terminal)
}
