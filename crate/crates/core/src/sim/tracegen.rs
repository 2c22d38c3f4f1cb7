//! Random traces: each process changes state at the instants of a
//! homogeneous Poisson process.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::ltl::{ApTable, PropId};
use crate::time::Time;

use super::trace::{Trace, TraceEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialValuation {
    #[default]
    AllFalse,
    Random,
}

/// `mu` is the expected number of events per process over `[0, horizon)`.
/// Each event flips one uniformly chosen proposition of its process.
pub fn generate_trace(aps: &ApTable, mu: f64, horizon: Time, seed: u64, initial: InitialValuation) -> Trace {
    assert!(mu > 0.0 && mu.is_finite(), "mu must be positive");
    assert!(horizon > Time::ZERO, "horizon must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init: Vec<bool> = match initial {
        InitialValuation::AllFalse => vec![false; aps.len()],
        InitialValuation::Random => (0..aps.len()).map(|_| rng.random()).collect(),
    };
    let mut value = init.clone();
    let h = horizon.as_units_f64();
    let gap = Exp::new(mu / h).expect("positive rate");
    let mut events = Vec::new();
    for p in 0..aps.num_processes() {
        let owned: Vec<PropId> = aps.owned_by(p).collect();
        if owned.is_empty() {
            continue;
        }
        let mut t = 0.0;
        let mut last = Time::ZERO;
        loop {
            t += gap.sample(&mut rng);
            if t >= h {
                break;
            }
            let at = Time::from_units_f64(t);
            // Instants collapse on the microtick lattice; keep one event per
            // instant and process.
            if at <= last || at >= horizon {
                continue;
            }
            last = at;
            let prop = owned[rng.random_range(0..owned.len())];
            value[prop] = !value[prop];
            events.push(TraceEvent { time: at, prop, value: value[prop] });
        }
    }
    Trace::new(aps.clone(), &init, events, horizon).expect("generated events are in range")
}
