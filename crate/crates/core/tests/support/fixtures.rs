//! Hand-built automata, traces and delay scripts.

use std::sync::Arc;

use decmon_core::sim::{DelayModel, SendInfo, Trace, TraceEvent};
use decmon_core::{build_monitor, parse_ltl, split_transitions, ApTable, ProtocolAutomaton, Time};

pub fn compile(formula: &str, pairs: &[(&str, usize)]) -> ProtocolAutomaton {
    let aps = ApTable::from_pairs(pairs).unwrap();
    split_transitions(&build_monitor(&parse_ltl(formula, &aps).unwrap(), &aps))
}

/// `!a U (a U (b & c))` with one proposition per process.
pub fn running_example() -> ProtocolAutomaton {
    compile("!a U (a U (b & c))", &[("a", 0), ("b", 1), ("c", 2)])
}

/// A trace from all-false with `(time, prop, value)` events.
pub fn trace(pa: &ProtocolAutomaton, events: &[(&str, &str, bool)], horizon: u64) -> Trace {
    let aps = pa.aps().clone();
    let events = events
        .iter()
        .map(|&(t, p, value)| TraceEvent { time: t.parse().unwrap(), prop: aps.lookup(p).unwrap(), value })
        .collect();
    let n = aps.len();
    Trace::new(aps, &vec![false; n], events, Time::from_units(horizon)).unwrap()
}

/// Reaches ⊤ at 9 through q1.
pub fn satisfying(pa: &ProtocolAutomaton) -> Trace {
    trace(pa, &[("2.1", "a", true), ("5.2", "b", true), ("9", "c", true)], 20)
}

/// Reaches ⊥ at 10 through q1.
pub fn violating(pa: &ProtocolAutomaton) -> Trace {
    trace(pa, &[("3.2", "a", true), ("6.7", "b", true), ("10", "a", false)], 20)
}

/// `<>(a & b & c & d)`, each proposition on its own process.
pub fn conjunction4() -> ProtocolAutomaton {
    compile("<>(a & b & c & d)", &[("a", 0), ("b", 1), ("c", 2), ("d", 3)])
}

/// The conjunction holds first on `[16, 18)`, then on `[19, 20)`.
pub fn conjunction4_trace(pa: &ProtocolAutomaton) -> Trace {
    trace(
        pa,
        &[
            ("5", "a", true),
            ("8", "b", true),
            ("8", "c", true),
            ("9", "a", false),
            ("9", "d", true),
            ("16", "a", true),
            ("18", "c", false),
            ("19", "c", true),
            ("20", "c", false),
            ("21", "d", false),
        ],
        30,
    )
}

/// Delay of a message by its send time, in units.
pub const CONJUNCTION4_DELAYS: [(u64, u64); 7] = [(5, 1), (8, 1), (9, 1), (10, 1), (16, 3), (19, 1), (20, 2)];

/// The expected hand-offs as `(sent, from, to, delivered)` in units.
pub const CONJUNCTION4_DELEGATES: [(u64, usize, usize, u64); 7] =
    [(5, 0, 1, 6), (8, 1, 2, 9), (9, 2, 3, 10), (10, 3, 0, 11), (16, 0, 1, 19), (19, 1, 2, 20), (20, 2, 3, 22)];

/// Scripted delays; any message sent at an unscripted instant takes the
/// whole bound so that it shows up as a discrepancy.
pub fn conjunction4_delays() -> DelayModel {
    let rule = |info: &SendInfo<'_>| {
        CONJUNCTION4_DELAYS
            .iter()
            .find(|&&(t, _)| Time::from_units(t) == info.sent_at)
            .map_or(Time::from_units(4) - Time::TICK, |&(_, d)| Time::from_units(d))
    };
    DelayModel::Custom { rule: Arc::new(rule), bound: Time::from_units(4) }
}
