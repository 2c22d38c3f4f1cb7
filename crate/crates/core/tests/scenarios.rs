use decmon_core::central::run_centralized;
use decmon_core::sim::{oracle_evaluate, run_simulation, DelayModel, LocationChange, Trace, TraceEvent};
use decmon_core::{build_monitor, parse_ltl, split_transitions, ApTable, ProtocolAutomaton, Time, Verdict};

fn running_example() -> ProtocolAutomaton {
    let aps = ApTable::from_pairs(&[("a", 0), ("b", 1), ("c", 2)]).unwrap();
    split_transitions(&build_monitor(&parse_ltl("!a U (a U (b & c))", &aps).unwrap(), &aps))
}

fn trace(pa: &ProtocolAutomaton, events: &[(&str, &str, bool)]) -> Trace {
    let aps = pa.aps().clone();
    let events = events
        .iter()
        .map(|&(t, p, value)| TraceEvent { time: t.parse().unwrap(), prop: aps.lookup(p).unwrap(), value })
        .collect();
    Trace::new(aps, &[false; 3], events, Time::from_units(20)).unwrap()
}

fn satisfying(pa: &ProtocolAutomaton) -> Trace {
    trace(pa, &[("2.1", "a", true), ("5.2", "b", true), ("9", "c", true)])
}

fn violating(pa: &ProtocolAutomaton) -> Trace {
    trace(pa, &[("3.2", "a", true), ("6.7", "b", true), ("10", "a", false)])
}

#[test]
fn satisfying_trace_reaches_top_at_nine() {
    let pa = running_example();
    let t = satisfying(&pa);
    let oracle = oracle_evaluate(&pa, &t).unwrap();
    assert_eq!(oracle.verdict, Verdict::Top);
    assert_eq!(oracle.verdict_time, Some(Time::from_units(9)));
    assert_eq!(
        oracle.location_changes,
        vec![
            LocationChange { time: "2.1".parse().unwrap(), from: 0, to: 1, tr: 0 },
            LocationChange { time: Time::from_units(9), from: 1, to: 2, tr: 3 },
        ]
    );
    for seed in 0..200 {
        let run = run_simulation(&pa, &t, &DelayModel::standard(), seed, false).unwrap().result;
        assert_eq!(run.observable(), oracle.observable(), "seed {seed}");
    }
    let central = run_centralized(&pa, &t, &DelayModel::standard(), 1, false).unwrap().result;
    assert_eq!(central.observable(), oracle.observable());
    assert_eq!(central.total_messages, 3);
}

#[test]
fn violating_trace_reaches_bottom_at_ten() {
    let pa = running_example();
    let t = violating(&pa);
    let oracle = oracle_evaluate(&pa, &t).unwrap();
    assert_eq!(oracle.verdict, Verdict::Bottom);
    assert_eq!(oracle.verdict_time, Some(Time::from_units(10)));
    assert_eq!(oracle.location_changes.iter().map(|c| (c.from, c.to)).collect::<Vec<_>>(), vec![(0, 1), (1, 3)]);
    for seed in 0..200 {
        let run = run_simulation(&pa, &t, &DelayModel::standard(), seed, false).unwrap().result;
        assert_eq!(run.observable(), oracle.observable(), "seed {seed}");
    }
}

#[test]
fn quiet_trace_sends_nothing() {
    let pa = running_example();
    let t = Trace::quiet(pa.aps().clone(), Time::from_units(20));
    let run = run_simulation(&pa, &t, &DelayModel::standard(), 3, false).unwrap().result;
    assert_eq!(run.verdict, Verdict::Unknown);
    assert_eq!(run.total_messages, 0);
    let central = run_centralized(&pa, &t, &DelayModel::standard(), 3, false).unwrap().result;
    assert_eq!((central.verdict, central.total_messages), (Verdict::Unknown, 0));
}
