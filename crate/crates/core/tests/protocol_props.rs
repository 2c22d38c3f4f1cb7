//! Automaton and protocol invariants over families and random formulas.

mod support;

use std::collections::{BTreeMap, BTreeSet};

use decmon_core::experiment::{family_property, Family};
use decmon_core::sim::{
    oracle_evaluate, run_simulation, run_simulation_observed, to_jsonl, DelayModel, LogRecord, Trace,
};
use decmon_core::{build_monitor, split_transitions, ApTable, IntervalSet, MonitorAutomaton, Time, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use support::agreement::{family_subjects, random_subjects, subject_trace};
use support::fixtures;
use support::formulas::random_formula;

fn random_monitors(count: usize, seed: u64) -> Vec<MonitorAutomaton> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=4);
            let pairs: Vec<(String, usize)> = (0..n).map(|i| (format!("p{i}"), rng.random_range(0..3))).collect();
            let aps = ApTable::from_pairs(&pairs).unwrap();
            build_monitor(&random_formula(&mut rng, n, 4), &aps)
        })
        .collect()
}

fn family_monitors() -> Vec<MonitorAutomaton> {
    let mut out: Vec<MonitorAutomaton> = (1..=10)
        .flat_map(|k| [Family::Phi1, Family::Phi2, Family::Phi3].map(|f| family_property(f, k).pa.monitor().clone()))
        .collect();
    out.push(family_property(Family::Phi4, 0).pa.monitor().clone());
    out
}

#[test]
fn monitors_are_deterministic_and_total() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in random_monitors(300, 1).iter().chain(&family_monitors()) {
        let letters = m.aps().num_letters() as u32;
        for _ in 0..1000 {
            let q = rng.random_range(0..m.num_locations());
            let l = rng.random_range(0..letters);
            let hits: Vec<usize> =
                (0..m.num_locations()).filter(|&to| m.guard(q, to).binary_search(&l).is_ok()).collect();
            assert_eq!(hits, vec![m.step(q, l)], "location {q} letter {l}");
        }
        for q in 0..m.num_locations() {
            if m.label(q).is_terminal() {
                assert_eq!(m.successors(q), vec![q], "terminal location {q} is not absorbing");
            }
        }
    }
}

#[test]
fn split_preserves_the_transition_relation() {
    for m in random_monitors(300, 2).iter().chain(&family_monitors()) {
        let pa = split_transitions(m);
        let letters = m.aps().num_letters() as u32;
        assert!(m.aps().len() <= 12);
        for t in pa.transitions() {
            assert_ne!(t.source, t.target);
            let props: BTreeSet<usize> = t.conjunct.iter().map(|l| l.prop).collect();
            assert_eq!(props.len(), t.conjunct.len(), "conjunct mentions a proposition twice");
            let owners: BTreeSet<usize> = t.conjunct.iter().map(|l| m.aps().owner(l.prop)).collect();
            assert_eq!(owners.into_iter().collect::<Vec<_>>(), t.associated);
        }
        for q in 0..m.num_locations() {
            for l in 0..letters {
                let target = m.step(q, l);
                let covering: Vec<_> =
                    pa.outgoing(q).iter().map(|&id| pa.transition(id)).filter(|t| t.holds(l)).collect();
                if target == q {
                    assert!(covering.is_empty(), "self-loop letter {l} at {q} covered");
                } else {
                    assert!(!covering.is_empty(), "letter {l} at {q} uncovered");
                    assert!(covering.iter().all(|t| t.target == target));
                }
            }
        }
    }
}

#[test]
fn trc_never_shrinks_and_gpsr_gains_nothing_below_own_update() {
    let mut subjects = family_subjects(&[2, 3, 5]);
    subjects.extend(random_subjects(20, 9));
    let mut checked = 0u64;
    for (si, s) in subjects.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(si as u64);
        for i in 0..40 {
            let trace = subject_trace(s, i, rng.random());
            let mut trc = BTreeMap::new();
            let mut views: BTreeMap<(usize, usize), (u64, IntervalSet, Option<Time>)> = BTreeMap::new();
            let mut violation = None;
            run_simulation_observed(&s.pa, &trace, &DelayModel::standard(), rng.random(), false, &mut |o| {
                let st = o.state;
                let (id, step) = (st.id(), st.step().index);
                if let Some((prev_step, prev)) = trc.insert(id, (step, st.trc().clone())) {
                    if prev_step == step && !prev.is_subset(st.trc()) {
                        violation.get_or_insert(format!("TrC of p{id} shrank at {}", o.now));
                    }
                }
                for v in st.views() {
                    let own = v.t_lu.iter().find(|e| e.0 == id).and_then(|e| e.1);
                    let key = (id, v.tr);
                    if let Some((prev_step, prev_gpsr, Some(prev_lu))) = views.get(&key) {
                        let gained = v.gpsr.subtract(prev_gpsr).restrict_before(*prev_lu);
                        if *prev_step == step && !gained.is_empty() {
                            violation.get_or_insert(format!("gpsr of p{id} Tr{} gained {gained} at {}", v.tr, o.now));
                        }
                    }
                    views.insert(key, (step, v.gpsr.clone(), own));
                    checked += 1;
                }
            })
            .unwrap();
            assert!(violation.is_none(), "{}: {}\n{}", s.name, violation.unwrap(), trace.to_text());
        }
    }
    assert!(checked > 10_000);
}

#[test]
fn quiet_traces_send_nothing() {
    for s in family_subjects(&[2, 4, 10]) {
        let trace = Trace::quiet(s.pa.aps().clone(), s.horizon);
        let r = run_simulation(&s.pa, &trace, &DelayModel::standard(), 1, false).unwrap().result;
        let oracle = oracle_evaluate(&s.pa, &trace).unwrap();
        assert_eq!(r.observable(), oracle.observable(), "{}", s.name);
        if !oracle.verdict.is_terminal() && oracle.location_changes.is_empty() {
            assert_eq!(r.total_messages, 0, "{}", s.name);
        }
    }
}

/// After the last local change, traffic dies out: every run drains its
/// queue, and nothing is sent long after the last change.
#[test]
fn activity_stops_after_the_last_change() {
    let mut subjects = family_subjects(&[2, 6]);
    subjects.extend(random_subjects(20, 4));
    let mut runs = 0;
    for (si, s) in subjects.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + si as u64);
        for i in 0..300 {
            let trace = subject_trace(s, i, rng.random());
            let out = run_simulation(&s.pa, &trace, &DelayModel::standard(), rng.random(), true).unwrap();
            if out.result.verdict.is_terminal() {
                continue;
            }
            let last_change = trace.events().last().map_or(Time::ZERO, |e| e.time);
            let last_send = out
                .log
                .iter()
                .filter_map(|r| match r {
                    LogRecord::Send { t, .. } => Some(*t),
                    _ => None,
                })
                .max();
            let slack = Time::from_units(20 * s.pa.num_processes() as u64);
            if let Some(t) = last_send {
                assert!(t < last_change + slack, "{}: send at {t}, last change {last_change}", s.name);
            }
            runs += 1;
        }
    }
    assert!(runs > 100);
}

#[test]
fn every_message_is_delivered_once_within_the_bound() {
    let mut subjects = family_subjects(&[3]);
    subjects.extend(random_subjects(10, 5));
    for (si, s) in subjects.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(200 + si as u64);
        for i in 0..30 {
            let trace = subject_trace(s, i, rng.random());
            let out = run_simulation(&s.pa, &trace, &DelayModel::standard(), rng.random(), true).unwrap();
            if out.result.verdict.is_terminal() {
                continue;
            }
            let mut sent = Vec::new();
            let mut delivered = Vec::new();
            for r in &out.log {
                match r {
                    LogRecord::Send { t, from, to, deliver_at, msg, .. } => {
                        let d = *deliver_at - *t;
                        assert!(d < Time::from_units(2), "delay {d}");
                        sent.push((*deliver_at, *from, *to, msg.clone()));
                    }
                    LogRecord::Deliver { t, from, to, msg, .. } => delivered.push((*t, *from, *to, msg.clone())),
                    _ => {}
                }
            }
            sent.sort();
            delivered.sort();
            assert_eq!(sent, delivered, "{}", s.name);
        }
    }
}

#[test]
fn identical_inputs_give_identical_logs() {
    let p = family_property(Family::Phi2, 4);
    let s = &family_subjects(&[4])[1];
    assert_eq!(s.name, p.label);
    for seed in 0..30u64 {
        let trace = subject_trace(s, seed as usize, seed);
        let a = run_simulation(&p.pa, &trace, &DelayModel::standard(), seed, true).unwrap();
        let b = run_simulation(&p.pa, &trace, &DelayModel::standard(), seed, true).unwrap();
        assert_eq!(to_jsonl(&a.log), to_jsonl(&b.log));
        assert_eq!(a.result, b.result);
    }
}

/// A step whose first enabled transition has a single owner and holds from
/// the step's first instant finishes within `outgoing + processes` messages.
#[test]
fn single_owner_step_is_cheap() {
    let pa = fixtures::compile("<>a | <>(b & c)", &[("a", 0), ("b", 1), ("c", 2)]);
    let bound = pa.outgoing(pa.initial()).len() + pa.num_processes();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for seed in 0..500 {
        let mut events = Vec::new();
        for _ in 0..rng.random_range(0..6) {
            let t = Time::from_ticks(rng.random_range(1..10_000_000));
            events.push(decmon_core::sim::TraceEvent { time: t, prop: rng.random_range(1..3), value: rng.random() });
        }
        let trace = Trace::new(pa.aps().clone(), &[true, false, false], events, Time::from_units(10)).unwrap();
        let r = run_simulation(&pa, &trace, &DelayModel::standard(), seed, false).unwrap().result;
        assert_eq!((r.verdict, r.verdict_time), (Verdict::Top, Some(Time::ZERO)));
        assert!(r.total_messages as usize <= bound, "seed {seed}: {} messages", r.total_messages);
    }
}
