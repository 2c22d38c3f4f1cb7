//! Discrete-event simulation of the decentralized monitor.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::ltl::{ProcessId, PropId, ProtocolAutomaton, Verdict};
use crate::protocol::{Announcement, Message, MonitorState, Outbox, ProtocolError};
use crate::time::Time;

use super::delay::{DelayModel, DelaySampler, SendInfo};
use super::log::LogRecord;
use super::result::{LocationChange, RunResult};
use super::trace::Trace;

/// Upper bound on processed events before a run is declared live-locked.
pub const MAX_EVENTS: u64 = 50_000_000;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("trace propositions do not match the automaton's")]
    ApMismatch,
    #[error("protocol violation: {source}")]
    Protocol {
        source: ProtocolError,
        log: Vec<LogRecord>,
    },
    #[error("conflicting announcements for location change {index}: {first:?} vs {second:?}")]
    Conflict {
        index: u64,
        first: LocationChange,
        second: LocationChange,
        log: Vec<LogRecord>,
    },
    #[error("run exceeded {MAX_EVENTS} events")]
    EventLimit,
}

#[derive(Debug, Clone)]
enum EventKind {
    Start(ProcessId),
    Local { process: ProcessId, updates: Vec<(PropId, bool)> },
    Deliver { from: ProcessId, to: ProcessId, msg: Message },
}

#[derive(Debug)]
struct Event {
    due: Time,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        (self.due, self.seq) == (other.due, other.seq)
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.due, self.seq).cmp(&(other.due, other.seq))
    }
}

/// What an observer sees after each handled event.
pub struct Observation<'s, 'a> {
    pub now: Time,
    pub state: &'s MonitorState<'a>,
    pub queued: usize,
}

#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub result: RunResult,
    pub log: Vec<LogRecord>,
}

pub fn run_simulation(
    pa: &ProtocolAutomaton,
    trace: &Trace,
    delays: &DelayModel,
    seed: u64,
    keep_log: bool,
) -> Result<SimOutcome, SimError> {
    run_simulation_observed(pa, trace, delays, seed, keep_log, &mut |_| {})
}

/// Like [`run_simulation`], calling `observer` after every handled event.
pub fn run_simulation_observed(
    pa: &ProtocolAutomaton,
    trace: &Trace,
    delays: &DelayModel,
    seed: u64,
    keep_log: bool,
    observer: &mut dyn FnMut(&Observation<'_, '_>),
) -> Result<SimOutcome, SimError> {
    if trace.aps() != pa.aps() {
        return Err(SimError::ApMismatch);
    }
    let n = pa.num_processes();
    let mut states: Vec<MonitorState<'_>> =
        (0..n).map(|p| MonitorState::new(pa, p, trace.initial_letter())).collect();
    let mut sampler = DelaySampler::new(delays.clone(), seed);
    let mut queue = BinaryHeap::new();
    let mut seq = 0u64;
    let mut push = |queue: &mut BinaryHeap<Reverse<Event>>, due: Time, kind: EventKind| {
        queue.push(Reverse(Event { due, seq, kind }));
        seq += 1;
    };
    for p in 0..n {
        push(&mut queue, Time::ZERO, EventKind::Start(p));
    }
    for (t, process, updates) in trace.batches() {
        push(&mut queue, t, EventKind::Local { process, updates });
    }

    let mut log = Vec::new();
    let mut result = RunResult::empty();
    let mut handled = 0u64;
    let mut send_seq = 0u64;
    while let Some(Reverse(ev)) = queue.pop() {
        handled += 1;
        if handled > MAX_EVENTS {
            return Err(SimError::EventLimit);
        }
        let now = ev.due;
        let mut out = Outbox::default();
        let (process, res) = match &ev.kind {
            EventKind::Start(p) => {
                if keep_log {
                    log.push(LogRecord::Start { t: now, process: *p });
                }
                (*p, states[*p].on_start(now, &mut out))
            }
            EventKind::Local { process, updates } => {
                if keep_log {
                    let changes = updates.iter().map(|&(p, v)| (pa.aps().name(p).to_string(), v)).collect();
                    log.push(LogRecord::Local { t: now, process: *process, changes });
                }
                (*process, states[*process].on_local_change(now, updates, &mut out))
            }
            EventKind::Deliver { from, to, msg } => {
                if keep_log {
                    log.push(LogRecord::Deliver {
                        t: now,
                        from: *from,
                        to: *to,
                        kind: msg.kind(),
                        msg: msg.to_string(),
                    });
                }
                (*to, states[*to].on_message(now, msg, &mut out))
            }
        };
        if let Err(source) = res {
            log.push(LogRecord::Error { t: now, process, message: source.to_string() });
            return Err(SimError::Protocol { source, log });
        }

        let mut finished = None;
        for a in &out.announcements {
            if let Err((index, first, second)) = record_change(&mut result.location_changes, a) {
                return Err(SimError::Conflict { index, first, second, log });
            }
            if keep_log {
                log.push(LogRecord::Announce {
                    t: now,
                    process,
                    step: a.step.index,
                    from: a.from,
                    to: a.to,
                    tr: a.tr,
                    at: a.at,
                });
            }
            if let Some(v) = a.verdict {
                finished = Some((v, a.at));
            }
        }
        if let Some((verdict, at)) = finished {
            if keep_log {
                log.push(LogRecord::Verdict { t: now, process, verdict, at });
            }
            result.verdict = verdict;
            result.verdict_time = Some(at);
            result.emitted_at = Some(now);
            break;
        }

        for (to, msg) in out.sends {
            let info = SendInfo { seq: send_seq, from: process, to, sent_at: now, msg: Some(&msg) };
            send_seq += 1;
            let deliver_at = now + sampler.sample(&info);
            result.message_counts.record(msg.kind());
            if keep_log {
                log.push(LogRecord::Send {
                    t: now,
                    from: process,
                    to,
                    kind: msg.kind(),
                    deliver_at,
                    msg: msg.to_string(),
                });
            }
            push(&mut queue, deliver_at, EventKind::Deliver { from: process, to, msg });
        }
        observer(&Observation { now, state: &states[process], queued: queue.len() });
    }
    result.total_messages = result.message_counts.total();
    debug_assert!(result.verdict == Verdict::Unknown || result.verdict_time.is_some());
    Ok(SimOutcome { result, log })
}

/// Records the change announced for step `a.step.index`; announcements of
/// the same step by different processes must agree.
fn record_change(
    changes: &mut Vec<LocationChange>,
    a: &Announcement,
) -> Result<(), (u64, LocationChange, LocationChange)> {
    let c = LocationChange { time: a.at, from: a.from, to: a.to, tr: a.tr };
    let idx = a.step.index as usize;
    match changes.get(idx) {
        Some(prev) if *prev == c => Ok(()),
        Some(prev) => Err((a.step.index, *prev, c)),
        None if idx == changes.len() => {
            changes.push(c);
            Ok(())
        }
        None => Err((a.step.index, c, c)),
    }
}
