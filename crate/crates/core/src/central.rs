//! Centralized baseline: every process reports each state change, stamped
//! with its global time, to one central monitor that runs the oracle over
//! the reconstructed global state.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::ltl::{Letter, PropId, ProtocolAutomaton};
use crate::sim::{
    DelayModel, DelaySampler, LogRecord, OracleError, OracleWalker, SendInfo, SimOutcome, Trace,
};
use crate::time::Time;

/// Reports may arrive out of order. Changes stamped `t` are applied once no
/// report stamped `t` can still be in flight, at `t + bound`.
pub fn run_centralized(
    pa: &ProtocolAutomaton,
    trace: &Trace,
    delays: &DelayModel,
    seed: u64,
    keep_log: bool,
) -> Result<SimOutcome, OracleError> {
    let aps = pa.aps();
    let bound = delays.bound();
    let mut sampler = DelaySampler::new(delays.clone(), seed);
    let mut log = Vec::new();

    // (due, seq) ordered; `None` marks the apply deadline of a stamp.
    let mut queue: BinaryHeap<Reverse<(Time, u64, Option<usize>)>> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut last_stamp = None;
    for (i, e) in trace.events().iter().enumerate() {
        let from = aps.owner(e.prop);
        let info = SendInfo { seq: i as u64, from, to: 0, sent_at: e.time, msg: None };
        let deliver_at = e.time + sampler.sample(&info);
        if keep_log {
            log.push(LogRecord::Report {
                t: e.time,
                from,
                prop: aps.name(e.prop).to_string(),
                value: e.value,
                deliver_at,
            });
        }
        queue.push(Reverse((deliver_at, seq, Some(i))));
        seq += 1;
        if last_stamp != Some(e.time) {
            queue.push(Reverse((e.time + bound, seq, None)));
            seq += 1;
            last_stamp = Some(e.time);
        }
    }

    let mut walker = OracleWalker::new(pa);
    let mut letter: Letter = trace.initial_letter();
    walker.feed(Time::ZERO, letter)?;
    let mut emitted_at = walker.verdict().map(|_| Time::ZERO);
    let mut buffer: BTreeMap<(Time, usize), (PropId, bool)> = BTreeMap::new();
    while emitted_at.is_none() {
        let Some(Reverse((now, _, item))) = queue.pop() else { break };
        match item {
            Some(i) => {
                let e = trace.events()[i];
                buffer.insert((e.time, i), (e.prop, e.value));
            }
            None => {
                let stamp = now - bound;
                let mut changes = Vec::new();
                while let Some(entry) = buffer.first_entry() {
                    if entry.key().0 != stamp {
                        break;
                    }
                    let (prop, value) = entry.remove();
                    if value {
                        letter |= 1 << prop;
                    } else {
                        letter &= !(1 << prop);
                    }
                    if keep_log {
                        changes.push((aps.name(prop).to_string(), value));
                    }
                }
                if keep_log {
                    log.push(LogRecord::Apply { t: now, stamp, changes });
                }
                walker.feed(stamp, letter)?;
                if walker.verdict().is_some() {
                    emitted_at = Some(now);
                }
            }
        }
    }

    let mut result = walker.finish();
    result.emitted_at = emitted_at;
    if let (Some(t), Some((v, at))) = (emitted_at, result.verdict_time.map(|at| (result.verdict, at))) {
        if keep_log {
            log.push(LogRecord::Verdict { t, process: 0, verdict: v, at });
        }
    }
    // Every change is reported whether or not the verdict is already known.
    result.message_counts.update = trace.events().len() as u64;
    result.total_messages = result.message_counts.total();
    Ok(SimOutcome { result, log })
}
