//! JSON-lines event log.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::ltl::{LocationId, ProcessId, TrId, Verdict};
use crate::protocol::MessageKind;
use crate::time::Time;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LogRecord {
    Start {
        t: Time,
        process: ProcessId,
    },
    Local {
        t: Time,
        process: ProcessId,
        changes: Vec<(String, bool)>,
    },
    Send {
        t: Time,
        from: ProcessId,
        to: ProcessId,
        kind: MessageKind,
        deliver_at: Time,
        msg: String,
    },
    Deliver {
        t: Time,
        from: ProcessId,
        to: ProcessId,
        kind: MessageKind,
        msg: String,
    },
    Announce {
        t: Time,
        process: ProcessId,
        step: u64,
        from: LocationId,
        to: LocationId,
        tr: TrId,
        at: Time,
    },
    Verdict {
        t: Time,
        process: ProcessId,
        verdict: Verdict,
        at: Time,
    },
    /// Centralized baseline: a process reports a state change.
    Report {
        t: Time,
        from: ProcessId,
        prop: String,
        value: bool,
        deliver_at: Time,
    },
    /// Centralized baseline: the central monitor applies the changes
    /// stamped `stamp`, whose reports have all arrived.
    Apply {
        t: Time,
        stamp: Time,
        changes: Vec<(String, bool)>,
    },
    Error {
        t: Time,
        process: ProcessId,
        message: String,
    },
}

pub fn write_jsonl<W: Write>(mut w: W, records: &[LogRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn to_jsonl(records: &[LogRecord]) -> String {
    let mut buf = Vec::new();
    write_jsonl(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("json is utf-8")
}
