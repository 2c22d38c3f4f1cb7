//! Decentralized runtime verification of LTL properties over a system of
//! processes that share a global clock.

pub mod central;
pub mod experiment;
pub mod interval;
pub mod ltl;
pub mod protocol;
pub mod sim;
pub mod time;

pub use interval::{Interval, IntervalSet};
pub use ltl::{
    build_monitor, check_monitorable, parse_ltl, split_transitions, ApTable, AtomicProposition, Formula,
    LocationId, MonitorAutomaton, ProcessId, PropId, ProtocolAutomaton, ProtocolTransition, TrId, Verdict,
};
pub use protocol::{Message, MessageKind, StepId};
pub use sim::{
    generate_trace, oracle_evaluate, run_simulation, DelayModel, InitialValuation, LocationChange, LogRecord,
    MessageCounts, RunResult, SimOutcome, Trace, TraceEvent,
};
pub use time::Time;
