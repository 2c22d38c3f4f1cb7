//! Deterministic discrete-event simulation: traces, channels with random
//! delay, the decentralized run and the offline oracle.

pub mod delay;
pub mod engine;
pub mod log;
pub mod oracle;
pub mod result;
pub mod trace;
pub mod tracegen;

pub use delay::{DelayModel, DelaySampler, SendInfo};
pub use engine::{run_simulation, run_simulation_observed, Observation, SimError, SimOutcome};
pub use log::{to_jsonl, write_jsonl, LogRecord};
pub use oracle::{oracle_evaluate, OracleError, OracleWalker};
pub use result::{LocationChange, MessageCounts, RunResult};
pub use trace::{Trace, TraceError, TraceEvent};
pub use tracegen::{generate_trace, InitialValuation};
