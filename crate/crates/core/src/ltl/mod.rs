//! LTL front end and monitor synthesis.

pub mod buchi;
pub mod export;
pub mod formula;
pub mod monitor;
pub mod parser;
pub mod qmc;
pub mod split;

pub use formula::{ApTable, ApTableError, AtomicProposition, Formula, Letter, ProcessId, PropId, MAX_PROPS};
pub use monitor::{build_monitor, check_monitorable, LocationId, MonitorAutomaton, Monitorability, MonitorabilityReport, Verdict};
pub use parser::{parse_ltl, parse_surface, ParseError};
pub use split::{split_transitions, Literal, ProtocolAutomaton, ProtocolTransition, TrId};
