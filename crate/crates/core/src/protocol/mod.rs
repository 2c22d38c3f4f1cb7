//! The decentralized monitoring protocol: messages, their wire format and
//! the per-process state machine.

pub mod message;
pub mod state;
pub mod wire;

pub use message::{LastUpdate, Message, MessageKind, StepId};
pub use state::{Announcement, MonitorState, Outbox, ProtocolError, TransitionView};
pub use wire::{decode, encode, WireError};
