//! Message delay laws.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ltl::ProcessId;
use crate::protocol::Message;
use crate::time::Time;

/// What a custom delay rule sees about a message.
#[derive(Debug, Clone, Copy)]
pub struct SendInfo<'a> {
    pub seq: u64,
    pub from: ProcessId,
    pub to: ProcessId,
    pub sent_at: Time,
    /// `None` for the centralized baseline's state reports.
    pub msg: Option<&'a Message>,
}

pub type DelayFn = Arc<dyn Fn(&SendInfo<'_>) -> Time + Send + Sync>;

#[derive(Clone)]
pub enum DelayModel {
    /// Uniform over `[0, max)` at microtick resolution.
    Uniform { max: Time },
    Fixed(Time),
    /// Every returned delay must be below `bound`.
    Custom { rule: DelayFn, bound: Time },
}

impl fmt::Debug for DelayModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DelayModel::Uniform { max } => write!(f, "Uniform[0,{max})"),
            DelayModel::Fixed(d) => write!(f, "Fixed({d})"),
            DelayModel::Custom { bound, .. } => write!(f, "Custom(<{bound})"),
        }
    }
}

impl DelayModel {
    /// Uniform over `[0, 2)` units.
    pub fn standard() -> Self {
        DelayModel::Uniform { max: Time::from_units(2) }
    }

    /// Strict upper bound on any delay.
    pub fn bound(&self) -> Time {
        match self {
            DelayModel::Uniform { max } => *max,
            DelayModel::Fixed(d) => d.succ(),
            DelayModel::Custom { bound, .. } => *bound,
        }
    }
}

/// A delay model plus its random stream.
pub struct DelaySampler {
    model: DelayModel,
    rng: ChaCha8Rng,
}

impl DelaySampler {
    pub fn new(model: DelayModel, seed: u64) -> Self {
        DelaySampler { model, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn model(&self) -> &DelayModel {
        &self.model
    }

    pub fn sample(&mut self, info: &SendInfo<'_>) -> Time {
        match &self.model {
            DelayModel::Uniform { max } if max.ticks() == 0 => Time::ZERO,
            DelayModel::Uniform { max } => Time::from_ticks(self.rng.random_range(0..max.ticks())),
            DelayModel::Fixed(d) => *d,
            DelayModel::Custom { rule, bound } => {
                let d = rule(info);
                assert!(d < *bound, "custom delay {d} is not below its bound {bound}");
                d
            }
        }
    }
}
