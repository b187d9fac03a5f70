//! Desk-scale knowledge-graph-embedding training.
//!
//! Four scorers (TransE, DistMult, ComplEx, RESCAL), three training methods
//! (negative sampling, 1vsAll, KvsAll), three losses (BCE, KL, margin
//! ranking), Adam/Adagrad and a plateau-driven learning-rate scheduler.
//! Gradients are analytic throughout.

mod init;
mod loss;
mod model;
mod optim;
mod schedule;
mod train;

use core::fmt;
use core::str::FromStr;

use crate::error::Error;

pub use init::{init_weights, InitScheme};
pub use loss::{loss, loss_with_grad, LossKind, ScoreLayout};
pub use model::{EmbeddingModel, Gradients};
pub use optim::{Optimizer, OptimizerKind};
pub use schedule::{lr_step, LrSchedule, TrainState};
pub use train::{
    batch_loss, build_rows, kvsall_queries, kvsall_rows, train, train_epoch, train_with, FixedSettings, Query, TrainOutcome,
    Trainer, TrainingConfig, TrainingData, TrainingRow, TrialStatus,
};

/// Scoring function family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Method {
    TransE,
    DistMult,
    ComplEx,
    Rescal,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::TransE, Method::DistMult, Method::ComplEx, Method::Rescal];

    pub const fn name(self) -> &'static str {
        match self {
            Method::TransE => "transe",
            Method::DistMult => "distmult",
            Method::ComplEx => "complex",
            Method::Rescal => "rescal",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "transe" => Ok(Method::TransE),
            "distmult" => Ok(Method::DistMult),
            "complex" => Ok(Method::ComplEx),
            "rescal" => Ok(Method::Rescal),
            _ => Err(Error::InvalidArgument(alloc::format!("unknown KGE method `{s}`"))),
        }
    }
}

/// How positives and negatives are presented to the loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TrainingMethod {
    NegativeSampling,
    OneVsAll,
    KvsAll,
}

impl TrainingMethod {
    pub const ALL: [TrainingMethod; 3] = [TrainingMethod::NegativeSampling, TrainingMethod::OneVsAll, TrainingMethod::KvsAll];

    /// Level name in the search space.
    pub const fn name(self) -> &'static str {
        match self {
            TrainingMethod::NegativeSampling => "negative_sampling",
            TrainingMethod::OneVsAll => "1vsAll",
            TrainingMethod::KvsAll => "KvsAll",
        }
    }
}

impl fmt::Display for TrainingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TrainingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "negative_sampling" => Ok(TrainingMethod::NegativeSampling),
            "1vsall" => Ok(TrainingMethod::OneVsAll),
            "kvsall" => Ok(TrainingMethod::KvsAll),
            _ => Err(Error::InvalidArgument(alloc::format!("unknown training method `{s}`"))),
        }
    }
}
