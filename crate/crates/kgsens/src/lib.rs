//! Dataset IO, trial sweeps, analysis reports and the `kgsens` command line,
//! built on [`kgsens_core`].

pub mod analysis;
pub mod audit;
pub mod compare;
pub mod config;
pub mod error;
pub mod io;
pub mod jobs;
pub mod report;
pub mod store;
pub mod sweep;

pub use error::{Error, ExitStatus, Result};
pub use kgsens_core as core;
