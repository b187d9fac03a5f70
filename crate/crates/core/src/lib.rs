//! Allocation-only core for knowledge-graph-embedding hyperparameter
//! sensitivity studies.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. It covers:
//!
//! - [`graph`]: triple-structured knowledge graphs with train/valid/test splits.
//! - [`audit`]: whole-graph statistics and inverse-relation leakage detection.
//! - [`sampler`]: the Sobol sequence, the Saltelli cross-sample design and the
//!   codec between unit-cube points and hyperparameter configurations.
//! - [`kge`]: desk-scale embedding training (TransE, DistMult, ComplEx, RESCAL).
//! - [`eval`]: filtered link-prediction ranking and MRR.
//! - [`sensitivity`]: least-squares surrogates and Sobol index estimation.
//!
//! File formats, the trial store and the command line live in the `kgsens`
//! companion crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod audit;
pub mod error;
pub mod eval;
pub mod graph;
pub mod kge;
pub mod matrix;
pub mod sampler;
pub mod sensitivity;

pub use error::{Error, Result};
pub use graph::{GraphBuilder, KnowledgeGraph, PositiveSet, Slot, Split, Triple};
