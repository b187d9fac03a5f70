use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

// needed for float methods without std
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum OptimizerKind {
    Adam,
    Adagrad,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 2] = [OptimizerKind::Adam, OptimizerKind::Adagrad];

    pub const fn name(self) -> &'static str {
        match self {
            OptimizerKind::Adam => "adam",
            OptimizerKind::Adagrad => "adagrad",
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "adam" => Ok(OptimizerKind::Adam),
            "adagrad" => Ok(OptimizerKind::Adagrad),
            _ => Err(Error::InvalidArgument(alloc::format!("unknown optimizer `{s}`"))),
        }
    }
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;
const ADAGRAD_EPS: f64 = 1e-10;

/// Dense first-order optimizer over a fixed list of parameter blocks.
#[derive(Debug, Clone)]
pub struct Optimizer {
    kind: OptimizerKind,
    step: u64,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, block_sizes: &[usize]) -> Self {
        let first = match kind {
            OptimizerKind::Adam => block_sizes.iter().map(|&n| vec![0.0; n]).collect(),
            OptimizerKind::Adagrad => Vec::new(),
        };
        Self { kind, step: 0, first, second: block_sizes.iter().map(|&n| vec![0.0; n]).collect() }
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    /// Applies one update to every block; `params[i]` pairs with `grads[i]`.
    pub fn step(&mut self, lr: f64, params: &mut [&mut [f64]], grads: &[&[f64]]) {
        self.step += 1;
        match self.kind {
            OptimizerKind::Adam => {
                let t = self.step as f64;
                let c1 = 1.0 - ADAM_BETA1.powf(t);
                let c2 = 1.0 - ADAM_BETA2.powf(t);
                for (b, (p, g)) in params.iter_mut().zip(grads).enumerate() {
                    let (m, v) = (&mut self.first[b], &mut self.second[b]);
                    for k in 0..p.len() {
                        let gk = g[k];
                        m[k] = ADAM_BETA1 * m[k] + (1.0 - ADAM_BETA1) * gk;
                        v[k] = ADAM_BETA2 * v[k] + (1.0 - ADAM_BETA2) * gk * gk;
                        p[k] -= lr * (m[k] / c1) / ((v[k] / c2).sqrt() + ADAM_EPS);
                    }
                }
            }
            OptimizerKind::Adagrad => {
                for (b, (p, g)) in params.iter_mut().zip(grads).enumerate() {
                    let acc = &mut self.second[b];
                    for k in 0..p.len() {
                        let gk = g[k];
                        acc[k] += gk * gk;
                        p[k] -= lr * gk / (acc[k].sqrt() + ADAGRAD_EPS);
                    }
                }
            }
        }
    }
}
