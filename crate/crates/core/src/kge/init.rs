// needed for float methods without std
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Weight initialisation scheme. Xavier variants use gain 1 with
/// `fan_in = cols`, `fan_out = rows`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(tag = "scheme", rename_all = "snake_case"))]
pub enum InitScheme {
    Normal { std: f64 },
    /// Uniform on `[lower, -lower]`.
    Uniform { lower: f64 },
    XavierNormal,
    XavierUniform,
}

impl InitScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InitScheme::Normal { std } if !(std > 0.0 && std.is_finite()) => {
                Err(Error::InvalidArgument(alloc::format!("normal init std must be positive, got {std}")))
            }
            InitScheme::Uniform { lower } if !(lower < 0.0 && lower.is_finite()) => {
                Err(Error::InvalidArgument(alloc::format!("uniform init lower bound must be negative, got {lower}")))
            }
            _ => Ok(()),
        }
    }
}

pub fn init_weights(scheme: InitScheme, rows: usize, cols: usize, seed: u64) -> Result<Matrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    init_weights_with(scheme, rows, cols, &mut rng)
}

pub(crate) fn init_weights_with<R: Rng>(scheme: InitScheme, rows: usize, cols: usize, rng: &mut R) -> Result<Matrix> {
    scheme.validate()?;
    let mut m = Matrix::zeros(rows, cols);
    let fans = (rows + cols).max(1) as f64;
    match scheme {
        InitScheme::Normal { std } => fill_normal(m.as_mut_slice(), std, rng),
        InitScheme::XavierNormal => fill_normal(m.as_mut_slice(), (2.0 / fans).sqrt(), rng),
        InitScheme::Uniform { lower } => fill_uniform(m.as_mut_slice(), -lower, rng),
        InitScheme::XavierUniform => fill_uniform(m.as_mut_slice(), (6.0 / fans).sqrt(), rng),
    }
    Ok(m)
}

fn fill_normal<R: Rng>(out: &mut [f64], std: f64, rng: &mut R) {
    let dist = Normal::new(0.0, std).expect("std validated");
    out.iter_mut().for_each(|x| *x = dist.sample(rng));
}

fn fill_uniform<R: Rng>(out: &mut [f64], bound: f64, rng: &mut R) {
    let dist = Uniform::new_inclusive(-bound, bound).expect("bound validated");
    out.iter_mut().for_each(|x| *x = dist.sample(rng));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_stays_in_bounds() {
        let m = init_weights(InitScheme::Uniform { lower: -0.5 }, 300, 300, 1).unwrap();
        assert!(m.as_slice().iter().all(|x| (-0.5..=0.5).contains(x)));
        let mean = m.as_slice().iter().sum::<f64>() / 90_000.0;
        assert!(mean.abs() < 0.01);
    }

    #[test]
    fn normal_std_within_one_percent() {
        let s = 0.37;
        let m = init_weights(InitScheme::Normal { std: s }, 1000, 1000, 9).unwrap();
        let n = 1e6;
        let mean = m.as_slice().iter().sum::<f64>() / n;
        let var = m.as_slice().iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        assert!((var.sqrt() - s).abs() / s < 0.01);
    }

    #[test]
    fn xavier_scales() {
        let m = init_weights(InitScheme::XavierNormal, 500, 1500, 3).unwrap();
        let var = m.as_slice().iter().map(|x| x * x).sum::<f64>() / 750_000.0;
        assert!((var - 2.0 / 2000.0).abs() / (2.0 / 2000.0) < 0.02);
        let bound = (6.0f64 / 20.0).sqrt();
        let u = init_weights(InitScheme::XavierUniform, 10, 10, 3).unwrap();
        assert!(u.as_slice().iter().all(|x| x.abs() <= bound));
    }

    #[test]
    fn deterministic_per_seed() {
        let a = init_weights(InitScheme::XavierUniform, 20, 8, 42).unwrap();
        let b = init_weights(InitScheme::XavierUniform, 20, 8, 42).unwrap();
        let c = init_weights(InitScheme::XavierUniform, 20, 8, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(init_weights(InitScheme::Normal { std: 0.0 }, 2, 2, 0).is_err());
        assert!(init_weights(InitScheme::Uniform { lower: 0.0 }, 2, 2, 0).is_err());
        assert!(init_weights(InitScheme::Uniform { lower: 0.1 }, 2, 2, 0).is_err());
    }
}
