use alloc::vec;
use alloc::vec::Vec;

// needed for float methods without std
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::sampler::{saltelli_design, SaltelliBlock, SaltelliDesign};

/// Estimator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SobolOptions {
    pub resamples: usize,
    pub confidence: f64,
    pub seed: u64,
}

impl Default for SobolOptions {
    fn default() -> Self {
        Self { resamples: 100, confidence: 0.95, seed: 0 }
    }
}

/// First-, second- and total-order indices with bootstrap half-widths.
/// `s2` and `s2_conf` are `D x D` with only the strict upper triangle set;
/// other cells hold NaN.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SobolIndices {
    pub base_n: usize,
    pub s1: Vec<f64>,
    pub s1_conf: Vec<f64>,
    pub st: Vec<f64>,
    pub st_conf: Vec<f64>,
    pub s2: Matrix,
    pub s2_conf: Matrix,
}

impl SobolIndices {
    pub fn dimension(&self) -> usize {
        self.s1.len()
    }
}

/// Evaluates `f` on every design row, in order.
pub fn evaluate_design(design: &SaltelliDesign, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    design.points().iter_rows().map(f).collect()
}

/// Sobol analysis of `f` over the `dimension`-wide unit cube using a
/// second-order Saltelli design with `base_n` base samples.
pub fn sobol_analyze(f: impl Fn(&[f64]) -> f64, dimension: usize, base_n: usize, options: &SobolOptions) -> Result<SobolIndices> {
    let design = saltelli_design(dimension, base_n, true)?;
    let y = evaluate_design(&design, f);
    estimate_indices(&design, &y, options)
}

/// Outputs regrouped by base sample.
struct Blocks {
    d: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    /// `ab[j * d + i]`
    ab: Vec<f64>,
    ba: Vec<f64>,
}

struct Estimate {
    s1: Vec<f64>,
    st: Vec<f64>,
    /// strict upper triangle, row-major
    s2: Vec<f64>,
}

impl Blocks {
    fn estimate(&self, idx: &[usize]) -> Option<Estimate> {
        let d = self.d;
        let m = idx.len() as f64;
        let mean = idx.iter().map(|&j| self.a[j] + self.b[j]).sum::<f64>() / (2.0 * m);
        let var = idx.iter().map(|&j| (self.a[j] - mean).powi(2) + (self.b[j] - mean).powi(2)).sum::<f64>() / (2.0 * m);
        if !(var > 0.0) {
            return None;
        }
        let mut s1 = vec![0.0; d];
        let mut st = vec![0.0; d];
        for &j in idx {
            let (fa, fb) = (self.a[j], self.b[j]);
            for i in 0..d {
                let fab = self.ab[j * d + i];
                s1[i] += fb * (fab - fa);
                st[i] += (fa - fab) * (fa - fab);
            }
        }
        s1.iter_mut().for_each(|x| *x /= m * var);
        st.iter_mut().for_each(|x| *x /= 2.0 * m * var);
        let mut s2 = Vec::with_capacity(d * d.saturating_sub(1) / 2);
        for i in 0..d {
            for k in i + 1..d {
                let mut acc = 0.0;
                for &j in idx {
                    acc += self.ba[j * d + i] * self.ab[j * d + k] - self.a[j] * self.b[j];
                }
                s2.push(acc / (m * var) - s1[i] - s1[k]);
            }
        }
        Some(Estimate { s1, st, s2 })
    }
}

/// Indices from outputs `y` of a second-order design, in design row order.
///
/// Outputs are centred on their overall mean first. With `fA`, `fB`,
/// `fAB_i`, `fBA_i` the per-block outputs and `V` the population variance
/// of `fA` and `fB` pooled:
///
/// - `s1_i = mean(fB (fAB_i - fA)) / V`
/// - `st_i = mean((fA - fAB_i)^2) / (2V)`
/// - `s2_ik = mean(fBA_i fAB_k - fA fB) / V - s1_i - s1_k`
///
/// Half-widths come from a percentile bootstrap over base samples.
pub fn estimate_indices(design: &SaltelliDesign, y: &[f64], options: &SobolOptions) -> Result<SobolIndices> {
    if !design.second_order() {
        return Err(Error::InvalidArgument("second-order indices need BA blocks in the design".into()));
    }
    if y.len() != design.row_count() {
        return Err(Error::LengthMismatch(y.len(), design.row_count()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("model output"));
    }
    if !(options.confidence > 0.0 && options.confidence < 1.0) {
        return Err(Error::InvalidArgument("confidence level must lie in (0, 1)".into()));
    }
    let (d, n) = (design.dimension(), design.base_n());
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let scale = y.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let at = |j: usize, b: SaltelliBlock| y[design.row_index(j, b)] - mean;
    let mut blocks = Blocks { d, a: vec![0.0; n], b: vec![0.0; n], ab: vec![0.0; n * d], ba: vec![0.0; n * d] };
    for j in 0..n {
        blocks.a[j] = at(j, SaltelliBlock::A);
        blocks.b[j] = at(j, SaltelliBlock::B);
        for i in 0..d {
            blocks.ab[j * d + i] = at(j, SaltelliBlock::AB(i));
            blocks.ba[j * d + i] = at(j, SaltelliBlock::BA(i));
        }
    }
    let all: Vec<usize> = (0..n).collect();
    let point = match blocks.estimate(&all) {
        Some(e) => e,
        None => return Err(Error::DegenerateModel),
    };
    // relative guard against a variance that is pure rounding noise
    let var = all.iter().map(|&j| blocks.a[j].powi(2) + blocks.b[j].powi(2)).sum::<f64>() / (2 * n) as f64;
    if var <= (1e-12 * scale).powi(2) {
        return Err(Error::DegenerateModel);
    }

    let npairs = point.s2.len();
    let mut boot_s1 = vec![Vec::with_capacity(options.resamples); d];
    let mut boot_st = vec![Vec::with_capacity(options.resamples); d];
    let mut boot_s2 = vec![Vec::with_capacity(options.resamples); npairs];
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut idx = vec![0usize; n];
    for _ in 0..options.resamples {
        idx.iter_mut().for_each(|k| *k = rng.random_range(0..n));
        if let Some(e) = blocks.estimate(&idx) {
            (0..d).for_each(|i| boot_s1[i].push(e.s1[i]));
            (0..d).for_each(|i| boot_st[i].push(e.st[i]));
            (0..npairs).for_each(|p| boot_s2[p].push(e.s2[p]));
        }
    }
    let alpha = (1.0 - options.confidence) / 2.0;
    let half = |v: &mut Vec<f64>| -> f64 {
        if v.len() < 2 {
            return f64::NAN;
        }
        v.sort_by(f64::total_cmp);
        (quantile(v, 1.0 - alpha) - quantile(v, alpha)) / 2.0
    };
    let s1_conf = boot_s1.iter_mut().map(half).collect();
    let st_conf = boot_st.iter_mut().map(half).collect();
    let mut s2 = Matrix::from_vec(d, d, vec![f64::NAN; d * d]);
    let mut s2_conf = s2.clone();
    let mut p = 0;
    for i in 0..d {
        for k in i + 1..d {
            s2.set(i, k, point.s2[p]);
            s2_conf.set(i, k, half(&mut boot_s2[p]));
            p += 1;
        }
    }
    Ok(SobolIndices { base_n: n, s1: point.s1, s1_conf, st: point.st, st_conf, s2, s2_conf })
}

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn additive_function() {
        let idx = sobol_analyze(|x| x[0] + 2.0 * x[1], 2, 2048, &SobolOptions::default()).unwrap();
        assert!((idx.s1[0] - 0.2).abs() <= 0.02, "{:?}", idx.s1);
        assert!((idx.s1[1] - 0.8).abs() <= 0.02, "{:?}", idx.s1);
        assert!(idx.s2.get(0, 1).abs() <= 0.02);
        assert!((idx.st[0] - 0.2).abs() <= 0.02 && (idx.st[1] - 0.8).abs() <= 0.02);
    }

    #[test]
    fn pure_interaction() {
        let idx = sobol_analyze(|x| (x[0] - 0.5) * (x[1] - 0.5), 2, 2048, &SobolOptions::default()).unwrap();
        assert!(idx.s1.iter().all(|s| s.abs() <= 0.02), "{:?}", idx.s1);
        assert!((idx.s2.get(0, 1) - 1.0).abs() <= 0.05, "{}", idx.s2.get(0, 1));
        assert!(idx.st.iter().all(|s| (s - 1.0).abs() <= 0.05), "{:?}", idx.st);
    }

    #[test]
    fn irrelevant_inputs() {
        let idx = sobol_analyze(|x| x[0], 3, 2048, &SobolOptions::default()).unwrap();
        for (i, want) in [1.0, 0.0, 0.0].into_iter().enumerate() {
            assert!((idx.s1[i] - want).abs() <= 0.02);
            assert!((idx.st[i] - want).abs() <= 0.02);
        }
    }

    #[test]
    fn constant_function_is_degenerate() {
        assert_eq!(sobol_analyze(|_| 4.2, 3, 64, &SobolOptions::default()), Err(Error::DegenerateModel));
    }

    #[test]
    fn lower_triangle_is_unset() {
        let idx = sobol_analyze(|x| x[0] * x[2] + x[1], 3, 128, &SobolOptions::default()).unwrap();
        for i in 0..3 {
            for k in 0..=i {
                assert!(idx.s2.get(i, k).is_nan() && idx.s2_conf.get(i, k).is_nan());
            }
        }
        assert!(idx.s1_conf.iter().chain(&idx.st_conf).all(|c| c.is_finite() && *c >= 0.0));
    }

    #[test]
    fn deterministic_given_seed() {
        let f = |x: &[f64]| x[0] * x[1] + x[2].powi(2);
        let o = SobolOptions { seed: 7, ..Default::default() };
        let a = alloc::format!("{:?}", sobol_analyze(f, 3, 256, &o));
        assert_eq!(a, alloc::format!("{:?}", sobol_analyze(f, 3, 256, &o)));
    }

    #[test]
    fn error_shrinks_with_more_samples() {
        let err = |n| {
            let idx = sobol_analyze(|x| x[0] + 2.0 * x[1], 2, n, &SobolOptions::default()).unwrap();
            (idx.s1[0] - 0.2).abs() + (idx.s1[1] - 0.8).abs()
        };
        assert!(err(4096) < err(256));
    }

    #[test]
    fn length_checks() {
        let design = saltelli_design(2, 8, true).unwrap();
        assert!(matches!(estimate_indices(&design, &[0.0; 3], &SobolOptions::default()), Err(Error::LengthMismatch(..))));
        let first = saltelli_design(2, 8, false).unwrap();
        assert!(estimate_indices(&first, &vec![0.0; first.row_count()], &SobolOptions::default()).is_err());
    }
}
