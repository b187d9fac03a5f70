//! Surrogate modelling and variance-based sensitivity analysis.

mod indices;
mod ols;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

// needed for float methods without std
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::sampler::CategoryMap;

pub use indices::{estimate_indices, evaluate_design, sobol_analyze, SobolIndices, SobolOptions};
pub use ols::{fit_ols, surrogate_eval, surrogate_fn, SurrogateModel};

/// Indices of the best `ceil(fraction * n)` entries of `scores`, best
/// first. Ties keep the earlier index. NaN ranks last.
pub fn top_fraction(scores: &[f64], fraction: f64) -> Result<Vec<usize>> {
    if scores.is_empty() {
        return Err(Error::Empty("trials"));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidArgument(alloc::format!("fraction must lie in (0, 1], got {fraction}")));
    }
    let n = scores.len();
    // absorb float error such as 0.05 * 100 = 5.000000000000001
    let k = ((fraction * n as f64) - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    let key = |i: usize| if scores[i].is_nan() { f64::NEG_INFINITY } else { scores[i] };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| key(b).total_cmp(&key(a)).then(a.cmp(&b)));
    order.truncate(k);
    Ok(order)
}

/// Indices summed over named column groups.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroupedIndices {
    pub groups: Vec<String>,
    pub s1: Vec<f64>,
    pub st: Vec<f64>,
    /// Upper triangle: interaction between two groups, summed over their
    /// member-column pairs. Diagonal: interactions among a group's own
    /// columns. Lower triangle: NaN.
    pub s2: Matrix,
}

pub fn group_indices(indices: &SobolIndices, map: &CategoryMap) -> Result<GroupedIndices> {
    let d = indices.dimension();
    if map.column_group.len() != d {
        return Err(Error::LengthMismatch(map.column_group.len(), d));
    }
    let mut member = Vec::with_capacity(d);
    for (c, g) in map.column_group.iter().enumerate() {
        match g {
            Some(g) if *g < map.groups.len() => member.push(*g),
            Some(g) => return Err(Error::IdOutOfRange(alloc::format!("group {g} for column {c}"))),
            None => return Err(Error::UnassignedColumn(c)),
        }
    }
    let g = map.groups.len();
    let mut s1 = vec![0.0; g];
    let mut st = vec![0.0; g];
    for c in 0..d {
        s1[member[c]] += indices.s1[c];
        st[member[c]] += indices.st[c];
    }
    let mut s2 = Matrix::from_vec(g, g, vec![f64::NAN; g * g]);
    for a in 0..g {
        for b in a..g {
            s2.set(a, b, 0.0);
        }
    }
    for i in 0..d {
        for k in i + 1..d {
            let (a, b) = (member[i].min(member[k]), member[i].max(member[k]));
            s2.set(a, b, s2.get(a, b) + indices.s2.get(i, k));
        }
    }
    Ok(GroupedIndices { groups: map.groups.clone(), s1, st, s2 })
}

/// Strict upper triangle in row-major order.
pub fn flatten_upper(m: &Matrix) -> Result<Vec<f64>> {
    if m.rows() != m.cols() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let d = m.rows();
    Ok((0..d).flat_map(|i| (i + 1..d).map(move |k| (i, k))).map(|(i, k)| m.get(i, k)).collect())
}

/// Sample Pearson correlation.
pub fn pearson(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    if u.len() < 2 {
        return Err(Error::InvalidArgument("correlation needs at least two points".into()));
    }
    if u.iter().chain(v).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("correlation input"));
    }
    let n = u.len() as f64;
    let (mu, mv) = (u.iter().sum::<f64>() / n, v.iter().sum::<f64>() / n);
    let (mut suv, mut suu, mut svv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        let (da, db) = (a - mu, b - mv);
        suv += da * db;
        suu += da * da;
        svv += db * db;
    }
    if suu == 0.0 || svv == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((suv / (suu.sqrt() * svv.sqrt())).clamp(-1.0, 1.0))
}
