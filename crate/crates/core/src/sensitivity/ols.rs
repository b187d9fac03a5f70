use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::sampler::HyperparameterSpace;

/// Linear least-squares stand-in for the trial pipeline.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SurrogateModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub r_squared: f64,
    pub training_rows: usize,
}

impl SurrogateModel {
    pub fn width(&self) -> usize {
        self.coefficients.len()
    }

    /// True when there are no more rows than inputs, so the fit is not
    /// unique and the minimum-norm solution was taken.
    pub fn is_underdetermined(&self) -> bool {
        self.training_rows <= self.coefficients.len()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }
}

/// Ordinary least squares with an intercept.
///
/// Columns and targets are centred, then solved by SVD with singular values
/// below `max(n, d) * eps * sigma_max` dropped, which yields the
/// minimum-norm coefficient vector when the design is rank deficient (for
/// example a full dummy group alongside the intercept).
pub fn fit_ols(x: &Matrix, y: &[f64]) -> Result<SurrogateModel> {
    let (n, d) = (x.rows(), x.cols());
    if n != y.len() {
        return Err(Error::LengthMismatch(n, y.len()));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(alloc::format!("least squares needs at least 2 rows, got {n}")));
    }
    if x.as_slice().iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("regression input"));
    }
    let mut means = alloc::vec![0.0; d];
    for row in x.iter_rows() {
        means.iter_mut().zip(row).for_each(|(m, v)| *m += v);
    }
    means.iter_mut().for_each(|m| *m /= n as f64);
    let y_mean = y.iter().sum::<f64>() / n as f64;

    let xc = DMatrix::from_fn(n, d, |i, j| x.get(i, j) - means[j]);
    let yc = DVector::from_fn(n, |i, _| y[i] - y_mean);
    let coefficients: Vec<f64> = if d == 0 {
        Vec::new()
    } else {
        let svd = xc.clone().svd(true, true);
        let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let eps = (n.max(d) as f64) * f64::EPSILON * sigma_max;
        if sigma_max == 0.0 {
            alloc::vec![0.0; d]
        } else {
            let beta = svd.solve(&yc, eps).map_err(|e| Error::InvalidArgument(e.into()))?;
            beta.iter().copied().collect()
        }
    };
    let intercept = y_mean - means.iter().zip(&coefficients).map(|(m, c)| m * c).sum::<f64>();

    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (row, &t) in x.iter_rows().zip(y) {
        let pred = intercept + row.iter().zip(&coefficients).map(|(v, c)| v * c).sum::<f64>();
        ss_res += (t - pred) * (t - pred);
        ss_tot += (t - y_mean) * (t - y_mean);
    }
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(SurrogateModel { coefficients, intercept, r_squared, training_rows: n })
}

/// Evaluates `model` at a unit-cube point after one-hot rounding of every
/// categorical group of `space`.
pub fn surrogate_eval(model: &SurrogateModel, point: &[f64], space: &HyperparameterSpace) -> Result<f64> {
    let width = space.encoded_width();
    if point.len() != width {
        return Err(Error::LengthMismatch(point.len(), width));
    }
    if model.width() != width {
        return Err(Error::LengthMismatch(model.width(), width));
    }
    if let Some((column, &value)) = point.iter().enumerate().find(|(_, &x)| !(0.0..=1.0).contains(&x)) {
        return Err(Error::CoordinateOutOfRange { column, value });
    }
    let mut p = point.to_vec();
    space.round_dummies(&mut p);
    Ok(model.predict(&p))
}

/// A reusable closure form of [`surrogate_eval`] for design sweeps; the
/// design is known to lie in the unit cube so bounds are not rechecked.
pub fn surrogate_fn<'a>(model: &'a SurrogateModel, space: &'a HyperparameterSpace) -> impl Fn(&[f64]) -> f64 + Sync + 'a {
    let groups = space.categorical_groups();
    move |point: &[f64]| {
        let mut total = model.intercept;
        let mut col = 0;
        for &(start, w) in &groups {
            total += model.coefficients[col..start].iter().zip(&point[col..start]).map(|(c, v)| c * v).sum::<f64>();
            let hot = argmax_lowest(&point[start..start + w]);
            total += model.coefficients[start + hot];
            col = start + w;
        }
        total + model.coefficients[col..].iter().zip(&point[col..]).map(|(c, v)| c * v).sum::<f64>()
    }
}

fn argmax_lowest(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}
