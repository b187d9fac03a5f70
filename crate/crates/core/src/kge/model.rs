use alloc::vec;
use alloc::vec::Vec;

// needed for float methods without std
#[allow(unused_imports)]
use num_traits::Float;

use super::Method;
use crate::error::{Error, Result};
use crate::graph::{Slot, Triple};
use crate::matrix::Matrix;

/// Entity and relation parameters of one scoring method.
///
/// Every bilinear scorer is evaluated through a query vector `q` built
/// from the anchor entity and relation, with `score = q . e_candidate`.
/// TransE instead builds a translated point `t` and scores
/// `-||t - e_candidate||`.
///
/// ComplEx rows are laid out as `[re_0 .. re_{h-1}, im_0 .. im_{h-1}]` with
/// `h = dim / 2`; RESCAL relation rows hold a row-major `dim x dim` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    method: Method,
    dim: usize,
    pub(crate) entities: Matrix,
    pub(crate) relations: Matrix,
}

impl EmbeddingModel {
    pub fn relation_width(method: Method, dim: usize) -> usize {
        match method {
            Method::Rescal => dim * dim,
            _ => dim,
        }
    }

    pub fn new(method: Method, entities: Matrix, relations: Matrix) -> Result<Self> {
        let dim = entities.cols();
        if dim == 0 {
            return Err(Error::InvalidArgument("embedding dimension must be positive".into()));
        }
        if method == Method::ComplEx && dim % 2 != 0 {
            return Err(Error::InvalidArgument(alloc::format!("ComplEx needs an even dimension, got {dim}")));
        }
        if relations.cols() != Self::relation_width(method, dim) {
            return Err(Error::LengthMismatch(relations.cols(), Self::relation_width(method, dim)));
        }
        Ok(Self { method, dim, entities, relations })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entity_count(&self) -> usize {
        self.entities.rows()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.rows()
    }

    pub fn entities(&self) -> &Matrix {
        &self.entities
    }

    pub fn relations(&self) -> &Matrix {
        &self.relations
    }

    pub fn is_finite(&self) -> bool {
        self.entities.as_slice().iter().chain(self.relations.as_slice()).all(|x| x.is_finite())
    }

    /// Plausibility of one triple; higher is more plausible.
    pub fn score(&self, t: Triple) -> f64 {
        let mut q = vec![0.0; self.dim];
        self.query(self.entities.row(t.subject as usize), t.predicate, Slot::Object, &mut q);
        self.candidate_score(&q, self.entities.row(t.object as usize))
    }

    /// Scores every entity placed in `slot`.
    pub fn score_all(&self, anchor: u32, relation: u32, slot: Slot, out: &mut [f64]) {
        let mut q = vec![0.0; self.dim];
        self.query(self.entities.row(anchor as usize), relation, slot, &mut q);
        for (o, e) in out.iter_mut().zip(self.entities.iter_rows()) {
            *o = self.candidate_score(&q, e);
        }
    }

    /// Builds the query vector (or TransE translated point) from an anchor
    /// embedding, which may differ from the stored row (e.g. after dropout).
    pub(crate) fn query(&self, anchor: &[f64], relation: u32, slot: Slot, q: &mut [f64]) {
        let r = self.relations.row(relation as usize);
        let d = self.dim;
        match (self.method, slot) {
            (Method::TransE, Slot::Object) => {
                for k in 0..d {
                    q[k] = anchor[k] + r[k];
                }
            }
            (Method::TransE, Slot::Subject) => {
                for k in 0..d {
                    q[k] = anchor[k] - r[k];
                }
            }
            (Method::DistMult, _) => {
                for k in 0..d {
                    q[k] = anchor[k] * r[k];
                }
            }
            (Method::ComplEx, Slot::Object) => {
                let h = d / 2;
                for k in 0..h {
                    let (sr, si, rr, ri) = (anchor[k], anchor[h + k], r[k], r[h + k]);
                    q[k] = sr * rr - si * ri;
                    q[h + k] = sr * ri + si * rr;
                }
            }
            (Method::ComplEx, Slot::Subject) => {
                let h = d / 2;
                for k in 0..h {
                    let (or, oi, rr, ri) = (anchor[k], anchor[h + k], r[k], r[h + k]);
                    q[k] = rr * or + ri * oi;
                    q[h + k] = rr * oi - ri * or;
                }
            }
            (Method::Rescal, Slot::Object) => {
                // q = R^T s
                q[..d].iter_mut().for_each(|x| *x = 0.0);
                for i in 0..d {
                    let si = anchor[i];
                    let row = &r[i * d..(i + 1) * d];
                    for j in 0..d {
                        q[j] += si * row[j];
                    }
                }
            }
            (Method::Rescal, Slot::Subject) => {
                // q = R o
                for i in 0..d {
                    q[i] = dot(&r[i * d..(i + 1) * d], anchor);
                }
            }
        }
    }

    /// Accumulates the gradient of a query with respect to its anchor
    /// embedding and relation parameters, given `dq = dL/dq`.
    pub(crate) fn query_backward(&self, anchor: &[f64], relation: u32, slot: Slot, dq: &[f64], d_anchor: &mut [f64], d_rel: &mut [f64]) {
        let r = self.relations.row(relation as usize);
        let d = self.dim;
        match (self.method, slot) {
            (Method::TransE, Slot::Object) => {
                for k in 0..d {
                    d_anchor[k] += dq[k];
                    d_rel[k] += dq[k];
                }
            }
            (Method::TransE, Slot::Subject) => {
                for k in 0..d {
                    d_anchor[k] += dq[k];
                    d_rel[k] -= dq[k];
                }
            }
            (Method::DistMult, _) => {
                for k in 0..d {
                    d_anchor[k] += dq[k] * r[k];
                    d_rel[k] += dq[k] * anchor[k];
                }
            }
            (Method::ComplEx, Slot::Object) => {
                let h = d / 2;
                for k in 0..h {
                    let (sr, si, rr, ri) = (anchor[k], anchor[h + k], r[k], r[h + k]);
                    let (gr, gi) = (dq[k], dq[h + k]);
                    d_anchor[k] += gr * rr + gi * ri;
                    d_anchor[h + k] += -gr * ri + gi * rr;
                    d_rel[k] += gr * sr + gi * si;
                    d_rel[h + k] += -gr * si + gi * sr;
                }
            }
            (Method::ComplEx, Slot::Subject) => {
                let h = d / 2;
                for k in 0..h {
                    let (or, oi, rr, ri) = (anchor[k], anchor[h + k], r[k], r[h + k]);
                    let (gr, gi) = (dq[k], dq[h + k]);
                    d_anchor[k] += gr * rr - gi * ri;
                    d_anchor[h + k] += gr * ri + gi * rr;
                    d_rel[k] += gr * or + gi * oi;
                    d_rel[h + k] += gr * oi - gi * or;
                }
            }
            (Method::Rescal, Slot::Object) => {
                for i in 0..d {
                    let row = &r[i * d..(i + 1) * d];
                    d_anchor[i] += dot(row, dq);
                    let si = anchor[i];
                    let drow = &mut d_rel[i * d..(i + 1) * d];
                    for j in 0..d {
                        drow[j] += si * dq[j];
                    }
                }
            }
            (Method::Rescal, Slot::Subject) => {
                for i in 0..d {
                    let gi = dq[i];
                    let row = &r[i * d..(i + 1) * d];
                    let drow = &mut d_rel[i * d..(i + 1) * d];
                    for j in 0..d {
                        d_anchor[j] += gi * row[j];
                        drow[j] += gi * anchor[j];
                    }
                }
            }
        }
    }

    #[inline]
    pub(crate) fn candidate_score(&self, q: &[f64], candidate: &[f64]) -> f64 {
        match self.method {
            Method::TransE => -distance(q, candidate),
            _ => dot(q, candidate),
        }
    }

    /// Given `g = dL/dscore`, accumulates into `dq` and `d_candidate`.
    #[inline]
    pub(crate) fn candidate_backward(&self, q: &[f64], candidate: &[f64], g: f64, dq: &mut [f64], d_candidate: &mut [f64]) {
        match self.method {
            Method::TransE => {
                let n = distance(q, candidate);
                if n == 0.0 {
                    return;
                }
                let c = g / n;
                for k in 0..q.len() {
                    let diff = (q[k] - candidate[k]) * c;
                    dq[k] -= diff;
                    d_candidate[k] += diff;
                }
            }
            _ => {
                for k in 0..q.len() {
                    dq[k] += g * candidate[k];
                    d_candidate[k] += g * q[k];
                }
            }
        }
    }

    pub fn parameters_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (self.entities.as_mut_slice(), self.relations.as_mut_slice())
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Gradient buffers shaped like a model's parameters.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub entities: Vec<f64>,
    pub relations: Vec<f64>,
}

impl Gradients {
    pub fn zeros_like(model: &EmbeddingModel) -> Self {
        Self { entities: vec![0.0; model.entities.as_slice().len()], relations: vec![0.0; model.relations.as_slice().len()] }
    }

    pub fn clear(&mut self) {
        self.entities.iter_mut().for_each(|x| *x = 0.0);
        self.relations.iter_mut().for_each(|x| *x = 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
        Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect())
    }

    #[test]
    fn transe_identity_translation_is_maximal() {
        let e = Matrix::from_vec(2, 3, vec![0.3, -0.2, 0.9, 0.1, 0.1, 0.1]);
        let r = Matrix::zeros(1, 3);
        let m = EmbeddingModel::new(Method::TransE, e, r).unwrap();
        assert_eq!(m.score(Triple::new(0, 0, 0)), 0.0);
        assert!(m.score(Triple::new(0, 0, 1)) < 0.0);
    }

    #[test]
    fn distmult_one_hot() {
        let mut e = Matrix::zeros(1, 4);
        e.set(0, 2, 1.0);
        let mut r = Matrix::zeros(1, 4);
        r.set(0, 2, 1.0);
        let m = EmbeddingModel::new(Method::DistMult, e, r).unwrap();
        assert_eq!(m.score(Triple::new(0, 0, 0)), 1.0);
    }

    #[test]
    fn complex_with_zero_imaginary_parts_is_distmult() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (n, h) = (6, 4);
        let real_e = random_matrix(n, h, &mut rng);
        let real_r = random_matrix(2, h, &mut rng);
        let pad = |m: &Matrix| {
            let mut out = Matrix::zeros(m.rows(), 2 * h);
            for i in 0..m.rows() {
                out.row_mut(i)[..h].copy_from_slice(m.row(i));
            }
            out
        };
        let dm = EmbeddingModel::new(Method::DistMult, real_e.clone(), real_r.clone()).unwrap();
        let cx = EmbeddingModel::new(Method::ComplEx, pad(&real_e), pad(&real_r)).unwrap();
        for s in 0..n as u32 {
            for o in 0..n as u32 {
                for p in 0..2 {
                    let t = Triple::new(s, p, o);
                    assert!((dm.score(t) - cx.score(t)).abs() < 1e-12);
                }
            }
        }
    }

    /// Independent ComplEx score written with complex arithmetic.
    fn complex_reference(s: &[f64], r: &[f64], o: &[f64]) -> f64 {
        let h = s.len() / 2;
        (0..h)
            .map(|k| {
                let (a, b) = (s[k], s[h + k]);
                let (c, d) = (r[k], r[h + k]);
                let (e, f) = (o[k], -o[h + k]);
                let (xr, xi) = (a * c - b * d, a * d + b * c);
                xr * e - xi * f
            })
            .sum()
    }

    #[test]
    fn every_slot_agrees_with_the_triple_score() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for method in Method::ALL {
            let d = 4;
            let e = random_matrix(5, d, &mut rng);
            let r = random_matrix(3, EmbeddingModel::relation_width(method, d), &mut rng);
            let m = EmbeddingModel::new(method, e, r).unwrap();
            let mut out = [0.0; 5];
            for (s, p, o) in [(0u32, 0u32, 1u32), (3, 2, 4), (2, 1, 2)] {
                let t = Triple::new(s, p, o);
                m.score_all(o, p, Slot::Subject, &mut out);
                assert!((out[s as usize] - m.score(t)).abs() < 1e-12, "{method:?} subject slot");
                m.score_all(s, p, Slot::Object, &mut out);
                assert!((out[o as usize] - m.score(t)).abs() < 1e-12, "{method:?} object slot");
            }
            if method == Method::ComplEx {
                let t = Triple::new(1, 2, 3);
                let want = complex_reference(m.entities.row(1), m.relations.row(2), m.entities.row(3));
                assert!((m.score(t) - want).abs() < 1e-12);
            }
            if method == Method::Rescal {
                let (s, o) = (m.entities.row(0), m.entities.row(4));
                let r = m.relations.row(1);
                let want: f64 = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| s[i] * r[i * d + j] * o[j]).sum();
                assert!((m.score(Triple::new(0, 1, 4)) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn complex_requires_even_dimension() {
        assert!(EmbeddingModel::new(Method::ComplEx, Matrix::zeros(2, 3), Matrix::zeros(1, 3)).is_err());
        assert!(EmbeddingModel::new(Method::Rescal, Matrix::zeros(2, 3), Matrix::zeros(1, 3)).is_err());
    }
}
