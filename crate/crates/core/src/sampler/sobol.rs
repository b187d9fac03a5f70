use alloc::vec;
use alloc::vec::Vec;

use super::directions::DIRECTIONS;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

const BITS: usize = 32;

/// Number of dimensions covered by the bundled direction-number table.
pub const MAX_DIMENSION: usize = DIRECTIONS.len();

/// Unscrambled base-2 Sobol sequence in Gray-code order.
///
/// Index 0 (the origin) is skipped, so the first point produced is the
/// sequence's index 1: `(0.5, 0.5, ...)`.
#[derive(Debug, Clone)]
pub struct SobolSequence {
    directions: Vec<[u32; BITS]>,
    state: Vec<u32>,
    index: u64,
}

impl SobolSequence {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidArgument("Sobol dimension must be at least 1".into()));
        }
        if dimension > MAX_DIMENSION {
            return Err(Error::DimensionTooLarge { requested: dimension, available: MAX_DIMENSION });
        }
        let directions = (0..dimension).map(direction_vector).collect();
        let mut seq = Self { directions, state: vec![0; dimension], index: 0 };
        seq.advance();
        Ok(seq)
    }

    pub fn dimension(&self) -> usize {
        self.state.len()
    }

    /// Sequence index of the next point to be emitted.
    pub fn index(&self) -> u64 {
        self.index
    }

    fn advance(&mut self) {
        // Gray code: flip the direction number at the lowest zero bit of index.
        let c = (!self.index).trailing_zeros() as usize;
        assert!(c < BITS, "Sobol sequence exhausted");
        for (x, v) in self.state.iter_mut().zip(&self.directions) {
            *x ^= v[c];
        }
        self.index += 1;
    }

    /// Writes the next point into `out` and advances.
    pub fn next_into(&mut self, out: &mut [f64]) {
        const SCALE: f64 = 1.0 / (1u64 << BITS) as f64;
        for (o, &x) in out.iter_mut().zip(&self.state) {
            *o = x as f64 * SCALE;
        }
        self.advance();
    }

    /// Skips `n` points.
    pub fn skip(&mut self, n: u64) {
        for _ in 0..n {
            self.advance();
        }
    }
}

fn direction_vector(dim: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    let (degree, coeffs, m) = DIRECTIONS[dim];
    if degree == 0 {
        for (k, vk) in v.iter_mut().enumerate() {
            *vk = 1 << (BITS - 1 - k);
        }
        return v;
    }
    let s = degree as usize;
    for k in 0..s.min(BITS) {
        v[k] = m[k] << (BITS - 1 - k);
    }
    for k in s..BITS {
        let mut x = v[k - s] ^ (v[k - s] >> s);
        for j in 1..s {
            if (coeffs >> (s - 1 - j)) & 1 == 1 {
                x ^= v[k - j];
            }
        }
        v[k] = x;
    }
    v
}

/// The first `count` points of the `dimension`-dimensional sequence, one per row.
pub fn sobol_points(dimension: usize, count: usize) -> Result<Matrix> {
    if count == 0 {
        return Err(Error::InvalidArgument("point count must be at least 1".into()));
    }
    let mut seq = SobolSequence::new(dimension)?;
    let mut m = Matrix::zeros(count, dimension);
    for r in 0..count {
        seq.next_into(m.row_mut(r));
    }
    Ok(m)
}
