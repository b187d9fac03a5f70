use super::sobol::SobolSequence;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Which cross-sample matrix a design row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaltelliBlock {
    A,
    /// A with column `i` taken from B.
    AB(usize),
    /// B with column `i` taken from A.
    BA(usize),
    B,
}

/// Saltelli cross-sample design.
///
/// Rows are grouped by base sample `j`: `A_j`, `AB^0_j .. AB^{D-1}_j`, then
/// (second order only) `BA^0_j .. BA^{D-1}_j`, then `B_j`. A and B are the
/// first and last `D` columns of an `N x 2D` Sobol block.
#[derive(Debug, Clone, PartialEq)]
pub struct SaltelliDesign {
    dimension: usize,
    base_n: usize,
    second_order: bool,
    points: Matrix,
}

impl SaltelliDesign {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn base_n(&self) -> usize {
        self.base_n
    }

    pub fn second_order(&self) -> bool {
        self.second_order
    }

    /// Rows per base sample: `D + 2`, or `2D + 2` with second order.
    pub fn stride(&self) -> usize {
        stride(self.dimension, self.second_order)
    }

    pub fn points(&self) -> &Matrix {
        &self.points
    }

    pub fn row_count(&self) -> usize {
        self.points.rows()
    }

    pub fn row_index(&self, base: usize, block: SaltelliBlock) -> usize {
        let d = self.dimension;
        let offset = match block {
            SaltelliBlock::A => 0,
            SaltelliBlock::AB(i) => 1 + i,
            SaltelliBlock::BA(i) => {
                assert!(self.second_order, "BA rows exist only in second-order designs");
                1 + d + i
            }
            SaltelliBlock::B => self.stride() - 1,
        };
        base * self.stride() + offset
    }

    pub fn row(&self, base: usize, block: SaltelliBlock) -> &[f64] {
        self.points.row(self.row_index(base, block))
    }

    pub fn into_points(self) -> Matrix {
        self.points
    }
}

fn stride(d: usize, second_order: bool) -> usize {
    if second_order {
        2 * d + 2
    } else {
        d + 2
    }
}

pub fn saltelli_design(dimension: usize, base_n: usize, second_order: bool) -> Result<SaltelliDesign> {
    if base_n == 0 {
        return Err(Error::InvalidArgument("Saltelli base sample count must be positive".into()));
    }
    if dimension == 0 {
        return Err(Error::InvalidArgument("Saltelli dimension must be at least 1".into()));
    }
    let d = dimension;
    let step = stride(d, second_order);
    let mut seq = SobolSequence::new(2 * d)?;
    let mut base = alloc::vec![0.0; 2 * d];
    let mut points = Matrix::zeros(base_n * step, d);
    for j in 0..base_n {
        seq.next_into(&mut base);
        let (a, b) = base.split_at(d);
        let r0 = j * step;
        points.row_mut(r0).copy_from_slice(a);
        for i in 0..d {
            let row = points.row_mut(r0 + 1 + i);
            row.copy_from_slice(a);
            row[i] = b[i];
        }
        if second_order {
            for i in 0..d {
                let row = points.row_mut(r0 + 1 + d + i);
                row.copy_from_slice(b);
                row[i] = a[i];
            }
        }
        points.row_mut(r0 + step - 1).copy_from_slice(b);
    }
    Ok(SaltelliDesign { dimension, base_n, second_order, points })
}
