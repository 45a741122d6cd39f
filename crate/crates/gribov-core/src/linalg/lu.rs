//! Complex LU with partial pivoting; backs the Pade solve and dense inverses.

use crate::error::{Error, Result};
use crate::fock::FockMatrix;
use crate::scalar::{Real, C};

pub struct Lu<T> {
    dim: usize,
    // packed L (unit lower) and U
    lu: Vec<C<T>>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factor(m: &FockMatrix<T>) -> Result<Self> {
        let n = m.dim();
        let mut lu: Vec<C<T>> = m.entries().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm();
            for i in (k + 1)..n {
                let v = lu[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == T::zero() {
                return Err(Error::InvalidInput(format!(
                    "singular matrix in LU at column {k}"
                )));
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let piv = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / piv;
                lu[i * n + k] = f;
                if f.re != T::zero() || f.im != T::zero() {
                    for j in (k + 1)..n {
                        let ukj = lu[k * n + j];
                        lu[i * n + j] -= f * ukj;
                    }
                }
            }
        }
        Ok(Lu { dim: n, lu, perm })
    }

    pub fn solve_vec(&self, b: &[C<T>]) -> Vec<C<T>> {
        let n = self.dim;
        let mut x: Vec<C<T>> = self.perm.iter().map(|&p| b[p]).collect();
        // forward
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc;
        }
        // backward
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc / self.lu[i * n + i];
        }
        x
    }

    /// Solve A X = B column by column.
    pub fn solve_matrix(&self, b: &FockMatrix<T>) -> FockMatrix<T> {
        let n = self.dim;
        let mut out = FockMatrix::zeros(n, b.offset());
        for j in 0..n {
            let col: Vec<C<T>> = (0..n).map(|i| b[(i, j)]).collect();
            let x = self.solve_vec(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    pub fn inverse(&self, offset: usize) -> FockMatrix<T> {
        let n = self.dim;
        let id = FockMatrix::identity(n, offset);
        self.solve_matrix(&id)
    }
}
