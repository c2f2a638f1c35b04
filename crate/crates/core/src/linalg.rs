//! Dense symmetric eigendecomposition, generic over the scalar type. The
//! decomposition itself runs in `f64` through nalgebra.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_ITERATIONS: usize = 10_000;

/// Eigenvalues in ascending order with the matching unit eigenvectors stored
/// column-wise in a row-major `n x n` buffer.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub n: usize,
    pub values: Vec<T>,
    pub vectors: Vec<T>,
}

impl<T: Scalar> SymmetricEigen<T> {
    /// Decomposes the symmetric matrix `a` (row-major, `n x n`).
    pub fn new(n: usize, a: &[T]) -> Result<Self> {
        assert_eq!(a.len(), n * n, "matrix buffer must be n x n");
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("eigendecomposition input is not finite".into()));
        }
        if n == 0 {
            return Ok(Self { n, values: vec![], vectors: vec![] });
        }
        let m = DMatrix::from_row_iterator(n, n, a.iter().map(|v| v.as_f64()));
        let eig = nalgebra::SymmetricEigen::try_new(m, f64::EPSILON, MAX_ITERATIONS)
            .ok_or_else(|| Error::Numeric("symmetric eigendecomposition did not converge".into()))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q]).then(p.cmp(&q)));
        let values = order.iter().map(|&k| T::lit(eig.eigenvalues[k])).collect();
        let mut vectors = vec![T::zero(); n * n];
        for (col, &k) in order.iter().enumerate() {
            for i in 0..n {
                vectors[i * n + col] = T::lit(eig.eigenvectors[(i, k)]);
            }
        }
        Ok(Self { n, values, vectors })
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<T> {
        (0..self.n).map(|i| self.vectors[i * self.n + k]).collect()
    }
}
