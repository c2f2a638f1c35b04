//! Classical (Torgerson) multidimensional scaling for plotting clusterings.

use std::io::Write;

use serde::Serialize;

use crate::dissim::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::linalg::SymmetricEigen;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingResult<T> {
    /// `coordinates[i][a]`: coordinate `a` of point `i`.
    pub coordinates: Vec<Vec<T>>,
    /// Eigenvalues of the used components, largest first, before clamping.
    pub eigenvalues: Vec<T>,
    /// Share of the absolute eigenvalue mass that is negative.
    pub clamped_mass: T,
}

/// Embeds `d` in `dims` dimensions. Eigenvector signs are fixed so that the
/// largest-magnitude entry is positive.
pub fn classical_mds<T: Scalar>(d: &DissimilarityMatrix<T>, dims: usize) -> Result<EmbeddingResult<T>> {
    let n = d.n();
    if dims == 0 || n < dims + 1 {
        return Err(Error::invalid(format!("MDS in {dims} dimensions needs at least {} points, got {n}", dims + 1)));
    }
    let half = T::lit(0.5);
    let mut b = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            let v = d.get(i, j);
            b[i * n + j] = -half * v * v;
        }
    }
    let row_means: Vec<T> = (0..n).map(|i| b[i * n..(i + 1) * n].iter().copied().sum::<T>() / T::from_len(n)).collect();
    let grand = row_means.iter().copied().sum::<T>() / T::from_len(n);
    for i in 0..n {
        for j in 0..n {
            b[i * n + j] = b[i * n + j] - row_means[i] - row_means[j] + grand;
        }
    }
    let eig = SymmetricEigen::new(n, &b)?;
    let total: T = eig.values.iter().map(|v| v.abs()).sum();
    let negative: T = eig.values.iter().filter(|v| **v < T::zero()).map(|v| v.abs()).sum();
    let clamped_mass = if total > T::zero() { negative / total } else { T::zero() };

    let mut coordinates = vec![vec![T::zero(); dims]; n];
    let mut eigenvalues = Vec::with_capacity(dims);
    for a in 0..dims {
        let k = n - 1 - a;
        let lambda = eig.values[k];
        eigenvalues.push(lambda);
        let mut v = eig.vector(k);
        let mut lead = 0;
        for i in 1..n {
            if v[i].abs() > v[lead].abs() {
                lead = i;
            }
        }
        if v[lead] < T::zero() {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let scale = lambda.max(T::zero()).sqrt();
        let mean = v.iter().copied().sum::<T>() / T::from_len(n);
        for i in 0..n {
            coordinates[i][a] = (v[i] - mean) * scale;
        }
    }
    if coordinates.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite MDS coordinates".into()));
    }
    Ok(EmbeddingResult { coordinates, eigenvalues, clamped_mass })
}

/// `id,x,y,label` for a two-dimensional embedding.
pub fn write_coordinates_csv<T: Scalar, W: Write>(
    w: W,
    ids: &[String],
    embedding: &EmbeddingResult<T>,
    labels: Option<&[usize]>,
) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["id", "x", "y", "label"])?;
    for (i, id) in ids.iter().enumerate() {
        let c = &embedding.coordinates[i];
        let y = c.get(1).copied().unwrap_or_else(T::zero);
        let label = labels.map_or_else(String::new, |l| l[i].to_string());
        out.write_record([id.clone(), c[0].to_string(), y.to_string(), label])?;
    }
    out.flush()?;
    Ok(())
}
