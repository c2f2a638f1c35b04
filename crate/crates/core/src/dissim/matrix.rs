use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Symmetric dissimilarity matrix with zero diagonal, stored as the condensed
/// upper triangle in row-major order (`(0,1), (0,2), .., (1,2), ..`).
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix<T> {
    n: usize,
    values: Vec<T>,
}

#[inline]
pub fn condensed_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of pair `(i, j)`, `i < j`, in condensed storage.
#[inline]
pub fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl<T: Scalar> DissimilarityMatrix<T> {
    pub fn from_condensed(n: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != condensed_len(n) {
            return Err(Error::invalid(format!(
                "condensed length {} does not match n = {n}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < T::zero()) {
            return Err(Error::invalid(format!("dissimilarity {v} is negative or not finite")));
        }
        Ok(Self { n, values })
    }

    /// Builds the matrix from a pairwise function evaluated for every `i < j` in parallel.
    pub fn from_fn<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<T> + Sync,
    {
        let rows: Vec<Vec<T>> = (0..n)
            .into_par_iter()
            .map(|i| ((i + 1)..n).map(|j| f(i, j)).collect::<Result<Vec<T>>>())
            .collect::<Result<_>>()?;
        Self::from_condensed(n, rows.into_iter().flatten().collect())
    }

    /// Builds from a full square matrix; only the upper triangle is read.
    pub fn from_square(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("square matrix rows have unequal length"));
        }
        let mut values = Vec::with_capacity(condensed_len(n));
        for i in 0..n {
            values.extend_from_slice(&rows[i][i + 1..]);
        }
        Self::from_condensed(n, values)
    }

    pub fn from_points(points: &[Vec<T>]) -> Result<Self> {
        Self::from_fn(points.len(), |i, j| {
            Ok(points[i]
                .iter()
                .zip(&points[j])
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum::<T>()
                .sqrt())
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn condensed(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => T::zero(),
            Less => self.values[condensed_index(self.n, i, j)],
            Greater => self.values[condensed_index(self.n, j, i)],
        }
    }

    /// Dissimilarities among the given points, in the given order (repeats allowed).
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let m = idx.len();
        let mut values = Vec::with_capacity(condensed_len(m));
        for a in 0..m {
            for b in (a + 1)..m {
                values.push(self.get(idx[a], idx[b]));
            }
        }
        Self { n: m, values }
    }

    pub fn map<F: Fn(T) -> T>(&self, f: F) -> Result<Self> {
        Self::from_condensed(self.n, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn to_square(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Binary layout: little-endian u64 `n`, then the condensed values as little-endian f64.
    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&(self.n as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.as_f64().to_le_bytes())?;
        }
        w.flush()
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut head = [0u8; 8];
        r.read_exact(&mut head)
            .map_err(|e| Error::invalid(format!("missing header: {e}")))?;
        let n = usize::try_from(u64::from_le_bytes(head))
            .map_err(|_| Error::invalid("n does not fit in usize"))?;
        let len = condensed_len(n);
        let mut buf = vec![0u8; len * 8];
        r.read_exact(&mut buf)
            .map_err(|e| Error::invalid(format!("truncated body for n = {n}: {e}")))?;
        let mut rest = Vec::new();
        r.read_to_end(&mut rest).map_err(|e| Error::invalid(e.to_string()))?;
        if !rest.is_empty() {
            return Err(Error::invalid(format!("{} trailing bytes", rest.len())));
        }
        let values = buf
            .chunks_exact(8)
            .map(|c| T::lit(f64::from_le_bytes(c.try_into().expect("8-byte chunk"))))
            .collect();
        Self::from_condensed(n, values)
    }

    pub fn save_binary(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_binary(std::io::BufWriter::new(f)).map_err(|e| Error::io(path, e))
    }

    pub fn load_binary(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_binary(std::io::BufReader::new(f)).map_err(|e| match e {
            Error::InvalidInput(m) => Error::schema(path, m),
            other => other,
        })
    }

    /// Square CSV with a header of point ids and the id in the first column.
    pub fn write_csv<W: Write>(&self, ids: &[String], w: W) -> Result<()> {
        assert_eq!(ids.len(), self.n);
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec![String::from("id")];
        header.extend(ids.iter().cloned());
        let csv_err = |e| Error::Csv { path: "<csv>".into(), source: e };
        out.write_record(&header).map_err(csv_err)?;
        for i in 0..self.n {
            let mut row = vec![ids[i].clone()];
            row.extend((0..self.n).map(|j| format!("{}", self.get(i, j).as_f64())));
            out.write_record(&row).map_err(csv_err)?;
        }
        out.flush().map_err(|e| Error::io("<csv>", e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condensed_index_matches_enumeration() {
        let n = 7;
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                assert_eq!(condensed_index(n, i, j), k);
                k += 1;
            }
        }
        assert_eq!(k, condensed_len(n));
    }

    #[test]
    fn rejects_negative_and_wrong_length() {
        assert!(DissimilarityMatrix::from_condensed(3, vec![1.0, 2.0]).is_err());
        assert!(DissimilarityMatrix::from_condensed(2, vec![-1.0]).is_err());
        assert!(DissimilarityMatrix::from_condensed(2, vec![f64::NAN]).is_err());
    }

    #[test]
    fn binary_roundtrip_is_byte_identical() {
        let d = DissimilarityMatrix::from_condensed(4, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.5]).unwrap();
        let mut a = Vec::new();
        d.write_binary(&mut a).unwrap();
        assert_eq!(a.len(), 8 + 6 * 8);
        assert_eq!(&a[..8], &4u64.to_le_bytes());
        let back = DissimilarityMatrix::<f64>::read_binary(&a[..]).unwrap();
        assert_eq!(back, d);
        let mut b = Vec::new();
        back.write_binary(&mut b).unwrap();
        assert_eq!(a, b);
        assert!(DissimilarityMatrix::<f64>::read_binary(&a[..a.len() - 1]).is_err());
    }

    #[test]
    fn symmetric_access_and_submatrix() {
        let d = DissimilarityMatrix::from_condensed(3, vec![1.0, 5.0, 4.0]).unwrap();
        assert_eq!(d.get(2, 0), 5.0);
        assert_eq!(d.get(1, 1), 0.0);
        let s = d.submatrix(&[2, 1, 2]);
        assert_eq!(s.condensed(), &[4.0, 0.0, 4.0]);
    }
}
