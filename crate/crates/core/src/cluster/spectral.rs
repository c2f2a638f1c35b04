//! Normalised spectral clustering on a Gaussian affinity built from the dissimilarities.

use rand::Rng as _;

use super::clustering::{Clustering, Method};
use crate::dissim::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::linalg::SymmetricEigen;
use crate::scalar::{median, Scalar};
use crate::seed::{derive_seed, rng_from_seed, Rng};

pub const KMEANS_RESTARTS: usize = 10;
const KMEANS_MAX_ITER: usize = 100;

/// Bandwidth: median off-diagonal dissimilarity, falling back to the mean of
/// the positive values when more than half of them are zero.
pub fn affinity_bandwidth<T: Scalar>(d: &DissimilarityMatrix<T>) -> T {
    let vals = d.condensed();
    let med = median(vals).unwrap_or(T::one());
    if med > T::zero() {
        return med;
    }
    let pos: Vec<T> = vals.iter().copied().filter(|v| *v > T::zero()).collect();
    if pos.is_empty() {
        T::one()
    } else {
        pos.iter().copied().sum::<T>() / T::from_len(pos.len())
    }
}

/// Row-normalised embedding on the leading `k` eigenvectors of `D^-1/2 S D^-1/2`.
pub fn spectral_embedding<T: Scalar>(d: &DissimilarityMatrix<T>, k: usize) -> Result<Vec<Vec<T>>> {
    let n = d.n();
    let sigma = affinity_bandwidth(d);
    let denom = T::lit(2.0) * sigma * sigma;
    let mut s = vec![T::zero(); n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = d.get(i, j);
            let a = (-(v * v) / denom).exp();
            s[i * n + j] = a;
            s[j * n + i] = a;
        }
    }
    let tiny = T::min_positive_value().sqrt();
    let inv_sqrt_deg: Vec<T> = (0..n)
        .map(|i| {
            let deg: T = s[i * n..(i + 1) * n].iter().copied().sum();
            T::one() / deg.max(tiny).sqrt()
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            s[i * n + j] = s[i * n + j] * inv_sqrt_deg[i] * inv_sqrt_deg[j];
        }
    }
    let eig = SymmetricEigen::new(n, &s)
        .map_err(|e| Error::Numeric(format!("spectral embedding (n = {n}, K = {k}): {e}")))?;
    let cols: Vec<usize> = (n - k..n).rev().collect();
    Ok((0..n)
        .map(|i| {
            let mut row: Vec<T> = cols.iter().map(|&c| eig.vectors[i * n + c]).collect();
            let norm = row.iter().map(|v| *v * *v).sum::<T>().sqrt();
            if norm > T::zero() {
                for v in &mut row {
                    *v = *v / norm;
                }
            }
            row
        })
        .collect())
}

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Lloyd's k-means from a k-means++ start. Returns assignment and within sum of squares.
fn kmeans_once<T: Scalar>(x: &[Vec<T>], k: usize, rng: &mut Rng) -> (Vec<usize>, T) {
    let n = x.len();
    let mut centers: Vec<Vec<T>> = Vec::with_capacity(k);
    centers.push(x[rng.gen_range(0..n)].clone());
    let mut nearest: Vec<T> = x.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: T = nearest.iter().copied().sum();
        let next = if total > T::zero() {
            let target = T::lit(rng.gen::<f64>()) * total;
            let mut acc = T::zero();
            let mut pick = n - 1;
            for (i, &w) in nearest.iter().enumerate() {
                acc = acc + w;
                if acc > target && w > T::zero() {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            rng.gen_range(0..n)
        };
        centers.push(x[next].clone());
        for (i, p) in x.iter().enumerate() {
            nearest[i] = nearest[i].min(sq_dist(p, &centers[centers.len() - 1]));
        }
    }

    let mut assign = vec![0usize; n];
    for _ in 0..KMEANS_MAX_ITER {
        let mut changed = false;
        for (i, p) in x.iter().enumerate() {
            let mut best = 0;
            let mut bd = sq_dist(p, &centers[0]);
            for (c, ctr) in centers.iter().enumerate().skip(1) {
                let dd = sq_dist(p, ctr);
                if dd < bd {
                    best = c;
                    bd = dd;
                }
            }
            if assign[i] != best {
                assign[i] = best;
                changed = true;
            }
        }
        // Empty clusters take the point farthest from its centre.
        for c in 0..k {
            if !assign.contains(&c) {
                let far = (0..n)
                    .max_by(|&a, &b| {
                        sq_dist(&x[a], &centers[assign[a]])
                            .partial_cmp(&sq_dist(&x[b], &centers[assign[b]]))
                            .expect("finite")
                    })
                    .expect("n > 0");
                assign[far] = c;
                changed = true;
            }
        }
        let dim = x[0].len();
        let mut sums = vec![vec![T::zero(); dim]; k];
        let mut counts = vec![0usize; k];
        for (i, p) in x.iter().enumerate() {
            counts[assign[i]] += 1;
            for (s, &v) in sums[assign[i]].iter_mut().zip(p) {
                *s = *s + v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let cnt = T::from_len(counts[c]);
                centers[c] = sums[c].iter().map(|&s| s / cnt).collect();
            }
        }
        if !changed {
            break;
        }
    }
    let wss = x.iter().enumerate().map(|(i, p)| sq_dist(p, &centers[assign[i]])).sum();
    (assign, wss)
}

/// Best of `restarts` k-means runs (lowest within sum of squares, earliest on ties).
pub fn kmeans<T: Scalar>(x: &[Vec<T>], k: usize, restarts: usize, seed: u64) -> Vec<usize> {
    let mut best: Option<(Vec<usize>, T)> = None;
    for r in 0..restarts.max(1) {
        let mut rng = rng_from_seed(derive_seed(seed, "kmeans", &[r as u64]));
        let (a, w) = kmeans_once(x, k, &mut rng);
        if best.as_ref().is_none_or(|(_, bw)| w < *bw) {
            best = Some((a, w));
        }
    }
    best.expect("at least one restart").0
}

pub fn spectral<T: Scalar>(d: &DissimilarityMatrix<T>, k: usize, seed: u64) -> Result<Clustering> {
    let n = d.n();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("spectral clustering needs 1 <= K <= n, got K = {k}, n = {n}")));
    }
    if k == n {
        return Ok(Clustering::from_groups(&(0..n).collect::<Vec<_>>(), Method::Spectral, seed));
    }
    if k == 1 {
        return Ok(Clustering::from_groups(&vec![0; n], Method::Spectral, seed));
    }
    let emb = spectral_embedding(d, k)?;
    let assign = kmeans(&emb, k, KMEANS_RESTARTS, seed);
    Ok(Clustering::from_groups(&assign, Method::Spectral, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_k() {
        let d = DissimilarityMatrix::from_condensed(3, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(spectral(&d, 3, 1).unwrap().labels(), &[1, 2, 3]);
        assert_eq!(spectral(&d, 1, 1).unwrap().labels(), &[1, 1, 1]);
        assert!(spectral(&d, 4, 1).is_err());
    }

    #[test]
    fn kmeans_clusters_are_nonempty() {
        let x: Vec<Vec<f64>> = (0..9).map(|i| vec![f64::from(i % 3), 0.0]).collect();
        let a = kmeans(&x, 3, 5, 4);
        for c in 0..3 {
            assert!(a.contains(&c));
        }
    }
}
