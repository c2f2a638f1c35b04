//! Partitioning Around Medoids: greedy BUILD, then SWAP to a local optimum.

use super::clustering::{Clustering, Method};
use crate::dissim::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct PamResult<T> {
    pub clustering: Clustering,
    /// Medoid of each cluster, in label order.
    pub medoids: Vec<usize>,
    pub objective: T,
    pub swaps: usize,
}

/// Index of the nearest medoid for every point (ties to the earlier medoid).
pub fn assign_to_medoids<T: Scalar>(d: &DissimilarityMatrix<T>, medoids: &[usize]) -> Vec<usize> {
    (0..d.n())
        .map(|i| {
            let mut best = 0;
            for (m, &c) in medoids.iter().enumerate().skip(1) {
                if d.get(i, c) < d.get(i, medoids[best]) {
                    best = m;
                }
            }
            best
        })
        .collect()
}

pub fn medoid_objective<T: Scalar>(d: &DissimilarityMatrix<T>, medoids: &[usize]) -> T {
    (0..d.n())
        .map(|i| medoids.iter().map(|&m| d.get(i, m)).fold(T::infinity(), T::min))
        .sum()
}

fn build<T: Scalar>(d: &DissimilarityMatrix<T>, k: usize) -> Vec<usize> {
    let n = d.n();
    let mut medoids = Vec::with_capacity(k);
    let mut is_medoid = vec![false; n];
    let mut nearest = vec![T::infinity(); n];
    for step in 0..k {
        let mut best: Option<(usize, T)> = None;
        for c in (0..n).filter(|&c| !is_medoid[c]) {
            // First medoid minimises total dissimilarity; later ones maximise the gain.
            let score = if step == 0 {
                -(0..n).map(|i| d.get(i, c)).sum::<T>()
            } else {
                (0..n).map(|i| (nearest[i] - d.get(i, c)).max(T::zero())).sum::<T>()
            };
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((c, score));
            }
        }
        let (c, _) = best.expect("k <= n");
        is_medoid[c] = true;
        medoids.push(c);
        for i in 0..n {
            nearest[i] = nearest[i].min(d.get(i, c));
        }
    }
    medoids
}

/// Nearest and second-nearest medoid distance of every point.
fn nearest_two<T: Scalar>(d: &DissimilarityMatrix<T>, medoids: &[usize]) -> (Vec<usize>, Vec<T>, Vec<T>) {
    let n = d.n();
    let mut near = vec![0; n];
    let mut dn = vec![T::infinity(); n];
    let mut ds = vec![T::infinity(); n];
    for i in 0..n {
        for (m, &c) in medoids.iter().enumerate() {
            let v = d.get(i, c);
            if v < dn[i] {
                ds[i] = dn[i];
                dn[i] = v;
                near[i] = m;
            } else if v < ds[i] {
                ds[i] = v;
            }
        }
    }
    (near, dn, ds)
}

pub fn pam<T: Scalar>(d: &DissimilarityMatrix<T>, k: usize, seed: u64) -> Result<PamResult<T>> {
    let n = d.n();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("PAM needs 1 <= K <= n, got K = {k}, n = {n}")));
    }
    if let Some(medoids) = exhaustive(d, k) {
        let objective = medoid_objective(d, &medoids);
        return Ok(finish(d, k, medoids, objective, 0, seed));
    }
    let mut medoids = build(d, k);
    let mut swaps = 0;
    let mut objective = medoid_objective(d, &medoids);
    let max_swaps = 100 * n.max(10);
    loop {
        let (near, dn, ds) = nearest_two(d, &medoids);
        let mut is_medoid = vec![false; n];
        for &m in &medoids {
            is_medoid[m] = true;
        }
        let mut best: Option<(usize, usize, T)> = None;
        for (mi, _) in medoids.iter().enumerate() {
            for h in (0..n).filter(|&h| !is_medoid[h]) {
                let delta: T = (0..n)
                    .map(|j| {
                        let djh = d.get(j, h);
                        if near[j] == mi {
                            djh.min(ds[j]) - dn[j]
                        } else {
                            djh.min(dn[j]) - dn[j]
                        }
                    })
                    .sum();
                if best.is_none_or(|(_, _, b)| delta < b) {
                    best = Some((mi, h, delta));
                }
            }
        }
        let tol = T::lit(1e-12) * objective.abs().max(T::one());
        match best {
            Some((mi, h, delta)) if delta < -tol && swaps < max_swaps => {
                medoids[mi] = h;
                swaps += 1;
                objective = medoid_objective(d, &medoids);
            }
            _ => break,
        }
    }
    Ok(finish(d, k, medoids, objective, swaps, seed))
}

fn finish<T: Scalar>(
    d: &DissimilarityMatrix<T>,
    k: usize,
    medoids: Vec<usize>,
    objective: T,
    swaps: usize,
    seed: u64,
) -> PamResult<T> {
    let assignment = assign_to_medoids(d, &medoids);
    let clustering = Clustering::from_groups(&assignment, Method::Pam, seed);
    // Reorder medoids so that medoids[label - 1] is the medoid of that label.
    let mut ordered = vec![0; k];
    for (i, &a) in assignment.iter().enumerate() {
        ordered[clustering.cluster_of(i)] = medoids[a];
    }
    PamResult { clustering, medoids: ordered, objective, swaps }
}

/// Problems with at most this many medoid sets are solved by enumeration.
pub const EXHAUSTIVE_LIMIT: u64 = 1000;

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k) as u64;
    let mut c: u64 = 1;
    for i in 0..k {
        c = c.saturating_mul(n as u64 - i) / (i + 1);
        if c > EXHAUSTIVE_LIMIT {
            return c;
        }
    }
    c
}

/// Best medoid set by enumeration in lexicographic order, for small problems.
fn exhaustive<T: Scalar>(d: &DissimilarityMatrix<T>, k: usize) -> Option<Vec<usize>> {
    let n = d.n();
    if k == n || binomial(n, k) > EXHAUSTIVE_LIMIT {
        return None;
    }
    let mut current: Vec<usize> = (0..k).collect();
    let mut best = (current.clone(), medoid_objective(d, &current));
    loop {
        let mut i = k;
        while i > 0 && current[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return Some(best.0);
        }
        current[i - 1] += 1;
        for j in i..k {
            current[j] = current[j - 1] + 1;
        }
        let v = medoid_objective(d, &current);
        if v < best.1 {
            best = (current.clone(), v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> DissimilarityMatrix<f64> {
        DissimilarityMatrix::from_fn(points.len(), |i, j| Ok((points[i] - points[j]).abs())).unwrap()
    }

    #[test]
    fn k_equals_n_and_one() {
        let d = line(&[0.0, 1.0, 3.0, 7.0]);
        let r = pam(&d, 4, 0).unwrap();
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.clustering.k(), 4);
        let r = pam(&d, 1, 0).unwrap();
        let totals: Vec<f64> = (0..4).map(|j| (0..4).map(|i| d.get(i, j)).sum()).collect();
        let argmin = (0..4).min_by(|&a, &b| totals[a].partial_cmp(&totals[b]).unwrap()).unwrap();
        assert_eq!(r.medoids, vec![argmin]);
        assert!(pam(&d, 5, 0).is_err());
        assert!(pam(&d, 0, 0).is_err());
    }

    #[test]
    fn separates_two_groups() {
        let d = line(&[0.0, 0.1, 0.2, 10.0, 10.1, 10.3]);
        let r = pam(&d, 2, 0).unwrap();
        assert_eq!(r.clustering.labels(), &[1, 1, 1, 2, 2, 2]);
        assert_eq!(r.medoids, vec![1, 4]);
        assert!((r.objective - 0.5).abs() < 1e-12);
    }
}
