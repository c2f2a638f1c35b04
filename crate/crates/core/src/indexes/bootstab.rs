//! Bootstrap instability: how often pairs of points change co-membership
//! between clusterings of two bootstrap samples.

use rand::Rng as _;
use rayon::prelude::*;

use super::{IndexId, IndexValue};
use crate::cluster::{fit, Fitted, Method};
use crate::dissim::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};
use crate::seed::{derive_seed, rng_from_seed, Rng};

pub const DEFAULT_BOOTSTAB_B: usize = 50;
const MAX_REDRAWS: usize = 100;

/// How points left out of a bootstrap sample are attached to its clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classifier {
    /// Nearest cluster representative (medoid or random centre).
    NearestCentre,
    /// Smallest average dissimilarity to the sampled cluster members.
    AverageDissimilarity,
}

impl Classifier {
    pub fn default_for(method: Method) -> Self {
        match method {
            Method::Pam | Method::RandomKcentroid => Classifier::NearestCentre,
            _ => Classifier::AverageDissimilarity,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BootstabConfig {
    pub b: usize,
    pub seed: u64,
    pub classifier: Option<Classifier>,
}

pub fn iteration_seed(seed: u64, b: usize) -> u64 {
    derive_seed(seed, "bootstab", &[b as u64])
}

pub fn fit_seed(iteration_seed: u64, t: usize) -> u64 {
    derive_seed(iteration_seed, "bootstab-fit", &[t as u64])
}

/// Draws `n` indices with replacement and returns the distinct ones in
/// increasing order, redrawing while fewer than `k` are distinct.
pub fn draw_bootstrap(rng: &mut Rng, n: usize, k: usize) -> Result<Vec<usize>> {
    for _ in 0..MAX_REDRAWS {
        let mut hit = vec![false; n];
        for _ in 0..n {
            hit[rng.gen_range(0..n)] = true;
        }
        let distinct: Vec<usize> = (0..n).filter(|&i| hit[i]).collect();
        if distinct.len() >= k {
            return Ok(distinct);
        }
    }
    Err(Error::invalid(format!(
        "bootstrap samples of {n} points kept fewer than {k} distinct points in {MAX_REDRAWS} draws"
    )))
}

/// Zero-based cluster of every point of `d`, given a clustering `fitted` of the
/// points `sample` (indices into `d`).
pub fn classify<T: Scalar>(
    d: &DissimilarityMatrix<T>,
    sample: &[usize],
    fitted: &Fitted,
    classifier: Classifier,
) -> Vec<usize> {
    let n = d.n();
    let k = fitted.clustering.k();
    let mut labels = vec![usize::MAX; n];
    for (s, &p) in sample.iter().enumerate() {
        labels[p] = fitted.clustering.cluster_of(s);
    }
    let centres: Option<Vec<usize>> = match (classifier, &fitted.centres) {
        (Classifier::NearestCentre, Some(c)) => Some(c.iter().map(|&s| sample[s]).collect()),
        _ => None,
    };
    let members: Vec<Vec<usize>> = fitted
        .clustering
        .members()
        .into_iter()
        .map(|m| m.into_iter().map(|s| sample[s]).collect())
        .collect();
    for x in 0..n {
        if labels[x] != usize::MAX {
            continue;
        }
        let score = |c: usize| -> T {
            match &centres {
                Some(cs) => d.get(x, cs[c]),
                None => {
                    members[c].iter().map(|&m| d.get(x, m)).sum::<T>() / T::from_len(members[c].len())
                }
            }
        };
        let mut best = 0;
        let mut bs = score(0);
        for c in 1..k {
            let s = score(c);
            if s < bs {
                best = c;
                bs = s;
            }
        }
        labels[x] = best;
    }
    labels
}

/// `(1/n^2) * sum_{i,i'} |f1(i,i') - f2(i,i')|` for co-membership indicators,
/// evaluated through the contingency table.
pub fn comembership_disagreement<T: Scalar>(l1: &[usize], l2: &[usize]) -> T {
    assert_eq!(l1.len(), l2.len());
    let n = l1.len();
    if n == 0 {
        return T::zero();
    }
    let k1 = l1.iter().max().map_or(0, |m| m + 1);
    let k2 = l2.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![0u64; k1 * k2];
    let mut r1 = vec![0u64; k1];
    let mut r2 = vec![0u64; k2];
    for (&a, &b) in l1.iter().zip(l2) {
        table[a * k2 + b] += 1;
        r1[a] += 1;
        r2[b] += 1;
    }
    let sq = |v: &[u64]| v.iter().map(|&x| u128::from(x * x)).sum::<u128>();
    let disagree = sq(&r1) + sq(&r2) - 2 * sq(&table);
    T::lit(disagree as f64 / (n as f64 * n as f64))
}

/// Bootstab instability of `method` with `k` clusters; smaller is more stable.
pub fn bootstab<T: Scalar>(
    d: &DissimilarityMatrix<T>,
    method: Method,
    k: usize,
    cfg: &BootstabConfig,
) -> Result<IndexValue<T>> {
    if cfg.b == 0 {
        return Err(Error::invalid("bootstab needs B >= 1"));
    }
    let n = d.n();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("bootstab needs 1 <= K <= n, got K = {k}, n = {n}")));
    }
    let classifier = cfg.classifier.unwrap_or_else(|| Classifier::default_for(method));
    let per_iteration: Vec<T> = (0..cfg.b)
        .into_par_iter()
        .map(|b| {
            let s = iteration_seed(cfg.seed, b);
            let mut rng = rng_from_seed(s);
            let mut labels = Vec::with_capacity(2);
            for t in 0..2 {
                let sample = draw_bootstrap(&mut rng, n, k)?;
                let fitted = fit(&d.submatrix(&sample), method, k, fit_seed(s, t))?;
                labels.push(classify(d, &sample, &fitted, classifier));
            }
            Ok(comembership_disagreement(&labels[0], &labels[1]))
        })
        .collect::<Result<_>>()?;
    let mean = compensated_sum(per_iteration) / T::from_len(cfg.b);
    Ok(IndexValue::new(IndexId::Bootstab, mean))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disagreement_matches_pair_count() {
        let a = [0, 0, 1, 1, 2];
        let b = [0, 1, 1, 1, 0];
        let mut direct = 0;
        for i in 0..5 {
            for j in 0..5 {
                if (a[i] == a[j]) != (b[i] == b[j]) {
                    direct += 1;
                }
            }
        }
        let v: f64 = comembership_disagreement(&a, &b);
        assert!((v - f64::from(direct) / 25.0).abs() < 1e-15);
        assert_eq!(comembership_disagreement::<f64>(&a, &[4, 4, 7, 7, 1]), 0.0);
    }

    #[test]
    fn separated_groups_are_stable() {
        let x = [0.0, 0.05, 0.1, 0.02, 0.08, 20.0, 20.05, 20.1, 20.03, 20.07];
        let d = DissimilarityMatrix::from_fn(10, |i, j| Ok(f64::abs(x[i] - x[j]))).unwrap();
        for m in [Method::Pam, Method::Average, Method::Ward, Method::Single, Method::Complete] {
            let v = bootstab(&d, m, 2, &BootstabConfig { b: 20, seed: 3, classifier: None }).unwrap();
            assert_eq!(v.raw, 0.0, "{m}");
        }
    }

    #[test]
    fn too_few_distinct_points() {
        let mut rng = rng_from_seed(1);
        assert!(draw_bootstrap(&mut rng, 3, 4).is_err());
        let s = draw_bootstrap(&mut rng, 30, 2).unwrap();
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }
}
