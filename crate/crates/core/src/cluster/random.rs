//! Random clusterings used as the calibration reference.

use rand::seq::SliceRandom;

use super::clustering::{Clustering, Method};
use crate::dissim::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomScheme {
    /// Random centres, every other point joins its nearest centre.
    KCentroid,
    /// Sequential attachment by minimum dissimilarity to current members.
    NearestNeighbour,
    /// Sequential attachment by maximum dissimilarity to current members.
    FarthestNeighbour,
    /// Sequential attachment by average dissimilarity to current members.
    AverageDistance,
}

impl RandomScheme {
    pub fn method(self) -> Method {
        match self {
            RandomScheme::KCentroid => Method::RandomKcentroid,
            RandomScheme::NearestNeighbour => Method::RandomNn,
            RandomScheme::FarthestNeighbour => Method::RandomFn,
            RandomScheme::AverageDistance => Method::RandomAvg,
        }
    }

    pub fn from_method(m: Method) -> Option<Self> {
        Some(match m {
            Method::RandomKcentroid => RandomScheme::KCentroid,
            Method::RandomNn => RandomScheme::NearestNeighbour,
            Method::RandomFn => RandomScheme::FarthestNeighbour,
            Method::RandomAvg => RandomScheme::AverageDistance,
            _ => return None,
        })
    }
}

/// Random clustering of `d` into `k` clusters. Also returns the seed point of
/// every cluster (in label order), used to classify left-out points.
pub fn random_clustering_with_seeds<T: Scalar>(
    d: &DissimilarityMatrix<T>,
    k: usize,
    scheme: RandomScheme,
    seed: u64,
) -> Result<(Clustering, Vec<usize>)> {
    let n = d.n();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("random clustering needs 1 <= K <= n, got K = {k}, n = {n}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let centres: Vec<usize> = order[..k].to_vec();
    let mut assign = vec![usize::MAX; n];
    for (c, &p) in centres.iter().enumerate() {
        assign[p] = c;
    }
    match scheme {
        RandomScheme::KCentroid => {
            for &p in &order[k..] {
                let mut best = 0;
                for c in 1..k {
                    if d.get(p, centres[c]) < d.get(p, centres[best]) {
                        best = c;
                    }
                }
                assign[p] = best;
            }
        }
        _ => {
            let mut members: Vec<Vec<usize>> = centres.iter().map(|&p| vec![p]).collect();
            for &p in &order[k..] {
                let score = |c: usize| -> T {
                    let it = members[c].iter().map(|&q| d.get(p, q));
                    match scheme {
                        RandomScheme::NearestNeighbour => it.fold(T::infinity(), T::min),
                        RandomScheme::FarthestNeighbour => it.fold(T::neg_infinity(), T::max),
                        _ => it.sum::<T>() / T::from_len(members[c].len()),
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
                assign[p] = best;
                members[best].push(p);
            }
        }
    }
    let clustering = Clustering::from_groups(&assign, scheme.method(), seed);
    let mut seeds = vec![0; k];
    for &p in &centres {
        seeds[clustering.cluster_of(p)] = p;
    }
    Ok((clustering, seeds))
}

pub fn random_clustering<T: Scalar>(
    d: &DissimilarityMatrix<T>,
    k: usize,
    scheme: RandomScheme,
    seed: u64,
) -> Result<Clustering> {
    random_clustering_with_seeds(d, k, scheme, seed).map(|(c, _)| c)
}
