//! Stand-alone validity indexes: ASW, Calinski-Harabasz, Dunn, CVNN and the adjusted Rand index.

use super::{IndexId, IndexValue};
use crate::cluster::Clustering;
use crate::dissim::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_CVNN_KAPPA: usize = 10;

fn proper<T: Scalar>(name: &'static str, d: &DissimilarityMatrix<T>, c: &Clustering) -> Result<()> {
    if d.n() != c.n() {
        return Err(Error::invalid(format!("clustering has {} points, matrix has {}", c.n(), d.n())));
    }
    if c.k() < 2 || c.k() >= c.n() {
        return Err(Error::UndefinedIndex(name, format!("needs 2 <= K < n, got K = {}", c.k())));
    }
    Ok(())
}

/// Average silhouette width; singleton clusters get silhouette 0.
pub fn asw<T: Scalar>(d: &DissimilarityMatrix<T>, c: &Clustering) -> Result<IndexValue<T>> {
    proper("asw", d, c)?;
    let n = c.n();
    let k = c.k();
    let sizes = c.sizes();
    let mut total = T::zero();
    let mut sums = vec![T::zero(); k];
    for i in 0..n {
        sums.iter_mut().for_each(|s| *s = T::zero());
        for j in 0..n {
            if j != i {
                sums[c.cluster_of(j)] = sums[c.cluster_of(j)] + d.get(i, j);
            }
        }
        let own = c.cluster_of(i);
        if sizes[own] == 1 {
            continue;
        }
        let a = sums[own] / T::from_len(sizes[own] - 1);
        let b = (0..k)
            .filter(|&m| m != own)
            .map(|m| sums[m] / T::from_len(sizes[m]))
            .fold(T::infinity(), T::min);
        let den = a.max(b);
        if den > T::zero() {
            total = total + (b - a) / den;
        }
    }
    Ok(IndexValue::new(IndexId::Asw, total / T::from_len(n)))
}

/// Calinski-Harabasz computed from squared dissimilarities.
pub fn ch<T: Scalar>(d: &DissimilarityMatrix<T>, c: &Clustering) -> Result<IndexValue<T>> {
    proper("ch", d, c)?;
    let n = c.n();
    let k = c.k();
    let mut within_pairs = vec![T::zero(); k];
    let mut all = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = d.get(i, j);
            let sq = v * v;
            all = all + sq;
            if c.cluster_of(i) == c.cluster_of(j) {
                within_pairs[c.cluster_of(i)] = within_pairs[c.cluster_of(i)] + sq;
            }
        }
    }
    let w: T = within_pairs.iter().zip(c.sizes()).map(|(&s, nk)| s / T::from_len(nk)).sum();
    let t = all / T::from_len(n);
    if !(w > T::zero()) {
        return Err(Error::UndefinedIndex("ch", "zero within-cluster sum of squares".into()));
    }
    let b = t - w;
    let v = (b / T::from_len(k - 1)) / (w / T::from_len(n - k));
    Ok(IndexValue::new(IndexId::Ch, v))
}

/// Smallest between-cluster dissimilarity over the largest cluster diameter.
pub fn dunn<T: Scalar>(d: &DissimilarityMatrix<T>, c: &Clustering) -> Result<IndexValue<T>> {
    proper("dunn", d, c)?;
    let n = c.n();
    let mut min_between = T::infinity();
    let mut max_diam = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = d.get(i, j);
            if c.cluster_of(i) == c.cluster_of(j) {
                max_diam = max_diam.max(v);
            } else {
                min_between = min_between.min(v);
            }
        }
    }
    if !(max_diam > T::zero()) {
        return Err(Error::UndefinedIndex("dunn", "all cluster diameters are zero".into()));
    }
    Ok(IndexValue::new(IndexId::Dunn, min_between / max_diam))
}

/// The `kappa` nearest neighbours of every point (ties to the lower index).
#[derive(Debug, Clone)]
pub struct NeighbourTable {
    pub kappa: usize,
    pub neighbours: Vec<Vec<usize>>,
}

impl NeighbourTable {
    pub fn new<T: Scalar>(d: &DissimilarityMatrix<T>, kappa: usize) -> Self {
        let n = d.n();
        let kappa = kappa.min(n.saturating_sub(1));
        let neighbours = (0..n)
            .map(|i| {
                let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                others.sort_by(|&a, &b| d.get(i, a).partial_cmp(&d.get(i, b)).expect("finite").then(a.cmp(&b)));
                others.truncate(kappa);
                others
            })
            .collect();
        Self { kappa, neighbours }
    }
}

/// Separation and compactness parts of CVNN for a single clustering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvnnComponents<T> {
    pub sep: T,
    pub com: T,
}

/// `sep`: worst cluster's mean share of the `kappa` nearest neighbours that lie
/// in other clusters. `com`: sum over clusters of the mean within-cluster
/// pairwise dissimilarity.
pub fn cvnn_components<T: Scalar>(
    d: &DissimilarityMatrix<T>,
    c: &Clustering,
    nn: &NeighbourTable,
) -> Result<CvnnComponents<T>> {
    proper("cvnn", d, c)?;
    if nn.neighbours.len() != c.n() || nn.kappa == 0 {
        return Err(Error::invalid("neighbour table does not match the clustering"));
    }
    let kappa = T::from_len(nn.kappa);
    let mut sep = T::zero();
    let mut com = T::zero();
    for members in c.members() {
        let own = c.cluster_of(members[0]);
        let foreign: T = members
            .iter()
            .map(|&i| T::from_len(nn.neighbours[i].iter().filter(|&&j| c.cluster_of(j) != own).count()) / kappa)
            .sum();
        sep = sep.max(foreign / T::from_len(members.len()));
        let nk = members.len();
        if nk > 1 {
            let mut s = T::zero();
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    s = s + d.get(i, j);
                }
            }
            com = com + T::lit(2.0) * s / T::from_len(nk * (nk - 1));
        }
    }
    Ok(CvnnComponents { sep, com })
}

/// CVNN over a set of clusterings: each part is divided by its maximum over the set.
pub fn cvnn<T: Scalar>(components: &[CvnnComponents<T>]) -> Vec<IndexValue<T>> {
    let max_sep = components.iter().map(|c| c.sep).fold(T::zero(), T::max);
    let max_com = components.iter().map(|c| c.com).fold(T::zero(), T::max);
    let norm = |v: T, m: T| if m > T::zero() { v / m } else { T::zero() };
    components
        .iter()
        .map(|c| IndexValue::new(IndexId::Cvnn, norm(c.sep, max_sep) + norm(c.com, max_com)))
        .collect()
}

fn choose2(x: usize) -> f64 {
    (x as f64) * (x as f64 - 1.0) / 2.0
}

/// Adjusted Rand index.
pub fn ari<T: Scalar>(a: &Clustering, b: &Clustering) -> Result<T> {
    if a.n() != b.n() {
        return Err(Error::invalid("ARI needs clusterings of the same points"));
    }
    let n = a.n();
    let mut table = vec![0usize; a.k() * b.k()];
    for i in 0..n {
        table[a.cluster_of(i) * b.k() + b.cluster_of(i)] += 1;
    }
    let index: f64 = table.iter().map(|&x| choose2(x)).sum();
    let sa: f64 = a.sizes().into_iter().map(choose2).sum();
    let sb: f64 = b.sizes().into_iter().map(choose2).sum();
    let total = choose2(n);
    let expected = if total > 0.0 { sa * sb / total } else { 0.0 };
    let max = 0.5 * (sa + sb);
    let v = if max == expected {
        // Both partitions trivial in the same way.
        if index == max { 1.0 } else { 0.0 }
    } else {
        (index - expected) / (max - expected)
    };
    Ok(T::lit(v))
}
