//! Agglomerative clustering with Lance-Williams updates.

use serde::{Deserialize, Serialize};

use super::clustering::{Clustering, Method};
use crate::dissim::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Linkage {
    Single,
    Average,
    Complete,
    /// Ward's criterion with the update applied to squared dissimilarities.
    Ward,
}

impl Linkage {
    pub fn method(self) -> Method {
        match self {
            Linkage::Single => Method::Single,
            Linkage::Average => Method::Average,
            Linkage::Complete => Method::Complete,
            Linkage::Ward => Method::Ward,
        }
    }

    pub fn from_method(m: Method) -> Option<Self> {
        Some(match m {
            Method::Single => Linkage::Single,
            Method::Average => Linkage::Average,
            Method::Complete => Linkage::Complete,
            Method::Ward => Linkage::Ward,
            _ => return None,
        })
    }
}

/// One merge. Leaves are `0..n`; the cluster created by merge `s` is `n + s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge<T> {
    pub a: usize,
    pub b: usize,
    pub height: T,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram<T> {
    pub n: usize,
    pub linkage: Linkage,
    pub merges: Vec<Merge<T>>,
}

fn update<T: Scalar>(link: Linkage, dka: T, dkb: T, dab: T, na: usize, nb: usize, nk: usize) -> T {
    match link {
        Linkage::Single => dka.min(dkb),
        Linkage::Complete => dka.max(dkb),
        Linkage::Average => {
            let (na, nb) = (T::from_len(na), T::from_len(nb));
            (na * dka + nb * dkb) / (na + nb)
        }
        Linkage::Ward => {
            let (na, nb, nk) = (T::from_len(na), T::from_len(nb), T::from_len(nk));
            (((na + nk) * dka + (nb + nk) * dkb - nk * dab) / (na + nb + nk)).max(T::zero())
        }
    }
}

/// Agglomerates `d`. Each current cluster is identified with its smallest
/// member; among equally close pairs the one with the smallest identifiers merges first.
pub fn hierarchical<T: Scalar>(d: &DissimilarityMatrix<T>, linkage: Linkage) -> Result<Dendrogram<T>> {
    let n = d.n();
    if n < 2 {
        return Err(Error::invalid("hierarchical clustering needs at least 2 points"));
    }
    let idx = |i: usize, j: usize| i * n + j;
    let mut dist = vec![T::zero(); n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = d.get(i, j);
            let v = if linkage == Linkage::Ward { v * v } else { v };
            dist[idx(i, j)] = v;
            dist[idx(j, i)] = v;
        }
    }
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut node = (0..n).collect::<Vec<_>>();
    // Nearest active neighbour with a larger index.
    let mut nn = vec![usize::MAX; n];
    let mut nn_dist = vec![T::infinity(); n];
    let refresh = |i: usize, dist: &[T], active: &[bool], nn: &mut [usize], nn_dist: &mut [T]| {
        nn[i] = usize::MAX;
        nn_dist[i] = T::infinity();
        for j in (i + 1)..n {
            if active[j] && (nn[i] == usize::MAX || dist[idx(i, j)] < nn_dist[i]) {
                nn[i] = j;
                nn_dist[i] = dist[idx(i, j)];
            }
        }
    };
    for i in 0..n {
        refresh(i, &dist, &active, &mut nn, &mut nn_dist);
    }

    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..(n - 1) {
        let mut a = usize::MAX;
        for i in 0..n {
            if active[i] && nn[i] != usize::MAX && (a == usize::MAX || nn_dist[i] < nn_dist[a]) {
                a = i;
            }
        }
        let b = nn[a];
        let dab = dist[idx(a, b)];
        let height = if linkage == Linkage::Ward { dab.sqrt() } else { dab };
        merges.push(Merge { a: node[a].min(node[b]), b: node[a].max(node[b]), height, size: size[a] + size[b] });

        for k in 0..n {
            if !active[k] || k == a || k == b {
                continue;
            }
            let v = update(linkage, dist[idx(k, a)], dist[idx(k, b)], dab, size[a], size[b], size[k]);
            dist[idx(k, a)] = v;
            dist[idx(a, k)] = v;
        }
        active[b] = false;
        size[a] += size[b];
        node[a] = n + step;

        refresh(a, &dist, &active, &mut nn, &mut nn_dist);
        for k in 0..a {
            if !active[k] {
                continue;
            }
            if nn[k] == a || nn[k] == b {
                refresh(k, &dist, &active, &mut nn, &mut nn_dist);
            } else if dist[idx(k, a)] < nn_dist[k] || (dist[idx(k, a)] == nn_dist[k] && a < nn[k]) {
                nn[k] = a;
                nn_dist[k] = dist[idx(k, a)];
            }
        }
        for k in (a + 1)..b {
            if active[k] && nn[k] == b {
                refresh(k, &dist, &active, &mut nn, &mut nn_dist);
            }
        }
    }
    Ok(Dendrogram { n, linkage, merges })
}

impl<T: Scalar> Dendrogram<T> {
    /// Partition into `k` clusters obtained by stopping after `n - k` merges.
    pub fn cut(&self, k: usize, seed: u64) -> Result<Clustering> {
        if k == 0 || k > self.n {
            return Err(Error::invalid(format!("cannot cut {} leaves into {k} clusters", self.n)));
        }
        let total = self.n + self.merges.len();
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (s, m) in self.merges.iter().take(self.n - k).enumerate() {
            let new = self.n + s;
            let ra = find(&mut parent, m.a);
            let rb = find(&mut parent, m.b);
            parent[ra] = new;
            parent[rb] = new;
        }
        let roots: Vec<usize> = (0..self.n).map(|i| find(&mut parent, i)).collect();
        Ok(Clustering::from_groups(&roots, self.linkage.method(), seed))
    }
}
