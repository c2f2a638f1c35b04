use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Pam,
    Single,
    Average,
    Complete,
    Ward,
    Spectral,
    RandomKcentroid,
    RandomNn,
    RandomFn,
    RandomAvg,
}

impl Method {
    /// The six regular clustering methods.
    pub const REGULAR: [Method; 6] =
        [Method::Pam, Method::Single, Method::Average, Method::Complete, Method::Ward, Method::Spectral];
    /// The four random-clustering schemes used for calibration.
    pub const RANDOM: [Method; 4] =
        [Method::RandomKcentroid, Method::RandomNn, Method::RandomFn, Method::RandomAvg];

    pub fn name(self) -> &'static str {
        match self {
            Method::Pam => "pam",
            Method::Single => "single",
            Method::Average => "average",
            Method::Complete => "complete",
            Method::Ward => "ward",
            Method::Spectral => "spectral",
            Method::RandomKcentroid => "random_kcentroid",
            Method::RandomNn => "random_nn",
            Method::RandomFn => "random_fn",
            Method::RandomAvg => "random_avg",
        }
    }

    pub fn is_random(self) -> bool {
        Method::RANDOM.contains(&self)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::REGULAR
            .iter()
            .chain(Method::RANDOM.iter())
            .copied()
            .find(|m| m.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::invalid(format!("unknown clustering method `{s}`")))
    }
}

/// A partition of `n` points into `k` nonempty clusters labelled `1..=k`,
/// numbered in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clustering {
    labels: Vec<usize>,
    k: usize,
    pub method: Method,
    pub seed: u64,
}

impl Clustering {
    /// Relabels arbitrary group ids into `1..=k` by first appearance.
    pub fn from_groups<L: Copy + Eq + std::hash::Hash>(groups: &[L], method: Method, seed: u64) -> Self {
        let mut map = std::collections::HashMap::new();
        let labels = groups
            .iter()
            .map(|g| {
                let next = map.len() + 1;
                *map.entry(*g).or_insert(next)
            })
            .collect();
        Self { labels, k: map.len(), method, seed }
    }

    /// Validates labels already in `1..=k` with every cluster nonempty; keeps the numbering.
    pub fn from_labels(labels: Vec<usize>, method: Method, seed: u64) -> Result<Self> {
        let k = labels.iter().copied().max().unwrap_or(0);
        let mut seen = vec![false; k + 1];
        for &l in &labels {
            if l == 0 {
                return Err(Error::invalid("cluster labels start at 1"));
            }
            seen[l] = true;
        }
        if seen.iter().skip(1).any(|s| !s) {
            return Err(Error::invalid("cluster labels must cover 1..=k without gaps"));
        }
        Ok(Self { labels, k, method, seed })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Zero-based cluster of point `i`.
    #[inline]
    pub fn cluster_of(&self, i: usize) -> usize {
        self.labels[i] - 1
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &l in &self.labels {
            s[l - 1] += 1;
        }
        s
    }

    /// Members of each cluster, zero-based cluster index.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            m[l - 1].push(i);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_appearance_labelling() {
        let c = Clustering::from_groups(&[7, 7, 2, 9, 2], Method::Pam, 0);
        assert_eq!(c.labels(), &[1, 1, 2, 3, 2]);
        assert_eq!(c.k(), 3);
        assert_eq!(c.sizes(), vec![2, 2, 1]);
        assert_eq!(c.members()[1], vec![2, 4]);
    }

    #[test]
    fn label_validation() {
        assert!(Clustering::from_labels(vec![1, 3, 3], Method::Ward, 0).is_err());
        assert!(Clustering::from_labels(vec![0, 1], Method::Ward, 0).is_err());
        let c = Clustering::from_labels(vec![2, 1, 2], Method::Ward, 0).unwrap();
        assert_eq!(c.labels(), &[2, 1, 2]);
    }

    #[test]
    fn method_names_roundtrip() {
        for m in Method::REGULAR.iter().chain(&Method::RANDOM) {
            assert_eq!(m.name().parse::<Method>().unwrap(), *m);
        }
        assert!("kmeans".parse::<Method>().is_err());
    }
}
