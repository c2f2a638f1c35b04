//! Dissimilarity-based clusterers and the random reference clusterings.

pub mod clustering;
pub mod hierarchical;
pub mod pam;
pub mod random;
pub mod spectral;

pub use clustering::{Clustering, Method};
pub use hierarchical::{hierarchical, Dendrogram, Linkage, Merge};
pub use pam::{assign_to_medoids, medoid_objective, pam, PamResult};
pub use random::{random_clustering, random_clustering_with_seeds, RandomScheme};
pub use spectral::{kmeans, spectral, spectral_embedding};

use crate::dissim::DissimilarityMatrix;
use crate::error::Result;
use crate::scalar::Scalar;

/// A clustering together with the representatives used to classify new points.
#[derive(Debug, Clone)]
pub struct Fitted {
    pub clustering: Clustering,
    /// Medoids (PAM) or random centres (random K-centroids), in label order.
    pub centres: Option<Vec<usize>>,
}

/// Runs `method` with `k` clusters.
pub fn fit<T: Scalar>(d: &DissimilarityMatrix<T>, method: Method, k: usize, seed: u64) -> Result<Fitted> {
    if let Some(link) = Linkage::from_method(method) {
        let clustering = hierarchical(d, link)?.cut(k, seed)?;
        return Ok(Fitted { clustering, centres: None });
    }
    if let Some(scheme) = RandomScheme::from_method(method) {
        let (clustering, seeds) = random_clustering_with_seeds(d, k, scheme, seed)?;
        let centres = (scheme == RandomScheme::KCentroid).then_some(seeds);
        return Ok(Fitted { clustering, centres });
    }
    match method {
        Method::Pam => {
            let r = pam(d, k, seed)?;
            Ok(Fitted { clustering: r.clustering, centres: Some(r.medoids) })
        }
        Method::Spectral => Ok(Fitted { clustering: spectral(d, k, seed)?, centres: None }),
        _ => unreachable!("all methods handled"),
    }
}

/// Runs `method` for every `k` in `ks`; hierarchical methods build one dendrogram.
pub fn fit_range<T: Scalar>(
    d: &DissimilarityMatrix<T>,
    method: Method,
    ks: &[usize],
    seed_for: impl Fn(usize) -> u64,
) -> Result<Vec<Clustering>> {
    if let Some(link) = Linkage::from_method(method) {
        let dg = hierarchical(d, link)?;
        return ks.iter().map(|&k| dg.cut(k, seed_for(k))).collect();
    }
    ks.iter().map(|&k| fit(d, method, k, seed_for(k)).map(|f| f.clustering)).collect()
}
