use super::{IndexId, IndexValue};
use crate::cluster::Clustering;
use crate::dissim::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::scalar::{pearson, Scalar};

pub const DEFAULT_SEPARATION_P: f64 = 0.1;

fn check<T: Scalar>(d: &DissimilarityMatrix<T>, c: &Clustering) -> Result<()> {
    if d.n() != c.n() {
        return Err(Error::invalid(format!("clustering has {} points, matrix has {}", c.n(), d.n())));
    }
    Ok(())
}

/// Mean over points of the average dissimilarity to the other members of the
/// own cluster, weighted so that a cluster with all within-dissimilarities
/// equal to `v` contributes exactly `v` per member. Singletons contribute 0.
pub fn ave_within<T: Scalar>(d: &DissimilarityMatrix<T>, c: &Clustering) -> Result<IndexValue<T>> {
    check(d, c)?;
    let mut total = T::zero();
    for members in c.members() {
        let nk = members.len();
        if nk < 2 {
            continue;
        }
        let mut s = T::zero();
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                s = s + d.get(i, j);
            }
        }
        total = total + T::lit(2.0) * s / T::from_len(nk - 1);
    }
    Ok(IndexValue::new(IndexId::AveWithin, total / T::from_len(c.n())))
}

/// Mean of the smallest `floor(p * n_k)` (at least one) distances to other
/// clusters, pooled over clusters.
pub fn separation_index<T: Scalar>(d: &DissimilarityMatrix<T>, c: &Clustering, p: T) -> Result<IndexValue<T>> {
    check(d, c)?;
    if c.k() < 2 {
        return Err(Error::UndefinedIndex("sep", "needs at least 2 clusters".into()));
    }
    if !(p > T::zero() && p <= T::one()) {
        return Err(Error::invalid(format!("separation proportion must be in (0, 1], got {p}")));
    }
    let n = c.n();
    let mut border: Vec<Vec<T>> = vec![Vec::new(); c.k()];
    for i in 0..n {
        let ci = c.cluster_of(i);
        let m = (0..n)
            .filter(|&j| c.cluster_of(j) != ci)
            .map(|j| d.get(i, j))
            .fold(T::infinity(), T::min);
        border[ci].push(m);
    }
    let mut sum = T::zero();
    let mut count = 0usize;
    for mut b in border {
        b.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        let nk = b.len();
        let take = (p * T::from_len(nk)).floor().to_usize().unwrap_or(0).clamp(1, nk);
        sum = sum + b[..take].iter().copied().sum::<T>();
        count += take;
    }
    Ok(IndexValue::new(IndexId::Separation, sum / T::from_len(count)))
}

/// Pearson correlation between the dissimilarities and the "different cluster" indicator.
pub fn pearson_gamma<T: Scalar>(d: &DissimilarityMatrix<T>, c: &Clustering) -> Result<IndexValue<T>> {
    check(d, c)?;
    let n = c.n();
    let mut ind = Vec::with_capacity(d.condensed().len());
    for i in 0..n {
        for j in (i + 1)..n {
            ind.push(if c.labels()[i] != c.labels()[j] { T::one() } else { T::zero() });
        }
    }
    pearson(d.condensed(), &ind)
        .map(|r| IndexValue::new(IndexId::PearsonGamma, r))
        .ok_or_else(|| Error::UndefinedIndex("pearson_gamma", "constant dissimilarities or cluster indicator".into()))
}

/// Shannon entropy (natural log) of the cluster size proportions.
pub fn entropy<T: Scalar>(c: &Clustering) -> IndexValue<T> {
    let n = T::from_len(c.n());
    let h = c
        .sizes()
        .into_iter()
        .map(|s| {
            let p = T::from_len(s) / n;
            -p * p.ln()
        })
        .sum();
    IndexValue::new(IndexId::Entropy, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::Method;

    fn cl(g: &[usize]) -> Clustering {
        Clustering::from_groups(g, Method::Pam, 0)
    }

    /// 2+2 points, within dissimilarity `w`, between `b`.
    fn blocks(w: f64, b: f64) -> DissimilarityMatrix<f64> {
        let g = [0, 0, 1, 1];
        DissimilarityMatrix::from_fn(4, |i, j| Ok(if g[i] == g[j] { w } else { b })).unwrap()
    }

    #[test]
    fn ave_within_examples() {
        let d = DissimilarityMatrix::from_fn(7, |_, _| Ok(2.5f64)).unwrap();
        assert!((ave_within(&d, &cl(&[0, 0, 0, 1, 1, 2, 2])).unwrap().raw - 2.5).abs() < 1e-12);
        assert_eq!(ave_within(&d, &cl(&[0, 1, 2, 3, 4, 5, 6])).unwrap().raw, 0.0);
        let d = DissimilarityMatrix::from_condensed(3, vec![2.0f64, 7.0, 9.0]).unwrap();
        assert!((ave_within(&d, &cl(&[0, 0, 1])).unwrap().raw - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn separation_examples() {
        let g: Vec<usize> = (0..20).map(|i| i / 10).collect();
        let d = DissimilarityMatrix::from_fn(20, |i, j| Ok(if g[i] == g[j] { 0.5 } else { 4.0 })).unwrap();
        assert_eq!(separation_index(&d, &cl(&g), 0.1).unwrap().raw, 4.0);
        let d = DissimilarityMatrix::from_condensed(2, vec![5.0]).unwrap();
        assert_eq!(separation_index(&d, &cl(&[0, 1]), 1.0).unwrap().raw, 5.0);
        assert!(matches!(separation_index(&d, &cl(&[0, 0]), 0.1), Err(Error::UndefinedIndex(..))));
        // Points on a line: clusters {0,1,2}, {10,11}, {30}; p = 0.5.
        // Borders: {10, 9, 8} -> floor(1.5)=1 -> 8; {8, 9} -> 1 -> 8; {19} -> 19.
        let x = [0.0, 1.0, 2.0, 10.0, 11.0, 30.0];
        let d = DissimilarityMatrix::from_fn(6, |i, j| Ok(f64::abs(x[i] - x[j]))).unwrap();
        let s = separation_index(&d, &cl(&[0, 0, 0, 1, 1, 2]), 0.5).unwrap().raw;
        assert!((s - 35.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_gamma_examples() {
        assert!((pearson_gamma(&blocks(1.0, 3.0), &cl(&[0, 0, 1, 1])).unwrap().raw - 1.0).abs() < 1e-12);
        assert!((pearson_gamma(&blocks(3.0, 1.0), &cl(&[0, 0, 1, 1])).unwrap().raw + 1.0).abs() < 1e-12);
        let d = DissimilarityMatrix::from_condensed(3, vec![1.0f64, 2.0, 2.0]).unwrap();
        assert!((pearson_gamma(&d, &cl(&[0, 0, 1])).unwrap().raw - 1.0).abs() < 1e-12);
        assert!(pearson_gamma(&d, &cl(&[0, 0, 0])).is_err());
        assert!(pearson_gamma(&d, &cl(&[0, 1, 2])).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert!((entropy::<f64>(&cl(&[0, 0, 1, 1])).raw - 2f64.ln()).abs() < 1e-15);
        assert_eq!(entropy::<f64>(&cl(&[0, 0, 0])).raw, 0.0);
        assert!((entropy::<f64>(&cl(&[0, 1, 1, 1])).raw - 0.562_335_144_618_394_2).abs() < 1e-12);
    }
}
