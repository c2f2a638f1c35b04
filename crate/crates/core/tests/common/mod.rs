//! Slow reference implementations written directly from the definitions.
#![allow(dead_code)]

use clusterval::cluster::{medoid_objective, Clustering, Linkage, Method};
use clusterval::dissim::DissimilarityMatrix;
use clusterval::indexes::{ari, asw, ave_within, ch, dunn, entropy, pearson_gamma, separation_index};
use clusterval::seed::rng_from_seed;
use clusterval::survey::{Candidate, Selection};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn random_points(seed: u64, n: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect()
}

pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Labels with exactly `k` nonempty groups in random order.
pub fn random_groups(seed: u64, n: usize, k: usize) -> Vec<usize> {
    let mut rng = rng_from_seed(seed);
    let mut g: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect();
    g.shuffle(&mut rng);
    g
}

pub fn clustering(g: &[usize]) -> Clustering {
    Clustering::from_groups(g, Method::Pam, 0)
}

pub fn naive_ave_within(d: &DissimilarityMatrix<f64>, g: &[usize]) -> f64 {
    let n = g.len();
    let mut total = 0.0;
    for i in 0..n {
        let own: Vec<usize> = (0..n).filter(|&j| j != i && g[j] == g[i]).collect();
        if !own.is_empty() {
            total += own.iter().map(|&j| d.get(i, j)).sum::<f64>() / own.len() as f64;
        }
    }
    total / n as f64
}

pub fn naive_separation(d: &DissimilarityMatrix<f64>, g: &[usize], p: f64) -> f64 {
    let n = g.len();
    let mut labels: Vec<usize> = g.to_vec();
    labels.sort_unstable();
    labels.dedup();
    let (mut sum, mut count) = (0.0, 0usize);
    for &l in &labels {
        let mut border: Vec<f64> = (0..n)
            .filter(|&i| g[i] == l)
            .map(|i| (0..n).filter(|&j| g[j] != l).map(|j| d.get(i, j)).fold(f64::INFINITY, f64::min))
            .collect();
        border.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let take = ((p * border.len() as f64).floor() as usize).max(1);
        sum += border[..take].iter().sum::<f64>();
        count += take;
    }
    sum / count as f64
}

pub fn naive_pearson_gamma(d: &DissimilarityMatrix<f64>, g: &[usize]) -> f64 {
    let n = g.len();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            x.push(d.get(i, j));
            y.push(if g[i] != g[j] { 1.0 } else { 0.0 });
        }
    }
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    sxy / (sxx * syy).sqrt()
}

pub fn naive_entropy(g: &[usize]) -> f64 {
    let n = g.len() as f64;
    let mut counts = std::collections::BTreeMap::new();
    for &l in g {
        *counts.entry(l).or_insert(0usize) += 1;
    }
    counts.values().map(|&c| -(c as f64 / n) * (c as f64 / n).ln()).sum()
}

pub fn naive_asw(d: &DissimilarityMatrix<f64>, g: &[usize]) -> f64 {
    let n = g.len();
    let mut labels: Vec<usize> = g.to_vec();
    labels.sort_unstable();
    labels.dedup();
    let mean_to = |i: usize, l: usize| -> (f64, usize) {
        let others: Vec<usize> = (0..n).filter(|&j| j != i && g[j] == l).collect();
        (others.iter().map(|&j| d.get(i, j)).sum::<f64>() / others.len().max(1) as f64, others.len())
    };
    let mut total = 0.0;
    for i in 0..n {
        let (a, own) = mean_to(i, g[i]);
        if own == 0 {
            continue;
        }
        let b = labels.iter().filter(|&&l| l != g[i]).map(|&l| mean_to(i, l).0).fold(f64::INFINITY, f64::min);
        if a.max(b) > 0.0 {
            total += (b - a) / a.max(b);
        }
    }
    total / n as f64
}

/// Calinski-Harabasz from centroids of Euclidean points.
pub fn centroid_ch(pts: &[Vec<f64>], g: &[usize]) -> f64 {
    let n = pts.len();
    let dim = pts[0].len();
    let centroid = |idx: &[usize]| -> Vec<f64> {
        (0..dim).map(|c| idx.iter().map(|&i| pts[i][c]).sum::<f64>() / idx.len() as f64).collect()
    };
    let all: Vec<usize> = (0..n).collect();
    let grand = centroid(&all);
    let mut labels: Vec<usize> = g.to_vec();
    labels.sort_unstable();
    labels.dedup();
    let k = labels.len();
    let (mut b, mut w) = (0.0, 0.0);
    for &l in &labels {
        let idx: Vec<usize> = (0..n).filter(|&i| g[i] == l).collect();
        let c = centroid(&idx);
        b += idx.len() as f64 * sq_dist(&c, &grand);
        w += idx.iter().map(|&i| sq_dist(&pts[i], &c)).sum::<f64>();
    }
    (b / (k - 1) as f64) / (w / (n - k) as f64)
}

pub fn naive_dunn(d: &DissimilarityMatrix<f64>, g: &[usize]) -> f64 {
    let n = g.len();
    let mut labels: Vec<usize> = g.to_vec();
    labels.sort_unstable();
    labels.dedup();
    let mut min_link = f64::INFINITY;
    let mut max_diam: f64 = 0.0;
    for &a in &labels {
        for &b in &labels {
            for i in (0..n).filter(|&i| g[i] == a) {
                for j in (0..n).filter(|&j| g[j] == b) {
                    if a == b {
                        max_diam = max_diam.max(d.get(i, j));
                    } else {
                        min_link = min_link.min(d.get(i, j));
                    }
                }
            }
        }
    }
    min_link / max_diam
}

/// Adjusted Rand index from the four pair counts.
pub fn pair_count_ari(a: &[usize], b: &[usize]) -> Option<f64> {
    let n = a.len();
    let (mut n11, mut n10, mut n01, mut n00) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            match (a[i] == a[j], b[i] == b[j]) {
                (true, true) => n11 += 1.0,
                (true, false) => n10 += 1.0,
                (false, true) => n01 += 1.0,
                (false, false) => n00 += 1.0,
            }
        }
    }
    let den = (n11 + n10) * (n10 + n00) + (n11 + n01) * (n01 + n00);
    (den > 0.0).then(|| 2.0 * (n11 * n00 - n10 * n01) / den)
}

/// Largest absolute difference between the library and the reference
/// implementations over `instances` random problems with n <= 12, and the
/// number of comparisons made.
pub fn index_oracle_max_error(instances: u64) -> (f64, usize) {
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    let mut record = |got: f64, want: f64, what: &str| {
        assert!(got.is_finite() && want.is_finite(), "{what}: {got} vs {want}");
        worst = worst.max((got - want).abs());
        compared += 1;
    };
    for case in 0..instances {
        let mut rng = rng_from_seed(10_000 + case);
        let n = rng.gen_range(3..=12);
        let k = rng.gen_range(2..n.min(6));
        let pts = random_points(20_000 + case, n, 1 + (case % 3) as usize);
        let euclid = DissimilarityMatrix::from_points(&pts).unwrap();
        // A non-metric dissimilarity exercises everything except CH.
        let values: Vec<f64> = (0..n * (n - 1) / 2).map(|_| rng.gen_range(0.1..10.0)).collect();
        let raw = DissimilarityMatrix::from_condensed(n, values).unwrap();
        let g = random_groups(30_000 + case, n, k);
        let h = random_groups(40_000 + case, n, rng.gen_range(1..=n));
        let c = clustering(&g);
        for (name, d) in [("euclid", &euclid), ("raw", &raw)] {
            let tag = |i: &str| format!("case {case} {name} {i}");
            record(ave_within(d, &c).unwrap().raw, naive_ave_within(d, &g), &tag("ave_within"));
            for p in [0.1, 0.5, 1.0] {
                record(separation_index(d, &c, p).unwrap().raw, naive_separation(d, &g, p), &tag("sep"));
            }
            record(pearson_gamma(d, &c).unwrap().raw, naive_pearson_gamma(d, &g), &tag("pearson_gamma"));
            record(asw(d, &c).unwrap().raw, naive_asw(d, &g), &tag("asw"));
            record(dunn(d, &c).unwrap().raw, naive_dunn(d, &g), &tag("dunn"));
        }
        record(ch(&euclid, &c).unwrap().raw, centroid_ch(&pts, &g), &format!("case {case} ch"));
        record(entropy::<f64>(&c).raw, naive_entropy(&g), &format!("case {case} entropy"));
        if let Some(want) = pair_count_ari(&g, &h) {
            record(ari::<f64>(&c, &clustering(&h)).unwrap(), want, &format!("case {case} ari"));
        }
    }
    (worst, compared)
}

/// Cluster-to-cluster distance straight from the linkage definition.
pub fn linkage_distance(
    link: Linkage,
    pts: &[Vec<f64>],
    d: &DissimilarityMatrix<f64>,
    a: &[usize],
    b: &[usize],
) -> f64 {
    let pairs = a.iter().flat_map(|&i| b.iter().map(move |&j| (i, j)));
    match link {
        Linkage::Single => pairs.map(|(i, j)| d.get(i, j)).fold(f64::INFINITY, f64::min),
        Linkage::Complete => pairs.map(|(i, j)| d.get(i, j)).fold(0.0, f64::max),
        Linkage::Average => pairs.map(|(i, j)| d.get(i, j)).sum::<f64>() / (a.len() * b.len()) as f64,
        Linkage::Ward => {
            // Merge height from the increase in the within-cluster sum of squares.
            let centroid = |s: &[usize]| -> Vec<f64> {
                let mut c = vec![0.0; pts[0].len()];
                for &i in s {
                    for (cv, pv) in c.iter_mut().zip(&pts[i]) {
                        *cv += pv / s.len() as f64;
                    }
                }
                c
            };
            let ess = |s: &[usize]| -> f64 {
                let c = centroid(s);
                s.iter().map(|&i| sq_dist(&pts[i], &c)).sum()
            };
            let merged: Vec<usize> = a.iter().chain(b).copied().collect();
            (2.0 * (ess(&merged) - ess(a) - ess(b))).max(0.0).sqrt()
        }
    }
}

/// O(n^3) agglomeration: merge heights and the partition after every step.
pub fn naive_agglomeration(
    link: Linkage,
    pts: &[Vec<f64>],
    d: &DissimilarityMatrix<f64>,
) -> (Vec<f64>, Vec<Vec<usize>>) {
    let n = d.n();
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut heights = Vec::new();
    let mut partitions = Vec::new();
    while clusters.len() > 1 {
        let mut best = (0, 1, f64::INFINITY);
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let v = linkage_distance(link, pts, d, &clusters[a], &clusters[b]);
                if v < best.2 {
                    best = (a, b, v);
                }
            }
        }
        let (a, b, h) = best;
        let moved = clusters.remove(b);
        clusters[a].extend(moved);
        heights.push(h);
        let mut labels = vec![0; n];
        for (c, members) in clusters.iter().enumerate() {
            for &i in members {
                labels[i] = c;
            }
        }
        partitions.push(labels);
    }
    (heights, partitions)
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n)
        .flat_map(|last| {
            combinations(last, k - 1).into_iter().map(move |mut c| {
                c.push(last);
                c
            })
        })
        .collect()
}

pub fn exhaustive_medoid_objective(d: &DissimilarityMatrix<f64>, k: usize) -> f64 {
    combinations(d.n(), k).iter().map(|m| medoid_objective(d, m)).fold(f64::INFINITY, f64::min)
}

/// Two groups of `size` points on a line: within-group dissimilarities at most
/// 0.1, between-group at least 10.
pub fn two_groups(seed: u64, size: usize) -> (DissimilarityMatrix<f64>, Vec<usize>) {
    let mut rng = rng_from_seed(seed);
    let mut x = Vec::new();
    let mut g = Vec::new();
    for grp in 0..2 {
        for _ in 0..size {
            x.push(grp as f64 * 12.0 + rng.gen_range(0.0..0.1));
            g.push(grp);
        }
    }
    let d = DissimilarityMatrix::from_fn(x.len(), |i, j| Ok(f64::abs(x[i] - x[j]))).unwrap();
    (d, g)
}

/// Eight single-method selections with two or three candidates each. Entropy
/// (aspect 3) rises with the sum scores; the other aspects are noise.
pub fn weight_search_fixture() -> (Vec<Candidate<f64>>, Vec<Selection>, Vec<f64>) {
    let sum_scores = [1870.0, 1780.0, 1822.0, 1942.0, 1774.0, 1896.0, 1531.0, 1797.0];
    let mut order: Vec<usize> = (0..8).collect();
    order.sort_by(|&a, &b| sum_scores[a].partial_cmp(&sum_scores[b]).unwrap());
    let mut rng = rng_from_seed(314);
    let mut selections = Vec::new();
    let mut candidates = Vec::new();
    for s in 0..8 {
        let level = order.iter().position(|&o| o == s).unwrap() as f64;
        let first = 2 + 3 * s;
        let size = 2 + s % 2;
        selections.push(Selection { id: format!("S{}", s + 1), method: Method::Ward, k_ranges: vec![(first, first + size - 1)] });
        for k in first..first + size {
            let mut aspects = [0.0; 5].map(|_: f64| Some(rng.gen_range(-2.0..2.0)));
            aspects[3] = Some(level - rng.gen_range(0.0..0.5));
            candidates.push(Candidate { method: Method::Ward, k, aspects });
        }
    }
    (candidates, selections, sum_scores.to_vec())
}
