//! Invariants of the feature, calibration, survey and embedding stages.

mod common;

use clusterval::calibration::{calibrate_values, composite, WeightProfile};
use clusterval::dissim::DissimilarityMatrix;
use clusterval::features::{
    derive_composition, fit_shift_constant, log_shift, per90, standardize_mad_median, standardize_pooled, SeasonPair,
    ShiftChoice,
};
use clusterval::indexes::{ari, IndexId};
use clusterval::mds::classical_mds;
use clusterval::survey::{
    appendix_design, default_weight_grid, selection_scores, spearman, weight_search, ExpertResponse, ResponseSet,
};
use clusterval::seed::rng_from_seed;
use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn ols_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 1e-12).then(|| sxy / sxx)
}

fn slope_for(pairs: &[SeasonPair<f64>], t: impl Fn(f64) -> f64) -> Option<f64> {
    let x: Vec<f64> = pairs
        .iter()
        .map(|p| (p.minutes1 * t(p.x1) + p.minutes2 * t(p.x2)) / (p.minutes1 + p.minutes2))
        .collect();
    let y: Vec<f64> = pairs.iter().map(|p| (t(p.x2) - t(p.x1)).abs()).collect();
    ols_slope(&x, &y)
}

fn season_pairs(seed: u64, multiplicative: bool) -> Vec<SeasonPair<f64>> {
    let mut rng = rng_from_seed(seed);
    (0..80)
        .map(|_| {
            let x1: f64 = 10f64.powf(rng.gen_range(-1.0..1.0));
            let e: f64 = rng.gen_range(-0.3..0.3);
            let x2 = if multiplicative { x1 * e.exp() } else { (x1 + e).max(0.0) };
            SeasonPair { x1, x2, minutes1: rng.gen_range(500.0..3000.0), minutes2: rng.gen_range(500.0..3000.0) }
        })
        .collect()
}

#[test]
fn shift_constant_minimises_the_slope_over_the_grid() {
    let grid = [0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0];
    for seed in 0..10 {
        for multiplicative in [true, false] {
            let pairs = season_pairs(seed, multiplicative);
            let choice = fit_shift_constant(&pairs, &grid).unwrap();
            let slopes: Vec<f64> =
                grid.iter().map(|&c| slope_for(&pairs, |x| (x + c).ln()).unwrap().abs()).collect();
            let best = slopes.iter().copied().fold(f64::INFINITY, f64::min);
            match choice {
                ShiftChoice::Log(c) => {
                    let i = grid.iter().position(|&g| g == c).expect("choice from the grid");
                    assert!(slopes[i] <= best + 1e-12);
                    assert!(slopes[..i].iter().all(|&s| s > slopes[i] - 1e-12), "ties go to smaller c");
                }
                ShiftChoice::Identity => {
                    assert!(slope_for(&pairs, |x| x).unwrap().abs() < best);
                }
            }
            if multiplicative {
                assert!(matches!(choice, ShiftChoice::Log(c) if c <= 0.1), "seed {seed}: {choice:?}");
            }
        }
    }
}

#[test]
fn additive_noise_prefers_weak_transforms() {
    let grid = [0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0];
    let pairs = season_pairs(3, false);
    let choice = fit_shift_constant(&pairs, &grid).unwrap();
    assert!(matches!(choice, ShiftChoice::Identity | ShiftChoice::Log(5.0)), "{choice:?}");
}

proptest! {
    #[test]
    fn per90_is_linear(count in 0.0f64..500.0, minutes in 1.0f64..4000.0, a in 0.0f64..10.0) {
        let base = per90(count, minutes).unwrap();
        prop_assert!((per90(a * count, minutes).unwrap() - a * base).abs() <= 1e-9 * (1.0 + a * base));
    }

    #[test]
    fn compositions_sum_to_one(subs in prop::collection::vec(0.0f64..50.0, 1..6)) {
        let top: f64 = subs.iter().sum();
        match derive_composition(top, &subs).unwrap() {
            Some(p) => prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12),
            None => prop_assert_eq!(top, 0.0),
        }
    }

    #[test]
    fn log_shift_is_monotone(x in 0.0f64..100.0, y in 0.0f64..100.0, c in 0.01f64..5.0) {
        prop_assume!(x < y);
        prop_assert!(log_shift(x, c).unwrap() < log_shift(y, c).unwrap());
    }

    #[test]
    fn standardised_columns_have_unit_mean_absolute_deviation(xs in prop::collection::vec(-100.0f64..100.0, 2..40)) {
        let col: Vec<Option<f64>> = xs.iter().map(|&x| Some(x)).collect();
        if let Ok(s) = standardize_mad_median("x", &col) {
            let v: Vec<f64> = s.values.iter().flatten().copied().collect();
            let mut sorted = v.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let m = sorted.len();
            let med = if m % 2 == 1 { sorted[m / 2] } else { 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]) };
            prop_assert!(med.abs() < 1e-9);
            let mad = v.iter().map(|x| x.abs()).sum::<f64>() / m as f64;
            prop_assert!((mad - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn pooled_members_share_one_scale(a in prop::collection::vec(0.0f64..1.0, 3..20), b in prop::collection::vec(0.0f64..1.0, 3..20)) {
        let cols = vec![a.iter().map(|&x| Some(x)).collect(), b.iter().map(|&x| Some(x)).collect()];
        if let Ok(s) = standardize_pooled("g", &cols) {
            prop_assert_eq!(s[0].scale, s[1].scale);
            let pooled: f64 = s.iter().flat_map(|c| c.values.iter().flatten().map(|x| x.abs())).sum::<f64>()
                / (a.len() + b.len()) as f64;
            prop_assert!((pooled - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn calibrated_values_are_standardised(xs in prop::collection::vec(-1e3f64..1e3, 2..60)) {
        if let Ok((v, _, _)) = calibrate_values(IndexId::Entropy, "all", &xs) {
            let m = v.len() as f64;
            let mean = v.iter().sum::<f64>() / m;
            let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
            prop_assert!(mean.abs() < 1e-9);
            prop_assert!((sd - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn composite_is_a_weighted_mean(vals in prop::array::uniform5(-3.0f64..3.0), w in prop::array::uniform5(0.0f64..2.0), scale in 0.1f64..10.0) {
        prop_assume!(w.iter().sum::<f64>() > 0.01);
        let p = WeightProfile::new("p", w).unwrap();
        let q = WeightProfile::new("q", w.map(|x| x * scale)).unwrap();
        let v = vals.map(Some);
        let a = composite(&v, &p).unwrap();
        prop_assert!((a - composite(&v, &q).unwrap()).abs() < 1e-9);
        let used: Vec<f64> = vals.iter().zip(&w).filter(|(_, &wi)| wi > 0.0).map(|(x, _)| *x).collect();
        prop_assert!(a >= used.iter().copied().fold(f64::INFINITY, f64::min) - 1e-12);
        prop_assert!(a <= used.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1e-12);
    }

    #[test]
    fn spearman_ignores_monotone_transforms(xs in prop::collection::vec(-10.0f64..10.0, 3..30), seed in 0u64..1000) {
        let mut rng = rng_from_seed(seed);
        let ys: Vec<f64> = xs.iter().map(|x| x + rng.gen_range(-5.0..5.0)).collect();
        if let Ok(r) = spearman(&xs, &ys) {
            let tx: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
            let ty: Vec<f64> = ys.iter().map(|y| 3.0 * y.powi(3) + 1.0).collect();
            prop_assert!((spearman(&tx, &ty).unwrap() - r).abs() < 1e-12);
            prop_assert!((spearman(&ys, &xs).unwrap() - r).abs() < 1e-12);
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&r));
        }
    }

    #[test]
    fn ari_ignores_label_names_and_order(seed in 0u64..10_000, n in 2usize..30) {
        let mut rng = rng_from_seed(seed);
        let k1 = rng.gen_range(1..=n);
        let k2 = rng.gen_range(1..=n);
        let a = random_groups(seed, n, k1);
        let b = random_groups(seed + 1, n, k2);
        let renamed: Vec<usize> = a.iter().map(|&l| 100 - l).collect();
        let x: f64 = ari(&clustering(&a), &clustering(&b)).unwrap();
        prop_assert_eq!(x, ari::<f64>(&clustering(&b), &clustering(&a)).unwrap());
        prop_assert_eq!(x, ari::<f64>(&clustering(&renamed), &clustering(&b)).unwrap());
        prop_assert!(x <= 1.0 + 1e-12);
    }
}

fn random_responses(seed: u64, experts: usize) -> ResponseSet {
    let design = appendix_design();
    let mut rng = rng_from_seed(seed);
    let responses = (0..experts)
        .map(|e| ExpertResponse {
            expert: format!("E{e}"),
            ranks: design
                .questions
                .iter()
                .map(|q| {
                    let mut r: Vec<usize> = (1..=q.choice_count).collect();
                    r.shuffle(&mut rng);
                    r
                })
                .collect(),
        })
        .collect();
    ResponseSet { responses }
}

#[test]
fn selection_scores_add_over_experts() {
    let design = appendix_design();
    for seed in 0..20 {
        let all = random_responses(seed, 6);
        let whole = selection_scores(&design, &all).unwrap();
        let mut sum = vec![0u32; design.selections.len()];
        for r in &all.responses {
            let single = selection_scores(&design, &ResponseSet { responses: vec![r.clone()] }).unwrap();
            for (s, v) in sum.iter_mut().zip(single.totals()) {
                *s += v;
            }
        }
        assert_eq!(whole.totals(), sum);
        // Every expert distributes the same number of points over the questions.
        for row in &whole.scores {
            assert!(row.iter().all(|&v| (7 * 6..=7 * 30).contains(&v)));
        }
    }
}

#[test]
fn weight_search_ignores_rescaled_scores() {
    let (cands, sels, scores) = weight_search_fixture();
    let grid = default_weight_grid();
    let a = weight_search(&cands, &sels, &scores, &grid).unwrap();
    let shifted: Vec<f64> = scores.iter().map(|s| 0.5 * s - 40.0).collect();
    let b = weight_search(&cands, &sels, &shifted, &grid).unwrap();
    assert_eq!(a.best, b.best);
    assert_eq!(a.correlation, b.correlation);
}

#[test]
fn weight_search_finds_the_monotone_index() {
    let (cands, sels, scores) = weight_search_fixture();
    let r = weight_search(&cands, &sels, &scores, &default_weight_grid()).unwrap();
    assert_eq!(r.correlation, 1.0);
    assert!(r.best[3] > 0.0);
    assert!(r.best.iter().enumerate().all(|(j, &w)| j == 3 || w == 0.0), "{:?}", r.best);
}

#[test]
fn mds_recovers_planar_configurations() {
    for (seed, n) in [(1u64, 10usize), (2, 40), (3, 100)] {
        let pts = random_points(seed, n, 2);
        let d = DissimilarityMatrix::from_points(&pts).unwrap();
        let e = classical_mds(&d, 2).unwrap();
        let back = DissimilarityMatrix::from_points(&e.coordinates).unwrap();
        let err = d.condensed().iter().zip(back.condensed()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "n={n}: {err}");
        assert!(e.clamped_mass.abs() < 1e-9);
    }
}
