//! Expert survey evaluation: rank scoring, a Monte Carlo test against random
//! rankings, and a search for index weights that agree with the experts.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::{composite, CalibratedPanel, IndexPanel, WeightProfile};
use crate::cluster::Method;
use crate::error::{Error, Result};
use crate::scalar::{mean_sd, pearson, Scalar};
use crate::seed::{derive_seed, rng_from_seed};

/// Score for giving `rank` to one of `choice_count` choices.
pub fn score_rank(choice_count: usize, rank: usize) -> Result<u32> {
    let table: &[u32] = match choice_count {
        5 => &[30, 24, 18, 12, 6],
        3 => &[30, 20, 10],
        2 => &[30, 15],
        _ => return Err(Error::invalid(format!("questions must have 2, 3 or 5 choices, got {choice_count}"))),
    };
    if rank == 0 || rank > choice_count {
        return Err(Error::invalid(format!("rank {rank} outside 1..={choice_count}")));
    }
    Ok(table[rank - 1])
}

/// A family of clusterings (one method, several K ranges) that put the
/// surveyed players into the same groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Selection {
    pub id: String,
    pub method: Method,
    /// Inclusive K ranges.
    pub k_ranges: Vec<(usize, usize)>,
}

impl Selection {
    pub fn contains(&self, method: Method, k: usize) -> bool {
        method == self.method && self.k_ranges.iter().any(|&(a, b)| a <= k && k <= b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Question {
    pub choice_count: usize,
    /// Selection id to choice number (1-based).
    pub choices: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurveyDesign {
    pub selections: Vec<Selection>,
    pub questions: Vec<Question>,
}

impl SurveyDesign {
    pub fn validate(&self) -> Result<()> {
        if self.selections.is_empty() || self.questions.is_empty() {
            return Err(Error::invalid("survey design needs selections and questions"));
        }
        for (qi, q) in self.questions.iter().enumerate() {
            score_rank(q.choice_count, 1)?;
            for s in &self.selections {
                match q.choices.get(&s.id) {
                    Some(&c) if (1..=q.choice_count).contains(&c) => {}
                    Some(&c) => {
                        return Err(Error::invalid(format!(
                            "question {}: choice {c} for selection {} outside 1..={}",
                            qi + 1,
                            s.id,
                            q.choice_count
                        )))
                    }
                    None => return Err(Error::invalid(format!("question {} does not map selection {}", qi + 1, s.id))),
                }
            }
            if q.choices.len() != self.selections.len() {
                return Err(Error::invalid(format!("question {} maps unknown selections", qi + 1)));
            }
        }
        Ok(())
    }

    /// Zero-based choice of every selection, per question.
    fn choice_table(&self) -> Vec<Vec<usize>> {
        self.questions
            .iter()
            .map(|q| self.selections.iter().map(|s| q.choices[&s.id] - 1).collect())
            .collect()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let d: Self = load_json(path)?;
        d.validate().map_err(|e| Error::schema(path, e.to_string()))?;
        Ok(d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpertResponse {
    pub expert: String,
    /// `ranks[q][c]`: rank given to choice `c + 1` of question `q + 1`.
    pub ranks: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseSet {
    pub responses: Vec<ExpertResponse>,
}

impl ResponseSet {
    pub fn validate(&self, design: &SurveyDesign) -> Result<()> {
        for r in &self.responses {
            if r.ranks.len() != design.questions.len() {
                return Err(Error::invalid(format!(
                    "expert `{}` answered {} questions, design has {}",
                    r.expert,
                    r.ranks.len(),
                    design.questions.len()
                )));
            }
            for (qi, (ranks, q)) in r.ranks.iter().zip(&design.questions).enumerate() {
                let mut sorted = ranks.clone();
                sorted.sort_unstable();
                if sorted != (1..=q.choice_count).collect::<Vec<_>>() {
                    return Err(Error::invalid(format!(
                        "expert `{}`, question {}: ranks {ranks:?} are not a permutation of 1..={}",
                        r.expert,
                        qi + 1,
                        q.choice_count
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Experts x selections score matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreMatrix {
    pub selections: Vec<String>,
    pub experts: Vec<String>,
    pub scores: Vec<Vec<u32>>,
    /// Totals as printed alongside the matrix, when it comes from a publication.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub published_totals: Option<Vec<u32>>,
}

impl ScoreMatrix {
    pub fn validate(&self) -> Result<()> {
        if self.scores.len() != self.experts.len() {
            return Err(Error::invalid("score matrix needs one row per expert"));
        }
        if self.scores.iter().any(|r| r.len() != self.selections.len()) {
            return Err(Error::invalid("score matrix rows must have one entry per selection"));
        }
        Ok(())
    }

    /// Column sums.
    pub fn totals(&self) -> Vec<u32> {
        (0..self.selections.len()).map(|j| self.scores.iter().map(|r| r[j]).sum()).collect()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let m: Self = load_json(path)?;
        m.validate().map_err(|e| Error::schema(path, e.to_string()))?;
        Ok(m)
    }
}

fn load_json<D: serde::de::DeserializeOwned>(path: &Path) -> Result<D> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.into(), source })
}

/// Per-expert scores of every selection, summed over questions.
pub fn selection_scores(design: &SurveyDesign, responses: &ResponseSet) -> Result<ScoreMatrix> {
    design.validate()?;
    responses.validate(design)?;
    let table = design.choice_table();
    let scores = responses
        .responses
        .iter()
        .map(|r| {
            (0..design.selections.len())
                .map(|s| {
                    table.iter().zip(&design.questions).zip(&r.ranks).try_fold(0u32, |acc, ((choice, q), ranks)| {
                        Ok(acc + score_rank(q.choice_count, ranks[choice[s]])?)
                    })
                })
                .collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<_>>()?;
    Ok(ScoreMatrix {
        selections: design.selections.iter().map(|s| s.id.clone()).collect(),
        experts: responses.responses.iter().map(|r| r.expert.clone()).collect(),
        scores,
        published_totals: None,
    })
}

/// Sample variance of the selection totals.
pub fn totals_variance(totals: &[f64]) -> f64 {
    mean_sd(totals).map_or(0.0, |(_, sd)| sd * sd)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McResult {
    pub statistic: f64,
    pub n_sim: usize,
    /// Simulated statistics at least as large as the observed one.
    pub exceed: usize,
    pub p_value: f64,
}

pub const DEFAULT_N_SIM: usize = 2000;

/// Monte Carlo test of the observed selection totals against experts that
/// rank every question's choices uniformly at random.
pub fn mc_randomness_test(
    design: &SurveyDesign,
    n_experts: usize,
    observed_totals: &[f64],
    n_sim: usize,
    seed: u64,
) -> Result<McResult> {
    design.validate()?;
    if n_sim == 0 {
        return Err(Error::invalid("n_sim must be at least 1"));
    }
    if observed_totals.len() != design.selections.len() {
        return Err(Error::invalid(format!(
            "{} observed totals for {} selections",
            observed_totals.len(),
            design.selections.len()
        )));
    }
    let statistic = totals_variance(observed_totals);
    let table = design.choice_table();
    let n_sel = design.selections.len();
    let exceed = (0..n_sim)
        .into_par_iter()
        .map(|s| {
            let mut rng = rng_from_seed(derive_seed(seed, "survey-mc", &[s as u64]));
            let mut totals = vec![0.0; n_sel];
            let mut ranks: Vec<usize> = Vec::new();
            for _ in 0..n_experts {
                for (q, choice) in design.questions.iter().zip(&table) {
                    ranks.clear();
                    ranks.extend(1..=q.choice_count);
                    ranks.shuffle(&mut rng);
                    for (t, &c) in totals.iter_mut().zip(choice) {
                        *t += f64::from(score_rank(q.choice_count, ranks[c]).expect("validated design"));
                    }
                }
            }
            usize::from(totals_variance(&totals) >= statistic)
        })
        .sum::<usize>();
    Ok(McResult { statistic, n_sim, exceed, p_value: (1 + exceed) as f64 / (n_sim + 1) as f64 })
}

/// Average ranks (1-based), ties sharing the mean of their positions.
pub fn midranks<T: Scalar>(x: &[T]) -> Vec<T> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).expect("finite values"));
    let mut out = vec![T::zero(); x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && x[idx[j]] == x[idx[i]] {
            j += 1;
        }
        let r = T::lit((i + j + 1) as f64 / 2.0);
        for &p in &idx[i..j] {
            out[p] = r;
        }
        i = j;
    }
    out
}

/// Spearman rank correlation with midranks for ties.
pub fn spearman<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::invalid("spearman needs vectors of equal length"));
    }
    if x.len() < 3 {
        return Err(Error::invalid("spearman needs at least 3 values"));
    }
    pearson(&midranks(x), &midranks(y))
        .ok_or_else(|| Error::UndefinedIndex("spearman", "one of the vectors is constant".into()))
}

/// `{0, 0.25, 0.5, 1}^5` without the zero vector, last index varying fastest.
pub fn default_weight_grid() -> Vec<[f64; 5]> {
    const LEVELS: [f64; 4] = [0.0, 0.25, 0.5, 1.0];
    let mut grid = Vec::with_capacity(1023);
    for code in 1..LEVELS.len().pow(5) {
        let mut w = [0.0; 5];
        let mut c = code;
        for slot in w.iter_mut().rev() {
            *slot = LEVELS[c % 4];
            c /= 4;
        }
        grid.push(w);
    }
    grid
}

/// A regular clustering with its calibrated aspect index values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate<T> {
    pub method: Method,
    pub k: usize,
    pub aspects: [Option<T>; 5],
}

/// The regular candidates of a calibrated panel.
pub fn candidates<T: Scalar>(panel: &IndexPanel<T>, calibrated: &CalibratedPanel<T>) -> Vec<Candidate<T>> {
    panel
        .candidates()
        .map(|(r, row)| Candidate { method: row.method, k: row.k, aspects: calibrated.aspects(r) })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint<T> {
    pub weights: [f64; 5],
    /// `None` when the per-selection maxima are constant or a selection has
    /// no candidate with the required values.
    pub correlation: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightSearch<T> {
    pub best: [f64; 5],
    pub correlation: T,
    pub evaluated: Vec<GridPoint<T>>,
}

/// Per-selection maxima of the composite index under `w`.
pub fn selection_maxima<T: Scalar>(
    candidates: &[Candidate<T>],
    selections: &[Selection],
    w: &WeightProfile,
) -> Option<Vec<T>> {
    selections
        .iter()
        .map(|s| {
            candidates
                .iter()
                .filter(|c| s.contains(c.method, c.k))
                .filter_map(|c| composite(&c.aspects, w).ok())
                .reduce(T::max)
        })
        .collect()
}

/// Grid search for the weights whose per-selection maximal composite index has
/// the largest Spearman correlation with the expert sum scores. The first grid
/// point wins ties.
pub fn weight_search<T: Scalar>(
    candidates: &[Candidate<T>],
    selections: &[Selection],
    sum_scores: &[f64],
    grid: &[[f64; 5]],
) -> Result<WeightSearch<T>> {
    if grid.is_empty() {
        return Err(Error::invalid("weight grid is empty"));
    }
    if sum_scores.len() != selections.len() {
        return Err(Error::invalid(format!("{} sum scores for {} selections", sum_scores.len(), selections.len())));
    }
    for s in selections {
        if !candidates.iter().any(|c| s.contains(c.method, c.k)) {
            return Err(Error::invalid(format!("selection {} has no candidate clustering in the panel", s.id)));
        }
    }
    let scores: Vec<T> = sum_scores.iter().map(|&v| T::lit(v)).collect();
    let evaluated: Vec<GridPoint<T>> = grid
        .par_iter()
        .map(|&weights| {
            let w = WeightProfile::new("grid", weights)?;
            let correlation =
                selection_maxima(candidates, selections, &w).and_then(|m| spearman(&m, &scores).ok());
            Ok(GridPoint { weights, correlation })
        })
        .collect::<Result<_>>()?;
    let mut best: Option<(usize, T)> = None;
    for (i, g) in evaluated.iter().enumerate() {
        if let Some(c) = g.correlation {
            if best.is_none_or(|(_, b)| c > b) {
                best = Some((i, c));
            }
        }
    }
    let (i, correlation) =
        best.ok_or_else(|| Error::UndefinedIndex("spearman", "undefined for every grid point".into()))?;
    Ok(WeightSearch { best: evaluated[i].weights, correlation, evaluated })
}

/// The survey design of the published study (seven questions, eight selections).
pub fn appendix_design() -> SurveyDesign {
    serde_json::from_str(include_str!("../../fixtures/appendix_design.json")).expect("bundled design parses")
}

/// The published expert score matrix (13 experts x 8 selections).
pub fn published_scores() -> ScoreMatrix {
    serde_json::from_str(include_str!("../../fixtures/expert_scores.json")).expect("bundled scores parse")
}
