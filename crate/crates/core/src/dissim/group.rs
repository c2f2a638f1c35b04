//! Group-wise dissimilarities and their aggregation into the final matrix.

use super::matrix::DissimilarityMatrix;
use super::position::geco_position;
use crate::error::{Error, Result};
use crate::features::{CompositionBlock, FeatureTable};
use crate::scalar::{mean_sd, Scalar};

/// Column weights of the quantitative group and the compositions among them.
#[derive(Debug, Clone)]
pub struct L1Layout<'a, T> {
    pub weights: &'a [T],
    pub compositions: &'a [CompositionBlock<T>],
}

/// One player's quantitative variables plus, per composition, whether its
/// top-level count was zero.
#[derive(Debug, Clone, Copy)]
pub struct QuantRow<'a, T> {
    pub values: &'a [Option<T>],
    pub zero_top: &'a [bool],
}

/// Weighted L1 distance over commonly observed variables. When either player
/// has a zero top-level count for a composition, that composition's weight
/// moves onto the top-level variable for this pair.
pub fn quantitative_l1<T: Scalar>(
    layout: &L1Layout<'_, T>,
    a: QuantRow<'_, T>,
    b: QuantRow<'_, T>,
) -> Option<T> {
    let mut weights = layout.weights.to_vec();
    for (k, block) in layout.compositions.iter().enumerate() {
        if a.zero_top[k] || b.zero_top[k] {
            for &m in &block.members {
                weights[m] = T::zero();
            }
            weights[block.parent] = weights[block.parent] + block.weight;
        }
    }
    let mut total = T::zero();
    let mut observed = false;
    for ((w, x), y) in weights.iter().zip(a.values).zip(b.values) {
        if let (Some(x), Some(y)) = (x, y) {
            observed = true;
            total = total + *w * (*x - *y).abs();
        }
    }
    observed.then_some(total)
}

/// Sum of absolute differences of standardised league score and team points.
pub fn league_team_dissim<T: Scalar>(a: (T, T), b: (T, T)) -> T {
    (a.0 - b.0).abs() + (a.1 - b.1).abs()
}

#[derive(Debug, Clone)]
pub struct GroupDissimilarity<T> {
    pub matrix: DissimilarityMatrix<T>,
    pub weight: T,
}

impl<T: Scalar> GroupDissimilarity<T> {
    /// Sample standard deviation over all pairwise values.
    pub fn spread(&self) -> Option<T> {
        mean_sd(self.matrix.condensed()).map(|(_, s)| s)
    }
}

/// `sum_k w_k * d_k / s_k`, with `s_k` the standard deviation of all pairwise
/// values of group `k`.
pub fn aggregate_final<T: Scalar>(groups: &[GroupDissimilarity<T>]) -> Result<DissimilarityMatrix<T>> {
    let first = groups.first().ok_or_else(|| Error::invalid("no dissimilarity groups"))?;
    let n = first.matrix.n();
    if groups.iter().any(|g| g.matrix.n() != n) {
        return Err(Error::invalid("dissimilarity groups differ in size"));
    }
    let mut factors = Vec::with_capacity(groups.len());
    for (k, g) in groups.iter().enumerate() {
        if g.weight < T::zero() {
            return Err(Error::invalid("group weights must be nonnegative"));
        }
        match g.spread() {
            Some(s) if s > T::zero() => factors.push(g.weight / s),
            _ => return Err(Error::DegenerateGroup(k + 1)),
        }
    }
    let len = first.matrix.condensed().len();
    let values = (0..len)
        .map(|p| groups.iter().zip(&factors).map(|(g, &f)| f * g.matrix.condensed()[p]).sum())
        .collect();
    DissimilarityMatrix::from_condensed(n, values)
}

/// Group weights: default to the number of variables in each group.
#[derive(Debug, Clone, Copy)]
pub struct GroupWeights<T> {
    pub quantitative: Option<T>,
    pub position: T,
    pub league_team: T,
}

impl<T: Scalar> Default for GroupWeights<T> {
    fn default() -> Self {
        Self { quantitative: None, position: T::lit(11.0), league_team: T::lit(2.0) }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DissimConfig<T> {
    pub geco_cutoff: T,
    pub weights: GroupWeights<T>,
}

impl<T: Scalar> Default for DissimConfig<T> {
    fn default() -> Self {
        Self { geco_cutoff: T::lit(4.0), weights: GroupWeights::default() }
    }
}

/// The three group dissimilarities (quantitative, position, league/team) of a
/// standardised feature table.
pub fn group_dissimilarities<T: Scalar>(
    table: &FeatureTable<T>,
    cfg: &DissimConfig<T>,
) -> Result<[GroupDissimilarity<T>; 3]> {
    if !table.stages.standardized {
        return Err(Error::invalid("dissimilarities need a standardized feature table"));
    }
    let n = table.n();
    let weights: Vec<T> = table.columns.iter().map(|c| c.weight).collect();
    let layout = L1Layout { weights: &weights, compositions: &table.compositions };
    let rows: Vec<Vec<Option<T>>> =
        (0..n).map(|i| table.columns.iter().map(|c| c.values[i]).collect()).collect();
    let zero: Vec<Vec<bool>> =
        (0..n).map(|i| table.compositions.iter().map(|b| b.zero_top[i]).collect()).collect();
    let row = |i: usize| QuantRow { values: &rows[i], zero_top: &zero[i] };

    let quant = DissimilarityMatrix::from_fn(n, |i, j| {
        quantitative_l1(&layout, row(i), row(j)).ok_or(Error::IncomparablePair(i, j))
    })?;
    let pos = DissimilarityMatrix::from_fn(n, |i, j| {
        geco_position(&table.positions[i], &table.positions[j], cfg.geco_cutoff)
    })?;
    let [ls, tp] = &table.league_team;
    let lt = DissimilarityMatrix::from_fn(n, |i, j| Ok(league_team_dissim((ls[i], tp[i]), (ls[j], tp[j]))))?;

    Ok([
        GroupDissimilarity {
            matrix: quant,
            weight: cfg.weights.quantitative.unwrap_or_else(|| T::from_len(table.quantitative_count())),
        },
        GroupDissimilarity { matrix: pos, weight: cfg.weights.position },
        GroupDissimilarity { matrix: lt, weight: cfg.weights.league_team },
    ])
}

pub fn final_dissimilarity<T: Scalar>(table: &FeatureTable<T>, cfg: &DissimConfig<T>) -> Result<DissimilarityMatrix<T>> {
    aggregate_final(&group_dissimilarities(table, cfg)?)
}
