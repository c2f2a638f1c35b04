//! Log-shift transformation and the choice of its shift constant from two seasons of data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

/// Candidate shift constants tried when none is configured.
pub const DEFAULT_SHIFT_GRID: [f64; 8] = [0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "c", rename_all = "snake_case")]
pub enum ShiftChoice {
    /// Keep the variable on its original scale.
    Identity,
    /// `ln(x + c)`.
    Log(f64),
}

impl ShiftChoice {
    pub fn apply<T: Scalar>(self, x: T) -> Result<T> {
        match self {
            ShiftChoice::Identity => Ok(x),
            ShiftChoice::Log(c) => log_shift(x, T::lit(c)),
        }
    }
}

/// `ln(x + c)`.
pub fn log_shift<T: Scalar>(x: T, c: T) -> Result<T> {
    if !(c > T::zero()) {
        return Err(Error::invalid(format!("shift constant must be positive, got {c}")));
    }
    if !(x + c > T::zero()) {
        return Err(Error::invalid(format!("log argument x + c = {} is not positive", x + c)));
    }
    Ok((x + c).ln())
}

/// One player observed in two consecutive seasons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeasonPair<T> {
    pub x1: T,
    pub x2: T,
    pub minutes1: T,
    pub minutes2: T,
}

/// OLS slope of `|t(x2) - t(x1)|` on the minutes-weighted mean of `t(x1), t(x2)`.
/// `None` when the explanatory variable has no spread.
pub fn stability_slope<T: Scalar, F>(pairs: &[SeasonPair<T>], t: F) -> Result<Option<T>>
where
    F: Fn(T) -> Result<T>,
{
    let mut xs = Vec::with_capacity(pairs.len());
    let mut ys = Vec::with_capacity(pairs.len());
    for p in pairs {
        let (a, b) = (t(p.x1)?, t(p.x2)?);
        xs.push((p.minutes1 * a + p.minutes2 * b) / (p.minutes1 + p.minutes2));
        ys.push((b - a).abs());
    }
    let n = T::from_len(xs.len());
    let mx = compensated_sum(xs.iter().copied()) / n;
    let my = compensated_sum(ys.iter().copied()) / n;
    let sxx = compensated_sum(xs.iter().map(|&x| (x - mx) * (x - mx)));
    let scale = compensated_sum(xs.iter().map(|&x| x * x));
    if !(sxx > T::epsilon() * scale) {
        return Ok(None);
    }
    let sxy = compensated_sum(xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)));
    Ok(Some(sxy / sxx))
}

/// Picks the shift constant whose log transform makes the season-to-season
/// differences least dependent on the level of the variable. Ties go to the
/// smaller constant; the untransformed variable wins only when strictly better
/// than every candidate.
pub fn fit_shift_constant<T: Scalar>(pairs: &[SeasonPair<T>], grid: &[T]) -> Result<ShiftChoice> {
    if pairs.len() < 3 {
        return Err(Error::invalid(format!("need at least 3 season pairs, got {}", pairs.len())));
    }
    if grid.is_empty() {
        return Err(Error::invalid("empty shift grid"));
    }
    for p in pairs {
        if p.x1 < T::zero() || p.x2 < T::zero() || !(p.minutes1 > T::zero()) || !(p.minutes2 > T::zero()) {
            return Err(Error::invalid("season pairs need nonnegative values and positive minutes"));
        }
    }
    let mut candidates: Vec<T> = grid.to_vec();
    if candidates.iter().any(|c| !(*c > T::zero())) {
        return Err(Error::invalid("shift constants must be positive"));
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));

    let mut best: Option<(T, T)> = None;
    for &c in &candidates {
        if let Some(slope) = stability_slope(pairs, |x| log_shift(x, c))? {
            if best.is_none_or(|(_, b)| slope.abs() < b) {
                best = Some((c, slope.abs()));
            }
        }
    }
    let identity = stability_slope(pairs, Ok)?;
    match (best, identity) {
        (None, None) => Err(Error::FitFailure),
        (None, Some(_)) => Ok(ShiftChoice::Identity),
        (Some((c, b)), id) => {
            if id.is_some_and(|s| s.abs() < b) {
                Ok(ShiftChoice::Identity)
            } else {
                Ok(ShiftChoice::Log(c.as_f64()))
            }
        }
    }
}
