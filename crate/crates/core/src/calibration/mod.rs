//! Calibration of validity indexes against a pool of regular and random
//! clusterings, and weighted composite indexes built from them.

pub mod panel;
pub mod ranking;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use panel::{build_panel, IndexPanel, PanelBuild, PanelConfig, PanelRow};
pub use ranking::{rank_candidates, rank_raw, write_ranking_csv, write_ranking_table, Ranked};

use crate::error::{Error, Result};
use crate::indexes::{IndexId, IndexValue, Orientation};
use crate::scalar::{mean_sd, Scalar};

/// C1 pools every number of clusters; C2 calibrates within each K.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationMode {
    C1,
    #[default]
    C2,
}

impl fmt::Display for CalibrationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CalibrationMode::C1 => "c1",
            CalibrationMode::C2 => "c2",
        })
    }
}

impl FromStr for CalibrationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "c1" => Ok(CalibrationMode::C1),
            "c2" => Ok(CalibrationMode::C2),
            _ => Err(Error::invalid(format!("unknown calibration mode `{s}` (expected c1 or c2)"))),
        }
    }
}

/// Larger-is-better version of an index value.
pub fn orient<T: Scalar>(v: IndexValue<T>) -> T {
    match v.orientation {
        Orientation::LargerBetter => v.raw,
        Orientation::SmallerBetter => -v.raw,
    }
}

/// Weights for (ave_within, sep, pearson_gamma, entropy, bootstab).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightProfile {
    pub name: String,
    pub weights: [f64; 5],
}

impl WeightProfile {
    pub fn new(name: impl Into<String>, weights: [f64; 5]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid(format!("weights must be finite and nonnegative, got {weights:?}")));
        }
        if weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::invalid("weights must not all be zero"));
        }
        Ok(Self { name: name.into(), weights })
    }

    /// Equal weights.
    pub fn w1() -> Self {
        Self { name: "w1".into(), weights: [1.0; 5] }
    }

    /// Separation at half weight.
    pub fn w2() -> Self {
        Self { name: "w2".into(), weights: [1.0, 0.5, 1.0, 1.0, 1.0] }
    }

    pub fn weight(&self, index: IndexId) -> f64 {
        IndexId::ASPECTS.iter().position(|&i| i == index).map_or(0.0, |p| self.weights[p])
    }
}

/// Weighted mean of calibrated values given in aspect order. Values with
/// zero weight may be missing.
pub fn composite<T: Scalar>(values: &[Option<T>; 5], w: &WeightProfile) -> Result<T> {
    let mut num = T::zero();
    let mut den = T::zero();
    for ((v, &wj), id) in values.iter().zip(&w.weights).zip(IndexId::ASPECTS) {
        if wj == 0.0 {
            continue;
        }
        let v = v.ok_or_else(|| Error::invalid(format!("composite needs a calibrated `{id}` value")))?;
        num = num + T::lit(wj) * v;
        den = den + T::lit(wj);
    }
    if den <= T::zero() {
        return Err(Error::invalid("weights must not all be zero"));
    }
    Ok(num / den)
}

/// Mean and sd (denominator `count - 1`) of one index over one stratum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StratumStats<T> {
    pub index: IndexId,
    /// `None` for the pooled (C1) stratum.
    pub k: Option<usize>,
    pub count: usize,
    pub mean: T,
    pub sd: T,
}

/// `(v - mean) / sd` for every value, after orienting larger-is-better.
pub fn calibrate_values<T: Scalar>(index: IndexId, stratum: &str, oriented: &[T]) -> Result<(Vec<T>, T, T)> {
    let degenerate = || Error::DegenerateCalibration { index: index.name().into(), stratum: stratum.into() };
    let (mean, sd) = mean_sd(oriented).ok_or_else(degenerate)?;
    if !(sd > T::zero()) || !sd.is_finite() {
        return Err(degenerate());
    }
    Ok((oriented.iter().map(|&v| (v - mean) / sd).collect(), mean, sd))
}

/// Calibrated, larger-is-better values of the aspect indexes for every pool row.
#[derive(Debug, Clone)]
pub struct CalibratedPanel<T> {
    pub mode: CalibrationMode,
    pub indexes: Vec<IndexId>,
    /// Parallel to the panel rows; `values[r][j]` belongs to `indexes[j]`.
    pub values: Vec<Vec<Option<T>>>,
    pub stats: Vec<StratumStats<T>>,
}

impl<T: Scalar> CalibratedPanel<T> {
    pub fn value(&self, row: usize, index: IndexId) -> Option<T> {
        self.indexes.iter().position(|&i| i == index).and_then(|j| self.values[row][j])
    }

    /// Values in aspect order for [`composite`].
    pub fn aspects(&self, row: usize) -> [Option<T>; 5] {
        IndexId::ASPECTS.map(|id| self.value(row, id))
    }
}

/// Calibrates every aspect index of `panel` over its pool of method and random
/// clusterings. Undefined values are left out of the pool.
pub fn calibrate<T: Scalar>(panel: &IndexPanel<T>, mode: CalibrationMode) -> Result<CalibratedPanel<T>> {
    let indexes: Vec<IndexId> = panel.indexes.iter().copied().filter(|i| IndexId::ASPECTS.contains(i)).collect();
    let mut values = vec![vec![None; indexes.len()]; panel.rows.len()];
    let mut stats = Vec::new();
    for (j, &id) in indexes.iter().enumerate() {
        let col = panel.column(id).expect("index in panel");
        let mut strata: BTreeMap<Option<usize>, Vec<usize>> = BTreeMap::new();
        for (r, row) in panel.rows.iter().enumerate() {
            if row.values[col].is_some() {
                let key = match mode {
                    CalibrationMode::C1 => None,
                    CalibrationMode::C2 => Some(row.k),
                };
                strata.entry(key).or_default().push(r);
            }
        }
        for (key, rows) in strata {
            let oriented: Vec<T> = rows
                .iter()
                .map(|&r| orient(IndexValue::new(id, panel.rows[r].values[col].expect("defined"))))
                .collect();
            let label = key.map_or_else(|| "all".to_string(), |k| format!("K={k}"));
            let (cal, mean, sd) = calibrate_values(id, &label, &oriented)?;
            for (&r, v) in rows.iter().zip(cal) {
                values[r][j] = Some(v);
            }
            stats.push(StratumStats { index: id, k: key, count: rows.len(), mean, sd });
        }
    }
    Ok(CalibratedPanel { mode, indexes, values, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::Method;

    #[test]
    fn orientation_examples() {
        assert_eq!(orient(IndexValue::new(IndexId::AveWithin, 0.4)), -0.4);
        assert_eq!(orient(IndexValue::new(IndexId::PearsonGamma, 0.7)), 0.7);
        assert_eq!(orient(IndexValue::new(IndexId::Bootstab, 0.02)), -0.02);
    }

    #[test]
    fn calibration_examples() {
        let (v, mean, sd) = calibrate_values(IndexId::Entropy, "all", &[0.0f64, 2.0]).unwrap();
        assert_eq!(mean, 1.0);
        assert!((sd - 2f64.sqrt()).abs() < 1e-15);
        let h = 1.0 / 2f64.sqrt();
        assert!((v[0] + h).abs() < 1e-15 && (v[1] - h).abs() < 1e-15);
        let (v, ..) = calibrate_values(IndexId::Entropy, "all", &[1.0f64, 2.0, 3.0]).unwrap();
        assert_eq!(v[1], 0.0);
        assert!(matches!(
            calibrate_values(IndexId::Entropy, "K=2", &[1.0f64, 1.0]),
            Err(Error::DegenerateCalibration { .. })
        ));
    }

    #[test]
    fn composite_examples() {
        let ones = [Some(1.0f64); 5];
        assert!((composite(&ones, &WeightProfile::w1()).unwrap() - 1.0).abs() < 1e-15);
        let v = [Some(1.0f64), Some(2.0), Some(3.0), Some(4.0), Some(5.0)];
        assert!((composite(&v, &WeightProfile::w2()).unwrap() - 14.0 / 4.5).abs() < 1e-12);
        let w = WeightProfile::new("a2", [0.0, 0.0, 0.0, 0.5, 1.0]).unwrap();
        let a = composite(&[None, None, None, Some(2.0f64), Some(-1.0)], &w).unwrap();
        let b = composite(&[Some(9.0f64), Some(-3.0), None, Some(2.0), Some(-1.0)], &w).unwrap();
        assert_eq!(a, b);
        assert!(composite(&[None, Some(1.0f64), Some(1.0), Some(1.0), Some(1.0)], &w).is_ok());
        assert!(composite(&[Some(1.0f64), None, Some(1.0), Some(1.0), Some(1.0)], &WeightProfile::w2()).is_err());
        assert!(WeightProfile::new("zero", [0.0; 5]).is_err());
        assert!(WeightProfile::new("neg", [1.0, -1.0, 0.0, 0.0, 0.0]).is_err());
    }

    fn toy_panel() -> IndexPanel<f64> {
        let mut rows = Vec::new();
        for (k, vals) in [(2, [1.0, 2.0, 4.0]), (3, [10.0, 30.0, 20.0])] {
            for (r, v) in vals.into_iter().enumerate() {
                let method = if r == 0 { Method::Ward } else { Method::RandomNn };
                rows.push(PanelRow { method, k, replicate: r, values: vec![Some(v), Some(v * v)] });
            }
        }
        IndexPanel { indexes: vec![IndexId::AveWithin, IndexId::Entropy], rows }
    }

    #[test]
    fn strata_are_isolated_under_c2() {
        let p = toy_panel();
        let a = calibrate(&p, CalibrationMode::C2).unwrap();
        let mut q = p.clone();
        for row in q.rows.iter_mut().filter(|r| r.k == 3) {
            row.values[0] = row.values[0].map(|v| v * 7.0 + 1.0);
        }
        let b = calibrate(&q, CalibrationMode::C2).unwrap();
        for r in 0..3 {
            assert_eq!(a.values[r], b.values[r]);
        }
        // ave_within is smaller-better, so the smallest raw value calibrates highest.
        assert!(a.value(0, IndexId::AveWithin).unwrap() > a.value(2, IndexId::AveWithin).unwrap());
        let c1 = calibrate(&p, CalibrationMode::C1).unwrap();
        assert_eq!(c1.stats.len(), 2);
        assert_eq!(a.stats.len(), 4);
    }
}
