//! Ordering candidate clusterings by composite or raw index values.

use std::cmp::Ordering;
use std::io::Write;

use serde::Serialize;

use super::{composite, CalibratedPanel, IndexPanel, WeightProfile};
use crate::cluster::Method;
use crate::indexes::{IndexId, Orientation};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ranked<T> {
    pub method: Method,
    pub k: usize,
    pub value: T,
}

impl<T> Ranked<T> {
    pub fn label(&self) -> String {
        format!("{}({})", self.method, self.k)
    }
}

fn sort_best_first<T: Scalar>(v: &mut [Ranked<T>], orientation: Orientation) {
    v.sort_by(|a, b| {
        let by_value = match orientation {
            Orientation::LargerBetter => b.value.partial_cmp(&a.value),
            Orientation::SmallerBetter => a.value.partial_cmp(&b.value),
        }
        .unwrap_or(Ordering::Equal);
        by_value.then(a.k.cmp(&b.k)).then_with(|| a.method.name().cmp(b.method.name()))
    });
}

/// Regular candidates by descending composite value; ties go to the smaller K,
/// then the method name. Candidates missing a required calibrated value are
/// left out.
pub fn rank_candidates<T: Scalar>(
    panel: &IndexPanel<T>,
    calibrated: &CalibratedPanel<T>,
    w: &WeightProfile,
) -> Vec<Ranked<T>> {
    let mut out: Vec<Ranked<T>> = panel
        .candidates()
        .filter_map(|(r, row)| {
            composite(&calibrated.aspects(r), w).ok().map(|value| Ranked { method: row.method, k: row.k, value })
        })
        .collect();
    sort_best_first(&mut out, Orientation::LargerBetter);
    out
}

/// Regular candidates ordered best-first by one raw index.
pub fn rank_raw<T: Scalar>(panel: &IndexPanel<T>, index: IndexId) -> Vec<Ranked<T>> {
    let mut out: Vec<Ranked<T>> = panel
        .candidates()
        .filter_map(|(r, row)| panel.value(r, index).map(|value| Ranked { method: row.method, k: row.k, value }))
        .collect();
    sort_best_first(&mut out, index.orientation());
    out
}

/// Full rankings: `profile,rank,method,k,value`.
pub fn write_ranking_csv<T: Scalar, W: Write>(w: W, rankings: &[(String, Vec<Ranked<T>>)]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["profile", "rank", "method", "k", "value"])?;
    for (name, list) in rankings {
        for (i, r) in list.iter().enumerate() {
            out.write_record([
                name.clone(),
                (i + 1).to_string(),
                r.method.name().to_string(),
                r.k.to_string(),
                r.value.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// One line per criterion with its best `top` candidates as `method(K)` and values.
pub fn write_ranking_table<T: Scalar, W: Write>(
    w: W,
    rankings: &[(String, Vec<Ranked<T>>)],
    top: usize,
) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["index".to_string()];
    for i in 1..=top {
        header.push(format!("best_{i}"));
        header.push(format!("value_{i}"));
    }
    out.write_record(&header)?;
    for (name, list) in rankings {
        let mut rec = vec![name.clone()];
        for i in 0..top {
            match list.get(i) {
                Some(r) => {
                    rec.push(r.label());
                    rec.push(r.value.to_string());
                }
                None => rec.extend([String::new(), String::new()]),
            }
        }
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}
