//! Robust standardisation: centre at the median, divide by the mean absolute
//! deviation from it. Composition members share one pooled scale.

use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, median, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Standardized<T> {
    pub values: Vec<Option<T>>,
    pub center: T,
    pub scale: T,
}

fn observed<T: Scalar>(column: &[Option<T>]) -> Vec<T> {
    column.iter().flatten().copied().collect()
}

fn mean_abs_dev<T: Scalar>(xs: &[T], center: T) -> T {
    compensated_sum(xs.iter().map(|&x| (x - center).abs())) / T::from_len(xs.len())
}

pub fn standardize_mad_median<T: Scalar>(name: &str, column: &[Option<T>]) -> Result<Standardized<T>> {
    let xs = observed(column);
    if xs.len() < 2 {
        return Err(Error::invalid(format!("column `{name}` has fewer than 2 observed values")));
    }
    let center = median(&xs).expect("nonempty");
    let scale = mean_abs_dev(&xs, center);
    if !(scale > T::zero()) {
        return Err(Error::ConstantColumn(name.to_string()));
    }
    Ok(Standardized {
        values: column.iter().map(|v| v.map(|x| (x - center) / scale)).collect(),
        center,
        scale,
    })
}

/// Standardises the member columns of one composition jointly: each column is
/// centred at its own median and all are divided by the mean absolute
/// deviation pooled over every observed member value.
pub fn standardize_pooled<T: Scalar>(group: &str, columns: &[Vec<Option<T>>]) -> Result<Vec<Standardized<T>>> {
    if columns.is_empty() {
        return Err(Error::invalid(format!("composition `{group}` has no member columns")));
    }
    let mut centers = Vec::with_capacity(columns.len());
    let mut deviations = Vec::new();
    for col in columns {
        let xs = observed(col);
        if xs.is_empty() {
            return Err(Error::invalid(format!("composition `{group}` has an all-missing member")));
        }
        let c = median(&xs).expect("nonempty");
        deviations.extend(xs.iter().map(|&x| (x - c).abs()));
        centers.push(c);
    }
    if deviations.len() < 2 {
        return Err(Error::invalid(format!("composition `{group}` has fewer than 2 observed values")));
    }
    let scale = compensated_sum(deviations.iter().copied()) / T::from_len(deviations.len());
    if !(scale > T::zero()) {
        return Err(Error::ConstantGroup(group.to_string()));
    }
    Ok(columns
        .iter()
        .zip(centers)
        .map(|(col, center)| Standardized {
            values: col.iter().map(|v| v.map(|x| (x - center) / scale)).collect(),
            center,
            scale,
        })
        .collect())
}
