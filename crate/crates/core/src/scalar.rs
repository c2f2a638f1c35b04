use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used throughout the numeric code: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn from_len(n: usize) -> Self {
        Self::from_usize(n).expect("length representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Neumaier-compensated sum; order dependent only at the rounding level.
pub fn compensated_sum<T: Scalar, I: IntoIterator<Item = T>>(values: I) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp = comp + ((sum - t) + v);
        } else {
            comp = comp + ((v - t) + sum);
        }
        sum = t;
    }
    sum + comp
}

/// Sample mean and standard deviation (denominator `len - 1`).
pub fn mean_sd<T: Scalar>(values: &[T]) -> Option<(T, T)> {
    if values.len() < 2 {
        return None;
    }
    let n = T::from_len(values.len());
    let mean = compensated_sum(values.iter().copied()) / n;
    let ss = compensated_sum(values.iter().map(|&v| (v - mean) * (v - mean)));
    Some((mean, (ss / (n - T::one())).sqrt()))
}

/// Median of a non-empty slice; even lengths average the two middle values.
pub fn median<T: Scalar>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        Some(v[m])
    } else {
        Some((v[m - 1] + v[m]) / T::lit(2.0))
    }
}

/// Pearson correlation, `None` when either side is constant.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Option<T> {
    assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return None;
    }
    let n = T::from_len(x.len());
    let mx = compensated_sum(x.iter().copied()) / n;
    let my = compensated_sum(y.iter().copied()) / n;
    let sxy = compensated_sum(x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)));
    let sxx = compensated_sum(x.iter().map(|&a| (a - mx) * (a - mx)));
    let syy = compensated_sum(y.iter().map(|&b| (b - my) * (b - my)));
    if sxx <= T::zero() || syy <= T::zero() {
        return None;
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    Some(r.max(-T::one()).min(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_handles_cancellation() {
        let v = [1e16, 1.0, -1e16];
        assert_eq!(compensated_sum(v), 1.0);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0f32, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median::<f64>(&[]), None);
    }

    #[test]
    fn mean_sd_two_values() {
        let (m, s) = mean_sd(&[0.0, 2.0]).unwrap();
        assert_eq!(m, 1.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }
}
