//! Representation of raw counts: per-90 rates, sub-category proportions, success rates.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Count rescaled to a 90-minute match equivalent.
pub fn per90<T: Scalar>(count: T, minutes: T) -> Result<T> {
    if !(minutes > T::zero()) {
        return Err(Error::invalid(format!("minutes played must be positive, got {minutes}")));
    }
    if count < T::zero() || !count.is_finite() {
        return Err(Error::invalid(format!("count must be a nonnegative number, got {count}")));
    }
    Ok(count * T::lit(90.0) / minutes)
}

/// Lower-level counts as proportions of their top-level count. `None` when the
/// top-level count is zero (the proportions are undefined for that player).
pub fn derive_composition<T: Scalar>(top_count: T, sub_counts: &[T]) -> Result<Option<Vec<T>>> {
    if top_count < T::zero() || sub_counts.iter().any(|&c| c < T::zero()) {
        return Err(Error::invalid("composition counts must be nonnegative"));
    }
    let total: T = sub_counts.iter().copied().sum();
    let tol = T::lit(1e-9) * top_count.max(T::one());
    if total > top_count + tol {
        return Err(Error::invalid(format!(
            "sub-category counts sum to {total}, exceeding the top-level count {top_count}"
        )));
    }
    if top_count == T::zero() {
        return Ok(None);
    }
    Ok(Some(sub_counts.iter().map(|&c| c / top_count).collect()))
}

/// Share of successful attempts; `None` when there were no attempts.
pub fn success_rate<T: Scalar>(successes: T, attempts: T) -> Result<Option<T>> {
    if successes < T::zero() || attempts < T::zero() {
        return Err(Error::invalid("success counts must be nonnegative"));
    }
    if successes > attempts {
        return Err(Error::invalid(format!("{successes} successes out of {attempts} attempts")));
    }
    if attempts == T::zero() {
        return Ok(None);
    }
    Ok(Some(successes / attempts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn per90_examples() {
        assert_eq!(per90(1.0, 90.0).unwrap(), 1.0);
        assert_eq!(per90(0.0, 1000.0).unwrap(), 0.0);
        assert!((per90(45.0f64, 3711.0).unwrap() - 1.091_350_040_420_372_6).abs() < 1e-12);
        assert!(per90(1.0, 0.0).is_err());
        assert!(per90(1.0, -5.0).is_err());
    }

    #[test]
    fn composition_examples() {
        assert_eq!(derive_composition(10.0, &[2.0, 3.0, 5.0]).unwrap(), Some(vec![0.2, 0.3, 0.5]));
        assert_eq!(derive_composition(0.0, &[0.0, 0.0, 0.0]).unwrap(), None);
        assert_eq!(derive_composition(4.0, &[4.0, 0.0, 0.0]).unwrap(), Some(vec![1.0, 0.0, 0.0]));
        assert!(derive_composition(4.0, &[-1.0, 0.0]).is_err());
        assert!(derive_composition(4.0, &[3.0, 2.0]).is_err());
    }

    #[test]
    fn success_rate_examples() {
        assert_eq!(success_rate(3.0, 10.0).unwrap(), Some(0.3));
        assert_eq!(success_rate(0.0, 0.0).unwrap(), None);
        assert_eq!(success_rate(10.0, 10.0).unwrap(), Some(1.0));
        assert!(success_rate(11.0, 10.0).is_err());
    }

    proptest! {
        #[test]
        fn per90_is_linear_in_count(x in 0.0f64..1e4, a in 0.0f64..100.0, m in 1.0f64..5000.0) {
            let lhs = per90(a * x, m).unwrap();
            let rhs = a * per90(x, m).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
        }

        #[test]
        fn composition_sums_to_one(subs in proptest::collection::vec(0u32..50, 1..6), extra in 0u32..3) {
            let subs: Vec<f64> = subs.into_iter().map(f64::from).collect();
            let top: f64 = subs.iter().sum::<f64>() + f64::from(extra);
            if top > 0.0 {
                let p = derive_composition(top, &subs).unwrap().unwrap();
                let covered = subs.iter().sum::<f64>() / top;
                prop_assert!((p.iter().sum::<f64>() - covered).abs() < 1e-12);
                if extra == 0 {
                    prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                }
            }
        }
    }
}
