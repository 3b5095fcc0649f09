//! Order-statistic selection.
//!
//! Every median in the crate goes through [`median_in_place`], which
//! partitions with `select_nth_unstable_by` (introselect, linear on average)
//! instead of sorting the whole buffer.

use crate::error::{Error, Result};

/// Returns the `k`-th smallest value (0-based). The input is left untouched.
pub fn select_kth(values: &[f64], k: usize) -> Result<f64> {
    if k >= values.len() {
        return Err(Error::IndexOutOfRange {
            k,
            len: values.len(),
        });
    }
    let mut buf = values.to_vec();
    Ok(select_kth_in_place(&mut buf, k))
}

/// Partitions `buf` around position `k` and returns the value there.
///
/// Panics if `k >= buf.len()`.
#[inline]
pub(crate) fn select_kth_in_place(buf: &mut [f64], k: usize) -> f64 {
    let (_, kth, _) = buf.select_nth_unstable_by(k, f64::total_cmp);
    *kth
}

/// Median with the midpoint rule for even lengths. Reorders `buf`.
///
/// Panics on an empty buffer.
#[inline]
pub(crate) fn median_in_place(buf: &mut [f64]) -> f64 {
    let len = buf.len();
    assert!(len > 0, "median of empty buffer");
    let mid = len / 2;
    let (lower, upper, _) = buf.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if len % 2 == 1 {
        upper
    } else {
        // the lower middle is the largest element left of the pivot
        let lower_mid = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        midpoint(lower_mid, upper)
    }
}

/// (a + b)/2, which matches the mean of two values bit for bit; falls back
/// to a + (b − a)/2 when the sum overflows.
#[inline]
pub(crate) fn midpoint(a: f64, b: f64) -> f64 {
    let m = (a + b) / 2.0;
    if m.is_finite() {
        m
    } else {
        a + (b - a) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_examples() {
        assert_eq!(select_kth(&[3.0, 1.0, 2.0], 1).unwrap(), 2.0);
        assert_eq!(select_kth(&[5.0], 0).unwrap(), 5.0);
        assert_eq!(select_kth(&[4.0, 4.0, 4.0, 1.0], 2).unwrap(), 4.0);
    }

    #[test]
    fn out_of_range() {
        assert_eq!(
            select_kth(&[1.0, 2.0], 2),
            Err(Error::IndexOutOfRange { k: 2, len: 2 })
        );
        assert!(select_kth(&[], 0).is_err());
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median_in_place(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median_in_place(&mut [1.0, 2.0, 3.0, 100.0]), 2.5);
        assert_eq!(median_in_place(&mut [2.0, 2.0, 1.0, 2.0]), 2.0);
    }

    proptest! {
        #[test]
        fn agrees_with_sorting(
            values in prop::collection::vec(-1e6f64..1e6, 1..1000),
            pick in any::<prop::sample::Index>(),
        ) {
            let k = pick.index(values.len());
            let mut sorted = values.clone();
            sorted.sort_by(f64::total_cmp);
            prop_assert_eq!(select_kth(&values, k).unwrap(), sorted[k]);
        }

        #[test]
        fn median_matches_sorted_midpoint(values in prop::collection::vec(-1e3f64..1e3, 1..200)) {
            let mut sorted = values.clone();
            sorted.sort_by(f64::total_cmp);
            let m = sorted.len() / 2;
            let expected = if sorted.len() % 2 == 1 {
                sorted[m]
            } else {
                midpoint(sorted[m - 1], sorted[m])
            };
            let mut buf = values;
            prop_assert_eq!(median_in_place(&mut buf), expected);
        }
    }
}
