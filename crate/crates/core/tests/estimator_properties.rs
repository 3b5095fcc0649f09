use proptest::prelude::*;

use robust_finite::breakdown::{breakdown, breakdown_oracle};
use robust_finite::factors::{unbiased_mad, unbiased_shamos};
use robust_finite::{estimate, EstimatorKind, Sample};

fn sample(v: Vec<f64>) -> Sample {
    Sample::new(v).unwrap()
}

fn magnitude(xs: &[f64], a: f64, b: f64) -> f64 {
    xs.iter().fold(0.0f64, |m, x| m.max(x.abs())) * a.abs() + b.abs() + 1.0
}

proptest! {
    #[test]
    fn affine_equivariance(
        xs in prop::collection::vec(-1e3f64..1e3, 2..60),
        a in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0],
        b in -1e3f64..1e3,
    ) {
        let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        let tol = 1e-12 * magnitude(&xs, a, b);
        let (sx, sy) = (sample(xs.clone()), sample(ys));
        for kind in EstimatorKind::ALL {
            let tx = estimate(&sx, kind).unwrap();
            let ty = estimate(&sy, kind).unwrap();
            let expected = if kind.is_location() { a * tx + b } else { a.abs() * tx };
            prop_assert!((ty - expected).abs() <= tol, "{} {} vs {}", kind, ty, expected);
        }
    }

    #[test]
    fn permutation_invariance(
        xs in prop::collection::vec(-1e3f64..1e3, 2..60),
        seed in any::<u64>(),
    ) {
        let mut ys = xs.clone();
        // deterministic Fisher-Yates driven by the seed
        let mut s = seed;
        for i in (1..ys.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ys.swap(i, (s >> 33) as usize % (i + 1));
        }
        let tol = 1e-12 * magnitude(&xs, 1.0, 0.0);
        let (sx, sy) = (sample(xs), sample(ys));
        for kind in EstimatorKind::ALL {
            let (tx, ty) = (estimate(&sx, kind).unwrap(), estimate(&sy, kind).unwrap());
            prop_assert!((tx - ty).abs() <= tol, "{} {} vs {}", kind, tx, ty);
        }
    }

    #[test]
    fn hl1_of_four_is_the_mean(xs in prop::collection::vec(-1e3f64..1e3, 4)) {
        let s = sample(xs.clone());
        let hl1 = estimate(&s, EstimatorKind::Hl1).unwrap();
        let mean = estimate(&s, EstimatorKind::Mean).unwrap();
        prop_assert!((hl1 - mean).abs() <= 1e-12 * magnitude(&xs, 1.0, 0.0));
    }

    #[test]
    fn location_lies_within_the_range(xs in prop::collection::vec(-1e3f64..1e3, 2..60)) {
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let s = sample(xs);
        for kind in EstimatorKind::ALL.into_iter().filter(|k| k.is_location()) {
            let t = estimate(&s, kind).unwrap();
            prop_assert!(t >= lo && t <= hi);
        }
        for kind in EstimatorKind::ALL.into_iter().filter(|k| k.is_scale()) {
            prop_assert!(estimate(&s, kind).unwrap() >= 0.0);
        }
    }

    #[test]
    fn unbiased_scale_is_a_fixed_multiple(xs in prop::collection::vec(-10f64..10.0, 2..40)) {
        let s = sample(xs);
        let mad = estimate(&s, EstimatorKind::Mad).unwrap();
        let sh = estimate(&s, EstimatorKind::Shamos).unwrap();
        let f = robust_finite::factor_set(s.len()).unwrap();
        prop_assert!((unbiased_mad(&s).unwrap().value - mad / f.c5).abs() <= 1e-15 * (1.0 + mad));
        prop_assert!((unbiased_shamos(&s).unwrap().value - sh / f.c6).abs() <= 1e-15 * (1.0 + sh));
    }

    #[test]
    fn breakdown_matches_oracle_for_large_n(n in 2usize..5_000) {
        for kind in [EstimatorKind::Median, EstimatorKind::Hl1, EstimatorKind::Hl2, EstimatorKind::Hl3] {
            prop_assert_eq!(breakdown(n, kind).unwrap().k_star, breakdown_oracle(n, kind).unwrap().k_star);
        }
    }
}

/// Replacing fewer than k* + 1 points by huge values must leave a robust
/// estimate bounded; replacing k* + 1 must be able to break it.
#[test]
fn corruption_up_to_breakdown_stays_bounded() {
    let base: Vec<f64> = (0..15).map(|i| (i as f64 * 0.7).sin()).collect();
    for kind in [EstimatorKind::Median, EstimatorKind::Hl1, EstimatorKind::Hl2, EstimatorKind::Hl3, EstimatorKind::Mad, EstimatorKind::Shamos] {
        let k = breakdown(base.len(), kind).unwrap().k_star;
        let corrupt = |m: usize| {
            let mut v = base.clone();
            // distinct values, so the MAD cannot implode to zero instead
            for (i, x) in v.iter_mut().take(m).enumerate() {
                *x = 1e12 * (i + 1) as f64;
            }
            estimate(&sample(v), kind).unwrap().abs()
        };
        assert!(corrupt(k) < 10.0, "{kind} with {k} outliers");
        assert!(corrupt(k + 1) > 1e6, "{kind} with {} outliers", k + 1);
    }
}

#[test]
fn mad_resists_a_single_outlier_and_sd_does_not() {
    let clean = vec![9.8, 10.1, 10.0, 9.9, 10.2, 10.05, 9.95];
    let mut dirty = clean.clone();
    dirty[0] = 1e6;
    let mad = |v: &Vec<f64>| estimate(&sample(v.clone()), EstimatorKind::Mad).unwrap();
    let sd = |v: &Vec<f64>| estimate(&sample(v.clone()), EstimatorKind::StdDev).unwrap();
    assert!(mad(&dirty) < 3.0 * mad(&clean));
    assert!(sd(&dirty) > 1e4 * sd(&clean));
}
