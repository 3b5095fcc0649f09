//! Streaming central moments with an order-fixed merge.

/// Count, mean and centered power sums M2..M4 of a stream of values.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

impl Moments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        let n1 = self.count as f64;
        self.count += 1;
        let n = self.count as f64;
        let delta = x - self.mean;
        let delta_n = delta / n;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * n1;
        self.mean += delta_n;
        self.m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * self.m2
            - 4.0 * delta_n * self.m3;
        self.m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * self.m2;
        self.m2 += term1;
    }

    /// Combines two summaries (Pébay's pairwise formulas). Not commutative in
    /// floating point, so callers merge in a fixed order.
    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let d3 = d2 * delta;
        let d4 = d2 * d2;
        let mean = self.mean + delta * nb / n;
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + other.m3
            + d3 * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;
        Self {
            count: self.count + other.count,
            mean,
            m2,
            m3,
            m4,
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        self.m2 / (self.count - 1) as f64
    }

    /// Standard error of the mean.
    pub fn mean_standard_error(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }

    /// Large-sample standard error of the sample variance, √((μ4 − σ⁴)/R).
    pub fn variance_standard_error(&self) -> f64 {
        let n = self.count as f64;
        let mu2 = self.m2 / n;
        let mu4 = self.m4 / n;
        ((mu4 - mu2 * mu2).max(0.0) / n).sqrt()
    }
}

impl Extend<f64> for Moments {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Self::new();
        m.extend(iter);
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn direct(xs: &[f64]) -> (f64, f64, f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let c = |p: i32| xs.iter().map(|x| (x - mean).powi(p)).sum::<f64>();
        (mean, c(2), c(3), c(4))
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn known_values() {
        let m: Moments = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0].into_iter().collect();
        assert_eq!(m.mean, 5.0);
        assert!((m.variance() - 32.0 / 7.0).abs() < 1e-14);
        assert!(Moments::new().variance().is_nan());
    }

    proptest! {
        #[test]
        fn push_matches_two_pass(xs in prop::collection::vec(-100f64..100.0, 2..300)) {
            let m: Moments = xs.iter().copied().collect();
            let (mean, m2, m3, m4) = direct(&xs);
            prop_assert!(close(m.mean, mean));
            prop_assert!(close(m.m2, m2));
            prop_assert!(close(m.m3, m3));
            prop_assert!(close(m.m4, m4));
        }

        #[test]
        fn merge_matches_single_stream(
            xs in prop::collection::vec(-100f64..100.0, 2..300),
            split in 0usize..300,
        ) {
            let split = split.min(xs.len());
            let a: Moments = xs[..split].iter().copied().collect();
            let b: Moments = xs[split..].iter().copied().collect();
            let whole: Moments = xs.iter().copied().collect();
            let merged = a.merge(&b);
            prop_assert_eq!(merged.count, whole.count);
            prop_assert!(close(merged.mean, whole.mean));
            prop_assert!(close(merged.m2, whole.m2));
            prop_assert!(close(merged.m3, whole.m3));
            prop_assert!(close(merged.m4, whole.m4));
        }
    }
}
