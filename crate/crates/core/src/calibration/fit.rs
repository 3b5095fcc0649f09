//! Least-squares fits of the Hayes (p/n + q/n²) and Williams (amp·n^−b)
//! bias forms.

use crate::error::{Error, Result};
use crate::factors::models::{hayes_eval, williams_eval, BiasModel, ModelForm, ModelTarget};
use crate::factors::tables;

/// Observations `(n, value)` with optional positive weights.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitInput {
    pub points: Vec<(f64, f64)>,
    pub weights: Option<Vec<f64>>,
}

impl FitInput {
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        Self {
            points,
            weights: None,
        }
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        self.weights = Some(weights);
        self
    }

    fn validate(&self) -> Result<Vec<f64>> {
        if self.points.len() < 2 {
            return Err(Error::SingularFit(format!(
                "need at least 2 points, got {}",
                self.points.len()
            )));
        }
        for &(n, y) in &self.points {
            if !(n.is_finite() && n > 0.0 && y.is_finite()) {
                return Err(Error::InvalidConfig(format!("bad fit point ({n}, {y})")));
            }
        }
        let weights = match &self.weights {
            None => vec![1.0; self.points.len()],
            Some(w) if w.len() != self.points.len() => {
                return Err(Error::InvalidConfig(format!(
                    "{} weights for {} points",
                    w.len(),
                    self.points.len()
                )))
            }
            Some(w) if w.iter().any(|&x| !(x.is_finite() && x > 0.0)) => {
                return Err(Error::InvalidConfig("weights must be positive".into()))
            }
            Some(w) => w.clone(),
        };
        let first = self.points[0].0;
        if self.points.iter().all(|&(n, _)| n == first) {
            return Err(Error::SingularFit(format!("all points share n = {first}")));
        }
        Ok(weights)
    }
}

/// Weighted simple regression y = a + b·x in centered form.
fn line(x: &[f64], y: &[f64], w: &[f64]) -> Result<(f64, f64)> {
    let sw: f64 = w.iter().sum();
    let xbar = x.iter().zip(w).map(|(x, w)| w * x).sum::<f64>() / sw;
    let ybar = y.iter().zip(w).map(|(y, w)| w * y).sum::<f64>() / sw;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for ((&x, &y), &w) in x.iter().zip(y).zip(w) {
        sxx += w * (x - xbar) * (x - xbar);
        sxy += w * (x - xbar) * (y - ybar);
    }
    if sxx <= 0.0 {
        return Err(Error::SingularFit("regressor has no spread".into()));
    }
    let b = sxy / sxx;
    Ok((ybar - b * xbar, b))
}

fn rss(input: &FitInput, weights: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    input
        .points
        .iter()
        .zip(weights)
        .map(|(&(n, y), w)| w * (y - f(n)).powi(2))
        .sum()
}

/// Minimizes Σ w·(y − p/n − q/n²)². Dividing through by 1/n turns the
/// normal equations into those of a weighted line n·y = p + q·(1/n) with
/// weights w/n², solved here in centered form.
pub fn fit_hayes(input: &FitInput) -> Result<BiasModel> {
    let weights = input.validate()?;
    let x: Vec<f64> = input.points.iter().map(|&(n, _)| 1.0 / n).collect();
    let y: Vec<f64> = input.points.iter().map(|&(n, v)| n * v).collect();
    let w: Vec<f64> = input
        .points
        .iter()
        .zip(&weights)
        .map(|(&(n, _), w)| w / (n * n))
        .collect();
    let (p, q) = line(&x, &y, &w)?;
    let mut model = BiasModel::hayes(ModelTarget::Unspecified, p, q);
    model.rss = rss(input, &weights, |n| hayes_eval([p, q], n));
    Ok(model)
}

/// Fits |y| = amp·n^−b by least squares on (ln n, ln |y|) and reattaches
/// the common sign to `amp`. The reported RSS is in the original units.
pub fn fit_williams(input: &FitInput) -> Result<BiasModel> {
    let weights = input.validate()?;
    let positive = input.points[0].1 > 0.0;
    if input
        .points
        .iter()
        .any(|&(_, y)| y == 0.0 || (y > 0.0) != positive)
    {
        return Err(Error::MixedSign(
            "values must be all positive or all negative".into(),
        ));
    }
    let x: Vec<f64> = input.points.iter().map(|&(n, _)| n.ln()).collect();
    let y: Vec<f64> = input.points.iter().map(|&(_, v)| v.abs().ln()).collect();
    let (log_amp, slope) = line(&x, &y, &weights)?;
    let sign = if positive { 1.0 } else { -1.0 };
    let coefficients = [sign * log_amp.exp(), -slope];
    let mut model = BiasModel::williams(ModelTarget::Unspecified, coefficients[0], coefficients[1]);
    model.rss = rss(input, &weights, |n| williams_eval(coefficients, n));
    Ok(model)
}

pub fn fit(form: ModelForm, input: &FitInput) -> Result<BiasModel> {
    match form {
        ModelForm::Hayes => fit_hayes(input),
        ModelForm::Williams => fit_williams(input),
    }
}

/// Lower bound on n that reproduces the published bias coefficients when
/// refitting the embedded tables.
pub const PUBLISHED_FIT_N_MIN: usize = 51;

/// Empirical A_n (`MadBias`) or B_n (`ShamosBias`) from the embedded tables,
/// for every tabulated n ≥ `n_min`.
pub fn tabulated_bias(target: ModelTarget, n_min: usize) -> Result<FitInput> {
    let (small, large) = match target {
        ModelTarget::MadBias => (0, 0),
        ModelTarget::ShamosBias => (1, 3),
        other => {
            return Err(Error::InvalidConfig(format!(
                "no tabulated bias for {other:?}"
            )))
        }
    };
    let points = tables::bias_table()
        .series(small)
        .into_iter()
        .chain(tables::bias_large_table().series(large))
        .filter(|&(n, _)| n >= n_min)
        .map(|(n, v)| (n as f64, v))
        .collect();
    Ok(FitInput::new(points))
}

/// Refits the embedded bias tables for n ≥ `n_min`.
pub fn refit_tabulated(target: ModelTarget, form: ModelForm, n_min: usize) -> Result<BiasModel> {
    Ok(fit(form, &tabulated_bias(target, n_min)?)?.with_target(target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factors::models::{HAYES_A, HAYES_B, WILLIAMS_A, WILLIAMS_B};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn grid() -> Vec<f64> {
        (109..=500).step_by(7).map(|n| n as f64).collect()
    }

    #[test]
    fn hayes_exact_recovery() {
        let (p, q) = (-0.76213, -0.86413);
        let input = FitInput::new(grid().into_iter().map(|n| (n, hayes_eval([p, q], n))).collect());
        let m = fit_hayes(&input).unwrap();
        assert!(rel(m.coefficients[0], p) < 1e-10);
        assert!(rel(m.coefficients[1], q) < 1e-10);
        let tss: f64 = input.points.iter().map(|(_, y)| y * y).sum();
        assert!(m.rss <= 1e-18 * tss);
    }

    #[test]
    fn hayes_two_point_interpolation() {
        let (p, q) = (0.3, -1.7);
        let input = FitInput::new(vec![(2.0, p / 2.0 + q / 4.0), (4.0, p / 4.0 + q / 16.0)]);
        let m = fit_hayes(&input).unwrap();
        assert!((m.coefficients[0] - p).abs() < 1e-14);
        assert!((m.coefficients[1] - q).abs() < 1e-14);
    }

    #[test]
    fn hayes_is_order_invariant() {
        let pts: Vec<(f64, f64)> = grid().into_iter().map(|n| (n, 1.0 / n + (n * 0.37).sin() * 1e-5)).collect();
        let mut rev = pts.clone();
        rev.reverse();
        let a = fit_hayes(&FitInput::new(pts)).unwrap();
        let b = fit_hayes(&FitInput::new(rev)).unwrap();
        for i in 0..2 {
            assert!(rel(a.coefficients[i], b.coefficients[i]) < 1e-12);
        }
    }

    #[test]
    fn williams_exact_recovery() {
        for (amp, exp) in [(-0.804168866, 1.008922), (0.435760656, 1.0084443)] {
            let input = FitInput::new(
                grid().into_iter().map(|n| (n, williams_eval([amp, exp], n))).collect(),
            );
            let m = fit_williams(&input).unwrap();
            assert!(rel(m.coefficients[0], amp) < 1e-10);
            assert!(rel(m.coefficients[1], exp) < 1e-10);
        }
    }

    #[test]
    fn fit_errors() {
        let same = FitInput::new(vec![(5.0, 1.0), (5.0, 2.0)]);
        assert!(matches!(fit_hayes(&same), Err(Error::SingularFit(_))));
        assert!(matches!(fit_williams(&same), Err(Error::SingularFit(_))));
        assert!(fit_hayes(&FitInput::new(vec![(5.0, 1.0)])).is_err());
        let mixed = FitInput::new(vec![(5.0, 1.0), (6.0, -2.0)]);
        assert!(matches!(fit_williams(&mixed), Err(Error::MixedSign(_))));
        let zero = FitInput::new(vec![(5.0, 0.0), (6.0, 2.0)]);
        assert!(matches!(fit_williams(&zero), Err(Error::MixedSign(_))));
        let weights = FitInput::new(vec![(5.0, 1.0), (6.0, 2.0)]).with_weights(vec![1.0]);
        assert!(fit_hayes(&weights).is_err());
    }

    #[test]
    fn weights_matter() {
        let pts = vec![(2.0, 1.0), (3.0, 0.2), (4.0, 0.3), (8.0, 0.01)];
        let plain = fit_hayes(&FitInput::new(pts.clone())).unwrap();
        let weighted = fit_hayes(&FitInput::new(pts).with_weights(vec![1.0, 10.0, 1.0, 1.0])).unwrap();
        assert_ne!(plain.coefficients, weighted.coefficients);
    }

    #[test]
    fn refit_reproduces_published_models() {
        for (target, hayes, williams) in [
            (ModelTarget::MadBias, HAYES_A, WILLIAMS_A),
            (ModelTarget::ShamosBias, HAYES_B, WILLIAMS_B),
        ] {
            let h = refit_tabulated(target, ModelForm::Hayes, PUBLISHED_FIT_N_MIN).unwrap();
            let w = refit_tabulated(target, ModelForm::Williams, PUBLISHED_FIT_N_MIN).unwrap();
            assert_eq!(h.target, target);
            for i in 0..2 {
                assert!((h.coefficients[i] - hayes.coefficients[i]).abs() < 0.05, "{target:?} hayes {i}");
            }
            assert!((w.coefficients[0] - williams.coefficients[0]).abs() < 0.05);
            assert!((w.coefficients[1] - williams.coefficients[1]).abs() < 0.02);
        }
    }

    #[test]
    fn single_decade_exponent_is_near_one() {
        for target in [ModelTarget::MadBias, ModelTarget::ShamosBias] {
            let w = refit_tabulated(target, ModelForm::Williams, 100).unwrap();
            assert!((w.coefficients[1] - 1.0).abs() < 0.05, "{target:?}: {:?}", w.coefficients);
        }
        assert!(tabulated_bias(ModelTarget::Unspecified, 1).is_err());
    }
}
