//! Least-squares rate extraction on logarithmic scales.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// `value ≈ prefactor · η^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct PowerLawFit<S> {
    pub exponent: S,
    pub prefactor: S,
    pub r_squared: S,
}

/// `value ≈ prefactor · e^{−rate·t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct ExponentialFit<S> {
    pub rate: S,
    pub prefactor: S,
    pub r_squared: S,
}

/// Ordinary least squares `y ≈ a + b·x`; returns `(a, b, r²)`.
fn linear_fit<S: Real>(x: &[S], y: &[S]) -> (S, S, S) {
    let n = S::from_usize_lossy(x.len());
    let mx = x.iter().copied().sum::<S>() / n;
    let my = y.iter().copied().sum::<S>() / n;
    let sxx: S = x.iter().map(|&v| (v - mx) * (v - mx)).sum();
    let sxy: S = x.iter().zip(y).map(|(&u, &v)| (u - mx) * (v - my)).sum();
    let syy: S = y.iter().map(|&v| (v - my) * (v - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss_res: S = x.iter().zip(y).map(|(&u, &v)| (v - a - b * u) * (v - a - b * u)).sum();
    let r2 = if syy > S::zero() { S::one() - ss_res / syy } else { S::one() };
    (a, b, r2)
}

fn check_inputs<S: Real>(x: &[S], y: &[S], x_positive: bool) -> Result<()> {
    if x.len() != y.len() {
        return invalid(format!("{} abscissae but {} values", x.len(), y.len()));
    }
    if x.len() < 3 {
        return invalid(format!("need at least 3 points, got {}", x.len()));
    }
    if x.iter().any(|&v| !v.is_finite() || (x_positive && v <= S::zero())) {
        return invalid("abscissae must be finite (and positive for a power law)");
    }
    if y.iter().any(|&v| !(v > S::zero() && v.is_finite())) {
        return invalid("values must be positive and finite");
    }
    if x.iter().all(|&v| v == x[0]) {
        return invalid("abscissae must not all coincide");
    }
    Ok(())
}

/// Fits `log value = log prefactor + exponent·log η`.
pub fn fit_power_law<S: Real>(etas: &[S], values: &[S]) -> Result<PowerLawFit<S>> {
    check_inputs(etas, values, true)?;
    let lx: Vec<S> = etas.iter().map(|v| v.ln()).collect();
    let ly: Vec<S> = values.iter().map(|v| v.ln()).collect();
    let (a, b, r2) = linear_fit(&lx, &ly);
    Ok(PowerLawFit {
        exponent: b,
        prefactor: a.exp(),
        r_squared: r2,
    })
}

/// Fits `log value = log prefactor − rate·t`.
pub fn fit_exponential_decay<S: Real>(times: &[S], values: &[S]) -> Result<ExponentialFit<S>> {
    check_inputs(times, values, false)?;
    let ly: Vec<S> = values.iter().map(|v| v.ln()).collect();
    let (a, b, r2) = linear_fit(times, &ly);
    Ok(ExponentialFit {
        rate: -b,
        prefactor: a.exp(),
        r_squared: r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn exact_power_law() {
        let etas = [1e-4, 1e-3, 1e-2, 1e-1];
        let vals: Vec<f64> = etas.iter().map(|e: &f64| 2.0 * e.sqrt()).collect();
        let f = fit_power_law(&etas, &vals).unwrap();
        assert_relative_eq!(f.exponent, 0.5, max_relative = 1e-12);
        assert_relative_eq!(f.prefactor, 2.0, max_relative = 1e-12);
        assert_relative_eq!(f.r_squared, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn constant_values_give_zero_exponent() {
        let f = fit_power_law::<f64>(&[0.1, 1.0, 10.0], &[3.0, 3.0, 3.0]).unwrap();
        assert!(f.exponent.abs() < 1e-14);
        assert_relative_eq!(f.prefactor, 3.0, max_relative = 1e-14);
    }

    #[test]
    fn noisy_quarter_power() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let etas: Vec<f64> = (0..12).map(|k| 10f64.powf(-4.0 + k as f64 / 3.0)).collect();
        let vals: Vec<f64> = etas
            .iter()
            .map(|e| e.powf(0.25) * (1.0 + 0.01 * (2.0 * rng.random::<f64>() - 1.0)))
            .collect();
        let f = fit_power_law(&etas, &vals).unwrap();
        assert!((f.exponent - 0.25).abs() < 0.02);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_power_law(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(fit_power_law(&[1.0, 2.0, 3.0], &[1.0, 0.0, 2.0]).is_err());
        assert!(fit_power_law(&[1.0, -2.0, 3.0], &[1.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn exponential_decay_rate() {
        let ts = [0.0, 0.5, 1.0, 2.0];
        let vals: Vec<f64> = ts.iter().map(|t: &f64| 3.0 * (-1.7 * t).exp()).collect();
        let f = fit_exponential_decay(&ts, &vals).unwrap();
        assert_relative_eq!(f.rate, 1.7, max_relative = 1e-12);
        assert_relative_eq!(f.prefactor, 3.0, max_relative = 1e-12);
    }
}
