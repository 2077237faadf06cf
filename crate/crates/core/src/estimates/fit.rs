use crate::error::{invalid, Result};
use crate::free::SpectralParams;
use serde::{Deserialize, Serialize};

/// Least-squares fit of log y against log x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// log₁₀ of the smallest and largest abscissa used.
    pub window_lo: f64,
    pub window_hi: f64,
    pub samples: usize,
    /// Window shorter than 1.5 decades or R² below 0.98.
    pub flagged: bool,
}

impl ExponentFit {
    pub fn decades(&self) -> f64 {
        self.window_hi - self.window_lo
    }

    pub fn within(&self, target: f64, tol: f64) -> bool {
        (self.slope - target).abs() <= tol
    }
}

pub const MIN_DECADES: f64 = 1.5;
pub const MIN_R2: f64 = 0.98;

/// Fit y ≈ C x^slope over samples with x, y > 0.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<ExponentFit> {
    if x.len() != y.len() {
        return invalid("fit abscissa and ordinate differ in length");
    }
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.log10(), b.log10()))
        .collect();
    if pts.len() < 3 {
        return invalid("power-law fit needs at least three positive samples");
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    // Variation at roundoff level is an exact fit.
    let r2 = if syy > 1e-24 * m { 1.0 - ss_res / syy } else { 1.0 };
    let window_lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let window_hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let flagged = window_hi - window_lo < MIN_DECADES || r2 < MIN_R2;
    Ok(ExponentFit { slope, intercept, r2, window_lo, window_hi, samples: pts.len(), flagged })
}

/// Fit restricted to x ∈ [lo, hi].
pub fn fit_power_law_window(x: &[f64], y: &[f64], lo: f64, hi: f64) -> Result<ExponentFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(a, _)| **a >= lo && **a <= hi)
        .map(|(a, b)| (*a, *b))
        .unzip();
    fit_power_law(&xs, &ys)
}

/// Slope of the upper envelope: fits the per-bin maxima of y over log-spaced bins.
///
/// Oscillating quantities bounded by a power law are fitted through their peaks.
pub fn fit_envelope(x: &[f64], y: &[f64], lo: f64, hi: f64, bins_per_decade: usize) -> Result<ExponentFit> {
    let decades = (hi / lo).log10();
    let nb = ((decades * bins_per_decade as f64).round() as usize).max(3);
    let mut best = vec![(0.0f64, 0.0f64); nb];
    for (&a, &b) in x.iter().zip(y) {
        if a < lo || a > hi {
            continue;
        }
        let k = (((a / lo).log10() / decades) * nb as f64).floor() as usize;
        let k = k.min(nb - 1);
        if b > best[k].1 {
            best[k] = (a, b);
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = best.into_iter().filter(|p| p.1 > 0.0).unzip();
    fit_power_law(&xs, &ys)
}

/// The small exponent and tolerances shared by the verification suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub eta: f64,
    pub slope_tol: f64,
    pub identity_tol: f64,
    pub schur_radius: f64,
}

impl ToleranceConfig {
    pub fn new(p: &SpectralParams, eta: f64, slope_tol: f64, identity_tol: f64, schur_radius: f64) -> Result<Self> {
        let cap = 1f64.min(p.jump_prefactor());
        if !(eta > 0.0 && eta < cap) {
            return invalid(format!("eta = {eta} must lie in (0, {cap})"));
        }
        if !(slope_tol > 0.0 && identity_tol > 0.0 && schur_radius > 0.0) {
            return invalid("tolerances must be positive");
        }
        Ok(Self { eta, slope_tol, identity_tol, schur_radius })
    }

    pub fn defaults(p: &SpectralParams) -> Self {
        Self { eta: p.default_eta(), slope_tol: 0.05, identity_tol: 1e-8, schur_radius: 1e3 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let x: Vec<f64> = (0..30).map(|k| 10f64.powf(k as f64 / 10.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-1.2)).collect();
        let f = fit_power_law(&x, &y).unwrap();
        assert!((f.slope + 1.2).abs() < 1e-12 && !f.flagged);
    }

    #[test]
    fn short_window_is_flagged() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y = [1.0, 0.5, 0.25, 0.125];
        assert!(fit_power_law(&x, &y).unwrap().flagged);
    }

    #[test]
    fn eta_range_enforced() {
        let p = SpectralParams::new(3, 1.25).unwrap();
        assert!(ToleranceConfig::new(&p, 0.6, 0.05, 1e-8, 1e3).is_err());
        assert!(ToleranceConfig::new(&p, 0.05, 0.05, 1e-8, 1e3).is_ok());
    }
}
