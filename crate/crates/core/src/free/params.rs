use crate::error::{invalid, Result};
use crate::special::gamma;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// The pair (n, α) for H₀ = (−Δ)^α on ℝⁿ.
///
/// α = 1 is accepted so the classical Laplacian can serve as an oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub n: usize,
    pub alpha: f64,
}

impl SpectralParams {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n < 3 {
            return invalid(format!("dimension n = {n} must be at least 3"));
        }
        if !(alpha >= 1.0) || !alpha.is_finite() {
            return invalid(format!("order alpha = {alpha} must satisfy alpha >= 1"));
        }
        if !((n as f64) > 2.0 * alpha) {
            return invalid(format!("constraint n > 2*alpha violated: n = {n}, 2*alpha = {}", 2.0 * alpha));
        }
        Ok(Self { n, alpha })
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Bessel order n/2 − 1.
    pub fn nu(&self) -> f64 {
        self.nf() / 2.0 - 1.0
    }

    pub fn is_odd(&self) -> bool {
        self.n % 2 == 1
    }

    /// Growth exponent (n+1)/2 − 2α of |F|.
    pub fn envelope_growth(&self) -> f64 {
        (self.nf() + 1.0) / 2.0 - 2.0 * self.alpha
    }

    /// Decay exponent −(n−1)/2 of |F_±|.
    pub fn hankel_envelope(&self) -> f64 {
        -(self.nf() - 1.0) / 2.0
    }

    /// Prefactor exponent n − 2α of the spectral jump.
    pub fn jump_prefactor(&self) -> f64 {
        self.nf() - 2.0 * self.alpha
    }

    /// Dispersive rate n/(2α).
    pub fn dispersive_rate(&self) -> f64 {
        self.nf() / (2.0 * self.alpha)
    }

    /// c_{n,α} in G₀(r) = c_{n,α} r^{2α−n}.
    pub fn riesz_constant(&self) -> f64 {
        let a = self.alpha;
        let h = self.nf() / 2.0;
        gamma(h - a) / (4f64.powf(a) * PI.powf(h) * gamma(a))
    }

    /// Default small exponent η = 0.1·min(1, n − 2α).
    pub fn default_eta(&self) -> f64 {
        0.1 * self.jump_prefactor().min(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constraint_is_named() {
        let e = SpectralParams::new(3, 1.6).unwrap_err().to_string();
        assert!(e.contains("n > 2*alpha"), "{e}");
    }

    #[test]
    fn newtonian_constant() {
        let p = SpectralParams::new(3, 1.0).unwrap();
        assert!((p.riesz_constant() - 1.0 / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn derived_exponents() {
        let p = SpectralParams::new(3, 1.25).unwrap();
        assert_eq!(p.envelope_growth(), -0.5);
        assert_eq!(p.hankel_envelope(), -1.0);
        assert_eq!(p.jump_prefactor(), 0.5);
        assert_eq!(p.dispersive_rate(), 1.2);
    }
}
