use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Even smooth cutoff χ with χ = 1 on [0, λ₀], χ = 0 beyond 2λ₀, and χ̃ = 1 − χ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub lambda0: f64,
}

impl CutoffSpec {
    pub fn new(lambda0: f64) -> Result<Self> {
        if !(lambda0 > 0.0) {
            return invalid("cutoff lambda0 must be positive");
        }
        Ok(Self { lambda0 })
    }

    /// χ(λ), C^∞ transition on [λ₀, 2λ₀].
    pub fn chi(&self, lambda: f64) -> f64 {
        let x = (lambda.abs() - self.lambda0) / self.lambda0;
        if x <= 0.0 {
            1.0
        } else if x >= 1.0 {
            0.0
        } else {
            let f = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
            f(1.0 - x) / (f(1.0 - x) + f(x))
        }
    }

    pub fn chi_tilde(&self, lambda: f64) -> f64 {
        1.0 - self.chi(lambda)
    }
}

/// Smooth high-frequency window: 1 on [0, Λ/2], raised cosine to 0 at Λ.
pub fn cosine_window(lambda: f64, cap: f64) -> f64 {
    let x = lambda / cap;
    if x <= 0.5 {
        1.0
    } else if x >= 1.0 {
        0.0
    } else {
        0.5 * (1.0 + (std::f64::consts::PI * (2.0 * x - 1.0)).cos())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_of_unity() {
        let c = CutoffSpec::new(0.2).unwrap();
        for k in 0..100 {
            let l = k as f64 * 0.005;
            assert!((c.chi(l) + c.chi_tilde(l) - 1.0).abs() < 1e-15);
            if l > 0.4 {
                assert_eq!(c.chi(l), 0.0);
            }
        }
        assert_eq!(c.chi(-0.1), c.chi(0.1));
    }
}
