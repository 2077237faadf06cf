use crate::error::{invalid, Result};
use crate::radial::RadialGrid;
use serde::{Deserialize, Serialize};

/// Shape of a radial potential, before the coupling constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// e^{−(r/w)²}
    Gaussian { width: f64 },
    /// e^{1 − 1/(1 − (r/w)²)} for r < w, zero beyond; peak value 1.
    Bump { width: f64 },
    /// ⟨r⟩^{−β} = (1 + r²)^{−β/2}
    PowerLaw { beta: f64 },
    /// Linear interpolation of samples (r, V(r)), zero beyond the last radius.
    Tabulated { r: Vec<f64>, v: Vec<f64> },
}

/// V(r) = c·profile(r).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub profile: Profile,
    pub coupling: f64,
}

impl Potential {
    pub fn new(profile: Profile, coupling: f64) -> Result<Self> {
        match &profile {
            Profile::Gaussian { width } | Profile::Bump { width } if !(*width > 0.0) => {
                return invalid("potential width must be positive")
            }
            Profile::PowerLaw { beta } if !(*beta > 0.0) => return invalid("decay exponent beta must be positive"),
            Profile::Tabulated { r, v } => {
                if r.len() != v.len() || r.len() < 2 {
                    return invalid("tabulated potential needs matching r and V columns of length >= 2");
                }
                if r.windows(2).any(|w| w[1] <= w[0]) || r[0] < 0.0 {
                    return invalid("tabulated radii must be nonnegative and strictly increasing");
                }
            }
            _ => {}
        }
        if !coupling.is_finite() {
            return invalid("coupling must be finite");
        }
        Ok(Self { profile, coupling })
    }

    pub fn zero() -> Self {
        Self { profile: Profile::Gaussian { width: 1.0 }, coupling: 0.0 }
    }

    pub fn gaussian(coupling: f64) -> Self {
        Self { profile: Profile::Gaussian { width: 1.0 }, coupling }
    }

    pub fn bump(width: f64, coupling: f64) -> Self {
        Self { profile: Profile::Bump { width }, coupling }
    }

    /// The same profile with the coupling replaced.
    pub fn with_coupling(&self, coupling: f64) -> Self {
        Self { profile: self.profile.clone(), coupling }
    }

    /// Declared decay exponent β; `None` for compactly supported or Gaussian profiles.
    pub fn beta(&self) -> Option<f64> {
        match &self.profile {
            Profile::PowerLaw { beta } => Some(*beta),
            _ => None,
        }
    }

    pub fn shape(&self, r: f64) -> f64 {
        match &self.profile {
            Profile::Gaussian { width } => (-(r / width).powi(2)).exp(),
            Profile::Bump { width } => {
                let x = r / width;
                if x < 1.0 { (1.0 - 1.0 / (1.0 - x * x)).exp() } else { 0.0 }
            }
            Profile::PowerLaw { beta } => (1.0 + r * r).powf(-beta / 2.0),
            Profile::Tabulated { r: rs, v } => {
                if r > *rs.last().unwrap() {
                    return 0.0;
                }
                if r <= rs[0] {
                    return v[0];
                }
                let k = rs.partition_point(|&x| x < r);
                let t = (r - rs[k - 1]) / (rs[k] - rs[k - 1]);
                v[k - 1] * (1.0 - t) + v[k] * t
            }
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.coupling * self.shape(r)
    }

    /// v = |V|^{1/2}
    pub fn v(&self, r: f64) -> f64 {
        self.value(r).abs().sqrt()
    }

    /// U = sign V, with U = 1 where V = 0.
    pub fn u(&self, r: f64) -> f64 {
        if self.value(r) < 0.0 { -1.0 } else { 1.0 }
    }

    pub fn is_zero(&self) -> bool {
        self.coupling == 0.0
    }

    /// Radius beyond which |V| is below `rel` times its peak.
    pub fn support_radius(&self, rel: f64) -> f64 {
        match &self.profile {
            Profile::Gaussian { width } => width * (-rel.ln()).sqrt(),
            Profile::Bump { width } => *width,
            Profile::PowerLaw { beta } => (rel.powf(-2.0 / beta) - 1.0).max(0.0).sqrt(),
            Profile::Tabulated { r, .. } => *r.last().unwrap(),
        }
    }

    /// Samples of (V, v, U) on a grid.
    pub fn sample(&self, grid: &RadialGrid) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let vv: Vec<f64> = grid.nodes.iter().map(|&r| self.value(r)).collect();
        let v = vv.iter().map(|x| x.abs().sqrt()).collect();
        let u = vv.iter().map(|&x| if x < 0.0 { -1.0 } else { 1.0 }).collect();
        (vv, v, u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_identities() {
        let pot = Potential::gaussian(-2.0);
        for &r in &[0.0, 0.5, 2.0] {
            let (v, u) = (pot.v(r), pot.u(r));
            assert!((u * v * v - pot.value(r)).abs() < 1e-15);
            assert!((v * v - pot.value(r).abs()).abs() < 1e-15);
        }
    }

    #[test]
    fn power_law_envelope() {
        let pot = Potential::new(Profile::PowerLaw { beta: 5.0 }, 0.3).unwrap();
        for &r in &[0.0, 1.0, 10.0] {
            assert!(pot.value(r).abs() <= 0.3 * (1.0 + r * r).powf(-2.5) * (1.0 + 1e-15));
        }
    }

    #[test]
    fn tabulated_interpolates() {
        let pot = Potential::new(Profile::Tabulated { r: vec![0.0, 1.0, 2.0], v: vec![1.0, 3.0, 0.0] }, 1.0).unwrap();
        assert_eq!(pot.value(0.5), 2.0);
        assert_eq!(pot.value(2.5), 0.0);
    }
}
