use crate::cheb::ChebTable;
use crate::error::{invalid, Result};
use crate::free::{smoothed_evolution_kernel, SpectralParams};
use crate::perturbed::{spectral_decompose, BoxSpec, Potential, SpectralDecomposition};
use crate::quad::{uniform_breaks, CompositeRule, GaussLegendre};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Radial initial data on ℝ³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    /// e^{−ρ²/2}, ρ = r/width.
    Gaussian { width: f64 },
    /// (5 − ρ²)e^{−ρ²/2}/2: its Fourier transform has no |ξ|² term at 0.
    FlatGaussian { width: f64 },
}

impl InitialData {
    pub fn width(&self) -> f64 {
        match *self {
            InitialData::Gaussian { width } | InitialData::FlatGaussian { width } => width,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width() > 0.0 && self.width().is_finite()) {
            return invalid("initial data width must be positive");
        }
        Ok(())
    }

    pub fn value(&self, r: f64) -> f64 {
        let x = r / self.width();
        let g = (-0.5 * x * x).exp();
        match self {
            InitialData::Gaussian { .. } => g,
            InitialData::FlatGaussian { .. } => 0.5 * (5.0 - x * x) * g,
        }
    }

    /// Radius beyond which |f| < 1e−17 max |f|.
    pub fn support_radius(&self) -> f64 {
        9.5 * self.width()
    }

    /// Same profile dilated by s.
    pub fn dilated(&self, s: f64) -> Self {
        match *self {
            InitialData::Gaussian { width } => InitialData::Gaussian { width: width * s },
            InitialData::FlatGaussian { width } => InitialData::FlatGaussian { width: width * s },
        }
    }

    /// Radial rule on [0, support] with panels of width ≤ width/8.
    fn rule(&self) -> CompositeRule {
        CompositeRule::from_breaks(&uniform_breaks(0.0, self.support_radius(), self.width() / 8.0), &GaussLegendre::new(10))
    }

    /// ‖f‖_{L^p(ℝ³)}, p = ∞ allowed.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let rule = self.rule();
        if p.is_infinite() {
            return rule.nodes.iter().map(|&r| self.value(r).abs()).fold(0.0, f64::max);
        }
        let s: f64 = rule.nodes.iter().zip(&rule.weights).map(|(&r, &w)| w * 4.0 * PI * r * r * self.value(r).abs().powf(p)).sum();
        s.powf(1.0 / p)
    }
}

fn check_dim(p: &SpectralParams) -> Result<()> {
    if p.n != 3 {
        return invalid("radial evolution is implemented for n = 3");
    }
    Ok(())
}

/// e^{−itH₀}(−Δ)^{(γ−n)/2} f on ℝ³ by convolution with the free kernel.
///
/// Spherical means reduce the convolution to Φ_t(r+s) − Φ_t(|r−s|) with
/// Φ_t(ρ) = ∫₀^ρ K_t(σ)σ dσ = t^{(2−γ)/(2α)} Ψ(ρ t^{−1/(2α)}), Ψ tabulated once.
#[derive(Debug, Clone)]
pub struct FreeKernelEvolver {
    alpha: f64,
    gamma: f64,
    data: InitialData,
    /// K^γ₁(x)·x.
    kx: ChebTable,
    psi: ChebTable,
    pub x_max: f64,
    freq_max: f64,
}

impl FreeKernelEvolver {
    /// Valid for observation radii ≤ `r_obs` and times ≥ `t_min`.
    pub fn new(p: &SpectralParams, gamma: f64, data: InitialData, r_obs: f64, t_min: f64) -> Result<Self> {
        check_dim(p)?;
        data.validate()?;
        if !(t_min > 0.0 && r_obs > 0.0) {
            return invalid("evolution needs t_min > 0 and r_obs > 0");
        }
        let a2 = 2.0 * p.alpha;
        let x_max = (r_obs + data.support_radius()) * t_min.powf(-1.0 / a2) * 1.01;
        // Stationary wavenumber of K₁ at x, the local oscillation frequency.
        let freq_max = if p.alpha == 1.0 { 0.5 * x_max } else { (x_max / a2).powf(1.0 / (a2 - 1.0)) };
        let width = (1.5 / freq_max.max(1.0)).min(0.25);
        let f = |x: f64| smoothed_evolution_kernel(p, gamma, 1.0, x).unwrap_or_default() * x;
        let kx = ChebTable::uniform(0.0, x_max, width, 16, f);
        let psi = kx.antiderivative();
        Ok(Self { alpha: p.alpha, gamma, data, kx, psi, x_max, freq_max })
    }

    fn scales(&self, t: f64) -> (f64, f64) {
        let a2 = 2.0 * self.alpha;
        (t.powf(-1.0 / a2), t.powf((2.0 - self.gamma) / a2))
    }

    /// u(t, r) at the given radii.
    pub fn sample(&self, t: f64, radii: &[f64]) -> Result<Vec<Complex64>> {
        let (xs, amp) = self.scales(t);
        let smax = self.data.support_radius();
        if radii.iter().any(|&r| (r + smax) * xs > self.x_max) {
            return invalid(format!("t = {t} is earlier than the tabulated range allows"));
        }
        let gl = GaussLegendre::new(12);
        let h = (0.25 * self.data.width()).min(1.0 / (self.freq_max.max(1.0) * xs));
        let out = crate::par::map_range(radii.len(), |k| {
            let r = radii[k];
            let mut breaks = uniform_breaks(0.0, smax, h);
            if r > 0.0 && r < smax {
                breaks.push(r);
                breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
            }
            let rule = CompositeRule::from_breaks(&breaks, &gl);
            if r < 1e-6 * self.data.width() {
                // u(t, 0) = ∫ K_t(s) f(s) 4πs² ds, with K_t(s)s = amp·xs·(K₁x)(s xs).
                let s: Complex64 = rule.nodes.iter().zip(&rule.weights).map(|(&s, &w)| self.kx.eval(s * xs) * (w * 4.0 * PI * s * self.data.value(s))).sum();
                return s * (amp * xs);
            }
            let s: Complex64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&s, &w)| (self.psi.eval((r + s) * xs) - self.psi.eval((r - s).abs() * xs)) * (w * s * self.data.value(s)))
                .sum();
            s * (2.0 * PI * amp / r)
        });
        Ok(out)
    }
}

/// Evolution in the eigenbasis of the box Hamiltonian, with a boundary-energy monitor.
#[derive(Debug, Clone)]
pub struct BoxEvolver {
    pub sd: SpectralDecomposition,
    /// Eigenbasis functions at `obs` radii.
    obs_basis: DMatrix<f64>,
    pub obs: Vec<f64>,
    /// Eigenbasis functions at the norm quadrature nodes of [0, L].
    quad_basis: DMatrix<f64>,
    quad_nodes: Vec<f64>,
    /// Weights including 4πr².
    quad_weights: Vec<f64>,
    outer_from: usize,
}

/// Which part of the spectrum the evolution keeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalWeights {
    /// Drop bound modes (P_ac surrogate).
    pub project_ac: bool,
    /// Multiply mode j by E_j^{(γ−n)/(2α)}; `None` for γ = n.
    pub gamma: Option<f64>,
}

impl BoxEvolver {
    pub fn new(p: &SpectralParams, pot: &Potential, spec: &BoxSpec, obs: Vec<f64>) -> Result<Self> {
        check_dim(p)?;
        let sd = spectral_decompose(p, pot, spec)?;
        let l = spec.radius;
        let c = (2.0 * PI * l).sqrt().recip();
        let basis = |rs: &[f64]| {
            let sines = DMatrix::from_fn(rs.len(), sd.wavenumbers.len(), |i, k| {
                let (r, kk) = (rs[i], sd.wavenumbers[k]);
                c * if r * kk < 1e-8 { kk } else { (kk * r).sin() / r }
            });
            sines * &sd.eigenvectors
        };
        // Eight nodes per unit length resolve wavenumbers up to k_max ≈ 6.
        let step = (1.0f64).min(8.0 / spec.k_max.max(1.0));
        let rule = CompositeRule::from_breaks(&uniform_breaks(0.0, l, step), &GaussLegendre::new(8));
        let quad_weights: Vec<f64> = rule.nodes.iter().zip(&rule.weights).map(|(&r, &w)| w * 4.0 * PI * r * r).collect();
        let outer_from = rule.nodes.partition_point(|&r| r < 0.8 * l);
        Ok(Self { obs_basis: basis(&obs), quad_basis: basis(&rule.nodes), obs, quad_nodes: rule.nodes, quad_weights, outer_from, sd })
    }

    /// Eigen-coefficients ⟨e_j, f⟩ of radial data, reweighted.
    pub fn modal(&self, data: &InitialData, weights: ModalWeights) -> Result<DVector<f64>> {
        let l = self.sd.box_radius;
        if data.support_radius() > 0.5 * l {
            return invalid("initial data do not fit in half the box");
        }
        let c = (2.0 * PI * l).sqrt().recip();
        let rule = data.rule();
        let sine = DVector::from_fn(self.sd.wavenumbers.len(), |k, _| {
            let kk = self.sd.wavenumbers[k];
            c * rule.nodes.iter().zip(&rule.weights).map(|(&r, &w)| w * 4.0 * PI * r * data.value(r) * (kk * r).sin()).sum::<f64>()
        });
        let mut a = self.sd.eigenvectors.transpose() * sine;
        let p = &self.sd.params;
        for (j, e) in self.sd.eigenvalues.iter().enumerate() {
            if weights.project_ac && *e <= 0.0 {
                a[j] = 0.0;
            } else if let Some(g) = weights.gamma {
                a[j] *= e.abs().powf((g - p.nf()) / (2.0 * p.alpha));
            }
        }
        Ok(a)
    }

    fn phased(&self, a: &DVector<f64>, t: f64) -> (DVector<f64>, DVector<f64>) {
        let re = DVector::from_fn(a.len(), |j, _| a[j] * (t * self.sd.eigenvalues[j]).cos());
        let im = DVector::from_fn(a.len(), |j, _| -a[j] * (t * self.sd.eigenvalues[j]).sin());
        (re, im)
    }

    fn combine(b: &DMatrix<f64>, re: &DVector<f64>, im: &DVector<f64>) -> Vec<Complex64> {
        let (x, y) = (b * re, b * im);
        x.iter().zip(y.iter()).map(|(&a, &b)| Complex64::new(a, b)).collect()
    }

    /// u(t) at the observation radii.
    pub fn sample(&self, a: &DVector<f64>, t: f64) -> Vec<Complex64> {
        let (re, im) = self.phased(a, t);
        Self::combine(&self.obs_basis, &re, &im)
    }

    /// (‖u(t)‖_{L^q(ball)}, share of mass in r > 0.8L); q = ∞ allowed.
    pub fn norm_and_monitor(&self, a: &DVector<f64>, t: f64, q: f64) -> (f64, f64) {
        let (re, im) = self.phased(a, t);
        let u = Self::combine(&self.quad_basis, &re, &im);
        let mass: f64 = u.iter().zip(&self.quad_weights).map(|(z, w)| w * z.norm_sqr()).sum();
        let outer: f64 = u[self.outer_from..].iter().zip(&self.quad_weights[self.outer_from..]).map(|(z, w)| w * z.norm_sqr()).sum();
        let norm = if q.is_infinite() {
            u.iter().map(|z| z.norm()).fold(0.0, f64::max)
        } else {
            u.iter().zip(&self.quad_weights).map(|(z, w)| w * z.norm().powf(q)).sum::<f64>().powf(1.0 / q)
        };
        (norm, if mass > 0.0 { outer / mass } else { 0.0 })
    }

    pub fn quad_len(&self) -> usize {
        self.quad_nodes.len()
    }
}
