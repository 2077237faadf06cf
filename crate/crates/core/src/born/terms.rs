use crate::error::{invalid, Error, Result};
use crate::free::SpectralParams;
use crate::perturbed::{assemble_wave_operator, Potential, PotentialSetup, WaveOptions};
use crate::quad::{geometric_breaks, CompositeRule, GaussLegendre};
use crate::radial::{fourier_radial_fn, RadialFnOpts, RadialKernel};
use crate::special::sphere_area;
use serde::Serialize;

/// Row-sum (L^∞) and column-sum (L¹) norms of a weighted-coordinate kernel.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SchurNorms {
    pub l1: f64,
    pub linf: f64,
}

impl SchurNorms {
    /// Schur bound on every L^p norm.
    pub fn bound(&self) -> f64 {
        self.l1.max(self.linf)
    }
}

pub fn schur_norms(k: &RadialKernel) -> SchurNorms {
    let sw: Vec<f64> = k.grid.weights.iter().map(|w| w.sqrt()).collect();
    let n = k.len();
    let mut col = vec![0.0; n];
    let mut linf: f64 = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            let a = k.matrix[(i, j)].norm();
            row += a * sw[j] / sw[i];
            col[j] += a * sw[i] / sw[j];
        }
        linf = linf.max(row);
    }
    SchurNorms { l1: col.iter().cloned().fold(0.0, f64::max), linf }
}

#[derive(Debug, Clone, Serialize)]
pub struct BornTerm {
    pub order: usize,
    #[serde(skip)]
    pub kernel: RadialKernel,
    pub schur: SchurNorms,
    /// Relative change of the Schur bound when Λ doubles.
    pub window_change: f64,
    pub lambda_max: f64,
}

/// W_J on the radial subspace: (−1)^J (1/2π²)∫ λ² (R₀⁺V)^Jφ_λ ⊗ φ_λ dλ, windowed at Λ.
pub fn born_term(setup: &PotentialSetup, j: usize, opts: &WaveOptions, tol: f64) -> Result<BornTerm> {
    if j == 0 {
        return invalid("Born order J must be >= 1");
    }
    let n = setup.table.params.n as f64;
    if let Some(beta) = setup.potential.beta() {
        if beta <= n {
            return invalid(format!("Born terms need decay beta > n = {n}, got {beta}"));
        }
    }
    let mut o = *opts;
    o.j_max = j;
    o.window = true;
    let w = assemble_wave_operator(setup, None, &o)?;
    let kernel = w.born_matrix(j)?;
    let schur = schur_norms(&kernel);
    o.lambda_max *= 2.0;
    let w2 = assemble_wave_operator(setup, None, &o)?;
    let s2 = schur_norms(&w2.born_matrix(j)?);
    let change = (s2.bound() - schur.bound()).abs() / schur.bound().max(1e-300);
    if change > tol {
        return Err(Error::TailNotConverged { change });
    }
    Ok(BornTerm { order: j, kernel, schur, window_change: change, lambda_max: opts.lambda_max })
}

/// Which Theorem-1.1 style condition applies for (n, α).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// n < 4α − 1: weighted L² norm.
    WeightedL2,
    /// n = 4α − 1: weighted H^δ norm.
    WeightedSobolev,
    /// n > 4α − 1: L^q norm of the Fourier transform.
    FourierLq,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisNorms {
    pub weighted_l2: f64,
    pub weighted_sobolev: f64,
    pub fourier_lq: f64,
    pub lq_exponent: f64,
    pub condition: Condition,
    /// Norm for the selected condition.
    pub selected: f64,
}

/// ∫₀^∞ g(r) dr on geometric panels, `None` if the dyadic increments do not decay.
fn radial_integral<F: Fn(f64) -> f64>(g: F, r0: f64) -> Option<f64> {
    let gl = GaussLegendre::new(20);
    let mut total = CompositeRule::from_breaks(&[&[0.0][..], &geometric_breaks(1e-8 * r0, r0, 4)[..]].concat(), &gl).integrate(&g);
    let mut prev = f64::INFINITY;
    let mut r = r0;
    for _ in 0..60 {
        let inc = CompositeRule::geometric(r, 10.0 * r, 4, &gl).integrate(&g);
        total += inc;
        if inc.abs() <= 1e-13 * total.abs() {
            return Some(total);
        }
        if inc.abs() > 0.5 * prev.abs() && r > 1e3 * r0 {
            return None;
        }
        prev = inc;
        r *= 10.0;
    }
    None
}

/// The three potential norms of the small-potential theory and the one selected by (n, α).
pub fn hypothesis_norms(p: &SpectralParams, pot: &Potential, delta: f64, sigma: f64) -> Result<HypothesisNorms> {
    if !(delta > 0.0 && delta < 0.5) {
        return invalid("delta must lie in (0, 1/2)");
    }
    let (n, a) = (p.n as f64, p.alpha);
    let area = sphere_area(p.n);
    let jb = |r: f64| (1.0 + r * r).sqrt();
    let scale = pot.support_radius(1e-3).max(1.0);
    let gamma = (4.0 * a + 1.0 - n) / 2.0 + delta;
    let weighted_l2 = radial_integral(|r| (jb(r).powf(gamma) * pot.value(r)).powi(2) * area * r.powf(n - 1.0), scale)
        .map(f64::sqrt)
        .unwrap_or(f64::INFINITY);
    let fopts = RadialFnOpts { scale, support: match pot.profile {
        crate::perturbed::Profile::Bump { width } => Some(width),
        _ => None,
    }, tol: 1e-10 };
    let ft = |w: f64, rho: f64| fourier_radial_fn(p.n, |r| jb(r).powf(w) * pot.value(r), rho, fopts);
    let spectral = |w: f64, integrand: &dyn Fn(f64, f64) -> f64| -> Result<Option<f64>> {
        let gl = GaussLegendre::new(12);
        let mut b = vec![0.0];
        b.extend(geometric_breaks(1e-6, 1.0, 4));
        b.extend(geometric_breaks(1.0, 200.0 / scale.min(1.0), 6).into_iter().skip(1));
        let rule = CompositeRule::from_breaks(&b, &gl);
        let mut acc = 0.0;
        for (&rho, &wt) in rule.nodes.iter().zip(&rule.weights) {
            let f = match ft(w, rho) {
                Ok(f) => f,
                Err(Error::Quadrature { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            acc += wt * integrand(rho, f) * area * rho.powf(n - 1.0);
        }
        Ok(if acc.is_finite() { Some(acc) } else { None })
    };
    let sob = spectral(1.0 + delta, &|rho, f| (1.0 + rho * rho).powf(delta) * f * f)?
        .map(|x| (x / (2.0 * std::f64::consts::PI).powf(n)).sqrt())
        .unwrap_or(f64::INFINITY);
    let q = (n - 1.0 - delta) / (n - 2.0 * a - delta);
    let flq = spectral(sigma, &|_, f| f.abs().powf(q))?.map(|x| x.powf(1.0 / q)).unwrap_or(f64::INFINITY);
    let condition = if (n - (4.0 * a - 1.0)).abs() < 1e-12 {
        Condition::WeightedSobolev
    } else if n < 4.0 * a - 1.0 {
        Condition::WeightedL2
    } else {
        Condition::FourierLq
    };
    let selected = match condition {
        Condition::WeightedL2 => weighted_l2,
        Condition::WeightedSobolev => sob,
        Condition::FourierLq => flq,
    };
    Ok(HypothesisNorms { weighted_l2, weighted_sobolev: sob, fourier_lq: flq, lq_exponent: q, condition, selected })
}
