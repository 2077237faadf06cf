use super::evolution::{BoxEvolver, FreeKernelEvolver, InitialData, ModalWeights};
use super::fit::{fit_power_law_window, ExponentFit, MIN_DECADES};
use crate::error::{invalid, Error, Result};
use crate::free::SpectralParams;
use crate::perturbed::{BoxSpec, Potential};
use crate::quad::geometric_breaks;
use serde::{Deserialize, Serialize};

/// Time sampling, observation grid, box and fit-window policy shared by the decay fits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecayOptions {
    pub t_min: f64,
    pub t_max: f64,
    /// Log-spaced samples in [t_min, t_max].
    pub samples: usize,
    /// Sup-norms are taken over r ∈ [0, obs_radius].
    pub obs_radius: f64,
    pub obs_points: usize,
    pub box_radius: f64,
    pub k_max: f64,
    /// Largest admissible share of mass in the outer fifth of the box.
    pub monitor_cut: f64,
    /// Leading decades of t excluded from the fit.
    pub skip_decades: f64,
    /// Dilation range and density for the L^p → L^{p'} norm search.
    pub dilation_lo: f64,
    pub dilation_hi: f64,
    pub dilations_per_decade: usize,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self {
            t_min: 0.1,
            t_max: 100.0,
            samples: 31,
            obs_radius: 10.0,
            obs_points: 81,
            box_radius: 400.0,
            k_max: 5.0,
            monitor_cut: 0.01,
            skip_decades: 0.5,
            dilation_lo: 0.5,
            dilation_hi: 16.0,
            dilations_per_decade: 10,
        }
    }
}

impl DecayOptions {
    fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_max >= 100.0 * self.t_min) {
            return invalid("decay t-range must span at least 2 decades");
        }
        if self.samples < 4 || self.obs_points < 2 || !(self.obs_radius > 0.0) {
            return invalid("decay fits need >= 4 times and >= 2 observation points");
        }
        if !(self.monitor_cut > 0.0 && self.skip_decades >= 0.0) {
            return invalid("bad fit-window policy");
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let r = (self.t_max / self.t_min).ln();
        (0..self.samples).map(|i| self.t_min * (r * i as f64 / (self.samples - 1) as f64).exp()).collect()
    }

    pub fn observation_radii(&self) -> Vec<f64> {
        (0..self.obs_points).map(|i| self.obs_radius * i as f64 / (self.obs_points - 1) as f64).collect()
    }

    pub fn box_spec(&self) -> BoxSpec {
        BoxSpec { radius: self.box_radius, k_max: self.k_max }
    }
}

/// Sampled decay curve with its boundary monitor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecaySeries {
    pub t: Vec<f64>,
    pub value: Vec<f64>,
    /// Share of mass in r > 0.8L; zero on the free kernel route.
    pub monitor: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayFit {
    pub claim: f64,
    pub fit: ExponentFit,
    /// Fit window in t.
    pub t_lo: f64,
    pub t_hi: f64,
    pub series: DecaySeries,
}

impl DecayFit {
    pub fn passes(&self, tol: f64) -> bool {
        self.fit.within(self.claim, tol) && !self.fit.flagged
    }
}

/// Fit log value against log t after the skip and before the first monitor breach.
pub fn fit_decay_series(series: DecaySeries, claim: f64, opts: &DecayOptions) -> Result<DecayFit> {
    let t_lo = series.t[0] * 10f64.powf(opts.skip_decades) * (1.0 - 1e-12);
    let t_hi = series
        .t
        .iter()
        .zip(&series.monitor)
        .find(|(_, m)| **m > opts.monitor_cut)
        .map(|(t, _)| *t * (1.0 - 1e-12))
        .unwrap_or(f64::INFINITY)
        .min(series.t[series.t.len() - 1] * (1.0 + 1e-12));
    let used: Vec<f64> = series.t.iter().cloned().filter(|&t| t >= t_lo && t < t_hi).collect();
    let span = if used.len() < 2 { 0.0 } else { (used[used.len() - 1] / used[0]).log10() };
    if used.len() < 4 || span < MIN_DECADES - 1e-9 {
        return Err(Error::Coverage(format!(
            "decay window [{t_lo:.3e}, {t_hi:.3e}] spans {span:.2} decades; boundary reflection cuts it below {MIN_DECADES}"
        )));
    }
    let fit = fit_power_law_window(&series.t, &series.value, t_lo, t_hi)?;
    Ok(DecayFit { claim, fit, t_lo, t_hi, series })
}

fn sup(v: &[num_complex::Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// sup_r |e^{−itH}P_ac H^{(γ−n)/(2α)} f| / ‖f‖₁ over the observation ball.
///
/// V = 0 uses the free convolution kernel; otherwise the box eigenbasis.
pub fn smoothing_series(p: &SpectralParams, pot: &Potential, gamma: f64, data: &InitialData, opts: &DecayOptions) -> Result<DecaySeries> {
    opts.validate()?;
    let nf = p.nf();
    if !(gamma > 0.0 && gamma <= nf * p.alpha) {
        return invalid(format!("smoothing order gamma = {gamma} outside (0, n*alpha]"));
    }
    let t = opts.times();
    let obs = opts.observation_radii();
    let l1 = data.lp_norm(1.0);
    if pot.is_zero() {
        let ev = FreeKernelEvolver::new(p, gamma, *data, opts.obs_radius, opts.t_min)?;
        let mut value = Vec::with_capacity(t.len());
        for &s in &t {
            value.push(sup(&ev.sample(s, &obs)?) / l1);
        }
        let monitor = vec![0.0; t.len()];
        return Ok(DecaySeries { t, value, monitor });
    }
    let ev = BoxEvolver::new(p, pot, &opts.box_spec(), obs)?;
    let g = if gamma == nf { None } else { Some(gamma) };
    let a = ev.modal(data, ModalWeights { project_ac: true, gamma: g })?;
    let (mut value, mut monitor) = (vec![], vec![]);
    for &s in &t {
        value.push(sup(&ev.sample(&a, s)) / l1);
        monitor.push(ev.norm_and_monitor(&a, s, 2.0).1);
    }
    Ok(DecaySeries { t, value, monitor })
}

/// Sup-norm decay of e^{−itH}P_ac(H) f, compared with −n/(2α).
pub fn dispersive_fit(p: &SpectralParams, pot: &Potential, data: &InitialData, opts: &DecayOptions) -> Result<DecayFit> {
    smoothing_decay_fit(p, pot, p.nf(), data, opts)
}

/// Sup-norm decay of e^{−itH}P_ac H^{(γ−n)/(2α)} f, compared with −γ/(2α).
pub fn smoothing_decay_fit(p: &SpectralParams, pot: &Potential, gamma: f64, data: &InitialData, opts: &DecayOptions) -> Result<DecayFit> {
    let series = smoothing_series(p, pot, gamma, data, opts)?;
    fit_decay_series(series, -gamma / (2.0 * p.alpha), opts)
}

/// sup_x |K^γ_t(x)| sampled on the self-similar grid x = ξ t^{1/(2α)}.
pub fn self_similar_sup(p: &SpectralParams, gamma: f64, t: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
    t.iter()
        .map(|&s| {
            let scale = s.powf(1.0 / (2.0 * p.alpha));
            xi.iter().map(|&x| crate::free::smoothed_evolution_kernel(p, gamma, s, x * scale).map(|z| z.norm())).try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))
        })
        .collect()
}

/// The exponent n/α(1/2 − 1/p).
pub fn interpolated_claim(p: &SpectralParams, pexp: f64) -> f64 {
    p.nf() / p.alpha * (0.5 - 1.0 / pexp)
}

/// max over dilations f_s = f(·/s) of ‖e^{−itH}P_ac f_s‖_{p'} / ‖f_s‖_p.
///
/// The dilation family reaches the operator norm up to a constant: for V = 0
/// the ratio depends on t and s only through t s^{−2α}.
pub fn interpolated_series(p: &SpectralParams, pot: &Potential, pexp: f64, data: &InitialData, opts: &DecayOptions) -> Result<DecaySeries> {
    opts.validate()?;
    if !(1.0..=2.0).contains(&pexp) {
        return invalid(format!("L^p exponent {pexp} outside [1, 2]"));
    }
    if !(opts.dilation_lo > 0.0 && opts.dilation_hi >= opts.dilation_lo && opts.dilations_per_decade > 0) {
        return invalid("bad dilation range");
    }
    let q = if pexp == 1.0 { f64::INFINITY } else { pexp / (pexp - 1.0) };
    let ev = BoxEvolver::new(p, pot, &opts.box_spec(), vec![0.0])?;
    let dil = if opts.dilation_hi > opts.dilation_lo {
        geometric_breaks(opts.dilation_lo, opts.dilation_hi, opts.dilations_per_decade)
    } else {
        vec![opts.dilation_lo]
    };
    let family: Vec<(nalgebra::DVector<f64>, f64)> = dil
        .iter()
        .map(|&s| {
            let d = data.dilated(s);
            Ok((ev.modal(&d, ModalWeights { project_ac: true, gamma: None })?, d.lp_norm(pexp)))
        })
        .collect::<Result<_>>()?;
    let t = opts.times();
    let rows: Vec<(f64, f64)> = crate::par::map_slice(&t, |&s| {
        family
            .iter()
            .map(|(a, n0)| {
                let (nq, m) = ev.norm_and_monitor(a, s, q);
                (nq / n0, m)
            })
            .fold((0.0, 0.0), |best, x| if x.0 > best.0 { x } else { best })
    });
    let (value, monitor) = rows.into_iter().unzip();
    Ok(DecaySeries { t, value, monitor })
}

/// L^p → L^{p'} decay, compared with n/α(1/2 − 1/p).
pub fn interpolated_decay_fit(p: &SpectralParams, pot: &Potential, pexp: f64, data: &InitialData, opts: &DecayOptions) -> Result<DecayFit> {
    let series = interpolated_series(p, pot, pexp, data, opts)?;
    fit_decay_series(series, interpolated_claim(p, pexp), opts)
}
