use super::evolution::{BoxEvolver, InitialData, ModalWeights};
use super::fit::fit_power_law;
use crate::error::{invalid, Error, Result};
use crate::free::SpectralParams;
use crate::perturbed::{BoxSpec, Potential};
use crate::quad::{geometric_breaks, CompositeRule, GaussLegendre};
use serde::{Deserialize, Serialize};

/// Time grid and box for the mixed-norm computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StrichartzOptions {
    /// First panel is [0, t0]; geometric panels follow up to t_max.
    pub t0: f64,
    pub t_max: f64,
    pub panels_per_decade: usize,
    pub order: usize,
    pub box_radius: f64,
    pub k_max: f64,
    pub monitor_cut: f64,
    /// Decades before the cut time used to fit the tail slope.
    pub tail_fit_decades: f64,
}

impl Default for StrichartzOptions {
    fn default() -> Self {
        Self { t0: 1e-3, t_max: 100.0, panels_per_decade: 4, order: 4, box_radius: 400.0, k_max: 5.0, monitor_cut: 0.01, tail_fit_decades: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrichartzNorm {
    pub q: f64,
    pub r: f64,
    /// ‖u‖_{L^q_t L^r_x} over t ≥ 0.
    pub mixed: f64,
    pub data_l2: f64,
    /// mixed / ‖f‖₂.
    pub constant: f64,
    pub t_cut: f64,
    /// ∫_{t_cut}^∞ ‖u‖_r^q dt over the total.
    pub tail_share: f64,
    pub tail_slope: f64,
}

/// The q paired with r by 2/q = n/α(1/2 − 1/r); ∞ at r = 2.
pub fn admissible_q(p: &SpectralParams, r: f64) -> Result<f64> {
    if !(r >= 2.0 && r.is_finite()) {
        return invalid(format!("Strichartz exponent r = {r} outside [2, inf)"));
    }
    let s = p.nf() / p.alpha * (0.5 - 1.0 / r);
    Ok(if s == 0.0 { f64::INFINITY } else { 2.0 / s })
}

fn check_pair(p: &SpectralParams, q: f64, r: f64) -> Result<()> {
    let qa = admissible_q(p, r)?;
    let ok = if qa.is_infinite() { q.is_infinite() } else { q.is_finite() && (2.0 / q - 2.0 / qa).abs() <= 1e-12 };
    if !ok {
        return invalid(format!("(q, r) = ({q}, {r}) is not admissible; r = {r} needs q = {qa}"));
    }
    if qa.is_finite() && qa < 2.0 {
        return invalid(format!("r = {r} gives q = {qa} < 2"));
    }
    Ok(())
}

/// ‖e^{−itH}P_ac f‖_{L^q_t L^r_x} with the time integral cut where the box
/// monitor exceeds its threshold and the remainder extrapolated from the
/// fitted power-law decay of ‖u(t)‖_r.
pub fn strichartz_norm(p: &SpectralParams, pot: &Potential, q: f64, r: f64, data: &InitialData, opts: &StrichartzOptions) -> Result<StrichartzNorm> {
    check_pair(p, q, r)?;
    if !(opts.t0 > 0.0 && opts.t_max > 10.0 * opts.t0 && opts.panels_per_decade > 0 && opts.order > 0) {
        return invalid("bad Strichartz time grid");
    }
    let ev = BoxEvolver::new(p, pot, &BoxSpec { radius: opts.box_radius, k_max: opts.k_max }, vec![0.0])?;
    let a = ev.modal(data, ModalWeights { project_ac: true, gamma: None })?;
    let data_l2 = data.lp_norm(2.0);
    let mut breaks = vec![0.0];
    breaks.extend(geometric_breaks(opts.t0, opts.t_max, opts.panels_per_decade));
    let gl = GaussLegendre::new(opts.order);
    let rule = CompositeRule::from_breaks(&breaks, &gl);
    let rows: Vec<(f64, f64)> = crate::par::map_slice(&rule.nodes, |&t| ev.norm_and_monitor(&a, t, r));
    if q.is_infinite() {
        let mixed = rows.iter().map(|x| x.0).fold(ev.norm_and_monitor(&a, 0.0, r).0, f64::max);
        return Ok(StrichartzNorm { q, r, mixed, data_l2, constant: mixed / data_l2, t_cut: opts.t_max, tail_share: 0.0, tail_slope: 0.0 });
    }
    // Whole panels before the first monitor breach.
    let per = opts.order;
    let panels = breaks.len() - 1;
    let clean = (0..panels).take_while(|&k| rows[k * per..(k + 1) * per].iter().all(|x| x.1 <= opts.monitor_cut)).count();
    if clean < 2 {
        return Err(Error::Coverage("boundary monitor trips within the first time panels".into()));
    }
    let t_cut = breaks[clean];
    let body: f64 = (0..clean * per).map(|i| rule.weights[i] * rows[i].0.powf(q)).sum();
    let lo = t_cut * 10f64.powf(-opts.tail_fit_decades);
    let (ts, ns): (Vec<f64>, Vec<f64>) = (0..clean * per).filter(|&i| rule.nodes[i] >= lo).map(|i| (rule.nodes[i], rows[i].0)).unzip();
    let fit = fit_power_law(&ts, &ns)?;
    let b = fit.slope * q;
    if b >= -1.0 {
        return Err(Error::NonDecaying { tail: b });
    }
    // ∫_{T}^∞ (N(T)(t/T)^slope)^q dt with N(T) from the fit.
    let n_cut = 10f64.powf(fit.intercept) * t_cut.powf(fit.slope);
    let tail = n_cut.powf(q) * t_cut / (-b - 1.0);
    let total = body + tail;
    let mixed = total.powf(1.0 / q);
    Ok(StrichartzNorm { q, r, mixed, data_l2, constant: mixed / data_l2, t_cut, tail_share: tail / total, tail_slope: fit.slope })
}
