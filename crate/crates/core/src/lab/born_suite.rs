use super::experiments::{BornOptions, BornSuite};
use super::output::{Check, Outcome, Table};
use crate::born::{h_l1_norm, h_omega, p_omega, Direction, HGridSpec, HKernelOptions};
use crate::error::Result;
use crate::free::SpectralParams;
use crate::radial::AxisymTarget;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub(super) fn run(out: &mut Outcome, o: &BornOptions, cases: &[SpectralParams], seed: u64) {
    for p in cases {
        let tag = format!("n{}_a{}", p.n, p.alpha);
        let r = match o.suite {
            BornSuite::HKernel => h_kernel(out, o, p, &tag),
            BornSuite::POmega => p_omega_comparison(out, o, p, &tag, seed),
        };
        if let Err(e) = r {
            out.checks.push(Check::errored(format!("{tag}/run"), "experiment completed", &e));
        }
    }
}

fn h_kernel(out: &mut Outcome, o: &BornOptions, p: &SpectralParams, tag: &str) -> Result<()> {
    let ho = HKernelOptions::default();
    // h_{sω}(x) = s^n h_ω(sx).
    let targets: Vec<AxisymTarget> =
        [(0.3, 0.2), (1.0, -0.5), (2.0, 0.9), (4.0, 0.0)].iter().map(|&(radius, cos)| AxisymTarget { radius, cos }).collect();
    let scaled: Vec<AxisymTarget> = targets.iter().map(|x| AxisymTarget { radius: 2.0 * x.radius, cos: x.cos }).collect();
    let h1 = h_omega(p, 1.0, 0.0, &scaled, &ho, None)?;
    let h2 = h_omega(p, 2.0, 0.0, &targets, &ho, None)?;
    let peak = h2.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let worst = h1.iter().zip(&h2).map(|(a, b)| (a * 2f64.powi(p.n as i32) - b).norm()).fold(0.0, f64::max) / peak;
    out.checks.push(Check::at_most(format!("{tag}/scaling"), "h_{s omega}(x) = s^n h_omega(s x)", worst, o.identity_tol));

    let mut t = Table::new(format!("h_kernel_{tag}"), &["s", "l1_norm", "tail_estimate", "shell_exponent", "near_slope", "far_slope"]);
    let nf = p.nf();
    let mut norms = vec![];
    for &s in &o.scales {
        let h = h_l1_norm(p, s, 0.0, &HGridSpec::default(), &ho)?;
        t.push(vec![s, h.l1_norm, h.tail_estimate, h.shell_exponent, h.near_fit.slope, h.far_fit.slope]);
        out.checks.push(Check::holds(
            format!("{tag}/s{s}/l1_finite"),
            format!("||h||_1 = {:.6e} finite with decaying shells (exponent {:.3})", h.l1_norm, h.shell_exponent),
            h.l1_norm.is_finite() && h.shell_exponent < 0.0,
        ));
        out.fit(&format!("{tag}/s{s}/near"), "|h(x)| ~ |x|^{-n+2 alpha-2} as x -> 0", p.n, p.alpha, -nf + 2.0 * p.alpha - 2.0, &h.near_fit, o.slope_tol);
        out.fit(&format!("{tag}/s{s}/far"), "|h(x)| ~ |x|^{-n-1} as x -> infinity", p.n, p.alpha, -nf - 1.0, &h.far_fit, o.slope_tol);
        norms.push(h.l1_norm);
    }
    let spread = norms.iter().map(|&x| (x / norms[0] - 1.0).abs()).fold(0.0, f64::max);
    out.checks.push(Check::at_most(format!("{tag}/l1_s_independence"), "||h_{s omega}||_1 independent of s", spread, o.l1_tol));
    out.tables.push(t);
    Ok(())
}

fn p_omega_comparison(out: &mut Outcome, o: &BornOptions, p: &SpectralParams, tag: &str, seed: u64) -> Result<()> {
    let e1 = Direction::e1(p.n);
    let ratio = |xi: &[f64]| -> Result<f64> {
        let r2: f64 = xi.iter().map(|x| x * x).sum();
        Ok(p_omega(p, xi, &e1)? * (1.0 + r2).powf(p.alpha - 1.0))
    };
    let mut series = Table::new(format!("p_omega_{tag}"), &["abs_xi", "min_ratio", "max_ratio"]);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let top = o.xi_max.log10();
    for i in 0..=60 {
        let r = if i == 0 { 0.0 } else { 10f64.powf(-3.0 + (top + 3.0) * i as f64 / 60.0) };
        let (mut a, mut b) = (f64::INFINITY, 0.0f64);
        for j in 0..=24 {
            let th = PI * j as f64 / 24.0;
            let mut xi = vec![0.0; p.n];
            xi[0] = r * th.cos();
            xi[1] = r * th.sin();
            let v = ratio(&xi)?;
            a = a.min(v);
            b = b.max(v);
        }
        series.push(vec![r, a, b]);
        lo = lo.min(a);
        hi = hi.max(b);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..o.random_samples {
        let dir: Vec<f64> = (0..p.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        let r = 10f64.powf(rng.gen_range(-3.0..top));
        let xi: Vec<f64> = dir.iter().map(|x| x * r / norm).collect();
        let v = ratio(&xi)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    out.checks.push(Check::holds(format!("{tag}/c1_positive"), format!("c1 = {lo:.6e} > 0"), lo > 0.0));
    out.checks.push(Check::at_most(
        format!("{tag}/c2_over_c1"),
        format!("c1 <xi>^(2-2 alpha) <= p_omega(xi) <= c2 <xi>^(2-2 alpha) over |xi| <= {}", o.xi_max),
        hi / lo,
        o.ratio_bound,
    ));
    out.tables.push(series);
    Ok(())
}
