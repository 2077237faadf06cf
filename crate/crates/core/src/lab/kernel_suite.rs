use super::experiments::{KernelOptions, KernelSuite};
use super::output::{Check, Outcome, Table};
use crate::error::{invalid, Result};
use crate::estimates::fit_envelope;
use crate::free::{envelope_extract, envelope_f_pm, free_resolvent, resolvent_point, Sign, SpectralParams};
use crate::radial::RadialGrid;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Outgoing Helmholtz kernel in ℝ³.
fn helmholtz3(k: f64, r: f64) -> Complex64 {
    Complex64::from_polar(1.0, k * r) / (4.0 * PI * r)
}

/// Outgoing Helmholtz kernel in ℝ⁵ via H^{(1)}_{3/2}.
fn helmholtz5(k: f64, r: f64) -> Complex64 {
    let z = k * r;
    let h = -(2.0 / (PI * z)).sqrt() * Complex64::from_polar(1.0, z) * (1.0 + I / z);
    I / 4.0 * (k / (2.0 * PI * r)).powf(1.5) * h
}

/// (−Δ + κ²)^{-1} in ℝ⁵ via K_{3/2}.
fn yukawa5(kappa: f64, r: f64) -> f64 {
    let x = kappa * r;
    let k32 = (PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 + 1.0 / x);
    (2.0 * PI).powf(-2.5) * (kappa / r).powf(1.5) * k32
}

fn oracle_value(p: &SpectralParams, lam: f64, r: f64) -> Option<Complex64> {
    match (p.n, p.alpha) {
        (3, a) if a == 1.0 => Some(helmholtz3(lam, r)),
        // 1/(ρ⁴ − λ⁴) = (1/2λ²)[1/(ρ² − λ²) − 1/(ρ² + λ²)]
        (5, a) if a == 2.0 => Some((helmholtz5(lam, r) - yukawa5(lam, r)) / (2.0 * lam * lam)),
        _ => None,
    }
}

pub(super) fn validate_cases(o: &KernelOptions, cases: &[SpectralParams]) -> Result<()> {
    if o.suite == KernelSuite::Oracle {
        for p in cases {
            if oracle_value(p, 1.0, 1.0).is_none() {
                return invalid(format!("no closed-form oracle at (n, alpha) = ({}, {}); use (3, 1) or (5, 2)", p.n, p.alpha));
            }
        }
    }
    Ok(())
}

pub(super) fn run(out: &mut Outcome, o: &KernelOptions, cases: &[SpectralParams], seed: u64) {
    for p in cases {
        let tag = format!("n{}_a{}", p.n, p.alpha);
        let r = match o.suite {
            KernelSuite::Oracle => oracle(out, o, p, &tag),
            KernelSuite::Envelope => envelope(out, o, p, &tag),
            KernelSuite::Jump => jump(out, o, p, &tag, seed),
        };
        if let Err(e) = r {
            out.checks.push(Check::errored(format!("{tag}/run"), "experiment completed", &e));
        }
    }
}

fn oracle(out: &mut Outcome, o: &KernelOptions, p: &SpectralParams, tag: &str) -> Result<()> {
    let grid = RadialGrid::default_for(p.n);
    let mut t = Table::new(format!("oracle_{tag}"), &["lambda", "r", "re", "im", "re_oracle", "im_oracle", "rel_err"]);
    let mut worst = 0.0f64;
    for &lam in &o.lambdas {
        let s = free_resolvent(p, lam, Sign::Plus, &grid)?;
        for (&r, v) in grid.nodes.iter().zip(&s.values) {
            let want = oracle_value(p, lam, r).expect("validated case");
            let e = (v - want).norm() / want.norm();
            worst = worst.max(e);
            t.push(vec![lam, r, v.re, v.im, want.re, want.im, e]);
        }
    }
    let claim = if p.n == 3 { "R0+ = e^{i lambda r}/(4 pi r)" } else { "R0+ = splitting-identity assembly" };
    out.checks.push(Check::at_most(format!("{tag}/oracle"), format!("{claim}, max relative error on the full grid"), worst, o.tol));
    out.tables.push(t);
    Ok(())
}

fn envelope(out: &mut Outcome, o: &KernelOptions, p: &SpectralParams, tag: &str) -> Result<()> {
    let lmin = o.lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let lmax = o.lambdas.iter().cloned().fold(0.0, f64::max);
    let grid = RadialGrid::log_spaced(p.n, 1e-2 / lmin, o.window.1 / lmax, 241)?;
    let rows = envelope_extract(p, &o.lambdas, &grid)?;
    let cols = ["lambda", "r", "lambda_r", "re_F", "im_F", "re_Fp", "im_Fp", "re_Fm", "im_Fm", "abs_E"];
    let mut t = Table::new(format!("envelope_{tag}"), &cols);
    for s in &rows {
        t.push(vec![s.lambda, s.r, s.lambda_r, s.f.re, s.f.im, s.f_plus.re, s.f_plus.im, s.f_minus.re, s.f_minus.im, s.e.norm()]);
    }
    let x: Vec<f64> = rows.iter().map(|s| s.lambda_r).collect();
    let nf = p.nf();
    let series: [(&str, &str, f64, Vec<f64>); 3] = [
        ("F", "|F| ~ (lambda r)^{(n+1)/2 - 2 alpha}", (nf + 1.0) / 2.0 - 2.0 * p.alpha, rows.iter().map(|s| s.f.norm()).collect()),
        ("F_plus", "|F+| ~ (lambda r)^{-(n-1)/2}", -(nf - 1.0) / 2.0, rows.iter().map(|s| s.f_plus.norm()).collect()),
        ("F_minus", "|F-| ~ (lambda r)^{-(n-1)/2}", -(nf - 1.0) / 2.0, rows.iter().map(|s| s.f_minus.norm()).collect()),
    ];
    for (name, claim, target, y) in series {
        let fit = fit_envelope(&x, &y, o.window.0, o.window.1, 8)?;
        out.fit(&format!("{tag}/{name}"), claim, p.n, p.alpha, target, &fit, o.tol);
    }
    out.tables.push(t);
    Ok(())
}

fn jump(out: &mut Outcome, o: &KernelOptions, p: &SpectralParams, tag: &str, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Table::new(format!("jump_{tag}"), &["lambda", "r", "re_rec", "im_rec", "re_jump", "im_jump", "rel_err"]);
    let (mut worst, mut worst_closed) = (0.0f64, 0.0f64);
    for _ in 0..o.samples {
        let lam = 10f64.powf(rng.gen_range(-2.0..1.0));
        let r = 10f64.powf(rng.gen_range(-2.0..2.0));
        let (fp, fm) = envelope_f_pm(p, lam * r);
        let pre = lam.powf(p.jump_prefactor());
        let rec = pre * (Complex64::from_polar(1.0, lam * r) * fp + Complex64::from_polar(1.0, -lam * r) * fm);
        // R₀⁻ is the complex conjugate of R₀⁺ on the spectrum.
        let plus = resolvent_point(p, lam, r).total;
        let diff = plus - plus.conj();
        let scale = pre * (fp.norm() + fm.norm());
        let e = (rec - diff).norm() / scale;
        worst = worst.max(e);
        if p.n == 3 {
            let closed = I * (lam * r).sin() * lam.powf(2.0 - 2.0 * p.alpha) / (2.0 * PI * p.alpha * r);
            worst_closed = worst_closed.max((rec - closed).norm() / scale);
        }
        t.push(vec![lam, r, rec.re, rec.im, diff.re, diff.im, e]);
    }
    out.checks.push(Check::at_most(
        format!("{tag}/jump"),
        format!("lambda^(n-2 alpha)(e^(i lambda r)F+ + e^(-i lambda r)F-) = R0+ - R0- at {} seeded samples", o.samples),
        worst,
        o.tol,
    ));
    if p.n == 3 {
        out.checks.push(Check::at_most(
            format!("{tag}/jump_closed_form"),
            "reconstruction = i sin(lambda r) lambda^(2-2 alpha)/(2 pi alpha r)",
            worst_closed,
            o.tol,
        ));
    }
    out.tables.push(t);
    Ok(())
}
