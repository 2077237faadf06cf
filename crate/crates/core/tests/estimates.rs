use fracwave_core::estimates::*;
use fracwave_core::free::{FreeKernelTable, SpectralParams};
use fracwave_core::perturbed::{assemble_wave_operator, BoxSpec, Potential, PotentialSetup, WaveOptions};
use fracwave_core::radial::{RadialGrid, RadialKernel};
use fracwave_core::special::sphere_area;
use fracwave_core::Error;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

fn params(alpha: f64) -> SpectralParams {
    SpectralParams::new(3, alpha).unwrap()
}

fn flat() -> InitialData {
    InitialData::FlatGaussian { width: 1.0 }
}

fn gauss(width: f64) -> InitialData {
    InitialData::Gaussian { width }
}

fn free() -> Potential {
    Potential::gaussian(0.0)
}

fn small_v() -> Potential {
    Potential::gaussian(0.3)
}

#[test]
fn free_dispersive_slope() {
    let f = dispersive_fit(&params(1.25), &free(), &flat(), &DecayOptions::default()).unwrap();
    assert_eq!(f.claim, -1.2);
    assert!(f.passes(0.05), "{:?}", f.fit);
    assert!(f.fit.r2 >= MIN_R2);
}

#[test]
fn classical_dispersive_run_matches_closed_form() {
    // e^{itΔ}e^{−r²/2} = (1 + 2it)^{−3/2} e^{−r²/(2(1+2it))}, largest at r = 0.
    let p = params(1.0);
    let opts = DecayOptions { t_min: 1.0, t_max: 1000.0, ..Default::default() };
    let d = gauss(1.0);
    let f = dispersive_fit(&p, &free(), &d, &opts).unwrap();
    let l1 = d.lp_norm(1.0);
    for (&t, &v) in f.series.t.iter().zip(&f.series.value).step_by(5) {
        let exact = (1.0 + 4.0 * t * t).powf(-0.75) / l1;
        assert!((v / exact - 1.0).abs() < 1e-6, "t {t}: {v} vs {exact}");
    }
    assert!(f.passes(0.05), "{:?}", f.fit);
}

#[test]
fn kernel_route_matches_box_route() {
    let p = params(1.25);
    let obs = vec![0.0, 1.5, 4.0, 7.0];
    let k = FreeKernelEvolver::new(&p, 3.0, flat(), 8.0, 0.5).unwrap();
    let b = BoxEvolver::new(&p, &free(), &BoxSpec { radius: 400.0, k_max: 5.0 }, obs.clone()).unwrap();
    let a = b.modal(&flat(), ModalWeights { project_ac: false, gamma: None }).unwrap();
    for t in [0.5, 2.0, 8.0] {
        let (u, v) = (k.sample(t, &obs).unwrap(), b.sample(&a, t));
        let scale = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (x, y) in u.iter().zip(&v) {
            assert!((x - y).norm() < 1e-3 * scale, "t {t}: {x} vs {y}");
        }
    }
}

#[test]
fn free_box_evolution_conserves_mass() {
    let p = params(1.25);
    let b = BoxEvolver::new(&p, &free(), &BoxSpec { radius: 200.0, k_max: 5.0 }, vec![0.0]).unwrap();
    let a = b.modal(&gauss(1.0), ModalWeights { project_ac: false, gamma: None }).unwrap();
    let m0 = b.norm_and_monitor(&a, 0.0, 2.0).0;
    assert!((m0 / gauss(1.0).lp_norm(2.0) - 1.0).abs() < 1e-8);
    for t in [0.3, 3.0, 30.0] {
        assert!((b.norm_and_monitor(&a, t, 2.0).0 / m0 - 1.0).abs() < 1e-8);
    }
}

#[test]
fn perturbed_dispersive_slope() {
    let f = dispersive_fit(&params(1.25), &small_v(), &flat(), &DecayOptions::default()).unwrap();
    assert!(f.passes(0.1), "{:?}", f.fit);
    // The monitor bounds the window from above.
    assert!(f.t_hi < 100.0);
}

#[test]
fn short_box_is_reported_as_insufficient_window() {
    let opts = DecayOptions { box_radius: 40.0, ..Default::default() };
    let e = dispersive_fit(&params(1.25), &small_v(), &flat(), &opts).unwrap_err();
    assert!(matches!(e, Error::Coverage(_)), "{e:?}");
}

#[test]
fn smoothing_slope_and_identity() {
    let p = params(1.25);
    let opts = DecayOptions::default();
    let f = smoothing_decay_fit(&p, &free(), 1.5, &flat(), &opts).unwrap();
    assert_eq!(f.claim, -0.6);
    assert!(f.passes(0.05), "{:?}", f.fit);
    let short = DecayOptions { t_max: 10.0, samples: 9, ..opts };
    let a = smoothing_decay_fit(&p, &small_v(), 3.0, &flat(), &short).unwrap();
    let b = dispersive_fit(&p, &small_v(), &flat(), &short).unwrap();
    assert_eq!(a.series.value, b.series.value);
    assert_eq!(a.fit, b.fit);
}

#[test]
fn smoothing_order_out_of_range_is_rejected() {
    let p = params(1.25);
    for g in [0.0, -1.0, 3.76] {
        assert!(smoothing_decay_fit(&p, &free(), g, &flat(), &DecayOptions::default()).is_err());
    }
}

#[test]
fn self_similar_profile_gives_exact_slope() {
    let p = params(1.25);
    let t: Vec<f64> = (0..7).map(|i| 10f64.powf(-1.0 + 0.5 * i as f64)).collect();
    let xi: Vec<f64> = (0..25).map(|i| 0.25 * i as f64).collect();
    for g in [1.5, 3.0] {
        let s = self_similar_sup(&p, g, &t, &xi).unwrap();
        let f = fit_power_law(&t, &s).unwrap();
        assert!((f.slope + g / 2.5).abs() < 1e-9, "gamma {g}: {}", f.slope);
    }
}

#[test]
fn interpolated_slopes() {
    let p = params(1.25);
    let opts = DecayOptions::default();
    for (pe, tol) in [(2.0, 0.05), (1.0, 0.1), (4.0 / 3.0, 0.1)] {
        let f = interpolated_decay_fit(&p, &free(), pe, &gauss(1.0), &opts).unwrap();
        assert!(f.passes(tol), "p {pe}: {:?} vs {}", f.fit, f.claim);
    }
    assert!((interpolated_claim(&p, 4.0 / 3.0) + 0.6).abs() < 1e-15);
    let f = interpolated_decay_fit(&p, &small_v(), 4.0 / 3.0, &gauss(1.0), &opts).unwrap();
    assert!(f.passes(0.1), "{:?}", f.fit);
}

#[test]
fn interpolated_exponent_outside_range_is_rejected() {
    for pe in [0.5, 2.5] {
        assert!(interpolated_decay_fit(&params(1.25), &free(), pe, &gauss(1.0), &DecayOptions::default()).is_err());
    }
}

#[test]
fn strichartz_pair_admissibility() {
    let p = params(1.25);
    assert!((admissible_q(&p, 4.0).unwrap() - 10.0 / 3.0).abs() < 1e-14);
    assert!(admissible_q(&p, 2.0).unwrap().is_infinite());
    let msg = strichartz_norm(&p, &free(), 3.0, 4.0, &gauss(1.0), &StrichartzOptions::default()).unwrap_err().to_string();
    assert!(msg.contains("3.33333"), "{msg}");
    assert!(strichartz_norm(&p, &free(), f64::INFINITY, f64::INFINITY, &gauss(1.0), &Default::default()).is_err());
}

#[test]
fn strichartz_l2_endpoint_is_unitary() {
    let s = strichartz_norm(&params(1.25), &free(), f64::INFINITY, 2.0, &gauss(1.0), &Default::default()).unwrap();
    assert!((s.constant - 1.0).abs() < 1e-8, "{}", s.constant);
}

#[test]
fn strichartz_constant_is_stable() {
    let p = params(1.25);
    let q = admissible_q(&p, 4.0).unwrap();
    let coarse = StrichartzOptions::default();
    let fine = StrichartzOptions { panels_per_decade: 2 * coarse.panels_per_decade, ..coarse };
    let mut cs = vec![];
    for d in [gauss(1.0), gauss(2.0), flat()] {
        let a = strichartz_norm(&p, &free(), q, 4.0, &d, &coarse).unwrap();
        let b = strichartz_norm(&p, &free(), q, 4.0, &d, &fine).unwrap();
        assert!((a.constant / b.constant - 1.0).abs() < 0.05, "{d:?}");
        assert!(a.tail_share < 0.05);
        cs.push(a.constant);
    }
    let spread = cs.iter().cloned().fold(0.0, f64::max) / cs.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread <= 3.0, "{cs:?}");
    // The admissible pair is scale invariant: dilated data give the same constant.
    assert!((cs[0] / cs[1] - 1.0).abs() < 1e-3, "{cs:?}");
    let v = strichartz_norm(&p, &small_v(), q, 4.0, &gauss(1.0), &coarse).unwrap();
    let ratio = v.constant / cs[0];
    assert!((0.5..=2.0).contains(&ratio), "{ratio}");
}

#[test]
fn exponential_kernel_is_admissible_with_equal_sides() {
    let r = schur_admissibility(3, |a: f64, b: f64| (-a - b).exp(), &SchurOptions::default()).unwrap();
    assert_eq!(r.verdict, SchurVerdict::Admissible);
    assert!((r.row.sup - 8.0 * PI).abs() < 1e-12);
    assert_eq!(r.row.sup, r.col.sup);
}

#[test]
fn envelope_family_verdicts() {
    let o = SchurOptions::default();
    for (eps, v) in [(1.0, SchurVerdict::Admissible), (0.1, SchurVerdict::Admissible), (0.0, SchurVerdict::Borderline), (-0.1, SchurVerdict::Divergent)] {
        let r = schur_admissibility(3, envelope_kernel(3, eps), &o).unwrap();
        assert_eq!(r.verdict, v, "eps {eps}");
        // Shell increments decay like R^{−ε}.
        assert!((r.row.shell_exponent - eps).abs() < 5e-3, "eps {eps}: {}", r.row.shell_exponent);
    }
}

#[test]
fn envelope_row_integral_matches_closed_forms() {
    for (n, eps) in [(3usize, 0.1), (3, 1.0), (5, 0.5)] {
        let nf = n as f64;
        let k = envelope_kernel(n, eps);
        // At |x| = 0: |S^{n−1}|∫ s^{n−1}(1+s²)^{−(n+ε)/2} ds = |S^{n−1}| B(n/2, ε/2)/2.
        let beta = (ln_gamma(nf / 2.0) + ln_gamma(eps / 2.0) - ln_gamma((nf + eps) / 2.0)).exp();
        let (at0, _, _) = schur_integral(n, &k, 0.0, 1e6);
        let exact = sphere_area(n) * beta / 2.0;
        assert!((at0 / exact - 1.0).abs() < 1e-4, "n {n} eps {eps}: {at0} vs {exact}");
        // As |x| → ∞: |S^{n−1}|∫_ℝ ⟨u⟩^{−a} du = |S^{n−1}|√π Γ((a−1)/2)/Γ(a/2).
        let a = (nf + 1.0) / 2.0 + eps;
        let limit = sphere_area(n) * (PI.sqrt().ln() + ln_gamma((a - 1.0) / 2.0) - ln_gamma(a / 2.0)).exp();
        let (far, _, _) = schur_integral(n, &k, 1e4, 1e8);
        assert!((far / limit - 1.0).abs() < 2e-3, "n {n} eps {eps}: {far} vs {limit}");
    }
}

#[test]
fn tail_envelope_is_admissible() {
    let o = SchurOptions::default();
    for n in [3, 5] {
        let r = tail_kernel_envelope_check(n, &o).unwrap();
        assert_eq!(r.verdict, SchurVerdict::Admissible, "n {n}");
        assert!(r.row.sup.is_finite() && r.col.sup.is_finite());
    }
    let edge = schur_admissibility(5, envelope_kernel(5, 0.0), &o).unwrap();
    assert_eq!(edge.verdict, SchurVerdict::Borderline);
    assert!(tail_kernel_envelope_check(2, &o).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn admissibility_is_monotone_in_eps(a in -0.3f64..1.5, b in -0.3f64..1.5) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let o = SchurOptions::default();
        let rl = schur_admissibility(3, envelope_kernel(3, lo), &o).unwrap();
        let rh = schur_admissibility(3, envelope_kernel(3, hi), &o).unwrap();
        let rank = |v: SchurVerdict| match v { SchurVerdict::Divergent => 0, SchurVerdict::Borderline => 1, SchurVerdict::Admissible => 2 };
        prop_assert!(rank(rl.verdict) <= rank(rh.verdict));
        prop_assert!(rh.row.sup <= rl.row.sup * (1.0 + 1e-12));
    }
}

fn grid() -> RadialGrid {
    RadialGrid::gauss_panels(3, 1e-3, 1.0, 12.0, 0.5, 8).unwrap()
}

#[test]
fn diagonal_kernel_bounds_are_equal() {
    let g = grid();
    let n = g.len();
    let d: Vec<f64> = g.nodes.iter().map(|r| (2.0 * r).cos() / (1.0 + r)).collect();
    let k = RadialKernel::new(g, DMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(d[i], 0.0) } else { Complex64::new(0.0, 0.0) })).unwrap();
    let dmax = d.iter().map(|x| x.abs()).fold(0.0, f64::max);
    for p in [1.0, 1.25, 2.0, 4.0, f64::INFINITY] {
        let b = lp_opnorm_estimate(&k, p, 1).unwrap();
        assert!((b.upper - dmax).abs() < 1e-10 && (b.lower - dmax).abs() < 1e-10, "p {p}: {b:?}");
    }
}

#[test]
fn rank_one_kernel_is_bracketed() {
    let g = grid();
    let u = |r: f64| (-r * r).exp();
    let v = |r: f64| (1.0 + r * r).powi(-3) * (1.0 + 0.5 * r.sin());
    let k = RadialKernel::from_kernel(&g, |r, s| Complex64::new(u(r) * v(s), 0.0));
    let norm = |f: &dyn Fn(f64) -> f64, p: f64| {
        if p.is_infinite() { g.nodes.iter().map(|&r| f(r).abs()).fold(0.0, f64::max) } else { g.integrate_fn(|r| f(r).abs().powf(p)).powf(1.0 / p) }
    };
    for (p, q) in [(1.0, f64::INFINITY), (4.0 / 3.0, 4.0), (2.0, 2.0), (3.0, 1.5), (f64::INFINITY, 1.0)] {
        let exact = norm(&u, p) * norm(&v, q);
        let b = lp_opnorm_estimate(&k, p, 2).unwrap();
        assert!(b.lower <= exact * (1.0 + 1e-9) && exact <= b.upper * (1.0 + 1e-9), "p {p}: {b:?} vs {exact}");
        assert!(b.lower >= 0.9 * exact && b.upper <= 1.1 * exact, "p {p}: {b:?} vs {exact}");
    }
}

#[test]
fn wave_operator_has_finite_lp_bounds() {
    let t = FreeKernelTable::new(&params(1.25)).unwrap();
    let g = RadialGrid::gauss_panels(3, 1e-3, 1.0, 8.0, 0.5, 8).unwrap();
    let s = PotentialSetup::new(&t, &Potential::gaussian(0.3), &g).unwrap();
    let opts = WaveOptions { lambda_max: 10.0, window: true, t_max: 0.0, order: 8, phase_per_panel: 4.0, j_max: 1 };
    let w = assemble_wave_operator(&s, None, &opts).unwrap().matrix();
    for p in [1.0, 2.0, f64::INFINITY] {
        let b = lp_opnorm_estimate(&w, p, 3).unwrap();
        assert!(b.upper.is_finite() && b.lower <= b.upper && b.lower >= 0.5, "p {p}: {b:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn opnorm_lower_never_exceeds_upper(seed in 0u64..1000, p in 1.0f64..6.0) {
        use rand::{Rng, SeedableRng};
        let g = RadialGrid::gauss_panels(3, 1e-2, 1.0, 4.0, 1.0, 4).unwrap();
        let n = g.len();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let b = lp_opnorm_estimate(&RadialKernel::new(g, m).unwrap(), p, seed).unwrap();
        prop_assert!(b.lower <= b.upper);
        prop_assert!(b.lower > 0.0);
    }
}

#[test]
fn short_fit_window_is_flagged() {
    let t: Vec<f64> = (0..10).map(|i| 1.0 + 0.1 * i as f64).collect();
    let y: Vec<f64> = t.iter().map(|x| x.powf(-1.2)).collect();
    let f = fit_power_law(&t, &y).unwrap();
    assert!(f.flagged && (f.slope + 1.2).abs() < 1e-12);
}
