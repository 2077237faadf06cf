use fracwave_core::estimates::fit_power_law;
use fracwave_core::free::{FreeKernelTable, Sign, SpectralParams};
use fracwave_core::linalg::{self, CMatrix};
use fracwave_core::perturbed::*;
use fracwave_core::radial::RadialGrid;
use num_complex::Complex64;
use std::f64::consts::PI;

fn table() -> FreeKernelTable {
    FreeKernelTable::new(&SpectralParams::new(3, 1.25).unwrap()).unwrap()
}

fn grid() -> RadialGrid {
    RadialGrid::gauss_panels(3, 1e-3, 1.0, 10.0, 0.5, 8).unwrap()
}

fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    linalg::max_abs_diff(a, b) / linalg::entry_max(b)
}

#[test]
fn repulsive_potential_has_identity_sign_and_weak_coupling_limit() {
    let (t, g) = (table(), grid());
    let s = PotentialSetup::new(&t, &Potential::gaussian(1.0), &g).unwrap();
    assert!(s.u.iter().all(|&u| u == 1.0));
    let weak = PotentialSetup::new(&t, &Potential::gaussian(1e-9), &g).unwrap();
    let m = build_m(&weak, 0.5).unwrap();
    assert!(linalg::max_abs_diff(m.matrix(), &identity(weak.u.len())) < 1e-8);
    let inv = invert_m(&weak, 0.5, InversionMethod::Direct).unwrap().inverse;
    assert!(linalg::max_abs_diff(inv.matrix(), &identity(weak.u.len())) < 1e-8);
    let z = regular_zero_check(&weak);
    assert!(z.regular && (z.sigma_min - 1.0).abs() < 1e-8);
}

#[test]
fn zero_energy_matrix_matches_sphere_average_oracle() {
    // (vG₀v)_{ij} = v_i v_j ⟨c|x − y|^{2α−3}⟩ averaged over |y| = s, by a midpoint sum on S².
    let (t, g) = (table(), grid());
    let s = PotentialSetup::new(&t, &Potential::gaussian(1.0), &g).unwrap();
    let m = build_m(&s, 0.0).unwrap();
    let alpha: f64 = 1.25;
    let gamma = statrs::function::gamma::gamma;
    let c = gamma(1.5 - alpha) / (4f64.powf(alpha) * PI.powf(1.5) * gamma(alpha));
    let (nt, np) = (4000usize, 8usize);
    let n = s.support.len();
    for (i, j) in [(3, n / 2), (10, 20), (n / 3, n / 2), (1, 5), (n - 1, n / 4)] {
        let (r, q) = (s.support.nodes[i], s.support.nodes[j]);
        let mut acc = 0.0;
        for a in 0..nt {
            let mu = -1.0 + 2.0 * (a as f64 + 0.5) / nt as f64;
            for b in 0..np {
                let ph = 2.0 * PI * (b as f64 + 0.5) / np as f64;
                let st = (1.0 - mu * mu).sqrt();
                let y = [q * st * ph.cos(), q * st * ph.sin(), q * mu];
                let d2 = y[0] * y[0] + y[1] * y[1] + (r - y[2]).powi(2);
                acc += c * d2.powf((2.0 * alpha - 3.0) / 2.0);
            }
        }
        let oracle = acc / (nt * np) as f64;
        let sw = (s.support.weights[i] * s.support.weights[j]).sqrt();
        let got = m.matrix()[(i, j)].re / (sw * s.v[i] * s.v[j]);
        assert!((got / oracle - 1.0).abs() < 1e-5, "({i},{j}) r {r} s {q}: {got} vs {oracle}");
        assert!(m.matrix()[(i, j)].im.abs() < 1e-14);
    }
}

#[test]
fn birth_coupling_matches_box_crossing() {
    let p = SpectralParams::new(3, 1.25).unwrap();
    let t = table();
    let g = RadialGrid::gauss_panels(3, 1e-3, 1.0, 20.0, 0.25, 12).unwrap();
    let shape = Potential::gaussian(-1.0);
    let bs = birth_coupling(&t, &shape, &g).unwrap();
    let xs: Vec<f64> = [50.0, 100.0, 200.0].iter().map(|&l| box_crossing(&p, &shape, &BoxSpec { radius: l, k_max: 8.0 }, 0.5, 4.0).unwrap()).collect();
    let oracle = aitken([xs[0], xs[1], xs[2]]);
    assert!((bs / oracle - 1.0).abs() < 0.05, "{bs} vs {oracle} ({xs:?})");
    // The bound-state count flips across the birth coupling while T₀ stays invertible off it.
    let below = regular_zero_check(&PotentialSetup::new(&t, &shape.with_coupling(-0.9 * bs), &g).unwrap());
    let above = regular_zero_check(&PotentialSetup::new(&t, &shape.with_coupling(-1.1 * bs), &g).unwrap());
    let at = regular_zero_check(&PotentialSetup::new(&t, &shape.with_coupling(-bs), &g).unwrap());
    assert_eq!((below.bound_state_count, above.bound_state_count), (0, 1));
    assert!(below.regular && above.regular);
    assert!(at.sigma_min < 1e-8 * at.sigma_max && !at.regular);
}

#[test]
fn repulsive_potentials_are_regular_without_bound_states() {
    let p = SpectralParams::new(3, 1.25).unwrap();
    let (t, g) = (table(), grid());
    for c in [0.1, 1.0, 10.0] {
        let pot = Potential::gaussian(c);
        let z = regular_zero_check(&PotentialSetup::new(&t, &pot, &g).unwrap());
        assert!(z.regular && z.bound_state_count == 0, "c {c}: {z:?}");
        assert!(box_ground_energy(&p, &pot, &BoxSpec { radius: 40.0, k_max: 6.0 }) > 0.0);
    }
}

#[test]
fn direct_inverse_and_neumann_series_agree() {
    let (t, g) = (table(), grid());
    let s = PotentialSetup::new(&t, &Potential::gaussian(1.0), &g).unwrap();
    let m = build_m(&s, 0.7).unwrap();
    let inv = invert_m(&s, 0.7, InversionMethod::Direct).unwrap().inverse;
    assert!(linalg::max_abs_diff(&(m.matrix() * inv.matrix()), &identity(s.u.len())) < 1e-10);
    let l0 = adaptive_lambda0(&s, 1.0, 0.5).unwrap();
    for lam in [0.25 * l0, l0, 1.5 * l0] {
        let d = invert_m(&s, lam, InversionMethod::Direct).unwrap().inverse;
        let nm = invert_m(&s, lam, InversionMethod::Neumann).unwrap();
        assert!(rel(nm.inverse.matrix(), d.matrix()) < 1e-8, "lambda {lam}");
        let q = nm.contraction.unwrap();
        assert!(q < 1.0);
        for w in nm.term_norms.windows(2).skip(1) {
            assert!(w[1] <= q * w[0] * (1.0 + 1e-8) + 1e-300);
        }
    }
    // Below the binding depth ℰT₀⁻¹ → −K(K − 1)⁻¹ at high energy, whose norm exceeds 1.
    let attractive = PotentialSetup::new(&t, &Potential::gaussian(-1.2), &g).unwrap();
    let far = invert_m(&attractive, 50.0, InversionMethod::Neumann);
    assert!(matches!(far, Err(fracwave_core::Error::NeumannDivergence { .. })));
}

#[test]
fn energy_difference_norm_grows_at_least_like_lambda_eta() {
    let p = SpectralParams::new(3, 1.25).unwrap();
    let (t, g) = (table(), grid());
    let s = PotentialSetup::new(&t, &Potential::gaussian(1.0), &g).unwrap();
    let lams: Vec<f64> = (0..8).map(|k| 1e-3 * 2f64.powi(k)).collect();
    let norms: Vec<f64> = lams.iter().map(|&l| linalg::spectral_norm(&s.e_matrix(l))).collect();
    let fit = fit_power_law(&lams, &norms).unwrap();
    assert!(fit.slope >= p.default_eta() - 0.05, "{fit:?}");
}

#[test]
fn perturbed_resolvent_identities() {
    let (t, g) = (table(), grid());
    let zero = PotentialSetup::new(&t, &Potential::zero(), &g).unwrap();
    let r0 = t.cross_matrix(1.0, &g, &g);
    assert_eq!(perturbed_resolvent(&zero, 1.0, Sign::Plus).unwrap().matrix(), &r0);
    let s = PotentialSetup::new(&t, &Potential::gaussian(1.0), &g).unwrap();
    for lam in [0.3, 1.0, 3.0] {
        let rv = perturbed_resolvent(&s, lam, Sign::Plus).unwrap();
        assert!(second_resolvent_residual(&s, &rv, Sign::Plus) <= 1e-8, "lambda {lam}");
        let rm = perturbed_resolvent(&s, lam, Sign::Minus).unwrap();
        assert!(linalg::max_abs_diff(rm.matrix(), &rv.matrix().map(|z| z.conj())) == 0.0);
        assert!(second_resolvent_residual(&s, &rm, Sign::Minus) <= 1e-8);
    }
}

#[test]
fn gamma_structure() {
    let (t, g) = (table(), grid());
    let s = PotentialSetup::new(&t, &Potential::gaussian(0.8), &g).unwrap();
    let flipped = PotentialSetup::new(&t, &Potential::gaussian(-0.8), &g).unwrap();
    let lam = 0.6;
    let minv = invert_m(&s, lam, InversionMethod::Direct).unwrap().inverse;
    assert_eq!(build_gamma(&s, lam, 0).unwrap().matrix(), minv.matrix());
    let m = s.m_matrix(lam);
    let u = linalg::diag(&s.u);
    let a1 = &m - &u;
    let a2 = &a1 * &u * &a1;
    let m_flip = &m - &u * Complex64::new(2.0, 0.0);
    let inv_flip = linalg::inverse(&m_flip).unwrap();
    for (ell, a) in [(1usize, a1.clone()), (2, a2.clone())] {
        let a_flip = if ell % 2 == 0 { -&a } else { a.clone() };
        let recon = &u * &a_flip * &inv_flip * a_flip.transpose() * &u;
        let fresh = build_gamma(&flipped, lam, ell).unwrap();
        assert!(rel(fresh.matrix(), &recon) < 1e-10, "ell {ell}");
        let own = &u * &a * linalg::inverse(&m).unwrap() * a.transpose() * &u;
        assert!(rel(build_gamma(&s, lam, ell).unwrap().matrix(), &own) < 1e-10);
    }
    assert_eq!(default_ell(3, 1.25), 3);
}

#[test]
fn free_wave_operator_is_identity() {
    let (t, g) = (table(), grid());
    let s = PotentialSetup::new(&t, &Potential::zero(), &g).unwrap();
    let w = assemble_wave_operator(&s, None, &WaveOptions::default()).unwrap();
    assert_eq!(linalg::max_abs_diff(&w.matrix().matrix, &identity(g.len())), 0.0);
}

#[test]
fn wave_operator_remainder_is_second_order() {
    let (t, g) = (table(), grid());
    let opts = WaveOptions { lambda_max: 8.0, window: true, t_max: 0.0, order: 8, phase_per_panel: 4.0, j_max: 1 };
    let rem = |c: f64| {
        let s = PotentialSetup::new(&t, &Potential::gaussian(c), &g).unwrap();
        let w = assemble_wave_operator(&s, None, &opts).unwrap();
        let d = w.matrix().matrix - identity(g.len()) - w.born_matrix(1).unwrap().matrix;
        linalg::spectral_norm(&d)
    };
    let ratio = rem(2e-3) / rem(1e-3);
    assert!((ratio - 4.0).abs() < 0.05, "{ratio}");
}

#[test]
fn wave_operator_schur_norm_is_grid_stable() {
    let t = table();
    let opts = WaveOptions { lambda_max: 10.0, window: true, t_max: 0.0, order: 8, phase_per_panel: 4.0, j_max: 1 };
    let schur = |h: f64| {
        let g = RadialGrid::gauss_panels(3, 1e-3, 1.0, 8.0, h, 8).unwrap();
        let s = PotentialSetup::new(&t, &Potential::bump(2.0, 0.1), &g).unwrap();
        let w = assemble_wave_operator(&s, None, &opts).unwrap();
        fracwave_core::born::schur_norms(&w.born_matrix(1).unwrap()).bound()
    };
    let (a, b) = (schur(0.5), schur(0.25));
    assert!((a / b - 1.0).abs() < 0.02, "{a} {b}");
}

#[test]
fn box_spectrum_invariants() {
    let p = SpectralParams::new(3, 1.25).unwrap();
    let spec = BoxSpec { radius: 40.0, k_max: 16.0 };
    let free = spectral_decompose(&p, &Potential::zero(), &spec).unwrap();
    assert_eq!(free.n_bound(), 0);
    assert!(free.eigenvalues.iter().all(|&e| e > 0.0));
    let mut counts = vec![];
    for c in [2.0, 40.0, 400.0] {
        let sd = spectral_decompose(&p, &Potential::gaussian(-c), &spec).unwrap();
        let q = &sd.eigenvectors;
        let gram = q.transpose() * q;
        let k = gram.nrows();
        assert!((gram - nalgebra::DMatrix::<f64>::identity(k, k)).abs().max() < 1e-10);
        let pac = sd.p_ac();
        assert!((&pac * &pac - &pac).abs().max() < 1e-10);
        counts.push(sd.n_bound());
    }
    assert!(counts[0] >= 1 && counts[0] < counts[1] && counts[1] < counts[2], "{counts:?}");
}

#[test]
fn rejects_bad_inputs() {
    let (t, g) = (table(), grid());
    let s = PotentialSetup::new(&t, &Potential::gaussian(1.0), &g).unwrap();
    assert!(build_m(&s, -1.0).is_err());
    let g5 = RadialGrid::gauss_panels(5, 1e-3, 1.0, 10.0, 0.5, 8).unwrap();
    assert!(PotentialSetup::new(&t, &Potential::gaussian(1.0), &g5).is_err());
    assert!(CutoffSpec::new(0.0).is_err());
}

#[test]
fn weighted_resolvent_decays_like_lambda_power() {
    let p = SpectralParams::new(3, 1.25).unwrap();
    let t = FreeKernelTable::new(&p).unwrap();
    let g = RadialGrid::gauss_panels(3, 1e-3, 1.0, 8.0, 0.1, 8).unwrap();
    let ls: Vec<f64> = (0..5).map(|i| 30f64.powf(i as f64 / 4.0)).collect();
    for pot in [Potential::gaussian(1.0), Potential::bump(2.0, 1.0)] {
        let s = PotentialSetup::new(&t, &pot, &g).unwrap();
        let ns: Vec<f64> = ls.iter().map(|&l| lap_norm(&s, l, 0.1, Sign::Plus).unwrap()).collect();
        let f = fracwave_core::estimates::fit_power_law(&ls, &ns).unwrap();
        assert!((f.slope - (1.0 - 2.0 * p.alpha)).abs() <= 0.1, "{:?}: {}", pot.profile, f.slope);
    }
}
