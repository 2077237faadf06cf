use approx::assert_relative_eq;
use fracwave_core::radial::{
    axisym_inverse_fourier, fourier_radial, fourier_radial_fn, inverse_fourier_radial, AxisymQuadrature,
    AxisymTarget, RadialFnOpts, RadialGrid,
};
use num_complex::Complex64;
use std::f64::consts::PI;

fn gaussian(r: f64) -> f64 {
    (-r * r / 2.0).exp()
}

#[test]
fn gaussian_is_a_fixed_point_up_to_normalization() {
    let grid = RadialGrid::default_for(3);
    let dual = RadialGrid::log_spaced(3, 1e-2, 8.0, 200).unwrap();
    let f: Vec<f64> = grid.nodes.iter().map(|&r| gaussian(r)).collect();
    let fh = fourier_radial(&f, &grid, &dual).unwrap();
    for (&rho, v) in dual.nodes.iter().zip(&fh) {
        let want = (2.0 * PI).powf(1.5) * gaussian(rho);
        assert!((v - want).abs() < 1e-9 * (2.0 * PI).powf(1.5), "rho {rho}");
    }
}

#[test]
fn ball_indicator_closed_form() {
    let opts = RadialFnOpts { support: Some(1.0), ..Default::default() };
    for &rho in &[0.1, 1.0, 3.7, 20.0] {
        let got = fourier_radial_fn(3, |_| 1.0, rho, opts).unwrap();
        let want = 4.0 * PI * (rho.sin() - rho * rho.cos()) / rho.powi(3);
        assert_relative_eq!(got, want, max_relative = 1e-10, epsilon = 1e-13);
    }
}

#[test]
fn slowly_decaying_profile_uses_accelerated_tail() {
    // (1 + r²)^{-1} in ℝ³ transforms to 2π² e^{−ρ}/ρ.
    for &rho in &[0.5, 1.0, 2.0] {
        let got = fourier_radial_fn(3, |r| 1.0 / (1.0 + r * r), rho, RadialFnOpts::default()).unwrap();
        let want = 2.0 * PI * PI * (-rho).exp() / rho;
        assert_relative_eq!(got, want, max_relative = 1e-7);
    }
}

#[test]
fn round_trip_recovers_a_bump() {
    let bump = |r: f64| if r < 1.0 { (-1.0 / (1.0 - r * r)).exp() } else { 0.0 };
    let grid = RadialGrid::from_breaks(3, &(0..=40).map(|k| k as f64 / 40.0).collect::<Vec<_>>(), 16).unwrap();
    let dual = RadialGrid::from_breaks(3, &(0..=600).map(|k| k as f64).collect::<Vec<_>>(), 12).unwrap();
    let f: Vec<f64> = grid.nodes.iter().map(|&r| bump(r)).collect();
    let fh = fourier_radial(&f, &grid, &dual).unwrap();
    let back = inverse_fourier_radial(&fh, &dual, &grid).unwrap();
    let peak = f.iter().cloned().fold(0.0, f64::max);
    for ((&r, a), b) in grid.nodes.iter().zip(&f).zip(&back) {
        if r < 0.95 {
            assert!((a - b).abs() < 1e-6 * peak, "r {r}: {a} vs {b}");
        }
    }
}

#[test]
fn plancherel_on_schwartz_data() {
    for n in [3usize, 4, 5] {
        let grid = RadialGrid::log_spaced(n, 1e-3, 30.0, 1500).unwrap();
        let dual = RadialGrid::log_spaced(n, 1e-3, 30.0, 1500).unwrap();
        let f: Vec<f64> = grid.nodes.iter().map(|&r| (1.0 + r * r) * (-r * r).exp()).collect();
        let fh = fourier_radial(&f, &grid, &dual).unwrap();
        let lhs = grid.lp_norm(&f, 2.0);
        let rhs = dual.lp_norm(&fh, 2.0) * (2.0 * PI).powf(-(n as f64) / 2.0);
        assert_relative_eq!(lhs, rhs, max_relative = 1e-5);
    }
}

#[test]
fn non_decaying_input_is_flagged() {
    let grid = RadialGrid::default_for(3);
    let f: Vec<f64> = grid.nodes.iter().map(|&r| 1.0 / (1.0 + r).powi(3)).collect();
    assert!(fourier_radial(&f, &grid, &grid).is_err());
}

#[test]
fn dimension_mismatch_rejected() {
    let a = RadialGrid::default_for(3);
    let b = RadialGrid::default_for(4);
    let f = vec![0.0; a.len()];
    assert!(fourier_radial(&f, &a, &b).is_err());
}

fn tensor_quad(rho_max: f64) -> AxisymQuadrature {
    let rho: Vec<f64> = (0..=48).map(|k| rho_max * k as f64 / 48.0).collect();
    let mu: Vec<f64> = (0..=8).map(|k| -1.0 + k as f64 / 4.0).collect();
    AxisymQuadrature::new(rho, mu, 16)
}

#[test]
fn axisymmetric_path_matches_radial_path_for_radial_symbols() {
    // ĝ = e^{−ρ²/2} inverts to (2π)^{−3/2} e^{−r²/2}.
    let targets: Vec<AxisymTarget> = [0.3, 1.0, 2.5]
        .iter()
        .flat_map(|&r| [-0.6, 0.2, 1.0].map(|c| AxisymTarget { radius: r, cos: c }))
        .collect();
    let vals = axisym_inverse_fourier(|rho, _| Complex64::new(gaussian(rho), 0.0), 3, &targets, &tensor_quad(12.0), Some(1e-8)).unwrap();
    for (t, v) in targets.iter().zip(&vals) {
        let want = (2.0 * PI).powf(-1.5) * gaussian(t.radius);
        assert!((v.re - want).abs() < 1e-8 && v.im.abs() < 1e-8, "{t:?}: {v}");
    }
}

#[test]
fn modulation_identity() {
    // g(ξ) = e^{−|ξ−e₁|²} inverts to e^{ix₁}·(4π)^{−3/2} e^{−|x|²/4}.
    let g = |rho: f64, mu: f64| Complex64::new((-(rho * rho - 2.0 * rho * mu + 1.0)).exp(), 0.0);
    let targets = [
        AxisymTarget { radius: 0.5, cos: 1.0 },
        AxisymTarget { radius: 1.3, cos: 0.4 },
        AxisymTarget { radius: 2.0, cos: -0.7 },
    ];
    let vals = axisym_inverse_fourier(g, 3, &targets, &tensor_quad(10.0), Some(1e-8)).unwrap();
    for (t, v) in targets.iter().zip(&vals) {
        let x1 = t.radius * t.cos;
        let want = Complex64::from_polar(1.0, x1) * (4.0 * PI).powf(-1.5) * (-t.radius * t.radius / 4.0).exp();
        assert!((v - want).norm() < 1e-9, "{t:?}: {v} vs {want}");
    }
}

#[test]
fn axisymmetric_rejects_one_dimension() {
    let t = [AxisymTarget { radius: 1.0, cos: 1.0 }];
    assert!(axisym_inverse_fourier(|_, _| Complex64::new(1.0, 0.0), 1, &t, &tensor_quad(1.0), None).is_err());
}
