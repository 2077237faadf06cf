use fracwave_core::special::{bessel_j, bessel_j_prime, BesselOrder};
use proptest::prelude::*;
use std::f64::consts::PI;

/// Plain power series for J₀, summed in long form with no shared code.
fn j0_oracle(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut fact = 1.0;
    for k in 0..60 {
        if k > 0 {
            fact *= k as f64;
        }
        let t = (-1f64).powi(k) * (x / 2.0).powi(2 * k) / (fact * fact);
        sum += t;
    }
    sum
}

#[test]
fn first_zero_of_j0_from_bisection() {
    let (mut a, mut b) = (2.0, 3.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if j0_oracle(a) * j0_oracle(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    let zero = 0.5 * (a + b);
    assert!((zero - 2.404_825_557_7).abs() < 1e-9);
    let j = bessel_j(BesselOrder::new(0.0).unwrap(), 2.404_825_557_7).unwrap();
    assert!(j.abs() < 1e-9);
}

#[test]
fn j0_matches_oracle_on_moderate_range() {
    let o = BesselOrder::new(0.0).unwrap();
    for k in 1..40 {
        let x = 0.25 * k as f64;
        let got = bessel_j(o, x).unwrap();
        assert!((got - j0_oracle(x)).abs() < 1e-12, "x = {x}");
    }
}

#[test]
fn wronskian_at_half_order() {
    // J_ν J_{−ν}' − J_ν' J_{−ν} = −2 sin(νπ)/(πx)
    let nu = 0.5;
    let p = BesselOrder::new(nu).unwrap();
    let m = BesselOrder::new(-nu).unwrap();
    for &x in &[0.01, 0.3, 1.0, 4.0, 25.0, 700.0, 9000.0] {
        let w = bessel_j(p, x).unwrap() * bessel_j_prime(m, x).unwrap()
            - bessel_j_prime(p, x).unwrap() * bessel_j(m, x).unwrap();
        let want = -2.0 * (nu * PI).sin() / (PI * x);
        assert!((w - want).abs() < 1e-8 * want.abs(), "x {x}: {w} vs {want}");
    }
}

#[test]
fn negative_argument_rejected() {
    assert!(bessel_j(BesselOrder::new(1.0).unwrap(), -1.0).is_err());
}

proptest! {
    #[test]
    fn three_term_recurrence_holds(nu in 0.0f64..4.0, x in 0.5f64..200.0) {
        // J_{ν−1} + J_{ν+1} = (2ν/x) J_ν, checked for ν ≥ 1/2 so every order is legal.
        let nu = nu + 0.5;
        let j = |o: f64| bessel_j(BesselOrder::new(o).unwrap(), x).unwrap();
        let lhs = j(nu - 1.0) + j(nu + 1.0);
        let rhs = 2.0 * nu / x * j(nu);
        let scale = j(nu - 1.0).abs() + j(nu + 1.0).abs() + 1e-3 / x.sqrt();
        prop_assert!((lhs - rhs).abs() < 1e-9 * scale, "nu {} x {}: {} vs {}", nu, x, lhs, rhs);
    }

    #[test]
    fn large_argument_envelope(nu in 0.0f64..3.0, x in 50.0f64..1e4) {
        let j = bessel_j(BesselOrder::new(nu).unwrap(), x).unwrap();
        prop_assert!(j.abs() <= (2.0 / (PI * x)).sqrt() * 1.05);
    }
}
