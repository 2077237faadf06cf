//! Bessel, Hankel and modified Bessel functions at the accuracy the kernels need.

pub(crate) mod bessel;
mod hankel;
mod modified;

pub use bessel::{bessel_j, bessel_j_prime, BesselOrder};
pub use hankel::{hankel1, hankel1_scaled, spherical_hankel1_scaled};
pub use modified::bessel_k_scaled;

/// Γ(x) for real x away from the nonpositive integers.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Surface area of the unit sphere S^{n−1}.
pub fn sphere_area(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / gamma(h)
}

/// Binomial coefficient C(γ, j) for real γ.
pub fn binomial(gamma: f64, j: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..j {
        c *= (gamma - i as f64) / (i as f64 + 1.0);
    }
    c
}
