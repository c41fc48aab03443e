#![allow(dead_code)]

use poltrack_core::algebra::{jones_combined, Complex, JonesMatrix, JonesVector};
use poltrack_core::channel::sop_from_direction;
use poltrack_core::rng::RngStream;

/// Haar-random element of U(2).
pub fn random_unitary(rng: &mut RngStream) -> JonesMatrix {
    let g = [rng.standard_normal(), rng.standard_normal(), rng.standard_normal(), rng.standard_normal()];
    jones_combined(std::f64::consts::TAU * rng.uniform(), &sop_from_direction(g))
}

/// Circular Gaussian Jones vector with `E‖v‖² = 2σ²·2`.
pub fn random_jones(rng: &mut RngStream, sigma: f64) -> JonesVector {
    JonesVector::new(
        Complex::new(rng.normal(sigma), rng.normal(sigma)),
        Complex::new(rng.normal(sigma), rng.normal(sigma)),
    )
}

/// Binomial standard error of a rate estimate.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
