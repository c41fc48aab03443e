use alloc::vec::Vec;

use crate::algebra::{JonesMatrix, JonesVector};
use crate::constellation::Constellation;
use crate::error::Error;
use crate::scalar::math;

/// One-tap CMA/MMA parameters; a single radius is plain CMA.
#[derive(Clone, Debug, PartialEq)]
pub struct CmaConfig {
    pub mu: f64,
    pub radii: Vec<f64>,
    /// Polarization-switched targets: the stronger output aims at the
    /// largest radius and the other at zero.
    pub pol_switched: bool,
}

impl CmaConfig {
    pub fn for_constellation(c: &Constellation, mu: f64) -> Self {
        Self { mu, radii: c.mma_radii().to_vec(), pol_switched: c.format().is_pol_switched() }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::InvalidParams("CMA step size must be positive"));
        }
        if self.radii.is_empty() || self.radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::InvalidParams("CMA radii must be non-empty and non-negative"));
        }
        Ok(())
    }
}

/// `√(E|c|⁴ / E|c|²)` over the per-polarization values of `c`.
pub fn godard_radius(c: &Constellation) -> f64 {
    let (mut m2, mut m4) = (0.0, 0.0);
    for p in c.points() {
        for z in [p.x, p.y] {
            let e = z.norm_sqr();
            m2 += e;
            m4 += e * e;
        }
    }
    math::sqrt(m4 / m2)
}

fn nearest_radius(radii: &[f64], r: f64) -> f64 {
    let mut best = radii[0];
    for &q in &radii[1..] {
        if (q - r).abs() < (best - r).abs() {
            best = q;
        }
    }
    best
}

/// `z = W y`, then `W ← W + μ (e ⊙ z) yᴴ` with `eᵢ = Rᵢ² − |zᵢ|²`.
/// Returns the pre-update output `z`.
pub fn cma_mma_step(w: &mut JonesMatrix, y: &JonesVector, cfg: &CmaConfig) -> JonesVector {
    let z = *w * *y;
    let (p1, p2) = (z.x.norm_sqr(), z.y.norm_sqr());
    let targets = if cfg.pol_switched {
        let top = cfg.radii[cfg.radii.len() - 1];
        if p1 >= p2 { [top, 0.0] } else { [0.0, top] }
    } else {
        [nearest_radius(&cfg.radii, math::sqrt(p1)), nearest_radius(&cfg.radii, math::sqrt(p2))]
    };
    let e = [targets[0] * targets[0] - p1, targets[1] * targets[1] - p2];
    let g = [z.x * (cfg.mu * e[0]), z.y * (cfg.mu * e[1])];
    let yc = [y.x.conj(), y.y.conj()];
    for (row, gr) in w.m.iter_mut().zip(g) {
        for (cell, yk) in row.iter_mut().zip(yc) {
            *cell += gr * yk;
        }
    }
    z
}
