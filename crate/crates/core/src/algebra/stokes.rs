//! Stokes vectors and Mueller rotations.

use core::ops::{Add, Mul, Sub};

use super::jones::{JonesMatrix, JonesVector, SopVector};
use crate::scalar::math;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct StokesVector(pub [f64; 3]);

impl StokesVector {
    pub fn new(s1: f64, s2: f64, s3: f64) -> Self {
        Self([s1, s2, s3])
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.norm_sqr())
    }

    pub fn cross(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        Self([
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (0..3).map(|i| (self.0[i] - other.0[i]).abs()).fold(0.0, f64::max)
    }
}

impl Add for StokesVector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl Sub for StokesVector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

/// `S = xᴴσx`. With `w = x̄₁x₂`: `(|x₁|² − |x₂|², 2 Re w, 2 Im w)`.
pub fn stokes_from_jones(v: &JonesVector) -> StokesVector {
    let w = v.x.conj() * v.y;
    StokesVector([v.x.norm_sqr() - v.y.norm_sqr(), 2.0 * w.re, 2.0 * w.im])
}

/// Row-major 3×3 real rotation acting on Stokes vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MuellerMatrix(pub [[f64; 3]; 3]);

impl MuellerMatrix {
    pub fn identity() -> Self {
        Self([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        let mut t = [[0.0; 3]; 3];
        for (r, row) in t.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = m[c][r];
            }
        }
        Self(t)
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..3 {
            for c in 0..3 {
                d = d.max((self.0[r][c] - other.0[r][c]).abs());
            }
        }
        d
    }

    /// `max |M Mᵀ − I|`.
    pub fn orthogonality_deviation(&self) -> f64 {
        (*self * self.transpose()).max_abs_diff(&Self::identity())
    }

    /// Nearest rotation via SVD.
    pub fn nearest_rotation(&self) -> Self {
        let m = nalgebra::Matrix3::from_fn(|r, c| self.0[r][c]);
        let svd = m.svd(true, true);
        let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
        let mut d = nalgebra::Matrix3::identity();
        d[(2, 2)] = (u * v_t).determinant().signum();
        let r = u * d * v_t;
        Self(core::array::from_fn(|i| core::array::from_fn(|j| r[(i, j)])))
    }
}

impl Mul for MuellerMatrix {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = [[0.0; 3]; 3];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[r][k] * rhs.0[k][c]).sum();
            }
        }
        Self(out)
    }
}

impl Mul<StokesVector> for MuellerMatrix {
    type Output = StokesVector;
    fn mul(self, s: StokesVector) -> StokesVector {
        let m = &self.0;
        StokesVector(core::array::from_fn(|r| m[r][0] * s.0[0] + m[r][1] * s.0[1] + m[r][2] * s.0[2]))
    }
}

/// `[α×]`, the cross-product operator.
pub fn cross_matrix(a: &[f64; 3]) -> MuellerMatrix {
    MuellerMatrix([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])
}

/// `exp(2[α×])`: rotation of the Poincaré sphere about `α̂` by `2‖α‖`.
///
/// Rodrigues form `I + (sin 2θ/θ)[α×] + (2 sin²θ/θ²)[α×]²`, whose
/// coefficients tend to 2 and 2 as `θ → 0`.
pub fn mueller_from_sop(alpha: &SopVector) -> MuellerMatrix {
    let theta = alpha.theta();
    let (c1, c2) = if theta < 1e-6 {
        let t2 = theta * theta;
        (2.0 - 4.0 * t2 / 3.0, 2.0 - 2.0 * t2 / 3.0)
    } else {
        let s = math::sin(theta);
        (math::sin(2.0 * theta) / theta, 2.0 * s * s / (theta * theta))
    };
    let k = cross_matrix(&alpha.0);
    let k2 = k * k;
    let mut out = MuellerMatrix::identity();
    for r in 0..3 {
        for c in 0..3 {
            out.0[r][c] += c1 * k.0[r][c] + c2 * k2.0[r][c];
        }
    }
    out
}

/// Mueller image of a Jones matrix, `M_rc = ½ Re tr(σ_r U σ_c Uᴴ)`; the
/// common phase drops out.
pub fn mueller_from_jones(u: &JonesMatrix) -> MuellerMatrix {
    let p = crate::algebra::PAULI;
    let uh = u.adjoint();
    MuellerMatrix(core::array::from_fn(|r| {
        core::array::from_fn(|c| {
            let t = *p.get(r) * *u * *p.get(c) * uh;
            0.5 * (t.m[0][0] + t.m[1][1]).re
        })
    }))
}
