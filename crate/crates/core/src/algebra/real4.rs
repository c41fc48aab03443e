//! Real 4D description: `v = [Re z₁, Im z₁, Re z₂, Im z₂]` and 4×4 rotations.

use core::ops::{Mul, Sub};

use super::jones::{jones_combined, Complex, JonesMatrix, JonesVector, SopVector};

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Vector4(pub [f64; 4]);

impl Vector4 {
    pub fn dot(&self, other: &Self) -> f64 {
        (0..4).map(|i| self.0[i] * other.0[i]).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dot(self)
    }
}

impl Sub for Vector4 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(core::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

pub fn vec4_from_jones(z: &JonesVector) -> Vector4 {
    Vector4([z.x.re, z.x.im, z.y.re, z.y.im])
}

pub fn jones_from_vec4(v: &Vector4) -> JonesVector {
    JonesVector::new(Complex::new(v.0[0], v.0[1]), Complex::new(v.0[2], v.0[3]))
}

/// Row-major 4×4 real matrix; rotations in SO(4) when produced by this crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation4(pub [[f64; 4]; 4]);

impl Rotation4 {
    pub fn identity() -> Self {
        Self(core::array::from_fn(|r| core::array::from_fn(|c| if r == c { 1.0 } else { 0.0 })))
    }

    pub fn zero() -> Self {
        Self([[0.0; 4]; 4])
    }

    pub fn transpose(&self) -> Self {
        Self(core::array::from_fn(|r| core::array::from_fn(|c| self.0[c][r])))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                d = d.max((self.0[r][c] - other.0[r][c]).abs());
            }
        }
        d
    }

    pub fn orthogonality_deviation(&self) -> f64 {
        (*self * self.transpose()).max_abs_diff(&Self::identity())
    }

    pub fn to_matrix(&self) -> nalgebra::Matrix4<f64> {
        nalgebra::Matrix4::from_fn(|r, c| self.0[r][c])
    }

    pub fn from_matrix(m: &nalgebra::Matrix4<f64>) -> Self {
        Self(core::array::from_fn(|r| core::array::from_fn(|c| m[(r, c)])))
    }

    pub fn det(&self) -> f64 {
        self.to_matrix().determinant()
    }

    /// Nearest proper rotation `U diag(1,1,1,det(UVᵀ)) Vᵀ`.
    pub fn nearest_rotation(&self) -> Self {
        Self::from_matrix(&super::procrustes(&self.to_matrix()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(core::array::from_fn(|r| core::array::from_fn(|c| self.0[r][c] * s)))
    }
}

impl Mul for Rotation4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(core::array::from_fn(|r| {
            core::array::from_fn(|c| (0..4).map(|k| self.0[r][k] * rhs.0[k][c]).sum())
        }))
    }
}

impl Mul<Vector4> for Rotation4 {
    type Output = Vector4;
    fn mul(self, v: Vector4) -> Vector4 {
        Vector4(core::array::from_fn(|r| (0..4).map(|k| self.0[r][k] * v.0[k]).sum()))
    }
}

/// Real image of a complex 2×2 matrix: entry `a + ib` becomes the block
/// `[[a, −b], [b, a]]`.
pub fn embed_jones(u: &JonesMatrix) -> Rotation4 {
    let mut out = [[0.0; 4]; 4];
    for r in 0..2 {
        for c in 0..2 {
            let z = u.m[r][c];
            out[2 * r][2 * c] = z.re;
            out[2 * r][2 * c + 1] = -z.im;
            out[2 * r + 1][2 * c] = z.im;
            out[2 * r + 1][2 * c + 1] = z.re;
        }
    }
    Rotation4(out)
}

/// The four skew-symmetric generators used by the 4D tracker.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Basis4Tensor {
    pub rho1: Rotation4,
    pub rho2: Rotation4,
    pub rho3: Rotation4,
    pub rhobar1: Rotation4,
}

impl Basis4Tensor {
    pub fn rho(&self, i: usize) -> &Rotation4 {
        match i {
            0 => &self.rho1,
            1 => &self.rho2,
            2 => &self.rho3,
            _ => panic!("basis index {i} out of range"),
        }
    }
}

pub const BASIS4: Basis4Tensor = Basis4Tensor {
    rho1: Rotation4([
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]),
    rho2: Rotation4([
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ]),
    rho3: Rotation4([
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ]),
    rhobar1: Rotation4([
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]),
};

/// `exp((θ,0,0)·ρ̄ − α·ρ)`, evaluated as the real image of `T(θ, α)`.
pub fn rot4_from_params(theta_phase: f64, alpha: &SopVector) -> Rotation4 {
    embed_jones(&jones_combined(theta_phase, alpha))
}
