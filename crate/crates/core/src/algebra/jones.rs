//! Jones-space vectors and matrices, the Pauli tensor, and the closed-form
//! phase/SOP rotation `T(θ, α) = e^{-iθ} (I cos‖α‖ − i (α̂·σ) sin‖α‖)`.

use core::ops::{Add, Mul, Neg, Sub};

use crate::error::Error;
use crate::scalar::Real;

pub type Complex<S = f64> = num_complex::Complex<S>;

/// Below this rotation angle the direction `α/‖α‖` is numerically undefined
/// and the first-order limit `I − i(α·σ)` is used instead.
pub const SMALL_ANGLE: f64 = 1e-9;

/// Tolerance beyond which [`jones_inverse`] refuses a matrix as non-unitary.
pub const NON_UNITARY_TOLERANCE: f64 = 1e-6;

#[inline(always)]
pub(crate) fn mul_i<S: Real>(z: Complex<S>) -> Complex<S> {
    Complex::new(-z.im, z.re)
}

#[inline(always)]
pub(crate) fn mul_neg_i<S: Real>(z: Complex<S>) -> Complex<S> {
    Complex::new(z.im, -z.re)
}

#[inline(always)]
fn scale<S: Real>(z: Complex<S>, r: S) -> Complex<S> {
    Complex::new(z.re * r, z.im * r)
}

/// Two-component complex field `(E_x, E_y)`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct JonesVector<S = f64> {
    pub x: Complex<S>,
    pub y: Complex<S>,
}

impl<S: Real> JonesVector<S> {
    #[inline(always)]
    pub fn new(x: Complex<S>, y: Complex<S>) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(Complex::new(S::zero(), S::zero()), Complex::new(S::zero(), S::zero()))
    }

    /// `aᴴ b`.
    #[inline(always)]
    pub fn inner(&self, other: &Self) -> Complex<S> {
        self.x.conj() * other.x + self.y.conj() * other.y
    }

    #[inline(always)]
    pub fn norm_sqr(&self) -> S {
        self.x.re * self.x.re + self.x.im * self.x.im + self.y.re * self.y.re + self.y.im * self.y.im
    }

    pub fn cast<T: Real>(&self) -> JonesVector<T> {
        JonesVector::new(
            Complex::new(T::from_f64(self.x.re.to_f64()), T::from_f64(self.x.im.to_f64())),
            Complex::new(T::from_f64(self.y.re.to_f64()), T::from_f64(self.y.im.to_f64())),
        )
    }

    /// Multiplies both components by the same complex factor.
    pub fn scale(&self, c: Complex<S>) -> Self {
        Self::new(self.x * c, self.y * c)
    }
}

impl JonesVector<f64> {
    pub fn norm(&self) -> f64 {
        crate::scalar::math::sqrt(self.norm_sqr())
    }

    pub fn is_finite(&self) -> bool {
        self.x.re.is_finite() && self.x.im.is_finite() && self.y.re.is_finite() && self.y.im.is_finite()
    }
}

impl<S: Real> Add for JonesVector<S> {
    type Output = Self;
    #[inline(always)]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<S: Real> Sub for JonesVector<S> {
    type Output = Self;
    #[inline(always)]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<S: Real> Neg for JonesVector<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Row-major 2×2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JonesMatrix<S = f64> {
    pub m: [[Complex<S>; 2]; 2],
}

impl<S: Real> JonesMatrix<S> {
    #[inline(always)]
    pub fn new(m: [[Complex<S>; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        let o = Complex::new(S::one(), S::zero());
        let z = Complex::new(S::zero(), S::zero());
        Self::new([[o, z], [z, o]])
    }

    pub fn zero() -> Self {
        let z = Complex::new(S::zero(), S::zero());
        Self::new([[z, z], [z, z]])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::new([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn det(&self) -> Complex<S> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Entry-wise product with a real scalar.
    #[inline(always)]
    pub fn scale_real(&self, r: S) -> Self {
        let m = &self.m;
        Self::new([
            [scale(m[0][0], r), scale(m[0][1], r)],
            [scale(m[1][0], r), scale(m[1][1], r)],
        ])
    }

    /// Entry-wise product with a complex scalar.
    #[inline(always)]
    pub fn scale_complex(&self, c: Complex<S>) -> Self {
        let m = &self.m;
        Self::new([[m[0][0] * c, m[0][1] * c], [m[1][0] * c, m[1][1] * c]])
    }

    /// Multiplication by `−i`.
    #[inline(always)]
    pub fn mul_neg_i(&self) -> Self {
        let m = &self.m;
        Self::new([
            [mul_neg_i(m[0][0]), mul_neg_i(m[0][1])],
            [mul_neg_i(m[1][0]), mul_neg_i(m[1][1])],
        ])
    }

    pub fn cast<T: Real>(&self) -> JonesMatrix<T> {
        let c = |z: Complex<S>| Complex::new(T::from_f64(z.re.to_f64()), T::from_f64(z.im.to_f64()));
        let m = &self.m;
        JonesMatrix::new([[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]])
    }
}

impl JonesMatrix<f64> {
    /// `max |U Uᴴ − I|` over the four entries.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = *self * self.adjoint();
        (p - JonesMatrix::identity()).max_abs()
    }

    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry-wise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// Nearest unitary matrix (polar factor), in closed form for 2×2.
    ///
    /// With `A = U P` and `d = det A`, `A + (d/|d|)·adj(A)ᴴ = tr(P)·U`.
    pub fn nearest_unitary(&self) -> Self {
        let d = self.det();
        let phase = d / d.norm();
        let m = &self.m;
        // adj(A) = [[m11, -m01], [-m10, m00]]; its conjugate transpose:
        let adj_h = JonesMatrix::new([
            [m[1][1].conj(), -m[1][0].conj()],
            [-m[0][1].conj(), m[0][0].conj()],
        ]);
        let n = *self + adj_h.scale_complex(phase);
        let norm = crate::scalar::math::sqrt(n.det().norm());
        n.scale_real(1.0 / norm)
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<S: Real> Add for JonesMatrix<S> {
    type Output = Self;
    #[inline(always)]
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        Self::new([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl<S: Real> Sub for JonesMatrix<S> {
    type Output = Self;
    #[inline(always)]
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        Self::new([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }
}

impl<S: Real> Mul for JonesMatrix<S> {
    type Output = Self;
    #[inline(always)]
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        Self::new([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl<S: Real> Mul<JonesVector<S>> for JonesMatrix<S> {
    type Output = JonesVector<S>;
    #[inline(always)]
    fn mul(self, v: JonesVector<S>) -> JonesVector<S> {
        let a = &self.m;
        JonesVector::new(a[0][0] * v.x + a[0][1] * v.y, a[1][0] * v.x + a[1][1] * v.y)
    }
}

/// Rotation parameters `α = (α₁, α₂, α₃)` in radians; `θ = ‖α‖`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SopVector<S = f64>(pub [S; 3]);

impl<S: Real> SopVector<S> {
    pub fn new(a1: S, a2: S, a3: S) -> Self {
        Self([a1, a2, a3])
    }

    pub fn zero() -> Self {
        Self([S::zero(); 3])
    }

    #[inline(always)]
    pub fn norm_sqr(&self) -> S {
        let a = &self.0;
        a[0] * a[0] + a[1] * a[1] + a[2] * a[2]
    }
}

impl SopVector<f64> {
    pub fn theta(&self) -> f64 {
        crate::scalar::math::sqrt(self.norm_sqr())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl<S: Real> Neg for SopVector<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl<S: Real> Add for SopVector<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

/// The three Pauli matrices in the ordering used throughout the crate:
/// `σ₁ = diag(1, −1)`, `σ₂ = [[0, 1], [1, 0]]`, `σ₃ = [[0, −i], [i, 0]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTensor<S = f64> {
    pub sigma1: JonesMatrix<S>,
    pub sigma2: JonesMatrix<S>,
    pub sigma3: JonesMatrix<S>,
}

impl<S: Real> PauliTensor<S> {
    pub fn get(&self, i: usize) -> &JonesMatrix<S> {
        match i {
            0 => &self.sigma1,
            1 => &self.sigma2,
            2 => &self.sigma3,
            _ => panic!("Pauli index {i} out of range"),
        }
    }
}

const fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

pub const PAULI: PauliTensor = PauliTensor {
    sigma1: JonesMatrix { m: [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]] },
    sigma2: JonesMatrix { m: [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]] },
    sigma3: JonesMatrix { m: [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]] },
};

/// The Pauli tensor in an arbitrary scalar type.
pub fn pauli<S: Real>() -> PauliTensor<S> {
    PauliTensor {
        sigma1: PAULI.sigma1.cast(),
        sigma2: PAULI.sigma2.cast(),
        sigma3: PAULI.sigma3.cast(),
    }
}

/// `σᵢ v` as a sign/swap permutation of the components (no arithmetic).
#[inline(always)]
pub fn pauli_apply<S: Real>(i: usize, v: &JonesVector<S>) -> JonesVector<S> {
    match i {
        0 => JonesVector::new(v.x, -v.y),
        1 => JonesVector::new(v.y, v.x),
        2 => JonesVector::new(mul_neg_i(v.y), mul_i(v.x)),
        _ => panic!("Pauli index {i} out of range"),
    }
}

/// `c·σ = c₁σ₁ + c₂σ₂ + c₃σ₃`, evaluated on the dense matrices.
pub fn pauli_combination<S: Real>(coeffs: &[S; 3]) -> JonesMatrix<S> {
    let s = pauli::<S>();
    s.sigma1.scale_real(coeffs[0]) + s.sigma2.scale_real(coeffs[1]) + s.sigma3.scale_real(coeffs[2])
}

/// `R(α) = exp(−i α·σ) = I cos θ − i (α̂·σ) sin θ`.
pub fn jones_from_sop<S: Real>(alpha: &SopVector<S>) -> JonesMatrix<S> {
    let theta = alpha.norm_sqr().sqrt();
    if theta < S::from_f64(SMALL_ANGLE) {
        return JonesMatrix::identity() + pauli_combination(&alpha.0).mul_neg_i();
    }
    let a = &alpha.0;
    let a_hat = [a[0] / theta, a[1] / theta, a[2] / theta];
    let (s, c) = (theta.sin(), theta.cos());
    JonesMatrix::identity().scale_real(c) + pauli_combination(&a_hat).scale_real(s).mul_neg_i()
}

/// `T(θ, α) = e^{−iθ} R(α)`: joint phase and SOP rotation.
pub fn jones_combined<S: Real>(theta_phase: S, alpha: &SopVector<S>) -> JonesMatrix<S> {
    let phase = Complex::new(theta_phase.cos(), -theta_phase.sin());
    jones_from_sop(alpha).scale_complex(phase)
}

/// `Uᴴ`, after checking that `U` is unitary to within
/// [`NON_UNITARY_TOLERANCE`].
pub fn jones_inverse(u: &JonesMatrix) -> Result<JonesMatrix, Error> {
    let dev = u.unitarity_deviation();
    if dev.is_nan() || dev > NON_UNITARY_TOLERANCE {
        return Err(Error::NonUnitary(dev));
    }
    Ok(u.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    /// exp(−i(α·σ + θI)) by a 30-term power series, independent of the
    /// closed form.
    fn series_exp(theta: f64, alpha: [f64; 3]) -> JonesMatrix {
        let gen = (PAULI.sigma1.scale_real(alpha[0])
            + PAULI.sigma2.scale_real(alpha[1])
            + PAULI.sigma3.scale_real(alpha[2])
            + JonesMatrix::identity().scale_real(theta))
        .mul_neg_i();
        let mut term = JonesMatrix::identity();
        let mut sum = JonesMatrix::identity();
        for n in 1..30 {
            term = (term * gen).scale_real(1.0 / n as f64);
            sum = sum + term;
        }
        sum
    }

    fn ident() -> JonesMatrix {
        JonesMatrix::identity()
    }

    #[test]
    fn zero_rotation_is_identity() {
        assert_eq!(jones_from_sop(&SopVector::new(0.0, 0.0, 0.0)), ident());
        assert!(jones_combined(0.0, &SopVector::zero()).max_abs_diff(&ident()) < 1e-15);
    }

    #[test]
    fn half_turn_is_minus_identity() {
        let u = jones_from_sop(&SopVector::new(PI, 0.0, 0.0));
        assert!(u.max_abs_diff(&ident().scale_real(-1.0)) < 1e-15);
    }

    #[test]
    fn quarter_turn_about_first_axis_matches_series() {
        let u = jones_from_sop(&SopVector::new(FRAC_PI_4, 0.0, 0.0));
        let expected = JonesMatrix::new([
            [c(FRAC_1_SQRT_2, -FRAC_1_SQRT_2), c(0.0, 0.0)],
            [c(0.0, 0.0), c(FRAC_1_SQRT_2, FRAC_1_SQRT_2)],
        ]);
        assert!(u.max_abs_diff(&expected) < 1e-15);
        assert!(u.max_abs_diff(&series_exp(0.0, [FRAC_PI_4, 0.0, 0.0])) < 1e-13);
    }

    #[test]
    fn pure_phase_quarter_turn_is_minus_i() {
        let u = jones_combined(FRAC_PI_2, &SopVector::zero());
        assert!(u.max_abs_diff(&ident().scale_complex(c(0.0, -1.0))) < 1e-15);
    }

    #[test]
    fn combined_matches_series_oracle() {
        let alpha = SopVector::new(0.1, 0.2, -0.05);
        let u = jones_combined(0.3, &alpha);
        assert!(u.max_abs_diff(&series_exp(0.3, alpha.0)) < 1e-13);
        let product = jones_from_sop(&alpha).scale_complex(Complex::new(0.3f64.cos(), -0.3f64.sin()));
        assert!(u.max_abs_diff(&product) < 1e-15);
    }

    #[test]
    fn small_angle_branch_is_continuous() {
        let tiny = SopVector::new(3e-10, -2e-10, 5e-10);
        let just_above = SopVector::new(3e-9, -2e-9, 5e-9);
        assert!(jones_from_sop(&tiny).max_abs_diff(&series_exp(0.0, tiny.0)) < 1e-17);
        assert!(jones_from_sop(&just_above).max_abs_diff(&series_exp(0.0, just_above.0)) < 1e-16);
    }

    #[test]
    fn inverse_of_identity_and_negated_argument() {
        assert_eq!(jones_inverse(&ident()).unwrap(), ident());
        let u = jones_from_sop(&SopVector::new(FRAC_PI_4, 0.0, 0.0));
        let inv = jones_inverse(&u).unwrap();
        assert!(inv.max_abs_diff(&jones_from_sop(&SopVector::new(-FRAC_PI_4, 0.0, 0.0))) < 1e-15);
    }

    #[test]
    fn inverse_rejects_non_unitary() {
        let m = ident().scale_real(1.01);
        assert!(matches!(jones_inverse(&m), Err(Error::NonUnitary(_))));
    }

    #[test]
    fn pauli_products_follow_structure_constants() {
        let s = [PAULI.sigma1, PAULI.sigma2, PAULI.sigma3];
        let i_unit = c(0.0, 1.0);
        for i in 0..3 {
            for j in 0..3 {
                let lhs = s[i] * s[j];
                let mut rhs = if i == j { ident() } else { JonesMatrix::zero() };
                for (k, sk) in s.iter().enumerate() {
                    let eps = levi_civita(i, j, k);
                    if eps != 0.0 {
                        rhs = rhs + sk.scale_complex(i_unit * eps);
                    }
                }
                assert_eq!(lhs, rhs, "σ{}σ{}", i + 1, j + 1);
            }
        }
    }

    fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    }

    #[test]
    fn pauli_apply_matches_dense_product() {
        let v = JonesVector::new(c(0.3, -1.2), c(0.7, 0.4));
        for i in 0..3 {
            assert_eq!(pauli_apply(i, &v), *PAULI.get(i) * v);
        }
    }

    #[test]
    fn non_commutativity_witness() {
        let a1 = SopVector::new(FRAC_PI_4, 0.0, 0.0);
        let a2 = SopVector::new(0.0, FRAC_PI_4, 0.0);
        let joint = jones_combined(0.0, &(a1 + a2));
        let product = jones_combined(0.0, &a1) * jones_combined(0.0, &a2);
        assert!(joint.max_abs_diff(&product) > 1e-3);
    }

    #[test]
    fn nearest_unitary_restores_perturbed_matrix() {
        let u = jones_combined(0.7, &SopVector::new(0.4, -1.1, 0.25));
        let mut p = u;
        p.m[0][1] += c(1e-7, -3e-8);
        p.m[1][1] += c(-2e-7, 5e-8);
        let q = p.nearest_unitary();
        assert!(q.unitarity_deviation() < 1e-15);
        assert!(q.max_abs_diff(&u) < 1e-6);
        assert!(u.nearest_unitary().max_abs_diff(&u) < 1e-15);
    }
}
