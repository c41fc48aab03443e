//! Jones, Stokes and real-4D polarization algebra.
//!
//! Everything here is a pure function on small value types. The Jones path
//! is generic over [`Real`](crate::scalar::Real); the Stokes and 4D paths are
//! `f64` only.

mod jones;
mod real4;
mod stokes;

pub use jones::{
    jones_combined, jones_from_sop, jones_inverse, pauli, pauli_apply, pauli_combination, Complex,
    JonesMatrix, JonesVector, PauliTensor, SopVector, NON_UNITARY_TOLERANCE, PAULI, SMALL_ANGLE,
};
pub(crate) use jones::mul_i;
pub use real4::{
    embed_jones, jones_from_vec4, rot4_from_params, vec4_from_jones, Basis4Tensor, Rotation4, Vector4,
    BASIS4,
};
pub use stokes::{cross_matrix, mueller_from_jones, mueller_from_sop, stokes_from_jones, MuellerMatrix, StokesVector};

use nalgebra::Matrix4;

/// Orthogonal Procrustes projection: for `B = UΣVᵀ`, returns
/// `U diag(1, 1, 1, det(UVᵀ)) Vᵀ`, the proper rotation maximizing `tr(RᵀB)`.
pub fn procrustes(b: &Matrix4<f64>) -> Matrix4<f64> {
    procrustes_with_spectrum(b).0
}

/// Like [`procrustes`], also returning the singular values of `B` in
/// descending order.
pub fn procrustes_with_spectrum(b: &Matrix4<f64>) -> (Matrix4<f64>, [f64; 4]) {
    let svd = b.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let sv = svd.singular_values;
    // nalgebra does not sort singular values; a reflection must flip the smallest.
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap_or(core::cmp::Ordering::Equal));
    let mut d = Matrix4::identity();
    if (u * v_t).determinant() < 0.0 {
        d[(order[3], order[3])] = -1.0;
    }
    let spectrum = order.map(|i| sv[i]);
    (u * d * v_t, spectrum)
}
