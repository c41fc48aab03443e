use nalgebra::Matrix4;

use crate::algebra::{jones_from_vec4, procrustes_with_spectrum, vec4_from_jones, Rotation4, Vector4};
use crate::constellation::Constellation;
use crate::error::Error;

/// A block whose cross-covariance has `σ_min < DEGENERATE_RATIO · σ_max` keeps
/// the previous estimate.
pub const DEGENERATE_RATIO: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KabschConfig {
    pub block_len: usize,
}

impl KabschConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.block_len == 0 {
            return Err(Error::InvalidParams("Kabsch block length must be at least 1"));
        }
        Ok(())
    }
}

/// Orthogonal Procrustes fit of `B = Σ x̂ yᵀ`; `None` when `B` is degenerate.
pub fn kabsch_estimate(b: &Matrix4<f64>) -> Option<Rotation4> {
    let (r, sv) = procrustes_with_spectrum(b);
    if sv[3].is_nan() || sv[3] < DEGENERATE_RATIO * sv[0] || sv[0] == 0.0 {
        return None;
    }
    Some(Rotation4::from_matrix(&r))
}

/// Causal block-wise Kabsch tracker: symbols of a block are decided with the
/// estimate fitted on the previous block.
#[derive(Clone, Debug)]
pub struct KabschState {
    cfg: KabschConfig,
    r_inv: Rotation4,
    acc: Matrix4<f64>,
    filled: usize,
}

impl KabschState {
    pub fn new(cfg: KabschConfig, r_inv0: Rotation4) -> Result<Self, Error> {
        cfg.validate()?;
        Ok(Self { cfg, r_inv: r_inv0, acc: Matrix4::zeros(), filled: 0 })
    }

    pub fn r_inv(&self) -> &Rotation4 {
        &self.r_inv
    }

    /// Decides one symbol; refits the estimate when the block is complete.
    pub fn step(&mut self, v_y: &Vector4, c: &Constellation) -> usize {
        let z = self.r_inv * *v_y;
        let (index, x_hat) = c.decide(&jones_from_vec4(&z));
        let x = vec4_from_jones(&x_hat);
        for r in 0..4 {
            for col in 0..4 {
                self.acc[(r, col)] += x.0[r] * v_y.0[col];
            }
        }
        self.filled += 1;
        if self.filled == self.cfg.block_len {
            if let Some(r) = kabsch_estimate(&self.acc) {
                self.r_inv = r;
            }
            self.acc = Matrix4::zeros();
            self.filled = 0;
        }
        index
    }

    /// Decides a whole block with the current estimate, then refits.
    pub fn track_block(&mut self, block: &[Vector4], c: &Constellation) -> alloc::vec::Vec<usize> {
        block.iter().map(|v| self.step(v, c)).collect()
    }
}
