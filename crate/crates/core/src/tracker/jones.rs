use super::{Schedule, StepParams, TrackOutput, RENORMALIZE_PERIOD};
use crate::algebra::{jones_combined, mul_i, pauli_apply, JonesMatrix, JonesVector, SopVector};
use crate::channel::NoiseParams;
use crate::constellation::Constellation;
use crate::error::Error;
use crate::scalar::Real;

/// One generic tracker step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JonesStep<S = f64> {
    pub index: usize,
    pub h_next: JonesMatrix<S>,
    pub theta: S,
    pub alpha: SopVector<S>,
}

/// One symbol of the Jones tracker with explicit gains.
///
/// `gain_ph = −2μ_ph` and `gain_sop = −2μ_SOP`; `gain_sop` is ignored when
/// `update_sop` is false and `α̃ = 0` is used instead. The matrix update is
/// always `H · T(−θ̃, −α̃)`.
pub fn jones_step<S: Real>(
    h: &JonesMatrix<S>,
    y: &JonesVector<S>,
    c: &Constellation,
    gain_ph: S,
    gain_sop: S,
    update_sop: bool,
) -> JonesStep<S> {
    let z = *h * *y;
    let index = c.decide_index(&z);
    let x_hat: JonesVector<S> = c.point(index).cast();
    let a = z - x_hat;

    // θ̃ = −2μ Re(i aᴴ z)
    let theta = gain_ph * mul_i(a.inner(&z)).re;

    let alpha = if update_sop {
        // α̃ᵢ = −2μ Re(i aᴴ H σᵢ y); σᵢ y is a component permutation.
        SopVector(core::array::from_fn(|i| {
            let hs = *h * pauli_apply(i, y);
            gain_sop * mul_i(a.inner(&hs)).re
        }))
    } else {
        SopVector::zero()
    };

    let h_next = *h * jones_combined(-theta, &-alpha);
    JonesStep { index, h_next, theta, alpha }
}

/// Jones tracker state: `H_k = T̂_k⁻¹`.
#[derive(Clone, Debug)]
pub struct TrackerState {
    h: JonesMatrix,
    schedule: Schedule,
    k: u64,
}

impl TrackerState {
    pub fn new(h0: JonesMatrix, steps: StepParams, params: &NoiseParams, es: f64) -> Result<Self, Error> {
        Ok(Self { h: h0, schedule: Schedule::new(steps, params, es)?, k: 0 })
    }

    pub fn h_matrix(&self) -> &JonesMatrix {
        &self.h
    }

    /// Symbols processed so far.
    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn steps(&self) -> &StepParams {
        self.schedule.steps()
    }

    /// Decides `y` and updates the estimate.
    pub fn step(&mut self, y: &JonesVector, c: &Constellation) -> TrackOutput {
        self.k += 1;
        let (mu_ph, mu_sop) = self.schedule.at(self.k);
        let due = self.schedule.steps().sop_due(self.k);
        let s = jones_step(&self.h, y, c, -2.0 * mu_ph, -2.0 * mu_sop, due);
        self.h = s.h_next;
        if self.k.is_multiple_of(RENORMALIZE_PERIOD) {
            self.h = self.h.nearest_unitary();
        }
        TrackOutput { index: s.index, theta: s.theta, alpha: s.alpha }
    }
}

pub fn track_jones(state: &mut TrackerState, y: &JonesVector, c: &Constellation) -> TrackOutput {
    state.step(y, c)
}
