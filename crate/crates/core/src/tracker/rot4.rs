use super::{Schedule, StepParams, TrackOutput, RENORMALIZE_PERIOD};
use crate::algebra::{jones_from_vec4, rot4_from_params, vec4_from_jones, Rotation4, SopVector, Vector4, BASIS4};
use crate::channel::NoiseParams;
use crate::constellation::Constellation;
use crate::error::Error;

/// Decision and update parameters of the real-4D tracker.
///
/// `θ̃ = 2μ_ph (R̂⁻¹v_y − x̂)ᵀ R̂⁻¹ ρ̄₁ v_y`,
/// `α̃ᵢ = −2μ_SOP (R̂⁻¹v_y − x̂)ᵀ R̂⁻¹ ρᵢ v_y`.
pub fn rot4_update(
    r_inv: &Rotation4,
    v_y: &Vector4,
    c: &Constellation,
    mu_ph: f64,
    mu_sop: f64,
    update_sop: bool,
) -> (usize, f64, SopVector) {
    let v_z = *r_inv * *v_y;
    let index = c.decide_index(&jones_from_vec4(&v_z));
    let a = v_z - vec4_from_jones(c.point(index));
    let theta = 2.0 * mu_ph * a.dot(&(*r_inv * (BASIS4.rhobar1 * *v_y)));
    let alpha = if update_sop {
        SopVector(core::array::from_fn(|i| -2.0 * mu_sop * a.dot(&(*r_inv * (*BASIS4.rho(i) * *v_y)))))
    } else {
        SopVector::zero()
    };
    (index, theta, alpha)
}

#[derive(Clone, Debug)]
pub struct Rot4TrackerState {
    r_inv: Rotation4,
    schedule: Schedule,
    k: u64,
}

impl Rot4TrackerState {
    pub fn new(r_inv0: Rotation4, steps: StepParams, params: &NoiseParams, es: f64) -> Result<Self, Error> {
        Ok(Self { r_inv: r_inv0, schedule: Schedule::new(steps, params, es)?, k: 0 })
    }

    pub fn r_inv(&self) -> &Rotation4 {
        &self.r_inv
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Decides `v_y` and updates `R̂⁻¹ ← R̂⁻¹ R(−θ̃, −α̃)`.
    pub fn step(&mut self, v_y: &Vector4, c: &Constellation) -> TrackOutput {
        self.k += 1;
        let (mu_ph, mu_sop) = self.schedule.at(self.k);
        let due = self.schedule.steps().sop_due(self.k);
        let (index, theta, alpha) = rot4_update(&self.r_inv, v_y, c, mu_ph, mu_sop, due);
        self.r_inv = self.r_inv * rot4_from_params(-theta, &-alpha);
        if self.k.is_multiple_of(RENORMALIZE_PERIOD) {
            self.r_inv = self.r_inv.nearest_rotation();
        }
        TrackOutput { index, theta, alpha }
    }
}

pub fn track_rot4(state: &mut Rot4TrackerState, v_y: &Vector4, c: &Constellation) -> TrackOutput {
    state.step(v_y, c)
}
