use super::{Schedule, StepParams, TrackOutput, RENORMALIZE_PERIOD};
use crate::algebra::{mueller_from_sop, MuellerMatrix, SopVector, StokesVector};
use crate::channel::NoiseParams;
use crate::constellation::Constellation;
use crate::error::Error;

/// `α̃ᵢ = 4μ (M̂⁻¹S_y − Ŝ_x)ᵀ M̂⁻¹ (eᵢ × S_y)` and the decided point index.
pub fn stokes_update(m_inv: &MuellerMatrix, s_y: &StokesVector, c: &Constellation, mu_sop: f64) -> (usize, SopVector) {
    let s_z = *m_inv * *s_y;
    let (index, s_hat) = c.decide_stokes(&s_z);
    let a = s_z - s_hat;
    let alpha = SopVector(core::array::from_fn(|i| {
        let mut e = StokesVector::default();
        e.0[i] = 1.0;
        4.0 * mu_sop * a.dot(&(*m_inv * e.cross(s_y)))
    }));
    (index, alpha)
}

/// Stokes-space SOP tracker; blind to the absolute phase.
#[derive(Clone, Debug)]
pub struct StokesTrackerState {
    m_inv: MuellerMatrix,
    schedule: Schedule,
    k: u64,
}

impl StokesTrackerState {
    pub fn new(m_inv0: MuellerMatrix, steps: StepParams, params: &NoiseParams, es: f64) -> Result<Self, Error> {
        Ok(Self { m_inv: m_inv0, schedule: Schedule::new(steps, params, es)?, k: 0 })
    }

    pub fn m_inv(&self) -> &MuellerMatrix {
        &self.m_inv
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Decides the Stokes image and updates `M̂⁻¹ ← M̂⁻¹ M(−α̃)`.
    pub fn step(&mut self, s_y: &StokesVector, c: &Constellation) -> TrackOutput {
        self.k += 1;
        let (_, mu_sop) = self.schedule.at(self.k);
        if !self.schedule.steps().sop_due(self.k) {
            let (index, _) = c.decide_stokes(&(self.m_inv * *s_y));
            return TrackOutput { index, theta: 0.0, alpha: SopVector::zero() };
        }
        let (index, alpha) = stokes_update(&self.m_inv, s_y, c, mu_sop);
        self.m_inv = self.m_inv * mueller_from_sop(&-alpha);
        if self.k.is_multiple_of(RENORMALIZE_PERIOD) {
            self.m_inv = self.m_inv.nearest_rotation();
        }
        TrackOutput { index, theta: 0.0, alpha }
    }
}

pub fn track_stokes(state: &mut StokesTrackerState, s_y: &StokesVector, c: &Constellation) -> TrackOutput {
    state.step(s_y, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{stokes_from_jones, Complex, JonesVector};
    use crate::constellation::Format;

    fn state() -> StokesTrackerState {
        let p = NoiseParams::new(0.0, 0.0, 1.0, 0.0).unwrap();
        StokesTrackerState::new(MuellerMatrix::identity(), StepParams::fixed(0.01, 0.01), &p, 1.0).unwrap()
    }

    #[test]
    fn exact_stokes_point_gives_zero_update() {
        let c = Constellation::new(Format::Pm16Qam);
        let s = c.stokes_points()[5];
        let out = state().step(&s, &c);
        assert_eq!(out.index, 5);
        assert_eq!(out.alpha, SopVector::zero());
    }

    #[test]
    fn phase_rotation_is_invisible() {
        let c = Constellation::new(Format::PmQpsk);
        let y = JonesVector::new(Complex::new(0.4, 0.7), Complex::new(-0.5, 0.1));
        let (mut a, mut b) = (state(), state());
        let oa = a.step(&stokes_from_jones(&y), &c);
        let ob = b.step(&stokes_from_jones(&y.scale(Complex::new(0.6f64.cos(), -0.6f64.sin()))), &c);
        assert_eq!(oa.index, ob.index);
        assert!(a.m_inv().max_abs_diff(b.m_inv()) < 1e-15);
    }
}
