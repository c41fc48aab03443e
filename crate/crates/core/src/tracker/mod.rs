//! Decision-directed joint phase/SOP tracker in Jones, Stokes and real-4D
//! form.
//!
//! All three store the *inverse* channel estimate and update it on the right
//! with the negated step, `H_{k+1} = H_k T(−θ̃_k, −α̃_k)`, so no inversion is
//! ever performed. Symbol indices `k` are 1-based.

mod jones;
mod rot4;
mod stokes;

pub use jones::{jones_step, track_jones, JonesStep, TrackerState};
pub use rot4::{rot4_update, track_rot4, Rot4TrackerState};
pub use stokes::{stokes_update, track_stokes, StokesTrackerState};

use crate::algebra::SopVector;
use crate::channel::NoiseParams;
use crate::error::Error;
use crate::scalar::math;

/// Number of updates between projections of the estimate back onto its group.
pub const RENORMALIZE_PERIOD: u64 = crate::channel::RENORMALIZE_PERIOD;

/// Default length of the convergence stage.
pub const DEFAULT_STAGE_SWITCH: u64 = 2000;

/// Step-size configuration. `convergence_mu` and `floor_mu` are in units of
/// `1/E_s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepParams {
    /// Format constant `c` in `μ = √(ΔT·c)/E_s`.
    pub c_const: f64,
    /// Last symbol of the convergence stage; 0 skips the stage.
    pub stage_switch_k: u64,
    pub convergence_mu: f64,
    /// Tracking-stage step used when the matching linewidth is 0.
    pub floor_mu: f64,
    /// SOP update period `P`.
    pub sop_period: u64,
    /// Overrides the schedule with constant `(μ_ph, μ_SOP)`; zeros freeze
    /// the tracker.
    pub fixed: Option<(f64, f64)>,
}

impl StepParams {
    /// Blind start: a 2000-symbol convergence stage at `0.1/E_s`.
    pub fn blind(c_const: f64) -> Self {
        Self {
            c_const,
            stage_switch_k: DEFAULT_STAGE_SWITCH,
            convergence_mu: 0.1,
            floor_mu: 1e-4,
            sop_period: 1,
            fixed: None,
        }
    }

    /// Known initial channel: tracking-stage steps from the first symbol.
    pub fn known_channel(c_const: f64) -> Self {
        Self { stage_switch_k: 0, ..Self::blind(c_const) }
    }

    /// Constant steps, ignoring linewidths and stage.
    pub fn fixed(mu_ph: f64, mu_sop: f64) -> Self {
        Self { fixed: Some((mu_ph, mu_sop)), ..Self::known_channel(1.0) }
    }

    pub fn with_sop_period(self, sop_period: u64) -> Self {
        Self { sop_period, ..self }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.sop_period == 0 {
            return Err(Error::InvalidSteps("SOP update period must be at least 1"));
        }
        if let Some((a, b)) = self.fixed {
            if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0) {
                return Err(Error::InvalidSteps("fixed step sizes must be finite and non-negative"));
            }
            return Ok(());
        }
        if !positive(self.c_const) {
            return Err(Error::InvalidSteps("format constant must be positive"));
        }
        if !positive(self.convergence_mu) || !positive(self.floor_mu) {
            return Err(Error::InvalidSteps("step sizes must be positive"));
        }
        Ok(())
    }

    /// Whether the SOP part is updated on symbol `k`.
    #[inline]
    pub fn sop_due(&self, k: u64) -> bool {
        k.is_multiple_of(self.sop_period)
    }
}

/// `(μ_ph, μ_SOP)` for 1-based symbol `k`.
///
/// Convergence stage (`k ≤ stage_switch_k`): both `convergence_mu/E_s`.
/// Tracking stage: `√(ΔνT·c)/E_s` and `√(ΔpT·c)/E_s`, with `floor_mu/E_s`
/// replacing a zero linewidth.
pub fn step_sizes(k: u64, steps: &StepParams, params: &NoiseParams, es: f64) -> (f64, f64) {
    if let Some(fixed) = steps.fixed {
        return fixed;
    }
    if k <= steps.stage_switch_k {
        let mu = steps.convergence_mu / es;
        return (mu, mu);
    }
    let track = |lw_t: f64| {
        if lw_t > 0.0 {
            math::sqrt(lw_t * steps.c_const) / es
        } else {
            steps.floor_mu / es
        }
    };
    (track(params.dnu_t()), track(params.dp_t()))
}

/// Resolved schedule: the two stage values computed once per trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Schedule {
    steps: StepParams,
    convergence: (f64, f64),
    tracking: (f64, f64),
}

impl Schedule {
    pub(crate) fn new(steps: StepParams, params: &NoiseParams, es: f64) -> Result<Self, Error> {
        steps.validate()?;
        if !(es.is_finite() && es > 0.0) {
            return Err(Error::InvalidSteps("symbol energy must be positive"));
        }
        Ok(Self {
            steps,
            convergence: step_sizes(1, &Self::force_convergence(steps), params, es),
            tracking: step_sizes(u64::MAX, &steps, params, es),
        })
    }

    fn force_convergence(steps: StepParams) -> StepParams {
        StepParams { stage_switch_k: u64::MAX, ..steps }
    }

    #[inline]
    pub(crate) fn at(&self, k: u64) -> (f64, f64) {
        if self.steps.fixed.is_none() && k <= self.steps.stage_switch_k {
            self.convergence
        } else {
            self.tracking
        }
    }

    pub(crate) fn steps(&self) -> &StepParams {
        &self.steps
    }
}

/// Per-symbol output of a tracker: decision and applied update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackOutput {
    /// Decided symbol index (Jones/4D) or Stokes-point index (Stokes).
    pub index: usize,
    pub theta: f64,
    pub alpha: SopVector,
}
