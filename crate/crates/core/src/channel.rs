//! Symbol-rate channel: Wiener phase noise, random-walk SOP drift and AWGN.
//!
//! The channel matrix evolves as `T_{k+1} = T(ν′_k, α′_k) T_k` with
//! `ν′ ~ N(0, 2πΔνT)` and `α′ ~ N(0, 2πΔpT I₃)`, and the receiver observes
//! `y_k = T_k x_k + n_k`. The received sample at index `k` uses `T_k`; the
//! channel is stepped afterwards.

use core::f64::consts::{PI, TAU};

use crate::algebra::{jones_combined, Complex, JonesMatrix, JonesVector, SopVector};
use crate::error::Error;
use crate::rng::RngStream;
use crate::scalar::math;

/// `T_k` is re-projected onto the unitary group every this many steps.
pub const RENORMALIZE_PERIOD: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    /// Sum of transmitter and receiver laser linewidths, Hz.
    pub delta_nu: f64,
    /// Polarization linewidth, Hz.
    pub delta_p: f64,
    /// Symbol duration, s.
    pub symbol_time: f64,
    /// Complex noise variance per polarization, `E[n nᴴ] = N0 I₂`.
    pub n0: f64,
}

impl NoiseParams {
    pub fn new(delta_nu: f64, delta_p: f64, symbol_time: f64, n0: f64) -> Result<Self, Error> {
        let p = Self { delta_nu, delta_p, symbol_time, n0 };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters from normalized linewidths `Δν·T`, `Δp·T` and
    /// `SNR = E_s/N0` in dB. An infinite SNR gives `N0 = 0`.
    pub fn from_normalized(dnu_t: f64, dp_t: f64, symbol_time: f64, es: f64, snr_db: f64) -> Result<Self, Error> {
        let n0 = if snr_db == f64::INFINITY { 0.0 } else { es / math::exp(snr_db / 10.0 * core::f64::consts::LN_10) };
        Self::new(dnu_t / symbol_time, dp_t / symbol_time, symbol_time, n0)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !finite_nonneg(self.delta_nu) {
            return Err(Error::InvalidParams("laser linewidth must be finite and non-negative"));
        }
        if !finite_nonneg(self.delta_p) {
            return Err(Error::InvalidParams("polarization linewidth must be finite and non-negative"));
        }
        if !(self.symbol_time.is_finite() && self.symbol_time > 0.0) {
            return Err(Error::InvalidParams("symbol time must be finite and positive"));
        }
        if !finite_nonneg(self.n0) {
            return Err(Error::InvalidParams("noise density must be finite and non-negative"));
        }
        Ok(())
    }

    /// `σ_ν² = 2πΔνT`.
    pub fn sigma_nu2(&self) -> f64 {
        TAU * self.delta_nu * self.symbol_time
    }

    /// `σ_p² = 2πΔpT`.
    pub fn sigma_p2(&self) -> f64 {
        TAU * self.delta_p * self.symbol_time
    }

    pub fn dnu_t(&self) -> f64 {
        self.delta_nu * self.symbol_time
    }

    pub fn dp_t(&self) -> f64 {
        self.delta_p * self.symbol_time
    }
}

/// Maps a 4D direction `g/‖g‖ = (cos θ, â sin θ)` to `α = θâ`, `θ ∈ [0, π]`.
///
/// For Gaussian `g` the resulting `R(α)` is Haar-distributed on SU(2), so
/// `R(α) x` is uniform over the Poincaré sphere.
pub fn sop_from_direction(g: [f64; 4]) -> SopVector {
    let norm = math::sqrt(g.iter().map(|v| v * v).sum::<f64>());
    let u0 = (g[0] / norm).clamp(-1.0, 1.0);
    let theta = math::acos(u0);
    let rest = math::sqrt(g[1] * g[1] + g[2] * g[2] + g[3] * g[3]);
    if rest == 0.0 {
        // θ ∈ {0, π}; any axis gives the same matrix.
        return if u0 > 0.0 { SopVector::zero() } else { SopVector::new(PI, 0.0, 0.0) };
    }
    let s = theta / rest;
    SopVector::new(g[1] * s, g[2] * s, g[3] * s)
}

#[derive(Clone, Debug)]
pub struct ChannelState {
    t_matrix: JonesMatrix,
    params: NoiseParams,
    rng: RngStream,
    k: u64,
    phase_sum: f64,
    sop_sum: SopVector,
}

/// Random initial channel: uniform SOP and a phase uniform on `[0, 2π)`.
pub fn init_channel(params: NoiseParams, mut rng: RngStream) -> Result<ChannelState, Error> {
    params.validate()?;
    let g = [rng.standard_normal(), rng.standard_normal(), rng.standard_normal(), rng.standard_normal()];
    let theta0 = TAU * rng.uniform();
    Ok(ChannelState::from_initial_draw(params, g, theta0, rng))
}

impl ChannelState {
    /// Channel starting at `T₀ = e^{−iθ₀} R(α₀)` with `α₀` taken from `g`.
    pub fn from_initial_draw(params: NoiseParams, g: [f64; 4], theta0: f64, rng: RngStream) -> Self {
        let alpha0 = sop_from_direction(g);
        Self::with_matrix(params, jones_combined(theta0, &alpha0), rng)
    }

    pub fn with_matrix(params: NoiseParams, t_matrix: JonesMatrix, rng: RngStream) -> Self {
        Self { t_matrix, params, rng, k: 0, phase_sum: 0.0, sop_sum: SopVector::zero() }
    }

    pub fn t_matrix(&self) -> &JonesMatrix {
        &self.t_matrix
    }

    pub fn params(&self) -> &NoiseParams {
        &self.params
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Running sums of the drawn phase and SOP innovations.
    pub fn innovation_sums(&self) -> (f64, SopVector) {
        (self.phase_sum, self.sop_sum)
    }

    /// Advances `T_k → T_{k+1}` and returns the innovations used.
    pub fn step(&mut self) -> (f64, SopVector) {
        let sigma_nu = math::sqrt(self.params.sigma_nu2());
        let sigma_p = math::sqrt(self.params.sigma_p2());
        let nu = self.rng.normal(sigma_nu);
        let alpha = SopVector::new(self.rng.normal(sigma_p), self.rng.normal(sigma_p), self.rng.normal(sigma_p));
        self.t_matrix = jones_combined(nu, &alpha) * self.t_matrix;
        self.k += 1;
        if self.k.is_multiple_of(RENORMALIZE_PERIOD) {
            self.t_matrix = self.t_matrix.nearest_unitary();
        }
        self.phase_sum += nu;
        self.sop_sum = self.sop_sum + alpha;
        (nu, alpha)
    }

    /// `y = T_k x + n` with `n` circular Gaussian, variance `N0/2` per real
    /// dimension.
    pub fn transmit(&mut self, x: &JonesVector) -> JonesVector {
        let clean = self.t_matrix * *x;
        if self.params.n0 == 0.0 {
            return clean;
        }
        clean + self.noise()
    }

    /// One draw of the additive noise term.
    pub fn noise(&mut self) -> JonesVector {
        let s = math::sqrt(self.params.n0 / 2.0);
        let r = &mut self.rng;
        JonesVector::new(
            Complex::new(r.normal(s), r.normal(s)),
            Complex::new(r.normal(s), r.normal(s)),
        )
    }
}
