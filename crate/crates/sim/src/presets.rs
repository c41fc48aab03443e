//! Per-format algorithm parameters and reference tolerances.

use poltrack_core::constellation::Format;

use crate::config::Algorithm;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormatPresets {
    /// Step-size constant `c`.
    pub c_const: f64,
    pub kabsch_block: usize,
    pub bps_window: usize,
    pub bps_test_phases: usize,
    /// CMA/MMA step, in units of `1/E_s²`.
    pub cma_mu: f64,
    /// Laser linewidth times symbol time used in the polarization sweeps.
    pub pol_sweep_dnu_t: f64,
}

/// Polarization linewidth times symbol time used in the laser sweeps.
pub const LW_SWEEP_DP_T: f64 = 3.57e-8;

pub fn presets(format: Format) -> FormatPresets {
    match format {
        Format::PsQpsk => FormatPresets {
            c_const: 27.0,
            kabsch_block: 31,
            bps_window: 13,
            bps_test_phases: 32,
            cma_mu: 0.04,
            pol_sweep_dnu_t: 3.6e-5,
        },
        Format::PmQpsk => FormatPresets {
            c_const: 64.0,
            kabsch_block: 16,
            bps_window: 19,
            bps_test_phases: 32,
            cma_mu: 0.16,
            pol_sweep_dnu_t: 3.6e-5,
        },
        Format::Pm16Qam => FormatPresets {
            c_const: 400.0,
            kabsch_block: 16,
            bps_window: 19,
            bps_test_phases: 32,
            cma_mu: 0.04,
            pol_sweep_dnu_t: 0.36e-5,
        },
        Format::Pm64Qam => FormatPresets {
            c_const: 2352.0,
            kabsch_block: 16,
            bps_window: 19,
            bps_test_phases: 64,
            cma_mu: 0.035,
            pol_sweep_dnu_t: 0.18e-5,
        },
        Format::Pm256Qam => FormatPresets {
            c_const: 6084.0,
            kabsch_block: 16,
            bps_window: 19,
            bps_test_phases: 64,
            cma_mu: 0.017,
            pol_sweep_dnu_t: 0.04e-5,
        },
    }
}

/// Reference maximum tolerable `(Δp·T, Δν·T)` for a 1 dB penalty at
/// SER 10⁻³; `None` where no value was reported.
pub fn reference_tolerance(format: Format, algorithm: Algorithm) -> (Option<f64>, Option<f64>) {
    use Algorithm::*;
    use Format::*;
    match (format, algorithm) {
        (PsQpsk, Kabsch) => (Some(0.34e-4), Some(0.91e-4)),
        (PsQpsk, CmaBps) => (Some(0.33e-4), Some(6.67e-4)),
        (PsQpsk, _) => (Some(3.20e-4), Some(11.5e-4)),
        (PmQpsk, Kabsch) => (Some(0.17e-4), Some(0.79e-4)),
        (PmQpsk, CmaBps) => (Some(0.37e-4), Some(6.98e-4)),
        (PmQpsk, _) => (Some(1.17e-4), Some(9.06e-4)),
        (Pm16Qam, Kabsch) => (Some(0.44e-5), Some(0.15e-4)),
        (Pm16Qam, CmaBps) => (Some(0.14e-5), Some(1.48e-4)),
        (Pm16Qam, _) => (Some(2.48e-5), Some(1.35e-4)),
        (Pm64Qam, Kabsch) => (Some(0.66e-6), Some(0.32e-5)),
        (Pm64Qam, CmaBps) => (Some(0.11e-6), Some(3.06e-5)),
        (Pm64Qam, _) => (Some(4.59e-6), Some(2.54e-5)),
        (Pm256Qam, Kabsch) => (Some(0.19e-6), Some(0.74e-6)),
        (Pm256Qam, CmaBps) => (Some(8.42e-9), None),
        (Pm256Qam, _) => (Some(1.22e-6), Some(6.30e-6)),
    }
}

/// Reference per-symbol cost of the proposed tracker with SOP update every
/// `P` symbols.
pub fn reference_ops(sop_period: u64) -> f64 {
    203.0 + 143.0 / sop_period as f64
}
