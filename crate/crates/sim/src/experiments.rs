//! Experiment drivers: sweeps, 1 dB tolerance search, convergence curves,
//! tracking traces and the operation audit.
//!
//! Trials run on the current rayon pool and are merged in trial-index
//! order, so results do not depend on the pool size.

use poltrack_core::constellation::{Constellation, Format};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::opcount::{audit, AuditRow};
use crate::presets::reference_tolerance;
use crate::trial::{run_trial, TraceRow, TrialOptions, TrialOutcome};
use crate::SimError;

/// Error counts below this mark a point as low-confidence.
pub const LOW_CONFIDENCE_ERRORS: u64 = 100;

/// SER target of the tolerance search.
pub const TOLERANCE_SER: f64 = 1e-3;

/// Stop the tolerance bisection once `hi/lo` is at most this.
pub const TOLERANCE_RATIO: f64 = 1.1;

/// Convergence window length in symbols.
pub const CONVERGENCE_WINDOW: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    /// Polarization linewidth times symbol time.
    #[value(name = "pol")]
    Pol,
    /// Laser linewidth times symbol time.
    #[value(name = "lw")]
    Laser,
    /// SNR in dB.
    #[value(name = "snr")]
    Snr,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Pol => "dp_t",
            Axis::Laser => "dnu_t",
            Axis::Snr => "snr_db",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SerPoint {
    pub axis: Axis,
    pub value: f64,
    pub ser: f64,
    /// Binomial 95% half-width.
    pub ci95: f64,
    pub errors: u64,
    pub symbols: u64,
    pub trials: u64,
    pub cycle_slips: u64,
}

impl SerPoint {
    pub fn low_confidence(&self) -> bool {
        self.errors < LOW_CONFIDENCE_ERRORS
    }

    pub fn upper(&self) -> f64 {
        self.ser + self.ci95
    }

    pub fn lower(&self) -> f64 {
        self.ser - self.ci95
    }
}

/// `1.96 √(p(1−p)/n)`.
pub fn binomial_ci95(errors: u64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = errors as f64 / n as f64;
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

/// `cfg` with the swept parameter set to `value`.
pub fn at_axis(cfg: &ExperimentConfig, axis: Axis, value: f64) -> Result<ExperimentConfig, SimError> {
    let mut out = cfg.clone();
    match axis {
        Axis::Pol => out.delta_p_hz = value * cfg.baud,
        Axis::Laser => out.delta_nu_hz = value * cfg.baud,
        Axis::Snr => out.snr = crate::config::SnrSpec::Absolute(value),
    }
    out.validate()?;
    Ok(out)
}

/// Runs all trials of `cfg` at its SNR and merges them in trial order.
pub fn run_trials(cfg: &ExperimentConfig, opts: TrialOptions) -> Result<Vec<TrialOutcome>, SimError> {
    let c = Constellation::new(cfg.format);
    let params = cfg.noise_params(cfg.snr_db())?;
    (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, &c, &params, t, opts)).collect()
}

fn aggregate(axis: Axis, value: f64, outcomes: &[TrialOutcome]) -> SerPoint {
    let errors = outcomes.iter().map(|o| o.errors).sum();
    let symbols = outcomes.iter().map(|o| o.counted).sum();
    SerPoint {
        axis,
        value,
        ser: if symbols == 0 { 0.0 } else { errors as f64 / symbols as f64 },
        ci95: binomial_ci95(errors, symbols),
        errors,
        symbols,
        trials: outcomes.len() as u64,
        cycle_slips: outcomes.iter().filter(|o| o.cycle_slip).count() as u64,
    }
}

fn warn_low_confidence(p: &SerPoint) {
    if p.low_confidence() {
        eprintln!("warning: {}={} has only {} errors; SER estimate is low-confidence", p.axis.name(), p.value, p.errors);
    }
}

/// SER at one point of `axis`.
pub fn ser_point(cfg: &ExperimentConfig, axis: Axis, value: f64) -> Result<SerPoint, SimError> {
    let point = at_axis(cfg, axis, value)?;
    let p = aggregate(axis, value, &run_trials(&point, TrialOptions::default())?);
    warn_low_confidence(&p);
    Ok(p)
}

fn per_point_symbols(cfg: &ExperimentConfig) -> f64 {
    cfg.symbols as f64 * cfg.trials as f64
}

/// Default grid: the reference proposed-tracker tolerance scaled around itself, or
/// the anchor plus offsets for SNR.
pub fn default_grid(cfg: &ExperimentConfig, axis: Axis) -> Vec<f64> {
    let scale = [0.1, 0.2, 0.5, 1.0, 1.5, 2.0];
    let (dp, dnu) = reference_tolerance(cfg.format, cfg.algorithm);
    match axis {
        Axis::Pol => scale.iter().map(|s| s * dp.unwrap_or(1e-5)).collect(),
        Axis::Laser => scale.iter().map(|s| s * dnu.unwrap_or(1e-4)).collect(),
        Axis::Snr => {
            let a = crate::anchor::awgn_anchor_db(cfg.format);
            [-1.0, 0.0, 1.0, 2.0, 3.0, 4.0].iter().map(|d| a + d).collect()
        }
    }
}

/// One SER point per grid value.
pub fn sweep(cfg: &ExperimentConfig, axis: Axis) -> Result<Vec<SerPoint>, SimError> {
    let grid = cfg.grid.clone().unwrap_or_else(|| default_grid(cfg, axis));
    cfg.check_budget(per_point_symbols(cfg) * grid.len() as f64)?;
    for v in &grid {
        at_axis(cfg, axis, *v)?;
    }
    grid.iter().map(|v| ser_point(cfg, axis, *v)).collect()
}

/// Outcome of the 1 dB tolerance search.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerance {
    pub axis: Axis,
    /// Largest probed value with SER at or below target, `None` if even the
    /// lowest probe fails.
    pub value: Option<f64>,
    /// Degradation never reached the target inside the search range.
    pub above_max: bool,
    pub search_max: f64,
    pub reference: Option<f64>,
    pub probes: Vec<SerPoint>,
}

/// Initial bracket `[reference/10, reference·10]`, widened by at most this
/// many decades on either side.
const TOLERANCE_EXPANSIONS: u32 = 2;

/// Largest linewidth with SER ≤ 10⁻³ at the configured SNR, by bisection in
/// log scale to [`TOLERANCE_RATIO`].
pub fn find_1db_tolerance(cfg: &ExperimentConfig, axis: Axis) -> Result<Tolerance, SimError> {
    if axis == Axis::Snr {
        return Err(SimError::Config("tolerance search runs over pol or lw".into()));
    }
    let (dp, dnu) = reference_tolerance(cfg.format, cfg.algorithm);
    let reference = if axis == Axis::Pol { dp } else { dnu };
    let centre = reference.unwrap_or(if axis == Axis::Pol { 1e-5 } else { 1e-4 });
    let max_probes = 2.0 * f64::from(TOLERANCE_EXPANSIONS) + 2.0 + (100f64.ln() / TOLERANCE_RATIO.ln()).log2().ceil();
    cfg.check_budget(per_point_symbols(cfg) * max_probes)?;

    let mut probes = Vec::new();
    let probe = |v: f64, probes: &mut Vec<SerPoint>| -> Result<bool, SimError> {
        let p = ser_point(cfg, axis, v)?;
        probes.push(p);
        Ok(p.ser <= TOLERANCE_SER)
    };
    let (mut lo, mut hi) = (centre / 10.0, centre * 10.0);
    let mut lo_ok = probe(lo, &mut probes)?;
    for _ in 0..TOLERANCE_EXPANSIONS {
        if lo_ok {
            break;
        }
        hi = lo;
        lo /= 10.0;
        lo_ok = probe(lo, &mut probes)?;
    }
    let mut result = Tolerance { axis, value: None, above_max: false, search_max: hi, reference, probes: Vec::new() };
    if !lo_ok {
        result.probes = probes;
        return Ok(result);
    }
    let mut hi_ok = probe(hi, &mut probes)?;
    for _ in 0..TOLERANCE_EXPANSIONS {
        if !hi_ok {
            break;
        }
        lo = hi;
        hi *= 10.0;
        hi_ok = probe(hi, &mut probes)?;
    }
    result.search_max = hi;
    if hi_ok {
        result.value = Some(hi);
        result.above_max = true;
        result.probes = probes;
        return Ok(result);
    }
    while hi / lo > TOLERANCE_RATIO {
        let mid = (lo * hi).sqrt();
        if probe(mid, &mut probes)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    result.value = Some(lo);
    result.probes = probes;
    Ok(result)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    /// Last symbol index of the window (1-based).
    pub k: u64,
    pub ser_mean: f64,
    pub ci95: f64,
    pub realizations: u64,
}

/// Mean windowed SER over `cfg.trials` realizations; warmup is ignored so
/// that the transient is visible.
pub fn convergence(cfg: &ExperimentConfig) -> Result<Vec<ConvergenceRow>, SimError> {
    cfg.check_budget(per_point_symbols(cfg))?;
    let opts = TrialOptions { window: Some(CONVERGENCE_WINDOW), trace_every: None };
    let outcomes = run_trials(cfg, opts)?;
    let n_windows = cfg.symbols.div_ceil(CONVERGENCE_WINDOW) as usize;
    let r = outcomes.len() as f64;
    Ok((0..n_windows)
        .map(|w| {
            let start = w as u64 * CONVERGENCE_WINDOW;
            let len = (cfg.symbols - start).min(CONVERGENCE_WINDOW) as f64;
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for o in &outcomes {
                let s = o.windows.get(w).copied().unwrap_or(0) as f64 / len;
                sum += s;
                sum_sq += s * s;
            }
            let mean = sum / r;
            let var = if r > 1.0 { ((sum_sq - r * mean * mean) / (r - 1.0)).max(0.0) } else { 0.0 };
            ConvergenceRow {
                k: start + len as u64,
                ser_mean: mean,
                ci95: 1.96 * (var / r).sqrt(),
                realizations: outcomes.len() as u64,
            }
        })
        .collect())
}

/// Mean SER over the windows that end in `(k_from, k_to]`.
pub fn window_mean(rows: &[ConvergenceRow], k_from: u64, k_to: u64) -> f64 {
    let sel: Vec<f64> = rows.iter().filter(|r| r.k > k_from && r.k <= k_to).map(|r| r.ser_mean).collect();
    sel.iter().sum::<f64>() / sel.len().max(1) as f64
}

/// Cumulative true and estimated parameters of trial 0.
pub fn track_demo(cfg: &ExperimentConfig, every: u64) -> Result<(Vec<TraceRow>, TrialOutcome), SimError> {
    cfg.check_budget(cfg.symbols as f64)?;
    if every == 0 {
        return Err(SimError::Config("trace interval must be positive".into()));
    }
    let c = Constellation::new(cfg.format);
    let params = cfg.noise_params(cfg.snr_db())?;
    let mut out = run_trial(cfg, &c, &params, 0, TrialOptions { window: None, trace_every: Some(every) })?;
    let trace = std::mem::take(&mut out.trace);
    Ok((trace, out))
}

/// Counted Jones-tracker cost for each SOP period.
pub fn op_audit(format: Format, periods: &[u64], symbols: u64, seed: u64) -> Result<Vec<AuditRow>, SimError> {
    periods.iter().map(|p| audit(format, *p, symbols, seed)).collect()
}
