//! Experiment configuration: TOML file, command-line overrides and
//! validation.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use poltrack_core::channel::NoiseParams;
use poltrack_core::constellation::Format;
use serde::{Deserialize, Serialize};

use crate::presets::{presets, LW_SWEEP_DP_T};
use crate::SimError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
pub enum Algorithm {
    #[serde(rename = "proposed-jones")]
    #[value(name = "proposed-jones")]
    ProposedJones,
    #[serde(rename = "proposed-stokes")]
    #[value(name = "proposed-stokes")]
    ProposedStokes,
    #[serde(rename = "proposed-4d")]
    #[value(name = "proposed-4d")]
    Proposed4d,
    #[serde(rename = "kabsch")]
    #[value(name = "kabsch")]
    Kabsch,
    #[serde(rename = "cma-bps")]
    #[value(name = "cma-bps")]
    CmaBps,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::ProposedJones => "proposed-jones",
            Algorithm::ProposedStokes => "proposed-stokes",
            Algorithm::Proposed4d => "proposed-4d",
            Algorithm::Kabsch => "kabsch",
            Algorithm::CmaBps => "cma-bps",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What counts as an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum Metric {
    /// Differentially decoded joint two-polarization symbol errors.
    #[serde(rename = "ser-4d")]
    #[value(name = "ser-4d")]
    Ser4d,
    /// Nearest-Stokes-image errors; blind to phase, no differential coding.
    #[serde(rename = "stokes-decision")]
    #[value(name = "stokes-decision")]
    StokesDecision,
}

/// SNR as an absolute value or relative to the format's AWGN anchor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SnrSpec {
    Absolute(f64),
    AnchorOffset(f64),
}

impl FromStr for SnrSpec {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        let t = s.trim();
        let bad = || SimError::Config(format!("invalid SNR `{s}`: expected dB value or anchor[+/-dB]"));
        if let Some(rest) = t.strip_prefix("anchor") {
            let rest = rest.trim();
            if rest.is_empty() {
                return Ok(SnrSpec::AnchorOffset(0.0));
            }
            let v: f64 = rest.replace(' ', "").parse().map_err(|_| bad())?;
            if !(rest.starts_with('+') || rest.starts_with('-')) || !v.is_finite() {
                return Err(bad());
            }
            return Ok(SnrSpec::AnchorOffset(v));
        }
        let v: f64 = t.parse().map_err(|_| bad())?;
        if v.is_nan() {
            return Err(bad());
        }
        Ok(SnrSpec::Absolute(v))
    }
}

impl fmt::Display for SnrSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SnrSpec::Absolute(v) => write!(f, "{v}"),
            SnrSpec::AnchorOffset(v) => write!(f, "anchor{v:+}"),
        }
    }
}

/// Optional settings, as read from a file or collected from flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigOverrides {
    pub format: Option<String>,
    pub algorithm: Option<Algorithm>,
    pub metric: Option<Metric>,
    pub snr_db: Option<String>,
    pub delta_nu_hz: Option<f64>,
    pub delta_p_hz: Option<f64>,
    pub baud: Option<f64>,
    pub symbols: Option<u64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub sop_period: Option<u64>,
    pub known_initial_channel: Option<bool>,
    pub freeze_tracker: Option<bool>,
    pub warmup: Option<u64>,
    pub mma_stage_len: Option<u64>,
    pub budget: Option<f64>,
    pub grid: Option<Vec<f64>>,
}

impl ConfigOverrides {
    pub fn from_toml(text: &str) -> Result<Self, SimError> {
        toml::from_str(text).map_err(|e| SimError::Config(format!("config file: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Fields set in `top` win over `self`.
    pub fn overlay(self, top: ConfigOverrides) -> Self {
        macro_rules! pick {
            ($($f:ident),*) => { Self { $($f: top.$f.or(self.$f)),* } };
        }
        pick!(
            format, algorithm, metric, snr_db, delta_nu_hz, delta_p_hz, baud, symbols, trials, seed, sop_period,
            known_initial_channel, freeze_tracker, warmup, mma_stage_len, budget, grid
        )
    }
}

/// Fully resolved and validated experiment settings.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub format: Format,
    pub algorithm: Algorithm,
    pub metric: Metric,
    pub snr: SnrSpec,
    pub delta_nu_hz: f64,
    pub delta_p_hz: f64,
    pub baud: f64,
    pub symbols: u64,
    pub trials: u64,
    pub seed: u64,
    pub sop_period: u64,
    pub known_initial_channel: bool,
    /// Zero step sizes: the receiver keeps its initial estimate.
    pub freeze_tracker: bool,
    /// Leading symbols excluded from error counts and slip detection.
    pub warmup: u64,
    pub mma_stage_len: u64,
    /// Upper bound on simulated symbols per command.
    pub budget: f64,
    pub grid: Option<Vec<f64>>,
}

pub const DEFAULT_BUDGET: f64 = 5e10;

/// Symbols skipped after a blind start.
pub const BLIND_WARMUP: u64 = 2500;

impl ExperimentConfig {
    pub fn resolve(o: ConfigOverrides) -> Result<Self, SimError> {
        let format: Format = o
            .format
            .as_deref()
            .unwrap_or("PM-16-QAM")
            .parse()
            .map_err(|e: poltrack_core::Error| SimError::Config(e.to_string()))?;
        let algorithm = o.algorithm.unwrap_or(Algorithm::ProposedJones);
        let metric = o.metric.unwrap_or(if algorithm == Algorithm::ProposedStokes {
            Metric::StokesDecision
        } else {
            Metric::Ser4d
        });
        let baud = o.baud.unwrap_or(28e9);
        let known = o.known_initial_channel.unwrap_or(true);
        let cfg = Self {
            format,
            algorithm,
            metric,
            snr: o.snr_db.as_deref().unwrap_or("anchor+1").parse()?,
            delta_nu_hz: o.delta_nu_hz.unwrap_or(presets(format).pol_sweep_dnu_t * baud),
            delta_p_hz: o.delta_p_hz.unwrap_or(LW_SWEEP_DP_T * baud),
            baud,
            symbols: o.symbols.unwrap_or(100_000),
            trials: o.trials.unwrap_or(10),
            seed: o.seed.unwrap_or(1),
            sop_period: o.sop_period.unwrap_or(1),
            known_initial_channel: known,
            freeze_tracker: o.freeze_tracker.unwrap_or(false),
            warmup: o.warmup.unwrap_or(if known { 0 } else { BLIND_WARMUP }),
            mma_stage_len: o.mma_stage_len.unwrap_or(poltrack_core::baselines::DEFAULT_STAGE_LEN as u64),
            budget: o.budget.unwrap_or(DEFAULT_BUDGET),
            grid: o.grid,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let err = |m: &str| Err(SimError::Config(m.to_string()));
        if self.algorithm == Algorithm::ProposedStokes && self.metric != Metric::StokesDecision {
            return err("the Stokes tracker is phase-blind; use the stokes-decision metric");
        }
        if self.metric == Metric::StokesDecision && self.algorithm != Algorithm::ProposedStokes {
            return err("the stokes-decision metric is only defined for proposed-stokes");
        }
        if !(self.baud.is_finite() && self.baud > 0.0) {
            return err("baud must be positive");
        }
        if self.symbols == 0 || self.trials == 0 {
            return err("symbols and trials must be positive");
        }
        if self.sop_period == 0 {
            return err("sop-period must be at least 1");
        }
        if self.warmup >= self.symbols {
            return err("warmup must be shorter than the run");
        }
        if self.mma_stage_len == 0 {
            return err("mma-stage-len must be positive");
        }
        if self.budget.is_nan() || self.budget <= 0.0 {
            return err("budget must be positive");
        }
        if let Some(g) = &self.grid {
            if g.is_empty() || g.iter().any(|v| !v.is_finite()) {
                return err("grid must be a non-empty list of finite values");
            }
        }
        self.noise_params(0.0).map(|_| ())
    }

    pub fn symbol_time(&self) -> f64 {
        1.0 / self.baud
    }

    pub fn dnu_t(&self) -> f64 {
        self.delta_nu_hz / self.baud
    }

    pub fn dp_t(&self) -> f64 {
        self.delta_p_hz / self.baud
    }

    /// Channel parameters at a given absolute SNR (E_s = 1).
    pub fn noise_params(&self, snr_db: f64) -> Result<NoiseParams, SimError> {
        NoiseParams::from_normalized(self.dnu_t(), self.dp_t(), self.symbol_time(), 1.0, snr_db)
            .map_err(|e| SimError::Config(e.to_string()))
    }

    /// Absolute SNR in dB, resolving the anchor when needed.
    pub fn snr_db(&self) -> f64 {
        match self.snr {
            SnrSpec::Absolute(v) => v,
            SnrSpec::AnchorOffset(d) => crate::anchor::awgn_anchor_db(self.format) + d,
        }
    }

    /// Fails with [`SimError::Budget`] when `symbols` exceeds the budget.
    pub fn check_budget(&self, symbols: f64) -> Result<(), SimError> {
        if symbols > self.budget {
            return Err(SimError::Budget { requested: symbols, budget: self.budget });
        }
        Ok(())
    }
}
