//! Monte Carlo harness for the polarization and phase trackers in
//! `poltrack-core`: channel runs, parameter sweeps, convergence studies,
//! operation audits and CSV output.

pub mod anchor;
pub mod config;
pub mod experiments;
pub mod opcount;
pub mod output;
pub mod presets;
pub mod trial;

pub use config::{Algorithm, ConfigOverrides, ExperimentConfig, Metric, SnrSpec};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("simulation budget exceeded: {requested:.3e} symbols requested, budget {budget:.3e}")]
    Budget { requested: f64, budget: f64 },
    #[error(transparent)]
    Core(#[from] poltrack_core::Error),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl SimError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            SimError::Budget { .. } => 2,
            _ => 1,
        }
    }
}
