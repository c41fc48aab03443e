//! Reference recovery chains: Kabsch block tracking, one-tap CMA/MMA
//! demultiplexing and blind phase search.

mod bps;
mod chain;
mod cma;
mod kabsch;

pub use bps::{bps_phase, BpsConfig, BpsTracker};
pub use chain::{mma_stages, MmaBpsChain, DEFAULT_STAGE_LEN};
pub use cma::{cma_mma_step, godard_radius, CmaConfig};
pub use kabsch::{kabsch_estimate, KabschConfig, KabschState, DEGENERATE_RATIO};
