//! Monte Carlo studies on `C ~ Bern(pc)`, `A|C ~ Bern(expit αC)`,
//! `Z|A ~ N(βA, σz²)`, `Y|Z,C ~ N(γ1 Z + γ2 C, σy²)`.

mod mc;
mod sample;
mod settings;
mod summary;

pub use mc::{child_rng, run_mc, McConfig, FULL_K, FULL_SIZES};
pub use sample::{sample_dgp, sample_dgp_with};
pub use settings::{setting_specs, SETTINGS};
pub use summary::{metrics, McRow, McSummary, Metrics};
pub use twodoor_bounds::SimDgpParams;
