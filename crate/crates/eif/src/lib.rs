//! Efficient influence functions for the average causal effect under the
//! back-door, front-door and two-door assumption sets and their combinations.
//!
//! Each evaluator returns `m(x, η) = φ(x, η, θ) + θ`, so the plug-in estimate
//! is the sample mean of `m` and the oracle variance is `Σ p(x) (m − θ)²`.

mod eval;
mod functions;
mod nuisance;
mod oracle;
mod table;

pub use eval::{Evaluator, Positivity};
pub use functions::{
    influence, m_bd, m_bd_fd_td, m_bd_td, m_fd, m_fd_td, m_td, BackDoor, BackFrontTwoDoor,
    BackTwoDoor, EifRegistry, FrontDoor, FrontTwoDoor, InfluenceFunction, TwoDoor,
};
pub use nuisance::{
    Manifest, ManifestEntry, MassModel, MediatorModel, NuisanceSet, OutcomeModel, Slot,
    TreatmentModel, DEFAULT_GH_NODES,
};
pub use oracle::{oracle_mean, oracle_variance};
pub use table::{key, TableMass, TableMediator, TableOutcome, TableTreatment};
