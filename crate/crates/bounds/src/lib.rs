//! Efficiency bounds `var φ` for every assumption set.
//!
//! Each bound is one formula over a factorised law `p(c) p(a|c) p(z|a,c)` with
//! the conditional mean and variance of `Y` given `(a, z, c)`. A discrete joint
//! supplies that law exactly (sums over `z` are finite); the Gaussian-mediator
//! simulation design supplies it on a Gauss-Hermite grid, which turns every
//! `Σ_z` into a quadrature.

mod law;
mod props;
mod registry;
mod report;
mod simdgp;

pub use law::FactorLaw;
pub use props::{functional, var_bd, var_bd_fd_td, var_bd_td, var_fd, var_fd_td, var_td};
pub use registry::{BoundEvaluator, BoundRegistry};
pub use report::{BoundReport, Method};
pub use simdgp::{
    simdgp_bound, simdgp_bound_bd, simdgp_bound_combo, simdgp_bound_fd, simdgp_bound_quadrature,
    simdgp_bound_td, SimDgpParams, MIN_NODES,
};

use twodoor_core::{DiscreteJoint, ModelTag, Result, TreatmentPair};

/// Bound for `tag` by exact summation over `dist`.
pub fn bound(dist: &DiscreteJoint, pair: &TreatmentPair, tag: ModelTag) -> Result<BoundReport> {
    let law = FactorLaw::from_dist(dist, pair)?;
    let value = props::evaluate(&law, tag)?;
    BoundReport::new(tag, value, Method::ExactSum, pair)
}

pub fn bound_bd(dist: &DiscreteJoint, pair: &TreatmentPair) -> Result<BoundReport> {
    bound(dist, pair, ModelTag::Bd)
}
pub fn bound_fd(dist: &DiscreteJoint, pair: &TreatmentPair) -> Result<BoundReport> {
    bound(dist, pair, ModelTag::Fd)
}
pub fn bound_td(dist: &DiscreteJoint, pair: &TreatmentPair) -> Result<BoundReport> {
    bound(dist, pair, ModelTag::Td)
}
pub fn bound_bd_td(dist: &DiscreteJoint, pair: &TreatmentPair) -> Result<BoundReport> {
    bound(dist, pair, ModelTag::BdTd)
}
pub fn bound_fd_td(dist: &DiscreteJoint, pair: &TreatmentPair) -> Result<BoundReport> {
    bound(dist, pair, ModelTag::FdTd)
}
pub fn bound_bd_fd_td(dist: &DiscreteJoint, pair: &TreatmentPair) -> Result<BoundReport> {
    bound(dist, pair, ModelTag::BdFdTd)
}

/// All six bounds on `dist`, in [`ModelTag::ALL`] order.
pub fn all_bounds(dist: &DiscreteJoint, pair: &TreatmentPair) -> Result<Vec<BoundReport>> {
    let law = FactorLaw::from_dist(dist, pair)?;
    ModelTag::ALL
        .into_iter()
        .map(|t| BoundReport::new(t, props::evaluate(&law, t)?, Method::ExactSum, pair))
        .collect()
}
