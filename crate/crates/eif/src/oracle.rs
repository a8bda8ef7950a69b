use twodoor_core::{DiscreteJoint, KahanSum, ModelTag, Observation, Result, TreatmentPair};

use crate::eval::{Evaluator, Positivity};
use crate::nuisance::NuisanceSet;

fn for_cells(
    dist: &DiscreteJoint,
    pair: &TreatmentPair,
    tag: ModelTag,
    mut f: impl FnMut(f64, f64),
) -> Result<()> {
    let eta = NuisanceSet::from_dist(dist);
    let ev = Evaluator::new(&eta, *pair, Positivity::Strict);
    for (v, p) in dist.cells() {
        if p == 0.0 {
            continue;
        }
        let m = ev.m(tag, &Observation::new(v[0], v[1], v[2], v[3]))?;
        f(p, m);
    }
    Ok(())
}

/// `Σ_x p(x) m(x, η₀)` with `η₀` the true nuisances of `dist`.
pub fn oracle_mean(dist: &DiscreteJoint, pair: &TreatmentPair, tag: ModelTag) -> Result<f64> {
    let mut s = KahanSum::new();
    for_cells(dist, pair, tag, |p, m| s.add(p * m))?;
    Ok(s.value())
}

/// `Σ_x p(x) (m(x, η₀) − θ)²`.
pub fn oracle_variance(
    dist: &DiscreteJoint,
    pair: &TreatmentPair,
    tag: ModelTag,
    theta: f64,
) -> Result<f64> {
    let mut s = KahanSum::new();
    for_cells(dist, pair, tag, |p, m| s.add(p * (m - theta).powi(2)))?;
    Ok(s.value())
}
