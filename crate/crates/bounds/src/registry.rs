use std::collections::BTreeMap;
use std::sync::Arc;

use twodoor_core::{DiscreteJoint, Error, ModelTag, Result, TreatmentPair};

use crate::law::FactorLaw;
use crate::props;
use crate::report::{BoundReport, Method};
use crate::simdgp::{self, SimDgpParams};

/// A bound evaluator: exact on a discrete joint, and on the simulation design
/// either closed form or quadrature.
pub trait BoundEvaluator: Send + Sync {
    fn tag(&self) -> ModelTag;

    fn on_law(&self, law: &FactorLaw) -> Result<f64>;

    fn on_dist(&self, dist: &DiscreteJoint, pair: &TreatmentPair) -> Result<BoundReport> {
        let law = FactorLaw::from_dist(dist, pair)?;
        BoundReport::new(self.tag(), self.on_law(&law)?, Method::ExactSum, pair)
    }

    fn on_dgp(&self, params: &SimDgpParams, pair: &TreatmentPair, nodes: usize) -> Result<BoundReport> {
        simdgp::simdgp_bound(params, pair, self.tag(), nodes)
    }
}

struct Formula(ModelTag);

impl BoundEvaluator for Formula {
    fn tag(&self) -> ModelTag {
        self.0
    }
    fn on_law(&self, law: &FactorLaw) -> Result<f64> {
        props::evaluate(law, self.0)
    }
}

#[derive(Clone, Default)]
pub struct BoundRegistry {
    entries: BTreeMap<String, Arc<dyn BoundEvaluator>>,
}

impl BoundRegistry {
    pub fn standard() -> Self {
        let mut r = Self::default();
        for t in ModelTag::ALL {
            r.register(t.as_str(), Arc::new(Formula(t)));
        }
        r
    }

    pub fn register(&mut self, name: &str, e: Arc<dyn BoundEvaluator>) {
        self.entries.insert(name.to_ascii_uppercase(), e);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn BoundEvaluator>> {
        self.entries
            .get(&name.trim().to_ascii_uppercase())
            .cloned()
            .ok_or_else(|| Error::InvalidSpec(format!("no bound evaluator named `{name}`")))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}
