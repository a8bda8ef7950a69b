use std::collections::BTreeMap;
use std::sync::Arc;

use twodoor_core::{ksum, Dataset, Error, EstimatorTag, ModelTag, Observation, Result};
use twodoor_eif::{Evaluator, Manifest, NuisanceSet, Positivity};
use twodoor_nuisance::Fitted;

use crate::result::EstimationResult;

pub const CLIP_EPS: f64 = 1e-6;
/// Largest fraction of rows allowed a clipped denominator before the
/// estimate is refused.
pub const CLIP_BUDGET: f64 = 0.05;

pub trait Estimator: Send + Sync {
    fn tag(&self) -> EstimatorTag;
    fn estimate(&self, data: &Dataset, eta: &Fitted) -> Result<EstimationResult>;
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = ksum(v.iter().copied()) / n;
    let var = ksum(v.iter().map(|x| (x - mean).powi(2))) / (n - 1.0);
    (mean, var.sqrt())
}

/// Difference of treated and control sample means.
#[derive(Debug, Clone, Copy, Default)]
pub struct NaiveEstimator;

impl Estimator for NaiveEstimator {
    fn tag(&self) -> EstimatorTag {
        EstimatorTag::Naive
    }

    fn estimate(&self, data: &Dataset, _eta: &Fitted) -> Result<EstimationResult> {
        let pair = data.pair();
        let group = |a: f64| -> Vec<f64> { data.rows().iter().filter(|o| o.a == a).map(|o| o.y).collect() };
        let (ys, yr) = (group(pair.a_star), group(pair.a_ref));
        if ys.is_empty() || yr.is_empty() {
            return Err(Error::InvalidData("a treatment group is empty".into()));
        }
        let (ms, ss) = mean_sd(&ys);
        let (mr, sr) = mean_sd(&yr);
        let term = |s: f64, k: usize| if k > 1 { s * s / k as f64 } else { 0.0 };
        Ok(EstimationResult {
            tag: EstimatorTag::Naive,
            theta_hat: ms - mr,
            se_hat: (term(ss, ys.len()) + term(sr, yr.len())).sqrt(),
            n: data.len(),
            clipped: 0,
            manifest: Manifest::default(),
        })
    }
}

/// Plug-in estimator for one influence function.
#[derive(Debug, Clone, Copy)]
pub struct EifEstimator(pub ModelTag);

impl EifEstimator {
    fn m_values(&self, rows: &[Observation], eta: &NuisanceSet, data: &Dataset) -> Result<(Vec<f64>, usize)> {
        let ev = Evaluator::new(eta, data.pair(), Positivity::Clip { eps: CLIP_EPS });
        let mut out = Vec::with_capacity(rows.len());
        let mut clipped_rows = 0;
        for x in rows {
            let before = ev.clips();
            out.push(ev.m(self.0, x)?);
            clipped_rows += usize::from(ev.clips() > before);
        }
        Ok((out, clipped_rows))
    }
}

impl Estimator for EifEstimator {
    fn tag(&self) -> EstimatorTag {
        EstimatorTag::Model(self.0)
    }

    fn estimate(&self, data: &Dataset, eta: &Fitted) -> Result<EstimationResult> {
        let (m, clipped, manifest) = match eta {
            Fitted::Single(e) => {
                let (m, c) = self.m_values(data.rows(), e, data)?;
                (m, c, e.manifest.clone())
            }
            Fitted::CrossFit(folds) => {
                let mut m = vec![f64::NAN; data.len()];
                let mut clipped = 0;
                for f in folds {
                    let rows: Vec<Observation> = f.eval.iter().map(|&i| data.rows()[i]).collect();
                    let (v, c) = self.m_values(&rows, &f.eta, data)?;
                    for (&i, x) in f.eval.iter().zip(v) {
                        m[i] = x;
                    }
                    clipped += c;
                }
                if m.iter().any(|x| x.is_nan()) {
                    return Err(Error::InvalidSpec("cross-fit folds do not cover every row".into()));
                }
                let mut manifest = folds.first().map(|f| f.eta.manifest.clone()).unwrap_or_default();
                manifest.fold = None;
                (m, clipped, manifest)
            }
        };
        if clipped as f64 > CLIP_BUDGET * data.len() as f64 {
            return Err(Error::positivity(
                format!("{}: {clipped} of {} rows needed clipping", self.0, data.len()),
                CLIP_EPS,
            ));
        }
        let (theta_hat, sd) = mean_sd(&m);
        Ok(EstimationResult {
            tag: self.tag(),
            theta_hat,
            se_hat: sd / (m.len() as f64).sqrt(),
            n: data.len(),
            clipped,
            manifest,
        })
    }
}

#[derive(Clone)]
pub struct EstimatorRegistry {
    entries: BTreeMap<String, Arc<dyn Estimator>>,
}

impl EstimatorRegistry {
    pub fn standard() -> Self {
        let mut r = Self { entries: BTreeMap::new() };
        r.register(Arc::new(NaiveEstimator));
        for t in ModelTag::ALL {
            r.register(Arc::new(EifEstimator(t)));
        }
        r
    }

    pub fn register(&mut self, e: Arc<dyn Estimator>) {
        self.entries.insert(e.tag().as_str().to_string(), e);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Estimator>> {
        let tag: EstimatorTag = name.parse()?;
        self.entries
            .get(tag.as_str())
            .cloned()
            .ok_or_else(|| Error::InvalidSpec(format!("no estimator registered as `{name}`")))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Estimate with one nuisance set fitted on all of `data`.
pub fn estimate(data: &Dataset, eta: &NuisanceSet, tag: EstimatorTag) -> Result<EstimationResult> {
    estimate_fitted(data, &Fitted::Single(eta.clone()), tag)
}

pub fn estimate_fitted(data: &Dataset, eta: &Fitted, tag: EstimatorTag) -> Result<EstimationResult> {
    match tag {
        EstimatorTag::Naive => NaiveEstimator.estimate(data, eta),
        EstimatorTag::Model(m) => EifEstimator(m).estimate(data, eta),
    }
}

/// One result per tag, sharing the fitted nuisances.
pub fn estimate_all(data: &Dataset, eta: &Fitted, tags: &[EstimatorTag]) -> Vec<Result<EstimationResult>> {
    tags.iter().map(|t| estimate_fitted(data, eta, *t)).collect()
}
