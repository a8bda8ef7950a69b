use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twodoor_bounds::SimDgpParams;
use twodoor_core::{Error, EstimatorTag, Result, TreatmentPair};
use twodoor_estimators::estimate_all;
use twodoor_nuisance::{fit_set, Fitted};

use crate::sample::sample_dgp_with;
use crate::settings::setting_specs;
use crate::summary::{metrics, McRow, McSummary};

pub const FULL_SIZES: [usize; 8] = [50, 100, 500, 1000, 5000, 10_000, 20_000, 50_000];
pub const FULL_K: usize = 1000;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub params: SimDgpParams,
    pub sizes: Vec<usize>,
    pub k: usize,
    pub tags: Vec<EstimatorTag>,
    pub setting: u8,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            params: SimDgpParams::default(),
            sizes: vec![5000],
            k: 200,
            tags: EstimatorTag::ALL.to_vec(),
            setting: 0,
            seed: 1,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.k < 2 {
            return Err(Error::InvalidSpec(format!("K = {} < 2 replicates", self.k)));
        }
        if self.sizes.is_empty() || self.sizes.iter().any(|n| *n < 10) {
            return Err(Error::InvalidSpec("sample sizes must be at least 10".into()));
        }
        setting_specs(self.setting)?;
        Ok(())
    }

    /// Full-scale sizes and replicate count.
    pub fn full_scale(mut self) -> Self {
        self.sizes = FULL_SIZES.to_vec();
        self.k = FULL_K;
        self
    }
}

/// Generator of replicate `r` at sample size `n`; independent of every
/// other replicate and of scheduling.
pub fn child_rng(master: u64, n: usize, r: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master ^ (n as u64).wrapping_mul(GOLDEN));
    rng.set_stream(r as u64);
    rng
}

fn replicate(cfg: &McConfig, n: usize, r: usize) -> Result<Vec<f64>> {
    let data = sample_dgp_with(&cfg.params, n, &mut child_rng(cfg.seed, n, r))?;
    let eta = Fitted::Single(fit_set(&data, &setting_specs(cfg.setting)?)?);
    estimate_all(&data, &eta, &cfg.tags)
        .into_iter()
        .map(|res| res.map(|e| e.theta_hat))
        .collect()
}

/// Runs every replicate, in parallel, and summarises by `(n, tag)`.
pub fn run_mc(cfg: &McConfig) -> Result<McSummary> {
    cfg.validate()?;
    let theta = cfg.params.theta(&TreatmentPair::default());
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &n in &cfg.sizes {
        let out: Vec<Result<Vec<f64>>> = (0..cfg.k).into_par_iter().map(|r| replicate(cfg, n, r)).collect();
        let failed = out.iter().filter(|o| o.is_err()).count();
        if failed > 0 && failed * 100 >= cfg.k {
            let first = out.into_iter().find_map(|o| o.err()).expect("a failure");
            return Err(Error::InvalidData(format!(
                "{failed} of {} replicates failed at n = {n}; first: {first}",
                cfg.k
            )));
        }
        let ok: Vec<Vec<f64>> = out.into_iter().filter_map(|o| o.ok()).collect();
        for (j, &tag) in cfg.tags.iter().enumerate() {
            let est: Vec<f64> = ok.iter().map(|v| v[j]).collect();
            rows.push(McRow { setting: cfg.setting, n, tag, metrics: metrics(&est, theta, n), k: est.len() });
        }
        failures.push((n, failed));
    }
    Ok(McSummary { theta, rows, failures })
}
