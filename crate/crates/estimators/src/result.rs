use serde::{Deserialize, Serialize};
use twodoor_core::EstimatorTag;
use twodoor_eif::Manifest;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub tag: EstimatorTag,
    pub theta_hat: f64,
    /// Sample standard deviation of the `m` values over `√n`.
    pub se_hat: f64,
    pub n: usize,
    /// Denominators clipped during evaluation.
    pub clipped: usize,
    pub manifest: Manifest,
}

impl EstimationResult {
    pub const CSV_HEADER: [&'static str; 6] = ["tag", "theta_hat", "se_hat", "n", "clipped", "manifest"];

    /// Manifest condensed to `slot:family[preds]:directive` entries joined by `;`.
    pub fn manifest_summary(&self) -> String {
        let mut s: Vec<String> = self
            .manifest
            .entries
            .iter()
            .map(|e| format!("{}:{}[{}]:{}", e.slot, e.family, e.predictors.join(","), e.directive))
            .collect();
        if let Some(k) = self.manifest.fold {
            s.push(format!("fold:{k}"));
        }
        s.join(";")
    }

    /// One CSV record, numbers formatted by `num`.
    pub fn csv_row(&self, num: impl Fn(f64) -> String) -> Vec<String> {
        vec![
            self.tag.to_string(),
            num(self.theta_hat),
            num(self.se_hat),
            self.n.to_string(),
            self.clipped.to_string(),
            self.manifest_summary(),
        ]
    }
}
