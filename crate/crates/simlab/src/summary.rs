use std::io::Write;

use serde::{Deserialize, Serialize};
use twodoor_core::{ksum, Error, EstimatorTag, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub bias: f64,
    /// `s / √K`.
    pub bias_se: f64,
    /// `s`, the replicate standard deviation.
    pub emp_se: f64,
    /// `n s²`.
    pub scaled_var: f64,
    /// `√(2 n² s⁴ / K)`.
    pub scaled_var_se: f64,
    /// `(1/K) Σ (θ̂ − θ)²`.
    pub mse: f64,
    /// Delta-method SE `√((4 bias² s² + 2 s⁴) / K)`.
    pub mse_se: f64,
}

/// Summary metrics of replicate estimates `est` of `theta` at sample size `n`.
pub fn metrics(est: &[f64], theta: f64, n: usize) -> Metrics {
    let k = est.len() as f64;
    let mean = ksum(est.iter().copied()) / k;
    let s2 = ksum(est.iter().map(|x| (x - mean).powi(2))) / (k - 1.0);
    let s = s2.sqrt();
    let bias = mean - theta;
    let nf = n as f64;
    Metrics {
        bias,
        bias_se: s / k.sqrt(),
        emp_se: s,
        scaled_var: nf * s2,
        scaled_var_se: (2.0 * nf * nf * s2 * s2 / k).sqrt(),
        mse: ksum(est.iter().map(|x| (x - theta).powi(2))) / k,
        mse_se: ((4.0 * bias * bias * s2 + 2.0 * s2 * s2) / k).sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRow {
    pub setting: u8,
    pub n: usize,
    pub tag: EstimatorTag,
    #[serde(flatten)]
    pub metrics: Metrics,
    /// Replicates that entered the summary.
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub theta: f64,
    pub rows: Vec<McRow>,
    /// Failed replicates per sample size, in config order.
    pub failures: Vec<(usize, usize)>,
}

impl McSummary {
    pub const CSV_HEADER: [&'static str; 10] = [
        "setting", "n", "tag", "bias", "bias_se", "emp_se", "scaled_var", "scaled_var_se", "mse", "mse_se",
    ];

    pub fn get(&self, n: usize, tag: EstimatorTag) -> Option<&McRow> {
        self.rows.iter().find(|r| r.n == n && r.tag == tag)
    }

    pub fn write_csv<W: Write>(&self, w: W, num: impl Fn(f64) -> String) -> Result<()> {
        let io = |e: csv::Error| Error::Io(e.to_string());
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(Self::CSV_HEADER).map_err(io)?;
        for r in &self.rows {
            let m = &r.metrics;
            wtr.write_record([
                r.setting.to_string(),
                r.n.to_string(),
                r.tag.to_string(),
                num(m.bias),
                num(m.bias_se),
                num(m.emp_se),
                num(m.scaled_var),
                num(m.scaled_var_se),
                num(m.mse),
                num(m.mse_se),
            ])
            .map_err(io)?;
        }
        wtr.flush().map_err(|e| Error::Io(e.to_string()))
    }
}
