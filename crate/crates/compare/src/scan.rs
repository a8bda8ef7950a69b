use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twodoor_core::{expit, DiscreteJoint, Error, Result, TreatmentPair};

use crate::conditions::diff_td_minus_bd;

/// `[(3 − 2√2)/2, (2√2 − 1)/2]`: values of `p(Z=1|A=1)` for which the
/// two-door bound never exceeds the back-door bound in the binary example.
pub const INTERVAL: (f64, f64) = (
    (3.0 - 2.0 * std::f64::consts::SQRT_2) / 2.0,
    (2.0 * std::f64::consts::SQRT_2 - 1.0) / 2.0,
);

const VIOLATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub beta0: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma1: Vec<f64>,
    pub gamma2: Vec<f64>,
}

fn steps(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let k = ((hi - lo) / step).round() as i64;
    (0..=k).map(|i| lo + i as f64 * step).collect()
}

impl Default for ScanGrid {
    /// The full published grid: 4 × 9 × 41 × 9 × 9 points.
    fn default() -> Self {
        let ints = steps(-4.0, 4.0, 1.0);
        Self {
            beta0: vec![0.1, 0.3, 0.6, 0.9],
            alpha: ints.clone(),
            beta: steps(-4.0, 4.0, 0.2),
            gamma1: ints.clone(),
            gamma2: ints,
        }
    }
}

impl ScanGrid {
    pub fn points(&self) -> Vec<[f64; 5]> {
        let mut out = Vec::new();
        for &b0 in &self.beta0 {
            for &al in &self.alpha {
                for &be in &self.beta {
                    for &g1 in &self.gamma1 {
                        for &g2 in &self.gamma2 {
                            out.push([b0, al, be, g1, g2]);
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub beta0: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub diff: f64,
    pub interval_member: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
}

pub const SCAN_HEADER: [&str; 7] = ["β0", "α", "β", "γ1", "γ2", "diff", "interval_member"];

impl ScanReport {
    /// Members of the interval whose difference is positive beyond `1e-10`.
    pub fn violations(&self) -> Vec<&ScanRow> {
        self.rows.iter().filter(|r| r.interval_member && r.diff > VIOLATION_TOL).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W, num: impl Fn(f64) -> String) -> Result<()> {
        let io = |e: csv::Error| Error::Io(e.to_string());
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(SCAN_HEADER).map_err(io)?;
        for r in &self.rows {
            wtr.write_record([
                num(r.beta0),
                num(r.alpha),
                num(r.beta),
                num(r.gamma1),
                num(r.gamma2),
                num(r.diff),
                r.interval_member.to_string(),
            ])
            .map_err(io)?;
        }
        wtr.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

/// `var φ_td − var φ_bd` over the binary logistic family
/// `C ~ Bern(expit β0)`, `A|C ~ Bern(expit αC)`, `Z|A ~ Bern(expit βA)`,
/// `Y|Z,C ~ Bern(expit(γ1 Z + γ2 C))`, in grid order.
pub fn grid_scan(grid: &ScanGrid) -> Result<ScanReport> {
    let pair = TreatmentPair::default();
    let (lo, hi) = INTERVAL;
    let rows = grid
        .points()
        .into_par_iter()
        .map(|[b0, al, be, g1, g2]| {
            let d = DiscreteJoint::logistic_chain(b0, al, be, g1, g2)?;
            let diff = diff_td_minus_bd(&d, &pair)?;
            let p = expit(be);
            Ok(ScanRow {
                beta0: b0,
                alpha: al,
                beta: be,
                gamma1: g1,
                gamma2: g2,
                diff,
                interval_member: (lo..=hi).contains(&p),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanReport { rows })
}
