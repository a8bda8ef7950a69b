use std::f64::consts::PI;

use twodoor_core::{expit, Dataset, Error, GaussHermite, Result, Var};
use twodoor_eif::{MediatorModel, OutcomeModel, TreatmentModel};

use crate::glm::{logistic_fit, ols_fit, VARIANCE_FLOOR};

#[inline]
fn pick(v: Var, a: f64, z: f64, c: f64) -> f64 {
    match v {
        Var::A => a,
        Var::Z => z,
        Var::C => c,
        Var::Y => f64::NAN,
    }
}

fn column(data: &Dataset, v: Var) -> Vec<f64> {
    data.rows()
        .iter()
        .map(|o| match v {
            Var::C => o.c,
            Var::A => o.a,
            Var::Z => o.z,
            Var::Y => o.y,
        })
        .collect()
}

fn columns(data: &Dataset, preds: &[Var]) -> Vec<Vec<f64>> {
    preds.iter().map(|v| column(data, *v)).collect()
}

fn linear(coef: &[f64], preds: &[Var], a: f64, z: f64, c: f64) -> f64 {
    coef[0] + preds.iter().zip(&coef[1..]).map(|(v, b)| b * pick(*v, a, z, c)).sum::<f64>()
}

/// `E(Y | predictors)` linear with intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOutcome {
    pub predictors: Vec<Var>,
    pub coef: Vec<f64>,
}

impl LinearOutcome {
    pub fn fit(data: &Dataset, preds: &[Var]) -> Result<Self> {
        let cols = columns(data, preds);
        let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        let fit = ols_fit(&refs, &column(data, Var::Y))?;
        Ok(Self { predictors: preds.to_vec(), coef: fit.coef })
    }
}

impl OutcomeModel for LinearOutcome {
    fn mean(&self, a: f64, z: f64, c: f64) -> f64 {
        linear(&self.coef, &self.predictors, a, z, c)
    }
}

/// `p(A = hi | C) = expit(b0 + b1 C)` on a binary treatment `{lo, hi}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticTreatment {
    pub predictors: Vec<Var>,
    pub coef: Vec<f64>,
    pub levels: (f64, f64),
}

impl LogisticTreatment {
    pub fn fit(data: &Dataset, preds: &[Var]) -> Result<Self> {
        let sup = data.a_support();
        let [lo, hi] = sup[..] else {
            return Err(Error::InvalidSpec(format!(
                "logistic treatment model needs a binary treatment, found {} levels",
                sup.len()
            )));
        };
        let y: Vec<f64> = data.rows().iter().map(|o| f64::from(u8::from(o.a == hi))).collect();
        let cols = columns(data, preds);
        let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        let fit = logistic_fit(&refs, &y)?;
        Ok(Self { predictors: preds.to_vec(), coef: fit.coef, levels: (lo, hi) })
    }
}

impl TreatmentModel for LogisticTreatment {
    fn prob(&self, a: f64, c: f64) -> f64 {
        let p = expit(linear(&self.coef, &self.predictors, f64::NAN, f64::NAN, c));
        if a == self.levels.1 {
            p
        } else if a == self.levels.0 {
            1.0 - p
        } else {
            0.0
        }
    }
}

/// `Z | predictors ~ N(linear mean, σ²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMediator {
    pub predictors: Vec<Var>,
    pub coef: Vec<f64>,
    pub sigma: f64,
}

impl GaussianMediator {
    fn mu(&self, a: f64, c: f64) -> f64 {
        linear(&self.coef, &self.predictors, a, f64::NAN, c)
    }
}

impl MediatorModel for GaussianMediator {
    fn density(&self, z: f64, a: f64, c: f64) -> f64 {
        let u = (z - self.mu(a, c)) / self.sigma;
        (-0.5 * u * u).exp() / (self.sigma * (2.0 * PI).sqrt())
    }
    fn expect(&self, a: f64, c: f64, rule: &GaussHermite, f: &mut dyn FnMut(f64) -> f64) -> f64 {
        rule.expect_normal(self.mu(a, c), self.sigma, f)
    }
}

/// Gaussian density of `Z` given `preds`: least-squares mean, residual mean
/// square variance.
pub fn gaussian_density_fit(data: &Dataset, preds: &[Var]) -> Result<GaussianMediator> {
    if preds.contains(&Var::Z) || preds.contains(&Var::Y) {
        return Err(Error::InvalidSpec("mediator density cannot condition on Z or Y".into()));
    }
    let cols = columns(data, preds);
    let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    let fit = ols_fit(&refs, &column(data, Var::Z))?;
    let s2 = fit.residual_variance();
    if !(s2 >= VARIANCE_FLOOR) {
        return Err(Error::DomainError(format!(
            "residual variance {s2:.3e} below the floor {VARIANCE_FLOOR:e}"
        )));
    }
    Ok(GaussianMediator { predictors: preds.to_vec(), coef: fit.coef, sigma: s2.sqrt() })
}
