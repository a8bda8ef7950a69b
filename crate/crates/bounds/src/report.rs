use serde::{Deserialize, Serialize};
use twodoor_core::{Error, ModelTag, Result, TreatmentPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "exact-sum")]
    ExactSum,
    #[serde(rename = "closed-form")]
    ClosedForm,
    #[serde(rename = "quadrature")]
    Quadrature,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ExactSum => "exact-sum",
            Method::ClosedForm => "closed-form",
            Method::Quadrature => "quadrature",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub model: ModelTag,
    pub value: f64,
    pub method: Method,
    pub a_star: f64,
    pub a_ref: f64,
}

/// Rounding slack below zero that is reported as exactly zero.
const NEG_SLACK: f64 = 1e-9;

impl BoundReport {
    pub fn new(model: ModelTag, value: f64, method: Method, pair: &TreatmentPair) -> Result<Self> {
        if !value.is_finite() || value < -NEG_SLACK {
            return Err(Error::DomainError(format!("{model} bound evaluated to {value}")));
        }
        Ok(Self {
            model,
            value: value.max(0.0),
            method,
            a_star: pair.a_star,
            a_ref: pair.a_ref,
        })
    }
}
