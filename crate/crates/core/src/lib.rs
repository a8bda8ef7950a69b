//! Shared building blocks: the discrete joint over `(C, A, Z, Y)`, the three
//! adjustment functionals, observed datasets, model tags and the numerics
//! (compensated sums, Gauss-Hermite rules) every other crate leans on.

pub mod data;
pub mod dist;
pub mod error;
pub mod quad;
pub mod sum;
pub mod tag;

pub use data::{Dataset, Observation};
pub use dist::{DiscreteJoint, Table, TreatmentPair, Var};
pub use error::{Error, Result};
pub use quad::GaussHermite;
pub use sum::{ksum, KahanSum};
pub use tag::{EstimatorTag, ModelTag};

/// Denominators at or below this are treated as positivity failures.
pub const POSITIVITY_EPS: f64 = 1e-12;

pub fn expit(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}
