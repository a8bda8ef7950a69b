//! `θ̂ = (1/n) Σ m(X_i, η̂)` for each influence function, and the naive
//! difference in means.

mod estimator;
mod result;

pub use estimator::{
    estimate, estimate_all, estimate_fitted, EifEstimator, Estimator, EstimatorRegistry, NaiveEstimator,
    CLIP_BUDGET, CLIP_EPS,
};
pub use result::EstimationResult;
