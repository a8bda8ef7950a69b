//! Fitting the nuisance components of a [`NuisanceSet`] from data.
//!
//! Each component is described by a [`ModelSpec`]: the slot it fills, a model
//! family, the predictors, and an optional misspecification directive. Fits
//! are plain least squares, IRLS logistic regression, Gaussian conditional
//! densities or frequency tables.

mod fit;
mod glm;
mod models;
mod spec;

pub use fit::{fit, fit_set, CrossFitPlan, Fitted, Fold};
pub use glm::{logistic_fit, ols_fit, LogisticFit, OlsFit, VARIANCE_FLOOR};
pub use models::{gaussian_density_fit, GaussianMediator, LinearOutcome, LogisticTreatment};
pub use spec::{Directive, Family, ModelSpec};
pub use twodoor_eif::NuisanceSet;
