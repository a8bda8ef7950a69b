use std::cell::{Cell, RefCell};
use std::collections::HashMap;

use twodoor_core::{Error, Result, TreatmentPair, POSITIVITY_EPS};

use crate::functions::influence;
use crate::nuisance::{MassModel, MediatorModel, NuisanceSet, OutcomeModel, Slot, TreatmentModel};
use crate::table::key;
use twodoor_core::ModelTag;

/// How denominators near zero are handled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Positivity {
    /// Any denominator `≤ 1e-12` is an error (true nuisances, oracles).
    Strict,
    /// Probabilities are clipped into `[eps, 1 − eps]` and mediator values
    /// floored at `1e-12`; every adjustment is counted.
    Clip { eps: f64 },
}

/// Evaluates `m(x, η)` for a fixed `(η, pair)`, caching the `(a, c)`-indexed
/// integrals so that a full pass over a dataset costs one integral per
/// distinct treatment/covariate cell instead of one per row.
pub struct Evaluator<'a> {
    eta: &'a NuisanceSet,
    pair: TreatmentPair,
    policy: Positivity,
    memo: RefCell<HashMap<(u8, u64, u64), f64>>,
    clips: Cell<usize>,
}

impl<'a> Evaluator<'a> {
    pub fn new(eta: &'a NuisanceSet, pair: TreatmentPair, policy: Positivity) -> Self {
        Self {
            eta,
            pair,
            policy,
            memo: RefCell::new(HashMap::new()),
            clips: Cell::new(0),
        }
    }

    pub fn eta(&self) -> &NuisanceSet {
        self.eta
    }

    pub fn pair(&self) -> TreatmentPair {
        self.pair
    }

    /// Number of clipped denominators so far.
    pub fn clips(&self) -> usize {
        self.clips.get()
    }

    pub fn m(&self, tag: ModelTag, x: &twodoor_core::Observation) -> Result<f64> {
        let f = influence(tag);
        self.eta.require(f.required())?;
        let v = f.m(x, self)?;
        if !v.is_finite() {
            return Err(Error::positivity(
                format!("{tag} evaluated to a non-finite value at {x:?} (undefined nuisance cell)"),
                v,
            ));
        }
        Ok(v)
    }

    pub(crate) fn memo(&self, term: u8, a: f64, c: f64, f: impl FnOnce() -> f64) -> f64 {
        let k = (term, key(a, !a.is_nan()), key(c, !c.is_nan()));
        if let Some(v) = self.memo.borrow().get(&k) {
            return *v;
        }
        let v = f();
        self.memo.borrow_mut().insert(k, v);
        v
    }

    /// Guards a probability used as a denominator.
    pub(crate) fn prob_den(&self, p: f64, what: &dyn Fn() -> String) -> Result<f64> {
        if p.is_nan() {
            return Err(Error::positivity(what(), p));
        }
        match self.policy {
            Positivity::Strict => {
                if p <= POSITIVITY_EPS {
                    Err(Error::positivity(what(), p))
                } else {
                    Ok(p)
                }
            }
            Positivity::Clip { eps } => {
                if p < eps {
                    self.clips.set(self.clips.get() + 1);
                    Ok(eps)
                } else if p > 1.0 - eps {
                    self.clips.set(self.clips.get() + 1);
                    Ok(1.0 - eps)
                } else {
                    Ok(p)
                }
            }
        }
    }

    /// Guards a mediator mass or density used as a denominator.
    pub(crate) fn dens_den(&self, p: f64, what: &dyn Fn() -> String) -> Result<f64> {
        if p.is_nan() {
            return Err(Error::positivity(what(), p));
        }
        if p > POSITIVITY_EPS {
            return Ok(p);
        }
        match self.policy {
            Positivity::Strict => Err(Error::positivity(what(), p)),
            Positivity::Clip { .. } => {
                self.clips.set(self.clips.get() + 1);
                Ok(POSITIVITY_EPS)
            }
        }
    }

    pub(crate) fn p_c(&self) -> Result<&dyn MassModel> {
        self.eta.p_c.as_deref().ok_or_else(|| Error::MissingNuisance(Slot::PC.to_string()))
    }
    pub(crate) fn p_a(&self) -> Result<&dyn MassModel> {
        self.eta.p_a.as_deref().ok_or_else(|| Error::MissingNuisance(Slot::PA.to_string()))
    }
    pub(crate) fn p_a_c(&self) -> Result<&dyn TreatmentModel> {
        self.eta
            .p_a_given_c
            .as_deref()
            .ok_or_else(|| Error::MissingNuisance(Slot::PAGivenC.to_string()))
    }
    pub(crate) fn p_z_a(&self) -> Result<&dyn MediatorModel> {
        self.eta
            .p_z_given_a
            .as_deref()
            .ok_or_else(|| Error::MissingNuisance(Slot::PZGivenA.to_string()))
    }
    pub(crate) fn p_z_ac(&self) -> Result<&dyn MediatorModel> {
        self.eta
            .p_z_given_ac
            .as_deref()
            .ok_or_else(|| Error::MissingNuisance(Slot::PZGivenAC.to_string()))
    }
    pub(crate) fn m_ac(&self) -> Result<&dyn OutcomeModel> {
        self.eta.m_ac.as_deref().ok_or_else(|| Error::MissingNuisance(Slot::MYAC.to_string()))
    }
    pub(crate) fn m_az(&self) -> Result<&dyn OutcomeModel> {
        self.eta.m_az.as_deref().ok_or_else(|| Error::MissingNuisance(Slot::MYAZ.to_string()))
    }
    pub(crate) fn m_zc(&self) -> Result<&dyn OutcomeModel> {
        self.eta.m_zc.as_deref().ok_or_else(|| Error::MissingNuisance(Slot::MYZC.to_string()))
    }
    pub(crate) fn m_azc(&self) -> Result<&dyn OutcomeModel> {
        self.eta
            .m_azc
            .as_deref()
            .ok_or_else(|| Error::MissingNuisance(Slot::MYAZC.to_string()))
    }
}
