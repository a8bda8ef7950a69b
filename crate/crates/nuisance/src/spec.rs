use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use twodoor_core::{Error, Result, Var};
use twodoor_eif::Slot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Frequencies or cell means over the observed predictor cells.
    Empirical,
    LinearMean,
    Logistic,
    GaussianDensity,
    FixedValue,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Empirical => "empirical",
            Family::LinearMean => "linear-mean",
            Family::Logistic => "logistic",
            Family::GaussianDensity => "gaussian-density",
            Family::FixedValue => "fixed-value",
        }
    }

    fn allows(self, slot: Slot) -> bool {
        use Slot::*;
        match self {
            Family::Empirical => true,
            Family::LinearMean => matches!(slot, MYAC | MYAZ | MYZC | MYAZC),
            Family::Logistic => slot == PAGivenC,
            Family::GaussianDensity => matches!(slot, PZGivenA | PZGivenAC),
            Family::FixedValue => matches!(slot, PC | PA),
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "empirical" => Family::Empirical,
            "linear" | "linear-mean" | "ols" => Family::LinearMean,
            "logistic" | "logit" => Family::Logistic,
            "gaussian" | "gaussian-density" | "normal" => Family::GaussianDensity,
            "fixed" | "fixed-value" => Family::FixedValue,
            other => return Err(Error::InvalidSpec(format!("unknown model family `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "arg")]
pub enum Directive {
    #[default]
    None,
    /// Drop a predictor from the fitted model.
    OmitPredictor(Var),
    /// Replace the fit by a constant: the probability of the largest support value.
    FixValue(f64),
}

impl fmt::Display for Directive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Directive::None => f.write_str("none"),
            Directive::OmitPredictor(v) => write!(f, "omit-predictor({})", var_name(*v)),
            Directive::FixValue(v) => write!(f, "fix-value({v})"),
        }
    }
}

pub(crate) fn var_name(v: Var) -> &'static str {
    match v {
        Var::C => "C",
        Var::A => "A",
        Var::Z => "Z",
        Var::Y => "Y",
    }
}

fn parse_var(s: &str) -> Result<Var> {
    match s.trim() {
        "C" | "c" => Ok(Var::C),
        "A" | "a" => Ok(Var::A),
        "Z" | "z" => Ok(Var::Z),
        other => Err(Error::InvalidSpec(format!("`{other}` is not a predictor (C, A or Z)"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub slot: Slot,
    pub family: Family,
    pub predictors: Vec<Var>,
    #[serde(default)]
    pub directive: Directive,
}

impl ModelSpec {
    pub fn new(slot: Slot, family: Family, predictors: &[Var]) -> Result<Self> {
        let s = Self { slot, family, predictors: predictors.to_vec(), directive: Directive::None };
        s.validate()?;
        Ok(s)
    }

    pub fn with(mut self, directive: Directive) -> Result<Self> {
        self.directive = directive;
        self.validate()?;
        Ok(self)
    }

    pub fn omit(self, v: Var) -> Result<Self> {
        self.with(Directive::OmitPredictor(v))
    }

    pub fn fix(self, p: f64) -> Result<Self> {
        self.with(Directive::FixValue(p))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(format!("{}: {m}", self.slot)));
        if !self.family.allows(self.slot) {
            return bad(format!("family {} not available for this component", self.family.as_str()));
        }
        let [ua, uz, uc] = self.slot.arguments();
        for (i, v) in self.predictors.iter().enumerate() {
            let ok = match v {
                Var::A => ua,
                Var::Z => uz,
                Var::C => uc,
                Var::Y => false,
            };
            if !ok {
                return bad(format!("predictor {} outside the component's arguments", var_name(*v)));
            }
            if self.predictors[..i].contains(v) {
                return bad(format!("predictor {} listed twice", var_name(*v)));
            }
        }
        match self.directive {
            Directive::FixValue(p) => {
                if !matches!(self.slot, Slot::PC | Slot::PA) {
                    return bad("fix-value applies only to pC and pA".into());
                }
                if !(p > 0.0 && p < 1.0) {
                    return bad(format!("fixed probability {p} outside (0, 1)"));
                }
            }
            Directive::None | Directive::OmitPredictor(_) if self.family == Family::FixedValue => {
                return bad("fixed-value family needs a fix-value directive".into());
            }
            _ => {}
        }
        Ok(())
    }

    /// Predictors actually entering the fit.
    pub fn effective_predictors(&self) -> Vec<Var> {
        match self.directive {
            Directive::OmitPredictor(v) => self.predictors.iter().copied().filter(|p| *p != v).collect(),
            _ => self.predictors.clone(),
        }
    }

    /// Correctly specified defaults for every slot on the simulation design,
    /// with the general (unsimplified) argument lists.
    pub fn default_set() -> Vec<ModelSpec> {
        use Family::*;
        use Var::*;
        let mk = |s, f, p: &[Var]| ModelSpec::new(s, f, p).expect("valid default");
        vec![
            mk(Slot::PC, Empirical, &[]),
            mk(Slot::PA, Empirical, &[]),
            mk(Slot::PAGivenC, Logistic, &[C]),
            mk(Slot::PZGivenA, GaussianDensity, &[A]),
            mk(Slot::PZGivenAC, GaussianDensity, &[A, C]),
            mk(Slot::MYAC, LinearMean, &[A, C]),
            mk(Slot::MYAZ, LinearMean, &[A, Z]),
            mk(Slot::MYZC, LinearMean, &[Z, C]),
            mk(Slot::MYAZC, LinearMean, &[A, Z, C]),
        ]
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let preds: Vec<_> = self.predictors.iter().map(|v| var_name(*v)).collect();
        write!(f, "{}={}[{}]", self.slot, self.family.as_str(), preds.join(","))?;
        match self.directive {
            Directive::None => Ok(()),
            Directive::OmitPredictor(v) => write!(f, " omit {}", var_name(v)),
            Directive::FixValue(p) => write!(f, " fix {p}"),
        }
    }
}

impl FromStr for ModelSpec {
    type Err = Error;
    /// `slot=family[P,…]`, optionally followed by `omit P` or `fix v`, e.g.
    /// `pZ_given_A=gaussian[A] omit A` or `pC=empirical fix 0.25`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(format!("cannot parse model spec `{s}`"));
        let (slot, rest) = s.split_once('=').ok_or_else(bad)?;
        let slot: Slot = slot.parse()?;
        let mut words = rest.split_whitespace();
        let head = words.next().ok_or_else(bad)?;
        let (fam, preds) = match head.split_once('[') {
            Some((f, p)) => (f, p.strip_suffix(']').ok_or_else(bad)?),
            None => (head, ""),
        };
        let predictors = preds
            .split(',')
            .filter(|x| !x.trim().is_empty())
            .map(parse_var)
            .collect::<Result<Vec<_>>>()?;
        let directive = match (words.next(), words.next()) {
            (None, _) => Directive::None,
            (Some("omit"), Some(v)) => Directive::OmitPredictor(parse_var(v)?),
            (Some("fix"), Some(v)) => Directive::FixValue(v.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        if words.next().is_some() {
            return Err(bad());
        }
        let spec = ModelSpec { slot, family: fam.parse()?, predictors, directive };
        spec.validate()?;
        Ok(spec)
    }
}
