use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use twodoor_core::{Error, GaussHermite, Result};

pub const DEFAULT_GH_NODES: usize = 64;

/// Named component of a [`NuisanceSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    #[serde(rename = "pC")]
    PC,
    #[serde(rename = "pA")]
    PA,
    #[serde(rename = "pA_given_C")]
    PAGivenC,
    #[serde(rename = "pZ_given_A")]
    PZGivenA,
    #[serde(rename = "pZ_given_AC")]
    PZGivenAC,
    #[serde(rename = "mY_ac")]
    MYAC,
    #[serde(rename = "mY_az")]
    MYAZ,
    #[serde(rename = "mY_zc")]
    MYZC,
    #[serde(rename = "mY_azc")]
    MYAZC,
}

impl Slot {
    pub const ALL: [Slot; 9] = [
        Slot::PC,
        Slot::PA,
        Slot::PAGivenC,
        Slot::PZGivenA,
        Slot::PZGivenAC,
        Slot::MYAC,
        Slot::MYAZ,
        Slot::MYZC,
        Slot::MYAZC,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Slot::PC => "pC",
            Slot::PA => "pA",
            Slot::PAGivenC => "pA_given_C",
            Slot::PZGivenA => "pZ_given_A",
            Slot::PZGivenAC => "pZ_given_AC",
            Slot::MYAC => "mY_ac",
            Slot::MYAZ => "mY_az",
            Slot::MYZC => "mY_zc",
            Slot::MYAZC => "mY_azc",
        }
    }

    /// Which of `(A, Z, C)` the component may depend on.
    pub fn arguments(self) -> [bool; 3] {
        match self {
            Slot::PC | Slot::PA => [false, false, false],
            Slot::PAGivenC => [false, false, true],
            Slot::PZGivenA => [true, false, false],
            Slot::PZGivenAC => [true, false, true],
            Slot::MYAC => [true, false, true],
            Slot::MYAZ => [true, true, false],
            Slot::MYZC => [false, true, true],
            Slot::MYAZC => [true, true, true],
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Slot {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Slot::ALL
            .into_iter()
            .find(|x| x.as_str().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::InvalidSpec(format!("unknown nuisance slot `{s}`")))
    }
}

/// Probability mass over a finite support (`p(C)` or `p(A)`).
pub trait MassModel: Send + Sync + fmt::Debug {
    fn support(&self) -> &[f64];
    fn prob(&self, v: f64) -> f64;
}

/// `p(a | c)`.
pub trait TreatmentModel: Send + Sync + fmt::Debug {
    fn prob(&self, a: f64, c: f64) -> f64;
}

/// Conditional law of the mediator. Arguments the slot does not depend on are
/// passed as NaN and must be ignored.
pub trait MediatorModel: Send + Sync + fmt::Debug {
    /// Mass (finite support) or density (continuous) at `z`.
    fn density(&self, z: f64, a: f64, c: f64) -> f64;
    /// `E[f(Z) | a, c]`, exact for finite support, by `rule` otherwise.
    fn expect(&self, a: f64, c: f64, rule: &GaussHermite, f: &mut dyn FnMut(f64) -> f64) -> f64;
}

/// Regression of `Y` on a subset of `(A, Z, C)`; unused arguments are NaN.
pub trait OutcomeModel: Send + Sync + fmt::Debug {
    fn mean(&self, a: f64, z: f64, c: f64) -> f64;
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub slot: String,
    pub family: String,
    pub predictors: Vec<String>,
    pub directive: String,
}

/// Audit record of how each component was obtained.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fold: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct NuisanceSet {
    pub p_c: Option<Arc<dyn MassModel>>,
    pub p_a: Option<Arc<dyn MassModel>>,
    pub p_a_given_c: Option<Arc<dyn TreatmentModel>>,
    pub p_z_given_a: Option<Arc<dyn MediatorModel>>,
    pub p_z_given_ac: Option<Arc<dyn MediatorModel>>,
    pub m_ac: Option<Arc<dyn OutcomeModel>>,
    pub m_az: Option<Arc<dyn OutcomeModel>>,
    pub m_zc: Option<Arc<dyn OutcomeModel>>,
    pub m_azc: Option<Arc<dyn OutcomeModel>>,
    /// Treatment levels summed over in `Σ_ā`.
    pub a_support: Vec<f64>,
    /// Rule used by continuous mediator models.
    pub z_rule: Arc<GaussHermite>,
    pub manifest: Manifest,
}

impl NuisanceSet {
    pub fn empty(a_support: Vec<f64>) -> Self {
        Self {
            p_c: None,
            p_a: None,
            p_a_given_c: None,
            p_z_given_a: None,
            p_z_given_ac: None,
            m_ac: None,
            m_az: None,
            m_zc: None,
            m_azc: None,
            a_support,
            z_rule: Arc::new(GaussHermite::new(DEFAULT_GH_NODES).expect("default rule")),
            manifest: Manifest::default(),
        }
    }

    pub fn has(&self, slot: Slot) -> bool {
        match slot {
            Slot::PC => self.p_c.is_some(),
            Slot::PA => self.p_a.is_some(),
            Slot::PAGivenC => self.p_a_given_c.is_some(),
            Slot::PZGivenA => self.p_z_given_a.is_some(),
            Slot::PZGivenAC => self.p_z_given_ac.is_some(),
            Slot::MYAC => self.m_ac.is_some(),
            Slot::MYAZ => self.m_az.is_some(),
            Slot::MYZC => self.m_zc.is_some(),
            Slot::MYAZC => self.m_azc.is_some(),
        }
    }

    /// Fails with `MissingNuisance` naming the first absent slot.
    pub fn require(&self, slots: &[Slot]) -> Result<()> {
        match slots.iter().find(|s| !self.has(**s)) {
            Some(s) => Err(Error::MissingNuisance(s.to_string())),
            None => Ok(()),
        }
    }

    pub fn with_rule(mut self, nodes: usize) -> Result<Self> {
        self.z_rule = Arc::new(GaussHermite::new(nodes)?);
        Ok(self)
    }
}
