use std::collections::BTreeMap;
use std::sync::Arc;

use twodoor_core::{ksum, Error, ModelTag, Observation, Result, TreatmentPair};

use crate::eval::{Evaluator, Positivity};
use crate::nuisance::{NuisanceSet, Slot};

const N: f64 = f64::NAN;

// memo term ids
const FD_CENTRE: u8 = 1;
const FD_SHIFT: u8 = 2;
const TD_INNER: u8 = 3;
const TD_SHIFT: u8 = 4;
const BDTD_INNER: u8 = 5;
const BDTD_SHIFT: u8 = 6;
const MARG_A: u8 = 7;
const FDTD_INNER: u8 = 8;
const FDTD_SHIFT: u8 = 9;
const BFT_INNER: u8 = 10;
const BFT_SHIFT: u8 = 11;

/// Weighted sum that ignores zero-weight terms, so undefined values in cells
/// of probability zero never reach the result.
fn wsum(terms: impl Iterator<Item = (f64, f64)>) -> f64 {
    ksum(terms.filter(|(w, _)| *w != 0.0).map(|(w, v)| w * v))
}

fn indicator(x: &Observation, pair: &TreatmentPair) -> f64 {
    (x.a == pair.a_star) as i32 as f64 - (x.a == pair.a_ref) as i32 as f64
}

/// One influence function: the tag it answers to, the nuisance slots it reads
/// and its pointwise value `m = φ + θ`.
pub trait InfluenceFunction: Send + Sync {
    fn tag(&self) -> ModelTag;
    fn required(&self) -> &'static [Slot];
    fn m(&self, x: &Observation, ev: &Evaluator) -> Result<f64>;
}

pub struct BackDoor;
pub struct FrontDoor;
pub struct TwoDoor;
pub struct BackTwoDoor;
pub struct FrontTwoDoor;
pub struct BackFrontTwoDoor;

impl InfluenceFunction for BackDoor {
    fn tag(&self) -> ModelTag {
        ModelTag::Bd
    }
    fn required(&self) -> &'static [Slot] {
        &[Slot::PAGivenC, Slot::MYAC]
    }
    fn m(&self, x: &Observation, ev: &Evaluator) -> Result<f64> {
        let (pa, mu) = (ev.p_a_c()?, ev.m_ac()?);
        let p = ev.pair();
        let q1 = mu.mean(p.a_star, N, x.c);
        let q0 = mu.mean(p.a_ref, N, x.c);
        let mut v = q1 - q0;
        if x.a == p.a_star {
            v += (x.y - q1) / ev.prob_den(pa.prob(p.a_star, x.c), &|| format!("p(a*|c={})", x.c))?;
        }
        if x.a == p.a_ref {
            v -= (x.y - q0) / ev.prob_den(pa.prob(p.a_ref, x.c), &|| format!("p(a|c={})", x.c))?;
        }
        Ok(v)
    }
}

impl InfluenceFunction for FrontDoor {
    fn tag(&self) -> ModelTag {
        ModelTag::Fd
    }
    fn required(&self) -> &'static [Slot] {
        &[Slot::PA, Slot::PZGivenA, Slot::MYAZ]
    }
    fn m(&self, x: &Observation, ev: &Evaluator) -> Result<f64> {
        let (pa, pz, mu) = (ev.p_a()?, ev.p_z_a()?, ev.m_az()?);
        let rule = &ev.eta().z_rule;
        let p = ev.pair();
        let k = |z: f64| wsum(pa.support().iter().map(|&b| (pa.prob(b), mu.mean(b, z, N))));
        // EY(a') from η, computed once per evaluator
        let centre = |lvl: f64| ev.memo(FD_CENTRE, lvl, N, || pz.expect(lvl, N, rule, &mut |z| k(z)));
        let ratio = (pz.density(x.z, p.a_star, N) - pz.density(x.z, p.a_ref, N))
            / ev.dens_den(pz.density(x.z, x.a, N), &|| format!("p(z={}|a={})", x.z, x.a))?;
        let mut v = (x.y - mu.mean(x.a, x.z, N)) * ratio;
        if x.a == p.a_star || x.a == p.a_ref {
            let kz = k(x.z);
            let den = ev.prob_den(pa.prob(x.a), &|| format!("p(a={})", x.a))?;
            v += indicator(x, &p) * (kz - centre(x.a)) / den;
        }
        v += ev.memo(FD_SHIFT, x.a, N, || {
            pz.expect(p.a_star, N, rule, &mut |z| mu.mean(x.a, z, N))
                - pz.expect(p.a_ref, N, rule, &mut |z| mu.mean(x.a, z, N))
        });
        Ok(v)
    }
}

impl InfluenceFunction for TwoDoor {
    fn tag(&self) -> ModelTag {
        ModelTag::Td
    }
    fn required(&self) -> &'static [Slot] {
        &[Slot::PAGivenC, Slot::PZGivenAC, Slot::MYAZC]
    }
    fn m(&self, x: &Observation, ev: &Evaluator) -> Result<f64> {
        let (pa, pz, q) = (ev.p_a_c()?, ev.p_z_ac()?, ev.m_azc()?);
        let rule = &ev.eta().z_rule;
        let p = ev.pair();
        let sup = &ev.eta().a_support;
        let c = x.c;
        let ratio = (pz.density(x.z, p.a_star, c) - pz.density(x.z, p.a_ref, c))
            / ev.dens_den(pz.density(x.z, x.a, c), &|| format!("p(z={}|a={},c={c})", x.z, x.a))?;
        let mut v = (x.y - q.mean(x.a, x.z, c)) * ratio;
        if x.a == p.a_star || x.a == p.a_ref {
            let here = wsum(sup.iter().map(|&b| (pa.prob(b, c), q.mean(b, x.z, c))));
            let inner = ev.memo(TD_INNER, x.a, c, || {
                wsum(sup.iter().map(|&b| {
                    (pa.prob(b, c), pz.expect(x.a, c, rule, &mut |z| q.mean(b, z, c)))
                }))
            });
            let den = ev.prob_den(pa.prob(x.a, c), &|| format!("p(a={}|c={c})", x.a))?;
            v += (here - inner) * indicator(x, &p) / den;
        }
        v += ev.memo(TD_SHIFT, x.a, c, || {
            pz.expect(p.a_star, c, rule, &mut |z| q.mean(x.a, z, c))
                - pz.expect(p.a_ref, c, rule, &mut |z| q.mean(x.a, z, c))
        });
        Ok(v)
    }
}

impl InfluenceFunction for BackTwoDoor {
    fn tag(&self) -> ModelTag {
        ModelTag::BdTd
    }
    fn required(&self) -> &'static [Slot] {
        &[Slot::PAGivenC, Slot::PZGivenAC, Slot::MYZC]
    }
    fn m(&self, x: &Observation, ev: &Evaluator) -> Result<f64> {
        let (pa, pz, q) = (ev.p_a_c()?, ev.p_z_ac()?, ev.m_zc()?);
        let rule = &ev.eta().z_rule;
        let p = ev.pair();
        let sup = &ev.eta().a_support;
        let c = x.c;
        let mix = wsum(sup.iter().map(|&b| (pa.prob(b, c), pz.density(x.z, b, c))));
        let ratio = (pz.density(x.z, p.a_star, c) - pz.density(x.z, p.a_ref, c))
            / ev.dens_den(mix, &|| format!("Σ_a p(z={}|a,c={c})p(a|c)", x.z))?;
        let qz = q.mean(N, x.z, c);
        let mut v = (x.y - qz) * ratio;
        if x.a == p.a_star || x.a == p.a_ref {
            let inner = ev.memo(BDTD_INNER, x.a, c, || pz.expect(x.a, c, rule, &mut |z| q.mean(N, z, c)));
            let den = ev.prob_den(pa.prob(x.a, c), &|| format!("p(a={}|c={c})", x.a))?;
            v += (qz - inner) * indicator(x, &p) / den;
        }
        v += ev.memo(BDTD_SHIFT, N, c, || {
            pz.expect(p.a_star, c, rule, &mut |z| q.mean(N, z, c))
                - pz.expect(p.a_ref, c, rule, &mut |z| q.mean(N, z, c))
        });
        Ok(v)
    }
}

/// `Σ_c p(c) p(a|c)`: the treatment marginal implied by `p(C)` and `p(A|C)`.
fn implied_pa(ev: &Evaluator, a: f64) -> Result<f64> {
    let (pc, pa) = (ev.p_c()?, ev.p_a_c()?);
    Ok(ev.memo(MARG_A, a, N, || wsum(pc.support().iter().map(|&c| (pc.prob(c), pa.prob(a, c))))))
}

impl InfluenceFunction for FrontTwoDoor {
    fn tag(&self) -> ModelTag {
        ModelTag::FdTd
    }
    fn required(&self) -> &'static [Slot] {
        &[Slot::PC, Slot::PAGivenC, Slot::PZGivenA, Slot::MYAZC]
    }
    fn m(&self, x: &Observation, ev: &Evaluator) -> Result<f64> {
        let (pc, pa, pz, q) = (ev.p_c()?, ev.p_a_c()?, ev.p_z_a()?, ev.m_azc()?);
        let rule = &ev.eta().z_rule;
        let p = ev.pair();
        let sup = &ev.eta().a_support;
        let cs = pc.support();
        let ratio = (pz.density(x.z, p.a_star, N) - pz.density(x.z, p.a_ref, N))
            / ev.dens_den(pz.density(x.z, x.a, N), &|| format!("p(z={}|a={})", x.z, x.a))?;
        let mut v = (x.y - q.mean(x.a, x.z, x.c)) * ratio;
        if x.a == p.a_star || x.a == p.a_ref {
            let here = wsum(cs.iter().map(|&c| {
                (pc.prob(c), wsum(sup.iter().map(|&b| (pa.prob(b, c), q.mean(b, x.z, c)))))
            }));
            let inner = ev.memo(FDTD_INNER, x.a, N, || {
                wsum(cs.iter().map(|&c| {
                    (
                        pc.prob(c),
                        wsum(sup.iter().map(|&b| {
                            (pa.prob(b, c), pz.expect(x.a, N, rule, &mut |z| q.mean(b, z, c)))
                        })),
                    )
                }))
            });
            let den = ev.prob_den(implied_pa(ev, x.a)?, &|| format!("Σ_c p(c)p(a={}|c)", x.a))?;
            v += (here - inner) * indicator(x, &p) / den;
        }
        v += ev.memo(FDTD_SHIFT, x.a, x.c, || {
            pz.expect(p.a_star, N, rule, &mut |z| q.mean(x.a, z, x.c))
                - pz.expect(p.a_ref, N, rule, &mut |z| q.mean(x.a, z, x.c))
        });
        Ok(v)
    }
}

impl InfluenceFunction for BackFrontTwoDoor {
    fn tag(&self) -> ModelTag {
        ModelTag::BdFdTd
    }
    fn required(&self) -> &'static [Slot] {
        &[Slot::PC, Slot::PAGivenC, Slot::PZGivenA, Slot::MYZC]
    }
    fn m(&self, x: &Observation, ev: &Evaluator) -> Result<f64> {
        let (pc, pa, pz, q) = (ev.p_c()?, ev.p_a_c()?, ev.p_z_a()?, ev.m_zc()?);
        let rule = &ev.eta().z_rule;
        let p = ev.pair();
        let sup = &ev.eta().a_support;
        let cs = pc.support();
        let mix = wsum(sup.iter().map(|&b| (pa.prob(b, x.c), pz.density(x.z, b, N))));
        let ratio = (pz.density(x.z, p.a_star, N) - pz.density(x.z, p.a_ref, N))
            / ev.dens_den(mix, &|| format!("Σ_a p(a|c={})p(z={}|a)", x.c, x.z))?;
        let mut v = (x.y - q.mean(N, x.z, x.c)) * ratio;
        if x.a == p.a_star || x.a == p.a_ref {
            let here = wsum(cs.iter().map(|&c| (pc.prob(c), q.mean(N, x.z, c))));
            let inner = ev.memo(BFT_INNER, x.a, N, || {
                wsum(cs.iter().map(|&c| (pc.prob(c), pz.expect(x.a, N, rule, &mut |z| q.mean(N, z, c)))))
            });
            let den = ev.prob_den(implied_pa(ev, x.a)?, &|| format!("Σ_c p(c)p(a={}|c)", x.a))?;
            v += (here - inner) * indicator(x, &p) / den;
        }
        v += ev.memo(BFT_SHIFT, N, x.c, || {
            pz.expect(p.a_star, N, rule, &mut |z| q.mean(N, z, x.c))
                - pz.expect(p.a_ref, N, rule, &mut |z| q.mean(N, z, x.c))
        });
        Ok(v)
    }
}

static BD: BackDoor = BackDoor;
static FD: FrontDoor = FrontDoor;
static TD: TwoDoor = TwoDoor;
static BD_TD: BackTwoDoor = BackTwoDoor;
static FD_TD: FrontTwoDoor = FrontTwoDoor;
static BD_FD_TD: BackFrontTwoDoor = BackFrontTwoDoor;

/// Built-in influence function for a tag.
pub fn influence(tag: ModelTag) -> &'static dyn InfluenceFunction {
    match tag {
        ModelTag::Bd => &BD,
        ModelTag::Fd => &FD,
        ModelTag::Td => &TD,
        ModelTag::BdTd => &BD_TD,
        ModelTag::FdTd => &FD_TD,
        ModelTag::BdFdTd => &BD_FD_TD,
    }
}

/// Name-keyed collection of influence functions.
#[derive(Clone, Default)]
pub struct EifRegistry {
    entries: BTreeMap<String, Arc<dyn InfluenceFunction>>,
}

struct Builtin(ModelTag);

impl InfluenceFunction for Builtin {
    fn tag(&self) -> ModelTag {
        self.0
    }
    fn required(&self) -> &'static [Slot] {
        influence(self.0).required()
    }
    fn m(&self, x: &Observation, ev: &Evaluator) -> Result<f64> {
        influence(self.0).m(x, ev)
    }
}

impl EifRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn standard() -> Self {
        let mut r = Self::new();
        for t in ModelTag::ALL {
            r.register(t.as_str(), Arc::new(Builtin(t)));
        }
        r
    }

    pub fn register(&mut self, name: &str, f: Arc<dyn InfluenceFunction>) {
        self.entries.insert(name.to_ascii_uppercase(), f);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn InfluenceFunction>> {
        self.entries
            .get(&name.trim().to_ascii_uppercase())
            .cloned()
            .ok_or_else(|| Error::InvalidSpec(format!("no influence function named `{name}`")))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

fn strict(tag: ModelTag, x: &Observation, eta: &NuisanceSet, pair: &TreatmentPair) -> Result<f64> {
    Evaluator::new(eta, *pair, Positivity::Strict).m(tag, x)
}

pub fn m_bd(x: &Observation, eta: &NuisanceSet, pair: &TreatmentPair) -> Result<f64> {
    strict(ModelTag::Bd, x, eta, pair)
}
pub fn m_fd(x: &Observation, eta: &NuisanceSet, pair: &TreatmentPair) -> Result<f64> {
    strict(ModelTag::Fd, x, eta, pair)
}
pub fn m_td(x: &Observation, eta: &NuisanceSet, pair: &TreatmentPair) -> Result<f64> {
    strict(ModelTag::Td, x, eta, pair)
}
pub fn m_bd_td(x: &Observation, eta: &NuisanceSet, pair: &TreatmentPair) -> Result<f64> {
    strict(ModelTag::BdTd, x, eta, pair)
}
pub fn m_fd_td(x: &Observation, eta: &NuisanceSet, pair: &TreatmentPair) -> Result<f64> {
    strict(ModelTag::FdTd, x, eta, pair)
}
pub fn m_bd_fd_td(x: &Observation, eta: &NuisanceSet, pair: &TreatmentPair) -> Result<f64> {
    strict(ModelTag::BdFdTd, x, eta, pair)
}
