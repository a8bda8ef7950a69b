//! Bounds for the Gaussian-mediator simulation design
//! `C ~ Bern(pc)`, `A|C ~ Bern(expit(αC))`, `Z|A ~ N(βA, σz²)`,
//! `Y|Z,C ~ N(γ1 Z + γ2 C, σy²)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use twodoor_core::{expit, Error, GaussHermite, ModelTag, Result, TreatmentPair};

use crate::law::FactorLaw;
use crate::props;
use crate::report::{BoundReport, Method};

/// Smallest Gauss-Hermite order accepted for the combined bounds.
pub const MIN_NODES: usize = 64;
const STABILITY_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimDgpParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub sigma_z: f64,
    pub sigma_y: f64,
    pub pc: f64,
}

impl Default for SimDgpParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.5,
            gamma1: 0.5,
            gamma2: 0.5,
            sigma_z: 1.0,
            sigma_y: 1.0,
            pc: 0.5,
        }
    }
}

impl SimDgpParams {
    pub fn new(beta: f64, gamma1: f64, gamma2: f64) -> Self {
        Self {
            beta,
            gamma1,
            gamma2,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.beta, self.gamma1, self.gamma2, self.sigma_z, self.sigma_y, self.pc];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::DomainError("parameters must be finite".into()));
        }
        if self.sigma_z <= 0.0 || self.sigma_y <= 0.0 {
            return Err(Error::DomainError("σz and σy must be positive".into()));
        }
        if self.pc <= 0.0 || self.pc >= 1.0 {
            return Err(Error::DomainError(format!("pc = {} outside (0, 1)", self.pc)));
        }
        Ok(())
    }

    /// `θ = γ1 β (a* − a)`.
    pub fn theta(&self, pair: &TreatmentPair) -> f64 {
        self.gamma1 * self.beta * (pair.a_star - pair.a_ref)
    }

    /// Marginal `p(A = 1)`.
    pub fn p_treated(&self) -> f64 {
        (1.0 - self.pc) * 0.5 + self.pc * expit(self.alpha)
    }

    fn is_standard(&self) -> bool {
        self.pc == 0.5 && self.sigma_z == 1.0 && self.sigma_y == 1.0
    }

    /// Sets one parameter by name (ASCII or Greek spelling).
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key.trim() {
            "alpha" | "α" | "a" => &mut self.alpha,
            "beta" | "β" | "b" => &mut self.beta,
            "gamma1" | "γ1" | "g1" => &mut self.gamma1,
            "gamma2" | "γ2" | "g2" => &mut self.gamma2,
            "sigma_z" | "σz" => &mut self.sigma_z,
            "sigma_y" | "σy" => &mut self.sigma_y,
            "pc" => &mut self.pc,
            other => return Err(Error::InvalidSpec(format!("unknown parameter `{other}`"))),
        };
        *slot = value;
        Ok(())
    }

    /// The factorised law on a Gauss-Hermite grid of `nodes` points.
    pub fn law(&self, pair: &TreatmentPair, nodes: usize) -> Result<FactorLaw> {
        self.validate()?;
        pair.check_support(&[0.0, 1.0])?;
        let rule = GaussHermite::new(nodes)?;
        let centre = self.beta * (pair.a_star + pair.a_ref) / 2.0;
        let (z, w): (Vec<f64>, Vec<f64>) = rule.line_rule(centre, self.sigma_z).into_iter().unzip();
        let nz = z.len();
        let pc = vec![1.0 - self.pc, self.pc];
        let mut pac = Vec::with_capacity(4);
        for c in [0.0, 1.0] {
            let e = expit(self.alpha * c);
            pac.extend([1.0 - e, e]);
        }
        let norm = 1.0 / (self.sigma_z * (2.0 * std::f64::consts::PI).sqrt());
        let mut pz_ac = Vec::with_capacity(4 * nz);
        let mut m = Vec::with_capacity(4 * nz);
        for c in [0.0, 1.0] {
            for a in [0.0, 1.0] {
                for &zz in &z {
                    let u = (zz - self.beta * a) / self.sigma_z;
                    pz_ac.push(norm * (-0.5 * u * u).exp());
                    m.push(self.gamma1 * zz + self.gamma2 * c);
                }
            }
        }
        let v = vec![self.sigma_y * self.sigma_y; 4 * nz];
        let star = pair.a_star as usize;
        let refr = pair.a_ref as usize;
        let mut law = FactorLaw::from_factors(z, w, pc, pac, pz_ac, m, v, star, refr, 0.0);
        law.theta = Some(self.theta(pair));
        Ok(law)
    }
}

impl fmt::Display for SimDgpParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha={},beta={},gamma1={},gamma2={}",
            self.alpha, self.beta, self.gamma1, self.gamma2
        )?;
        if !self.is_standard() {
            write!(f, ",sigma_z={},sigma_y={},pc={}", self.sigma_z, self.sigma_y, self.pc)?;
        }
        Ok(())
    }
}

impl FromStr for SimDgpParams {
    type Err = Error;
    /// Parses `key=value` pairs separated by commas, e.g. `β=0.5,γ1=0.5,γ2=1.5,α=1`.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = SimDgpParams::default();
        for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidSpec(format!("expected key=value, got `{part}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("`{v}` is not a number")))?;
            p.set(k, v)?;
        }
        p.validate()?;
        Ok(p)
    }
}

fn closed_form_guard(params: &SimDgpParams, pair: &TreatmentPair) -> Result<()> {
    params.validate()?;
    if !params.is_standard() {
        return Err(Error::DomainError(
            "closed forms assume pc = 0.5 and unit error variances".into(),
        ));
    }
    pair.check_support(&[0.0, 1.0])
}

/// `(1 + γ1²)(2 + 0.5/e + 0.5/(1 − e))` with `e = expit(α)`.
pub fn simdgp_bound_bd(params: &SimDgpParams, pair: &TreatmentPair) -> Result<f64> {
    closed_form_guard(params, pair)?;
    let e = expit(params.alpha);
    Ok((1.0 + params.gamma1.powi(2)) * (2.0 + 0.5 / e + 0.5 / (1.0 - e)))
}

/// `var φ_bd + (e^{β²} − 1) − (2 + 1/(2e) + 1/(2(1 − e)))`.
pub fn simdgp_bound_td(params: &SimDgpParams, pair: &TreatmentPair) -> Result<f64> {
    let bd = simdgp_bound_bd(params, pair)?;
    let e = expit(params.alpha);
    Ok(bd + (params.beta.powi(2).exp() - 1.0) - (2.0 + 0.5 / e + 0.5 / (1.0 - e)))
}

/// Front-door closed form.
pub fn simdgp_bound_fd(params: &SimDgpParams, pair: &TreatmentPair) -> Result<f64> {
    closed_form_guard(params, pair)?;
    let e = expit(params.alpha);
    let (g1, g2) = (params.gamma1, params.gamma2);
    let f = 1.0 - e;
    let spread = params.beta.powi(2).exp() - 1.0;
    Ok(spread
        * (1.0 + g2 * g2 / 2.0 - g2 * g2 * f * f / (1.0 + 2.0 * f) - g2 * g2 * e * e / (1.0 + 2.0 * e))
        + g1 * g1 * (1.0 / (0.25 + 0.5 * e) + 1.0 / (0.25 + 0.5 * f)))
}

/// Any bound on the design by Gauss-Hermite quadrature of order `nodes`.
pub fn simdgp_bound_quadrature(
    params: &SimDgpParams,
    pair: &TreatmentPair,
    tag: ModelTag,
    nodes: usize,
) -> Result<f64> {
    let law = params.law(pair, nodes)?;
    props::evaluate(&law, tag)
}

/// Quadrature bound of order `nodes ≥ 64`, rejected when doubling the order
/// moves it by more than `1e-4`.
pub fn simdgp_bound_combo(
    params: &SimDgpParams,
    pair: &TreatmentPair,
    tag: ModelTag,
    nodes: usize,
) -> Result<f64> {
    if nodes < MIN_NODES {
        return Err(Error::DomainError(format!(
            "quadrature order {nodes} below the minimum {MIN_NODES}"
        )));
    }
    let v = simdgp_bound_quadrature(params, pair, tag, nodes)?;
    let v2 = simdgp_bound_quadrature(params, pair, tag, 2 * nodes)?;
    if (v - v2).abs() > STABILITY_TOL || !v.is_finite() {
        return Err(Error::QuadratureNonConvergence(format!(
            "{tag}: {v} at {nodes} nodes, {v2} at {}",
            2 * nodes
        )));
    }
    Ok(v)
}

/// Closed form where one exists and applies, quadrature otherwise.
pub fn simdgp_bound(
    params: &SimDgpParams,
    pair: &TreatmentPair,
    tag: ModelTag,
    nodes: usize,
) -> Result<BoundReport> {
    let closed = match tag {
        ModelTag::Bd => Some(simdgp_bound_bd as fn(&SimDgpParams, &TreatmentPair) -> Result<f64>),
        ModelTag::Td => Some(simdgp_bound_td as _),
        ModelTag::Fd => Some(simdgp_bound_fd as _),
        _ => None,
    };
    match closed {
        Some(f) if params.is_standard() => BoundReport::new(tag, f(params, pair)?, Method::ClosedForm, pair),
        _ => BoundReport::new(
            tag,
            simdgp_bound_combo(params, pair, tag, nodes)?,
            Method::Quadrature,
            pair,
        ),
    }
}
