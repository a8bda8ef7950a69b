use twodoor_bounds::FactorLaw;
use twodoor_core::{ksum, DiscreteJoint, Error, Result, TreatmentPair, POSITIVITY_EPS};

use crate::verdict::{CellValue, ComparisonVerdict, Ordering};

/// Tolerance for the numerical conditional-independence checks.
pub const CI_TOL: f64 = 1e-10;

/// Fails unless `p(y | a, z, c)` does not depend on `a` wherever defined.
pub fn check_outcome_ci(dist: &DiscreteJoint) -> Result<()> {
    let (nc, na, nz, ny) = (
        dist.c_support().len(),
        dist.a_support().len(),
        dist.z_support().len(),
        dist.y_support().len(),
    );
    for c in 0..nc {
        for z in 0..nz {
            let cell = |a: usize| -> Vec<f64> { (0..ny).map(|y| dist.p(c, a, z, y)).collect() };
            let tot: f64 = (0..na).map(|a| ksum(cell(a))).sum();
            if tot <= 0.0 {
                continue;
            }
            let pooled: Vec<f64> =
                (0..ny).map(|y| ksum((0..na).map(|a| dist.p(c, a, z, y))) / tot).collect();
            for a in 0..na {
                let row = cell(a);
                let m = ksum(row.iter().copied());
                if m <= POSITIVITY_EPS {
                    continue;
                }
                if let Some(y) = (0..ny).find(|&y| (row[y] / m - pooled[y]).abs() > CI_TOL) {
                    return Err(Error::AssumptionViolation(format!(
                        "Y depends on A given (z#{z}, c#{c}): p(y#{y}|a#{a},z,c) = {} vs {}",
                        row[y] / m,
                        pooled[y]
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Covariate values kept by [`FactorLaw::from_dist`], in law order.
fn kept_c(dist: &DiscreteJoint) -> Vec<f64> {
    let pc = dist.marginal(&[twodoor_core::Var::C]);
    dist.c_support().iter().copied().filter(|c| pc.get(&[*c]) > 0.0).collect()
}

/// The per-`(z, c)` bracket
/// `(p(z|a*,c) − p(z|a,c))² Σ_ā p(ā|c)/p(z|ā,c) − p(z|a*,c)/p(a*|c) − p(z|a,c)/p(a|c)`,
/// or `None` when some `p(z|ā,c)` is zero.
fn bracket(law: &FactorLaw, c: usize, z: usize) -> Result<Option<f64>> {
    let (s, r) = (law.star, law.refr);
    if (0..law.na).any(|a| law.pz_ac[law.i3(c, a, z)] <= POSITIVITY_EPS) {
        return Ok(None);
    }
    let ps = law.pac[law.ca(c, s)];
    let pr = law.pac[law.ca(c, r)];
    if ps <= POSITIVITY_EPS || pr <= POSITIVITY_EPS {
        return Err(Error::positivity(format!("p(a|c#{c})"), ps.min(pr)));
    }
    let (zs, zr) = (law.pz_ac[law.i3(c, s, z)], law.pz_ac[law.i3(c, r, z)]);
    let inv = ksum((0..law.na).map(|a| law.pac[law.ca(c, a)] / law.pz_ac[law.i3(c, a, z)]));
    Ok(Some((zs - zr).powi(2) * inv - zs / ps - zr / pr))
}

/// `var φ_td − var φ_bd` by its closed form, valid when `Y ⫫ A | Z, C`.
pub fn diff_td_minus_bd(dist: &DiscreteJoint, pair: &TreatmentPair) -> Result<f64> {
    check_outcome_ci(dist)?;
    let law = FactorLaw::from_dist(dist, pair)?;
    let mut terms = Vec::with_capacity(law.nc * law.nz);
    for c in 0..law.nc {
        for z in 0..law.nz {
            let v = law.v_zc[law.cz(c, z)];
            match bracket(&law, c, z)? {
                Some(b) => terms.push(law.pc[c] * v * b),
                None if law.mix_zc[law.cz(c, z)] > 0.0 && v > 0.0 => {
                    return Err(Error::positivity(format!("p(z#{z}|a,c#{c}) for some a"), 0.0));
                }
                None => {}
            }
        }
    }
    Ok(ksum(terms))
}

fn verdict(condition: &str, values: Vec<CellValue>, greater: bool) -> ComparisonVerdict {
    let everywhere = !values.is_empty() && values.iter().all(|v| v.value > 0.0);
    let nowhere = values.iter().all(|v| v.value <= 0.0);
    let ordering = match (everywhere, nowhere) {
        (true, _) => Ordering::Greater,
        (_, true) if !greater => Ordering::AtMost,
        _ => Ordering::Inconclusive,
    };
    ComparisonVerdict {
        condition: condition.into(),
        holds_everywhere: everywhere,
        holds_nowhere: nowhere,
        values,
        ordering,
    }
}

fn bracket_values(dist: &DiscreteJoint, law: &FactorLaw) -> Result<Vec<CellValue>> {
    let cs = kept_c(dist);
    let zs = dist.z_support();
    let mut out = Vec::new();
    for c in 0..law.nc {
        for z in 0..law.nz {
            if let Some(b) = bracket(law, c, z)? {
                out.push(CellValue { label: format!("z={},c={}", zs[z], cs[c]), value: b });
            }
        }
    }
    Ok(out)
}

/// Sign of the two-door/back-door bracket over the support: all positive
/// gives `>`, all non-positive gives `≤`.
pub fn prop2_verdict(dist: &DiscreteJoint, pair: &TreatmentPair) -> Result<ComparisonVerdict> {
    check_outcome_ci(dist)?;
    let law = FactorLaw::from_dist(dist, pair)?;
    let values = bracket_values(dist, &law)?;
    Ok(verdict("td-vs-bd bracket > 0", values, false))
}

/// `I_{td≤bd}` for a binary treatment with `p(a*|c) = p_star`.
pub fn binary_interval(p_star: f64) -> Result<(f64, f64)> {
    if !(p_star > 0.0 && p_star < 1.0) {
        return Err(Error::DomainError(format!("p* = {p_star} outside (0, 1)")));
    }
    let u = p_star * (1.0 - p_star);
    let s = (4.0 * u + 1.0).sqrt();
    let high = (2.0 * u + 1.0 + s) / (2.0 * u);
    // rationalised form of (2u + 1 − s)/(2u)
    let low = 2.0 * u / (2.0 * u + 1.0 + s);
    Ok((low, high))
}

/// Front-door versus back-door: for each treatment level of the pair
/// `1/p(a) − Σ_c p(c)/p(a|c) > 0`, and the two-door/back-door bracket positive
/// everywhere; together they give `var φ_fd > var φ_bd`.
///
/// `gamma` holds the coefficients of `E(Y|Z,C) = γ0 + γ1 Z + γ2 C`, which is
/// checked against the joint together with `Z ⫫ C | A`.
pub fn prop6_verdict(
    dist: &DiscreteJoint,
    pair: &TreatmentPair,
    gamma: [f64; 3],
) -> Result<ComparisonVerdict> {
    check_outcome_ci(dist)?;
    let law = FactorLaw::from_dist(dist, pair)?;
    let cs = kept_c(dist);
    let zs = dist.z_support();
    for c in 0..law.nc {
        for z in 0..law.nz {
            let i = law.cz(c, z);
            if law.mix_zc[i] <= POSITIVITY_EPS {
                continue;
            }
            let lin = gamma[0] + gamma[1] * zs[z] + gamma[2] * cs[c];
            if (law.e_zc[i] - lin).abs() > 1e-9 * (1.0 + lin.abs()) {
                return Err(Error::AssumptionViolation(format!(
                    "E(Y|z={},c={}) = {} is not γ0 + γ1 z + γ2 c = {lin}",
                    zs[z], cs[c], law.e_zc[i]
                )));
            }
        }
    }
    for a in 0..law.na {
        for z in 0..law.nz {
            let p0 = law.pz_a[law.az(a, z)];
            for c in 0..law.nc {
                if law.pac[law.ca(c, a)] > POSITIVITY_EPS && (law.pz_ac[law.i3(c, a, z)] - p0).abs() > CI_TOL {
                    return Err(Error::AssumptionViolation(format!("Z depends on C given a#{a}")));
                }
            }
        }
    }
    let mut values = Vec::new();
    for (name, a) in [("a*", law.star), ("a", law.refr)] {
        let pa = law.pa[a];
        let mut terms = Vec::with_capacity(law.nc);
        for c in 0..law.nc {
            let p = law.pac[law.ca(c, a)];
            if p <= POSITIVITY_EPS {
                return Err(Error::positivity(format!("p({name}|c={})", cs[c]), p));
            }
            terms.push(law.pc[c] / p);
        }
        values.push(CellValue { label: format!("1/p({name}) - sum_c p(c)/p({name}|c)"), value: 1.0 / pa - ksum(terms) });
    }
    values.extend(bracket_values(dist, &law)?);
    Ok(verdict("fd-vs-bd conditions > 0", values, true))
}
