//! The six bound formulas, each a direct transcription over a [`FactorLaw`].

use twodoor_core::{ksum, KahanSum, ModelTag, Result};

use crate::law::FactorLaw;

/// Identification functional matching `tag`, evaluated on the law. A closed
/// form stored on the law takes precedence.
pub fn functional(law: &FactorLaw, tag: ModelTag) -> f64 {
    if let Some(t) = law.theta {
        return t;
    }
    let (s, r) = (law.star, law.refr);
    match tag {
        ModelTag::Bd => ksum((0..law.nc).map(|c| law.pc[c] * (law.e_ac[law.ca(c, s)] - law.e_ac[law.ca(c, r)]))),
        ModelTag::Fd => ksum((0..law.nz).map(|z| {
            let k = ksum((0..law.na).map(|a| law.e_az[law.az(a, z)] * law.pa[a]));
            law.w[z] * (law.pz_a[law.az(s, z)] - law.pz_a[law.az(r, z)]) * k
        })),
        _ => ksum((0..law.nc).flat_map(|c| (0..law.nz).map(move |z| (c, z))).map(|(c, z)| {
            let k = ksum((0..law.na).map(|a| law.m[law.i3(c, a, z)] * law.pac[law.ca(c, a)]));
            law.w[z] * (law.pz_ac[law.i3(c, s, z)] - law.pz_ac[law.i3(c, r, z)]) * k * law.pc[c]
        })),
    }
}

pub(crate) fn evaluate(law: &FactorLaw, tag: ModelTag) -> Result<f64> {
    match tag {
        ModelTag::Bd => var_bd(law),
        ModelTag::Fd => var_fd(law),
        ModelTag::Td => var_td(law),
        ModelTag::BdTd => var_bd_td(law),
        ModelTag::FdTd => var_fd_td(law),
        ModelTag::BdFdTd => var_bd_fd_td(law),
    }
}

/// `E[var(Y|a*,C)/p(a*|C) + var(Y|a,C)/p(a|C)] + E(E(Y|a*,C) − E(Y|a,C) − θ)²`.
pub fn var_bd(law: &FactorLaw) -> Result<f64> {
    let theta = functional(law, ModelTag::Bd);
    let (s, r) = (law.star, law.refr);
    let mut acc = KahanSum::new();
    for c in 0..law.nc {
        let (is, ir) = (law.ca(c, s), law.ca(c, r));
        let t = law.div(law.v_ac[is], law.pac[is], &|| format!("p(a*|c#{c})"))?
            + law.div(law.v_ac[ir], law.pac[ir], &|| format!("p(a|c#{c})"))?
            + (law.e_ac[is] - law.e_ac[ir] - theta).powi(2);
        acc.add(law.pc[c] * t);
    }
    Ok(acc.value())
}

/// Two-door bound.
pub fn var_td(law: &FactorLaw) -> Result<f64> {
    let theta = functional(law, ModelTag::Td);
    let (s, r) = (law.star, law.refr);
    let mut t1 = KahanSum::new();
    let mut t2 = KahanSum::new();
    let mut t3 = KahanSum::new();
    let mut t4 = KahanSum::new();
    for c in 0..law.nc {
        let pc = law.pc[c];
        let (ps, pr) = (law.pac[law.ca(c, s)], law.pac[law.ca(c, r)]);
        let inv_s = law.div(1.0, ps, &|| format!("p(a*|c#{c})"))?;
        let inv_r = law.div(1.0, pr, &|| format!("p(a|c#{c})"))?;
        let mut k_s = KahanSum::new();
        let mut k_r = KahanSum::new();
        for z in 0..law.nz {
            let w = law.w[z];
            let (zs, zr) = (law.pz_ac[law.i3(c, s, z)], law.pz_ac[law.i3(c, r, z)]);
            let d = zs - zr;
            let mut inner = KahanSum::new();
            let mut k = KahanSum::new();
            for a in 0..law.na {
                let i = law.i3(c, a, z);
                let pa = law.pac[law.ca(c, a)];
                inner.add(law.div(pc * pa * law.v[i], law.pz_ac[i], &|| format!("p(z#{z}|a#{a},c#{c})"))?);
                k.add(law.m[i] * pa);
            }
            let k = k.value();
            t1.add(w * d * d * inner.value());
            t2.add(w * k * k * pc * (zs * inv_s + zr * inv_r));
            k_s.add(w * k * zs);
            k_r.add(w * k * zr);
        }
        t3.add(pc * (k_s.value().powi(2) * inv_s + k_r.value().powi(2) * inv_r));
        for a in 0..law.na {
            let sh = ksum((0..law.nz).map(|z| {
                law.w[z] * law.m[law.i3(c, a, z)] * (law.pz_ac[law.i3(c, s, z)] - law.pz_ac[law.i3(c, r, z)])
            }));
            t4.add(pc * law.pac[law.ca(c, a)] * sh * sh);
        }
    }
    Ok(t1.value() + t2.value() - t3.value() + t4.value() - theta * theta)
}

/// Two-door bound plus the correction from `Y ⫫ A | Z, C`.
pub fn var_bd_td(law: &FactorLaw) -> Result<f64> {
    let base = var_td(law)?;
    let (s, r) = (law.star, law.refr);
    let mut corr = KahanSum::new();
    for c in 0..law.nc {
        for z in 0..law.nz {
            let d = law.pz_ac[law.i3(c, s, z)] - law.pz_ac[law.i3(c, r, z)];
            let i = law.cz(c, z);
            let mut inv = KahanSum::new();
            for a in 0..law.na {
                let k = law.i3(c, a, z);
                inv.add(law.div(law.pac[law.ca(c, a)], law.pz_ac[k], &|| format!("p(z#{z}|a#{a},c#{c})"))?);
            }
            let mix = law.div(1.0, law.mix_zc[i], &|| format!("Σ_a p(z#{z}|a,c#{c})p(a|c#{c})"))?;
            corr.add(law.w[z] * d * d * law.pc[c] * law.v_zc[i] * (mix - inv.value()));
        }
    }
    Ok(base + corr.value())
}

/// Shared tail of the front-door-type bounds: the `K(z)` terms and `− θ²`.
fn front_tail(law: &FactorLaw, k: &[f64], theta: f64) -> Result<f64> {
    let (s, r) = (law.star, law.refr);
    let inv_s = law.div(1.0, law.pa[s], &|| "p(a*)".into())?;
    let inv_r = law.div(1.0, law.pa[r], &|| "p(a)".into())?;
    let mut t2 = KahanSum::new();
    let mut ks = KahanSum::new();
    let mut kr = KahanSum::new();
    for z in 0..law.nz {
        let (zs, zr) = (law.pz_a[law.az(s, z)], law.pz_a[law.az(r, z)]);
        t2.add(law.w[z] * k[z] * k[z] * (zs * inv_s + zr * inv_r));
        ks.add(law.w[z] * k[z] * zs);
        kr.add(law.w[z] * k[z] * zr);
    }
    Ok(t2.value() - ks.value().powi(2) * inv_s - kr.value().powi(2) * inv_r - theta * theta)
}

fn delta_a(law: &FactorLaw, z: usize) -> f64 {
    law.pz_a[law.az(law.star, z)] - law.pz_a[law.az(law.refr, z)]
}

/// Front-door bound.
pub fn var_fd(law: &FactorLaw) -> Result<f64> {
    let theta = functional(law, ModelTag::Fd);
    let mut t1 = KahanSum::new();
    let mut k = vec![0.0; law.nz];
    for z in 0..law.nz {
        let d = delta_a(law, z);
        let mut inner = KahanSum::new();
        for a in 0..law.na {
            let i = law.az(a, z);
            inner.add(law.div(law.pa[a] * law.v_az[i], law.pz_a[i], &|| format!("p(z#{z}|a#{a})"))?);
        }
        t1.add(law.w[z] * d * d * inner.value());
        k[z] = ksum((0..law.na).map(|a| law.e_az[law.az(a, z)] * law.pa[a]));
    }
    let mut t4 = KahanSum::new();
    for a in 0..law.na {
        let sh = ksum((0..law.nz).map(|z| law.w[z] * law.e_az[law.az(a, z)] * delta_a(law, z)));
        t4.add(law.pa[a] * sh * sh);
    }
    Ok(t1.value() + t4.value() + front_tail(law, &k, theta)?)
}

/// Front-door plus two-door bound (mediator independent of `C` given `A`).
pub fn var_fd_td(law: &FactorLaw) -> Result<f64> {
    let theta = functional(law, ModelTag::FdTd);
    let mut t1 = KahanSum::new();
    let mut k = vec![0.0; law.nz];
    for z in 0..law.nz {
        let d = delta_a(law, z);
        let mut inner = KahanSum::new();
        let mut kz = KahanSum::new();
        for c in 0..law.nc {
            for a in 0..law.na {
                let i = law.i3(c, a, z);
                let pac = law.pc[c] * law.pac[law.ca(c, a)];
                inner.add(law.div(pac * law.v[i], law.pz_a[law.az(a, z)], &|| format!("p(z#{z}|a#{a})"))?);
                kz.add(law.m[i] * pac);
            }
        }
        t1.add(law.w[z] * d * d * inner.value());
        k[z] = kz.value();
    }
    let mut t4 = KahanSum::new();
    for c in 0..law.nc {
        for a in 0..law.na {
            let sh = ksum((0..law.nz).map(|z| law.w[z] * law.m[law.i3(c, a, z)] * delta_a(law, z)));
            t4.add(law.pc[c] * law.pac[law.ca(c, a)] * sh * sh);
        }
    }
    Ok(t1.value() + t4.value() + front_tail(law, &k, theta)?)
}

/// Bound when back-door, front-door and two-door all hold.
pub fn var_bd_fd_td(law: &FactorLaw) -> Result<f64> {
    let theta = functional(law, ModelTag::BdFdTd);
    let mut t1 = KahanSum::new();
    let mut k = vec![0.0; law.nz];
    for z in 0..law.nz {
        let d = delta_a(law, z);
        let mut inner = KahanSum::new();
        for c in 0..law.nc {
            let mix = ksum((0..law.na).map(|a| law.pac[law.ca(c, a)] * law.pz_a[law.az(a, z)]));
            inner.add(law.div(law.pc[c] * law.v_zc[law.cz(c, z)], mix, &|| format!("Σ_a p(a|c#{c})p(z#{z}|a)"))?);
        }
        t1.add(law.w[z] * d * d * inner.value());
        k[z] = ksum((0..law.nc).map(|c| law.pc[c] * law.e_zc[law.cz(c, z)]));
    }
    let mut t4 = KahanSum::new();
    for c in 0..law.nc {
        let sh = ksum((0..law.nz).map(|z| law.w[z] * law.e_zc[law.cz(c, z)] * delta_a(law, z)));
        t4.add(law.pc[c] * sh * sh);
    }
    Ok(t1.value() + t4.value() + front_tail(law, &k, theta)?)
}
