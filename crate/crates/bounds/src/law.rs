use twodoor_core::{ksum, DiscreteJoint, Error, Result, TreatmentPair, POSITIVITY_EPS};

/// Factorised law of `(C, A, Z, Y)` with every derived conditional the bound
/// formulas need. Arrays are indexed `[c][a][z]` (flattened) in support order;
/// `w[z]` is the weight turning `Σ_z` into a sum or a quadrature.
#[derive(Debug, Clone)]
pub struct FactorLaw {
    pub nc: usize,
    pub na: usize,
    pub nz: usize,
    pub z: Vec<f64>,
    pub w: Vec<f64>,
    pub pc: Vec<f64>,
    /// `p(a|c)`, `[c][a]`.
    pub pac: Vec<f64>,
    /// `p(z|a,c)`, `[c][a][z]`.
    pub pz_ac: Vec<f64>,
    /// `E(Y|a,z,c)`, `[c][a][z]`.
    pub m: Vec<f64>,
    /// `var(Y|a,z,c)`, `[c][a][z]`.
    pub v: Vec<f64>,
    pub pa: Vec<f64>,
    /// `p(z|a)`, `[a][z]`.
    pub pz_a: Vec<f64>,
    /// `E(Y|a,z)` and `var(Y|a,z)`, `[a][z]`.
    pub e_az: Vec<f64>,
    pub v_az: Vec<f64>,
    /// `E(Y|a,c)` and `var(Y|a,c)`, `[c][a]`.
    pub e_ac: Vec<f64>,
    pub v_ac: Vec<f64>,
    /// `E(Y|z,c)` and `var(Y|z,c)`, `[c][z]`.
    pub e_zc: Vec<f64>,
    pub v_zc: Vec<f64>,
    /// `Σ_a p(a|c) p(z|a,c)`, `[c][z]`.
    pub mix_zc: Vec<f64>,
    pub star: usize,
    pub refr: usize,
    /// Denominators at or below this raise a positivity error.
    pub floor: f64,
    /// Effect used to centre the bounds, when known in closed form.
    pub theta: Option<f64>,
}

impl FactorLaw {
    #[inline]
    pub fn i3(&self, c: usize, a: usize, z: usize) -> usize {
        (c * self.na + a) * self.nz + z
    }
    #[inline]
    pub fn ca(&self, c: usize, a: usize) -> usize {
        c * self.na + a
    }
    #[inline]
    pub fn az(&self, a: usize, z: usize) -> usize {
        a * self.nz + z
    }
    #[inline]
    pub fn cz(&self, c: usize, z: usize) -> usize {
        c * self.nz + z
    }

    /// Guarded division.
    pub fn div(&self, num: f64, den: f64, what: &dyn Fn() -> String) -> Result<f64> {
        if !(den > self.floor) || !den.is_finite() {
            return Err(Error::positivity(what(), den));
        }
        Ok(num / den)
    }

    /// Builds the law from its raw factors and fills in the derived tables.
    #[allow(clippy::too_many_arguments)]
    pub fn from_factors(
        z: Vec<f64>,
        w: Vec<f64>,
        pc: Vec<f64>,
        pac: Vec<f64>,
        pz_ac: Vec<f64>,
        m: Vec<f64>,
        v: Vec<f64>,
        star: usize,
        refr: usize,
        floor: f64,
    ) -> Self {
        let (nc, nz) = (pc.len(), z.len());
        let na = pac.len() / nc;
        let mut law = FactorLaw {
            nc,
            na,
            nz,
            z,
            w,
            pc,
            pac,
            pz_ac,
            m,
            v,
            pa: vec![0.0; na],
            pz_a: vec![0.0; na * nz],
            e_az: vec![0.0; na * nz],
            v_az: vec![0.0; na * nz],
            e_ac: vec![0.0; nc * na],
            v_ac: vec![0.0; nc * na],
            e_zc: vec![0.0; nc * nz],
            v_zc: vec![0.0; nc * nz],
            mix_zc: vec![0.0; nc * nz],
            star,
            refr,
            floor,
            theta: None,
        };
        law.derive();
        law
    }

    fn derive(&mut self) {
        let (nc, na, nz) = (self.nc, self.na, self.nz);
        for a in 0..na {
            self.pa[a] = ksum((0..nc).map(|c| self.pc[c] * self.pac[self.ca(c, a)]));
        }
        for a in 0..na {
            for z in 0..nz {
                // joint weights p(c) p(a|c) p(z|a,c) over c
                let wts: Vec<f64> = (0..nc)
                    .map(|c| self.pc[c] * self.pac[self.ca(c, a)] * self.pz_ac[self.i3(c, a, z)])
                    .collect();
                let tot = ksum(wts.iter().copied());
                let i = self.az(a, z);
                self.pz_a[i] = if self.pa[a] > 0.0 { tot / self.pa[a] } else { 0.0 };
                if tot > 0.0 {
                    let e = ksum((0..nc).map(|c| wts[c] * self.m[self.i3(c, a, z)])) / tot;
                    let s2 = ksum((0..nc).map(|c| {
                        let k = self.i3(c, a, z);
                        wts[c] * (self.v[k] + (self.m[k] - e).powi(2))
                    })) / tot;
                    self.e_az[i] = e;
                    self.v_az[i] = s2;
                }
            }
        }
        for c in 0..nc {
            for a in 0..na {
                let wts: Vec<f64> = (0..nz).map(|z| self.w[z] * self.pz_ac[self.i3(c, a, z)]).collect();
                let tot = ksum(wts.iter().copied());
                let i = self.ca(c, a);
                if tot > 0.0 {
                    let e = ksum((0..nz).map(|z| wts[z] * self.m[self.i3(c, a, z)])) / tot;
                    let s2 = ksum((0..nz).map(|z| {
                        let k = self.i3(c, a, z);
                        wts[z] * (self.v[k] + (self.m[k] - e).powi(2))
                    })) / tot;
                    self.e_ac[i] = e;
                    self.v_ac[i] = s2;
                }
            }
            for z in 0..nz {
                let wts: Vec<f64> = (0..na)
                    .map(|a| self.pac[self.ca(c, a)] * self.pz_ac[self.i3(c, a, z)])
                    .collect();
                let tot = ksum(wts.iter().copied());
                let i = self.cz(c, z);
                self.mix_zc[i] = tot;
                if tot > 0.0 {
                    let e = ksum((0..na).map(|a| wts[a] * self.m[self.i3(c, a, z)])) / tot;
                    let s2 = ksum((0..na).map(|a| {
                        let k = self.i3(c, a, z);
                        wts[a] * (self.v[k] + (self.m[k] - e).powi(2))
                    })) / tot;
                    self.e_zc[i] = e;
                    self.v_zc[i] = s2;
                }
            }
        }
    }

    /// Exact law of a discrete joint. Covariate values of zero mass are dropped.
    pub fn from_dist(dist: &DiscreteJoint, pair: &TreatmentPair) -> Result<Self> {
        pair.check_support(dist.a_support())?;
        let cm = dist.cell_moments();
        let (na, nz) = (cm.na, cm.nz);
        let mut pc = Vec::new();
        let mut pac = Vec::new();
        let mut pz_ac = Vec::new();
        let mut m = Vec::new();
        let mut v = Vec::new();
        for c in 0..cm.nc {
            let p = ksum((0..na).flat_map(|a| (0..nz).map(move |z| (a, z))).map(|(a, z)| cm.mass[cm.idx(c, a, z)]));
            if p <= 0.0 {
                continue;
            }
            pc.push(p);
            for a in 0..na {
                let paz = ksum((0..nz).map(|z| cm.mass[cm.idx(c, a, z)]));
                pac.push(paz / p);
                for z in 0..nz {
                    let i = cm.idx(c, a, z);
                    pz_ac.push(if paz > 0.0 { cm.mass[i] / paz } else { 0.0 });
                    m.push(cm.mean[i]);
                    v.push(cm.var[i]);
                }
            }
        }
        let star = dist.a_support().iter().position(|x| *x == pair.a_star).unwrap();
        let refr = dist.a_support().iter().position(|x| *x == pair.a_ref).unwrap();
        Ok(Self::from_factors(
            dist.z_support().to_vec(),
            vec![1.0; nz],
            pc,
            pac,
            pz_ac,
            m,
            v,
            star,
            refr,
            POSITIVITY_EPS,
        ))
    }
}
