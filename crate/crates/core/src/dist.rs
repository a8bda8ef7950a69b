//! Exact probability tables over finite supports of `(C, A, Z, Y)`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, KahanSum, Result, POSITIVITY_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    C,
    A,
    Z,
    Y,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::C, Var::A, Var::Z, Var::Y];

    fn axis(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreatmentPair {
    pub a_star: f64,
    pub a_ref: f64,
}

impl TreatmentPair {
    pub fn new(a_star: f64, a_ref: f64) -> Result<Self> {
        if !a_star.is_finite() || !a_ref.is_finite() {
            return Err(Error::DomainError("treatment levels must be finite".into()));
        }
        if a_star == a_ref {
            return Err(Error::DomainError(format!(
                "treatment levels coincide ({a_star})"
            )));
        }
        Ok(Self { a_star, a_ref })
    }

    /// Checks that both levels appear in `support`.
    pub fn check_support(&self, support: &[f64]) -> Result<()> {
        for v in [self.a_star, self.a_ref] {
            if !support.contains(&v) {
                return Err(Error::DomainError(format!(
                    "treatment level {v} not in support {support:?}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for TreatmentPair {
    fn default() -> Self {
        Self {
            a_star: 1.0,
            a_ref: 0.0,
        }
    }
}

/// Probability table over a subset of variables, in support order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub vars: Vec<Var>,
    pub cells: Vec<(Vec<f64>, f64)>,
}

impl Table {
    /// Probability of the cell with the given values (0 when absent).
    pub fn get(&self, values: &[f64]) -> f64 {
        self.cells
            .iter()
            .find(|(v, _)| v.as_slice() == values)
            .map(|(_, p)| *p)
            .unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        crate::ksum(self.cells.iter().map(|(_, p)| *p))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJoint {
    supports: [Vec<f64>; 4],
    pmf: Vec<f64>,
}

/// Per-`(c, a, z)` mass with the conditional mean and variance of `Y`.
#[derive(Debug, Clone)]
pub struct CellMoments {
    pub nc: usize,
    pub na: usize,
    pub nz: usize,
    pub mass: Vec<f64>,
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

impl CellMoments {
    #[inline]
    pub fn idx(&self, c: usize, a: usize, z: usize) -> usize {
        (c * self.na + a) * self.nz + z
    }
}

fn check_support(name: &str, s: &[f64]) -> Result<()> {
    if s.is_empty() {
        return Err(Error::InvalidDistribution(format!("{name} support is empty")));
    }
    for (i, x) in s.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::InvalidDistribution(format!("{name} support has non-finite value")));
        }
        if s[..i].contains(x) {
            return Err(Error::InvalidDistribution(format!("{name} support repeats {x}")));
        }
    }
    Ok(())
}

impl DiscreteJoint {
    /// `pmf` is laid out with `y` varying fastest, then `z`, `a`, `c`.
    pub fn new(
        c_support: Vec<f64>,
        a_support: Vec<f64>,
        z_support: Vec<f64>,
        y_support: Vec<f64>,
        pmf: Vec<f64>,
    ) -> Result<Self> {
        for (name, s) in [("c", &c_support), ("a", &a_support), ("z", &z_support), ("y", &y_support)] {
            check_support(name, s)?;
        }
        let len = c_support.len() * a_support.len() * z_support.len() * y_support.len();
        if pmf.len() != len {
            return Err(Error::InvalidDistribution(format!(
                "pmf has {} entries, supports imply {len}",
                pmf.len()
            )));
        }
        if let Some(p) = pmf.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("negative or non-finite mass {p}")));
        }
        let total = crate::ksum(pmf.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
        }
        Ok(Self {
            supports: [c_support, a_support, z_support, y_support],
            pmf,
        })
    }

    /// Builds a joint by evaluating `f(c, a, z, y)` on the product of supports.
    pub fn from_fn<F: FnMut(f64, f64, f64, f64) -> f64>(
        c_support: Vec<f64>,
        a_support: Vec<f64>,
        z_support: Vec<f64>,
        y_support: Vec<f64>,
        mut f: F,
    ) -> Result<Self> {
        let mut pmf = Vec::with_capacity(
            c_support.len() * a_support.len() * z_support.len() * y_support.len(),
        );
        for &c in &c_support {
            for &a in &a_support {
                for &z in &z_support {
                    for &y in &y_support {
                        pmf.push(f(c, a, z, y));
                    }
                }
            }
        }
        Self::new(c_support, a_support, z_support, y_support, pmf)
    }

    /// Builds a joint from its factorisation `p(c) p(a|c) p(z|a,c) p(y|a,z,c)`,
    /// each factor given as a function of support indices.
    pub fn from_factors(
        supports: [Vec<f64>; 4],
        pc: impl Fn(usize) -> f64,
        pa_c: impl Fn(usize, usize) -> f64,
        pz_ac: impl Fn(usize, usize, usize) -> f64,
        py_azc: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let [cs, as_, zs, ys] = supports;
        let mut pmf = Vec::with_capacity(cs.len() * as_.len() * zs.len() * ys.len());
        for c in 0..cs.len() {
            for a in 0..as_.len() {
                for z in 0..zs.len() {
                    for y in 0..ys.len() {
                        pmf.push(pc(c) * pa_c(c, a) * pz_ac(c, a, z) * py_azc(c, a, z, y));
                    }
                }
            }
        }
        Self::new(cs, as_, zs, ys, pmf)
    }

    /// Binary chain `C ~ Bern(expit(b0))`, `A|C ~ Bern(expit(alpha C))`,
    /// `Z|A ~ Bern(expit(beta A))`, `Y|Z,C ~ Bern(expit(g1 Z + g2 C))`.
    pub fn logistic_chain(b0: f64, alpha: f64, beta: f64, g1: f64, g2: f64) -> Result<Self> {
        let bern = |p: f64, x: f64| if x == 1.0 { p } else { 1.0 - p };
        let s = vec![0.0, 1.0];
        Self::from_fn(s.clone(), s.clone(), s.clone(), s, |c, a, z, y| {
            bern(crate::expit(b0), c)
                * bern(crate::expit(alpha * c), a)
                * bern(crate::expit(beta * a), z)
                * bern(crate::expit(g1 * z + g2 * c), y)
        })
    }

    /// Builds a joint from `(c, a, z, y, p)` records; unlisted cells get zero mass.
    pub fn from_records(records: &[[f64; 5]]) -> Result<Self> {
        let mut supports: [Vec<f64>; 4] = Default::default();
        for r in records {
            for k in 0..4 {
                if !r[k].is_finite() {
                    return Err(Error::InvalidDistribution("non-finite support value".into()));
                }
                if !supports[k].contains(&r[k]) {
                    supports[k].push(r[k]);
                }
            }
        }
        for s in supports.iter_mut() {
            s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        let dims: Vec<usize> = supports.iter().map(|s| s.len()).collect();
        let mut pmf = vec![0.0; dims.iter().product()];
        let mut seen = vec![false; pmf.len()];
        for r in records {
            let mut idx = 0;
            for k in 0..4 {
                let pos = supports[k].iter().position(|v| *v == r[k]).unwrap();
                idx = idx * dims[k] + pos;
            }
            if seen[idx] {
                return Err(Error::InvalidDistribution(format!(
                    "duplicate cell ({}, {}, {}, {})",
                    r[0], r[1], r[2], r[3]
                )));
            }
            seen[idx] = true;
            pmf[idx] = r[4];
        }
        let [c, a, z, y] = supports;
        Self::new(c, a, z, y, pmf)
    }

    /// Parses the `c,a,z,y,p` text format.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
        let names: Vec<_> = headers.iter().collect();
        if names != ["c", "a", "z", "y", "p"] {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header c,a,z,y,p, found {}", names.join(",")),
            });
        }
        let mut records = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::Parse { line, msg: e.to_string() })?;
            let mut r = [0.0; 5];
            for (k, field) in rec.iter().enumerate() {
                r[k] = field.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("cannot parse `{field}` as a number"),
                })?;
            }
            records.push(r);
        }
        Self::from_records(&records)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        wtr.write_record(["c", "a", "z", "y", "p"]).map_err(io)?;
        for (ci, &c) in self.c_support().iter().enumerate() {
            for (ai, &a) in self.a_support().iter().enumerate() {
                for (zi, &z) in self.z_support().iter().enumerate() {
                    for (yi, &y) in self.y_support().iter().enumerate() {
                        let p = self.p(ci, ai, zi, yi);
                        wtr.write_record([c, a, z, y, p].map(|x| format!("{x:?}"))).map_err(io)?;
                    }
                }
            }
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn support(&self, v: Var) -> &[f64] {
        &self.supports[v.axis()]
    }
    pub fn c_support(&self) -> &[f64] {
        &self.supports[0]
    }
    pub fn a_support(&self) -> &[f64] {
        &self.supports[1]
    }
    pub fn z_support(&self) -> &[f64] {
        &self.supports[2]
    }
    pub fn y_support(&self) -> &[f64] {
        &self.supports[3]
    }
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    fn dims(&self) -> [usize; 4] {
        [
            self.supports[0].len(),
            self.supports[1].len(),
            self.supports[2].len(),
            self.supports[3].len(),
        ]
    }

    #[inline]
    pub fn p(&self, c: usize, a: usize, z: usize, y: usize) -> f64 {
        let [_, na, nz, ny] = self.dims();
        self.pmf[((c * na + a) * nz + z) * ny + y]
    }

    pub fn index_of(&self, v: Var, value: f64) -> Option<usize> {
        self.supports[v.axis()].iter().position(|x| *x == value)
    }

    /// Iterates `([c, a, z, y], p)` over every cell.
    pub fn cells(&self) -> impl Iterator<Item = ([f64; 4], f64)> + '_ {
        let [_, na, nz, ny] = self.dims();
        self.pmf.iter().enumerate().map(move |(i, &p)| {
            let y = i % ny;
            let z = (i / ny) % nz;
            let a = (i / (ny * nz)) % na;
            let c = i / (ny * nz * na);
            (
                [
                    self.supports[0][c],
                    self.supports[1][a],
                    self.supports[2][z],
                    self.supports[3][y],
                ],
                p,
            )
        })
    }

    /// Sums the pmf over every variable not in `vars`.
    pub fn marginal(&self, vars: &[Var]) -> Table {
        let mut acc: BTreeMap<Vec<usize>, KahanSum> = BTreeMap::new();
        let [_, na, nz, ny] = self.dims();
        for (i, &p) in self.pmf.iter().enumerate() {
            let pos = [i / (ny * nz * na), (i / (ny * nz)) % na, (i / ny) % nz, i % ny];
            let key: Vec<usize> = vars.iter().map(|v| pos[v.axis()]).collect();
            acc.entry(key).or_default().add(p);
        }
        Table {
            vars: vars.to_vec(),
            cells: acc
                .into_iter()
                .map(|(k, s)| {
                    let vals = k
                        .iter()
                        .zip(vars)
                        .map(|(i, v)| self.supports[v.axis()][*i])
                        .collect();
                    (vals, s.value())
                })
                .collect(),
        }
    }

    fn event_prob(&self, given: &[(Var, f64)]) -> Result<f64> {
        let mut sum = KahanSum::new();
        for (vals, p) in self.cells() {
            if given.iter().all(|(v, x)| vals[v.axis()] == *x) {
                sum.add(p);
            }
        }
        Ok(sum.value())
    }

    fn check_given(&self, given: &[(Var, f64)]) -> Result<f64> {
        for (i, (v, _)) in given.iter().enumerate() {
            if given[..i].iter().any(|(w, _)| w == v) {
                return Err(Error::DomainError(format!("{v:?} conditioned on twice")));
            }
        }
        let pg = self.event_prob(given)?;
        if pg <= 0.0 {
            return Err(Error::ZeroConditioningEvent(format!("{given:?}")));
        }
        Ok(pg)
    }

    /// `p(target | given)` as a table over `target`.
    pub fn conditional(&self, target: &[Var], given: &[(Var, f64)]) -> Result<Table> {
        if target.iter().any(|t| given.iter().any(|(g, _)| g == t)) {
            return Err(Error::DomainError("target and conditioning sets overlap".into()));
        }
        let pg = self.check_given(given)?;
        let mut acc: BTreeMap<Vec<usize>, KahanSum> = BTreeMap::new();
        let [_, na, nz, ny] = self.dims();
        for (i, &p) in self.pmf.iter().enumerate() {
            let pos = [i / (ny * nz * na), (i / (ny * nz)) % na, (i / ny) % nz, i % ny];
            if given
                .iter()
                .all(|(v, x)| self.supports[v.axis()][pos[v.axis()]] == *x)
            {
                let key: Vec<usize> = target.iter().map(|v| pos[v.axis()]).collect();
                acc.entry(key).or_default().add(p);
            }
        }
        Ok(Table {
            vars: target.to_vec(),
            cells: acc
                .into_iter()
                .map(|(k, s)| {
                    let vals = k
                        .iter()
                        .zip(target)
                        .map(|(i, v)| self.supports[v.axis()][*i])
                        .collect();
                    (vals, s.value() / pg)
                })
                .collect(),
        })
    }

    /// Mean and variance of `Y` given an assignment.
    pub fn cond_mean_var(&self, given: &[(Var, f64)]) -> Result<(f64, f64)> {
        if given.iter().any(|(v, _)| *v == Var::Y) {
            return Err(Error::DomainError("cannot condition Y on itself".into()));
        }
        let t = self.conditional(&[Var::Y], given)?;
        let mean = crate::ksum(t.cells.iter().map(|(v, p)| v[0] * p));
        let m2 = crate::ksum(t.cells.iter().map(|(v, p)| (v[0] - mean).powi(2) * p));
        Ok((mean, m2))
    }

    /// Mass and conditional moments of `Y` for every `(c, a, z)` cell.
    /// Cells with zero mass get mean and variance 0.
    pub fn cell_moments(&self) -> CellMoments {
        let [nc, na, nz, ny] = self.dims();
        let ys = self.y_support();
        let mut mass = Vec::with_capacity(nc * na * nz);
        let mut mean = Vec::with_capacity(nc * na * nz);
        let mut var = Vec::with_capacity(nc * na * nz);
        for chunk in self.pmf.chunks(ny) {
            let m = crate::ksum(chunk.iter().copied());
            if m > 0.0 {
                let mu = crate::ksum(chunk.iter().zip(ys).map(|(p, y)| p * y)) / m;
                let v = crate::ksum(chunk.iter().zip(ys).map(|(p, y)| p * (y - mu).powi(2))) / m;
                mass.push(m);
                mean.push(mu);
                var.push(v);
            } else {
                mass.push(0.0);
                mean.push(0.0);
                var.push(0.0);
            }
        }
        CellMoments { nc, na, nz, mass, mean, var }
    }

    fn pair_indices(&self, pair: &TreatmentPair) -> Result<(usize, usize)> {
        pair.check_support(self.a_support())?;
        Ok((
            self.index_of(Var::A, pair.a_star).unwrap(),
            self.index_of(Var::A, pair.a_ref).unwrap(),
        ))
    }

    /// `Σ_c p(c) [E(Y|a*,c) − E(Y|a,c)]`.
    pub fn ace_backdoor(&self, pair: &TreatmentPair) -> Result<f64> {
        let (ia, ib) = self.pair_indices(pair)?;
        let m = self.cell_moments();
        let mut out = KahanSum::new();
        for c in 0..m.nc {
            let pc = crate::ksum((0..m.na).flat_map(|a| (0..m.nz).map(move |z| (a, z))).map(|(a, z)| m.mass[m.idx(c, a, z)]));
            if pc <= 0.0 {
                continue;
            }
            let mut diff = 0.0;
            for (ai, sign) in [(ia, 1.0), (ib, -1.0)] {
                let pac = crate::ksum((0..m.nz).map(|z| m.mass[m.idx(c, ai, z)]));
                if pac / pc <= POSITIVITY_EPS {
                    return Err(Error::positivity(
                        format!("p(a={}|c={})", self.a_support()[ai], self.c_support()[c]),
                        pac / pc,
                    ));
                }
                let ey = crate::ksum((0..m.nz).map(|z| {
                    let i = m.idx(c, ai, z);
                    m.mass[i] * m.mean[i]
                })) / pac;
                diff += sign * ey;
            }
            out.add(pc * diff);
        }
        Ok(out.value())
    }

    /// `Σ_z [p(z|a*) − p(z|a)] Σ_ā E(Y|ā,z) p(ā)`.
    pub fn ace_frontdoor(&self, pair: &TreatmentPair) -> Result<f64> {
        let (ia, ib) = self.pair_indices(pair)?;
        let m = self.cell_moments();
        let paz = |a: usize, z: usize| crate::ksum((0..m.nc).map(|c| m.mass[m.idx(c, a, z)]));
        let pa: Vec<f64> = (0..m.na).map(|a| crate::ksum((0..m.nz).map(|z| paz(a, z)))).collect();
        for ai in [ia, ib] {
            if pa[ai] <= POSITIVITY_EPS {
                return Err(Error::positivity(format!("p(a={})", self.a_support()[ai]), pa[ai]));
            }
        }
        let mut out = KahanSum::new();
        for z in 0..m.nz {
            let dz = paz(ia, z) / pa[ia] - paz(ib, z) / pa[ib];
            if dz == 0.0 {
                continue;
            }
            let mut inner = KahanSum::new();
            for a in 0..m.na {
                if pa[a] <= 0.0 {
                    continue;
                }
                let pz = paz(a, z);
                if pz / pa[a] <= POSITIVITY_EPS {
                    return Err(Error::positivity(
                        format!("p(z={}|a={})", self.z_support()[z], self.a_support()[a]),
                        pz / pa[a],
                    ));
                }
                let ey = crate::ksum((0..m.nc).map(|c| {
                    let i = m.idx(c, a, z);
                    m.mass[i] * m.mean[i]
                })) / pz;
                inner.add(ey * pa[a]);
            }
            out.add(dz * inner.value());
        }
        Ok(out.value())
    }

    /// `Σ_{z,c} [p(z|a*,c) − p(z|a,c)] Σ_ā E(Y|ā,z,c) p(ā|c) p(c)`.
    pub fn ace_twodoor(&self, pair: &TreatmentPair) -> Result<f64> {
        let (ia, ib) = self.pair_indices(pair)?;
        let m = self.cell_moments();
        let mut out = KahanSum::new();
        for c in 0..m.nc {
            let pac: Vec<f64> = (0..m.na)
                .map(|a| crate::ksum((0..m.nz).map(|z| m.mass[m.idx(c, a, z)])))
                .collect();
            let pc = crate::ksum(pac.iter().copied());
            if pc <= 0.0 {
                continue;
            }
            for ai in [ia, ib] {
                if pac[ai] / pc <= POSITIVITY_EPS {
                    return Err(Error::positivity(
                        format!("p(a={}|c={})", self.a_support()[ai], self.c_support()[c]),
                        pac[ai] / pc,
                    ));
                }
            }
            for z in 0..m.nz {
                let dz = m.mass[m.idx(c, ia, z)] / pac[ia] - m.mass[m.idx(c, ib, z)] / pac[ib];
                if dz == 0.0 {
                    continue;
                }
                let mut inner = KahanSum::new();
                for a in 0..m.na {
                    if pac[a] <= 0.0 {
                        continue;
                    }
                    let i = m.idx(c, a, z);
                    if m.mass[i] / pac[a] <= POSITIVITY_EPS {
                        return Err(Error::positivity(
                            format!(
                                "p(z={}|a={},c={})",
                                self.z_support()[z],
                                self.a_support()[a],
                                self.c_support()[c]
                            ),
                            m.mass[i] / pac[a],
                        ));
                    }
                    inner.add(m.mean[i] * pac[a] / pc);
                }
                out.add(dz * inner.value() * pc);
            }
        }
        Ok(out.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expit;
    use approx::assert_abs_diff_eq;

    fn bern(p: f64, x: f64) -> f64 {
        if x == 1.0 {
            p
        } else {
            1.0 - p
        }
    }

    /// The binary chain C→A, A→Z, (Z,C)→Y with logistic links.
    fn chain(b0: f64, alpha: f64, beta: f64, g1: f64, g2: f64) -> DiscreteJoint {
        let s = vec![0.0, 1.0];
        DiscreteJoint::from_fn(s.clone(), s.clone(), s.clone(), s, |c, a, z, y| {
            bern(expit(b0), c)
                * bern(expit(alpha * c), a)
                * bern(expit(beta * a), z)
                * bern(expit(g1 * z + g2 * c), y)
        })
        .unwrap()
    }

    fn uniform() -> DiscreteJoint {
        let s = vec![0.0, 1.0];
        DiscreteJoint::from_fn(s.clone(), s.clone(), s.clone(), s, |_, _, _, _| 1.0 / 16.0).unwrap()
    }

    #[test]
    fn uniform_marginal_of_a() {
        let t = uniform().marginal(&[Var::A]);
        assert_eq!(t.cells.len(), 2);
        for (_, p) in &t.cells {
            assert_abs_diff_eq!(*p, 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn full_marginal_is_identity() {
        let d = chain(0.3, 1.0, -0.5, 2.0, 1.0);
        let t = d.marginal(&Var::ALL);
        for ((vals, p), (cell, q)) in t.cells.iter().zip(d.cells()) {
            assert_eq!(vals.as_slice(), cell.as_slice());
            assert_eq!(*p, q);
        }
    }

    #[test]
    fn alpha_zero_gives_balanced_treatment() {
        let d = chain(0.6, 0.0, 1.0, 1.0, 1.0);
        assert_abs_diff_eq!(d.marginal(&[Var::A]).get(&[1.0]), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn treatment_given_covariate_is_expit_alpha() {
        let d = chain(0.1, 1.7, 1.0, 1.0, 1.0);
        let t = d.conditional(&[Var::A], &[(Var::C, 1.0)]).unwrap();
        assert_abs_diff_eq!(t.get(&[1.0]), expit(1.7), epsilon = 1e-14);
        assert_abs_diff_eq!(t.total(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn independence_makes_conditional_equal_marginal() {
        let s = vec![0.0, 1.0];
        let d = DiscreteJoint::from_fn(s.clone(), s.clone(), s.clone(), s, |c, a, _, _| {
            bern(0.3, c) * bern(0.8, a) / 4.0
        })
        .unwrap();
        let pa = d.marginal(&[Var::A]);
        for c in [0.0, 1.0] {
            let t = d.conditional(&[Var::A], &[(Var::C, c)]).unwrap();
            assert_abs_diff_eq!(t.get(&[1.0]), pa.get(&[1.0]), epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_probability_conditioning_event() {
        let d = DiscreteJoint::from_records(&[[0.0, 0.0, 0.0, 0.0, 0.5], [1.0, 1.0, 0.0, 1.0, 0.5]]).unwrap();
        let err = d.conditional(&[Var::Y], &[(Var::C, 0.0), (Var::A, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::ZeroConditioningEvent(_)));
    }

    #[test]
    fn deterministic_outcome_has_zero_variance() {
        let s = vec![0.0, 1.0];
        let d = DiscreteJoint::from_fn(s.clone(), s.clone(), s.clone(), s, |c, _, z, y| {
            let det = if y == z * c { 1.0 } else { 0.0 };
            det / 8.0
        })
        .unwrap();
        for z in [0.0, 1.0] {
            for c in [0.0, 1.0] {
                let (_, v) = d.cond_mean_var(&[(Var::Z, z), (Var::C, c)]).unwrap();
                assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn bernoulli_variance() {
        let d = chain(0.3, 1.0, 1.0, 0.0, 0.0);
        for z in [0.0, 1.0] {
            for c in [0.0, 1.0] {
                let (m, v) = d.cond_mean_var(&[(Var::Z, z), (Var::C, c)]).unwrap();
                assert_abs_diff_eq!(m, 0.5, epsilon = 1e-14);
                assert_abs_diff_eq!(v, 0.25, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn three_functionals_agree_on_chain() {
        let d = chain(0.0, 1.0, 1.0, 1.0, 1.0);
        let pair = TreatmentPair::default();
        let bd = d.ace_backdoor(&pair).unwrap();
        let fd = d.ace_frontdoor(&pair).unwrap();
        let td = d.ace_twodoor(&pair).unwrap();
        assert_abs_diff_eq!(bd, fd, epsilon = 1e-12);
        assert_abs_diff_eq!(bd, td, epsilon = 1e-12);
        // hand computation: (expit(1)-1/2) * Σ_c p(c)(expit(1+c)-expit(c))
        let want = (expit(1.0) - 0.5)
            * (0.5 * (expit(1.0) - expit(0.0)) + 0.5 * (expit(2.0) - expit(1.0)));
        assert_abs_diff_eq!(bd, want, epsilon = 1e-14);
    }

    #[test]
    fn null_effect_and_randomised_treatment() {
        let s = vec![0.0, 1.0];
        // A independent of everything, Y depends on C only
        let d = DiscreteJoint::from_fn(s.clone(), s.clone(), s.clone(), s, |c, a, _z, y| {
            bern(0.4, c) * bern(0.3, a) * 0.5 * bern(expit(c), y)
        })
        .unwrap();
        let pair = TreatmentPair::default();
        assert_abs_diff_eq!(d.ace_backdoor(&pair).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.ace_frontdoor(&pair).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.ace_twodoor(&pair).unwrap(), 0.0, epsilon = 1e-14);
        // randomised A with an effect: back-door equals the raw contrast
        let s = vec![0.0, 1.0];
        let d = DiscreteJoint::from_fn(s.clone(), s.clone(), s.clone(), s, |c, a, z, y| {
            bern(0.4, c) * 0.5 * bern(expit(a - 0.5), z) * bern(expit(z + c), y)
        })
        .unwrap();
        let (m1, _) = d.cond_mean_var(&[(Var::A, 1.0)]).unwrap();
        let (m0, _) = d.cond_mean_var(&[(Var::A, 0.0)]).unwrap();
        assert_abs_diff_eq!(d.ace_backdoor(&pair).unwrap(), m1 - m0, epsilon = 1e-14);
    }

    #[test]
    fn positivity_failure_is_an_error() {
        let s = vec![0.0, 1.0];
        let d = DiscreteJoint::from_fn(s.clone(), s.clone(), s.clone(), s, |c, a, _, _| {
            if c == 1.0 && a == 0.0 {
                0.0
            } else {
                1.0 / 12.0
            }
        })
        .unwrap();
        let pair = TreatmentPair::default();
        assert!(matches!(d.ace_backdoor(&pair), Err(Error::PositivityViolation { .. })));
        assert!(matches!(d.ace_twodoor(&pair), Err(Error::PositivityViolation { .. })));
    }

    #[test]
    fn construction_rejects_bad_tables() {
        let s = vec![0.0, 1.0];
        assert!(DiscreteJoint::new(s.clone(), s.clone(), s.clone(), s.clone(), vec![0.1; 16]).is_err());
        assert!(DiscreteJoint::new(s.clone(), s.clone(), s.clone(), s.clone(), vec![0.0; 15]).is_err());
        assert!(DiscreteJoint::new(vec![0.0, 0.0], s.clone(), s.clone(), s.clone(), vec![1.0 / 16.0; 16]).is_err());
        let mut pmf = vec![1.0 / 16.0; 16];
        pmf[0] = -pmf[0];
        pmf[1] += 2.0 / 16.0;
        assert!(DiscreteJoint::new(s.clone(), s.clone(), s.clone(), s, pmf).is_err());
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let d = chain(0.2, -1.0, 2.0, 0.5, -0.5);
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let back = DiscreteJoint::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, d);

        let bad = "c,a,z,y,p\n0,0,0,0,0.5\n0,1,0,x,0.5\n";
        match DiscreteJoint::read_csv(bad.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let bad = "c,a,y,z,p\n0,0,0,0,1\n";
        assert!(matches!(DiscreteJoint::read_csv(bad.as_bytes()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn treatment_pair_validation() {
        assert!(TreatmentPair::new(1.0, 1.0).is_err());
        let p = TreatmentPair::new(2.0, 0.0).unwrap();
        assert!(p.check_support(&[0.0, 1.0]).is_err());
    }
}
