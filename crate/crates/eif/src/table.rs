//! Finite lookup-table components, used both for the true nuisances of a
//! [`DiscreteJoint`] and for empirical-frequency fits.

use std::collections::HashMap;
use std::sync::Arc;

use twodoor_core::{ksum, DiscreteJoint, GaussHermite};

use crate::nuisance::{
    Manifest, ManifestEntry, MassModel, MediatorModel, NuisanceSet, OutcomeModel, Slot,
    TreatmentModel,
};

/// Hash key for a real value: `-0.0` and `0.0` coincide; masked-out values map to 0.
#[inline]
pub fn key(x: f64, used: bool) -> u64 {
    if !used || x == 0.0 {
        0
    } else {
        x.to_bits()
    }
}

#[derive(Debug, Clone)]
pub struct TableMass {
    support: Vec<f64>,
    probs: Vec<f64>,
}

impl TableMass {
    pub fn new(support: Vec<f64>, probs: Vec<f64>) -> Self {
        assert_eq!(support.len(), probs.len());
        Self { support, probs }
    }
}

impl MassModel for TableMass {
    fn support(&self) -> &[f64] {
        &self.support
    }
    fn prob(&self, v: f64) -> f64 {
        self.support
            .iter()
            .position(|s| *s == v)
            .map(|i| self.probs[i])
            .unwrap_or(0.0)
    }
}

/// `p(a|c)` stored per covariate cell; when `use_c` is false a single cell.
#[derive(Debug, Clone)]
pub struct TableTreatment {
    use_c: bool,
    cells: HashMap<u64, Vec<(f64, f64)>>,
}

impl TableTreatment {
    pub fn new(use_c: bool) -> Self {
        Self {
            use_c,
            cells: HashMap::new(),
        }
    }

    pub fn insert(&mut self, c: f64, dist: Vec<(f64, f64)>) {
        self.cells.insert(key(c, self.use_c), dist);
    }
}

impl TreatmentModel for TableTreatment {
    fn prob(&self, a: f64, c: f64) -> f64 {
        match self.cells.get(&key(c, self.use_c)) {
            Some(d) => d.iter().find(|(v, _)| *v == a).map(|(_, p)| *p).unwrap_or(0.0),
            None => f64::NAN,
        }
    }
}

/// Finite-support mediator law per `(a, c)` cell.
#[derive(Debug, Clone)]
pub struct TableMediator {
    use_a: bool,
    use_c: bool,
    cells: HashMap<(u64, u64), Vec<(f64, f64)>>,
}

impl TableMediator {
    pub fn new(use_a: bool, use_c: bool) -> Self {
        Self {
            use_a,
            use_c,
            cells: HashMap::new(),
        }
    }

    pub fn insert(&mut self, a: f64, c: f64, dist: Vec<(f64, f64)>) {
        self.cells.insert((key(a, self.use_a), key(c, self.use_c)), dist);
    }

    fn cell(&self, a: f64, c: f64) -> Option<&Vec<(f64, f64)>> {
        self.cells.get(&(key(a, self.use_a), key(c, self.use_c)))
    }
}

impl MediatorModel for TableMediator {
    fn density(&self, z: f64, a: f64, c: f64) -> f64 {
        match self.cell(a, c) {
            Some(d) => d.iter().find(|(v, _)| *v == z).map(|(_, p)| *p).unwrap_or(0.0),
            None => f64::NAN,
        }
    }

    fn expect(&self, a: f64, c: f64, _rule: &GaussHermite, f: &mut dyn FnMut(f64) -> f64) -> f64 {
        match self.cell(a, c) {
            Some(d) => ksum(d.iter().filter(|(_, p)| *p > 0.0).map(|(z, p)| p * f(*z))),
            None => f64::NAN,
        }
    }
}

/// Cell means of `Y` keyed on the used subset of `(a, z, c)`.
#[derive(Debug, Clone)]
pub struct TableOutcome {
    used: [bool; 3],
    cells: HashMap<[u64; 3], f64>,
}

impl TableOutcome {
    pub fn new(used: [bool; 3]) -> Self {
        Self {
            used,
            cells: HashMap::new(),
        }
    }

    fn k(&self, a: f64, z: f64, c: f64) -> [u64; 3] {
        [key(a, self.used[0]), key(z, self.used[1]), key(c, self.used[2])]
    }

    pub fn insert(&mut self, a: f64, z: f64, c: f64, mean: f64) {
        let k = self.k(a, z, c);
        self.cells.insert(k, mean);
    }
}

impl OutcomeModel for TableOutcome {
    fn mean(&self, a: f64, z: f64, c: f64) -> f64 {
        self.cells.get(&self.k(a, z, c)).copied().unwrap_or(f64::NAN)
    }
}

fn entry(slot: Slot) -> ManifestEntry {
    let names = ["A", "Z", "C"];
    ManifestEntry {
        slot: slot.to_string(),
        family: "truth".into(),
        predictors: slot
            .arguments()
            .iter()
            .zip(names)
            .filter(|(u, _)| **u)
            .map(|(_, n)| n.to_string())
            .collect(),
        directive: "none".into(),
    }
}

impl NuisanceSet {
    /// Every component set to the corresponding functional of `dist`.
    /// Conditioning cells of probability zero are left undefined.
    pub fn from_dist(dist: &DiscreteJoint) -> NuisanceSet {
        let m = dist.cell_moments();
        let (cs, as_, zs) = (dist.c_support(), dist.a_support(), dist.z_support());
        let (nc, na, nz) = (m.nc, m.na, m.nz);
        let mass = |c: usize, a: usize, z: usize| m.mass[m.idx(c, a, z)];
        let sy = |c: usize, a: usize, z: usize| {
            let i = m.idx(c, a, z);
            m.mass[i] * m.mean[i]
        };
        let sum = |f: &dyn Fn(usize, usize, usize) -> f64, cr: &[usize], ar: &[usize], zr: &[usize]| {
            let mut v = Vec::new();
            for &c in cr {
                for &a in ar {
                    for &z in zr {
                        v.push(f(c, a, z));
                    }
                }
            }
            ksum(v)
        };
        let all_c: Vec<usize> = (0..nc).collect();
        let all_a: Vec<usize> = (0..na).collect();
        let all_z: Vec<usize> = (0..nz).collect();

        let pc: Vec<f64> = (0..nc).map(|c| sum(&mass, &[c], &all_a, &all_z)).collect();
        let pa: Vec<f64> = (0..na).map(|a| sum(&mass, &all_c, &[a], &all_z)).collect();

        let mut pa_c = TableTreatment::new(true);
        let mut pz_ac = TableMediator::new(true, true);
        let mut m_ac = TableOutcome::new([true, false, true]);
        let mut m_azc = TableOutcome::new([true, true, true]);
        for c in 0..nc {
            if pc[c] <= 0.0 {
                continue;
            }
            let pac: Vec<f64> = (0..na).map(|a| sum(&mass, &[c], &[a], &all_z)).collect();
            pa_c.insert(cs[c], (0..na).map(|a| (as_[a], pac[a] / pc[c])).collect());
            for a in 0..na {
                if pac[a] <= 0.0 {
                    continue;
                }
                pz_ac.insert(as_[a], cs[c], (0..nz).map(|z| (zs[z], mass(c, a, z) / pac[a])).collect());
                m_ac.insert(as_[a], f64::NAN, cs[c], sum(&sy, &[c], &[a], &all_z) / pac[a]);
                for z in 0..nz {
                    if mass(c, a, z) > 0.0 {
                        m_azc.insert(as_[a], zs[z], cs[c], m.mean[m.idx(c, a, z)]);
                    }
                }
            }
        }
        let mut pz_a = TableMediator::new(true, false);
        let mut m_az = TableOutcome::new([true, true, false]);
        for a in 0..na {
            if pa[a] <= 0.0 {
                continue;
            }
            pz_a.insert(
                as_[a],
                f64::NAN,
                (0..nz).map(|z| (zs[z], sum(&mass, &all_c, &[a], &[z]) / pa[a])).collect(),
            );
            for z in 0..nz {
                let p = sum(&mass, &all_c, &[a], &[z]);
                if p > 0.0 {
                    m_az.insert(as_[a], zs[z], f64::NAN, sum(&sy, &all_c, &[a], &[z]) / p);
                }
            }
        }
        let mut m_zc = TableOutcome::new([false, true, true]);
        for c in 0..nc {
            for z in 0..nz {
                let p = sum(&mass, &[c], &all_a, &[z]);
                if p > 0.0 {
                    m_zc.insert(f64::NAN, zs[z], cs[c], sum(&sy, &[c], &all_a, &[z]) / p);
                }
            }
        }

        let mut set = NuisanceSet::empty(as_.to_vec());
        set.p_c = Some(Arc::new(TableMass::new(cs.to_vec(), pc)));
        set.p_a = Some(Arc::new(TableMass::new(as_.to_vec(), pa)));
        set.p_a_given_c = Some(Arc::new(pa_c));
        set.p_z_given_a = Some(Arc::new(pz_a));
        set.p_z_given_ac = Some(Arc::new(pz_ac));
        set.m_ac = Some(Arc::new(m_ac));
        set.m_az = Some(Arc::new(m_az));
        set.m_zc = Some(Arc::new(m_zc));
        set.m_azc = Some(Arc::new(m_azc));
        set.manifest = Manifest {
            entries: Slot::ALL.into_iter().map(entry).collect(),
            fold: None,
        };
        set
    }
}
