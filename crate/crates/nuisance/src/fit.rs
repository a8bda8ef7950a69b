use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use twodoor_core::{ksum, Dataset, Error, Observation, Result, Var};
use twodoor_eif::{
    key, ManifestEntry, MassModel, MediatorModel, NuisanceSet, OutcomeModel, Slot, TableMass,
    TableMediator, TableOutcome, TableTreatment, TreatmentModel,
};

use crate::models::{gaussian_density_fit, LinearOutcome, LogisticTreatment};
use crate::spec::{var_name, Directive, Family, ModelSpec};

/// Sample-splitting plan. `folds == 0` disables cross-fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CrossFitPlan {
    pub folds: usize,
    pub seed: u64,
}

impl CrossFitPlan {
    pub fn disabled() -> Self {
        Self::default()
    }

    pub fn new(folds: usize, seed: u64) -> Result<Self> {
        if folds < 2 {
            return Err(Error::InvalidSpec(format!("cross-fitting needs at least 2 folds, got {folds}")));
        }
        Ok(Self { folds, seed })
    }

    pub fn enabled(&self) -> bool {
        self.folds >= 2
    }

    /// Fold label of every row: a seeded shuffle dealt round-robin.
    pub fn assign(&self, n: usize) -> Result<Vec<usize>> {
        if self.folds > n {
            return Err(Error::InvalidSpec(format!("{} folds for {n} rows", self.folds)));
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha20Rng::seed_from_u64(self.seed));
        let mut label = vec![0; n];
        for (k, i) in perm.into_iter().enumerate() {
            label[i] = k % self.folds;
        }
        Ok(label)
    }
}

#[derive(Debug, Clone)]
pub struct Fold {
    /// Rows evaluated with this fold's nuisances (fitted on all other rows).
    pub eval: Vec<usize>,
    pub eta: NuisanceSet,
}

#[derive(Debug, Clone)]
pub enum Fitted {
    Single(NuisanceSet),
    CrossFit(Vec<Fold>),
}

impl Fitted {
    /// Nuisances to use for row `i`.
    pub fn for_row(&self, i: usize) -> Option<&NuisanceSet> {
        match self {
            Fitted::Single(e) => Some(e),
            Fitted::CrossFit(folds) => folds.iter().find(|f| f.eval.binary_search(&i).is_ok()).map(|f| &f.eta),
        }
    }
}

/// Fits every spec, on the full data or per fold.
pub fn fit(data: &Dataset, specs: &[ModelSpec], plan: &CrossFitPlan) -> Result<Fitted> {
    if !plan.enabled() {
        return fit_set(data, specs).map(Fitted::Single);
    }
    let label = plan.assign(data.len())?;
    let mut folds = Vec::with_capacity(plan.folds);
    for k in 0..plan.folds {
        let (eval, train): (Vec<usize>, Vec<usize>) = (0..data.len()).partition(|&i| label[i] == k);
        let train = Dataset::new(data.subset(&train).rows().to_vec(), data.pair())?;
        let mut eta = fit_set(&train, specs)?;
        eta.manifest.fold = Some(k);
        folds.push(Fold { eval, eta });
    }
    Ok(Fitted::CrossFit(folds))
}

/// Fits every spec on all of `data`.
pub fn fit_set(data: &Dataset, specs: &[ModelSpec]) -> Result<NuisanceSet> {
    let mut eta = NuisanceSet::empty(data.a_support());
    for spec in specs {
        spec.validate()?;
        if eta.has(spec.slot) {
            return Err(Error::InvalidSpec(format!("{} specified twice", spec.slot)));
        }
        fit_one(data, spec, &mut eta)?;
        eta.manifest.entries.push(ManifestEntry {
            slot: spec.slot.to_string(),
            family: spec.family.as_str().into(),
            predictors: spec.effective_predictors().iter().map(|v| var_name(*v).to_string()).collect(),
            directive: spec.directive.to_string(),
        });
    }
    Ok(eta)
}

fn get(o: &Observation, v: Var) -> f64 {
    match v {
        Var::C => o.c,
        Var::A => o.a,
        Var::Z => o.z,
        Var::Y => o.y,
    }
}

fn mass(data: &Dataset, v: Var, directive: Directive) -> Result<Arc<dyn MassModel>> {
    let mut counts: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for o in data.rows() {
        let x = get(o, v);
        counts.entry(key(x, true)).or_insert((x, 0)).1 += 1;
    }
    let mut cells: Vec<(f64, usize)> = counts.into_values().collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = data.len() as f64;
    let support: Vec<f64> = cells.iter().map(|c| c.0).collect();
    let mut probs: Vec<f64> = cells.iter().map(|c| c.1 as f64 / n).collect();
    if let Directive::FixValue(p) = directive {
        let k = probs.len();
        if k < 2 {
            return Err(Error::InvalidSpec(format!(
                "cannot fix p({}) on a single-valued support",
                var_name(v)
            )));
        }
        let rest = 1.0 - probs[k - 1];
        for q in &mut probs[..k - 1] {
            *q *= (1.0 - p) / rest;
        }
        probs[k - 1] = p;
    }
    Ok(Arc::new(TableMass::new(support, probs)))
}

/// Group rows by the key of the used predictors.
fn groups<'a>(data: &'a Dataset, preds: &[Var]) -> BTreeMap<[u64; 3], Vec<&'a Observation>> {
    let mut g: BTreeMap<[u64; 3], Vec<&Observation>> = BTreeMap::new();
    for o in data.rows() {
        let k = [
            key(o.a, preds.contains(&Var::A)),
            key(o.z, preds.contains(&Var::Z)),
            key(o.c, preds.contains(&Var::C)),
        ];
        g.entry(k).or_default().push(o);
    }
    g
}

fn frequencies(rows: &[&Observation], v: Var) -> Vec<(f64, f64)> {
    let mut c: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for o in rows {
        let x = get(o, v);
        c.entry(key(x, true)).or_insert((x, 0)).1 += 1;
    }
    let n = rows.len() as f64;
    c.into_values().map(|(x, k)| (x, k as f64 / n)).collect()
}

fn fit_one(data: &Dataset, spec: &ModelSpec, eta: &mut NuisanceSet) -> Result<()> {
    let preds = spec.effective_predictors();
    let has = |v| preds.contains(&v);
    match spec.slot {
        Slot::PC => eta.p_c = Some(mass(data, Var::C, spec.directive)?),
        Slot::PA => eta.p_a = Some(mass(data, Var::A, spec.directive)?),
        Slot::PAGivenC => {
            let m: Arc<dyn TreatmentModel> = match spec.family {
                Family::Logistic => Arc::new(LogisticTreatment::fit(data, &preds)?),
                _ => {
                    let mut t = TableTreatment::new(has(Var::C));
                    for rows in groups(data, &preds).values() {
                        t.insert(rows[0].c, frequencies(rows, Var::A));
                    }
                    Arc::new(t)
                }
            };
            eta.p_a_given_c = Some(m);
        }
        Slot::PZGivenA | Slot::PZGivenAC => {
            let m: Arc<dyn MediatorModel> = match spec.family {
                Family::GaussianDensity => Arc::new(gaussian_density_fit(data, &preds)?),
                _ => {
                    let mut t = TableMediator::new(has(Var::A), has(Var::C));
                    for rows in groups(data, &preds).values() {
                        t.insert(rows[0].a, rows[0].c, frequencies(rows, Var::Z));
                    }
                    Arc::new(t)
                }
            };
            if spec.slot == Slot::PZGivenA {
                eta.p_z_given_a = Some(m);
            } else {
                eta.p_z_given_ac = Some(m);
            }
        }
        Slot::MYAC | Slot::MYAZ | Slot::MYZC | Slot::MYAZC => {
            let m: Arc<dyn OutcomeModel> = match spec.family {
                Family::LinearMean => Arc::new(LinearOutcome::fit(data, &preds)?),
                _ => {
                    let mut t = TableOutcome::new([has(Var::A), has(Var::Z), has(Var::C)]);
                    for rows in groups(data, &preds).values() {
                        let mean = ksum(rows.iter().map(|o| o.y)) / rows.len() as f64;
                        t.insert(rows[0].a, rows[0].z, rows[0].c, mean);
                    }
                    Arc::new(t)
                }
            };
            match spec.slot {
                Slot::MYAC => eta.m_ac = Some(m),
                Slot::MYAZ => eta.m_az = Some(m),
                Slot::MYZC => eta.m_zc = Some(m),
                _ => eta.m_azc = Some(m),
            }
        }
    }
    Ok(())
}
