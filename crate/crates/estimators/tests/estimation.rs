use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use twodoor_core::{expit, Dataset, DiscreteJoint, Error, EstimatorTag, ModelTag, Observation, TreatmentPair};
use twodoor_eif::NuisanceSet;
use twodoor_estimators::*;
use twodoor_nuisance::{fit, fit_set, CrossFitPlan, Fitted, ModelSpec};

fn simulate(n: usize, seed: u64, beta: f64, g1: f64, g2: f64) -> Dataset {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| {
            let c = f64::from(u8::from(rng.random::<f64>() < 0.5));
            let a = f64::from(u8::from(rng.random::<f64>() < expit(c)));
            let e1: f64 = StandardNormal.sample(&mut rng);
            let e2: f64 = StandardNormal.sample(&mut rng);
            let z = beta * a + e1;
            Observation::new(c, a, z, g1 * z + g2 * c + e2)
        })
        .collect();
    Dataset::new(rows, TreatmentPair::default()).unwrap()
}

/// Correct specifications on the simulation design, with the simplified
/// two-door argument lists.
fn sim_specs() -> Vec<ModelSpec> {
    [
        "pC=empirical",
        "pA=empirical",
        "pA_given_C=logistic[C]",
        "pZ_given_A=gaussian[A]",
        "pZ_given_AC=gaussian[A]",
        "mY_ac=linear[A,C]",
        "mY_az=linear[A,Z]",
        "mY_zc=linear[Z,C]",
        "mY_azc=linear[Z,C]",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect()
}

#[test]
fn naive_difference_of_means() {
    let rows = vec![
        Observation::new(0.0, 1.0, 0.0, 1.5),
        Observation::new(0.0, 1.0, 0.0, 2.5),
        Observation::new(1.0, 0.0, 0.0, 0.5),
        Observation::new(1.0, 0.0, 0.0, 1.5),
    ];
    let d = Dataset::new(rows, TreatmentPair::default()).unwrap();
    let r = estimate(&d, &NuisanceSet::empty(vec![0.0, 1.0]), EstimatorTag::Naive).unwrap();
    assert_relative_eq!(r.theta_hat, 1.0);
    assert_relative_eq!(r.se_hat, (0.5f64 / 2.0 + 0.5 / 2.0).sqrt());
}

/// Joint with integer cell counts, and the dataset listing each cell that many times.
fn enumerated(counts: &[u32]) -> (DiscreteJoint, Dataset) {
    let total: u32 = counts.iter().sum();
    let mut records = Vec::new();
    let mut rows = Vec::new();
    let mut i = 0;
    for c in [0.0, 1.0] {
        for a in [0.0, 1.0] {
            for z in [0.0, 1.0] {
                for y in [0.0, 1.0] {
                    records.push([c, a, z, y, f64::from(counts[i]) / f64::from(total)]);
                    rows.extend((0..counts[i]).map(|_| Observation::new(c, a, z, y)));
                    i += 1;
                }
            }
        }
    }
    let d = DiscreteJoint::from_records(&records).unwrap();
    (d, Dataset::new(rows, TreatmentPair::default()).unwrap())
}

#[test]
fn truth_on_enumerated_support_gives_functionals() {
    let (dist, data) = enumerated(&[3, 1, 2, 2, 1, 4, 2, 3, 5, 1, 1, 2, 2, 2, 3, 1]);
    let eta = NuisanceSet::from_dist(&dist);
    let pair = TreatmentPair::default();
    let bd = estimate(&data, &eta, EstimatorTag::Model(ModelTag::Bd)).unwrap();
    assert!((bd.theta_hat - dist.ace_backdoor(&pair).unwrap()).abs() < 1e-12);
    let fd = estimate(&data, &eta, EstimatorTag::Model(ModelTag::Fd)).unwrap();
    assert!((fd.theta_hat - dist.ace_frontdoor(&pair).unwrap()).abs() < 1e-12);
    let td = estimate(&data, &eta, EstimatorTag::Model(ModelTag::Td)).unwrap();
    assert!((td.theta_hat - dist.ace_twodoor(&pair).unwrap()).abs() < 1e-12);
    assert_eq!(bd.n, data.len());
    assert_eq!(bd.clipped, 0);
}

#[test]
fn empirical_fit_on_enumerated_support_gives_functionals() {
    let (dist, data) = enumerated(&[2, 1, 1, 3, 1, 2, 2, 1, 4, 1, 2, 2, 1, 3, 1, 2]);
    let specs: Vec<ModelSpec> = ["pA_given_C=empirical[C]", "mY_ac=empirical[A,C]"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let eta = fit_set(&data, &specs).unwrap();
    let r = estimate(&data, &eta, EstimatorTag::Model(ModelTag::Bd)).unwrap();
    assert!((r.theta_hat - dist.ace_backdoor(&TreatmentPair::default()).unwrap()).abs() < 1e-12);
}

#[test]
fn backdoor_unbiased_with_correct_models() {
    let (beta, g1, g2) = (1.5, 1.5, 1.5);
    let d = simulate(50_000, 2024, beta, g1, g2);
    let eta = fit_set(&d, &sim_specs()).unwrap();
    let r = estimate(&d, &eta, EstimatorTag::Model(ModelTag::Bd)).unwrap();
    assert!((r.theta_hat - g1 * beta).abs() < 4.0 * r.se_hat, "{r:?}");
}

#[test]
fn all_model_estimators_agree() {
    let d = simulate(20_000, 77, 0.5, 0.5, 0.5);
    let eta = Fitted::Single(fit_set(&d, &sim_specs()).unwrap());
    let res: Vec<_> = estimate_all(&d, &eta, &EstimatorTag::ALL[1..])
        .into_iter()
        .map(Result::unwrap)
        .collect();
    for a in &res {
        for b in &res {
            let tol = 4.0 * a.se_hat.max(b.se_hat);
            assert!((a.theta_hat - b.theta_hat).abs() < tol, "{} vs {}", a.tag, b.tag);
        }
    }
    assert!(estimate_all(&d, &eta, &[]).is_empty());
}

#[test]
fn general_two_door_path_also_fits() {
    let d = simulate(20_000, 5, 1.5, 0.5, 1.5);
    let eta = fit_set(&d, &ModelSpec::default_set()).unwrap();
    let r = estimate(&d, &eta, EstimatorTag::Model(ModelTag::Td)).unwrap();
    assert!((r.theta_hat - 0.75).abs() < 4.0 * r.se_hat, "{r:?}");
}

#[test]
fn crossfit_close_to_single_fit() {
    let d = simulate(5_000, 9, 0.5, 0.5, 0.5);
    let single = Fitted::Single(fit_set(&d, &sim_specs()).unwrap());
    let cf = fit(&d, &sim_specs(), &CrossFitPlan::new(5, 1).unwrap()).unwrap();
    for t in ModelTag::ALL {
        let a = estimate_fitted(&d, &single, EstimatorTag::Model(t)).unwrap();
        let b = estimate_fitted(&d, &cf, EstimatorTag::Model(t)).unwrap();
        assert!((a.theta_hat - b.theta_hat).abs() < a.se_hat, "{t}");
        assert_eq!(b.manifest.fold, None);
    }
}

#[test]
fn missing_component_is_reported() {
    let d = simulate(100, 1, 0.5, 0.5, 0.5);
    let specs: Vec<ModelSpec> = vec!["pA_given_C=logistic[C]".parse().unwrap()];
    let eta = fit_set(&d, &specs).unwrap();
    let e = estimate(&d, &eta, EstimatorTag::Model(ModelTag::Bd)).unwrap_err();
    assert_eq!(e, Error::MissingNuisance("mY_ac".into()));
}

#[test]
fn clip_budget_exhaustion_is_an_error() {
    // treatment never observed at c = 1 for a = 0: half the rows hit a zero propensity
    let rows: Vec<_> = (0..200)
        .map(|i| {
            let c = f64::from(i % 2);
            let a = if c == 1.0 { 1.0 } else { f64::from((i / 2) % 2) };
            Observation::new(c, a, 0.0, a + c)
        })
        .collect();
    let d = Dataset::new(rows, TreatmentPair::default()).unwrap();
    let specs: Vec<ModelSpec> = ["pA_given_C=empirical[C]", "mY_ac=linear[A,C]"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let eta = fit_set(&d, &specs).unwrap();
    let e = estimate(&d, &eta, EstimatorTag::Model(ModelTag::Bd)).unwrap_err();
    assert!(matches!(e, Error::PositivityViolation { .. }), "{e:?}");
}

#[test]
fn registry_and_serialisation() {
    let reg = EstimatorRegistry::standard();
    assert_eq!(reg.names().count(), 7);
    let d = simulate(500, 3, 0.5, 0.5, 0.5);
    let eta = Fitted::Single(fit_set(&d, &sim_specs()).unwrap());
    let r = reg.get("fd_td").unwrap().estimate(&d, &eta).unwrap();
    assert_eq!(r.tag, EstimatorTag::Model(ModelTag::FdTd));
    let j = serde_json::to_string(&r).unwrap();
    let back: EstimationResult = serde_json::from_str(&j).unwrap();
    assert_eq!(back, r);
    let row = r.csv_row(|x| format!("{x:.6}"));
    assert_eq!(row.len(), EstimationResult::CSV_HEADER.len());
    assert!(row[5].contains("pZ_given_A:gaussian-density[A]:none"));
    assert!(reg.get("iv").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn results_independent_of_row_order(seed in 0u64..10_000) {
        let d = simulate(400, seed, 1.5, 0.5, 1.5);
        let mut rows = d.rows().to_vec();
        rows.shuffle(&mut ChaCha20Rng::seed_from_u64(seed ^ 1));
        let p = Dataset::new(rows, d.pair()).unwrap();
        let a = Fitted::Single(fit_set(&d, &sim_specs()).unwrap());
        let b = Fitted::Single(fit_set(&p, &sim_specs()).unwrap());
        for t in EstimatorTag::ALL {
            let x = estimate_fitted(&d, &a, t).unwrap();
            let y = estimate_fitted(&p, &b, t).unwrap();
            prop_assert!((x.theta_hat - y.theta_hat).abs() < 1e-10, "{}", t);
            prop_assert!((x.se_hat - y.se_hat).abs() < 1e-10);
        }
    }

    #[test]
    fn se_is_nonnegative(seed in 0u64..10_000) {
        let d = simulate(200, seed, 0.5, 0.5, 0.5);
        let eta = Fitted::Single(fit_set(&d, &sim_specs()).unwrap());
        for r in estimate_all(&d, &eta, &EstimatorTag::ALL) {
            prop_assert!(r.unwrap().se_hat >= 0.0);
        }
    }
}
