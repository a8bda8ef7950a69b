use proptest::prelude::*;
use twodoor_core::{expit, EstimatorTag, ModelTag};
use twodoor_simlab::*;

fn treated_share(d: &twodoor_core::Dataset) -> f64 {
    d.rows().iter().filter(|o| o.a == 1.0).count() as f64 / d.len() as f64
}

#[test]
fn sampler_marginals() {
    let n = 40_000;
    let tol = 4.0 / (n as f64).sqrt();
    let sym = SimDgpParams { alpha: 0.0, ..SimDgpParams::default() };
    assert!((treated_share(&sample_dgp(&sym, n, 1).unwrap()) - 0.5).abs() < tol);
    let d = sample_dgp(&SimDgpParams::default(), n, 2).unwrap();
    let want = 0.5 * expit(1.0) + 0.25;
    assert!((want - 0.616).abs() < 1e-3);
    assert!((treated_share(&d) - want).abs() < tol);
    let d = sample_dgp(&SimDgpParams::new(1.5, 0.5, 0.5), n, 3).unwrap();
    let zt: Vec<f64> = d.rows().iter().filter(|o| o.a == 1.0).map(|o| o.z).collect();
    let mz = zt.iter().sum::<f64>() / zt.len() as f64;
    assert!((mz - 1.5).abs() < 4.0 / (zt.len() as f64).sqrt());
}

#[test]
fn sampler_is_deterministic() {
    let p = SimDgpParams::default();
    assert_eq!(sample_dgp(&p, 50, 9).unwrap(), sample_dgp(&p, 50, 9).unwrap());
    assert_ne!(sample_dgp(&p, 50, 9).unwrap(), sample_dgp(&p, 50, 10).unwrap());
}

#[test]
fn child_streams_are_distinct_and_reproducible() {
    let p = SimDgpParams::default();
    let a = sample_dgp_with(&p, 20, &mut child_rng(5, 100, 3)).unwrap();
    let b = sample_dgp_with(&p, 20, &mut child_rng(5, 100, 3)).unwrap();
    let c = sample_dgp_with(&p, 20, &mut child_rng(5, 100, 4)).unwrap();
    let d = sample_dgp_with(&p, 20, &mut child_rng(5, 200, 3)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_ne!(a, d);
}

#[test]
fn settings_apply_directives() {
    let s2 = setting_specs(2).unwrap();
    let text: Vec<String> = s2.iter().map(|s| s.to_string()).collect();
    assert!(text.contains(&"pA=empirical[] fix 0.25".to_string()));
    assert!(text.contains(&"mY_az=linear-mean[A,Z] omit Z".to_string()));
    assert!(text.contains(&"pZ_given_A=gaussian-density[A]".to_string()));
    let s1 = setting_specs(1).unwrap();
    assert_eq!(s1.iter().filter(|s| s.to_string().contains("omit")).count(), 2);
    assert!(setting_specs(5).is_err());
}

#[test]
fn config_validation() {
    assert!(McConfig { k: 1, ..McConfig::default() }.validate().is_err());
    assert!(McConfig { sizes: vec![5], ..McConfig::default() }.validate().is_err());
    assert!(McConfig { setting: 9, ..McConfig::default() }.validate().is_err());
    let p = McConfig::default().full_scale();
    assert_eq!((p.k, p.sizes.last().copied()), (1000, Some(50_000)));
}

fn small(setting: u8, seed: u64) -> McConfig {
    McConfig { sizes: vec![200, 400], k: 24, setting, seed, ..McConfig::default() }
}

#[test]
fn identical_across_thread_counts() {
    let cfg = small(3, 17);
    let run = |t| {
        rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap().install(|| run_mc(&cfg).unwrap())
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a, b);
    let (mut x, mut y) = (Vec::new(), Vec::new());
    a.write_csv(&mut x, |v| format!("{v:e}")).unwrap();
    b.write_csv(&mut y, |v| format!("{v:e}")).unwrap();
    assert_eq!(x, y);
    let k2 = McConfig { k: 2, ..small(0, 3) };
    assert_eq!(run_mc(&k2).unwrap(), run_mc(&k2).unwrap());
}

#[test]
fn summary_layout() {
    let s = run_mc(&small(0, 4)).unwrap();
    assert_eq!(s.rows.len(), 2 * 7);
    assert_eq!(s.theta, 0.25);
    let mut buf = Vec::new();
    s.write_csv(&mut buf, |v| format!("{v}")).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("setting,n,tag,bias,bias_se,emp_se,scaled_var,scaled_var_se,mse,mse_se\n"));
    let r = s.get(400, EstimatorTag::Model(ModelTag::Bd)).unwrap();
    assert_eq!(r.k, 24);
    assert!((r.metrics.scaled_var - 400.0 * r.metrics.emp_se.powi(2)).abs() < 1e-9);
}

#[test]
fn backdoor_scaled_variance_near_bound() {
    let cfg = McConfig {
        params: SimDgpParams::new(0.5, 0.5, 0.5),
        sizes: vec![5000],
        k: 200,
        tags: vec![EstimatorTag::Model(ModelTag::Bd)],
        setting: 0,
        seed: 2023,
    };
    let s = run_mc(&cfg).unwrap();
    let m = s.rows[0].metrics;
    assert!((m.scaled_var - 5.6789).abs() < 3.0 * m.scaled_var_se, "{m:?}");
}

proptest! {
    #[test]
    fn metric_identities(est in prop::collection::vec(-3.0f64..3.0, 2..60), theta in -1.0f64..1.0, n in 10usize..100_000) {
        let m = metrics(&est, theta, n);
        let k = est.len() as f64;
        let direct = m.bias.powi(2) + m.emp_se.powi(2) * (k - 1.0) / k;
        prop_assert!((m.mse - direct).abs() < 1e-12 * (1.0 + m.mse));
        prop_assert!((m.scaled_var - n as f64 * m.emp_se.powi(2)).abs() < 1e-9 * (1.0 + m.scaled_var));
        prop_assert!((m.scaled_var_se - m.scaled_var * (2.0 / k).sqrt()).abs() < 1e-9 * (1.0 + m.scaled_var));
        prop_assert!(m.bias_se >= 0.0 && m.mse_se >= 0.0);
    }
}
