use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use twodoor_bounds::all_bounds;
use twodoor_core::{DiscreteJoint, TreatmentPair};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twodoor")).args(args).output().expect("spawn twodoor")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    serde_json::from_str(&ok(&full)).unwrap()
}

fn by_model(v: &Value, key: &str) -> Vec<(String, f64)> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|r| (r[key].as_str().unwrap().to_string(), r["value"].as_f64().unwrap()))
        .collect()
}

#[test]
fn bounds_on_design_match_table_row() {
    let v = json(&["bounds", "--dgp", "β=0.5,γ1=0.5,γ2=0.5,α=1"]);
    let want = [5.68, 1.36, 1.42, 1.38, 1.34, 1.30];
    let got = by_model(&v, "model");
    assert_eq!(got.len(), 6);
    for ((_, g), w) in got.iter().zip(want) {
        assert!((g - w).abs() <= 0.01, "{g} vs {w}");
    }
}

#[test]
fn bounds_csv_is_six_significant_digits() {
    let text = ok(&["bounds", "--dgp", "beta=0.5,gamma1=0.5,gamma2=0.5", "--tags", "BD"]);
    assert_eq!(text, "model,value,method,a_star,a_ref\nBD,5.67885,closed-form,1,0\n");
}

#[test]
fn constant_outcome_gives_zero_bounds() {
    let v = json(&["bounds", "--dist", data("constant_y.csv").to_str().unwrap()]);
    for (m, b) in by_model(&v, "model") {
        assert!(b.abs() < 1e-12, "{m}: {b}");
    }
}

#[test]
fn dist_file_equals_in_memory() {
    let path = data("fig1f.csv");
    let d = DiscreteJoint::read_csv(std::fs::File::open(&path).unwrap()).unwrap();
    let mem = all_bounds(&d, &TreatmentPair::new(1.0, 0.0).unwrap()).unwrap();
    let v = json(&["bounds", "--dist", path.to_str().unwrap()]);
    let got = by_model(&v, "model");
    for (r, (m, b)) in mem.iter().zip(got) {
        assert_eq!(r.model.as_str(), m);
        assert!((r.value - b).abs() <= 1e-15 * r.value.abs().max(1.0), "{} vs {b}", r.value);
    }
}

#[test]
fn missing_input_is_an_error() {
    let out = run(&["bounds"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--dist or --dgp"));
}

#[test]
fn malformed_dist_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    std::fs::write(&p, "c,a,z,y,p\n0,0,0,0,0.5\n0,1,0,x,0.5\n").unwrap();
    let out = run(&["bounds", "--dist", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"), "{}", String::from_utf8_lossy(&out.stderr));
}

fn write_rows(path: &Path, rows: &[[f64; 4]]) {
    let mut s = String::from("c,a,z,y\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r[0], r[1], r[2], r[3]));
    }
    std::fs::write(path, s).unwrap();
}

#[test]
fn naive_on_toy_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("toy.csv");
    write_rows(&p, &[[0., 1., 0., 3.], [1., 1., 1., 5.], [0., 0., 0., 1.], [1., 0., 1., 2.], [0., 0., 1., 0.]]);
    let v = json(&["estimate", "--data", p.to_str().unwrap(), "--tags", "naive"]);
    let th = v[0]["theta_hat"].as_f64().unwrap();
    assert!((th - (4.0 - 1.0)).abs() < 1e-12, "{th}");
    assert_eq!(v[0]["n"].as_u64(), Some(5));
}

// Outcome means additive in (a, c) so the linear fit is exact and the
// augmentation term cancels cell by cell.
fn enumerated_rows() -> Vec<[f64; 4]> {
    let counts = [[3usize, 5], [4, 2]];
    let mut rows = Vec::new();
    for c in 0..2 {
        for a in 0..2 {
            let mean = 1.0 + 2.0 * a as f64 + 3.0 * c as f64;
            for i in 0..counts[c][a] {
                let y = mean + if i % 2 == 0 { 1.0 } else { -1.0 } * if counts[c][a] % 2 == 1 && i == 0 { 0.0 } else { 1.0 };
                rows.push([c as f64, a as f64, (i % 2) as f64, y]);
            }
        }
    }
    rows
}

#[test]
fn backdoor_on_enumerated_support_equals_plugin() {
    let rows = enumerated_rows();
    let n = rows.len() as f64;
    let mut records: Vec<[f64; 5]> = Vec::new();
    for r in &rows {
        match records.iter_mut().find(|x| x[..4] == r[..]) {
            Some(x) => x[4] += 1.0 / n,
            None => records.push([r[0], r[1], r[2], r[3], 1.0 / n]),
        }
    }
    let total: f64 = records.iter().map(|r| r[4]).sum();
    records.iter_mut().for_each(|r| r[4] /= total);
    let d = DiscreteJoint::from_records(&records).unwrap();
    let want = d.ace_backdoor(&TreatmentPair::new(1.0, 0.0).unwrap()).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("enum.csv");
    write_rows(&p, &rows);
    let v = json(&["estimate", "--data", p.to_str().unwrap(), "--tags", "BD"]);
    let th = v[0]["theta_hat"].as_f64().unwrap();
    assert!((th - want).abs() < 1e-10, "{th} vs {want}");
    assert!((want - 2.0).abs() < 1e-10);
}

#[test]
fn estimate_repeat_runs_identical() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim.csv");
    let p = sim.to_str().unwrap();
    // a dataset from the sampler, via the library
    let params = twodoor_bounds::SimDgpParams::default();
    twodoor_simlab::sample_dgp(&params, 400, 3).unwrap().write_csv(std::fs::File::create(&sim).unwrap()).unwrap();
    let a = ok(&["--seed", "9", "estimate", "--data", p, "--folds", "3"]);
    let b = ok(&["--seed", "9", "estimate", "--data", p, "--folds", "3"]);
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 8);
    assert!(a.starts_with("tag,theta_hat,se_hat,n,clipped,manifest\n"));
}

#[test]
fn estimate_rejects_wrong_header() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.csv");
    std::fs::write(&p, "a,c,z,y\n0,0,0,0\n").unwrap();
    assert_eq!(run(&["estimate", "--data", p.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn model_flags_and_setting() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim.csv");
    let p = sim.to_str().unwrap();
    twodoor_simlab::sample_dgp(&Default::default(), 500, 4).unwrap().write_csv(std::fs::File::create(&sim).unwrap()).unwrap();
    let s2 = ok(&["estimate", "--data", p, "--setting", "2", "--tags", "BD"]);
    assert!(s2.contains("omit-predictor(C)"), "{s2}");
    let m = ok(&["estimate", "--data", p, "--tags", "BD", "--model", "pC=empirical[]", "--model", "pA_given_C=logistic[C]", "--model", "mY_ac=linear[A,C] omit C"]);
    let a: Vec<&str> = s2.lines().nth(1).unwrap().split(',').take(3).collect();
    let b: Vec<&str> = m.lines().nth(1).unwrap().split(',').take(3).collect();
    assert_ne!(a, b);
}

const SIM: &[&str] = &["simulate", "--sizes", "200,400", "--k", "12", "--dgp", "beta=1.5,gamma1=1.5,gamma2=1.5"];

#[test]
fn simulate_deterministic_across_threads() {
    let mut one = vec!["--seed", "4", "--threads", "1"];
    one.extend_from_slice(SIM);
    let mut four = vec!["--seed", "4", "--threads", "4"];
    four.extend_from_slice(SIM);
    let a = ok(&one);
    assert_eq!(a, ok(&four));
    assert_eq!(a.lines().count(), 1 + 2 * 7);
    assert!(a.starts_with("setting,n,tag,bias,bias_se,emp_se,scaled_var,scaled_var_se,mse,mse_se\n"));
    let mut other = vec!["--seed", "5"];
    other.extend_from_slice(SIM);
    assert_ne!(a, ok(&other));
}

#[test]
fn interval_at_half() {
    let v = json(&["compare", "--what", "interval", "--p-star", "0.5"]);
    let lo = v[0]["low"].as_f64().unwrap();
    let hi = v[0]["high"].as_f64().unwrap();
    assert!((lo - (3.0 - 8f64.sqrt())).abs() < 1e-12);
    assert!((hi - (3.0 + 8f64.sqrt())).abs() < 1e-12);
    assert_eq!(v[0]["contains_core"], Value::Bool(true));
    ok(&["compare", "--what", "interval"]);
}

#[test]
fn scan_has_no_violations() {
    let text = ok(&["compare", "--what", "scan"]);
    assert!(text.starts_with("β0,α,β,γ1,γ2,diff,interval_member\n"));
    assert_eq!(text.lines().count(), 1 + 4 * 9 * 41 * 9 * 9);
}

#[test]
fn diff_and_prop2_on_dist_file() {
    let f = data("fig1f.csv");
    let f = f.to_str().unwrap();
    ok(&["compare", "--what", "diff", "--dist", f]);
    let v = json(&["compare", "--what", "prop2", "--dist", f]);
    assert!(v["ordering"].is_string());
    assert_eq!(v["values"].as_array().unwrap().len(), 4);
}

#[test]
fn oracle_on_shipped_dists() {
    for name in ["fig1f.csv", "constant_y.csv"] {
        let v = json(&["oracle", "--dist", data(name).to_str().unwrap()]);
        for r in v.as_array().unwrap() {
            assert_eq!(r["ok"], Value::Bool(true), "{name}: {r}");
            assert!(r["discrepancy"].as_f64().unwrap() < 1e-9);
        }
    }
    let v = json(&["oracle", "--dist", data("constant_y.csv").to_str().unwrap()]);
    for r in v.as_array().unwrap() {
        assert!(r["formula"].as_f64().unwrap().abs() < 1e-12);
    }
}

#[test]
fn oracle_flags_perturbed_pmf() {
    let out = run(&["oracle", "--dist", data("perturbed.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).any(|l| l.ends_with(",false")));
}

#[test]
fn config_file_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# study\nseed = 4\nsizes = 200,400\nk = 12\ndgp = beta=1.5,gamma1=1.5,gamma2=1.5\n").unwrap();
    let c = cfg.to_str().unwrap();
    let mut flags = vec!["--seed", "4"];
    flags.extend_from_slice(SIM);
    assert_eq!(ok(&["--config", c, "simulate"]), ok(&flags));
    let over = ok(&["--config", c, "simulate", "--k", "10"]);
    assert_ne!(over, ok(&flags));

    std::fs::write(&cfg, "seed = 4\nk = \n").unwrap();
    let out = run(&["--config", c, "simulate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn out_file_written_whole() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("bounds.json");
    std::fs::write(&target, "stale").unwrap();
    let t = target.to_str().unwrap();
    let stdout = ok(&["--out", t, "--format", "json", "bounds", "--dgp", "beta=1.5,gamma1=0.5,gamma2=0.5"]);
    assert!(stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 6);
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1);

    let missing = dir.path().join("no/such/dir/out.csv");
    assert_eq!(run(&["--out", missing.to_str().unwrap(), "bounds", "--dgp", "beta=1"]).status.code(), Some(1));
}
