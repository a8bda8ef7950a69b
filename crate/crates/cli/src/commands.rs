use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;
use twodoor_bounds::{bound, BoundRegistry, BoundReport, SimDgpParams, MIN_NODES};
use twodoor_compare::{
    grid_scan, binary_interval, diff_td_minus_bd, prop2_verdict, prop6_verdict, ComparisonVerdict, ScanGrid,
    SCAN_HEADER,
};
use twodoor_core::{Dataset, DiscreteJoint, EstimatorTag, ModelTag, TreatmentPair};
use twodoor_eif::{oracle_mean, oracle_variance};
use twodoor_estimators::{estimate_all, EstimationResult};
use twodoor_nuisance::{fit, CrossFitPlan, ModelSpec};
use twodoor_simlab::{run_mc, setting_specs, McConfig, McSummary};

use crate::output::{Field, Report};
use crate::{BoundsArgs, Command, CompareArgs, CompareWhat, EstimateArgs, Globals, OracleArgs, Outcome, PairArgs, SimulateArgs};

const ORACLE_TOL: f64 = 1e-9;

pub fn dispatch(cmd: &Command, g: &Globals) -> Result<Outcome> {
    match cmd {
        Command::Bounds(a) => bounds(a, g),
        Command::Estimate(a) => estimate(a, g),
        Command::Simulate(a) => simulate(a, g),
        Command::Compare(a) => compare(a, g),
        Command::Oracle(a) => oracle(a, g),
    }
}

fn pair(p: &PairArgs, g: &Globals) -> Result<TreatmentPair> {
    let s = g.config.pick(p.a_star, "a-star")?.unwrap_or(1.0);
    let r = g.config.pick(p.a_ref, "a-ref")?.unwrap_or(0.0);
    Ok(TreatmentPair::new(s, r)?)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("opening {}", path.display()))
}

fn read_dist(path: &Path) -> Result<DiscreteJoint> {
    DiscreteJoint::read_csv(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn path_arg(cli: &Option<PathBuf>, g: &Globals, key: &str) -> Result<Option<PathBuf>> {
    g.config.pick(cli.clone(), key)
}

fn list<T>(s: &str) -> Result<Vec<T>>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|e| anyhow!("`{x}`: {e}")))
        .collect()
}

fn dgp(cli: &Option<String>, g: &Globals) -> Result<Option<SimDgpParams>> {
    match g.config.pick(cli.clone(), "dgp")? {
        Some(s) => Ok(Some(s.parse::<SimDgpParams>()?)),
        None => Ok(None),
    }
}

fn bounds(a: &BoundsArgs, g: &Globals) -> Result<Outcome> {
    let pair = pair(&a.pair, g)?;
    let tags: Vec<ModelTag> = match g.config.pick(a.tags.clone(), "tags")? {
        Some(t) => list(&t)?,
        None => ModelTag::ALL.to_vec(),
    };
    let nodes = g.config.pick(a.nodes, "nodes")?.unwrap_or(MIN_NODES);
    let reg = BoundRegistry::standard();
    let dist = path_arg(&a.dist, g, "dist")?;
    let reports: Vec<BoundReport> = match (dist, dgp(&a.dgp, g)?) {
        (Some(p), _) => {
            let d = read_dist(&p)?;
            tags.iter().map(|t| reg.get(t.as_str())?.on_dist(&d, &pair)).collect::<Result<_, _>>()?
        }
        (None, Some(params)) => tags
            .iter()
            .map(|t| reg.get(t.as_str())?.on_dgp(&params, &pair, nodes))
            .collect::<Result<_, _>>()?,
        (None, None) => bail!("bounds needs --dist or --dgp"),
    };
    let mut rep = Report::new(&["model", "value", "method", "a_star", "a_ref"], serde_json::to_value(&reports)?);
    for r in &reports {
        rep.push(vec![
            r.model.as_str().into(),
            r.value.into(),
            serde_json::to_value(r.method)?.as_str().unwrap_or_default().into(),
            r.a_star.into(),
            r.a_ref.into(),
        ]);
    }
    Ok(Outcome { report: rep, ok: true })
}

fn estimate(a: &EstimateArgs, g: &Globals) -> Result<Outcome> {
    let pair = pair(&a.pair, g)?;
    let path = path_arg(&a.data, g, "data")?.ok_or_else(|| anyhow!("estimate needs --data"))?;
    let data = Dataset::read_csv(open(&path)?, pair).with_context(|| format!("reading {}", path.display()))?;
    let mut spec_text: Vec<String> = a.models.clone();
    if spec_text.is_empty() {
        spec_text = g.config.models();
    }
    let specs: Vec<ModelSpec> = if !spec_text.is_empty() {
        spec_text.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
    } else {
        match g.config.pick(a.setting, "setting")? {
            Some(id) => setting_specs(id)?,
            None => ModelSpec::default_set(),
        }
    };
    let tags: Vec<EstimatorTag> = match g.config.pick(a.tags.clone(), "tags")? {
        Some(t) => list(&t)?,
        None => EstimatorTag::ALL.to_vec(),
    };
    let plan = match g.config.pick(a.folds, "folds")?.unwrap_or(0) {
        0 => CrossFitPlan::disabled(),
        k => CrossFitPlan::new(k, g.seed)?,
    };
    let fitted = fit(&data, &specs, &plan)?;
    let mut ok = true;
    let mut results: Vec<EstimationResult> = Vec::new();
    for (t, r) in tags.iter().zip(estimate_all(&data, &fitted, &tags)) {
        match r {
            Ok(r) => results.push(r),
            Err(e) => {
                eprintln!("error: {t}: {e}");
                ok = false;
            }
        }
    }
    let mut rep = Report::new(&EstimationResult::CSV_HEADER, serde_json::to_value(&results)?);
    for r in &results {
        rep.push(vec![
            r.tag.as_str().into(),
            r.theta_hat.into(),
            r.se_hat.into(),
            r.n.into(),
            r.clipped.into(),
            r.manifest_summary().into(),
        ]);
    }
    Ok(Outcome { report: rep, ok })
}

pub fn sim_config(a: &SimulateArgs, g: &Globals) -> Result<McConfig> {
    let mut cfg = McConfig { seed: g.seed, ..McConfig::default() };
    if let Some(p) = dgp(&a.dgp, g)? {
        cfg.params = p;
    }
    if g.full_scale {
        cfg = cfg.full_scale();
    }
    if let Some(s) = g.config.pick(a.sizes.clone(), "sizes")? {
        cfg.sizes = list(&s)?;
    }
    if let Some(k) = g.config.pick(a.k, "k")? {
        cfg.k = k;
    }
    if let Some(s) = g.config.pick(a.setting, "setting")? {
        cfg.setting = s;
    }
    if let Some(t) = g.config.pick(a.tags.clone(), "tags")? {
        cfg.tags = list(&t)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn summary_report(s: &McSummary) -> Result<Report> {
    let mut rep = Report::new(&McSummary::CSV_HEADER, serde_json::to_value(s)?);
    for r in &s.rows {
        let m = &r.metrics;
        rep.push(vec![
            Field::Text(r.setting.to_string()),
            r.n.into(),
            r.tag.as_str().into(),
            m.bias.into(),
            m.bias_se.into(),
            m.emp_se.into(),
            m.scaled_var.into(),
            m.scaled_var_se.into(),
            m.mse.into(),
            m.mse_se.into(),
        ]);
    }
    Ok(rep)
}

fn simulate(a: &SimulateArgs, g: &Globals) -> Result<Outcome> {
    let cfg = sim_config(a, g)?;
    let s = run_mc(&cfg)?;
    for (n, f) in &s.failures {
        if *f > 0 {
            eprintln!("note: {f} of {} replicates failed at n = {n} and were excluded", cfg.k);
        }
    }
    Ok(Outcome { report: summary_report(&s)?, ok: true })
}

fn verdict_report(v: &ComparisonVerdict) -> Result<Report> {
    let ord = serde_json::to_value(v.ordering)?;
    let ord = ord.as_str().unwrap_or_default().to_string();
    let mut rep = Report::new(&["condition", "label", "value", "ordering"], serde_json::to_value(v)?);
    for c in &v.values {
        rep.push(vec![v.condition.clone().into(), c.label.clone().into(), c.value.into(), ord.clone().into()]);
    }
    Ok(rep)
}

fn compare(a: &CompareArgs, g: &Globals) -> Result<Outcome> {
    let what = g.config.pick(a.what, "what")?.ok_or_else(|| anyhow!("compare needs --what"))?;
    let pair = pair(&a.pair, g)?;
    let dist = || -> Result<DiscreteJoint> {
        let p = path_arg(&a.dist, g, "dist")?.ok_or_else(|| anyhow!("--dist is required here"))?;
        read_dist(&p)
    };
    let core = (3.0 - 2.0 * std::f64::consts::SQRT_2, 3.0 + 2.0 * std::f64::consts::SQRT_2);
    match what {
        CompareWhat::Interval => {
            let ps: Vec<f64> = match g.config.pick(a.p_star, "p-star")? {
                Some(p) => vec![p],
                None => (1..100).map(|i| f64::from(i) / 100.0).collect(),
            };
            let mut ok = true;
            let mut js = Vec::new();
            let mut rep = Report::new(&["p_star", "low", "high", "contains_core"], json!(null));
            for p in ps {
                let (lo, hi) = binary_interval(p)?;
                let contains = lo <= core.0 + 1e-12 && hi >= core.1 - 1e-12 && (lo * hi - 1.0).abs() <= 1e-12;
                ok &= contains;
                js.push(json!({"p_star": p, "low": lo, "high": hi, "contains_core": contains}));
                rep.push(vec![p.into(), lo.into(), hi.into(), contains.into()]);
            }
            rep.json = json!(js);
            Ok(Outcome { report: rep, ok })
        }
        CompareWhat::Diff => {
            let d = dist()?;
            let diff = diff_td_minus_bd(&d, &pair)?;
            let gap = bound(&d, &pair, ModelTag::Td)?.value - bound(&d, &pair, ModelTag::Bd)?.value;
            let ok = (diff - gap).abs() <= ORACLE_TOL;
            let mut rep = Report::new(&["quantity", "value"], json!({"diff": diff, "bound_gap": gap, "agree": ok}));
            rep.push(vec!["diff".into(), diff.into()]);
            rep.push(vec!["bound_td_minus_bound_bd".into(), gap.into()]);
            Ok(Outcome { report: rep, ok })
        }
        CompareWhat::Prop2 => Ok(Outcome { report: verdict_report(&prop2_verdict(&dist()?, &pair)?)?, ok: true }),
        CompareWhat::Prop6 => {
            let gs: Vec<f64> = list(
                &g.config.pick(a.gamma.clone(), "gamma")?.ok_or_else(|| anyhow!("prop6 needs --gamma g0,g1,g2"))?,
            )?;
            let gamma: [f64; 3] = gs.try_into().map_err(|_| anyhow!("--gamma takes three numbers"))?;
            Ok(Outcome { report: verdict_report(&prop6_verdict(&dist()?, &pair, gamma)?)?, ok: true })
        }
        CompareWhat::Scan => {
            let scan = grid_scan(&ScanGrid::default())?;
            let bad = scan.violations().len();
            if bad > 0 {
                eprintln!("error: {bad} grid points inside the interval have diff > 1e-10");
            }
            let mut rep = Report::new(&SCAN_HEADER, json!(scan.rows));
            for r in &scan.rows {
                rep.push(vec![
                    r.beta0.into(),
                    r.alpha.into(),
                    r.beta.into(),
                    r.gamma1.into(),
                    r.gamma2.into(),
                    r.diff.into(),
                    r.interval_member.into(),
                ]);
            }
            Ok(Outcome { report: rep, ok: bad == 0 })
        }
    }
}

fn centre(d: &DiscreteJoint, pair: &TreatmentPair, t: ModelTag) -> Result<f64> {
    Ok(match t {
        ModelTag::Bd => d.ace_backdoor(pair)?,
        ModelTag::Fd => d.ace_frontdoor(pair)?,
        _ => d.ace_twodoor(pair)?,
    })
}

fn oracle(a: &OracleArgs, g: &Globals) -> Result<Outcome> {
    let pair = pair(&a.pair, g)?;
    let p = path_arg(&a.dist, g, "dist")?.ok_or_else(|| anyhow!("oracle needs --dist"))?;
    let d = read_dist(&p)?;
    let mut ok = true;
    let mut js = Vec::new();
    let mut rep = Report::new(
        &["model", "theta", "formula", "oracle", "discrepancy", "mean_gap", "ok"],
        json!(null),
    );
    for t in ModelTag::ALL {
        let row = (|| -> Result<(f64, f64, f64, f64)> {
            let theta = centre(&d, &pair, t)?;
            let f = bound(&d, &pair, t)?.value;
            let o = oracle_variance(&d, &pair, t, theta)?;
            let m = oracle_mean(&d, &pair, t)?;
            Ok((theta, f, o, m))
        })();
        match row {
            Ok((theta, f, o, m)) => {
                let disc = (f - o).abs();
                let gap = (m - theta).abs();
                let pass = disc <= ORACLE_TOL * (1.0 + o.abs()) && gap <= ORACLE_TOL;
                ok &= pass;
                js.push(json!({"model": t.as_str(), "theta": theta, "formula": f, "oracle": o,
                    "discrepancy": disc, "mean_gap": gap, "ok": pass}));
                rep.push(vec![t.as_str().into(), theta.into(), f.into(), o.into(), disc.into(), gap.into(), pass.into()]);
            }
            Err(e) => {
                ok = false;
                eprintln!("error: {t}: {e}");
                js.push(json!({"model": t.as_str(), "error": e.to_string(), "ok": false}));
                let nan = f64::NAN;
                rep.push(vec![t.as_str().into(), nan.into(), nan.into(), nan.into(), nan.into(), nan.into(), false.into()]);
            }
        }
    }
    rep.json = json!(js);
    Ok(Outcome { report: rep, ok })
}
