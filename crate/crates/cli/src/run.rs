//! Experiment drivers. Each kind writes one CSV plus JSON sidecars.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sinr_core::distribution::{fit_comparison, scaling_limit, to_db};
use sinr_core::simulator::{
    choose_truncation_radius, draw_points, ks_critical_value, run_campaign, run_trials, tail_spec, trial_rng,
    TRUNCATION_REL_TOL,
};
use sinr_core::{
    DiskRegion, EmpiricalDistribution, FarField, IntensityModel, LinkConfig, SimConfig, SinrDistribution,
};

use crate::config::{ExperimentConfig, Kind, LinkSpec, SimSpec};
use crate::error::CliError;

/// Quantile of `γ` that bounds the grid used to pick the truncation radius.
pub const TRUNCATION_QUANTILE: f64 = 0.9999;

/// Asymptotic KS coefficient at the 1% level.
pub const KS_COEFFICIENT_1PCT: f64 = 1.628;

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub outputs: Vec<PathBuf>,
    pub meta: Value,
    pub warnings: Vec<String>,
}

/// Formats a float with 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// `<path><suffix>`, e.g. `out.csv.meta.json`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

struct Outcome {
    results: Value,
    extra_outputs: Vec<PathBuf>,
    r_sim: Option<f64>,
}

/// Runs `kind` on a config already passed through [`ExperimentConfig::resolve`].
pub fn run(kind: Kind, mut cfg: ExperimentConfig) -> Result<RunReport, CliError> {
    let out = cfg.output_path.clone().ok_or_else(|| CliError::validation("output_path: missing"))?;
    let mut warnings = Vec::new();
    if let Some(m) = &cfg.model {
        if let Some(w) = m.build()?.continuity_warning() {
            warnings.push(w);
        }
    }
    let outcome = match kind {
        Kind::Cdf | Kind::Pdf => analytic_grid(kind, &mut cfg, &out)?,
        Kind::OutageSweep => outage_sweep(&cfg, &out)?,
        Kind::Scaling => scaling(&cfg, &out)?,
        Kind::Simulate => simulate(&mut cfg, &out)?,
        Kind::FitPoly => fit_poly(&cfg, &out)?,
        Kind::SamplePoints => sample_points(&cfg, &out)?,
    };
    let spec = cfg.quad_spec()?;
    let mut outputs = vec![out.clone()];
    outputs.extend(outcome.extra_outputs);
    let meta_path = sidecar(&out, ".meta.json");
    let sim = cfg.sim.as_ref();
    let meta = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "kind": kind,
        "config": cfg,
        "seed": sim.and_then(|s| s.seed),
        "trials": sim.and_then(|s| s.trials),
        "r_sim": outcome.r_sim,
        "far_field": sim.map(|s| s.far_field),
        "tolerances": {
            "rel_tol": spec.rel_tol,
            "abs_tol": spec.abs_tol,
            "max_subdivisions": spec.max_subdivisions,
            "truncation_rel_tol": TRUNCATION_REL_TOL,
        },
        "outputs": outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "results": outcome.results,
        "warnings": warnings,
    });
    write_json(&meta_path, &meta)?;
    outputs.push(meta_path);
    Ok(RunReport { outputs, meta, warnings })
}

fn link_with(link: &LinkSpec, antennas: u32) -> Result<LinkConfig<f64>, CliError> {
    Ok(LinkConfig::new(link.alpha, link.sigma2, link.r_t, antennas)?)
}

fn base_distribution(cfg: &ExperimentConfig) -> Result<(SinrDistribution<f64>, LinkSpec), CliError> {
    let link = cfg.link.clone().ok_or_else(|| CliError::validation("link: missing"))?;
    let antennas = link.antennas.ok_or_else(|| CliError::validation("link.antennas: missing"))?;
    let model = cfg.model.as_ref().ok_or_else(|| CliError::validation("model: missing"))?.build()?;
    let psi = sinr_core::PsiEvaluator::new(model, link.alpha, cfg.quad_spec()?, sinr_core::PsiMethod::Auto)?;
    Ok((SinrDistribution::new(psi, link_with(&link, antennas)?)?, link))
}

/// Fills in `sim.truncation_radius` when absent. The tail criterion is
/// applied at `min(largest grid γ, 0.9999 quantile)`.
fn resolve_truncation(
    sim: &mut SimSpec,
    dist: &SinrDistribution<f64>,
    grid_max: Option<f64>,
) -> Result<f64, CliError> {
    if let Some(r) = sim.truncation_radius {
        return Ok(r);
    }
    let q = dist.quantile_gamma(TRUNCATION_QUANTILE)?;
    let gamma_max = grid_max.map_or(q, |g| g.min(q));
    let r = choose_truncation_radius(
        dist.psi().model(),
        dist.link().alpha,
        gamma_max,
        sim.far_field.into(),
        TRUNCATION_REL_TOL,
        &tail_spec(),
    )?;
    sim.truncation_radius = Some(r);
    Ok(r)
}

fn sim_config(sim: &SimSpec, dist: &SinrDistribution<f64>, radius: f64) -> Result<SimConfig<f64>, CliError> {
    let far: FarField = sim.far_field.into();
    Ok(SimConfig::new(
        sim.trials.unwrap_or(crate::config::DEFAULT_TRIALS),
        radius,
        sim.seed.unwrap_or(crate::config::DEFAULT_SEED),
        *dist.link(),
        dist.psi().model().clone(),
        far,
    )?)
}

fn analytic_grid(kind: Kind, cfg: &mut ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let (dist, link) = base_distribution(cfg)?;
    let gammas = cfg.gammas(link.alpha, link.r_t)?;
    let scale = dist.link().gamma_scale();
    let cdf = dist.cdf_grid(&gammas)?;
    let pdf = if kind == Kind::Pdf { Some(dist.pdf_grid(&gammas)?) } else { None };

    let mut r_sim = None;
    let mut empirical: Option<EmpiricalDistribution<f64>> = None;
    if let Some(sim) = cfg.sim.as_mut() {
        let grid_max = gammas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let r = resolve_truncation(sim, &dist, Some(grid_max))?;
        r_sim = Some(r);
        empirical = Some(run_campaign(&sim_config(sim, &dist, r)?)?);
    }

    let mut header = vec!["gamma", "sinr", "sinr_db", "analytic_cdf"];
    if pdf.is_some() {
        header.push("analytic_pdf");
    }
    if empirical.is_some() {
        header.push("empirical_cdf");
    }
    let rows: Vec<Vec<String>> = gammas
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let sinr = g / scale;
            let mut row = vec![fmt(g), fmt(sinr), fmt(to_db(sinr)), fmt(cdf[i])];
            if let Some(p) = &pdf {
                row.push(fmt(p[i]));
            }
            if let Some(e) = &empirical {
                row.push(fmt(e.cdf(sinr)));
            }
            row
        })
        .collect();
    write_csv(out, &header, &rows)?;

    let mut results = json!({ "points": gammas.len() });
    if let Some(e) = &empirical {
        let sup = gammas
            .iter()
            .zip(&cdf)
            .map(|(&g, &c)| (e.cdf(g / scale) - c).abs())
            .fold(0.0, f64::max);
        results["max_grid_cdf_gap"] = json!(sup);
    }
    Ok(Outcome { results, extra_outputs: vec![], r_sim })
}

fn outage_sweep(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let link = cfg.link.clone().ok_or_else(|| CliError::validation("link: missing"))?;
    let sweep = cfg.sweep.as_ref().ok_or_else(|| CliError::validation("sweep: missing"))?;
    let eps = sweep.epsilons.values("sweep.epsilons", false)?;
    let spec = cfg.quad_spec()?;
    let mut rows = Vec::new();
    for &e in &eps {
        // keeps the mean count inside `radius` fixed
        let rho = sweep.mean_count * (2.0 + e) / (std::f64::consts::TAU * sweep.radius.powf(2.0 + e));
        let model = IntensityModel::power_law(rho, e)?;
        let psi = sinr_core::PsiEvaluator::new(model, link.alpha, spec, sinr_core::PsiMethod::Auto)?;
        for &l in &sweep.antennas {
            let d = SinrDistribution::new(psi.clone(), link_with(&link, l)?)?;
            let p = d.outage_probability(sweep.tau, link.r_t)?;
            rows.push(vec![fmt(e), l.to_string(), fmt(rho), fmt(p)]);
        }
    }
    write_csv(out, &["epsilon", "L", "rho_adjusted", "outage"], &rows)?;
    Ok(Outcome { results: json!({ "points": rows.len() }), extra_outputs: vec![], r_sim: None })
}

fn scaling(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let link = cfg.link.clone().ok_or_else(|| CliError::validation("link: missing"))?;
    let sc = cfg.scaling.as_ref().ok_or_else(|| CliError::validation("scaling: missing"))?;
    let nominal = cfg.model.as_ref().ok_or_else(|| CliError::validation("model: missing"))?.build()?.nominal();
    let spec = cfg.quad_spec()?;
    let gammas = cfg.gammas(link.alpha, link.r_t)?;
    let limit = scaling_limit(&nominal, sc.q, link.alpha, link.r_t, &spec)?;

    let mut rows = Vec::new();
    let mut per_l = Vec::new();
    for &l in &sc.antennas {
        let beta = sc.q * l as f64;
        let model = nominal.clone().with_beta(beta)?;
        let psi = sinr_core::PsiEvaluator::new(model, link.alpha, spec, sinr_core::PsiMethod::Auto)?;
        let d = SinrDistribution::new(psi, link_with(&link, l)?)?;
        let scale = d.link().gamma_scale();
        for (&g, c) in gammas.iter().zip(d.cdf_grid(&gammas)?) {
            rows.push(vec![l.to_string(), fmt(beta), fmt(g), fmt(to_db(g / scale)), fmt(c)]);
        }
        let q10 = d.quantile_gamma(0.1)?;
        let q50 = d.quantile_gamma(0.5)?;
        let q90 = d.quantile_gamma(0.9)?;
        per_l.push(json!({
            "L": l,
            "beta": beta,
            "median_sinr_db": to_db(q50 / scale),
            "width_10_90_db": to_db(q90 / q10),
        }));
    }
    write_csv(out, &["L", "beta", "gamma", "sinr_db", "cdf"], &rows)?;
    let results = json!({
        "limit_gamma": limit.gamma,
        "limit_sinr": limit.sinr,
        "limit_sinr_db": to_db(limit.sinr),
        "antennas": per_l,
    });
    Ok(Outcome { results, extra_outputs: vec![], r_sim: None })
}

fn simulate(cfg: &mut ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let (dist, _) = base_distribution(cfg)?;
    let grid_max = if cfg.has_grid() {
        let link = cfg.link.as_ref().expect("validated");
        Some(cfg.gammas(link.alpha, link.r_t)?.into_iter().fold(f64::NEG_INFINITY, f64::max))
    } else {
        None
    };
    let sim = cfg.sim.as_mut().ok_or_else(|| CliError::validation("sim: missing"))?;
    let r = resolve_truncation(sim, &dist, grid_max)?;
    let sc = sim_config(sim, &dist, r)?;
    let trials = run_trials(&sc)?;

    let rows: Vec<Vec<String>> = trials
        .iter()
        .enumerate()
        .map(|(t, tr)| vec![t.to_string(), fmt(tr.sinr), fmt(to_db(tr.sinr)), tr.n_interferers.to_string()])
        .collect();
    write_csv(out, &["trial", "sinr", "sinr_db", "n_interferers"], &rows)?;

    let mean_n = trials.iter().map(|t| t.n_interferers as f64).sum::<f64>() / trials.len() as f64;
    let emp = EmpiricalDistribution::new(trials.iter().map(|t| t.sinr).collect())?;
    let ks = emp.ks_distance(|s| dist.cdf_sinr(s))?;
    let critical = ks_critical_value(emp.trials(), KS_COEFFICIENT_1PCT);
    let summary = json!({
        "trials": emp.trials(),
        "ks_distance": ks,
        "critical_value_1pct": critical,
        "passes": ks < critical,
        "r_sim": r,
        "mean_interferers": mean_n,
        "median_sinr_db": to_db(emp.median()),
    });
    let ks_path = sidecar(out, ".ks.json");
    write_json(&ks_path, &summary)?;
    Ok(Outcome { results: summary, extra_outputs: vec![ks_path], r_sim: Some(r) })
}

fn fit_poly(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let (dist, link) = base_distribution(cfg)?;
    let fit = cfg.fit.as_ref().ok_or_else(|| CliError::validation("fit: missing"))?;
    let gammas = cfg.gammas(link.alpha, link.r_t)?;
    let spec = cfg.quad_spec()?;
    let scale = dist.link().gamma_scale();
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &m in &fit.degrees {
        let c = fit_comparison(dist.psi().model(), fit.r0, m, fit.eps_tail, dist.link(), &gammas, &spec)?;
        for ((&g, &a), &b) in gammas.iter().zip(&c.cdf_fit).zip(&c.cdf_reference) {
            rows.push(vec![
                m.to_string(),
                fmt(g),
                fmt(to_db(g / scale)),
                fmt(a),
                fmt(b),
                fmt((a - b).abs()),
            ]);
        }
        fits.push(json!({
            "degree": m,
            "coefficients": c.fit.coeffs,
            "sup_residual": c.fit.sup_residual,
            "r0": c.r0,
            "rho0": c.rho0,
            "eps_tail": c.eps_tail,
            "sup_cdf_error": c.sup_error,
        }));
    }
    write_csv(out, &["degree", "gamma", "sinr_db", "cdf_fit", "cdf_reference", "abs_error"], &rows)?;
    let fits = Value::Array(fits);
    let fit_path = sidecar(out, ".fit.json");
    write_json(&fit_path, &fits)?;
    Ok(Outcome { results: json!({ "fits": fits }), extra_outputs: vec![fit_path], r_sim: None })
}

fn sample_points(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let model = cfg.model.as_ref().ok_or_else(|| CliError::validation("model: missing"))?.build()?;
    let radius = cfg.region_radius.ok_or_else(|| CliError::validation("region_radius: missing"))?;
    let region = DiskRegion::new(radius)?;
    let seed = cfg.sim.as_ref().and_then(|s| s.seed).unwrap_or(crate::config::DEFAULT_SEED);
    let mut rng = trial_rng(seed, 0);
    let points = draw_points(&model, &region, &mut rng)?;
    let rows: Vec<Vec<String>> = points.iter().map(|&(x, y)| vec![fmt(x), fmt(y)]).collect();
    write_csv(out, &["x", "y"], &rows)?;
    let results = json!({ "count": points.len(), "expected_count": model.mean_count(&region)? });
    Ok(Outcome { results, extra_outputs: vec![], r_sim: None })
}
