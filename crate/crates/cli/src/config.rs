//! Experiment configuration: JSON schema, defaults and validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sinr_core::{
    DiskRegion, FarField, IntensityModel, LinkConfig, PowerLawSegment, PsiEvaluator, PsiMethod, QuadratureSpec,
};

use crate::error::CliError;

pub const DEFAULT_TRIALS: usize = 20_000;
pub const DEFAULT_SEED: u64 = 0;

/// Experiment kinds understood by the tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    /// Analytic SINR CDF on a grid (plus empirical CDF when simulating).
    Cdf,
    /// Analytic SINR CDF and PDF on a grid.
    Pdf,
    /// Outage probability over a grid of power-law exponents.
    OutageSweep,
    /// CDFs with density growing linearly in the antenna count.
    Scaling,
    /// Monte-Carlo campaign with a KS comparison against the analytic CDF.
    Simulate,
    /// Polynomial fits of the intensity and their CDF error.
    FitPoly,
    /// One realization of interferer locations on a disk.
    SamplePoints,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Cdf => "cdf",
            Kind::Pdf => "pdf",
            Kind::OutageSweep => "outage-sweep",
            Kind::Scaling => "scaling",
            Kind::Simulate => "simulate",
            Kind::FitPoly => "fit-poly",
            Kind::SamplePoints => "sample-points",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub rho: f64,
    pub eps: f64,
    /// Omitted (or null) for a last ring reaching infinity.
    #[serde(default)]
    pub outer_radius: Option<f64>,
}

/// Interferer intensity, tagged by `family`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    PowerLaw {
        rho: f64,
        eps: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
    },
    PiecewisePowerLaw {
        segments: Vec<Segment>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
    },
    PolynomialWithTail {
        coeffs: Vec<f64>,
        r0: f64,
        rho0: f64,
        eps_tail: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
    },
    /// Either `rho` or `mean_count` (expected total number of interferers).
    GaussianCluster {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rho: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mean_count: Option<f64>,
        v: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
    },
}

impl ModelSpec {
    pub fn build(&self) -> Result<IntensityModel<f64>, CliError> {
        self.build_inner().map_err(|e| CliError { message: format!("model: {}", e.message), ..e })
    }

    fn build_inner(&self) -> Result<IntensityModel<f64>, CliError> {
        let (model, beta) = match self {
            ModelSpec::PowerLaw { rho, eps, beta } => (IntensityModel::power_law(*rho, *eps)?, beta),
            ModelSpec::PiecewisePowerLaw { segments, beta } => {
                let segs = segments
                    .iter()
                    .map(|s| PowerLawSegment {
                        rho: s.rho,
                        eps: s.eps,
                        outer_radius: s.outer_radius.unwrap_or(f64::INFINITY),
                    })
                    .collect();
                (IntensityModel::piecewise_power_law(segs)?, beta)
            }
            ModelSpec::PolynomialWithTail { coeffs, r0, rho0, eps_tail, beta } => {
                (IntensityModel::polynomial_with_tail(coeffs.clone(), *r0, *rho0, *eps_tail)?, beta)
            }
            ModelSpec::GaussianCluster { rho, mean_count, v, beta } => {
                let m = match (rho, mean_count) {
                    (Some(r), None) => IntensityModel::gaussian_cluster(*r, *v)?,
                    (None, Some(m)) => IntensityModel::gaussian_cluster_with_mean(*m, *v)?,
                    _ => return Err(CliError::validation("gaussian_cluster needs exactly one of `rho`, `mean_count`")),
                };
                (m, beta)
            }
        };
        match beta {
            Some(b) => Ok(model.with_beta(*b)?),
            None => Ok(model),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub alpha: f64,
    pub sigma2: f64,
    pub r_t: f64,
    /// Not needed by kinds that take their own antenna list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antennas: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

/// Explicit values or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range(Range),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Grid {
    pub fn values(&self, key: &str, positive: bool) -> Result<Vec<f64>, CliError> {
        let v = match self {
            Grid::Values(v) => v.clone(),
            Grid::Range(Range { min, max, points, spacing }) => {
                if *points < 1 || !(min <= max) || !min.is_finite() || !max.is_finite() {
                    return Err(CliError::validation(format!("{key}: range needs finite min <= max and points >= 1")));
                }
                if *spacing == Spacing::Log && !(*min > 0.0) {
                    return Err(CliError::validation(format!("{key}: log spacing needs min > 0")));
                }
                let n = *points;
                (0..n)
                    .map(|i| {
                        let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                        match spacing {
                            Spacing::Linear => min + t * (max - min),
                            Spacing::Log => (min.ln() + t * (max.ln() - min.ln())).exp(),
                        }
                    })
                    .collect()
            }
        };
        if v.is_empty() {
            return Err(CliError::validation(format!("{key}: grid is empty")));
        }
        if let Some(x) = v.iter().find(|x| !x.is_finite() || (positive && **x <= 0.0)) {
            let need = if positive { "finite and > 0" } else { "finite" };
            return Err(CliError::validation(format!("{key}: grid values must be {need}, got {x}")));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Chosen from the tail criterion when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_radius: Option<f64>,
    #[serde(default)]
    pub far_field: FarFieldSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FarFieldSpec {
    #[default]
    Ignore,
    Compensate,
}

impl From<FarFieldSpec> for FarField {
    fn from(f: FarFieldSpec) -> Self {
        match f {
            FarFieldSpec::Ignore => FarField::Ignore,
            FarFieldSpec::Compensate => FarField::Compensate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_subdivisions: Option<usize>,
}

impl QuadSpec {
    pub fn build(&self) -> Result<QuadratureSpec<f64>, CliError> {
        let d = QuadratureSpec::<f64>::default();
        Ok(QuadratureSpec::new(
            self.rel_tol.unwrap_or(d.rel_tol),
            self.abs_tol.unwrap_or(d.abs_tol),
            self.max_subdivisions.unwrap_or(d.max_subdivisions),
        )?)
    }
}

/// Power laws `ρ(ε) r^ε` whose mean count inside `radius` is held at
/// `mean_count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub epsilons: Grid,
    pub antennas: Vec<u32>,
    /// SINR threshold, linear.
    pub tau: f64,
    pub mean_count: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSpec {
    pub q: f64,
    pub antennas: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    pub degrees: Vec<usize>,
    pub r0: f64,
    #[serde(default = "default_eps_tail")]
    pub eps_tail: f64,
}

fn default_eps_tail() -> f64 {
    -1.5
}

/// Top-level experiment file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Informational; must match the command line kind when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link: Option<LinkSpec>,
    /// Normalized SINR values `γ = SINR · r_T^α`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_grid: Option<Grid>,
    /// SINR thresholds, linear.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region_radius: Option<f64>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::validation(format!("config: {e}")))
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

impl ExperimentConfig {
    /// Applies overrides and fills defaults so the result reruns identically.
    pub fn resolve(mut self, kind: Kind, ov: &Overrides) -> Result<Self, CliError> {
        if let Some(k) = self.kind {
            if k != kind {
                return Err(CliError::validation(format!(
                    "kind: config says `{}` but `{}` was requested",
                    k.name(),
                    kind.name()
                )));
            }
        }
        self.kind = Some(kind);
        if let Some(out) = &ov.out {
            self.output_path = Some(out.clone());
        }
        if self.output_path.is_none() {
            return Err(CliError::validation("output_path: missing (set it in the config or pass --out)"));
        }
        let mut quad = self.quadrature.take().unwrap_or(QuadSpec { rel_tol: None, abs_tol: None, max_subdivisions: None });
        if let Some(t) = ov.tol {
            quad.rel_tol = Some(t);
        }
        let d = QuadratureSpec::<f64>::default();
        quad.rel_tol.get_or_insert(d.rel_tol);
        quad.abs_tol.get_or_insert(d.abs_tol);
        quad.max_subdivisions.get_or_insert(d.max_subdivisions);
        quad.build()?;
        self.quadrature = Some(quad);

        let always = matches!(kind, Kind::Simulate | Kind::SamplePoints);
        let optional = matches!(kind, Kind::Cdf | Kind::Pdf);
        if always || (optional && (self.sim.is_some() || ov.trials.is_some() || ov.seed.is_some())) {
            let sim = self.sim.get_or_insert(SimSpec { trials: None, seed: None, truncation_radius: None, far_field: FarFieldSpec::Ignore });
            if let Some(t) = ov.trials {
                sim.trials = Some(t);
            }
            if let Some(s) = ov.seed {
                sim.seed = Some(s);
            }
            sim.trials.get_or_insert(DEFAULT_TRIALS);
            sim.seed.get_or_insert(DEFAULT_SEED);
        }
        self.validate(kind)?;
        Ok(self)
    }

    fn require<'a, U>(v: &'a Option<U>, key: &str, kind: Kind) -> Result<&'a U, CliError> {
        v.as_ref().ok_or_else(|| CliError::validation(format!("{key}: required for `{}`", kind.name())))
    }

    /// Checks everything that can be checked before any numerical work.
    pub fn validate(&self, kind: Kind) -> Result<(), CliError> {
        let spec = self.quad_spec()?;
        if let Some(sim) = &self.sim {
            if sim.trials == Some(0) {
                return Err(CliError::validation("sim.trials: must be >= 1"));
            }
            if let Some(r) = sim.truncation_radius {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(CliError::validation(format!("sim.truncation_radius: must be finite and > 0, got {r}")));
                }
            }
        }
        if kind == Kind::SamplePoints {
            let model = Self::require(&self.model, "model", kind)?.build()?;
            let r = *Self::require(&self.region_radius, "region_radius", kind)?;
            let region = DiskRegion::new(r).map_err(|e| CliError::validation(format!("region_radius: {e}")))?;
            model.mean_count(&region)?;
            return Ok(());
        }
        let link = Self::require(&self.link, "link", kind)?;
        match kind {
            Kind::OutageSweep => {
                let sweep = Self::require(&self.sweep, "sweep", kind)?;
                let eps = sweep.epsilons.values("sweep.epsilons", false)?;
                check_antennas(&sweep.antennas, "sweep.antennas")?;
                if !(sweep.tau > 0.0 && sweep.mean_count >= 0.0 && sweep.radius > 0.0) {
                    return Err(CliError::validation("sweep: need tau > 0, mean_count >= 0, radius > 0"));
                }
                for &e in &eps {
                    let model = IntensityModel::power_law(1.0, e).map_err(|err| CliError::validation(format!("sweep.epsilons: {err}")))?;
                    PsiEvaluator::new(model, link.alpha, spec, PsiMethod::Auto)
                        .map_err(|err| CliError::validation(format!("sweep.epsilons: {err}")))?;
                }
                for &l in &sweep.antennas {
                    LinkConfig::new(link.alpha, link.sigma2, link.r_t, l)?;
                }
                Ok(())
            }
            Kind::Scaling => {
                let scaling = Self::require(&self.scaling, "scaling", kind)?;
                check_antennas(&scaling.antennas, "scaling.antennas")?;
                if !(scaling.q > 0.0 && scaling.q.is_finite()) {
                    return Err(CliError::validation(format!("scaling.q: must be finite and > 0, got {}", scaling.q)));
                }
                let model = Self::require(&self.model, "model", kind)?.build()?;
                PsiEvaluator::new(model, link.alpha, spec, PsiMethod::Auto)?;
                LinkConfig::new(link.alpha, link.sigma2, link.r_t, scaling.antennas[0])?;
                self.single_grid(true)?;
                Ok(())
            }
            _ => {
                let model = Self::require(&self.model, "model", kind)?.build()?;
                let l = *Self::require(&link.antennas, "link.antennas", kind)?;
                LinkConfig::new(link.alpha, link.sigma2, link.r_t, l)?;
                PsiEvaluator::new(model, link.alpha, spec, PsiMethod::Auto)?;
                if kind == Kind::FitPoly {
                    let fit = Self::require(&self.fit, "fit", kind)?;
                    if fit.degrees.is_empty() {
                        return Err(CliError::validation("fit.degrees: must not be empty"));
                    }
                    if !(fit.r0 > 0.0 && fit.r0.is_finite()) {
                        return Err(CliError::validation(format!("fit.r0: must be finite and > 0, got {}", fit.r0)));
                    }
                    if !(fit.eps_tail < link.alpha - 2.0) {
                        return Err(CliError::validation(format!(
                            "fit.eps_tail: tail exponent must be < alpha - 2 = {}, got {}",
                            link.alpha - 2.0,
                            fit.eps_tail
                        )));
                    }
                }
                if kind != Kind::Simulate {
                    self.single_grid(true)?;
                } else if self.gamma_grid.is_some() || self.tau_grid.is_some() {
                    self.single_grid(false)?;
                }
                Ok(())
            }
        }
    }

    /// Exactly one of `gamma_grid`, `tau_grid` when `required`, at most one otherwise.
    fn single_grid(&self, required: bool) -> Result<(), CliError> {
        match (&self.gamma_grid, &self.tau_grid) {
            (Some(_), Some(_)) => Err(CliError::validation("gamma_grid/tau_grid: give only one of them")),
            (None, None) if required => Err(CliError::validation("gamma_grid/tau_grid: one of them is required")),
            (Some(g), None) => g.values("gamma_grid", true).map(|_| ()),
            (None, Some(t)) => t.values("tau_grid", true).map(|_| ()),
            (None, None) => Ok(()),
        }
    }

    pub fn quad_spec(&self) -> Result<QuadratureSpec<f64>, CliError> {
        match &self.quadrature {
            Some(q) => q.build(),
            None => Ok(QuadratureSpec::default()),
        }
    }

    /// Grid in `γ` units, from whichever grid was given.
    pub fn gammas(&self, alpha: f64, r_t: f64) -> Result<Vec<f64>, CliError> {
        match (&self.gamma_grid, &self.tau_grid) {
            (Some(g), None) => g.values("gamma_grid", true),
            (None, Some(t)) => Ok(t.values("tau_grid", true)?.into_iter().map(|x| x * r_t.powf(alpha)).collect()),
            _ => Err(CliError::validation("gamma_grid/tau_grid: exactly one of them is required")),
        }
    }

    pub fn has_grid(&self) -> bool {
        self.gamma_grid.is_some() || self.tau_grid.is_some()
    }
}

fn check_antennas(list: &[u32], key: &str) -> Result<(), CliError> {
    if list.is_empty() || list.contains(&0) {
        return Err(CliError::validation(format!("{key}: need a non-empty list of counts >= 1")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "model": {"family": "power_law", "rho": 0.023, "eps": -0.5},
        "link": {"alpha": 4, "sigma2": 1e-12, "r_t": 10, "antennas": 10},
        "tau_grid": {"min": 0.01, "max": 100, "points": 5},
        "output_path": "a.csv"
    }"#;

    #[test]
    fn log_and_linear_ranges() {
        let g = Grid::Range(Range { min: 0.01, max: 100.0, points: 5, spacing: Spacing::Log });
        let v = g.values("g", true).unwrap();
        for (a, b) in v.iter().zip([0.01, 0.1, 1.0, 10.0, 100.0]) {
            assert!((a / b - 1.0).abs() < 1e-14);
        }
        let g = Grid::Range(Range { min: -1.0, max: 0.0, points: 3, spacing: Spacing::Linear });
        assert_eq!(g.values("g", false).unwrap(), vec![-1.0, -0.5, 0.0]);
        assert!(g.values("g", true).is_err());
        assert!(Grid::Values(vec![]).values("g", true).is_err());
    }

    #[test]
    fn tau_grid_converts_to_gamma() {
        let cfg = parse_config(BASE).unwrap();
        let g = cfg.gammas(4.0, 10.0).unwrap();
        assert!((g[2] - 1e4).abs() < 1e-9);
    }

    #[test]
    fn overrides_win_and_defaults_fill() {
        let ov = Overrides { seed: Some(9), trials: Some(100), out: Some("b.csv".into()), tol: Some(1e-7) };
        let cfg = parse_config(BASE).unwrap().resolve(Kind::Cdf, &ov).unwrap();
        let sim = cfg.sim.as_ref().unwrap();
        assert_eq!((sim.seed, sim.trials), (Some(9), Some(100)));
        assert_eq!(cfg.output_path.as_deref(), Some(Path::new("b.csv")));
        assert_eq!(cfg.quad_spec().unwrap().rel_tol, 1e-7);

        // no simulation unless asked for
        let cfg = parse_config(BASE).unwrap().resolve(Kind::Cdf, &Overrides::default()).unwrap();
        assert!(cfg.sim.is_none());
        let cfg = parse_config(BASE).unwrap().resolve(Kind::Simulate, &Overrides::default()).unwrap();
        assert_eq!(cfg.sim.unwrap().trials, Some(DEFAULT_TRIALS));
    }

    #[test]
    fn kind_mismatch_and_missing_sections() {
        let mut cfg = parse_config(BASE).unwrap();
        cfg.kind = Some(Kind::Pdf);
        assert!(cfg.resolve(Kind::Cdf, &Overrides::default()).is_err());
        let err = parse_config(BASE).unwrap().resolve(Kind::Scaling, &Overrides::default()).unwrap_err();
        assert!(err.message.starts_with("scaling:"), "{}", err.message);
        let err = parse_config(BASE).unwrap().resolve(Kind::SamplePoints, &Overrides::default()).unwrap_err();
        assert!(err.message.starts_with("region_radius:"), "{}", err.message);
    }

    #[test]
    fn gaussian_needs_exactly_one_scale() {
        let both = ModelSpec::GaussianCluster { rho: Some(1.0), mean_count: Some(10.0), v: 1.0, beta: None };
        assert!(both.build().is_err());
        let one = ModelSpec::GaussianCluster { rho: None, mean_count: Some(10.0), v: 1.0, beta: Some(2.0) };
        let m = one.build().unwrap();
        assert!((m.mean_count(&DiskRegion::infinite()).unwrap() - 20.0).abs() < 1e-9);
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = parse_config(BASE).unwrap().resolve(Kind::Simulate, &Overrides::default()).unwrap();
        let back = parse_config(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, back);
    }
}
