//! Monte-Carlo realization of the network: Poisson interferers inside a
//! truncation disk, i.i.d. Rayleigh fading, and the MMSE SINR of each trial.
//!
//! Trial `t` of a campaign draws from the ChaCha8 stream `t` of the key
//! derived from the campaign seed, so a campaign is a pure function of
//! `(seed, t)` and does not depend on scheduling or thread count.

mod empirical;
mod linalg;

pub use empirical::{empirical_cdf, ks_critical_value, ks_distance, EmpiricalDistribution};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;

use crate::distribution::LinkConfig;
use crate::error::{Error, Result};
use crate::intensity::{DiskRegion, IntensityModel, Profile, RadialSampler};
use crate::psi::{psi_annulus_quadrature, PsiEvaluator};
use crate::scalar::Scalar;
use crate::specfun::{integrate_with_hints, EndpointHints, QuadratureSpec};

/// Truncation radius used for Gaussian clusters when it already meets the
/// tail criterion, in units of `v`.
pub const GAUSSIAN_TRUNCATION: f64 = 8.0;

/// Default bound on the neglected part of `ψ`, relative to `ψ` itself.
pub const TRUNCATION_REL_TOL: f64 = 1e-3;

/// Treatment of interferers beyond the truncation radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FarField {
    /// Drop them.
    #[default]
    Ignore,
    /// Add their mean received power `2π ∫_{R}^∞ Λ(r) r^{1−α} dr` to the
    /// noise.
    Compensate,
}

/// One Monte-Carlo campaign.
#[derive(Debug, Clone)]
pub struct SimConfig<T> {
    pub trials: usize,
    pub truncation_radius: T,
    pub seed: u64,
    pub link: LinkConfig<T>,
    pub model: IntensityModel<T>,
    pub far_field: FarField,
}

impl<T: Scalar> SimConfig<T> {
    pub fn new(
        trials: usize,
        truncation_radius: T,
        seed: u64,
        link: LinkConfig<T>,
        model: IntensityModel<T>,
        far_field: FarField,
    ) -> Result<Self> {
        if trials < 1 {
            return Err(Error::Domain("trial count must be >= 1".into()));
        }
        if !(truncation_radius > T::zero() && truncation_radius.is_finite()) {
            return Err(Error::Domain(format!("truncation radius must be finite and > 0, got {truncation_radius}")));
        }
        model.mean_count(&DiskRegion::new(truncation_radius)?)?;
        Ok(Self { trials, truncation_radius, seed, link, model, far_field })
    }

    /// Picks the truncation radius with [`choose_truncation_radius`] for the
    /// `1 − 1e-4` quantile of the analytic distribution.
    pub fn with_auto_radius(
        trials: usize,
        seed: u64,
        link: LinkConfig<T>,
        model: IntensityModel<T>,
        far_field: FarField,
    ) -> Result<Self> {
        let dist = crate::distribution::SinrDistribution::from_model(model.clone(), link)?;
        let gamma_max = dist.quantile_gamma(T::one() - T::lit(1e-4))?;
        let r = choose_truncation_radius(&model, link.alpha, gamma_max, far_field, T::lit(TRUNCATION_REL_TOL), &tail_spec())?;
        Self::new(trials, r, seed, link, model, far_field)
    }
}

/// Relative-only error control for tail integrals, whose values can sit far
/// below any fixed absolute tolerance (noise powers go down to 1e-14).
pub fn tail_spec<T: Scalar>() -> QuadratureSpec<T> {
    let d = QuadratureSpec::default();
    QuadratureSpec { abs_tol: T::zero(), ..d }
}

/// Mean received power from interferers beyond `radius`,
/// `2π ∫_R^∞ Λ(r) r^{1−α} dr`.
pub fn far_field_power<T: Scalar>(model: &IntensityModel<T>, alpha: T, radius: T, spec: &QuadratureSpec<T>) -> Result<T> {
    PsiEvaluator::new(model.clone(), alpha, *spec, crate::psi::PsiMethod::Quadrature)?;
    let top = model.support_radius();
    if !(top > radius) || model.beta() == T::zero() {
        return Ok(T::zero());
    }
    if let Profile::PowerLaw { rho, eps } = model.profile() {
        let q = alpha - T::lit(2.0) - *eps;
        return Ok(model.beta() * T::TAU() * *rho * radius.powf(-q) / q);
    }
    let mut pts = vec![radius];
    pts.extend(model.breakpoints().into_iter().filter(|&b| b > radius && b < top));
    pts.push(top);
    let decay = model.tail_exponent().map_or(T::lit(4.0), |e| alpha - T::one() - e);
    let hints = EndpointHints { origin_power: T::zero(), tail_decay: decay };
    Ok(integrate_with_hints(|r| T::TAU() * model.radial(r) * r.powf(T::one() - alpha), &pts, hints, spec)?.value)
}

/// Error in `ψ(γ)` left by truncating at `radius`: the whole tail when it
/// is ignored, or `2π ∫_R^∞ Λ r t²/(1+t) dr` (`t = γ r^{−α}`) when its mean
/// power is folded into the noise.
pub fn truncation_residual<T: Scalar>(
    model: &IntensityModel<T>,
    alpha: T,
    gamma: T,
    radius: T,
    far_field: FarField,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    match far_field {
        FarField::Ignore => psi_annulus_quadrature(model, alpha, gamma, radius, T::infinity(), spec),
        FarField::Compensate => {
            let top = model.support_radius();
            if !(top > radius) {
                return Ok(T::zero());
            }
            let mut pts = vec![radius];
            pts.extend(model.breakpoints().into_iter().filter(|&b| b > radius && b < top));
            pts.push(top);
            let decay = model.tail_exponent().map_or(T::lit(4.0), |e| T::lit(2.0) * alpha - T::one() - e);
            let hints = EndpointHints { origin_power: T::zero(), tail_decay: decay };
            let rc = gamma.powf(alpha.recip());
            let f = |r: T| {
                let t = (rc / r).powf(alpha);
                T::TAU() * model.radial(r) * r * t * t / (T::one() + t)
            };
            Ok(integrate_with_hints(f, &pts, hints, spec)?.value)
        }
    }
}

/// Smallest practical `R_sim` with truncation residual below
/// `rel_tol · ψ(γ_max)`.
///
/// Power laws use the analytic tail bound; Gaussian clusters take `8v` when
/// that suffices; everything else is found by doubling and bisection on the
/// quadrature residual.
pub fn choose_truncation_radius<T: Scalar>(
    model: &IntensityModel<T>,
    alpha: T,
    gamma_max: T,
    far_field: FarField,
    rel_tol: T,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    if !(gamma_max > T::zero() && gamma_max.is_finite()) {
        return Err(Error::Domain(format!("largest gamma must be finite and > 0, got {gamma_max}")));
    }
    let psi = PsiEvaluator::new(model.clone(), alpha, *spec, crate::psi::PsiMethod::Auto)?.psi(gamma_max)?;
    let budget = rel_tol * psi;
    if let Profile::PowerLaw { rho, eps } = model.profile() {
        // ψ_tail <= 2πργ R^{2+ε−α}/(α−2−ε); compensated: 2πργ² R^{2+ε−2α}/(2α−2−ε)
        let (power, q) = match far_field {
            FarField::Ignore => (gamma_max, alpha - T::lit(2.0) - *eps),
            FarField::Compensate => (gamma_max * gamma_max, T::lit(2.0) * alpha - T::lit(2.0) - *eps),
        };
        let scale = model.beta() * T::TAU() * *rho * power / (q * budget);
        return Ok(scale.powf(q.recip()));
    }
    let residual = |r: T| truncation_residual(model, alpha, gamma_max, r, far_field, spec);
    let top = model.support_radius();
    let mut hi = match model.profile() {
        Profile::GaussianCluster { v, .. } => *v * T::lit(GAUSSIAN_TRUNCATION),
        _ => {
            let mut start = gamma_max.powf(alpha.recip());
            for b in model.breakpoints() {
                start = start.max(b);
            }
            start
        }
    };
    if hi >= top {
        return Ok(top);
    }
    if residual(hi)? <= budget {
        return Ok(hi);
    }
    let mut lo = hi;
    let mut doublings = 0;
    while residual(hi)? > budget {
        lo = hi;
        hi = hi * T::lit(2.0);
        doublings += 1;
        if hi >= top {
            return Ok(top);
        }
        if doublings > 200 {
            return Err(Error::Bracketing("no truncation radius meets the tail criterion".into()));
        }
    }
    for _ in 0..40 {
        let mid = (lo * hi).sqrt();
        if residual(mid)? > budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Channel realization: target vector and interferer columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Channels<T> {
    pub target: Vec<Complex<T>>,
    /// Column `i` (interferer `i`) is `interferers[i*L .. (i+1)*L]`.
    pub interferers: Vec<Complex<T>>,
    pub antennas: usize,
}

impl<T: Scalar> Channels<T> {
    pub fn interferer(&self, i: usize) -> &[Complex<T>] {
        &self.interferers[i * self.antennas..(i + 1) * self.antennas]
    }
}

/// Per-trial outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult<T> {
    pub sinr: T,
    pub n_interferers: usize,
}

fn complex_normal<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(T::lit(re * std::f64::consts::FRAC_1_SQRT_2), T::lit(im * std::f64::consts::FRAC_1_SQRT_2))
}

/// `CN(0, 1)` entries: the target vector first, then interferer columns.
pub fn draw_channels<T: Scalar, R: Rng + ?Sized>(n: usize, antennas: usize, rng: &mut R) -> Channels<T> {
    let target = (0..antennas).map(|_| complex_normal(rng)).collect();
    let interferers = (0..n * antennas).map(|_| complex_normal(rng)).collect();
    Channels { target, interferers, antennas }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<usize> {
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::Domain(format!("poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as usize)
}

/// Interferer distances of one network: `n ~ Poisson(μ)` radii from the
/// radial marginal. `sampler` may be `None` only when `mean == 0`.
pub fn draw_network<T: Scalar, R: Rng + ?Sized>(sampler: Option<&RadialSampler<T>>, mean: T, rng: &mut R) -> Result<Vec<T>> {
    let n = poisson_count(mean.as_f64(), rng)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let s = sampler.ok_or_else(|| Error::InvalidModel("nonzero mean count without a sampler".into()))?;
    Ok((0..n).map(|_| s.sample_radius(rng)).collect())
}

/// Cartesian node positions of one network inside `region`.
pub fn draw_points<T: Scalar, R: Rng + ?Sized>(model: &IntensityModel<T>, region: &DiskRegion<T>, rng: &mut R) -> Result<Vec<(T, T)>> {
    let mean = model.mean_count(region)?;
    let n = poisson_count(mean.as_f64(), rng)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let s = model.sampler(region)?;
    Ok((0..n)
        .map(|_| {
            let (r, th) = s.sample_location(rng);
            (r * th.cos(), r * th.sin())
        })
        .collect())
}

/// `r_T^{−α} g_Tᴴ (Σ r_i^{−α} g_i g_iᴴ + σ²I)^{−1} g_T` via Cholesky.
pub fn mmse_sinr<T: Scalar>(radii: &[T], channels: &Channels<T>, link: &LinkConfig<T>) -> Result<T> {
    let l = channels.antennas;
    let forms = mmse_nested(radii, channels, link.alpha, link.sigma2, l)?;
    Ok(forms[l - 1] / link.gamma_scale())
}

/// Quadratic forms `g_Tᴴ K⁻¹ g_T` for the leading `1..=l` antennas.
fn mmse_nested<T: Scalar>(radii: &[T], channels: &Channels<T>, alpha: T, noise: T, l: usize) -> Result<Vec<T>> {
    if channels.target.len() != channels.antennas || channels.interferers.len() != radii.len() * channels.antennas {
        return Err(Error::Domain("channel dimensions do not match the network".into()));
    }
    if l < 1 || l > channels.antennas {
        return Err(Error::Domain(format!("cannot use {l} of {} antennas", channels.antennas)));
    }
    let powers: Vec<T> = radii.iter().map(|r| r.powf(-alpha)).collect();
    let mut k = linalg::gram(noise, &powers, &channels.interferers, channels.antennas, l);
    linalg::cholesky(&mut k, l)?;
    Ok(linalg::forward_quadratic_forms(&k, &channels.target, l))
}

/// Stream of trial `t` for a campaign seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

struct Prepared<T> {
    sampler: Option<RadialSampler<T>>,
    mean: T,
    noise: T,
}

fn prepare<T: Scalar>(sim: &SimConfig<T>) -> Result<Prepared<T>> {
    let region = DiskRegion::new(sim.truncation_radius)?;
    let mean = sim.model.mean_count(&region)?;
    let sampler = if mean > T::zero() { Some(sim.model.sampler(&region)?) } else { None };
    let far = match sim.far_field {
        FarField::Ignore => T::zero(),
        FarField::Compensate => far_field_power(&sim.model, sim.link.alpha, sim.truncation_radius, &tail_spec())?,
    };
    Ok(Prepared { sampler, mean, noise: sim.link.sigma2 + far })
}

/// Effective noise of a campaign: `σ²` plus the compensated far field.
pub fn effective_noise<T: Scalar>(sim: &SimConfig<T>) -> Result<T> {
    Ok(prepare(sim)?.noise)
}

fn run_nested<T: Scalar>(sim: &SimConfig<T>, antennas: usize) -> Result<Vec<(usize, Vec<T>)>> {
    let prep = prepare(sim)?;
    let scale = sim.link.gamma_scale();
    (0..sim.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(sim.seed, t);
            let radii = draw_network(prep.sampler.as_ref(), prep.mean, &mut rng)?;
            let ch = draw_channels(radii.len(), antennas, &mut rng);
            let forms = mmse_nested(&radii, &ch, sim.link.alpha, prep.noise, antennas)?;
            Ok((radii.len(), forms.into_iter().map(|f| f / scale).collect()))
        })
        .collect()
}

/// Every trial of the campaign, in trial order.
pub fn run_trials<T: Scalar>(sim: &SimConfig<T>) -> Result<Vec<TrialResult<T>>> {
    let l = sim.link.antennas as usize;
    Ok(run_nested(sim, l)?
        .into_iter()
        .map(|(n, s)| TrialResult { sinr: s[l - 1], n_interferers: n })
        .collect())
}

/// Sorted SINR samples of the campaign.
pub fn run_campaign<T: Scalar>(sim: &SimConfig<T>) -> Result<EmpiricalDistribution<T>> {
    EmpiricalDistribution::new(run_trials(sim)?.into_iter().map(|t| t.sinr).collect())
}

/// One campaign evaluated at several antenna counts with common random
/// numbers: each trial draws channels for the largest count and smaller
/// receivers use the leading antennas. `sim.link.antennas` is ignored.
pub fn run_campaign_antennas<T: Scalar>(sim: &SimConfig<T>, antennas: &[u32]) -> Result<Vec<EmpiricalDistribution<T>>> {
    let lmax = *antennas.iter().max().ok_or_else(|| Error::Domain("empty antenna list".into()))? as usize;
    if antennas.contains(&0) {
        return Err(Error::Domain("antenna counts must be >= 1".into()));
    }
    let rows = run_nested(sim, lmax)?;
    antennas
        .iter()
        .map(|&l| EmpiricalDistribution::new(rows.iter().map(|(_, s)| s[l as usize - 1]).collect()))
        .collect()
}
