//! Circularly symmetric intensity functions `Λ(r)` of the interferer point
//! process, their mean node counts and location densities.

mod fit;
mod sampling;

pub use fit::{fit_polynomial, PolynomialFit, MAX_FIT_DEGREE};
pub use sampling::{sample_location, RadialSampler, INVERSE_TABLE_KNOTS};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::specfun::regularized_gamma_pair;

/// Grid size of the construction-time nonnegativity check for polynomials.
pub const NONNEGATIVITY_GRID: usize = 1024;

/// One ring `(R_{k−1}, R_k]` of a piecewise power law with intensity `ρ r^ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawSegment<T> {
    pub rho: T,
    pub eps: T,
    /// `R_k`; only the last segment may be `+∞`.
    pub outer_radius: T,
}

/// Shape of the nominal intensity `Λ_c(r)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile<T> {
    /// `ρ r^ε`.
    PowerLaw { rho: T, eps: T },
    /// `ρ_k r^{ε_k}` on `(R_{k−1}, R_k]`, `R_0 = 0`, zero beyond the last radius.
    PiecewisePowerLaw { segments: Vec<PowerLawSegment<T>> },
    /// `Σ a_k r^k` on `[0, R_0]`, `ρ_0 r^ε` beyond.
    PolynomialWithTail { coeffs: Vec<T>, r0: T, rho0: T, eps_tail: T },
    /// `ρ (r / v²) e^{−r² / 2v²}`.
    GaussianCluster { rho: T, v: T },
}

/// `Λ(r) = β Λ_c(r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityModel<T> {
    profile: Profile<T>,
    beta: T,
}

/// Disk of radius `R` centred on the receiver; `R` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskRegion<T> {
    radius: T,
}

impl<T: Scalar> DiskRegion<T> {
    pub fn new(radius: T) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::InvalidModel(format!("disk radius must be > 0, got {radius}")));
        }
        Ok(Self { radius })
    }

    pub fn infinite() -> Self {
        Self { radius: T::infinity() }
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn is_bounded(&self) -> bool {
        self.radius.is_finite()
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidModel(msg()))
    }
}

fn check_density<T: Scalar>(name: &str, rho: T) -> Result<()> {
    check(rho >= T::zero() && rho.is_finite(), || format!("{name} must be finite and >= 0, got {rho}"))
}

/// Mass of `ρ r^ε` over the ring `(a, b]`, i.e. `2πρ ∫_a^b r^{1+ε} dr`.
pub(crate) fn power_shell_mass<T: Scalar>(rho: T, eps: T, a: T, b: T) -> Result<T> {
    if rho == T::zero() || !(b > a) {
        return Ok(T::zero());
    }
    let two_pi = T::TAU();
    let p = eps + T::lit(2.0);
    if p == T::zero() {
        if a == T::zero() || b.is_infinite() {
            return Err(Error::Divergence(format!("∫ r^{{-1}} dr over ({a}, {b}]")));
        }
        return Ok(two_pi * rho * (b / a).ln());
    }
    if (p < T::zero() && a == T::zero()) || (p > T::zero() && b.is_infinite()) {
        return Err(Error::Divergence(format!(
            "mean count of ρ r^ε with ε = {eps} over ({a}, {b}] is infinite"
        )));
    }
    Ok(two_pi * rho * (b.powf(p) - a.powf(p)) / p)
}

fn polynomial_value<T: Scalar>(coeffs: &[T], r: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * r + c)
}

/// `2π ∫₀^r Σ a_k s^{k+1} ds`.
fn polynomial_mass<T: Scalar>(coeffs: &[T], r: T) -> T {
    let mut acc = T::zero();
    for (k, &c) in coeffs.iter().enumerate().rev() {
        acc = acc * r + c / T::from_count(k + 2);
    }
    T::TAU() * acc * r * r
}

impl<T: Scalar> IntensityModel<T> {
    /// `ρ r^ε` with `ε > −2`.
    pub fn power_law(rho: T, eps: T) -> Result<Self> {
        check_density("power-law density rho", rho)?;
        check(eps > T::lit(-2.0) && eps.is_finite(), || {
            format!("power-law exponent must satisfy eps > -2, got {eps}")
        })?;
        Ok(Self { profile: Profile::PowerLaw { rho, eps }, beta: T::one() })
    }

    /// Rings `(R_{k−1}, R_k]` with strictly increasing radii; the innermost
    /// exponent must exceed −2 and only the last radius may be infinite.
    pub fn piecewise_power_law(segments: Vec<PowerLawSegment<T>>) -> Result<Self> {
        check(!segments.is_empty(), || "piecewise power law needs at least one segment".into())?;
        let mut inner = T::zero();
        for (k, s) in segments.iter().enumerate() {
            check_density(&format!("segment {} density rho", k + 1), s.rho)?;
            check(s.eps.is_finite(), || format!("segment {} exponent must be finite", k + 1))?;
            check(s.outer_radius > inner, || {
                format!(
                    "segment radii must be strictly increasing: R_{} = {} is not above {}",
                    k + 1,
                    s.outer_radius,
                    inner
                )
            })?;
            check(s.outer_radius.is_finite() || k + 1 == segments.len(), || {
                format!("only the last segment may extend to infinity (segment {})", k + 1)
            })?;
            inner = s.outer_radius;
        }
        check(segments[0].eps > T::lit(-2.0), || {
            format!("innermost segment exponent must satisfy eps > -2, got {}", segments[0].eps)
        })?;
        Ok(Self { profile: Profile::PiecewisePowerLaw { segments }, beta: T::one() })
    }

    /// Polynomial `Σ a_k r^k` on `[0, R_0]` and `ρ_0 r^ε` beyond, with
    /// `−2 < ε < −1`. The polynomial is checked for nonnegativity on a
    /// 1024-point grid.
    pub fn polynomial_with_tail(coeffs: Vec<T>, r0: T, rho0: T, eps_tail: T) -> Result<Self> {
        check(!coeffs.is_empty(), || "polynomial needs at least one coefficient".into())?;
        check(coeffs.iter().all(|c| c.is_finite()), || "polynomial coefficients must be finite".into())?;
        check(r0 > T::zero() && r0.is_finite(), || format!("boundary radius R0 must be > 0, got {r0}"))?;
        check(rho0 > T::zero() && rho0.is_finite(), || format!("tail density rho0 must be > 0, got {rho0}"))?;
        check(eps_tail > T::lit(-2.0) && eps_tail < -T::one(), || {
            format!("tail exponent must satisfy -2 < eps_tail < -1, got {eps_tail}")
        })?;
        let n = NONNEGATIVITY_GRID;
        let values: Vec<T> = (0..n)
            .map(|i| polynomial_value(&coeffs, r0 * T::from_count(i) / T::from_count(n - 1)))
            .collect();
        let scale = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let slack = scale * T::epsilon() * T::lit(64.0);
        if let Some((i, v)) = values.iter().enumerate().find(|(_, &v)| v < -slack) {
            return Err(Error::InvalidModel(format!(
                "polynomial intensity is negative on [0, R0]: {} at r = {}",
                v,
                r0 * T::from_count(i) / T::from_count(n - 1)
            )));
        }
        Ok(Self { profile: Profile::PolynomialWithTail { coeffs, r0, rho0, eps_tail }, beta: T::one() })
    }

    /// `ρ (r/v²) e^{−r²/2v²}`.
    pub fn gaussian_cluster(rho: T, v: T) -> Result<Self> {
        check_density("gaussian cluster density rho", rho)?;
        check(v > T::zero() && v.is_finite(), || format!("gaussian cluster width v must be > 0, got {v}"))?;
        Ok(Self { profile: Profile::GaussianCluster { rho, v }, beta: T::one() })
    }

    /// Gaussian cluster whose total mean count over the plane is `mean_count`.
    pub fn gaussian_cluster_with_mean(mean_count: T, v: T) -> Result<Self> {
        let unit = Self::gaussian_cluster(T::one(), v)?;
        let mass = unit.mean_count(&DiskRegion::infinite())?;
        Self::gaussian_cluster(mean_count / mass, v)
    }

    /// Same shape with nominal density `β`.
    pub fn with_beta(mut self, beta: T) -> Result<Self> {
        check(beta >= T::zero() && beta.is_finite(), || format!("density scale beta must be >= 0, got {beta}"))?;
        self.beta = beta;
        Ok(self)
    }

    pub fn profile(&self) -> &Profile<T> {
        &self.profile
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// The same model with `β = 1`.
    pub fn nominal(&self) -> Self {
        Self { profile: self.profile.clone(), beta: T::one() }
    }

    /// `Λ(r)`, including `β`.
    pub fn radial(&self, r: T) -> T {
        self.beta * self.nominal_radial(r)
    }

    /// `Λ(r, θ)`; every model is independent of `θ`.
    pub fn intensity(&self, r: T, _theta: T) -> T {
        self.radial(r)
    }

    /// `Λ_c(r)`.
    pub fn nominal_radial(&self, r: T) -> T {
        if r < T::zero() {
            return T::zero();
        }
        match &self.profile {
            Profile::PowerLaw { rho, eps } => *rho * r.powf(*eps),
            Profile::PiecewisePowerLaw { segments } => segments
                .iter()
                .find(|s| r <= s.outer_radius)
                .map_or(T::zero(), |s| s.rho * r.powf(s.eps)),
            Profile::PolynomialWithTail { coeffs, r0, rho0, eps_tail } => {
                if r <= *r0 {
                    polynomial_value(coeffs, r)
                } else {
                    *rho0 * r.powf(*eps_tail)
                }
            }
            Profile::GaussianCluster { rho, v } => {
                let v2 = *v * *v;
                *rho * r / v2 * (-(r * r) / (T::lit(2.0) * v2)).exp()
            }
        }
    }

    /// Radii where `Λ` is discontinuous or changes formula.
    pub fn breakpoints(&self) -> Vec<T> {
        match &self.profile {
            Profile::PowerLaw { .. } | Profile::GaussianCluster { .. } => Vec::new(),
            Profile::PiecewisePowerLaw { segments } => {
                segments.iter().map(|s| s.outer_radius).filter(|r| r.is_finite()).collect()
            }
            Profile::PolynomialWithTail { r0, .. } => vec![*r0],
        }
    }

    /// Exponent `p` with `Λ(r) ~ r^p` near the origin.
    pub fn origin_exponent(&self) -> T {
        match &self.profile {
            Profile::PowerLaw { eps, .. } => *eps,
            Profile::PiecewisePowerLaw { segments } => segments[0].eps,
            Profile::PolynomialWithTail { .. } => T::zero(),
            Profile::GaussianCluster { .. } => T::one(),
        }
    }

    /// Exponent `ε` with `Λ(r) ~ r^ε` as `r → ∞`; `None` for compactly
    /// supported or faster-than-algebraic decay.
    pub fn tail_exponent(&self) -> Option<T> {
        match &self.profile {
            Profile::PowerLaw { eps, .. } => Some(*eps),
            Profile::PiecewisePowerLaw { segments } => {
                let last = segments[segments.len() - 1];
                last.outer_radius.is_infinite().then_some(last.eps)
            }
            Profile::PolynomialWithTail { eps_tail, .. } => Some(*eps_tail),
            Profile::GaussianCluster { .. } => None,
        }
    }

    /// Outermost radius with nonzero intensity (`+∞` when unbounded).
    pub fn support_radius(&self) -> T {
        match &self.profile {
            Profile::PiecewisePowerLaw { segments } => segments[segments.len() - 1].outer_radius,
            _ => T::infinity(),
        }
    }

    /// Relative mismatch `|Σ a_k R_0^k − ρ_0 R_0^ε| / (ρ_0 R_0^ε)` at the
    /// polynomial boundary; `None` for other families.
    pub fn boundary_mismatch(&self) -> Option<T> {
        match &self.profile {
            Profile::PolynomialWithTail { coeffs, r0, rho0, eps_tail } => {
                let tail = *rho0 * r0.powf(*eps_tail);
                Some((polynomial_value(coeffs, *r0) - tail).abs() / tail)
            }
            _ => None,
        }
    }

    /// Warning text when the polynomial and its tail disagree by more than
    /// 10% at `R_0`. Continuity is not required.
    pub fn continuity_warning(&self) -> Option<String> {
        let gap = self.boundary_mismatch()?;
        (gap > T::lit(0.1)).then(|| {
            format!("polynomial and power-law tail differ by {:.1}% at R0", gap.as_f64() * 100.0)
        })
    }

    /// Mean number of nodes `μ` in `region`.
    pub fn mean_count(&self, region: &DiskRegion<T>) -> Result<T> {
        if self.beta == T::zero() {
            return Ok(T::zero());
        }
        Ok(self.beta * self.nominal_mass_within(region.radius())?)
    }

    /// `2π ∫₀^r s Λ_c(s) ds`.
    pub(crate) fn nominal_mass_within(&self, r: T) -> Result<T> {
        if r <= T::zero() {
            return Ok(T::zero());
        }
        match &self.profile {
            Profile::PowerLaw { rho, eps } => power_shell_mass(*rho, *eps, T::zero(), r),
            Profile::PiecewisePowerLaw { segments } => {
                let mut inner = T::zero();
                let mut total = T::zero();
                for s in segments {
                    if inner >= r {
                        break;
                    }
                    total = total + power_shell_mass(s.rho, s.eps, inner, s.outer_radius.min(r))?;
                    inner = s.outer_radius;
                }
                Ok(total)
            }
            Profile::PolynomialWithTail { coeffs, r0, rho0, eps_tail } => {
                let disk = polynomial_mass(coeffs, r.min(*r0));
                if r > *r0 {
                    Ok(disk + power_shell_mass(*rho0, *eps_tail, *r0, r)?)
                } else {
                    Ok(disk)
                }
            }
            Profile::GaussianCluster { rho, v } => {
                // 2πρ v √(π/2) P(3/2, r²/2v²)
                let u = if r.is_infinite() { T::infinity() } else { r * r / (T::lit(2.0) * *v * *v) };
                let (p, _) = regularized_gamma_pair(T::lit(1.5), u)?;
                Ok(T::TAU() * *rho * *v * T::FRAC_PI_2().sqrt() * p)
            }
        }
    }

    /// Location density `f(r, θ) = (r/μ) Λ(r, θ) 1{0 <= r < R}`.
    pub fn location_pdf(&self, region: &DiskRegion<T>, r: T, theta: T) -> Result<T> {
        let mu = self.mean_count(region)?;
        if !(mu > T::zero()) {
            return Err(Error::InvalidModel("location density of a model with zero mean count".into()));
        }
        if r < T::zero() || r >= region.radius() {
            return Ok(T::zero());
        }
        Ok(r / mu * self.intensity(r, theta))
    }

    /// Radial marginal `2π r Λ(r) / μ`.
    pub fn radial_pdf(&self, region: &DiskRegion<T>, r: T) -> Result<T> {
        Ok(T::TAU() * self.location_pdf(region, r, T::zero())?)
    }

    /// Radial CDF `μ(r) / μ(R)`.
    pub fn radial_cdf(&self, region: &DiskRegion<T>, r: T) -> Result<T> {
        let total = self.nominal_mass_within(region.radius())?;
        if !(total > T::zero()) {
            return Err(Error::InvalidModel("radial CDF of a model with zero mean count".into()));
        }
        Ok((self.nominal_mass_within(r.min(region.radius()))? / total).min(T::one()))
    }

    /// Prepared inverse-CDF sampler for locations inside `region`.
    pub fn sampler(&self, region: &DiskRegion<T>) -> Result<RadialSampler<T>> {
        RadialSampler::new(self, region)
    }
}
