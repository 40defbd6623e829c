//! CDF and PDF of the distance-normalized SINR `γ = SINR · r_T^α`:
//! `F(γ) = 1 − Q(L, ψ(γ) + σ²γ)` with `Q` the upper regularized gamma.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::intensity::{fit_polynomial, IntensityModel, PolynomialFit};
use crate::psi::{psi_polynomial, psi_profile_quadrature, PsiEvaluator};
use crate::scalar::Scalar;
use crate::specfun::{ln_factorial, ln_gamma, regularized_gamma_pair_int, regularized_upper_gamma, EndpointHints, QuadratureSpec};

/// Largest antenna count accepted by [`SinrDistribution::cdf_gamma_double_sum`].
pub const DOUBLE_SUM_MAX_ANTENNAS: u32 = 64;

/// Target link and receiver parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig<T> {
    pub alpha: T,
    pub sigma2: T,
    pub r_t: T,
    pub antennas: u32,
}

impl<T: Scalar> LinkConfig<T> {
    pub fn new(alpha: T, sigma2: T, r_t: T, antennas: u32) -> Result<Self> {
        let fail = |m: String| Err(Error::Domain(m));
        if !(alpha > T::lit(2.0) && alpha.is_finite()) {
            return fail(format!("path-loss exponent must satisfy alpha > 2, got {alpha}"));
        }
        if !(sigma2 >= T::zero() && sigma2.is_finite()) {
            return fail(format!("noise power must be finite and >= 0, got {sigma2}"));
        }
        if !(r_t > T::zero() && r_t.is_finite()) {
            return fail(format!("target distance r_T must be > 0, got {r_t}"));
        }
        if antennas < 1 {
            return fail("antenna count L must be >= 1".into());
        }
        Ok(Self { alpha, sigma2, r_t, antennas })
    }

    /// `r_T^α`, the factor mapping SINR to `γ`.
    pub fn gamma_scale(&self) -> T {
        self.r_t.powf(self.alpha)
    }

    pub fn with_antennas(self, antennas: u32) -> Result<Self> {
        Self::new(self.alpha, self.sigma2, self.r_t, antennas)
    }
}

/// `1 − Q(L, s)` with `s = ψ + σ²γ`.
pub fn cdf_from_psi<T: Scalar>(antennas: u32, psi: T, sigma2: T, gamma: T) -> Result<T> {
    Ok(regularized_gamma_pair_int(antennas, psi + sigma2 * gamma)?.0)
}

/// SINR distribution for one model and link.
#[derive(Debug, Clone)]
pub struct SinrDistribution<T> {
    psi: PsiEvaluator<T>,
    link: LinkConfig<T>,
}

impl<T: Scalar> SinrDistribution<T> {
    pub fn new(psi: PsiEvaluator<T>, link: LinkConfig<T>) -> Result<Self> {
        if psi.alpha() != link.alpha {
            return Err(Error::Domain(format!(
                "psi evaluator uses alpha = {} but the link uses alpha = {}",
                psi.alpha(),
                link.alpha
            )));
        }
        Ok(Self { psi, link })
    }

    /// Evaluator with default quadrature and automatic method choice.
    pub fn from_model(model: IntensityModel<T>, link: LinkConfig<T>) -> Result<Self> {
        Self::new(PsiEvaluator::with_defaults(model, link.alpha)?, link)
    }

    pub fn psi(&self) -> &PsiEvaluator<T> {
        &self.psi
    }

    pub fn link(&self) -> &LinkConfig<T> {
        &self.link
    }

    pub fn with_antennas(&self, antennas: u32) -> Result<Self> {
        Ok(Self { psi: self.psi.clone(), link: self.link.with_antennas(antennas)? })
    }

    pub fn with_beta(&self, beta: T) -> Result<Self> {
        Ok(Self { psi: self.psi.with_beta(beta)?, link: self.link })
    }

    /// `ψ(γ) + σ²γ`.
    pub fn poisson_argument(&self, gamma: T) -> Result<T> {
        Ok(self.psi.psi(gamma)? + self.link.sigma2 * gamma)
    }

    /// `(F(γ), 1 − F(γ))`, each accurate in its own tail.
    pub fn cdf_pair(&self, gamma: T) -> Result<(T, T)> {
        regularized_gamma_pair_int(self.link.antennas, self.poisson_argument(gamma)?)
    }

    /// `F(γ) = 1 − Q(L, ψ(γ) + σ²γ)`.
    pub fn cdf_gamma(&self, gamma: T) -> Result<T> {
        Ok(self.cdf_pair(gamma)?.0)
    }

    /// `1 − F(γ)`.
    pub fn ccdf_gamma(&self, gamma: T) -> Result<T> {
        Ok(self.cdf_pair(gamma)?.1)
    }

    /// `Pr{SINR <= x}`.
    pub fn cdf_sinr(&self, sinr: T) -> Result<T> {
        self.cdf_gamma(sinr * self.link.gamma_scale())
    }

    /// The CDF as
    /// `1 − e^{−σ²γ} Σ_{i<L} Σ_{k<=i} (σ²γ)^{i−k}/(i−k)! · ψ^k e^{−ψ}/k!`,
    /// kept as an independent check of [`Self::cdf_gamma`].
    pub fn cdf_gamma_double_sum(&self, gamma: T) -> Result<T> {
        let l = self.link.antennas;
        if l > DOUBLE_SUM_MAX_ANTENNAS {
            return Err(Error::Domain(format!(
                "double-sum CDF supports L <= {DOUBLE_SUM_MAX_ANTENNAS}, got {l}"
            )));
        }
        let psi = self.psi.psi(gamma)?;
        let noise = self.link.sigma2 * gamma;
        let n = l as usize;
        let mut noise_terms = Vec::with_capacity(n);
        let mut psi_terms = Vec::with_capacity(n);
        let (mut a, mut b) = (T::one(), T::one());
        for j in 0..n {
            if j > 0 {
                a = a * noise / T::from_count(j);
                b = b * psi / T::from_count(j);
            }
            noise_terms.push(a);
            psi_terms.push(b);
        }
        let mut sum = T::zero();
        for i in 0..n {
            for k in 0..=i {
                sum = sum + noise_terms[i - k] * psi_terms[k];
            }
        }
        Ok(T::one() - (-noise - psi).exp() * sum)
    }

    /// `f(γ) = s^{L−1} e^{−s} (σ² + ψ′(γ)) / Γ(L)`, `s = ψ(γ) + σ²γ`.
    pub fn pdf_gamma(&self, gamma: T) -> Result<T> {
        if !(gamma > T::zero()) {
            return Err(Error::Domain(format!("pdf needs gamma > 0, got {gamma}")));
        }
        let s = self.poisson_argument(gamma)?;
        let slope = self.link.sigma2 + self.psi.derivative(gamma)?;
        let l = self.link.antennas;
        if l == 1 {
            return Ok((-s).exp() * slope);
        }
        if s == T::zero() || slope == T::zero() {
            return Ok(T::zero());
        }
        let lg = ln_gamma(T::from_count(l as usize))?;
        Ok((T::from_count(l as usize - 1) * s.ln() - s - lg + slope.ln()).exp())
    }

    /// Density of the SINR itself: `f(x r_T^α) r_T^α`.
    pub fn pdf_sinr(&self, sinr: T) -> Result<T> {
        let k = self.link.gamma_scale();
        Ok(self.pdf_gamma(sinr * k)? * k)
    }

    /// `Pr{SINR <= τ} = F(τ r_T^α)`.
    pub fn outage_probability(&self, tau: T, r_t: T) -> Result<T> {
        if !(tau >= T::zero()) {
            return Err(Error::Domain(format!("threshold must be >= 0, got {tau}")));
        }
        if !(r_t > T::zero()) {
            return Err(Error::Domain(format!("target distance must be > 0, got {r_t}")));
        }
        self.cdf_gamma(tau * r_t.powf(self.link.alpha))
    }

    /// `s^L e^{−s} / L!`: the drop in outage from one more antenna.
    pub fn antenna_gain_delta(&self, gamma: T) -> Result<T> {
        let s = self.poisson_argument(gamma)?;
        if s == T::zero() {
            return Ok(T::zero());
        }
        let l = self.link.antennas;
        Ok((T::from_count(l as usize) * s.ln() - s - ln_factorial::<T>(l)).exp())
    }

    /// [`Self::cdf_gamma`] over a grid, evaluated in parallel, results in input order.
    pub fn cdf_grid(&self, gammas: &[T]) -> Result<Vec<T>> {
        gammas.par_iter().map(|&g| self.cdf_gamma(g)).collect()
    }

    /// [`Self::pdf_gamma`] over a grid, in parallel.
    pub fn pdf_grid(&self, gammas: &[T]) -> Result<Vec<T>> {
        gammas.par_iter().map(|&g| self.pdf_gamma(g)).collect()
    }

    /// Smallest `γ` with `F(γ) >= p`, by bisection in `log γ`.
    pub fn quantile_gamma(&self, p: T) -> Result<T> {
        if !(p > T::zero() && p < T::one()) {
            return Err(Error::Domain(format!("quantile level must lie in (0, 1), got {p}")));
        }
        let above = |g: T| -> Result<bool> { Ok(self.cdf_gamma(g)? >= p) };
        invert_increasing(above, "CDF")
    }
}

/// Bisection in `log γ` for the first `γ` where `above` flips to true.
fn invert_increasing<T: Scalar>(above: impl Fn(T) -> Result<bool>, what: &str) -> Result<T> {
    let two = T::lit(2.0);
    let (mut lo, mut hi) = (T::one(), T::one());
    let limit = T::max_value().sqrt();
    while !above(hi)? {
        lo = hi;
        hi = hi * two;
        if hi > limit {
            return Err(Error::Bracketing(format!("{what} never reaches the target level")));
        }
    }
    if lo == hi {
        let floor = T::min_positive_value().sqrt();
        while above(lo)? {
            hi = lo;
            lo = lo / two;
            if lo < floor {
                return Ok(lo);
            }
        }
    }
    let tol = T::epsilon() * T::lit(16.0);
    while hi / lo - T::one() > tol {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Limit of `γ` when `β = qL` and `L → ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingLimit<T> {
    /// `ψ_c^{−1}(1/q)`.
    pub gamma: T,
    /// `ψ_c^{−1}(1/q) r_T^{−α}`.
    pub sinr: T,
}

/// `ψ_c^{−1}(1/q)` and the limiting SINR. Noise is neglected and the
/// model's `β` is ignored (`Λ_c` is the nominal shape).
pub fn scaling_limit<T: Scalar>(
    nominal: &IntensityModel<T>,
    q: T,
    alpha: T,
    r_t: T,
    spec: &QuadratureSpec<T>,
) -> Result<ScalingLimit<T>> {
    if !(q > T::zero() && q.is_finite()) {
        return Err(Error::Domain(format!("antennas-per-density ratio q must be > 0, got {q}")));
    }
    if !(r_t > T::zero()) {
        return Err(Error::Domain(format!("target distance must be > 0, got {r_t}")));
    }
    let eval = PsiEvaluator::new(nominal.nominal(), alpha, *spec, crate::psi::PsiMethod::Auto)?;
    let target = q.recip();
    let gamma = invert_increasing(|g| Ok(eval.psi(g)? >= target), "nominal psi").map_err(|e| match e {
        Error::Bracketing(_) => Error::Bracketing(format!(
            "nominal psi saturates below 1/q = {target}: the model's total interference is too small"
        )),
        other => other,
    })?;
    Ok(ScalingLimit { gamma, sinr: gamma / r_t.powf(alpha) })
}

/// `Q(L, qL)` for each `L`.
pub fn regularized_gamma_limit_scan<T: Scalar>(q: T, antennas: &[u32]) -> Result<Vec<T>> {
    if !(q > T::zero()) {
        return Err(Error::Domain(format!("q must be > 0, got {q}")));
    }
    antennas
        .iter()
        .map(|&l| {
            if l == 0 {
                return Err(Error::Domain("antenna counts must be >= 1".into()));
            }
            regularized_upper_gamma(l, q * T::from_count(l as usize))
        })
        .collect()
}

/// Polynomial fit of a model on `[0, R_0]` compared with the model itself
/// through the SINR CDF.
#[derive(Debug, Clone)]
pub struct FitComparison<T> {
    pub fit: PolynomialFit<T>,
    pub r0: T,
    pub rho0: T,
    pub eps_tail: T,
    pub gammas: Vec<T>,
    /// CDF with the polynomial on `[0, R_0]`, closed form.
    pub cdf_fit: Vec<T>,
    /// CDF with the exact intensity on `[0, R_0]`, quadrature.
    pub cdf_reference: Vec<T>,
    /// `max |cdf_fit − cdf_reference|` over the grid.
    pub sup_error: T,
}

/// Fit `model.radial` on `[0, r0]` by a degree-`degree` polynomial, attach
/// the tail `ρ_0 r^{ε_tail}` with `ρ_0` matching the model at `r0`, and
/// compare the resulting CDF with the one whose inner part is the exact
/// model (same tail), evaluated by quadrature.
pub fn fit_comparison<T: Scalar>(
    model: &IntensityModel<T>,
    r0: T,
    degree: usize,
    eps_tail: T,
    link: &LinkConfig<T>,
    gammas: &[T],
    spec: &QuadratureSpec<T>,
) -> Result<FitComparison<T>> {
    let fit = fit_polynomial(|r| model.radial(r), degree, r0)?;
    let rho0 = model.radial(r0) / r0.powf(eps_tail);
    let alpha = link.alpha;
    let mut points = vec![T::zero()];
    points.extend(model.breakpoints().into_iter().filter(|&b| b < r0));
    points.push(r0);
    points.push(T::infinity());
    let hints = EndpointHints { origin_power: T::one() + model.origin_exponent(), tail_decay: alpha - T::one() - eps_tail };
    let lambda = |r: T| if r <= r0 { model.radial(r) } else { rho0 * r.powf(eps_tail) };
    let rows: Vec<(T, T)> = gammas
        .par_iter()
        .map(|&g| {
            let pf = psi_polynomial(&fit.coeffs, r0, rho0, eps_tail, alpha, g)?;
            if pf < T::zero() {
                return Err(Error::InvalidModel(format!(
                    "degree-{degree} fit is negative near the origin and gives psi({g}) = {pf} < 0; \
                     use a higher degree or a grid starting at larger gamma"
                )));
            }
            let pr = psi_profile_quadrature(lambda, alpha, g, &points, hints, spec)?;
            Ok((cdf_from_psi(link.antennas, pf, link.sigma2, g)?, cdf_from_psi(link.antennas, pr, link.sigma2, g)?))
        })
        .collect::<Result<_>>()?;
    let (cdf_fit, cdf_reference): (Vec<T>, Vec<T>) = rows.into_iter().unzip();
    let sup_error = cdf_fit.iter().zip(&cdf_reference).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
    Ok(FitComparison { fit, r0, rho0, eps_tail, gammas: gammas.to_vec(), cdf_fit, cdf_reference, sup_error })
}

/// `10 log₁₀ x`.
pub fn to_db<T: Scalar>(x: T) -> T {
    T::lit(10.0) * x.log10()
}
