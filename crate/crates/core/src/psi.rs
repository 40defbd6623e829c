//! The interference functional
//! `ψ(γ) = 2π ∫₀^∞ Λ(r) r · γr^{−α} / (1 + γr^{−α}) dr`
//! and its derivative in `γ`.
//!
//! Closed forms exist for power laws, piecewise power laws and polynomials
//! with a power-law tail; the Gaussian cluster and anything else go through
//! adaptive quadrature. The closed forms are accelerations: the tests hold
//! them to the quadrature values.

use crate::error::{Error, Result};
use crate::intensity::{IntensityModel, PowerLawSegment, Profile};
use crate::scalar::Scalar;
use crate::specfun::{hyp2f1_first_unit, integrate_with_hints, EndpointHints, QuadratureSpec};

/// Gaussian-cluster integrals are split at this many `v`.
pub const GAUSSIAN_SPLIT: f64 = 6.0;

/// How [`PsiEvaluator`] computes `ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PsiMethod {
    ClosedForm,
    Quadrature,
    #[default]
    Auto,
}

/// `ψ` and `ψ′` for one model and path-loss exponent.
#[derive(Debug, Clone)]
pub struct PsiEvaluator<T> {
    model: IntensityModel<T>,
    alpha: T,
    spec: QuadratureSpec<T>,
    method: PsiMethod,
}

fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if alpha > T::lit(2.0) && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("path-loss exponent must satisfy alpha > 2, got {alpha}")))
    }
}

fn check_gamma<T: Scalar>(gamma: T) -> Result<()> {
    if gamma >= T::zero() && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("gamma must be finite and >= 0, got {gamma}")))
    }
}

/// `t / (1 + t)` with `t = (r_c / r)^α`, written to stay finite for `r → 0`.
fn attenuation<T: Scalar>(r: T, rc: T, alpha: T) -> T {
    let t = (rc / r).powf(alpha);
    if t > T::one() {
        T::one() / (T::one() + t.recip())
    } else {
        t / (T::one() + t)
    }
}

/// `∂/∂γ [t / (1 + t)] = (t/γ) / (1 + t)²`.
fn attenuation_slope<T: Scalar>(r: T, rc: T, alpha: T, gamma: T) -> T {
    let t = (rc / r).powf(alpha);
    if t > T::one() {
        let s = t.recip();
        s / (gamma * (T::one() + s) * (T::one() + s))
    } else {
        t / (gamma * (T::one() + t) * (T::one() + t))
    }
}

/// `ψ` over the disk `(0, B]` for `ρ r^ε`, `ε > −2`:
/// `2πρ B^{2+ε}/(2+ε) · ₂F₁(1, (2+ε)/α; (2+ε)/α + 1; −B^α/γ)`.
fn disk_term<T: Scalar>(rho: T, eps: T, outer: T, alpha: T, gamma: T) -> Result<T> {
    if rho == T::zero() {
        return Ok(T::zero());
    }
    let p = eps + T::lit(2.0);
    if !(p > T::zero()) {
        return Err(Error::Divergence(format!("disk term needs eps > -2, got {eps}")));
    }
    let rc = gamma.powf(alpha.recip());
    let x = (outer / rc).powf(alpha);
    Ok(T::TAU() * rho * outer.powf(p) / p * hyp2f1_first_unit(p / alpha, x)?)
}

/// `ψ` over `(A, ∞)` for `ρ r^ε`, `ε < α − 2`:
/// `2πργ A^{2+ε−α}/(α−2−ε) · ₂F₁(1, c; c+1; −γA^{−α})`, `c = (α−2−ε)/α`.
fn outer_term<T: Scalar>(rho: T, eps: T, inner: T, alpha: T, gamma: T) -> Result<T> {
    if rho == T::zero() || inner.is_infinite() {
        return Ok(T::zero());
    }
    let q = alpha - T::lit(2.0) - eps;
    if !(q > T::zero()) {
        return Err(Error::Divergence(format!(
            "interference from r^{eps} beyond {inner} diverges for alpha = {alpha}"
        )));
    }
    let rc = gamma.powf(alpha.recip());
    let x = (rc / inner).powf(alpha);
    Ok(T::TAU() * rho * gamma * inner.powf(-q) / q * hyp2f1_first_unit(q / alpha, x)?)
}

/// `ψ` over the annulus `(A, B]`.
fn annulus_term<T: Scalar>(rho: T, eps: T, inner: T, outer: T, alpha: T, gamma: T) -> Result<T> {
    if inner == T::zero() {
        return disk_term(rho, eps, outer, alpha, gamma);
    }
    if eps < alpha - T::lit(2.0) {
        Ok(outer_term(rho, eps, inner, alpha, gamma)? - outer_term(rho, eps, outer, alpha, gamma)?)
    } else if outer.is_infinite() {
        outer_term(rho, eps, inner, alpha, gamma)
    } else {
        Ok(disk_term(rho, eps, outer, alpha, gamma)? - disk_term(rho, eps, inner, alpha, gamma)?)
    }
}

/// `(2π²ρ/α) γ^{(ε+2)/α} csc(π(ε+2)/α)` for `−2 < ε < α − 2`.
pub fn psi_power_law<T: Scalar>(rho: T, eps: T, alpha: T, gamma: T) -> Result<T> {
    check_alpha(alpha)?;
    check_gamma(gamma)?;
    if !(eps > T::lit(-2.0) && eps < alpha - T::lit(2.0)) {
        return Err(Error::Divergence(format!(
            "power-law psi needs -2 < eps < alpha - 2, got eps = {eps}, alpha = {alpha}"
        )));
    }
    if gamma == T::zero() || rho == T::zero() {
        return Ok(T::zero());
    }
    let b = (eps + T::lit(2.0)) / alpha;
    let pi = T::PI();
    Ok(T::lit(2.0) * pi * pi * rho / alpha * gamma.powf(b) / (pi * b).sin())
}

/// `ψ` of `Σ a_k r^k` on `[0, R_0]` plus `ρ_0 r^ε` beyond `R_0`.
///
/// The coefficients are not checked for nonnegativity, so raw least-squares
/// fits can be evaluated directly.
pub fn psi_polynomial<T: Scalar>(coeffs: &[T], r0: T, rho0: T, eps_tail: T, alpha: T, gamma: T) -> Result<T> {
    check_alpha(alpha)?;
    check_gamma(gamma)?;
    if !(r0 > T::zero() && r0.is_finite()) {
        return Err(Error::Domain(format!("boundary radius R0 must be > 0, got {r0}")));
    }
    if !(rho0 >= T::zero()) {
        return Err(Error::Domain(format!("tail density rho0 must be >= 0, got {rho0}")));
    }
    if !(eps_tail > T::lit(-2.0) && eps_tail < -T::one()) {
        return Err(Error::Domain(format!("tail exponent must satisfy -2 < eps_tail < -1, got {eps_tail}")));
    }
    if gamma == T::zero() {
        return Ok(T::zero());
    }
    let mut total = outer_term(rho0, eps_tail, r0, alpha, gamma)?;
    for (k, &a) in coeffs.iter().enumerate() {
        total = total + disk_term(a, T::from_count(k), r0, alpha, gamma)?;
    }
    Ok(total)
}

/// `ψ` of a piecewise power law, summed ring by ring.
pub fn psi_piecewise<T: Scalar>(segments: &[PowerLawSegment<T>], alpha: T, gamma: T) -> Result<T> {
    check_alpha(alpha)?;
    check_gamma(gamma)?;
    if segments.is_empty() {
        return Err(Error::InvalidModel("piecewise power law needs at least one segment".into()));
    }
    if gamma == T::zero() {
        return Ok(T::zero());
    }
    let mut inner = T::zero();
    let mut total = T::zero();
    for s in segments {
        if !(s.outer_radius > inner) {
            return Err(Error::InvalidModel("segment radii must be strictly increasing".into()));
        }
        total = total + annulus_term(s.rho, s.eps, inner, s.outer_radius, alpha, gamma)?;
        inner = s.outer_radius;
    }
    Ok(total)
}

/// Gaussian-cluster `ψ` by quadrature, split at `6v`.
pub fn psi_gaussian<T: Scalar>(rho: T, v: T, alpha: T, gamma: T, spec: &QuadratureSpec<T>) -> Result<T> {
    let model = IntensityModel::gaussian_cluster(rho, v)?;
    psi_quadrature(&model, alpha, gamma, spec)
}

/// Integration breakpoints for `ψ` of `model` at crossover radius `rc`.
fn breakpoints<T: Scalar>(model: &IntensityModel<T>, rc: T, lo: T, hi: T) -> Vec<T> {
    let mut pts = vec![lo];
    let mut inner = model.breakpoints();
    if let Profile::GaussianCluster { v, .. } = model.profile() {
        inner.push(*v * T::lit(GAUSSIAN_SPLIT));
    }
    inner.push(rc);
    inner.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    for p in inner {
        if p > *pts.last().expect("nonempty") && p < hi {
            pts.push(p);
        }
    }
    pts.push(hi);
    pts
}

fn hints<T: Scalar>(model: &IntensityModel<T>, alpha: T) -> EndpointHints<T> {
    let tail_decay = match model.tail_exponent() {
        Some(eps) => alpha - T::one() - eps,
        None => T::lit(4.0),
    };
    EndpointHints { origin_power: T::one() + model.origin_exponent(), tail_decay }
}

fn check_convergence<T: Scalar>(model: &IntensityModel<T>, alpha: T) -> Result<()> {
    check_alpha(alpha)?;
    if let Some(eps) = model.tail_exponent() {
        if !(eps < alpha - T::lit(2.0)) {
            return Err(Error::Divergence(format!(
                "interference diverges: intensity decays like r^{eps} with alpha = {alpha} (need eps < alpha - 2)"
            )));
        }
    }
    Ok(())
}

/// `ψ` over the ring `(inner, outer]` by quadrature, `β` included.
pub fn psi_annulus_quadrature<T: Scalar>(
    model: &IntensityModel<T>,
    alpha: T,
    gamma: T,
    inner: T,
    outer: T,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    check_gamma(gamma)?;
    if outer.is_infinite() {
        check_convergence(model, alpha)?;
    } else {
        check_alpha(alpha)?;
    }
    if !(inner >= T::zero() && outer >= inner) {
        return Err(Error::Domain(format!("bad annulus ({inner}, {outer}]")));
    }
    if gamma == T::zero() || model.beta() == T::zero() {
        return Ok(T::zero());
    }
    let rc = gamma.powf(alpha.recip());
    let hi = outer.min(model.support_radius());
    if !(hi > inner) {
        return Ok(T::zero());
    }
    let pts = breakpoints(model, rc, inner, hi);
    let nominal = model.nominal();
    let value = integrate_with_hints(
        |r| T::TAU() * nominal.nominal_radial(r) * r * attenuation(r, rc, alpha),
        &pts,
        hints(model, alpha),
        spec,
    )?
    .value;
    Ok(model.beta() * value)
}

/// `ψ(γ)` by adaptive quadrature of the radial integral, `β` included.
pub fn psi_quadrature<T: Scalar>(model: &IntensityModel<T>, alpha: T, gamma: T, spec: &QuadratureSpec<T>) -> Result<T> {
    psi_annulus_quadrature(model, alpha, gamma, T::zero(), T::infinity(), spec)
}

/// `ψ(γ)` for an arbitrary radial intensity `lambda`, integrated piecewise
/// over `points` (the last may be `+∞`).
pub fn psi_profile_quadrature<T, F>(
    lambda: F,
    alpha: T,
    gamma: T,
    points: &[T],
    hints: EndpointHints<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    check_alpha(alpha)?;
    check_gamma(gamma)?;
    if gamma == T::zero() {
        return Ok(T::zero());
    }
    let rc = gamma.powf(alpha.recip());
    let mut pts: Vec<T> = points.to_vec();
    let (lo, hi) = (pts[0], pts[pts.len() - 1]);
    if rc > lo && rc < hi && !pts.contains(&rc) {
        pts.push(rc);
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    }
    Ok(integrate_with_hints(|r| T::TAU() * lambda(r) * r * attenuation(r, rc, alpha), &pts, hints, spec)?.value)
}

impl<T: Scalar> PsiEvaluator<T> {
    /// Validates `α > 2` and the convergence of `ψ` for `model`.
    pub fn new(model: IntensityModel<T>, alpha: T, spec: QuadratureSpec<T>, method: PsiMethod) -> Result<Self> {
        check_convergence(&model, alpha)?;
        let closed = Self::has_closed_form(&model);
        if method == PsiMethod::ClosedForm && !closed {
            return Err(Error::InvalidModel("no closed form for the gaussian cluster; use quadrature".into()));
        }
        let method = match method {
            PsiMethod::Auto if closed => PsiMethod::ClosedForm,
            PsiMethod::Auto => PsiMethod::Quadrature,
            m => m,
        };
        Ok(Self { model, alpha, spec, method })
    }

    /// Defaults: [`QuadratureSpec::default`] and [`PsiMethod::Auto`].
    pub fn with_defaults(model: IntensityModel<T>, alpha: T) -> Result<Self> {
        Self::new(model, alpha, QuadratureSpec::default(), PsiMethod::Auto)
    }

    fn has_closed_form(model: &IntensityModel<T>) -> bool {
        !matches!(model.profile(), Profile::GaussianCluster { .. })
    }

    pub fn model(&self) -> &IntensityModel<T> {
        &self.model
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn spec(&self) -> &QuadratureSpec<T> {
        &self.spec
    }

    /// The resolved method; never `Auto`.
    pub fn method(&self) -> PsiMethod {
        self.method
    }

    /// The same evaluator with the model's `β` replaced.
    pub fn with_beta(&self, beta: T) -> Result<Self> {
        Ok(Self { model: self.model.clone().with_beta(beta)?, ..self.clone() })
    }

    /// `ψ_c(γ)`, the value at `β = 1`.
    pub fn nominal(&self, gamma: T) -> Result<T> {
        check_gamma(gamma)?;
        if gamma == T::zero() {
            return Ok(T::zero());
        }
        let alpha = self.alpha;
        match (self.method, self.model.profile()) {
            (PsiMethod::ClosedForm, Profile::PowerLaw { rho, eps }) => psi_power_law(*rho, *eps, alpha, gamma),
            (PsiMethod::ClosedForm, Profile::PiecewisePowerLaw { segments }) => psi_piecewise(segments, alpha, gamma),
            (PsiMethod::ClosedForm, Profile::PolynomialWithTail { coeffs, r0, rho0, eps_tail }) => {
                psi_polynomial(coeffs, *r0, *rho0, *eps_tail, alpha, gamma)
            }
            _ => psi_quadrature(&self.model.nominal(), alpha, gamma, &self.spec),
        }
    }

    /// `ψ(γ) = β ψ_c(γ)`.
    pub fn psi(&self, gamma: T) -> Result<T> {
        let beta = self.model.beta();
        if beta == T::zero() {
            check_gamma(gamma)?;
            return Ok(T::zero());
        }
        Ok(beta * self.nominal(gamma)?)
    }

    /// `ψ′(γ)` for `γ > 0`.
    pub fn derivative(&self, gamma: T) -> Result<T> {
        if !(gamma > T::zero() && gamma.is_finite()) {
            return Err(Error::Domain(format!("psi derivative needs gamma > 0, got {gamma}")));
        }
        let beta = self.model.beta();
        if let Profile::PowerLaw { eps, .. } = self.model.profile() {
            let psi = self.psi(gamma)?;
            return Ok(psi * (*eps + T::lit(2.0)) / (self.alpha * gamma));
        }
        if beta == T::zero() {
            return Ok(T::zero());
        }
        let alpha = self.alpha;
        let rc = gamma.powf(alpha.recip());
        let nominal = self.model.nominal();
        let pts = breakpoints(&nominal, rc, T::zero(), nominal.support_radius());
        let mut h = hints(&nominal, alpha);
        // the derivative integrand behaves like Λ r^{1+α} at the origin
        h.origin_power = h.origin_power + alpha;
        let value = integrate_with_hints(
            |r| T::TAU() * nominal.nominal_radial(r) * r * attenuation_slope(r, rc, alpha, gamma),
            &pts,
            h,
            &self.spec,
        )?
        .value;
        Ok(beta * value)
    }
}

/// `ψ′(γ)` of `evaluator`.
pub fn psi_derivative<T: Scalar>(evaluator: &PsiEvaluator<T>, gamma: T) -> Result<T> {
    evaluator.derivative(gamma)
}
