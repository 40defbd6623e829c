//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature on finite and
//! semi-infinite radial ranges.
//!
//! A semi-infinite piece `[a, ∞)` is mapped to `t ∈ [0, 1)` through
//! `r = a + c·((1 − t)^{−m} − 1)` with `c = a` when `a > 0` and `c = 1`
//! otherwise. The default `m = 1` is the familiar `r = a + c·t/(1 − t)`;
//! when the caller knows the integrand decays like `r^{−q}` the power
//! `m = max(1, 1/(q − 1))` makes the mapped integrand bounded at `t = 1`.
//! Likewise a first piece `[0, r₁]` with integrand `~ r^p`, `−1 < p < 0`, is
//! mapped through `r = r₁ s^n`, `n = 1/(1 + p)`. Nodes are interior, so
//! integrable endpoint singularities are never evaluated.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Error control for [`integrate_radial`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_subdivisions: usize,
}

impl<T: Scalar> QuadratureSpec<T> {
    pub fn new(rel_tol: T, abs_tol: T, max_subdivisions: usize) -> Result<Self> {
        if !(rel_tol > T::zero()) || !(abs_tol >= T::zero()) || max_subdivisions < 1 {
            return Err(Error::InvalidModel(format!(
                "quadrature spec requires rel_tol > 0, abs_tol >= 0, max_subdivisions >= 1 \
                 (got {rel_tol}, {abs_tol}, {max_subdivisions})"
            )));
        }
        Ok(Self { rel_tol, abs_tol, max_subdivisions })
    }

    /// Same spec with a different relative tolerance.
    pub fn with_rel_tol(self, rel_tol: T) -> Result<Self> {
        Self::new(rel_tol, self.abs_tol, self.max_subdivisions)
    }
}

impl<T: Scalar> Default for QuadratureSpec<T> {
    /// `rel_tol = 1e-9`, `abs_tol = 1e-12`, 2000 subdivisions; the relative
    /// tolerance is raised to `1000·ε` for scalars that cannot reach 1e-9.
    fn default() -> Self {
        let floor = T::epsilon() * T::lit(1000.0);
        Self {
            rel_tol: T::lit(1e-9).max(floor),
            abs_tol: T::lit(1e-12),
            max_subdivisions: 2000,
        }
    }
}

/// Estimate and error bound of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    pub subdivisions: usize,
}

/// Power-law behaviour of the integrand at the ends of the radial range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointHints<T> {
    /// `p` with `f(r) ~ r^p` as `r → 0`; only `p < 0` changes the mapping.
    pub origin_power: T,
    /// `q` with `f(r) = O(r^{−q})` as `r → ∞`, `q > 1`.
    pub tail_decay: T,
}

impl<T: Scalar> Default for EndpointHints<T> {
    fn default() -> Self {
        Self { origin_power: T::zero(), tail_decay: T::lit(2.0) }
    }
}

#[derive(Clone, Copy)]
enum Mapping<T> {
    Identity,
    Origin { scale: T, power: T },
    SemiInfinite { origin: T, scale: T, power: T },
}

#[derive(Clone, Copy)]
struct Piece<T> {
    map: Mapping<T>,
    lo: T,
    hi: T,
    value: T,
    error: T,
}

fn mapped<T: Scalar, F: Fn(T) -> T>(f: &F, map: Mapping<T>, t: T) -> T {
    match map {
        Mapping::Identity => f(t),
        Mapping::Origin { scale, power } => {
            if t <= T::zero() {
                return T::zero();
            }
            let sp = t.powf(power - T::one());
            f(scale * sp * t) * scale * power * sp
        }
        Mapping::SemiInfinite { origin, scale, power } => {
            let rem = T::one() - t;
            if rem <= T::zero() {
                return T::zero();
            }
            let grow = rem.powf(-power);
            let r = origin + scale * (grow - T::one());
            let jac = scale * power * grow / rem;
            if !r.is_finite() || !jac.is_finite() {
                return T::zero();
            }
            let v = f(r);
            if v == T::zero() {
                return v;
            }
            v * jac
        }
    }
}

fn gauss_kronrod<T: Scalar, F: Fn(T) -> T>(f: &F, map: Mapping<T>, lo: T, hi: T) -> Result<(T, T)> {
    let half = T::lit(0.5);
    let center = half * (lo + hi);
    let half_len = half * (hi - lo);
    let abs_half = half_len.abs();

    let f_center = mapped(f, map, center);
    let mut res_g = T::zero();
    let mut res_k = f_center * T::lit(WGK[10]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = mapped(f, map, center - dx);
        let f2 = mapped(f, map, center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let sum = f1 + f2;
        res_k = res_k + T::lit(WGK[j]) * sum;
        res_abs = res_abs + T::lit(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * sum;
        }
    }
    if !res_k.is_finite() {
        return Err(Error::Domain(format!(
            "integrand is not finite on [{lo}, {hi}] of the mapped range"
        )));
    }
    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[10]) * (f_center - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half_len;
    res_abs = res_abs * abs_half;
    res_asc = res_asc * abs_half;

    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let floor_scale = T::min_positive_value() / (T::lit(50.0) * T::epsilon());
    if res_abs > floor_scale {
        err = err.max(T::lit(50.0) * T::epsilon() * res_abs);
    }
    Ok((value, err))
}

/// `∫_{lower}^{upper} f(r) dr`; `upper` may be `+∞`.
pub fn integrate_radial<T, F>(f: F, lower: T, upper: T, spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    integrate_with_breakpoints(f, &[lower, upper], spec).map(|i| i.value)
}

/// Integrates over consecutive pieces `[p₀, p₁], [p₁, p₂], …` with one global
/// error budget; the last point may be `+∞`. Breakpoints should sit on
/// discontinuities and on the scale where the integrand turns over.
pub fn integrate_with_breakpoints<T, F>(f: F, points: &[T], spec: &QuadratureSpec<T>) -> Result<Integral<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    integrate_with_hints(f, points, EndpointHints::default(), spec)
}

/// [`integrate_with_breakpoints`] with endpoint substitutions tuned to the
/// integrand's power-law behaviour at `0` and `∞`.
pub fn integrate_with_hints<T, F>(
    f: F,
    points: &[T],
    hints: EndpointHints<T>,
    spec: &QuadratureSpec<T>,
) -> Result<Integral<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if points.len() < 2 {
        return Err(Error::Domain("integration needs at least two points".into()));
    }
    for w in points.windows(2) {
        if !(w[0] <= w[1]) || !w[0].is_finite() {
            return Err(Error::Domain(format!("integration limits out of order: {} > {}", w[0], w[1])));
        }
    }
    if points[0] < T::zero() {
        return Err(Error::Domain(format!("radial integration below zero: {}", points[0])));
    }

    let mut pieces: Vec<Piece<T>> = Vec::with_capacity(spec.max_subdivisions + points.len());
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let (map, lo, hi) = if b.is_infinite() {
            let scale = if a > T::zero() { a } else { T::one() };
            let q = hints.tail_decay;
            let power = if q > T::one() { (q - T::one()).recip().max(T::one()) } else { T::one() };
            (Mapping::SemiInfinite { origin: a, scale, power }, T::zero(), T::one())
        } else if a == T::zero() && hints.origin_power < T::zero() && hints.origin_power > -T::one() {
            let power = (T::one() + hints.origin_power).recip();
            (Mapping::Origin { scale: b, power }, T::zero(), T::one())
        } else {
            (Mapping::Identity, a, b)
        };
        let (value, error) = gauss_kronrod(&f, map, lo, hi)?;
        pieces.push(Piece { map, lo, hi, value, error });
    }
    if pieces.is_empty() {
        return Ok(Integral { value: T::zero(), error: T::zero(), subdivisions: 0 });
    }

    let mut subdivisions = 0;
    loop {
        let total = pieces.iter().fold(T::zero(), |acc, p| acc + p.value);
        let error = pieces.iter().fold(T::zero(), |acc, p| acc + p.error);
        let target = spec.abs_tol.max(spec.rel_tol * total.abs());
        if error <= target {
            return Ok(Integral { value: total, error, subdivisions });
        }
        let failure = Error::AccuracyFailure { estimate: total.as_f64(), error: error.as_f64() };
        if subdivisions >= spec.max_subdivisions {
            return Err(failure);
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |best, (i, p)| if p.error > best.1 { (i, p.error) } else { best });
        let piece = pieces[idx];
        let mid = T::lit(0.5) * (piece.lo + piece.hi);
        let width = piece.hi - piece.lo;
        if width <= T::lit(100.0) * T::epsilon() * piece.lo.abs().max(piece.hi.abs()) {
            return Err(failure);
        }
        let (v1, e1) = gauss_kronrod(&f, piece.map, piece.lo, mid)?;
        let (v2, e2) = gauss_kronrod(&f, piece.map, mid, piece.hi)?;
        pieces[idx] = Piece { hi: mid, value: v1, error: e1, ..piece };
        pieces.push(Piece { lo: mid, value: v2, error: e2, ..piece });
        subdivisions += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec::default()
    }

    #[test]
    fn analytic_integrals() {
        let v = integrate_radial(|r: f64| (-r).exp(), 0.0, f64::INFINITY, &spec()).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        let v = integrate_radial(|r: f64| 1.0 / (1.0 + r * r), 0.0, f64::INFINITY, &spec()).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-9 * std::f64::consts::FRAC_PI_2);
        let v = integrate_radial(|r: f64| r.powf(-0.5), 0.0, 1.0, &spec()).unwrap();
        assert!((v - 2.0).abs() < 2e-9);
    }

    #[test]
    fn shifted_semi_infinite_and_breakpoints() {
        // ∫_2^∞ r^{-3} dr = 1/8
        let v = integrate_radial(|r: f64| r.powi(-3), 2.0, f64::INFINITY, &spec()).unwrap();
        assert!((v - 0.125).abs() < 1e-10);
        // step function with a breakpoint on the jump
        let step = |r: f64| if r < 1.0 { 2.0 } else { 0.5 };
        let i = integrate_with_breakpoints(step, &[0.0, 1.0, 3.0], &spec()).unwrap();
        assert!((i.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn slow_algebraic_ends_with_hints() {
        // r^{-1.2} on [1, ∞): t/(1−t) leaves a (1−t)^{-0.8} singularity
        let hints = EndpointHints { origin_power: 0.0, tail_decay: 1.2 };
        let i = integrate_with_hints(|r: f64| r.powf(-1.2), &[1.0, f64::INFINITY], hints, &spec()).unwrap();
        assert!((i.value - 5.0).abs() < 5e-9, "{}", i.value);
        // r^{-0.9} on [0, 1]
        let hints = EndpointHints { origin_power: -0.9, tail_decay: 2.0 };
        let i = integrate_with_hints(|r: f64| r.powf(-0.9), &[0.0, 1.0], hints, &spec()).unwrap();
        assert!((i.value - 10.0).abs() < 1e-8, "{}", i.value);
        // both ends on one range: r^{-0.5}/(1+r)^{1.7}, tail ~ r^{-2.2}
        let hints = EndpointHints { origin_power: -0.5, tail_decay: 2.2 };
        let f = |r: f64| r.powf(-0.5) * (1.0 + r).powf(-1.7);
        let i = integrate_with_hints(f, &[0.0, 1.0, f64::INFINITY], hints, &spec()).unwrap();
        // B(1/2, 6/5) = Γ(1/2)Γ(6/5)/Γ(17/10)
        let expected: f64 = (crate::specfun::ln_gamma(0.5_f64).unwrap() + crate::specfun::ln_gamma(1.2).unwrap()
            - crate::specfun::ln_gamma(1.7).unwrap())
        .exp();
        assert!((i.value - expected).abs() < 1e-9 * expected, "{} vs {expected}", i.value);
    }

    #[test]
    fn reports_accuracy_failure() {
        let tight = QuadratureSpec::new(1e-14, 0.0, 3).unwrap();
        let err = integrate_radial(|r: f64| (50.0 * r).sin().abs(), 0.0, 10.0, &tight).unwrap_err();
        match err {
            Error::AccuracyFailure { estimate, error } => {
                assert!(estimate.is_finite() && error > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(0.0, 0.0, 10).is_err());
        assert!(QuadratureSpec::new(1e-6, -1.0, 10).is_err());
        assert!(QuadratureSpec::new(1e-6, 0.0, 0).is_err());
        let d = QuadratureSpec::<f64>::default();
        assert_eq!((d.rel_tol, d.abs_tol, d.max_subdivisions), (1e-9, 1e-12, 2000));
        assert!(QuadratureSpec::<f32>::default().rel_tol > 1e-5);
    }

    #[test]
    fn rejects_bad_limits() {
        assert!(integrate_radial(|r: f64| r, 2.0, 1.0, &spec()).is_err());
        assert!(integrate_radial(|r: f64| r, -1.0, 1.0, &spec()).is_err());
        assert!(integrate_radial(|_r: f64| f64::NAN, 0.0, 1.0, &spec()).is_err());
    }
}
