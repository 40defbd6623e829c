use rand::Rng;

use super::{power_shell_mass, DiskRegion, IntensityModel, Profile};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Knots of the tabulated inverse radial CDF.
pub const INVERSE_TABLE_KNOTS: usize = 4096;

/// Gaussian clusters on an unbounded disk are tabulated out to this many `v`.
const GAUSSIAN_TRUNCATION: f64 = 10.0;

#[derive(Debug, Clone)]
enum Component<T> {
    /// `ρ r^ε` on `(a, b]`, inverted analytically; `p = 2 + ε`.
    Shell { a: T, b: T, p: T },
    /// Monotone cubic interpolant of `r(F)` through tabulated `(F_i, r_i)`.
    Table(Pchip<T>),
}

/// Inverse-CDF sampler of node locations for one model and region.
///
/// Building it precomputes the tables; afterwards it is immutable and can be
/// shared across threads, each drawing from its own random stream.
#[derive(Debug, Clone)]
pub struct RadialSampler<T> {
    components: Vec<Component<T>>,
    /// Cumulative selection probabilities, last entry 1.
    cumulative: Vec<T>,
    mass: T,
}

impl<T: Scalar> RadialSampler<T> {
    pub fn new(model: &IntensityModel<T>, region: &DiskRegion<T>) -> Result<Self> {
        let big_r = region.radius();
        let mut parts: Vec<(T, Component<T>)> = Vec::new();
        let shell = |rho: T, eps: T, a: T, b: T, parts: &mut Vec<(T, Component<T>)>| -> Result<()> {
            let b = b.min(big_r);
            if b > a && rho > T::zero() {
                let m = power_shell_mass(rho, eps, a, b)?;
                parts.push((m, Component::Shell { a, b, p: eps + T::lit(2.0) }));
            }
            Ok(())
        };
        match model.profile() {
            Profile::PowerLaw { rho, eps } => shell(*rho, *eps, T::zero(), big_r, &mut parts)?,
            Profile::PiecewisePowerLaw { segments } => {
                let mut inner = T::zero();
                for s in segments {
                    if inner >= big_r {
                        break;
                    }
                    shell(s.rho, s.eps, inner, s.outer_radius, &mut parts)?;
                    inner = s.outer_radius;
                }
            }
            Profile::PolynomialWithTail { r0, rho0, eps_tail, .. } => {
                let top = r0.min(big_r);
                let table = tabulate(model, top)?;
                parts.push(table);
                if big_r > *r0 {
                    shell(*rho0, *eps_tail, *r0, big_r, &mut parts)?;
                }
            }
            Profile::GaussianCluster { v, .. } => {
                let top = big_r.min(*v * T::lit(GAUSSIAN_TRUNCATION));
                parts.push(tabulate(model, top)?);
            }
        }
        parts.retain(|(m, _)| *m > T::zero());
        let mass = parts.iter().fold(T::zero(), |s, (m, _)| s + *m);
        if parts.is_empty() || !(mass > T::zero()) || !mass.is_finite() {
            return Err(Error::InvalidModel("cannot sample from a model with zero or infinite mass".into()));
        }
        let mut acc = T::zero();
        let mut cumulative = Vec::with_capacity(parts.len());
        let mut components = Vec::with_capacity(parts.len());
        for (m, c) in parts {
            acc = acc + m;
            cumulative.push(acc / mass);
            components.push(c);
        }
        *cumulative.last_mut().expect("nonempty") = T::one();
        Ok(Self { components, cumulative, mass: model.beta() * mass })
    }

    /// Mean node count over the sampled support.
    pub fn mass(&self) -> T {
        self.mass
    }

    /// Draw a distance from the radial marginal.
    pub fn sample_radius<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let idx = if self.components.len() == 1 {
            0
        } else {
            let u = T::lit(rng.random::<f64>());
            self.cumulative.partition_point(|&c| c <= u).min(self.components.len() - 1)
        };
        let u = T::lit(rng.random::<f64>());
        match &self.components[idx] {
            Component::Shell { a, b, p } => invert_shell(*a, *b, *p, u),
            Component::Table(t) => t.eval(u),
        }
    }

    /// Draw `(r, θ)` with `θ` uniform on `[0, 2π)`.
    pub fn sample_location<R: Rng + ?Sized>(&self, rng: &mut R) -> (T, T) {
        let r = self.sample_radius(rng);
        let theta = T::TAU() * T::lit(rng.random::<f64>());
        (r, theta)
    }
}

/// Convenience wrapper that prepares a sampler for a single draw. Prefer
/// [`RadialSampler`] when drawing many points.
pub fn sample_location<T: Scalar, R: Rng + ?Sized>(
    model: &IntensityModel<T>,
    region: &DiskRegion<T>,
    rng: &mut R,
) -> Result<(T, T)> {
    Ok(RadialSampler::new(model, region)?.sample_location(rng))
}

fn invert_shell<T: Scalar>(a: T, b: T, p: T, u: T) -> T {
    if p == T::zero() {
        return a * (b / a).powf(u);
    }
    if a == T::zero() {
        return b * u.powf(T::one() / p);
    }
    let ap = a.powf(p);
    let bp = b.powf(p);
    let r = (ap + u * (bp - ap)).powf(T::one() / p);
    r.max(a).min(b)
}

fn tabulate<T: Scalar>(model: &IntensityModel<T>, top: T) -> Result<(T, Component<T>)> {
    let n = INVERSE_TABLE_KNOTS;
    let mut r = Vec::with_capacity(n);
    let mut f = Vec::with_capacity(n);
    for i in 0..n {
        let ri = top * T::from_count(i) / T::from_count(n - 1);
        r.push(ri);
        f.push(model.nominal_mass_within(ri)?);
    }
    let total = f[n - 1];
    if !(total > T::zero()) {
        return Ok((T::zero(), Component::Shell { a: T::zero(), b: top, p: T::lit(2.0) }));
    }
    // keep the strictly increasing part so the abscissae are distinct
    let mut xs = vec![T::zero()];
    let mut ys = vec![T::zero()];
    for i in 1..n {
        let fi = (f[i] / total).min(T::one());
        if fi > *xs.last().expect("nonempty") {
            xs.push(fi);
            ys.push(r[i]);
        }
    }
    *xs.last_mut().expect("nonempty") = T::one();
    Ok((total, Component::Table(Pchip::new(xs, ys))))
}

/// Fritsch–Carlson monotone cubic Hermite interpolant.
#[derive(Debug, Clone)]
struct Pchip<T> {
    x: Vec<T>,
    y: Vec<T>,
    d: Vec<T>,
}

impl<T: Scalar> Pchip<T> {
    fn new(x: Vec<T>, y: Vec<T>) -> Self {
        let n = x.len();
        if n < 2 {
            return Self { d: vec![T::zero(); n], x, y };
        }
        let h: Vec<T> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<T> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![T::zero(); n];
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > T::zero() {
                let w1 = two * h[i] + h[i - 1];
                let w2 = h[i] + two * h[i - 1];
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        let end = |h0: T, h1: T, d0: T, d1: T| {
            let s = ((two * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if s * d0 <= T::zero() {
                T::zero()
            } else if d0 * d1 <= T::zero() && s.abs() > (three * d0).abs() {
                three * d0
            } else {
                s
            }
        };
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            d[0] = end(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Self { x, y, d }
    }

    fn eval(&self, t: T) -> T {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = self.x.partition_point(|&xi| xi <= t) - 1;
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = three * s2 - two * s3;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}
