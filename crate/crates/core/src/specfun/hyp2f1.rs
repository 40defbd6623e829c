//! Gauss hypergeometric function restricted to the shape `₂F₁(1, b; b+1; −x)`.
//!
//! Every power-law disk and annulus integral reduces to this shape through
//! `b ∫₀¹ t^{b−1} / (1 + x t) dt = ₂F₁(1, b; b+1; −x)`.
//!
//! Two evaluation paths:
//! * `x <= 4`: Pfaff transform `(1+x)^{-1} ₂F₁(1, 1; b+1; x/(1+x))`, a
//!   positive-term series with ratio at most 0.8.
//! * `x > 4`: write `b = b₀ + m` with `b₀ ∈ (0, 1]`; for `b₀ < 1`
//!   `∫₀¹ t^{b₀−1}/(1+xt) dt = π x^{−b₀} / sin(πb₀) − Σₙ (−1)ⁿ x^{−n−1} / (n+1−b₀)`,
//!   then the forward recurrence `I_{b+1} = (1/b − I_b) / x`, which damps
//!   errors by `1/x` per step.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_TERMS: usize = 10_000;
const SERIES_LIMIT: f64 = 4.0;

/// `₂F₁(1, b; b+1; −x)` for `b > 0`, `x >= 0`.
pub fn hyp2f1_first_unit<T: Scalar>(b: T, x: T) -> Result<T> {
    if !(b > T::zero()) || !b.is_finite() {
        return Err(Error::Domain(format!("hyp2f1 requires b > 0, got {b}")));
    }
    if !(x >= T::zero()) {
        return Err(Error::Domain(format!("hyp2f1 requires x >= 0, got {x}")));
    }
    if x == T::zero() {
        return Ok(T::one());
    }
    if x.is_infinite() {
        return Ok(T::zero());
    }
    if x <= T::lit(SERIES_LIMIT) {
        pfaff_series(b, x)
    } else {
        Ok(large_argument(b, x))
    }
}

pub(crate) fn pfaff_series<T: Scalar>(b: T, x: T) -> Result<T> {
    let z = x / (T::one() + x);
    let c = b + T::one();
    let eps = T::epsilon();
    let mut term = T::one();
    let mut sum = T::one();
    for n in 0..MAX_TERMS {
        let nf = T::from_count(n);
        term = term * (nf + T::one()) / (c + nf) * z;
        sum = sum + term;
        if term < sum * eps {
            return Ok(sum / (T::one() + x));
        }
    }
    Err(Error::Convergence(format!("hyp2f1 series at b={b}, x={x}")))
}

/// ln(z / sin z) for `0 < z <= π/2`.
fn ln_z_over_sin<T: Scalar>(z: T) -> T {
    if z < T::lit(0.25) {
        // −ln(sin z / z) = Σ c_n z^{2n}
        const C: [f64; 7] = [
            1.0 / 6.0,
            1.0 / 180.0,
            1.0 / 2835.0,
            1.0 / 37_800.0,
            1.0 / 467_775.0,
            691.0 / 3_831_077_250.0,
            2.0 / 127_702_575.0,
        ];
        let z2 = z * z;
        let mut acc = T::zero();
        for &c in C.iter().rev() {
            acc = (acc + T::lit(c)) * z2;
        }
        acc
    } else {
        z.ln() - z.sin().ln()
    }
}

/// Tail sum `Σ_{n>=start} (−1)ⁿ x^{−n−1} / (n + 1 − b0)` for `x > 1`.
fn alternating_tail<T: Scalar>(b0: T, x: T, start: usize) -> T {
    let inv = x.recip();
    let mut pow = inv.powi(start as i32 + 1);
    let mut sign = if start.is_multiple_of(2) { T::one() } else { -T::one() };
    let mut sum = T::zero();
    for n in start..MAX_TERMS {
        let term = sign * pow / (T::from_count(n + 1) - b0);
        sum = sum + term;
        if term.abs() <= sum.abs() * T::epsilon() {
            break;
        }
        pow = pow * inv;
        sign = -sign;
    }
    sum
}

pub(crate) fn large_argument<T: Scalar>(b: T, x: T) -> T {
    let one = T::one();
    let half = T::lit(0.5);
    let pi = T::PI();
    let ln_x = x.ln();

    let mut b0 = b - b.floor();
    if b0 == T::zero() {
        b0 = one;
    }
    let steps = (b - b0).round().to_usize().unwrap_or(0);

    // I = ∫₀¹ t^{b₀−1}/(1+xt) dt and J = 1/b₀ − I.
    let (i0, j0) = if b0 == one {
        let i = x.ln_1p() / x;
        (i, one - i)
    } else if b0 <= half {
        let tail = alternating_tail(b0, x, 0);
        let expo = ln_z_over_sin(pi * b0) - b0 * ln_x;
        let f0 = expo.exp() - b0 * tail;
        if steps == 0 {
            return f0;
        }
        (f0 / b0, (-expo.exp_m1() + b0 * tail) / b0)
    } else {
        let d = one - b0;
        let tail = alternating_tail(b0, x, 1);
        let lead = (d * ln_x + ln_z_over_sin(pi * d)).exp_m1() / (d * x);
        let i = lead - tail;
        (i, b0.recip() - i)
    };

    let mut order = b0;
    let mut i = i0;
    let mut j = j0;
    for _ in 0..steps {
        i = j / x;
        order = order + one;
        j = order.recip() - i;
    }
    order * i
}
