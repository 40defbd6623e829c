use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest degree accepted by [`fit_polynomial`]; beyond it the monomial
/// least-squares system is too ill-conditioned to be useful.
pub const MAX_FIT_DEGREE: usize = 30;

const RESIDUAL_GRID: usize = 1024;

/// Least-squares polynomial `Σ a_k r^k` and its sup-norm residual on `[0, R_0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialFit<T> {
    pub coeffs: Vec<T>,
    /// `max |h(r) − Σ a_k r^k|` over 1024 equispaced points of `[0, R_0]`.
    pub sup_residual: T,
}

impl<T: Scalar> PolynomialFit<T> {
    pub fn eval(&self, r: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * r + c)
    }
}

/// Fit `h` on `[0, r0]` by a degree-`degree` polynomial.
///
/// The fit minimizes the discrete residual on `4(m+1)` Chebyshev–Lobatto
/// points. Internally the basis is `(r/R_0)^k`, solved with Householder QR.
pub fn fit_polynomial<T, F>(h: F, degree: usize, r0: T) -> Result<PolynomialFit<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if degree > MAX_FIT_DEGREE {
        return Err(Error::IllConditioned(format!(
            "polynomial degree {degree} exceeds the cap of {MAX_FIT_DEGREE}"
        )));
    }
    if !(r0 > T::zero() && r0.is_finite()) {
        return Err(Error::Domain(format!("fit radius must be finite and > 0, got {r0}")));
    }
    let cols = degree + 1;
    let rows = 4 * cols;
    let half = T::lit(0.5);
    let mut a = vec![T::zero(); rows * cols];
    let mut b = vec![T::zero(); rows];
    for i in 0..rows {
        let x = half * (T::one() - (T::PI() * T::from_count(i) / T::from_count(rows - 1)).cos());
        let y = h(x * r0);
        if !y.is_finite() {
            return Err(Error::Domain(format!("fit target is not finite at r = {}", x * r0)));
        }
        b[i] = y;
        let mut p = T::one();
        for j in 0..cols {
            a[i * cols + j] = p;
            p = p * x;
        }
    }
    let scaled = least_squares(&mut a, &mut b, rows, cols)?;
    let mut coeffs = Vec::with_capacity(cols);
    let mut scale = T::one();
    for c in scaled {
        coeffs.push(c / scale);
        scale = scale * r0;
    }
    let mut fit = PolynomialFit { coeffs, sup_residual: T::zero() };
    let mut sup = T::zero();
    for i in 0..RESIDUAL_GRID {
        let r = r0 * T::from_count(i) / T::from_count(RESIDUAL_GRID - 1);
        sup = sup.max((h(r) - fit.eval(r)).abs());
    }
    fit.sup_residual = sup;
    Ok(fit)
}

/// Householder QR least squares on a row-major `rows × cols` matrix.
fn least_squares<T: Scalar>(a: &mut [T], b: &mut [T], rows: usize, cols: usize) -> Result<Vec<T>> {
    let mut diag = vec![T::zero(); cols];
    for k in 0..cols {
        let norm = (k..rows).fold(T::zero(), |s, i| s.hypot(a[i * cols + k]));
        if norm == T::zero() {
            return Err(Error::IllConditioned(format!("rank-deficient fit matrix at column {k}")));
        }
        let alpha = if a[k * cols + k] > T::zero() { -norm } else { norm };
        // v = x − αe₁ stored in place, β = 1 / (−α v₀)
        a[k * cols + k] = a[k * cols + k] - alpha;
        let vtv_half = -alpha * a[k * cols + k];
        for j in k + 1..cols {
            let dot = (k..rows).fold(T::zero(), |s, i| s + a[i * cols + k] * a[i * cols + j]);
            let f = dot / vtv_half;
            for i in k..rows {
                a[i * cols + j] = a[i * cols + j] - f * a[i * cols + k];
            }
        }
        let dot = (k..rows).fold(T::zero(), |s, i| s + a[i * cols + k] * b[i]);
        let f = dot / vtv_half;
        for i in k..rows {
            b[i] = b[i] - f * a[i * cols + k];
        }
        diag[k] = alpha;
    }
    let largest = diag.iter().fold(T::zero(), |m, d| m.max(d.abs()));
    let mut x = vec![T::zero(); cols];
    for k in (0..cols).rev() {
        if diag[k].abs() <= largest * T::epsilon() * T::from_count(rows) {
            return Err(Error::IllConditioned(format!("numerically singular fit matrix at column {k}")));
        }
        let s = (k + 1..cols).fold(b[k], |s, j| s - a[k * cols + j] * x[j]);
        x[k] = s / diag[k];
    }
    Ok(x)
}
