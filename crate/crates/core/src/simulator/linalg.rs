use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Lower triangle of `K = noise·I + Σ_i p_i g_i g_iᴴ`, row-major `l × l`.
///
/// `g` holds the interferer vectors as consecutive length-`stride` columns;
/// only the leading `l` entries of each are used.
pub(crate) fn gram<T: Scalar>(noise: T, powers: &[T], g: &[Complex<T>], stride: usize, l: usize) -> Vec<Complex<T>> {
    let mut k = vec![Complex::new(T::zero(), T::zero()); l * l];
    for i in 0..l {
        k[i * l + i].re = noise;
    }
    for (n, &p) in powers.iter().enumerate() {
        let col = &g[n * stride..n * stride + l];
        for i in 0..l {
            let gi = col[i] * p;
            let row = &mut k[i * l..i * l + i + 1];
            for (j, kij) in row.iter_mut().enumerate() {
                *kij = *kij + gi * col[j].conj();
            }
        }
    }
    k
}

/// In-place Cholesky `K = C Cᴴ` of a Hermitian positive-definite matrix
/// given by its lower triangle.
pub(crate) fn cholesky<T: Scalar>(k: &mut [Complex<T>], l: usize) -> Result<()> {
    for j in 0..l {
        let mut d = k[j * l + j].re;
        for c in &k[j * l..j * l + j] {
            d = d - c.norm_sqr();
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(Error::Factorization(format!(
                "interference-plus-noise matrix is not positive definite at pivot {j}"
            )));
        }
        let djj = d.sqrt();
        k[j * l + j] = Complex::new(djj, T::zero());
        for i in j + 1..l {
            let mut s = k[i * l + j];
            for m in 0..j {
                s = s - k[i * l + m] * k[j * l + m].conj();
            }
            k[i * l + j] = s / djj;
        }
    }
    Ok(())
}

/// Partial sums `Σ_{i<m} |y_i|²`, `m = 1..=l`, of `y = C⁻¹ b`.
///
/// Because the leading block of a Cholesky factor factors the leading block
/// of `K`, entry `m − 1` is `b_mᴴ K_m⁻¹ b_m` for the first `m` antennas.
pub(crate) fn forward_quadratic_forms<T: Scalar>(c: &[Complex<T>], b: &[Complex<T>], l: usize) -> Vec<T> {
    let mut y: Vec<Complex<T>> = Vec::with_capacity(l);
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(l);
    for i in 0..l {
        let mut s = b[i];
        for (m, ym) in y.iter().enumerate() {
            s = s - c[i * l + m] * *ym;
        }
        let yi = s / c[i * l + i].re;
        acc = acc + yi.norm_sqr();
        out.push(acc);
        y.push(yi);
    }
    out
}
