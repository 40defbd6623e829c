use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sorted Monte-Carlo samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution<T> {
    samples: Vec<T>,
}

impl<T: Scalar> EmpiricalDistribution<T> {
    pub fn new(mut samples: Vec<T>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap_or_else(|| a.is_nan().cmp(&b.is_nan())));
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn trials(&self) -> usize {
        self.samples.len()
    }

    /// Right-continuous `#{x_i <= x} / N`.
    pub fn cdf(&self, x: T) -> T {
        T::from_count(self.samples.partition_point(|&s| s <= x)) / T::from_count(self.samples.len())
    }

    /// Sample quantile `x_{⌈pN⌉}`, `p ∈ (0, 1]`.
    pub fn quantile(&self, p: T) -> T {
        let n = self.samples.len();
        let k = (p * T::from_count(n)).ceil().to_usize().unwrap_or(1).clamp(1, n);
        self.samples[k - 1]
    }

    pub fn median(&self) -> T {
        self.quantile(T::lit(0.5))
    }

    /// Two-sided Kolmogorov–Smirnov statistic against `cdf`, checking both
    /// sides of every step.
    pub fn ks_distance<F>(&self, cdf: F) -> Result<T>
    where
        F: Fn(T) -> Result<T>,
    {
        let n = T::from_count(self.samples.len());
        let mut d = T::zero();
        for (i, &x) in self.samples.iter().enumerate() {
            let f = cdf(x)?;
            d = d.max((f - T::from_count(i) / n).abs()).max((T::from_count(i + 1) / n - f).abs());
        }
        Ok(d)
    }

    /// Two-sample KS statistic `sup |F_a − F_b|`.
    pub fn ks_two_sample(&self, other: &Self) -> T {
        let (a, b) = (&self.samples, &other.samples);
        let (na, nb) = (T::from_count(a.len()), T::from_count(b.len()));
        let (mut i, mut j) = (0, 0);
        let mut d = T::zero();
        while i < a.len() && j < b.len() {
            let x = if a[i] <= b[j] { a[i] } else { b[j] };
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            d = d.max((T::from_count(i) / na - T::from_count(j) / nb).abs());
        }
        d
    }
}

/// `F_emp(x)` of `dist`.
pub fn empirical_cdf<T: Scalar>(dist: &EmpiricalDistribution<T>, x: T) -> T {
    dist.cdf(x)
}

/// KS distance of `dist` to `cdf`.
pub fn ks_distance<T: Scalar, F: Fn(T) -> Result<T>>(dist: &EmpiricalDistribution<T>, cdf: F) -> Result<T> {
    dist.ks_distance(cdf)
}

/// `c(α)/√N`; `c = 1.63` at the 1% level.
pub fn ks_critical_value(trials: usize, coefficient: f64) -> f64 {
    coefficient / (trials as f64).sqrt()
}
