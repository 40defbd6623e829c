//! SINR distribution of a multi-antenna MMSE receiver surrounded by
//! interferers from a non-homogeneous planar Poisson point process with
//! Rayleigh fading.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar for the common double-precision case.
//!
//! ```
//! use sinr_core::{IntensityModelF64, LinkConfigF64, SinrDistributionF64};
//!
//! let model = IntensityModelF64::power_law(0.023, -0.5).unwrap();
//! let link = LinkConfigF64::new(4.0, 1e-12, 10.0, 10).unwrap();
//! let dist = SinrDistributionF64::from_model(model, link).unwrap();
//! let p = dist.cdf_sinr(1.0).unwrap();
//! assert!(p > 0.0 && p < 1.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod distribution;
pub mod error;
pub mod intensity;
pub mod psi;
pub mod scalar;
pub mod simulator;
pub mod specfun;

pub use distribution::{LinkConfig, SinrDistribution};
pub use error::{Error, Result};
pub use intensity::{DiskRegion, IntensityModel, PowerLawSegment, Profile};
pub use psi::{PsiEvaluator, PsiMethod};
pub use scalar::Scalar;
pub use simulator::{EmpiricalDistribution, FarField, SimConfig};
pub use specfun::QuadratureSpec;

pub type IntensityModelF64 = IntensityModel<f64>;
pub type DiskRegionF64 = DiskRegion<f64>;
pub type PowerLawSegmentF64 = PowerLawSegment<f64>;
pub type PsiEvaluatorF64 = PsiEvaluator<f64>;
pub type LinkConfigF64 = LinkConfig<f64>;
pub type SinrDistributionF64 = SinrDistribution<f64>;
pub type SimConfigF64 = SimConfig<f64>;
pub type EmpiricalDistributionF64 = EmpiricalDistribution<f64>;
pub type QuadratureSpecF64 = QuadratureSpec<f64>;

pub type IntensityModelF32 = IntensityModel<f32>;
pub type PsiEvaluatorF32 = PsiEvaluator<f32>;
pub type LinkConfigF32 = LinkConfig<f32>;
pub type SinrDistributionF32 = SinrDistribution<f32>;
