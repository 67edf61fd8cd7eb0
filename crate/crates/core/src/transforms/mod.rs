//! Linear operators of the sensing model: the per-frame measurement basis,
//! the random sample selection and the per-frame wavelet analysis.

mod measurement;
mod sampling;
mod wavelet;

pub use measurement::{MeasurementKind, MeasurementOperator};
pub use sampling::SamplingPlan;
pub use wavelet::{WaveletFamily, WaveletOperator};
