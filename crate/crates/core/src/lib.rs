//! High-order-accuracy total variation with boundary-aware derivative
//! operators, and a compressive video reconstruction solver built on it.
//!
//! The crate is organized bottom-up:
//!
//! - [`kernel`] designs noise-robust anti-symmetric derivative kernels.
//! - [`derivative`] turns a kernel and a boundary rule into a dense matrix.
//! - [`tensor`] and [`tv`] apply those matrices along the axes of a video
//!   volume and evaluate its total variation.
//! - [`transforms`] provides the measurement, sampling and wavelet operators.
//! - [`spectral`] and [`solver`] implement the ADMM reconstruction.
//! - [`experiments`] holds signal generators, metrics and sweep harnesses.
//! - [`io`] and [`cli`] handle files and the command-line front end.

pub mod cli;
pub mod derivative;
pub mod error;
pub mod experiments;
pub mod io;
pub mod kernel;
pub mod prox;
pub mod rng;
pub mod solver;
pub mod spectral;
pub mod tensor;
pub mod transforms;
pub mod tv;

pub use derivative::{BoundaryCondition, BoundaryKind, DerivativeOperator};
pub use error::{Error, Result};
pub use kernel::KernelSpec;
pub use tensor::{Mode, VideoTensor};
pub use tv::{GradientField, GradientOperator, TvNorm};
