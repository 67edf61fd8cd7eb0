//! Space-time gradient and total variation.

use std::fmt;
use std::str::FromStr;

use crate::derivative::{BoundaryCondition, DerivativeOperator};
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::tensor::{Mode, VideoTensor};

/// Per-site combination of the three gradient components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum TvNorm {
    /// `|gx| + |gy| + |gt|`.
    #[default]
    Anisotropic,
    /// `sqrt(gx^2 + gy^2 + gt^2)`.
    Isotropic,
}

impl fmt::Display for TvNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TvNorm::Anisotropic => f.pad("aniso"),
            TvNorm::Isotropic => f.pad("iso"),
        }
    }
}

impl FromStr for TvNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "aniso" | "anisotropic" => Ok(TvNorm::Anisotropic),
            "iso" | "isotropic" => Ok(TvNorm::Isotropic),
            other => Err(Error::InvalidArgument(format!("unknown TV norm `{other}`"))),
        }
    }
}

/// `(dF/dx, dF/dy, dF/dt)`, each shaped like the volume.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub gx: VideoTensor,
    pub gy: VideoTensor,
    pub gt: VideoTensor,
}

impl GradientField {
    pub fn zeros(m: usize, n: usize, frames: usize) -> Self {
        Self {
            gx: VideoTensor::zeros(m, n, frames),
            gy: VideoTensor::zeros(m, n, frames),
            gt: VideoTensor::zeros(m, n, frames),
        }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        self.gx.shape()
    }

    pub fn components(&self) -> [&VideoTensor; 3] {
        [&self.gx, &self.gy, &self.gt]
    }

    pub fn components_mut(&mut self) -> [&mut VideoTensor; 3] {
        [&mut self.gx, &mut self.gy, &mut self.gt]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.gx.dot(&other.gx) + self.gy.dot(&other.gy) + self.gt.dot(&other.gt)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        self.gx.axpy(alpha, &other.gx);
        self.gy.axpy(alpha, &other.gy);
        self.gt.axpy(alpha, &other.gt);
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    fn check(&self) -> Result<()> {
        self.gx.same_shape(&self.gy)?;
        self.gx.same_shape(&self.gt)
    }
}

/// The stacked operator `[I (x) I (x) D_m; I (x) D_n (x) I; D_N (x) I (x) I]`.
#[derive(Debug, Clone)]
pub struct GradientOperator {
    dx: DerivativeOperator,
    dy: DerivativeOperator,
    dt: DerivativeOperator,
}

impl GradientOperator {
    pub fn new(dx: DerivativeOperator, dy: DerivativeOperator, dt: DerivativeOperator) -> Self {
        Self { dx, dy, dt }
    }

    /// Builds all three axes from one kernel design and per-axis boundary
    /// conditions and sampling intervals.
    pub fn build(
        shape: (usize, usize, usize),
        kernel: &KernelSpec,
        bcs: [BoundaryCondition; 3],
        dts: [f64; 3],
    ) -> Result<Self> {
        let (m, n, nf) = shape;
        Ok(Self {
            dx: DerivativeOperator::new(m, &kernel.with_dt(dts[0]), bcs[0])?,
            dy: DerivativeOperator::new(n, &kernel.with_dt(dts[1]), bcs[1])?,
            dt: DerivativeOperator::new(nf, &kernel.with_dt(dts[2]), bcs[2])?,
        })
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.dx.len(), self.dy.len(), self.dt.len())
    }

    pub fn axes(&self) -> [&DerivativeOperator; 3] {
        [&self.dx, &self.dy, &self.dt]
    }

    fn check(&self, shape: (usize, usize, usize)) -> Result<()> {
        if shape != self.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                actual: shape,
            });
        }
        Ok(())
    }

    /// `grad F`.
    pub fn apply(&self, f: &VideoTensor) -> Result<GradientField> {
        self.check(f.shape())?;
        Ok(GradientField {
            gx: f.mode_product(self.dx.matrix(), Mode::Rows, false)?,
            gy: f.mode_product(self.dy.matrix(), Mode::Cols, false)?,
            gt: f.mode_product(self.dt.matrix(), Mode::Frames, false)?,
        })
    }

    /// `grad^T G = D_m^T gx + D_n^T gy + D_N^T gt` along the matching modes.
    pub fn adjoint(&self, g: &GradientField) -> Result<VideoTensor> {
        g.check()?;
        self.check(g.shape())?;
        let mut out = g.gx.mode_product(self.dx.matrix(), Mode::Rows, true)?;
        out.axpy(1.0, &g.gy.mode_product(self.dy.matrix(), Mode::Cols, true)?);
        out.axpy(1.0, &g.gt.mode_product(self.dt.matrix(), Mode::Frames, true)?);
        Ok(out)
    }
}

/// Discrete TV of a gradient field, summed over all sites.
pub fn tv_norm(grads: &GradientField, norm: TvNorm) -> f64 {
    let [gx, gy, gt] = grads.components();
    let it = gx
        .as_slice()
        .iter()
        .zip(gy.as_slice())
        .zip(gt.as_slice());
    match norm {
        TvNorm::Anisotropic => it.map(|((a, b), c)| a.abs() + b.abs() + c.abs()).sum(),
        TvNorm::Isotropic => it.map(|((a, b), c)| (a * a + b * b + c * c).sqrt()).sum(),
    }
}

/// TV of a volume under a gradient operator.
pub fn total_variation(f: &VideoTensor, grad: &GradientOperator, norm: TvNorm) -> Result<f64> {
    Ok(tv_norm(&grad.apply(f)?, norm))
}
