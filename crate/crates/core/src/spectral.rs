//! Eigen-factorization of the f-sub-problem operator
//! `O = mu1 * grad^T grad + (mu2 + mu3) I`.
//!
//! Each axis Gram matrix `D^T D` is diagonalized once with a dense symmetric
//! eigensolver. Because the three axis terms of `grad^T grad` act on
//! different modes they share the Kronecker eigenbasis `Q_N (x) Q_n (x) Q_m`,
//! and `O` becomes the diagonal `Lambda0` in that basis.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::derivative::DerivativeOperator;
use crate::error::{Error, Result};
use crate::tensor::{Mode, VideoTensor};
use crate::tv::GradientOperator;

/// Eigenvalues above this negative threshold are treated as rounding noise.
const CLAMP_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct AxisEigen {
    pub q: DMatrix<f64>,
    pub lambda: Vec<f64>,
}

impl AxisEigen {
    pub fn of(op: &DerivativeOperator) -> Result<Self> {
        let gram = op.gram();
        let eig = SymmetricEigen::try_new(gram, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Eigensolver(format!("no convergence for axis of length {}", op.len())))?;
        let mut lambda = Vec::with_capacity(eig.eigenvalues.len());
        for &v in eig.eigenvalues.iter() {
            if !v.is_finite() || v < -CLAMP_TOL {
                return Err(Error::Eigensolver(format!(
                    "Gram matrix eigenvalue {v} is not nonnegative"
                )));
            }
            lambda.push(v.max(0.0));
        }
        Ok(Self {
            q: eig.eigenvectors,
            lambda,
        })
    }

    /// `Q diag(lambda) Q^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&self.lambda));
        &self.q * d * self.q.transpose()
    }
}

#[derive(Debug, Clone)]
pub struct SpectralFactorization {
    axes: [AxisEigen; 3],
    lambda0: VideoTensor,
    mu: [f64; 3],
}

impl SpectralFactorization {
    pub fn factorize(grad: &GradientOperator, mu1: f64, mu2: f64, mu3: f64) -> Result<Self> {
        if !(mu1 >= 0.0 && mu2 >= 0.0 && mu3 >= 0.0 && mu2 + mu3 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "penalties must be nonnegative with mu2 + mu3 > 0, got ({mu1}, {mu2}, {mu3})"
            )));
        }
        let [dx, dy, dt] = grad.axes();
        let axes = [AxisEigen::of(dx)?, AxisEigen::of(dy)?, AxisEigen::of(dt)?];
        let (m, n, nf) = grad.shape();
        let base = mu2 + mu3;
        let lambda0 = VideoTensor::from_fn(m, n, nf, |i, j, k| {
            base + mu1 * (axes[0].lambda[i] + axes[1].lambda[j] + axes[2].lambda[k])
        });
        Ok(Self {
            axes,
            lambda0,
            mu: [mu1, mu2, mu3],
        })
    }

    pub fn axes(&self) -> &[AxisEigen; 3] {
        &self.axes
    }

    /// Diagonal of `O` in the eigenbasis, laid out like the volume.
    pub fn lambda0(&self) -> &VideoTensor {
        &self.lambda0
    }

    pub fn mu(&self) -> [f64; 3] {
        self.mu
    }

    /// `Q^T x`, mode by mode.
    pub fn to_eigenbasis(&self, x: &VideoTensor) -> Result<VideoTensor> {
        self.check(x)?;
        x.mode_product(&self.axes[0].q, Mode::Rows, true)?
            .mode_product(&self.axes[1].q, Mode::Cols, true)?
            .mode_product(&self.axes[2].q, Mode::Frames, true)
    }

    /// `Q x`, mode by mode.
    pub fn from_eigenbasis(&self, x: &VideoTensor) -> Result<VideoTensor> {
        self.check(x)?;
        x.mode_product(&self.axes[0].q, Mode::Rows, false)?
            .mode_product(&self.axes[1].q, Mode::Cols, false)?
            .mode_product(&self.axes[2].q, Mode::Frames, false)
    }

    /// `O^{-1} rhs = Q Lambda0^{-1} Q^T rhs`.
    pub fn solve_f(&self, rhs: &VideoTensor) -> Result<VideoTensor> {
        let mut z = self.to_eigenbasis(rhs)?;
        for (v, l) in z.as_mut_slice().iter_mut().zip(self.lambda0.as_slice()) {
            *v /= l;
        }
        self.from_eigenbasis(&z)
    }

    fn check(&self, x: &VideoTensor) -> Result<()> {
        if x.shape() != self.lambda0.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.lambda0.shape(),
                actual: x.shape(),
            });
        }
        Ok(())
    }
}

/// `O f` evaluated through the gradient and its adjoint.
pub fn apply_o(grad: &GradientOperator, f: &VideoTensor, mu: [f64; 3]) -> Result<VideoTensor> {
    let mut out = grad.adjoint(&grad.apply(f)?)?.scaled(mu[0]);
    out.axpy(mu[1] + mu[2], f);
    Ok(out)
}
