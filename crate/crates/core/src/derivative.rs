//! Dense derivative matrices with boundary conditions.
//!
//! `D = B_L S_L + D_T + B_R S_R`, where `D_T` is the banded Toeplitz stencil
//! of the kernel and `S_L`, `S_R` express the `A` samples beyond each end of
//! the signal as linear combinations of in-range samples. The matrix is
//! assembled row by row by substituting those combinations into the stencil.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    Zero,
    Periodic,
    Reflective,
    AntiReflective,
}

/// Boundary rule for one axis. `shift` is only read by the reflective kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundaryCondition {
    pub kind: BoundaryKind,
    pub shift: u8,
}

impl BoundaryCondition {
    pub const fn zero() -> Self {
        Self {
            kind: BoundaryKind::Zero,
            shift: 0,
        }
    }

    pub const fn periodic() -> Self {
        Self {
            kind: BoundaryKind::Periodic,
            shift: 0,
        }
    }

    /// Mirror about the boundary sample with `shift = 0`, so `f_{-1} = f_0`.
    pub const fn reflective() -> Self {
        Self {
            kind: BoundaryKind::Reflective,
            shift: 0,
        }
    }

    /// Point reflection through the boundary value with `shift = 1`, so
    /// `f_{-l} = 2 f_0 - f_l`. Affine signals are extended exactly.
    pub const fn anti_reflective() -> Self {
        Self {
            kind: BoundaryKind::AntiReflective,
            shift: 1,
        }
    }

    pub fn with_shift(self, shift: u8) -> Result<Self> {
        if shift > 1 {
            return Err(Error::InvalidArgument(format!(
                "boundary shift must be 0 or 1, got {shift}"
            )));
        }
        Ok(Self { shift, ..self })
    }

    pub fn all_kinds() -> [Self; 4] {
        [
            Self::zero(),
            Self::periodic(),
            Self::reflective(),
            Self::anti_reflective(),
        ]
    }

    /// Expresses the (possibly out-of-range) sample `index` of a length-`n`
    /// signal as `(in-range index, weight)` terms.
    fn extension(&self, index: isize, n: usize) -> Extension {
        let ni = n as isize;
        if (0..ni).contains(&index) {
            return Extension::one(index as usize, 1.0);
        }
        let s = self.shift as isize;
        match self.kind {
            BoundaryKind::Zero => Extension::none(),
            BoundaryKind::Periodic => Extension::one(index.rem_euclid(ni) as usize, 1.0),
            BoundaryKind::Reflective => {
                if index < 0 {
                    Extension::one((-index - 1 + s) as usize, 1.0)
                } else {
                    Extension::one((2 * ni - 1 - index - s) as usize, 1.0)
                }
            }
            BoundaryKind::AntiReflective => {
                if index < 0 {
                    Extension::two(0, 2.0, (-index - 1 + s) as usize, -1.0)
                } else {
                    Extension::two(n - 1, 2.0, (2 * ni - 1 - index - s) as usize, -1.0)
                }
            }
        }
    }
}

impl Default for BoundaryCondition {
    fn default() -> Self {
        Self::anti_reflective()
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BoundaryKind::Zero => f.pad("zero"),
            BoundaryKind::Periodic => f.pad("periodic"),
            BoundaryKind::Reflective => f.pad("reflective"),
            BoundaryKind::AntiReflective => f.pad("antireflective"),
        }
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "zero" | "z" => Ok(Self::zero()),
            "periodic" | "p" => Ok(Self::periodic()),
            "reflective" | "r" => Ok(Self::reflective()),
            "antireflective" | "anti-reflective" | "ar" => Ok(Self::anti_reflective()),
            other => Err(Error::UnknownBoundary(other.to_string())),
        }
    }
}

// At most two terms per extended sample.
struct Extension {
    terms: [(usize, f64); 2],
    len: usize,
}

impl Extension {
    fn none() -> Self {
        Self {
            terms: [(0, 0.0); 2],
            len: 0,
        }
    }
    fn one(i: usize, w: f64) -> Self {
        Self {
            terms: [(i, w), (0, 0.0)],
            len: 1,
        }
    }
    fn two(i: usize, w: f64, j: usize, v: f64) -> Self {
        Self {
            terms: [(i, w), (j, v)],
            len: 2,
        }
    }
    fn iter(&self) -> impl Iterator<Item = &(usize, f64)> {
        self.terms[..self.len].iter()
    }
}

/// Differentiation along one axis of length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeOperator {
    kernel: KernelSpec,
    bc: BoundaryCondition,
    matrix: DMatrix<f64>,
}

impl DerivativeOperator {
    pub fn new(n: usize, kernel: &KernelSpec, bc: BoundaryCondition) -> Result<Self> {
        if n < kernel.length() {
            return Err(Error::SignalTooShort {
                n,
                length: kernel.length(),
            });
        }
        if bc.shift > 1 {
            return Err(Error::InvalidArgument(format!(
                "boundary shift must be 0 or 1, got {}",
                bc.shift
            )));
        }
        let dt = kernel.dt();
        let mut matrix = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            for (i, &d) in kernel.half().iter().enumerate() {
                let l = (i + 1) as isize;
                let w = d / dt;
                for &(col, c) in bc.extension(j as isize + l, n).iter() {
                    matrix[(j, col)] += w * c;
                }
                for &(col, c) in bc.extension(j as isize - l, n).iter() {
                    matrix[(j, col)] -= w * c;
                }
            }
        }
        Ok(Self {
            kernel: kernel.clone(),
            bc,
            matrix,
        })
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn boundary(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `D f`.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if f.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: f.len(),
            });
        }
        let mut out = vec![0.0; n];
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, x) in f.iter().enumerate() {
                acc += self.matrix[(j, k)] * x;
            }
            *o = acc;
        }
        Ok(out)
    }

    /// `D^T g`.
    pub fn apply_transpose(&self, g: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if g.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: g.len(),
            });
        }
        let mut out = vec![0.0; n];
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, x) in g.iter().enumerate() {
                acc += self.matrix[(j, k)] * x;
            }
            *o = acc;
        }
        Ok(out)
    }

    /// `D^T D`, exactly symmetric.
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut g = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += self.matrix[(k, i)] * self.matrix[(k, j)];
                }
                g[(i, j)] = acc;
                g[(j, i)] = acc;
            }
        }
        g
    }
}
