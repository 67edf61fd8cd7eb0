//! Video volumes and mode-wise matrix products.
//!
//! A volume of `m` rows, `n` columns and `N` frames is stored flat in mode-1
//! order: pixel `(i, j)` of frame `t` lives at `i + m*j + m*n*t`. Every frame
//! is therefore a contiguous block of `m*n` values.
//!
//! Kronecker-structured operators such as `I_N (x) I_n (x) D_m` are applied as
//! mode products and never materialized. Each output entry is a sequential
//! dot product along one fiber, so results do not depend on scheduling.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Tensor axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Rows, size `m`.
    Rows,
    /// Columns, size `n`.
    Cols,
    /// Frames, size `N`.
    Frames,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VideoTensor {
    m: usize,
    n: usize,
    frames: usize,
    data: Vec<f64>,
}

impl VideoTensor {
    pub fn zeros(m: usize, n: usize, frames: usize) -> Self {
        Self {
            m,
            n,
            frames,
            data: vec![0.0; m * n * frames],
        }
    }

    pub fn from_vec(m: usize, n: usize, frames: usize, data: Vec<f64>) -> Result<Self> {
        let expected = m
            .checked_mul(n)
            .and_then(|v| v.checked_mul(frames))
            .ok_or_else(|| Error::InvalidArgument("volume size overflows".into()))?;
        if data.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self { m, n, frames, data })
    }

    pub fn from_fn(
        m: usize,
        n: usize,
        frames: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut data = Vec::with_capacity(m * n * frames);
        for t in 0..frames {
            for j in 0..n {
                for i in 0..m {
                    data.push(f(i, j, t));
                }
            }
        }
        Self { m, n, frames, data }
    }

    /// `(m, n, N)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.m, self.n, self.frames)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self, mode: Mode) -> usize {
        match mode {
            Mode::Rows => self.m,
            Mode::Cols => self.n,
            Mode::Frames => self.frames,
        }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, t: usize) -> usize {
        i + self.m * (j + self.n * t)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, t: usize) -> f64 {
        self.data[self.index(i, j, t)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, t: usize, v: f64) {
        let k = self.index(i, j, t);
        self.data[k] = v;
    }

    /// `vec(F)`.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn frame(&self, t: usize) -> &[f64] {
        let sz = self.m * self.n;
        &self.data[t * sz..(t + 1) * sz]
    }

    pub fn frame_mut(&mut self, t: usize) -> &mut [f64] {
        let sz = self.m * self.n;
        &mut self.data[t * sz..(t + 1) * sz]
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                actual: other.shape(),
            });
        }
        Ok(())
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            m: self.m,
            n: self.n,
            frames: self.frames,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `self + alpha * other`, in place.
    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        self.map(|v| alpha * v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Multiplies every fiber along `mode` by `matrix` (or its transpose).
    ///
    /// The matrix must be `k x dim(mode)` (`dim(mode) x k` when transposed);
    /// the result has size `k` along `mode`.
    pub fn mode_product(&self, matrix: &DMatrix<f64>, mode: Mode, transpose: bool) -> Result<Self> {
        let (rows, cols) = if transpose {
            (matrix.ncols(), matrix.nrows())
        } else {
            (matrix.nrows(), matrix.ncols())
        };
        let dim = self.dim(mode);
        if cols != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                actual: cols,
            });
        }
        let coef = |r: usize, c: usize| {
            if transpose {
                matrix[(c, r)]
            } else {
                matrix[(r, c)]
            }
        };
        let (m, n, nf) = self.shape();
        let mut out = match mode {
            Mode::Rows => Self::zeros(rows, n, nf),
            Mode::Cols => Self::zeros(m, rows, nf),
            Mode::Frames => Self::zeros(m, n, rows),
        };
        match mode {
            Mode::Rows => {
                for t in 0..nf {
                    for j in 0..n {
                        let src = &self.data[m * (j + n * t)..m * (j + n * t) + m];
                        for r in 0..rows {
                            let mut acc = 0.0;
                            for (c, x) in src.iter().enumerate() {
                                acc += coef(r, c) * x;
                            }
                            let k = out.index(r, j, t);
                            out.data[k] = acc;
                        }
                    }
                }
            }
            Mode::Cols => {
                for t in 0..nf {
                    for i in 0..m {
                        for r in 0..rows {
                            let mut acc = 0.0;
                            for c in 0..n {
                                acc += coef(r, c) * self.data[self.index(i, c, t)];
                            }
                            let k = out.index(i, r, t);
                            out.data[k] = acc;
                        }
                    }
                }
            }
            Mode::Frames => {
                for j in 0..n {
                    for i in 0..m {
                        for r in 0..rows {
                            let mut acc = 0.0;
                            for c in 0..nf {
                                acc += coef(r, c) * self.data[self.index(i, j, c)];
                            }
                            let k = out.index(i, j, r);
                            out.data[k] = acc;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Applies `f` to every fiber along `mode`, writing into a same-shaped tensor.
    pub fn map_fibers(&self, mode: Mode, mut f: impl FnMut(&[f64], &mut [f64])) -> Self {
        let (m, n, nf) = self.shape();
        let mut out = Self::zeros(m, n, nf);
        let dim = self.dim(mode);
        let mut fiber = vec![0.0; dim];
        let mut result = vec![0.0; dim];
        let (outer_a, outer_b) = match mode {
            Mode::Rows => (n, nf),
            Mode::Cols => (m, nf),
            Mode::Frames => (m, n),
        };
        for b in 0..outer_b {
            for a in 0..outer_a {
                let at = |k: usize| match mode {
                    Mode::Rows => (k, a, b),
                    Mode::Cols => (a, k, b),
                    Mode::Frames => (a, b, k),
                };
                for (k, v) in fiber.iter_mut().enumerate() {
                    let (i, j, t) = at(k);
                    *v = self.get(i, j, t);
                }
                f(&fiber, &mut result);
                for (k, v) in result.iter().enumerate() {
                    let (i, j, t) = at(k);
                    out.set(i, j, t, *v);
                }
            }
        }
        out
    }
}
