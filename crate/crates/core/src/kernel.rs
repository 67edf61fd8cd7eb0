//! Noise-robust high-order derivative FIR kernels.
//!
//! A kernel of odd length `L` is anti-symmetric and fully described by its
//! half-kernel `d_1 .. d_A` with `A = (L-1)/2`:
//!
//! ```text
//! v'_k ~ (1/T) * sum_{l=1..A} d_l (v_{k+l} - v_{k-l})
//! ```
//!
//! The coefficients solve a square linear system: `n_o` rows match the ideal
//! response `i*omega` at `omega = 0` (exactness on polynomials) and `m_o`
//! rows force tangency of the response to zero at `omega = pi` (high
//! frequency suppression). The system matrix holds integer powers of `l`
//! and becomes extremely ill-conditioned for long kernels (condition number
//! around 1e28 at `L = 27`), so it is eliminated exactly over the rationals
//! and only the final coefficients are rounded to `f64`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Kernel length used by the reference parameter set.
pub const DEFAULT_LENGTH: usize = 27;
/// Accuracy order used by the reference parameter set.
pub const DEFAULT_ACCURACY: usize = 25;

/// Largest tolerated per-row relative residual of the rounded coefficients.
const RESIDUAL_TOL: f64 = 1e-10;

/// A designed anti-symmetric derivative kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    length: usize,
    accuracy: usize,
    suppression: i64,
    dt: f64,
    half: Vec<f64>,
}

impl KernelSpec {
    /// Designs the kernel of length `length` exact up to polynomial order
    /// `accuracy`, applied with sampling interval `dt`.
    ///
    /// `length` must be odd and at least 3 and `2 <= accuracy <= length - 1`.
    /// An odd `accuracy` yields the same system as `accuracy + 1`.
    pub fn design(length: usize, accuracy: usize, dt: f64) -> Result<Self> {
        if length < 3 || length.is_multiple_of(2) {
            return Err(Error::InvalidKernel(format!(
                "length must be odd and >= 3, got {length}"
            )));
        }
        if accuracy < 2 || accuracy > length - 1 {
            return Err(Error::InvalidKernel(format!(
                "accuracy must lie in [2, {}], got {accuracy}",
                length - 1
            )));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "sampling interval must be positive, got {dt}"
            )));
        }
        let half_len = (length - 1) / 2;
        let (precision_rows, suppression_rows) = row_counts(length, accuracy);
        let system = design_system(half_len, precision_rows, suppression_rows);
        let exact = solve_exact(system.clone(), half_len).ok_or(Error::SingularKernelSystem {
            length,
            accuracy,
        })?;
        let half: Vec<f64> = exact
            .iter()
            .map(|r| r.to_f64().unwrap_or(f64::NAN))
            .collect();

        let residual = relative_residual(&system, &half);
        if !(residual <= RESIDUAL_TOL) {
            return Err(Error::SingularKernelSystem { length, accuracy });
        }

        Ok(Self {
            length,
            accuracy,
            suppression: 2 * suppression_rows as i64 - 1,
            dt,
            half,
        })
    }

    /// Builds a kernel from explicit half-kernel coefficients.
    pub fn from_half(half: Vec<f64>, dt: f64) -> Result<Self> {
        if half.is_empty() {
            return Err(Error::InvalidKernel("empty half-kernel".into()));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "sampling interval must be positive, got {dt}"
            )));
        }
        let length = 2 * half.len() + 1;
        Ok(Self {
            length,
            accuracy: 2,
            suppression: -1,
            dt,
            half,
        })
    }

    /// Same coefficients, different sampling interval.
    pub fn with_dt(&self, dt: f64) -> Self {
        Self { dt, ..self.clone() }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn accuracy(&self) -> usize {
        self.accuracy
    }

    /// Suppression order `q`, odd; `-1` when no tangency rows are imposed.
    pub fn suppression(&self) -> i64 {
        self.suppression
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `A = (L-1)/2`.
    pub fn half_width(&self) -> usize {
        self.half.len()
    }

    /// Half-kernel coefficients `d_1 .. d_A` (independent of `dt`).
    pub fn half(&self) -> &[f64] {
        &self.half
    }

    /// Imaginary part of the transfer function, `(2/T) sum d_l sin(l T omega)`.
    pub fn frequency_response(&self, omega: f64) -> f64 {
        let t = self.dt;
        2.0 / t
            * self
                .half
                .iter()
                .enumerate()
                .map(|(i, d)| d * ((i + 1) as f64 * t * omega).sin())
                .sum::<f64>()
    }

    /// The full length-`L` kernel `[d_A, .., d_1, 0, -d_1, .., -d_A] / T`.
    ///
    /// As a convolution, `f'_j = sum_i kernel[i] * f[j + A - i]`.
    pub fn full_kernel(&self) -> Vec<f64> {
        let a = self.half.len();
        let mut k = vec![0.0; 2 * a + 1];
        for (i, d) in self.half.iter().enumerate() {
            let l = i + 1;
            k[a - l] = d / self.dt;
            k[a + l] = -d / self.dt;
        }
        k
    }

    /// Per-row relative residual of the rounded coefficients against the
    /// design system.
    pub fn residual(&self) -> f64 {
        let (n_o, m_o) = row_counts(self.length, self.accuracy);
        relative_residual(&design_system(self.half.len(), n_o, m_o), &self.half)
    }
}

/// `(n_o, m_o)`: precision and suppression row counts.
fn row_counts(length: usize, accuracy: usize) -> (usize, usize) {
    let half_len = (length - 1) / 2;
    let precision = (accuracy - 1) / 2 + 1;
    (precision, half_len.saturating_sub(precision))
}

/// Integer system rows `[coefficients..., rhs_numerator]`; rhs of row 0 is 1/2.
fn design_system(half_len: usize, precision_rows: usize, suppression_rows: usize) -> Vec<Vec<BigInt>> {
    let mut rows = Vec::with_capacity(half_len);
    for k in 0..precision_rows {
        rows.push(
            (1..=half_len)
                .map(|l| BigInt::from(l).pow(2 * k as u32 + 1))
                .collect(),
        );
    }
    for k in 0..suppression_rows {
        rows.push(
            (1..=half_len)
                .map(|l| {
                    let v = BigInt::from(l).pow(2 * k as u32 + 1);
                    if l % 2 == 1 {
                        -v
                    } else {
                        v
                    }
                })
                .collect(),
        );
    }
    rows
}

/// Gaussian elimination with pivoting over the rationals; rhs is `[1/2, 0, ..]`.
fn solve_exact(rows: Vec<Vec<BigInt>>, n: usize) -> Option<Vec<BigRational>> {
    if rows.len() != n {
        return None;
    }
    let mut a: Vec<Vec<BigRational>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(BigRational::from_integer).collect())
        .collect();
    let mut b: Vec<BigRational> = (0..n)
        .map(|i| {
            if i == 0 {
                BigRational::new(BigInt::one(), BigInt::from(2))
            } else {
                BigRational::zero()
            }
        })
        .collect();

    for col in 0..n {
        // largest magnitude pivot keeps intermediate numbers smaller
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .max_by(|&x, &y| a[x][col].abs().cmp(&a[y][col].abs()))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &a[col][col];
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }

    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = b[i].clone();
        for j in i + 1..n {
            acc -= &a[i][j] * &x[j];
        }
        x[i] = acc / &a[i][i];
    }
    Some(x)
}

fn relative_residual(rows: &[Vec<BigInt>], half: &[f64]) -> f64 {
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let terms: Vec<f64> = row
                .iter()
                .zip(half)
                .map(|(m, d)| m.to_f64().unwrap_or(f64::INFINITY) * d)
                .collect();
            let rhs = if i == 0 { 0.5 } else { 0.0 };
            let scale = terms.iter().map(|t| t.abs()).sum::<f64>().max(0.5);
            (terms.iter().sum::<f64>() - rhs).abs() / scale
        })
        .fold(0.0, f64::max)
}
