use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::rng::{SeededRng, STREAM_MEASUREMENT};
use crate::tensor::{Mode, VideoTensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasurementKind {
    /// i.i.d. Gaussian entries with orthonormalized rows.
    GaussianOrthonormal,
    /// Sylvester Walsh-Hadamard matrix scaled by `1/sqrt(dim)`.
    WalshHadamard,
}

impl fmt::Display for MeasurementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurementKind::GaussianOrthonormal => f.pad("gauss"),
            MeasurementKind::WalshHadamard => f.pad("hadamard"),
        }
    }
}

impl FromStr for MeasurementKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "gauss" | "gaussian" => Ok(MeasurementKind::GaussianOrthonormal),
            "hadamard" | "walsh-hadamard" => Ok(MeasurementKind::WalshHadamard),
            other => Err(Error::InvalidArgument(format!("unknown transform `{other}`"))),
        }
    }
}

/// `I_N (x) Phi_n (x) Phi_m`: the same orthonormal 2D transform on every frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOperator {
    kind: MeasurementKind,
    seed: u64,
    phi_m: DMatrix<f64>,
    phi_n: DMatrix<f64>,
}

impl MeasurementOperator {
    /// Gaussian matrices draw `Phi_m` then `Phi_n` row by row from the
    /// measurement stream of `seed`; the seed is ignored for Hadamard.
    pub fn new(kind: MeasurementKind, m: usize, n: usize, seed: u64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument("zero frame dimension".into()));
        }
        let (phi_m, phi_n) = match kind {
            MeasurementKind::GaussianOrthonormal => {
                let mut rng = SeededRng::new(seed, STREAM_MEASUREMENT);
                let a = gaussian_orthonormal(m, &mut rng)?;
                let b = gaussian_orthonormal(n, &mut rng)?;
                (a, b)
            }
            MeasurementKind::WalshHadamard => (hadamard(m)?, hadamard(n)?),
        };
        Ok(Self {
            kind,
            seed,
            phi_m,
            phi_n,
        })
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn phi_m(&self) -> &DMatrix<f64> {
        &self.phi_m
    }

    pub fn phi_n(&self) -> &DMatrix<f64> {
        &self.phi_n
    }

    fn check(&self, f: &VideoTensor) -> Result<()> {
        let (m, n, nf) = f.shape();
        if m != self.phi_m.nrows() || n != self.phi_n.nrows() {
            return Err(Error::ShapeMismatch {
                expected: (self.phi_m.nrows(), self.phi_n.nrows(), nf),
                actual: f.shape(),
            });
        }
        Ok(())
    }

    /// `Phi_m` along mode 1 and `Phi_n` along mode 2 of every frame.
    pub fn measure(&self, f: &VideoTensor) -> Result<VideoTensor> {
        self.check(f)?;
        f.mode_product(&self.phi_m, Mode::Rows, false)?
            .mode_product(&self.phi_n, Mode::Cols, false)
    }

    pub fn adjoint(&self, y: &VideoTensor) -> Result<VideoTensor> {
        self.check(y)?;
        y.mode_product(&self.phi_m, Mode::Rows, true)?
            .mode_product(&self.phi_n, Mode::Cols, true)
    }
}

fn gaussian_orthonormal(dim: usize, rng: &mut SeededRng) -> Result<DMatrix<f64>> {
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            a[(i, j)] = rng.normal();
        }
    }
    // modified Gram-Schmidt over rows
    for i in 0..dim {
        for k in 0..i {
            let proj: f64 = (0..dim).map(|j| a[(i, j)] * a[(k, j)]).sum();
            for j in 0..dim {
                a[(i, j)] -= proj * a[(k, j)];
            }
        }
        let norm = (0..dim).map(|j| a[(i, j)].powi(2)).sum::<f64>().sqrt();
        if !(norm > 1e-12) {
            return Err(Error::InvalidArgument(
                "degenerate Gaussian draw during orthonormalization".into(),
            ));
        }
        for j in 0..dim {
            a[(i, j)] /= norm;
        }
    }
    Ok(a)
}

fn hadamard(dim: usize) -> Result<DMatrix<f64>> {
    if !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    let scale = 1.0 / (dim as f64).sqrt();
    Ok(DMatrix::from_fn(dim, dim, |i, j| {
        if (i & j).count_ones() % 2 == 0 {
            scale
        } else {
            -scale
        }
    }))
}
