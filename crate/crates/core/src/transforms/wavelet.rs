use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tensor::{Mode, VideoTensor};

// Symlet-10 reconstruction low-pass filter.
const SYM10: [f64; 20] = [
    -0.0004593294210046588,
    5.7036083618494284e-05,
    0.004593173585311828,
    -0.0008043589320165449,
    -0.02035493981231129,
    0.005764912033581909,
    0.04999497207737669,
    -0.0319900568824278,
    -0.03553674047381755,
    0.38382676106708546,
    0.7695100370211071,
    0.47169066693843925,
    -0.07088053578324385,
    -0.15949427888491757,
    0.011609893903711381,
    0.0459272392310922,
    -0.0014653825813050513,
    -0.008641299277022422,
    9.563267072289475e-05,
    0.0007701598091144901,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaveletFamily {
    Haar,
    Symmlet10,
}

impl WaveletFamily {
    fn lowpass(&self) -> Vec<f64> {
        match self {
            WaveletFamily::Haar => vec![std::f64::consts::FRAC_1_SQRT_2; 2],
            WaveletFamily::Symmlet10 => SYM10.to_vec(),
        }
    }
}

impl fmt::Display for WaveletFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WaveletFamily::Haar => f.pad("haar"),
            WaveletFamily::Symmlet10 => f.pad("sym10"),
        }
    }
}

impl FromStr for WaveletFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(WaveletFamily::Haar),
            "sym10" | "symmlet10" => Ok(WaveletFamily::Symmlet10),
            other => Err(Error::InvalidArgument(format!("unknown wavelet `{other}`"))),
        }
    }
}

/// Periodized orthonormal 2D wavelet transform applied to every frame.
///
/// The 1D multilevel transform runs along the columns of the frame and then
/// along its rows; coefficients of each level are stored as
/// `[approximation | detail]` inside the leading part of the fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletOperator {
    family: WaveletFamily,
    levels: usize,
    m: usize,
    n: usize,
    h: Vec<f64>,
    g: Vec<f64>,
}

impl WaveletOperator {
    pub fn new(family: WaveletFamily, levels: usize, m: usize, n: usize) -> Result<Self> {
        let div = 1usize
            .checked_shl(levels as u32)
            .ok_or_else(|| Error::InvalidArgument(format!("too many wavelet levels: {levels}")))?;
        for dim in [m, n] {
            if dim == 0 || dim % div != 0 {
                return Err(Error::WaveletDivisibility { dim, levels });
            }
        }
        let h = family.lowpass();
        let len = h.len();
        let g = (0..len)
            .map(|t| if t % 2 == 0 { h[len - 1 - t] } else { -h[len - 1 - t] })
            .collect();
        Ok(Self {
            family,
            levels,
            m,
            n,
            h,
            g,
        })
    }

    /// Largest level count `<= wanted` that divides both frame dimensions.
    pub fn max_levels(m: usize, n: usize, wanted: usize) -> usize {
        let mut l = wanted;
        while l > 0 && (!m.is_multiple_of(1 << l) || !n.is_multiple_of(1 << l)) {
            l -= 1;
        }
        l
    }

    pub fn family(&self) -> WaveletFamily {
        self.family
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    fn check(&self, f: &VideoTensor) -> Result<()> {
        if f.rows() != self.m || f.cols() != self.n {
            return Err(Error::ShapeMismatch {
                expected: (self.m, self.n, f.frames()),
                actual: f.shape(),
            });
        }
        Ok(())
    }

    /// `Psi f`.
    pub fn analysis(&self, f: &VideoTensor) -> Result<VideoTensor> {
        self.check(f)?;
        let a = f.map_fibers(Mode::Rows, |x, y| self.forward_1d(x, y));
        Ok(a.map_fibers(Mode::Cols, |x, y| self.forward_1d(x, y)))
    }

    /// `Psi^T w`, which is also the inverse.
    pub fn synthesis(&self, w: &VideoTensor) -> Result<VideoTensor> {
        self.check(w)?;
        let a = w.map_fibers(Mode::Cols, |x, y| self.inverse_1d(x, y));
        Ok(a.map_fibers(Mode::Rows, |x, y| self.inverse_1d(x, y)))
    }

    fn forward_1d(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
        let mut buf = vec![0.0; x.len()];
        let mut cur = x.len();
        for _ in 0..self.levels {
            let half = cur / 2;
            for k in 0..half {
                let (mut a, mut d) = (0.0, 0.0);
                for (t, (&h, &g)) in self.h.iter().zip(&self.g).enumerate() {
                    let v = out[(2 * k + t) % cur];
                    a += h * v;
                    d += g * v;
                }
                buf[k] = a;
                buf[half + k] = d;
            }
            out[..cur].copy_from_slice(&buf[..cur]);
            cur = half;
        }
    }

    fn inverse_1d(&self, w: &[f64], out: &mut [f64]) {
        out.copy_from_slice(w);
        let mut buf = vec![0.0; w.len()];
        let mut cur = w.len() >> self.levels;
        for _ in 0..self.levels {
            let next = cur * 2;
            buf[..next].iter_mut().for_each(|v| *v = 0.0);
            for k in 0..cur {
                let (a, d) = (out[k], out[cur + k]);
                for (t, (&h, &g)) in self.h.iter().zip(&self.g).enumerate() {
                    buf[(2 * k + t) % next] += h * a + g * d;
                }
            }
            out[..next].copy_from_slice(&buf[..next]);
            cur = next;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(m: usize, n: usize, f: usize) -> VideoTensor {
        VideoTensor::from_fn(m, n, f, |i, j, t| ((i * 7 + j * 3 + t * 11) % 13) as f64 - 4.5)
    }

    #[test]
    fn filters_normalized() {
        let s: f64 = SYM10.iter().sum();
        let e: f64 = SYM10.iter().map(|v| v * v).sum();
        assert!((s - 2f64.sqrt()).abs() < 1e-12);
        assert!((e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_reconstruction_and_energy() {
        for (family, levels) in [(WaveletFamily::Haar, 3), (WaveletFamily::Symmlet10, 4)] {
            let w = WaveletOperator::new(family, levels, 16, 32).unwrap();
            let f = ramp(16, 32, 3);
            let c = w.analysis(&f).unwrap();
            assert!((c.norm() - f.norm()).abs() / f.norm() < 1e-12);
            let back = w.synthesis(&c).unwrap();
            assert!(back.sub(&f).norm() / f.norm() < 1e-12);
        }
    }

    #[test]
    fn haar_single_level() {
        let w = WaveletOperator::new(WaveletFamily::Haar, 1, 2, 2).unwrap();
        let f = VideoTensor::from_vec(2, 2, 1, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let c = w.analysis(&f).unwrap();
        assert!((c.get(0, 0, 0) - 2.0).abs() < 1e-15);
        assert!(c.as_slice()[1..].iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn divisibility() {
        assert!(matches!(
            WaveletOperator::new(WaveletFamily::Symmlet10, 4, 24, 32),
            Err(Error::WaveletDivisibility { dim: 24, levels: 4 })
        ));
        assert_eq!(WaveletOperator::max_levels(24, 32, 4), 3);
        assert_eq!(WaveletOperator::max_levels(15, 32, 4), 0);
    }
}
