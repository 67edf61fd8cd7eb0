//! Independent reference implementations used by the integration tests.
//! Nothing here calls the mode-product or assembly code under test.

#![allow(dead_code)]

use nalgebra::DMatrix;
use tvho::transforms::WaveletFamily;
use tvho::{BoundaryCondition, BoundaryKind, KernelSpec, VideoTensor};

/// Small deterministic generator so that oracles do not share the crate's RNG.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407))
    }

    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    pub fn vec(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.next_f64()).collect()
    }

    pub fn tensor(&mut self, m: usize, n: usize, f: usize) -> VideoTensor {
        VideoTensor::from_vec(m, n, f, self.vec(m * n * f)).unwrap()
    }
}

/// Pads `f` with `a` samples on each side following the boundary rule.
pub fn extend(f: &[f64], a: usize, bc: BoundaryCondition) -> Vec<f64> {
    let n = f.len() as isize;
    let s = bc.shift as isize;
    let mut out = Vec::with_capacity(f.len() + 2 * a);
    for idx in -(a as isize)..n + a as isize {
        let v = if (0..n).contains(&idx) {
            f[idx as usize]
        } else {
            let (edge, mirror) = if idx < 0 {
                // distance past the left edge is -idx
                (f[0], f[(-idx - 1 + s) as usize])
            } else {
                (f[(n - 1) as usize], f[(2 * n - 1 - idx - s) as usize])
            };
            match bc.kind {
                BoundaryKind::Zero => 0.0,
                BoundaryKind::Periodic => f[idx.rem_euclid(n) as usize],
                BoundaryKind::Reflective => mirror,
                BoundaryKind::AntiReflective => 2.0 * edge - mirror,
            }
        };
        out.push(v);
    }
    out
}

/// Direct convolution of the extended signal with the full kernel.
pub fn convolve_extended(f: &[f64], kernel: &KernelSpec, bc: BoundaryCondition) -> Vec<f64> {
    let a = kernel.half_width();
    let ext = extend(f, a, bc);
    let full = kernel.full_kernel();
    (0..f.len())
        .map(|j| {
            full.iter()
                .enumerate()
                .map(|(i, k)| k * ext[j + 2 * a - i])
                .sum()
        })
        .collect()
}

pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

pub fn eye(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n)
}

/// `I_N (x) I_n (x) A_m`, `I_N (x) B_n (x) I_m` and `C_N (x) I_n (x) I_m`.
pub fn kron_axes(
    am: Option<&DMatrix<f64>>,
    bn: Option<&DMatrix<f64>>,
    cn: Option<&DMatrix<f64>>,
    shape: (usize, usize, usize),
) -> DMatrix<f64> {
    let (m, n, nf) = shape;
    let a = am.cloned().unwrap_or_else(|| eye(m));
    let b = bn.cloned().unwrap_or_else(|| eye(n));
    let c = cn.cloned().unwrap_or_else(|| eye(nf));
    kron(&c, &kron(&b, &a))
}

pub fn matvec(a: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..a.nrows())
        .map(|r| (0..a.ncols()).map(|c| a[(r, c)] * x[c]).sum())
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Rank with the threshold `max(rows, cols) * eps * sigma_max`.
pub fn numerical_rank(a: &DMatrix<f64>) -> usize {
    let sv = a.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let tol = a.nrows().max(a.ncols()) as f64 * f64::EPSILON * smax;
    sv.iter().filter(|&&s| s > tol).count()
}

/// Materializes a linear map on `mnN` vectors column by column.
pub fn materialize(len_in: usize, len_out: usize, mut op: impl FnMut(&[f64]) -> Vec<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(len_out, len_in);
    let mut e = vec![0.0; len_in];
    for c in 0..len_in {
        e[c] = 1.0;
        let col = op(&e);
        for (r, v) in col.into_iter().enumerate() {
            out[(r, c)] = v;
        }
        e[c] = 0.0;
    }
    out
}

/// Low-pass taps by family, written out independently of the library.
fn lowpass(family: WaveletFamily) -> Vec<f64> {
    match family {
        WaveletFamily::Haar => vec![0.5f64.sqrt(); 2],
        WaveletFamily::Symmlet10 => vec![
            -0.0004593294210046588, 5.7036083618494284e-05, 0.004593173585311828,
            -0.0008043589320165449, -0.02035493981231129, 0.005764912033581909,
            0.04999497207737669, -0.0319900568824278, -0.03553674047381755,
            0.38382676106708546, 0.7695100370211071, 0.47169066693843925,
            -0.07088053578324385, -0.15949427888491757, 0.011609893903711381,
            0.0459272392310922, -0.0014653825813050513, -0.008641299277022422,
            9.563267072289475e-05, 0.0007701598091144901,
        ],
    }
}

/// Multilevel periodized DWT of length `n` as a product of per-level
/// block matrices.
pub fn dwt_matrix(n: usize, levels: usize, family: WaveletFamily) -> DMatrix<f64> {
    let lo = lowpass(family);
    let len = lo.len();
    let hi: Vec<f64> = (0..len)
        .map(|k| if k % 2 == 0 { lo[len - 1 - k] } else { -lo[len - 1 - k] })
        .collect();
    let mut w = eye(n);
    let mut cur = n;
    for _ in 0..levels {
        let h = cur / 2;
        let mut s = eye(n);
        for r in 0..cur {
            for c in 0..cur {
                s[(r, c)] = 0.0;
            }
        }
        for k in 0..h {
            for t in 0..len {
                s[(k, (2 * k + t) % cur)] += lo[t];
                s[(h + k, (2 * k + t) % cur)] += hi[t];
            }
        }
        w = s * w;
        cur = h;
    }
    w
}
