//! Proximity operators of the l1 and per-site l2 norms.

use crate::tensor::VideoTensor;
use crate::tv::GradientField;

#[inline]
pub fn soft(s: f64, tau: f64) -> f64 {
    s.signum() * (s.abs() - tau).max(0.0)
}

/// Elementwise `sgn(s) * max(|s| - tau, 0)`.
pub fn soft_threshold(s: &[f64], tau: f64) -> Vec<f64> {
    s.iter().map(|&v| soft(v, tau)).collect()
}

pub fn soft_threshold_tensor(s: &VideoTensor, tau: f64) -> VideoTensor {
    s.map(|v| soft(v, tau))
}

/// Shrinks `v` toward the origin by `tau` in Euclidean norm; `0` maps to `0`.
pub fn vector_soft(v: [f64; 3], tau: f64) -> [f64; 3] {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if norm <= tau || norm == 0.0 {
        return [0.0; 3];
    }
    let scale = (norm - tau) / norm;
    [v[0] * scale, v[1] * scale, v[2] * scale]
}

/// Per-site vector soft thresholding across the three gradient components.
pub fn vector_soft_threshold(s: &GradientField, tau: f64) -> GradientField {
    let mut out = s.clone();
    let n = s.gx.len();
    for k in 0..n {
        let v = vector_soft(
            [s.gx.as_slice()[k], s.gy.as_slice()[k], s.gt.as_slice()[k]],
            tau,
        );
        out.gx.as_mut_slice()[k] = v[0];
        out.gy.as_mut_slice()[k] = v[1];
        out.gt.as_mut_slice()[k] = v[2];
    }
    out
}

/// Componentwise soft thresholding of all three gradient components.
pub fn soft_threshold_field(s: &GradientField, tau: f64) -> GradientField {
    GradientField {
        gx: soft_threshold_tensor(&s.gx, tau),
        gy: soft_threshold_tensor(&s.gy, tau),
        gt: soft_threshold_tensor(&s.gt, tau),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_examples() {
        assert_eq!(soft(3.0, 1.0), 2.0);
        assert_eq!(soft(-0.5, 1.0), 0.0);
        assert_eq!(soft(-4.0, 1.5), -2.5);
        assert_eq!(soft_threshold(&[1.5, -2.0, 0.0], 0.0), vec![1.5, -2.0, 0.0]);
    }

    #[test]
    fn vector_examples() {
        let v = vector_soft([3.0, 4.0, 0.0], 1.0);
        assert!((v[0] - 2.4).abs() < 1e-15 && (v[1] - 3.2).abs() < 1e-15 && v[2] == 0.0);
        assert_eq!(vector_soft([0.3, 0.4, 0.0], 0.5), [0.0; 3]);
        assert_eq!(vector_soft([0.0; 3], 0.0), [0.0; 3]);
        assert_eq!(vector_soft([1.0, -2.0, 3.0], 0.0), [1.0, -2.0, 3.0]);
    }
}
