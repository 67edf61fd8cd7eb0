use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{SeededRng, STREAM_SAMPLING};

/// The random index set `Omega` and its selection operator `P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub m: usize,
    pub n: usize,
    pub frames: usize,
    pub rate: f64,
    pub seed: u64,
    pub per_frame: bool,
    #[serde(skip)]
    indices: Vec<usize>,
}

impl SamplingPlan {
    /// Draws `round(rate * mnN)` indices uniformly without replacement, or
    /// `round(rate * mn)` independently inside each frame when `per_frame`.
    pub fn new(m: usize, n: usize, frames: usize, rate: f64, seed: u64, per_frame: bool) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "sampling rate must lie in (0, 1], got {rate}"
            )));
        }
        let frame_len = m * n;
        let total = frame_len * frames;
        let mut rng = SeededRng::new(seed, STREAM_SAMPLING);
        let indices = if per_frame {
            let k = (rate * frame_len as f64).round() as usize;
            let mut all = Vec::with_capacity(k * frames);
            for t in 0..frames {
                all.extend(
                    rng.sample_indices(frame_len, k)
                        .into_iter()
                        .map(|i| i + t * frame_len),
                );
            }
            all
        } else {
            let k = (rate * total as f64).round() as usize;
            rng.sample_indices(total, k)
        };
        Ok(Self {
            m,
            n,
            frames,
            rate,
            seed,
            per_frame,
            indices,
        })
    }

    /// Rebuilds the index set from the stored parameters (e.g. after
    /// deserializing a plan file, which omits the indices).
    pub fn regenerate(&self) -> Result<Self> {
        Self::new(self.m, self.n, self.frames, self.rate, self.seed, self.per_frame)
    }

    /// Sorted global indices into the `mnN` measurement vector.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn full_len(&self) -> usize {
        self.m * self.n * self.frames
    }

    /// `P y`.
    pub fn select(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.full_len() {
            return Err(Error::LengthMismatch {
                expected: self.full_len(),
                actual: y.len(),
            });
        }
        Ok(self.indices.iter().map(|&i| y[i]).collect())
    }

    /// `P^T b`: scatter into a zero vector of length `mnN`.
    pub fn select_adjoint(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.len() {
            return Err(Error::MeasurementMismatch {
                measurements: b.len(),
                plan: self.len(),
            });
        }
        let mut out = vec![0.0; self.full_len()];
        for (&i, &v) in self.indices.iter().zip(b) {
            out[i] = v;
        }
        Ok(out)
    }

    /// Diagonal of `P^T P`.
    pub fn mask(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.full_len()];
        for &i in &self.indices {
            out[i] = 1.0;
        }
        out
    }
}
