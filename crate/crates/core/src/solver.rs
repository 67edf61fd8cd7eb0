//! ADMM with boundary-aware derivatives for the TV-l1 / wavelet-l1 /
//! least-squares reconstruction problem
//!
//! ```text
//! min_f  c1 TV(f) + c2 |Psi f|_1 + c3 |P Phi f - b|_2^2
//! ```
//!
//! split as `y1 = grad f`, `y2 = Psi f`, `y3 = Phi f` with scaled duals `u`.
//! One iteration is an exact f-solve in the eigenbasis of the gradient
//! Gram operator, three closed-form proximal updates and a dual ascent step
//! of length `rho`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::derivative::BoundaryCondition;
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::prox::{soft_threshold_field, soft_threshold_tensor, vector_soft_threshold};
use crate::spectral::SpectralFactorization;
use crate::tensor::VideoTensor;
use crate::transforms::{MeasurementOperator, SamplingPlan, WaveletFamily, WaveletOperator};
use crate::tv::{tv_norm, GradientField, GradientOperator, TvNorm};

/// Upper end of the dual step interval, `(sqrt(5) + 1) / 2`.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Weights of the TV, wavelet and data terms.
    pub c: [f64; 3],
    /// Augmented Lagrangian penalties matching `c`.
    pub mu: [f64; 3],
    pub rho: f64,
    pub eps: f64,
    pub max_iter: usize,
    pub tv: TvNorm,
    /// Boundary condition along x (rows), y (columns) and t (frames).
    pub bcs: [BoundaryCondition; 3],
    pub kernel_length: usize,
    pub kernel_accuracy: usize,
    pub dts: [f64; 3],
    pub wavelet: WaveletFamily,
    pub wavelet_levels: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            c: [80.0, 10.0, 1000.0],
            mu: [4.0, 4.0, 40.0],
            rho: GOLDEN_RATIO,
            eps: 1e-4,
            max_iter: 500,
            tv: TvNorm::Anisotropic,
            bcs: [BoundaryCondition::anti_reflective(); 3],
            kernel_length: crate::kernel::DEFAULT_LENGTH,
            kernel_accuracy: crate::kernel::DEFAULT_ACCURACY,
            dts: [1.0; 3],
            wavelet: WaveletFamily::Symmlet10,
            wavelet_levels: 4,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
        if !self.c.iter().chain(&self.mu).all(|v| v.is_finite() && *v > 0.0) {
            return bad("weights c1..c3 and penalties mu1..mu3 must be positive and finite");
        }
        // the endpoint is admitted on purpose, it is the reference setting
        if !(self.rho > 0.0 && self.rho <= GOLDEN_RATIO) {
            return bad("rho must lie in (0, (sqrt(5) + 1) / 2]");
        }
        if !(self.eps > 0.0) {
            return bad("eps must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        if !self.dts.iter().all(|v| v.is_finite() && *v > 0.0) {
            return bad("sampling intervals must be positive");
        }
        Ok(())
    }

    /// The same settings with kernel and wavelet depth reduced to fit a
    /// small volume: the kernel length becomes the largest odd value not
    /// exceeding the shortest axis, and the accuracy keeps its distance
    /// from the length.
    pub fn fitted_to(&self, shape: (usize, usize, usize)) -> Self {
        let mut out = self.clone();
        let shortest = shape.0.min(shape.1).min(shape.2);
        if out.kernel_length > shortest {
            let gap = out.kernel_length - out.kernel_accuracy;
            let l = if shortest % 2 == 1 { shortest } else { shortest - 1 };
            out.kernel_length = l.max(3);
            out.kernel_accuracy = out.kernel_length.saturating_sub(gap).max(2);
        }
        out.wavelet_levels = WaveletOperator::max_levels(shape.0, shape.1, out.wavelet_levels);
        out
    }

    /// Multiplies every weight and penalty by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.c.iter_mut().chain(out.mu.iter_mut()).for_each(|v| *v *= factor);
        out
    }
}

/// Everything the iteration needs besides its own state.
#[derive(Debug, Clone)]
pub struct Operators {
    pub grad: GradientOperator,
    pub wavelet: WaveletOperator,
    pub measurement: MeasurementOperator,
    pub plan: SamplingPlan,
    pub spectral: SpectralFactorization,
    /// `P^T b` laid out in the measurement domain.
    pub scattered: VideoTensor,
    /// Diagonal of `P^T P`.
    pub mask: VideoTensor,
    pub b: Vec<f64>,
}

impl Operators {
    pub fn new(
        cfg: &SolverConfig,
        measurement: MeasurementOperator,
        plan: SamplingPlan,
        b: Vec<f64>,
    ) -> Result<Self> {
        cfg.validate()?;
        let shape = (plan.m, plan.n, plan.frames);
        if plan.len() != b.len() {
            return Err(Error::MeasurementMismatch {
                measurements: b.len(),
                plan: plan.len(),
            });
        }
        if measurement.phi_m().nrows() != shape.0 || measurement.phi_n().nrows() != shape.1 {
            return Err(Error::ShapeMismatch {
                expected: shape,
                actual: (measurement.phi_m().nrows(), measurement.phi_n().nrows(), shape.2),
            });
        }
        let kernel = KernelSpec::design(cfg.kernel_length, cfg.kernel_accuracy, 1.0)?;
        let grad = GradientOperator::build(shape, &kernel, cfg.bcs, cfg.dts)?;
        let wavelet = WaveletOperator::new(cfg.wavelet, cfg.wavelet_levels, shape.0, shape.1)?;
        let spectral = SpectralFactorization::factorize(&grad, cfg.mu[0], cfg.mu[1], cfg.mu[2])?;
        let (m, n, nf) = shape;
        let scattered = VideoTensor::from_vec(m, n, nf, plan.select_adjoint(&b)?)?;
        let mask = VideoTensor::from_vec(m, n, nf, plan.mask())?;
        Ok(Self {
            grad,
            wavelet,
            measurement,
            plan,
            spectral,
            scattered,
            mask,
            b,
        })
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        self.grad.shape()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub f: VideoTensor,
    pub y1: GradientField,
    pub y2: VideoTensor,
    pub y3: VideoTensor,
    pub u1: GradientField,
    pub u2: VideoTensor,
    pub u3: VideoTensor,
    pub k: usize,
    pub rel_change: Vec<f64>,
    // whether `f` is a genuine previous iterate for the stopping rule
    has_iterate: bool,
}

impl SolverState {
    /// All-zero splitting variables. The first step computes `f` from them.
    pub fn new(shape: (usize, usize, usize)) -> Self {
        let (m, n, nf) = shape;
        let z = VideoTensor::zeros(m, n, nf);
        Self {
            f: z.clone(),
            y1: GradientField::zeros(m, n, nf),
            y2: z.clone(),
            y3: z.clone(),
            u1: GradientField::zeros(m, n, nf),
            u2: z.clone(),
            u3: z,
            k: 0,
            rel_change: Vec::new(),
            has_iterate: false,
        }
    }

    /// Warm start: the splitting variables are set to `H f0` so that the
    /// first f-solve returns `f0` itself.
    pub fn warm(f0: &VideoTensor, ops: &Operators) -> Result<Self> {
        let mut s = Self::new(ops.shape());
        s.y1 = ops.grad.apply(f0)?;
        s.y2 = ops.wavelet.analysis(f0)?;
        s.y3 = ops.measurement.measure(f0)?;
        s.f = f0.clone();
        s.has_iterate = true;
        Ok(s)
    }
}

/// `|f_new - f_old| / |f_old|`, with the zero-denominator convention.
pub fn relative_change(new: &VideoTensor, old: &VideoTensor) -> f64 {
    let denom = old.norm();
    let num = new.sub(old).norm();
    if denom == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / denom
    }
}

fn ensure_finite(x: &[f64], what: &'static str, iteration: usize) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence { what, iteration })
    }
}

/// One full ADMM iteration. The first step of a cold start reports an
/// infinite relative change since there is no previous iterate.
pub fn step(state: &mut SolverState, cfg: &SolverConfig, ops: &Operators) -> Result<()> {
    let [c1, c2, c3] = cfg.c;
    let [mu1, mu2, mu3] = cfg.mu;
    let k = state.k + 1;

    // f-sub-problem
    let zeta1 = state.y1.sub(&state.u1);
    let zeta2 = state.y2.sub(&state.u2);
    let zeta3 = state.y3.sub(&state.u3);
    let mut rhs = ops.grad.adjoint(&zeta1)?.scaled(mu1);
    rhs.axpy(mu2, &ops.wavelet.synthesis(&zeta2)?);
    rhs.axpy(mu3, &ops.measurement.adjoint(&zeta3)?);
    let f = ops.spectral.solve_f(&rhs)?;
    ensure_finite(f.as_slice(), "f", k)?;

    // y1: TV prox
    let gf = ops.grad.apply(&f)?;
    let mut s1 = gf.clone();
    s1.axpy(1.0, &state.u1);
    let y1 = match cfg.tv {
        TvNorm::Anisotropic => soft_threshold_field(&s1, c1 / mu1),
        TvNorm::Isotropic => vector_soft_threshold(&s1, c1 / mu1),
    };

    // y2: wavelet prox
    let wf = ops.wavelet.analysis(&f)?;
    let mut s2 = wf.clone();
    s2.axpy(1.0, &state.u2);
    let y2 = soft_threshold_tensor(&s2, c2 / mu2);

    // y3: diagonal least squares
    let pf = ops.measurement.measure(&f)?;
    let mut y3 = pf.clone();
    for (((y, u), pb), w) in y3
        .as_mut_slice()
        .iter_mut()
        .zip(state.u3.as_slice())
        .zip(ops.scattered.as_slice())
        .zip(ops.mask.as_slice())
    {
        *y = (mu3 * *y + mu3 * u + 2.0 * c3 * pb) / (2.0 * c3 * w + mu3);
    }

    // scaled dual ascent
    let rho = cfg.rho;
    state.u1.axpy(rho, &gf);
    state.u1.axpy(-rho, &y1);
    state.u2.axpy(rho, &wf);
    state.u2.axpy(-rho, &y2);
    state.u3.axpy(rho, &pf);
    state.u3.axpy(-rho, &y3);

    for (x, what) in [
        (y1.gx.as_slice(), "y1"),
        (y1.gy.as_slice(), "y1"),
        (y1.gt.as_slice(), "y1"),
        (y2.as_slice(), "y2"),
        (y3.as_slice(), "y3"),
        (state.u1.gx.as_slice(), "u1"),
        (state.u1.gy.as_slice(), "u1"),
        (state.u1.gt.as_slice(), "u1"),
        (state.u2.as_slice(), "u2"),
        (state.u3.as_slice(), "u3"),
    ] {
        ensure_finite(x, what, k)?;
    }

    let rel = if state.has_iterate {
        relative_change(&f, &state.f)
    } else {
        f64::INFINITY
    };
    state.f = f;
    state.y1 = y1;
    state.y2 = y2;
    state.y3 = y3;
    state.k = k;
    state.rel_change.push(rel);
    state.has_iterate = true;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub iterations: usize,
    /// Whether the tolerance was met before `max_iter`.
    pub converged: bool,
    pub rel_change: Vec<f64>,
    pub wall_time_s: f64,
    pub objective: f64,
}

/// Runs until the relative change drops to `eps` or `max_iter` is reached.
pub fn solve(
    f0: Option<&VideoTensor>,
    ops: &Operators,
    cfg: &SolverConfig,
) -> Result<(VideoTensor, ConvergenceReport)> {
    solve_observed(f0, ops, cfg, |_, _| {})
}

/// [`solve`] with a callback receiving `(iteration, relative change)`.
pub fn solve_observed(
    f0: Option<&VideoTensor>,
    ops: &Operators,
    cfg: &SolverConfig,
    mut observe: impl FnMut(usize, f64),
) -> Result<(VideoTensor, ConvergenceReport)> {
    cfg.validate()?;
    let start = Instant::now();
    let mut state = match f0 {
        Some(f) => {
            if f.shape() != ops.shape() {
                return Err(Error::ShapeMismatch {
                    expected: ops.shape(),
                    actual: f.shape(),
                });
            }
            SolverState::warm(f, ops)?
        }
        None => SolverState::new(ops.shape()),
    };
    let mut converged = false;
    while state.k < cfg.max_iter {
        step(&mut state, cfg, ops)?;
        let rel = *state.rel_change.last().expect("step records a change");
        observe(state.k, rel);
        if rel <= cfg.eps {
            converged = true;
            break;
        }
    }
    let objective = objective(&state.f, ops, cfg)?;
    let report = ConvergenceReport {
        iterations: state.k,
        converged,
        rel_change: state.rel_change,
        wall_time_s: start.elapsed().as_secs_f64(),
        objective,
    };
    Ok((state.f, report))
}

/// `c1 TV(f) + c2 |Psi f|_1 + c3 |P Phi f - b|^2`.
pub fn objective(f: &VideoTensor, ops: &Operators, cfg: &SolverConfig) -> Result<f64> {
    let tv = tv_norm(&ops.grad.apply(f)?, cfg.tv);
    let l1: f64 = ops.wavelet.analysis(f)?.as_slice().iter().map(|v| v.abs()).sum();
    let sampled = ops.plan.select(ops.measurement.measure(f)?.as_slice())?;
    let fit: f64 = sampled.iter().zip(&ops.b).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(cfg.c[0] * tv + cfg.c[1] * l1 + cfg.c[2] * fit)
}
