//! Synthetic signals and phantoms, quality metrics and the Monte-Carlo
//! sweep harness.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::derivative::{BoundaryCondition, DerivativeOperator};
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::rng::{SeededRng, STREAM_NOISE};
use crate::solver::{solve, Operators, SolverConfig};
use crate::tensor::VideoTensor;
use crate::transforms::{MeasurementKind, MeasurementOperator, SamplingPlan};

/// Piecewise signal made of constant, quadratic and linear pieces.
///
/// ```text
/// alpha                              x < a
/// beta                         a <= x < b
/// alpha                        b <= x < c
/// (beta-mu)/(c-d)^2 (2x-c-d)^2 + mu   c <= x < d
/// alpha                        d <= x < e
/// (beta-alpha)/(f-e) (x-e) + alpha    e <= x < f
/// alpha                        f <= x
/// ```
///
/// `g` closes the support used for sampling and ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSignalSpec {
    pub breakpoints: [f64; 7],
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
}

impl Default for SyntheticSignalSpec {
    fn default() -> Self {
        Self {
            breakpoints: [1.0, 2.5, 3.6, 8.0, 9.0, 11.0, 12.0],
            alpha: 0.05,
            beta: 0.5,
            mu: 0.09,
        }
    }
}

impl SyntheticSignalSpec {
    pub fn validate(&self) -> Result<()> {
        if self.breakpoints.windows(2).all(|w| w[0] < w[1])
            && [self.alpha, self.beta, self.mu].iter().all(|v| v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "breakpoints must be strictly increasing and levels finite".into(),
            ))
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            alpha: self.alpha * factor,
            beta: self.beta * factor,
            mu: self.mu * factor,
            ..*self
        }
    }

    fn piece(&self, x: f64) -> usize {
        let [a, b, c, d, e, f, _] = self.breakpoints;
        [a, b, c, d, e, f].iter().take_while(|&&bp| x >= bp).count()
    }

    fn branch(&self, piece: usize, x: f64) -> f64 {
        let [_, _, c, d, e, f, _] = self.breakpoints;
        match piece {
            1 => self.beta,
            3 => (self.beta - self.mu) / (c - d).powi(2) * (2.0 * x - c - d).powi(2) + self.mu,
            5 => (self.beta - self.alpha) / (f - e) * (x - e) + self.alpha,
            _ => self.alpha,
        }
    }

    fn branch_slope(&self, piece: usize, x: f64) -> f64 {
        let [_, _, c, d, e, f, _] = self.breakpoints;
        match piece {
            3 => 4.0 * (self.beta - self.mu) / (c - d).powi(2) * (2.0 * x - c - d),
            5 => (self.beta - self.alpha) / (f - e),
            _ => 0.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.branch(self.piece(x), x)
    }

    /// `npts` samples `x_j = x0 + j T` with `T = (x1 - x0) / npts`.
    pub fn sample(&self, npts: usize, domain: (f64, f64)) -> Result<(Vec<f64>, Vec<f64>)> {
        if npts == 0 || !(domain.1 > domain.0) {
            return Err(Error::InvalidArgument(
                "need at least one sample over a nonempty domain".into(),
            ));
        }
        let t = (domain.1 - domain.0) / npts as f64;
        let xs: Vec<f64> = (0..npts).map(|j| domain.0 + j as f64 * t).collect();
        let ys = xs.iter().map(|&x| self.eval(x)).collect();
        Ok((xs, ys))
    }
}

/// Default sampling domain for the synthetic signal, `[0, 13)`.
pub const SIGNAL_DOMAIN: (f64, f64) = (0.0, 13.0);

/// Exact total variation: `int |u'|` over the smooth pieces by adaptive
/// Simpson quadrature, plus the jump magnitudes at the breakpoints.
pub fn tv_ground_truth(spec: &SyntheticSignalSpec) -> f64 {
    let bp = spec.breakpoints;
    let mut total = 0.0;
    for (i, &x) in bp[..6].iter().enumerate() {
        total += (spec.branch(i + 1, x) - spec.branch(i, x)).abs();
    }
    for piece in 1..6 {
        let (lo, hi) = (bp[piece - 1], bp[piece]);
        let g = |x: f64| spec.branch_slope(piece, x).abs();
        total += adaptive_simpson(&g, lo, hi, 1e-13, 40);
    }
    total
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let simpson = |a: f64, b: f64| (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
    fn go(
        s: &impl Fn(f64, f64) -> f64,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (l, r) = (s(a, m), s(m, b));
        if depth == 0 || (l + r - whole).abs() <= 15.0 * tol {
            return l + r + (l + r - whole) / 15.0;
        }
        go(s, a, m, l, tol / 2.0, depth - 1) + go(s, m, b, r, tol / 2.0, depth - 1)
    }
    go(&simpson, a, b, simpson(a, b), tol, depth)
}

/// `T * sum_j |(D y)_j|`, the discrete TV of uniformly spaced samples.
pub fn tv_estimate(samples: &[f64], spacing: f64, length: usize, accuracy: usize, bc: BoundaryCondition) -> Result<f64> {
    let kernel = KernelSpec::design(length, accuracy, spacing)?;
    let d = DerivativeOperator::new(samples.len(), &kernel, bc)?;
    Ok(spacing * d.apply(samples)?.iter().map(|v| v.abs()).sum::<f64>())
}

/// Adds white Gaussian noise at `snr_db`, where the signal power is the
/// mean square of the clean samples. An infinite SNR leaves them unchanged.
pub fn add_noise(clean: &[f64], snr_db: f64, seed: u64) -> Vec<f64> {
    if snr_db == f64::INFINITY || clean.is_empty() {
        return clean.to_vec();
    }
    let power = clean.iter().map(|v| v * v).sum::<f64>() / clean.len() as f64;
    let sigma = (power / 10f64.powf(snr_db / 10.0)).sqrt();
    let mut rng = SeededRng::new(seed, STREAM_NOISE);
    clean.iter().map(|v| v + sigma * rng.normal()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseRow {
    pub snr_db: f64,
    pub length: usize,
    pub accuracy: usize,
    pub mean_estimate: f64,
    pub truth: f64,
    /// Mean over seeds of `|estimate - truth|`.
    pub mean_abs_error: f64,
}

/// TV estimates of noisy samples of `spec` for each SNR and kernel.
pub fn noise_sensitivity(
    spec: &SyntheticSignalSpec,
    npts: usize,
    snrs_db: &[f64],
    kernels: &[(usize, usize)],
    seeds: &[u64],
    bc: BoundaryCondition,
) -> Result<Vec<NoiseRow>> {
    spec.validate()?;
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("at least one seed is required".into()));
    }
    let (_, clean) = spec.sample(npts, SIGNAL_DOMAIN)?;
    let spacing = (SIGNAL_DOMAIN.1 - SIGNAL_DOMAIN.0) / npts as f64;
    let truth = tv_ground_truth(spec);
    let mut rows = Vec::new();
    for &snr in snrs_db {
        for &(length, accuracy) in kernels {
            let (mut est, mut err) = (0.0, 0.0);
            for &seed in seeds {
                let noisy = add_noise(&clean, snr, seed);
                let e = tv_estimate(&noisy, spacing, length, accuracy, bc)?;
                est += e;
                err += (e - truth).abs();
            }
            let k = seeds.len() as f64;
            rows.push(NoiseRow {
                snr_db: snr,
                length,
                accuracy,
                mean_estimate: est / k,
                truth,
                mean_abs_error: err / k,
            });
        }
    }
    Ok(rows)
}

/// Peak value used by [`psnr`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Peak {
    /// A fixed peak such as 255 for 8-bit sources.
    Fixed(f64),
    /// `max |ref|`, for floating-point phantoms.
    MaxAbs,
}

fn check_lengths(reference: &[f64], estimate: &[f64]) -> Result<()> {
    if reference.len() != estimate.len() || reference.is_empty() {
        return Err(Error::LengthMismatch {
            expected: reference.len(),
            actual: estimate.len(),
        });
    }
    Ok(())
}

/// `10 log10(peak^2 / MSE)`; identical inputs give `+inf`.
pub fn psnr(reference: &[f64], estimate: &[f64], peak: Peak) -> Result<f64> {
    check_lengths(reference, estimate)?;
    let mse = reference
        .iter()
        .zip(estimate)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / reference.len() as f64;
    let peak = match peak {
        Peak::Fixed(p) => p,
        Peak::MaxAbs => reference.iter().fold(0.0f64, |m, v| m.max(v.abs())),
    };
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / mse).log10())
}

/// `|ref - est|^2 / |ref|^2`.
pub fn nmse(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    check_lengths(reference, estimate)?;
    let energy: f64 = reference.iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return Err(Error::InvalidArgument("NMSE of an all-zero reference".into()));
    }
    let err: f64 = reference.iter().zip(estimate).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(err / energy)
}

/// Gray levels of the translating-boxes phantom.
pub const PHANTOM_LEVELS: [f64; 3] = [30.0, 150.0, 240.0];

/// Two nested bright boxes on a dark background, moving one column per
/// frame. Geometry is laid out on a 16 x 16 grid and scaled to `(m, n)`.
pub fn translating_boxes(m: usize, n: usize, frames: usize) -> VideoTensor {
    let rs = |v: usize| v * m / 16;
    let cs = |v: usize| (v * n / 16) as isize;
    let [bg, outer, inner] = PHANTOM_LEVELS;
    VideoTensor::from_fn(m, n, frames, |i, j, t| {
        let j = j as isize;
        let c0 = t as isize - cs(4);
        let in_outer = (rs(5)..rs(11)).contains(&i) && (c0..c0 + cs(6)).contains(&j);
        let in_inner = (rs(7)..rs(9)).contains(&i) && (c0 + cs(2)..c0 + cs(4)).contains(&j);
        if in_inner {
            inner
        } else if in_outer {
            outer
        } else {
            bg
        }
    })
}

/// A sampling-rate / seed sweep over one volume.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    /// Free-form description of where the volume came from.
    pub source: String,
    pub volume: VideoTensor,
    pub peak: Peak,
    pub rates: Vec<f64>,
    pub seeds: Vec<u64>,
    pub transform: MeasurementKind,
    pub per_frame: bool,
    pub solver: SolverConfig,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.rates.is_empty() || self.seeds.is_empty() {
            return Err(Error::InvalidArgument("sweep needs at least one rate and one seed".into()));
        }
        self.solver.validate()
    }

    /// Short stable digest of everything that determines the sweep output.
    pub fn config_hash(&self) -> String {
        let mut h = Sha256::new();
        let s = &self.solver;
        let text = format!(
            "{}|{:?}|{:?}|{:?}|{}|{}|{:?}|{:?}|{}|{}|{}|{}|{}|{:?}|{}|{}|{:?}|{}|{}",
            self.source,
            self.peak,
            self.rates,
            self.seeds,
            self.transform,
            self.per_frame,
            s.c,
            s.mu,
            s.rho,
            s.eps,
            s.max_iter,
            s.tv,
            s.bcs.iter().map(|b| format!("{b}:{}", b.shift)).collect::<Vec<_>>().join(","),
            s.dts,
            s.kernel_length,
            s.kernel_accuracy,
            self.volume.shape(),
            s.wavelet,
            s.wavelet_levels,
        );
        h.update(text.as_bytes());
        for v in self.volume.as_slice() {
            h.update(v.to_le_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub rate: f64,
    pub seed: u64,
    /// Zero-based frame, or -1 for the per-cell mean.
    pub frame_index: i64,
    pub psnr_db: f64,
    pub nmse: f64,
    pub iterations: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsTable {
    pub rows: Vec<MetricsRow>,
}

pub const CSV_HEADER: &str = "rate,seed,frame_index,psnr_db,nmse,iterations,wall_time_s";

fn fmt_metric(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

impl MetricsTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.rate,
                r.seed,
                r.frame_index,
                fmt_metric(r.psnr_db),
                fmt_metric(r.nmse),
                r.iterations,
                fmt_metric(r.wall_time_s)
            );
        }
        out
    }

    /// Rows that came from a diverged solver run.
    pub fn diverged(&self) -> impl Iterator<Item = &MetricsRow> {
        self.rows.iter().filter(|r| r.psnr_db.is_nan())
    }

    fn rates(&self) -> Vec<f64> {
        let mut rates: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !rates.contains(&r.rate) {
                rates.push(r.rate);
            }
        }
        rates
    }

    /// `(frame_index, mean psnr, mean nmse)` per frame, averaged over seeds.
    pub fn frame_means(&self, rate: f64) -> Vec<(i64, f64, f64)> {
        let mut frames: Vec<i64> = self
            .rows
            .iter()
            .filter(|r| r.rate == rate && r.frame_index >= 0)
            .map(|r| r.frame_index)
            .collect();
        frames.sort_unstable();
        frames.dedup();
        frames
            .into_iter()
            .map(|t| {
                let sel: Vec<_> = self
                    .rows
                    .iter()
                    .filter(|r| r.rate == rate && r.frame_index == t)
                    .collect();
                let k = sel.len() as f64;
                (
                    t,
                    sel.iter().map(|r| r.psnr_db).sum::<f64>() / k,
                    sel.iter().map(|r| r.nmse).sum::<f64>() / k,
                )
            })
            .collect()
    }

    /// `(rate, psnr, nmse)`: per-frame values averaged over seeds, then
    /// over frames.
    pub fn rate_means(&self) -> Vec<(f64, f64, f64)> {
        self.rates()
            .into_iter()
            .map(|rate| {
                let f = self.frame_means(rate);
                let k = f.len() as f64;
                (
                    rate,
                    f.iter().map(|v| v.1).sum::<f64>() / k,
                    f.iter().map(|v| v.2).sum::<f64>() / k,
                )
            })
            .collect()
    }

    /// PSNR against sampling rate.
    pub fn rate_plot_csv(&self) -> String {
        let mut out = String::from("rate,mean_psnr_db,mean_nmse\n");
        for (rate, p, n) in self.rate_means() {
            let _ = writeln!(out, "{rate},{},{}", fmt_metric(p), fmt_metric(n));
        }
        out
    }

    /// PSNR against frame index, one block per rate.
    pub fn frame_plot_csv(&self) -> String {
        let mut out = String::from("rate,frame_index,mean_psnr_db,mean_nmse\n");
        for rate in self.rates() {
            for (t, p, n) in self.frame_means(rate) {
                let _ = writeln!(out, "{rate},{t},{},{}", fmt_metric(p), fmt_metric(n));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    /// Worker threads; 0 runs the cells sequentially.
    pub threads: usize,
    /// When false, wall times are written as 0 so that outputs are
    /// byte-for-byte reproducible.
    pub record_timing: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            threads: 0,
            record_timing: true,
        }
    }
}

/// Worker count from `TVHO_THREADS`; unset or unparsable means sequential.
pub fn threads_from_env() -> usize {
    std::env::var("TVHO_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

/// Reconstruction of one `(rate, seed)` cell.
pub fn run_cell(spec: &ExperimentSpec, rate: f64, seed: u64) -> Result<(VideoTensor, crate::solver::ConvergenceReport)> {
    let (m, n, nf) = spec.volume.shape();
    let plan = SamplingPlan::new(m, n, nf, rate, seed, spec.per_frame)?;
    let phi = MeasurementOperator::new(spec.transform, m, n, seed)?;
    let b = plan.select(phi.measure(&spec.volume)?.as_slice())?;
    let ops = Operators::new(&spec.solver, phi, plan, b)?;
    solve(None, &ops, &spec.solver)
}

fn cell_rows(spec: &ExperimentSpec, rate: f64, seed: u64, timing: bool) -> Result<Vec<MetricsRow>> {
    let start = Instant::now();
    let nf = spec.volume.frames();
    let row = |frame_index: i64, psnr_db: f64, nmse: f64, iterations: usize, wall: f64| MetricsRow {
        rate,
        seed,
        frame_index,
        psnr_db,
        nmse,
        iterations,
        wall_time_s: if timing { wall } else { 0.0 },
    };
    match run_cell(spec, rate, seed) {
        Ok((f, report)) => {
            let mut rows = Vec::with_capacity(nf + 1);
            let mut psnr_sum = 0.0;
            for t in 0..nf {
                let p = psnr(spec.volume.frame(t), f.frame(t), spec.peak)?;
                let e = nmse(spec.volume.frame(t), f.frame(t))?;
                psnr_sum += p;
                rows.push(row(t as i64, p, e, report.iterations, report.wall_time_s));
            }
            let e = nmse(spec.volume.as_slice(), f.as_slice())?;
            let wall = start.elapsed().as_secs_f64();
            rows.push(row(-1, psnr_sum / nf as f64, e, report.iterations, wall));
            Ok(rows)
        }
        Err(Error::Divergence { iteration, .. }) => Ok((0..nf as i64)
            .chain([-1])
            .map(|t| row(t, f64::NAN, f64::NAN, iteration, start.elapsed().as_secs_f64()))
            .collect()),
        Err(e) => Err(e),
    }
}

/// Runs every `(rate, seed)` cell. Rows are sorted by rate, seed and frame
/// (mean row last) regardless of execution order. A diverged cell yields
/// NaN metrics instead of aborting the sweep.
pub fn run_sweep(spec: &ExperimentSpec, opts: SweepOptions) -> Result<MetricsTable> {
    spec.validate()?;
    let cells: Vec<(usize, f64, u64)> = spec
        .rates
        .iter()
        .enumerate()
        .flat_map(|(i, &r)| spec.seeds.iter().map(move |&s| (i, r, s)))
        .collect();
    let run = |&(_, rate, seed): &(usize, f64, u64)| cell_rows(spec, rate, seed, opts.record_timing);
    let results: Vec<Result<Vec<MetricsRow>>> = if opts.threads == 0 {
        cells.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| cells.par_iter().map(run).collect())
    };
    let mut keyed = Vec::new();
    for ((i, _, _), rows) in cells.iter().zip(results) {
        for r in rows? {
            keyed.push((*i, r));
        }
    }
    keyed.sort_by(|(ia, a), (ib, b)| {
        let fa = if a.frame_index < 0 { i64::MAX } else { a.frame_index };
        let fb = if b.frame_index < 0 { i64::MAX } else { b.frame_index };
        ia.cmp(ib).then(a.seed.cmp(&b.seed)).then(fa.cmp(&fb))
    });
    Ok(MetricsTable {
        rows: keyed.into_iter().map(|(_, r)| r).collect(),
    })
}
