//! Command-line front end.
//!
//! Every command that writes an artifact also writes `<output>.meta.json`
//! holding the exact argument vector, seeds, configuration and timings;
//! [`rerun_from_metadata`] replays it.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::derivative::{BoundaryCondition, DerivativeOperator};
use crate::error::{Error, Result};
use crate::experiments::{run_sweep, threads_from_env, translating_boxes, ExperimentSpec, Peak, SweepOptions};
use crate::io::{self, Dtype};
use crate::kernel::KernelSpec;
use crate::solver::{solve_observed, Operators, SolverConfig};
use crate::transforms::{MeasurementKind, MeasurementOperator, SamplingPlan, WaveletOperator};
use crate::tensor::VideoTensor;
use crate::tv::{total_variation, GradientOperator, TvNorm};

#[derive(Debug, Parser)]
#[command(name = "tvho", version, about = "High-order TV and compressive video reconstruction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derivative kernel tools.
    Kernel {
        #[command(subcommand)]
        action: KernelAction,
    },
    /// Differentiate a newline-separated vector.
    Diff(DiffArgs),
    /// Print the total variation of a volume.
    Tv(TvArgs),
    /// Take compressive measurements of a volume.
    Sample(SampleArgs),
    /// Reconstruct a volume from measurements.
    Reconstruct(ReconstructArgs),
    /// Sampling-rate / seed sweep with quality metrics.
    Sweep(SweepArgs),
    /// Write the translating-boxes phantom.
    Phantom(PhantomArgs),
    /// Replay a command from its metadata file.
    Rerun { metadata: PathBuf },
}

#[derive(Debug, Subcommand)]
enum KernelAction {
    /// Print the full kernel, one coefficient per line.
    Design {
        #[arg(long)]
        length: usize,
        #[arg(long)]
        accuracy: usize,
        #[arg(long, default_value_t = 1.0)]
        dt: f64,
    },
}

#[derive(Debug, Args)]
struct DiffArgs {
    #[arg(long)]
    length: usize,
    #[arg(long)]
    accuracy: usize,
    #[arg(long, default_value = "antireflective")]
    bc: BoundaryCondition,
    #[arg(long)]
    shift: Option<u8>,
    #[arg(long, default_value_t = 1.0)]
    dt: f64,
    #[arg(long)]
    input: PathBuf,
    /// Written to stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TvArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "antireflective")]
    bc: BoundaryCondition,
    #[arg(long, default_value_t = 3)]
    length: usize,
    #[arg(long, default_value_t = 2)]
    accuracy: usize,
    #[arg(long)]
    iso: bool,
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// Volume file or directory of PGM frames.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    rate: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = "gauss")]
    transform: MeasurementKind,
    #[arg(long)]
    per_frame: bool,
    /// Measurement vector, one value per line.
    #[arg(long)]
    output: PathBuf,
    /// Plan file; defaults to `<output>.plan.json`.
    #[arg(long)]
    plan: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    #[arg(long)]
    measurements: PathBuf,
    #[arg(long)]
    plan: PathBuf,
    /// Defaults fitted to the volume size when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value = "f64")]
    dtype: DtypeArg,
    /// Warm start volume.
    #[arg(long)]
    init: Option<PathBuf>,
    /// Print the relative change every this many iterations (0 = quiet).
    #[arg(long, default_value_t = 0)]
    log_every: usize,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Volume file or directory of PGM frames; the phantom is used when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Phantom size as `m,n,N`.
    #[arg(long, default_value = "16,16,16")]
    size: String,
    #[arg(long, value_delimiter = ',', required = true)]
    rates: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    seeds: Vec<u64>,
    #[arg(long, default_value = "gauss")]
    transform: MeasurementKind,
    #[arg(long)]
    per_frame: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use 255 as the PSNR peak instead of `max |ref|`.
    #[arg(long)]
    eight_bit: bool,
    #[arg(long)]
    output: PathBuf,
    /// Also write `<output>.rate.csv` and `<output>.frames.csv`.
    #[arg(long)]
    emit_plot_data: bool,
    /// Write wall times as 0 for byte-identical reruns.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Debug, Args)]
struct PhantomArgs {
    #[arg(long, default_value = "16,16,16")]
    size: String,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value = "f64")]
    dtype: DtypeArg,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum DtypeArg {
    F64,
    U8,
}

impl From<DtypeArg> for Dtype {
    fn from(d: DtypeArg) -> Self {
        match d {
            DtypeArg::F64 => Dtype::F64,
            DtypeArg::U8 => Dtype::U8,
        }
    }
}

/// Sidecar describing how measurements were taken. The index set itself is
/// regenerated from the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    #[serde(flatten)]
    pub plan: SamplingPlan,
    pub transform: String,
}

impl PlanFile {
    pub fn load(path: &Path) -> Result<(SamplingPlan, MeasurementOperator)> {
        let file: PlanFile = serde_json::from_str(&fs::read_to_string(path)?)?;
        let plan = file.plan.regenerate()?;
        let kind: MeasurementKind = file.transform.parse()?;
        let phi = MeasurementOperator::new(kind, plan.m, plan.n, plan.seed)?;
        Ok((plan, phi))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub argv: Vec<String>,
    pub command: String,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub config: Option<String>,
    #[serde(default)]
    pub config_hash: Option<String>,
    #[serde(default)]
    pub report: Option<serde_json::Value>,
    pub wall_time_s: f64,
}

fn metadata_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

struct Run<'a> {
    argv: &'a [String],
    start: Instant,
}

impl Run<'_> {
    fn write_meta(
        &self,
        output: &Path,
        command: &str,
        seeds: Vec<u64>,
        config: Option<&SolverConfig>,
        config_hash: Option<String>,
        report: Option<serde_json::Value>,
    ) -> Result<()> {
        let meta = Metadata {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            argv: self.argv.to_vec(),
            command: command.into(),
            seeds,
            config: config.map(io::format_config),
            config_hash,
            report,
            wall_time_s: self.start.elapsed().as_secs_f64(),
        };
        fs::write(metadata_path(output), serde_json::to_string_pretty(&meta)? + "\n")?;
        Ok(())
    }
}

/// A volume file, or a directory of PGM frames.
fn load_input(path: &Path) -> Result<VideoTensor> {
    if path.is_dir() {
        io::import_frames(path)
    } else {
        io::read_volume(path)
    }
}

fn parse_size(s: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<usize> = s
        .split([',', 'x'])
        .map(|p| p.trim().parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidArgument(format!("bad size `{s}`, expected m,n,N")))?;
    match parts[..] {
        [m, n, nf] if m > 0 && n > 0 && nf > 0 => Ok((m, n, nf)),
        _ => Err(Error::InvalidArgument(format!("bad size `{s}`, expected m,n,N"))),
    }
}

/// Loads a config file, or fits the defaults to `shape` when none is
/// given, then reduces the wavelet depth if the frame size demands it.
fn solver_config(path: Option<&Path>, shape: (usize, usize, usize)) -> Result<SolverConfig> {
    let mut cfg = match path {
        Some(p) => io::parse_config(&fs::read_to_string(p)?, &SolverConfig::default())?,
        None => SolverConfig::default().fitted_to(shape),
    };
    let levels = WaveletOperator::max_levels(shape.0, shape.1, cfg.wavelet_levels.min(4));
    if levels != cfg.wavelet_levels {
        eprintln!(
            "warning: wavelet levels reduced from {} to {levels} for {}x{} frames",
            cfg.wavelet_levels, shape.0, shape.1
        );
        cfg.wavelet_levels = levels;
    }
    if levels == 0 {
        return Err(Error::WaveletDivisibility { dim: shape.0.min(shape.1), levels: 1 });
    }
    Ok(cfg)
}

fn execute(cli: Cli, argv: &[String]) -> Result<()> {
    let run = Run {
        argv,
        start: Instant::now(),
    };
    match cli.command {
        Command::Kernel {
            action: KernelAction::Design { length, accuracy, dt },
        } => {
            let k = KernelSpec::design(length, accuracy, dt)?;
            print!("{}", io::format_vector(&k.full_kernel()));
        }
        Command::Diff(a) => {
            let bc = match a.shift {
                Some(s) => a.bc.with_shift(s)?,
                None => a.bc,
            };
            let kernel = KernelSpec::design(a.length, a.accuracy, a.dt)?;
            let f = io::read_vector(&a.input)?;
            let d = DerivativeOperator::new(f.len(), &kernel, bc)?;
            let out = d.apply(&f)?;
            match &a.output {
                Some(path) => {
                    io::write_vector(path, &out)?;
                    run.write_meta(path, "diff", vec![], None, None, None)?;
                }
                None => print!("{}", io::format_vector(&out)),
            }
        }
        Command::Tv(a) => {
            let f = load_input(&a.input)?;
            let kernel = KernelSpec::design(a.length, a.accuracy, 1.0)?;
            let grad = GradientOperator::build(f.shape(), &kernel, [a.bc; 3], [1.0; 3])?;
            let norm = if a.iso { TvNorm::Isotropic } else { TvNorm::Anisotropic };
            println!("{:.16e}", total_variation(&f, &grad, norm)?);
        }
        Command::Sample(a) => {
            let f = load_input(&a.input)?;
            let (m, n, nf) = f.shape();
            let plan = SamplingPlan::new(m, n, nf, a.rate, a.seed, a.per_frame)?;
            let phi = MeasurementOperator::new(a.transform, m, n, a.seed)?;
            let b = plan.select(phi.measure(&f)?.as_slice())?;
            io::write_vector(&a.output, &b)?;
            let plan_path = a.plan.clone().unwrap_or_else(|| {
                let mut s = a.output.as_os_str().to_owned();
                s.push(".plan.json");
                PathBuf::from(s)
            });
            let file = PlanFile {
                plan,
                transform: a.transform.to_string(),
            };
            fs::write(&plan_path, serde_json::to_string_pretty(&file)? + "\n")?;
            run.write_meta(&a.output, "sample", vec![a.seed], None, None, None)?;
        }
        Command::Reconstruct(a) => {
            let (plan, phi) = PlanFile::load(&a.plan)?;
            let b = io::read_vector(&a.measurements)?;
            if b.len() != plan.len() {
                return Err(Error::MeasurementMismatch {
                    measurements: b.len(),
                    plan: plan.len(),
                });
            }
            let shape = (plan.m, plan.n, plan.frames);
            let cfg = solver_config(a.config.as_deref(), shape)?;
            let seed = plan.seed;
            let ops = Operators::new(&cfg, phi, plan, b)?;
            let init = a.init.as_ref().map(io::read_volume).transpose()?;
            let every = a.log_every;
            let (f, report) = solve_observed(init.as_ref(), &ops, &cfg, |k, rel| {
                if every > 0 && k % every == 0 {
                    eprintln!("iter {k:>5}  rel_change {rel:.6e}");
                }
            })?;
            if !report.converged {
                eprintln!(
                    "warning: tolerance {} not reached after {} iterations",
                    cfg.eps, report.iterations
                );
            }
            io::write_volume(&a.output, &f, a.dtype.into())?;
            let summary = serde_json::json!({
                "iterations": report.iterations,
                "converged": report.converged,
                "final_rel_change": report.rel_change.last(),
                "objective": report.objective,
                "solver_wall_time_s": report.wall_time_s,
            });
            run.write_meta(&a.output, "reconstruct", vec![seed], Some(&cfg), None, Some(summary))?;
        }
        Command::Sweep(a) => {
            let (volume, source) = match &a.input {
                Some(p) => (load_input(p)?, p.display().to_string()),
                None => {
                    let (m, n, nf) = parse_size(&a.size)?;
                    (translating_boxes(m, n, nf), format!("boxes:{m}x{n}x{nf}"))
                }
            };
            let cfg = solver_config(a.config.as_deref(), volume.shape())?;
            let spec = ExperimentSpec {
                source,
                volume,
                peak: if a.eight_bit { Peak::Fixed(255.0) } else { Peak::MaxAbs },
                rates: a.rates.clone(),
                seeds: a.seeds.clone(),
                transform: a.transform,
                per_frame: a.per_frame,
                solver: cfg,
            };
            let opts = SweepOptions {
                threads: threads_from_env(),
                record_timing: !a.no_timing,
            };
            let table = run_sweep(&spec, opts)?;
            let diverged = table.diverged().filter(|r| r.frame_index < 0).count();
            if diverged > 0 {
                eprintln!("warning: {diverged} sweep cells diverged and are flagged with nan");
            }
            fs::write(&a.output, table.to_csv())?;
            if a.emit_plot_data {
                let side = |suffix: &str| {
                    let mut s = a.output.as_os_str().to_owned();
                    s.push(suffix);
                    PathBuf::from(s)
                };
                fs::write(side(".rate.csv"), table.rate_plot_csv())?;
                fs::write(side(".frames.csv"), table.frame_plot_csv())?;
            }
            let hash = spec.config_hash();
            run.write_meta(&a.output, "sweep", a.seeds.clone(), Some(&spec.solver), Some(hash), None)?;
        }
        Command::Phantom(a) => {
            let (m, n, nf) = parse_size(&a.size)?;
            io::write_volume(&a.output, &translating_boxes(m, n, nf), a.dtype.into())?;
            run.write_meta(&a.output, "phantom", vec![], None, None, None)?;
        }
        Command::Rerun { metadata } => {
            let code = rerun_from_metadata(&metadata)?;
            if code != 0 {
                return Err(Error::InvalidArgument(format!("replayed command exited with {code}")));
            }
        }
    }
    Ok(())
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code: 0 on success, 1 on usage errors, 2 on numerical or consistency
/// failures.
pub fn dispatch<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, &argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

/// Replays the command recorded in a metadata file.
pub fn rerun_from_metadata(path: &Path) -> Result<i32> {
    let meta: Metadata = serde_json::from_str(&fs::read_to_string(path)?)?;
    Ok(dispatch(meta.argv))
}
