//! A small rate and seed sweep on the phantom, printed as CSV.

use tvho::experiments::{run_sweep, threads_from_env, translating_boxes, ExperimentSpec, Peak, SweepOptions};
use tvho::solver::SolverConfig;
use tvho::transforms::MeasurementKind;

fn main() -> tvho::Result<()> {
    let volume = translating_boxes(8, 8, 8);
    let spec = ExperimentSpec {
        source: "boxes:8x8x8".into(),
        solver: SolverConfig::default().fitted_to(volume.shape()),
        volume,
        peak: Peak::MaxAbs,
        rates: vec![0.2, 0.4, 0.8],
        seeds: vec![1, 2, 3],
        transform: MeasurementKind::GaussianOrthonormal,
        per_frame: false,
    };
    let table = run_sweep(&spec, SweepOptions { threads: threads_from_env(), record_timing: true })?;
    print!("{}", table.rate_plot_csv());
    eprintln!("config hash {}", spec.config_hash());
    Ok(())
}
