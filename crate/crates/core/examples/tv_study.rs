//! Total variation of the piecewise test signal: ground truth, estimates by
//! kernel and grid size, and sensitivity to additive noise.

use tvho::experiments::{noise_sensitivity, tv_estimate, tv_ground_truth, SyntheticSignalSpec, SIGNAL_DOMAIN};
use tvho::BoundaryCondition;

fn main() -> tvho::Result<()> {
    let spec = SyntheticSignalSpec::default();
    let bc = BoundaryCondition::anti_reflective();
    let truth = tv_ground_truth(&spec);
    println!("ground truth {truth:.4}");
    let kernels = [(3, 2), (9, 8), (27, 25)];
    for npts in [32, 62, 200] {
        let (_, y) = spec.sample(npts, SIGNAL_DOMAIN)?;
        let spacing = (SIGNAL_DOMAIN.1 - SIGNAL_DOMAIN.0) / npts as f64;
        let est: Vec<String> = kernels
            .iter()
            .map(|&(l, p)| Ok(format!("L={l}: {:.4}", tv_estimate(&y, spacing, l, p, bc)?)))
            .collect::<tvho::Result<_>>()?;
        println!("N={npts:>3}  {}", est.join("  "));
    }
    println!();
    let rows = noise_sensitivity(&spec, 200, &[10.0, 20.0, 40.0, f64::INFINITY], &kernels, &(0..10).collect::<Vec<_>>(), bc)?;
    for r in rows {
        println!(
            "snr {:>5} dB  L={:>2}  mean {:.4}  mean abs error {:.4}",
            r.snr_db, r.length, r.mean_estimate, r.mean_abs_error
        );
    }
    Ok(())
}
