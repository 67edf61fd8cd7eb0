//! Recovers the phantom from 40% Gaussian measurements and prints per-frame
//! quality for two boundary rules.

use tvho::experiments::{nmse, psnr, translating_boxes, Peak};
use tvho::solver::{solve, Operators, SolverConfig};
use tvho::transforms::{MeasurementKind, MeasurementOperator, SamplingPlan};
use tvho::BoundaryCondition;

fn main() -> tvho::Result<()> {
    let truth = translating_boxes(16, 16, 16);
    let rate = 0.4;
    for bc in [BoundaryCondition::anti_reflective(), BoundaryCondition::periodic()] {
        let mut cfg = SolverConfig::default().fitted_to(truth.shape());
        cfg.bcs = [bc; 3];
        let phi = MeasurementOperator::new(MeasurementKind::GaussianOrthonormal, 16, 16, 1)?;
        let plan = SamplingPlan::new(16, 16, 16, rate, 1, false)?;
        let b = plan.select(phi.measure(&truth)?.as_slice())?;
        let ops = Operators::new(&cfg, phi, plan, b)?;
        let (f, report) = solve(None, &ops, &cfg)?;
        println!(
            "{bc}: {} iterations, converged {}, NMSE {:.3e}",
            report.iterations,
            report.converged,
            nmse(truth.as_slice(), f.as_slice())?
        );
        let frames: Vec<String> = (0..16)
            .map(|t| Ok(format!("{:.1}", psnr(truth.frame(t), f.frame(t), Peak::MaxAbs)?)))
            .collect::<tvho::Result<_>>()?;
        println!("  frame PSNR dB: {}", frames.join(" "));
    }
    Ok(())
}
