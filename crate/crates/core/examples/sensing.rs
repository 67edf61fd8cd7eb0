//! Measurement, sampling and wavelet operators on the phantom.

use tvho::experiments::translating_boxes;
use tvho::transforms::{MeasurementKind, MeasurementOperator, SamplingPlan, WaveletFamily, WaveletOperator};

fn main() -> tvho::Result<()> {
    let f = translating_boxes(16, 16, 16);
    for kind in [MeasurementKind::GaussianOrthonormal, MeasurementKind::WalshHadamard] {
        let phi = MeasurementOperator::new(kind, 16, 16, 7)?;
        let y = phi.measure(&f)?;
        let back = phi.adjoint(&y)?;
        println!(
            "{kind:<9} energy ratio {:.12}  adjoint round trip error {:.1e}",
            y.norm() / f.norm(),
            back.sub(&f).norm()
        );
    }
    for (rate, per_frame) in [(0.1, false), (0.1, true), (0.4, false)] {
        let plan = SamplingPlan::new(16, 16, 16, rate, 7, per_frame)?;
        println!("rate {rate} per_frame {per_frame}: {} of {} samples", plan.len(), plan.full_len());
    }
    for family in [WaveletFamily::Haar, WaveletFamily::Symmlet10] {
        let psi = WaveletOperator::new(family, 4, 16, 16)?;
        let w = psi.analysis(&f)?;
        let mut mags: Vec<f64> = w.as_slice().iter().map(|v| v.abs()).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        let energy: f64 = mags.iter().map(|v| v * v).sum();
        let top: f64 = mags[..mags.len() / 20].iter().map(|v| v * v).sum();
        println!(
            "{family:<6} top 5% of coefficients hold {:.2}% of energy, reconstruction error {:.1e}",
            100.0 * top / energy,
            psi.synthesis(&w)?.sub(&f).norm()
        );
    }
    Ok(())
}
