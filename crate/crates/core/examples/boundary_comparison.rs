//! Differentiates `sin(pi t)` on a short grid under each boundary rule and
//! reports the error near the ends and in the interior.

use std::f64::consts::PI;

use tvho::{BoundaryCondition, DerivativeOperator, KernelSpec};

fn main() -> tvho::Result<()> {
    let n = 32;
    let (a, b) = (-0.8, 1.8);
    let h = (b - a) / (n - 1) as f64;
    let x: Vec<f64> = (0..n).map(|j| a + j as f64 * h).collect();
    let f: Vec<f64> = x.iter().map(|v| (PI * v).sin()).collect();
    let exact: Vec<f64> = x.iter().map(|v| PI * (PI * v).cos()).collect();
    for (l, p) in [(3, 2), (27, 25)] {
        let k = KernelSpec::design(l, p, h)?;
        let edge = k.half_width();
        println!("L={l} p={p}");
        for bc in BoundaryCondition::all_kinds() {
            let d = DerivativeOperator::new(n, &k, bc)?.apply(&f)?;
            let err = |j: usize| (d[j] - exact[j]).abs();
            let boundary = (0..n).filter(|&j| j < edge || j >= n - edge).map(err).fold(0.0, f64::max);
            let interior = (edge..n - edge).map(err).fold(0.0, f64::max);
            println!("  {bc:<15} boundary {boundary:.3e}  interior {interior:.3e}");
        }
    }
    Ok(())
}
