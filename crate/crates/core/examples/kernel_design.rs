//! Designs derivative kernels and prints their coefficients and frequency
//! response against the ideal `H(w) = w`.

use tvho::KernelSpec;

fn main() -> tvho::Result<()> {
    for (l, p) in [(3, 2), (5, 2), (5, 4), (9, 8), (27, 25)] {
        let k = KernelSpec::design(l, p, 1.0)?;
        let half: Vec<String> = k.half().iter().map(|d| format!("{d:.6}")).collect();
        println!("L={l:>2} p={p:>2} half=[{}] residual={:.1e}", half.join(", "), k.residual());
    }
    println!();
    println!("{:>6} {:>10} {:>10} {:>10}", "w", "L=3", "L=9", "L=27");
    let ks = [KernelSpec::design(3, 2, 1.0)?, KernelSpec::design(9, 8, 1.0)?, KernelSpec::design(27, 25, 1.0)?];
    for i in 0..=8 {
        let w = i as f64 * std::f64::consts::PI / 8.0;
        let h: Vec<String> = ks.iter().map(|k| format!("{:>10.6}", k.frequency_response(w))).collect();
        println!("{w:>6.3} {}", h.join(" "));
    }
    Ok(())
}
