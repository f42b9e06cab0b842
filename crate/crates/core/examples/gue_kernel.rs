// Rescaled Hermite kernel: small-r densities and the semicircle at large r.

use rmt_outliers::gue_kernel::{g_h, norm_k, GueKernelContext};
use num_complex::Complex64;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for r in [1, 2, 4] {
        let ctx = GueKernelContext::new(r)?;
        let row: Vec<String> = [-2.0, -1.0, 0.0, 1.0, 2.0].iter().map(|&z| format!("{:.4}", ctx.rho(z))).collect();
        println!("r = {r}: k_(r-1) = {:.6}  rho_r at -2..2 = [{}]", norm_k(r, r - 1), row.join(", "));
    }
    let big = GueKernelContext::new(64)?;
    let sup = (0..=36)
        .map(|k| -1.8 + 0.1 * k as f64)
        .map(|z| (big.rho(z) - (4.0 - z * z).sqrt() / (2.0 * std::f64::consts::PI)).abs())
        .fold(0.0, f64::max);
    println!("r = 64: sup |rho - semicircle| on [-1.8, 1.8] = {sup:.4}");
    println!("g_H(3) = {:.12}", g_h(Complex64::new(3.0, 0.0))?.re);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
