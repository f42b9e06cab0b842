// The conformal coordinate zeta(z) near the outlier point and its inverse.

use num_complex::Complex64;
use rmt_outliers::{classify, equilibrium, Potential};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let l = classify(&equilibrium(&Potential::gaussian())?, 2.0)?;
    let (n, r) = (400, 2);
    for x in [2.3, 2.4, 2.5, 2.6, 2.7] {
        let zeta = l.to_local_super(n, r, Complex64::new(x, 0.0))?;
        let back = l.from_local_super(n, r, zeta)?;
        println!("x = {x:.2}  zeta = {:+.6}  round trip error = {:.1e}", zeta.re, (back.re - x).abs());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
