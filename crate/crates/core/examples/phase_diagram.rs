// Regime of the largest eigenvalue as the source strength crosses a_c.

use rmt_outliers::{classify, equilibrium, Potential};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let em = equilibrium(&Potential::new(vec![0.0, 0.0, 0.0, 0.0, 0.25])?)?;
    println!("quartic V = x^4/4, beta = {:.6}", em.band.beta);
    for k in 1..=8 {
        let a = 0.4 * k as f64;
        let l = classify(&em, a)?;
        let point = l.a_star.or(l.b_star).unwrap_or(f64::NAN);
        println!("a = {a:.2}  a_c = {:.6}  {:<14} point = {point:.6}", l.a_c, l.regime.name());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
