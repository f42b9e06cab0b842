// Limiting outlier density and the r = 1 Gaussian law.

use rmt_outliers::prediction::{predict_outlier_law_r1, report};
use rmt_outliers::{classify, equilibrium, Potential};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let em = equilibrium(&Potential::gaussian())?;
    let l = classify(&em, 2.0)?;
    for r in [1, 2] {
        let rep = report(&l, 400, r, None)?;
        let sup = rep.supercritical.expect("supercritical");
        println!("r = {r}: mass near a* = {:.4} (expect {r})", sup.mass);
    }
    let law = predict_outlier_law_r1(&l, 500)?;
    println!("n = 500: outlier ~ Normal({:.4}, {:.6})", law.mean, law.variance);
    let sub = report(&classify(&em, 0.5)?, 400, 1, None)?;
    println!("a = 0.5: {}", sub.subcritical.expect("subcritical").claim);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
