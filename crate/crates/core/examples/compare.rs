// Prediction against the exact kernel, as `rmt-outliers compare` does it.

use rmt_outliers::cli::oracle_checks;
use rmt_outliers::{classify, equilibrium, OracleConfig, OracleKernel, Potential};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let v = Potential::gaussian();
    let em = equilibrium(&v)?;
    for a in [2.0, 0.5] {
        let l = classify(&em, a)?;
        let oracle = OracleKernel::build(&v, OracleConfig::new(24, 1, a))?;
        for c in oracle_checks(&l, &oracle)? {
            println!("a = {a}: {:<34} {:>12.4e} {:<16} {}", c.name, c.value, c.bound, if c.pass { "pass" } else { "FAIL" });
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
