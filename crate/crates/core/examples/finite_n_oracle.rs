// Exact kernel at n = 12 in 256-bit arithmetic.

use rmt_outliers::{OracleConfig, OracleKernel, Potential};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let v = Potential::gaussian();
    for (r, a) in [(0, 0.0), (1, 2.0), (1, 0.5)] {
        let k = OracleKernel::build(&v, OracleConfig::new(12, r, a))?;
        println!(
            "r = {r}, a = {a}: domain {:?}, trace = {:.12}, count in [2.2, 2.8] = {:.4}",
            k.domain(),
            k.trace()?,
            k.expected_count(2.2, 2.8)?
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
