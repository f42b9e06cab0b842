// Band, density and Robin-type constant for a few single-band potentials.

use rmt_outliers::{equilibrium, Potential};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        ("gaussian", vec![0.0, 0.0, 0.5]),
        ("quartic", vec![0.0, 0.0, 0.0, 0.0, 0.25]),
        ("tilted", vec![0.0, 0.4, 0.5, 0.0, 0.1]),
    ];
    for (name, coeffs) in cases {
        let em = equilibrium(&Potential::new(coeffs)?)?;
        println!(
            "{name:>9}: band [{:+.6}, {:+.6}]  l1 = {:.6}  mass = {:.12}  rho(mid) = {:.6}",
            em.band.alpha,
            em.band.beta,
            em.l1,
            em.mass(),
            em.density(em.band.midpoint())
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
