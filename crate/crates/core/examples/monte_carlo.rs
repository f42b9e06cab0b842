// Monte Carlo outlier statistics at a small size.

use rmt_outliers::montecarlo::{outlier_stats, subcritical_escape_rate, McConfig};
use rmt_outliers::{classify, equilibrium, Potential};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let em = equilibrium(&Potential::gaussian())?;
    let cfg = McConfig { n: 100, r: 1, a: 2.0, trials: 100, seed: 7 };
    let rep = outlier_stats(&cfg, &classify(&em, 2.0)?)?;
    println!(
        "a = 2: mean {:.4} (pred {:.4}), variance {:.5} (pred {:.5}), KS {:.3}",
        rep.outlier_means[0],
        rep.predicted_mean.unwrap_or(f64::NAN),
        rep.outlier_variances[0],
        rep.predicted_variance.unwrap_or(f64::NAN),
        rep.ks_distance.unwrap_or(f64::NAN)
    );
    let sub = McConfig { a: 0.5, ..cfg };
    let rep = subcritical_escape_rate(&sub, &classify(&em, 0.5)?, None, false)?;
    println!("a = 0.5: escape rate past {:.2} = {:.3}", rep.threshold.unwrap_or(f64::NAN), rep.escape_rate.unwrap_or(f64::NAN));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
