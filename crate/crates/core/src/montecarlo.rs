//! Exact sampling of the Gaussian source ensemble.
//!
//! For `V(x) = x^2/2` the density `exp(-n Tr(M^2/2 - A M))` is that of `H + A`
//! with `H` from the GUE normalised so its spectrum fills `[-2, 2]`. Each trial
//! draws from its own ChaCha stream (master seed, stream = trial index), so the
//! results do not depend on how trials are scheduled across threads.

use std::time::Instant;

use faer::{c64, Mat, Side};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::landscape::{Landscape, Regime};
use crate::prediction::predict_outlier_law_r1;

/// Stream offset for the reference GUE draws, disjoint from the trial streams.
const REFERENCE_STREAM: u64 = 1 << 40;

/// `n x n` GUE matrix with density proportional to `exp(-n Tr H^2 / 2)`, plus
/// `a` on the first `r` diagonal entries.
pub fn sample_matrix(n: usize, r: usize, a: f64, rng: &mut ChaCha8Rng) -> Mat<c64> {
    let sd_diag = (1.0 / n as f64).sqrt();
    let sd_off = (0.5 / n as f64).sqrt();
    let mut m = Mat::<c64>::zeros(n, n);
    for j in 0..n {
        let d: f64 = StandardNormal.sample(rng);
        m[(j, j)] = c64::new(sd_diag * d + if j < r { a } else { 0.0 }, 0.0);
        for i in j + 1..n {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            let z = c64::new(sd_off * re, sd_off * im);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &Mat<c64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Convergence(format!("Hermitian eigensolver: {e:?}")))
}

/// Sorted spectrum of one draw of `H + A`.
pub fn sample_spectrum(n: usize, r: usize, a: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    if n < 2 || r > n {
        return Err(Error::InvalidArgument(format!("sampler needs n >= 2 and r <= n, got n = {n}, r = {r}")));
    }
    hermitian_eigenvalues(&sample_matrix(n, r, a, rng))
}

/// Generator for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McConfig {
    pub n: usize,
    pub r: usize,
    pub a: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct McReport {
    pub n: usize,
    pub r: usize,
    pub a: f64,
    pub trials: usize,
    pub seed: u64,
    /// Mean of the `k`-th largest eigenvalue, `k = 1..r`.
    pub outlier_means: Vec<f64>,
    pub outlier_variances: Vec<f64>,
    /// For `r = 1`: KS distance to `Normal(a*, 1/(n c))`. For `r >= 2`: two-sample
    /// KS distance between the rescaled top-`r` points and an `r x r` GUE sample.
    pub ks_distance: Option<f64>,
    pub predicted_mean: Option<f64>,
    pub predicted_variance: Option<f64>,
    pub threshold: Option<f64>,
    pub escape_rate: Option<f64>,
    /// Excluded from JSON so that reports are byte-identical across runs.
    #[serde(skip)]
    pub wall_time: f64,
}

fn require_gaussian(l: &Landscape) -> Result<()> {
    if !l.em.potential().is_standard_gaussian() {
        return Err(Error::Usage("MC requires Gaussian potential V = x^2/2".into()));
    }
    Ok(())
}

fn validate(cfg: &McConfig) -> Result<()> {
    if cfg.n < 2 || cfg.trials == 0 {
        return Err(Error::InvalidArgument("MC needs n >= 2 and at least one trial".into()));
    }
    if cfg.r == 0 || 4 * cfg.r >= cfg.n {
        return Err(Error::InvalidArgument(format!(
            "MC needs 0 < r < n/4, got n = {}, r = {}",
            cfg.n, cfg.r
        )));
    }
    Ok(())
}

/// Top `k` eigenvalues (largest first) for every trial, in trial order.
pub fn top_eigenvalues(cfg: &McConfig, k: usize) -> Result<Vec<Vec<f64>>> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t as u64);
            let spec = sample_spectrum(cfg.n, cfg.r, cfg.a, &mut rng)?;
            Ok(spec.iter().rev().take(k).copied().collect())
        })
        .collect()
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (m, v)
}

/// `sup |F_n - F|` for a continuous reference CDF.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// `sup |F_a - F_b|` between two empirical distributions.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Outlier statistics in the supercritical regime.
pub fn outlier_stats(cfg: &McConfig, l: &Landscape) -> Result<McReport> {
    validate(cfg)?;
    require_gaussian(l)?;
    if l.regime != Regime::Supercritical {
        return Err(Error::PredictionRefused(format!("outlier statistics need a supercritical landscape, got {}", l.regime)));
    }
    let start = Instant::now();
    let a_star = l.a_star.expect("a*");
    let c = l.curvature_c.expect("c");
    let tops = top_eigenvalues(cfg, cfg.r)?;

    let mut means = Vec::with_capacity(cfg.r);
    let mut vars = Vec::with_capacity(cfg.r);
    for k in 0..cfg.r {
        let col: Vec<f64> = tops.iter().map(|t| t[k]).collect();
        let (m, v) = mean_var(&col);
        means.push(m);
        vars.push(v);
    }

    let (ks, pm, pv) = if cfg.r == 1 {
        let law = predict_outlier_law_r1(l, cfg.n)?;
        let normal = Normal::new(law.mean, law.variance.sqrt())
            .map_err(|e| Error::InvalidArgument(format!("normal law: {e}")))?;
        let sample: Vec<f64> = tops.iter().map(|t| t[0]).collect();
        (ks_one_sample(&sample, |x| normal.cdf(x)), Some(law.mean), Some(law.variance))
    } else {
        let scale = (cfg.n as f64 * c / cfg.r as f64).sqrt();
        let observed: Vec<f64> = tops.iter().flatten().map(|x| (x - a_star) * scale).collect();
        let reference = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(cfg.seed, REFERENCE_STREAM + t as u64);
                sample_spectrum(cfg.r, 0, 0.0, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?
            .concat();
        (ks_two_sample(&observed, &reference), Some(a_star), None)
    };

    Ok(McReport {
        n: cfg.n,
        r: cfg.r,
        a: cfg.a,
        trials: cfg.trials,
        seed: cfg.seed,
        outlier_means: means,
        outlier_variances: vars,
        ks_distance: Some(ks),
        predicted_mean: pm,
        predicted_variance: pv,
        threshold: None,
        escape_rate: None,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Fraction of trials whose largest eigenvalue exceeds `threshold`
/// (default `b* - 0.1`). Refused outside the subcritical regime unless `force`.
pub fn subcritical_escape_rate(
    cfg: &McConfig,
    l: &Landscape,
    threshold: Option<f64>,
    force: bool,
) -> Result<McReport> {
    validate(cfg)?;
    require_gaussian(l)?;
    if l.regime != Regime::Subcritical && !force {
        return Err(Error::PredictionRefused(format!("escape rate is a subcritical statistic, landscape is {}", l.regime)));
    }
    let threshold = match (threshold, l.b_star) {
        (Some(t), _) => t,
        (None, Some(b)) => b - 0.1,
        (None, None) => return Err(Error::Usage("no b* available, pass a threshold".into())),
    };
    let start = Instant::now();
    let tops = top_eigenvalues(cfg, cfg.r)?;
    let largest: Vec<f64> = tops.iter().map(|t| t[0]).collect();
    let escapes = largest.iter().filter(|&&x| x > threshold).count();
    let (m, v) = mean_var(&largest);
    Ok(McReport {
        n: cfg.n,
        r: cfg.r,
        a: cfg.a,
        trials: cfg.trials,
        seed: cfg.seed,
        outlier_means: vec![m],
        outlier_variances: vec![v],
        ks_distance: None,
        predicted_mean: None,
        predicted_variance: None,
        threshold: Some(threshold),
        escape_rate: Some(escapes as f64 / cfg.trials as f64),
        wall_time: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::equilibrium;
    use crate::landscape::classify;
    use crate::potential::Potential;
    use approx::assert_abs_diff_eq;

    fn gaussian(a: f64) -> Landscape {
        classify(&equilibrium(&Potential::gaussian()).unwrap(), a).unwrap()
    }

    #[test]
    fn eigensolver_reconstructs() {
        for t in 0..10 {
            let mut rng = trial_rng(11, t);
            let m = sample_matrix(50, 2, 1.5, &mut rng);
            let evd = m.self_adjoint_eigen(Side::Lower).unwrap();
            let (u, s) = (evd.U(), evd.S());
            let norm = (0..50).flat_map(|i| (0..50).map(move |j| (i, j))).map(|(i, j)| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            let mut worst: f64 = 0.0;
            for i in 0..50 {
                for j in 0..50 {
                    let mut acc = c64::new(0.0, 0.0);
                    for k in 0..50 {
                        acc += u[(i, k)] * s[k] * u[(j, k)].conj();
                    }
                    worst = worst.max((acc - m[(i, j)]).norm());
                }
            }
            assert!(worst < 1e-10 * norm, "reconstruction error {worst}");
        }
    }

    #[test]
    fn r0_ignores_a_and_seed_is_deterministic() {
        let s1 = sample_spectrum(40, 0, 1.0, &mut trial_rng(3, 5)).unwrap();
        let s7 = sample_spectrum(40, 0, 7.0, &mut trial_rng(3, 5)).unwrap();
        assert_eq!(s1, s7);
        assert!(s1.windows(2).all(|w| w[0] <= w[1]));
        let other = sample_spectrum(40, 0, 1.0, &mut trial_rng(3, 6)).unwrap();
        assert_ne!(s1, other);
    }

    #[test]
    fn trace_concentrates_on_ra() {
        let traces: Vec<f64> = (0..200)
            .map(|t| sample_spectrum(200, 1, 2.0, &mut trial_rng(9, t)).unwrap().iter().sum())
            .collect();
        let mean = traces.iter().sum::<f64>() / 200.0;
        assert!((mean - 2.0).abs() < 0.5, "mean trace {mean}");
    }

    #[test]
    fn bulk_edge_near_two() {
        for t in 0..10 {
            let s = sample_spectrum(400, 0, 0.0, &mut trial_rng(1, t)).unwrap();
            let top = *s.last().unwrap();
            assert!(top > 1.9 && top < 2.1, "edge {top}");
        }
    }

    #[test]
    fn ks_statistics() {
        assert_abs_diff_eq!(ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_abs_diff_eq!(ks_two_sample(&[0.0, 1.0], &[2.0, 3.0]), 1.0);
        assert_abs_diff_eq!(ks_one_sample(&[0.5], |x| x), 0.5);
    }

    #[test]
    fn escape_rate_edge_cases() {
        let cfg = McConfig { n: 40, r: 1, a: 0.5, trials: 20, seed: 2 };
        let l = gaussian(0.5);
        let all = subcritical_escape_rate(&cfg, &l, Some(f64::NEG_INFINITY), false).unwrap();
        assert_eq!(all.escape_rate, Some(1.0));
        let sup = gaussian(2.0);
        let cfg2 = McConfig { a: 2.0, ..cfg.clone() };
        assert!(subcritical_escape_rate(&cfg2, &sup, Some(2.4), false).is_err());
        let forced = subcritical_escape_rate(&cfg2, &sup, Some(2.0), true).unwrap();
        assert!(forced.escape_rate.unwrap() > 0.9);
        let quartic = classify(&equilibrium(&Potential::new(vec![0.0, 0.0, 0.0, 0.0, 0.25]).unwrap()).unwrap(), 0.1).unwrap();
        assert!(matches!(subcritical_escape_rate(&cfg, &quartic, None, false), Err(Error::Usage(_))));
    }

    #[test]
    fn unitary_conjugation_is_invisible() {
        // Conjugating H by a fixed Haar-like unitary before adding A leaves the
        // law of the top eigenvalue unchanged.
        let n = 40;
        let mut rng = trial_rng(77, 0);
        let g = sample_matrix(n, 0, 0.0, &mut rng);
        let mut ginibre = Mat::<c64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                ginibre[(i, j)] = g[(i, j)] + if i > j { g[(j, i)] * c64::new(0.0, 1.0) } else { c64::new(0.0, 0.0) };
            }
        }
        let q = ginibre.qr().compute_Q();
        let trials = 300;
        let (mut plain, mut rotated) = (Vec::new(), Vec::new());
        for t in 0..trials {
            let mut r1 = trial_rng(5, t);
            let h = sample_matrix(n, 0, 0.0, &mut r1);
            let mut rot = &q * &h * q.adjoint();
            let mut plain_m = h.clone();
            rot[(0, 0)] += c64::new(2.0, 0.0);
            plain_m[(0, 0)] += c64::new(2.0, 0.0);
            plain.push(*hermitian_eigenvalues(&plain_m).unwrap().last().unwrap());
            rotated.push(*hermitian_eigenvalues(&rot).unwrap().last().unwrap());
        }
        let (mp, vp) = mean_var(&plain);
        let (mr, vr) = mean_var(&rotated);
        let se = ((vp + vr) / trials as f64).sqrt();
        assert!((mp - mr).abs() < 5.0 * se, "{mp} vs {mr} (se {se})");
    }
}
