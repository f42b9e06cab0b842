// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. Every check runs even after an earlier failure.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rmt_outliers::cli::{density_discrepancy, oracle_peak};
use rmt_outliers::equilibrium::endpoint_residuals;
use rmt_outliers::gue_kernel::{ch_coeffs, g_h, hermite, norm_k, norm_k_printed, GueKernelContext};
use rmt_outliers::landscape::{critical_a, g_prime_at_edge};
use rmt_outliers::montecarlo::{outlier_stats, subcritical_escape_rate, McConfig};
use rmt_outliers::prediction::report;
use rmt_outliers::quadrature::CompositeRule;
use rmt_outliers::{classify, equilibrium, OracleConfig, OracleKernel, Potential, Regime};

type Outcome = Result<Vec<String>, String>;

/// Collects failures instead of stopping at the first.
#[derive(Default)]
struct Checks {
    notes: Vec<String>,
    failed: Vec<String>,
}

impl Checks {
    fn near(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        self.bool(what, (got - want).abs() <= tol, format!("{got:.12e} vs {want:.12e} (tol {tol:e})"));
    }

    fn below(&mut self, what: &str, got: f64, limit: f64) {
        self.bool(what, got < limit, format!("{got:.4e} < {limit:e}"));
    }

    fn bool(&mut self, what: &str, ok: bool, detail: String) {
        let line = format!("{what}: {detail}");
        if ok {
            self.notes.push(line);
        } else {
            self.failed.push(line);
        }
    }

    fn finish(self) -> Outcome {
        if self.failed.is_empty() {
            Ok(self.notes)
        } else {
            Err(self.failed.join("; "))
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn quartic() -> Potential {
    Potential::new(vec![0.0, 0.0, 0.0, 0.0, 0.25]).expect("quartic")
}

fn c1_equilibrium() -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();

    let v = Potential::gaussian();
    let em = equilibrium(&v).map_err(err)?;
    c.near("gaussian alpha", em.band.alpha, -2.0, 1e-10);
    c.near("gaussian beta", em.band.beta, 2.0, 1e-10);
    let h = em.h.coeffs();
    c.near("gaussian h_0", h[0], 1.0, 1e-10);
    c.below("gaussian h higher coefficients", h.iter().skip(1).fold(0.0f64, |m, x| m.max(x.abs())), 1e-10);
    let res = endpoint_residuals(&v, em.band);
    c.below("gaussian endpoint residual", res[0].abs().max(res[1].abs()), 1e-10);
    c.near("gaussian mass", em.mass(), 1.0, 1e-12);

    let v = quartic();
    let em = equilibrium(&v).map_err(err)?;
    let beta = (16.0f64 / 3.0).powf(0.25);
    c.near("quartic beta", em.band.beta, beta, 1e-10);
    c.near("quartic alpha", em.band.alpha, -beta, 1e-10);
    let mut h = em.h.coeffs().to_vec();
    h.resize(3, 0.0);
    c.near("quartic h_0", h[0], beta * beta / 2.0, 1e-10);
    c.near("quartic h_1", h[1], 0.0, 1e-10);
    c.near("quartic h_2", h[2], 1.0, 1e-10);
    let res = endpoint_residuals(&v, em.band);
    c.below("quartic endpoint residual", res[0].abs().max(res[1].abs()), 1e-10);
    c.near("quartic mass", em.mass(), 1.0, 1e-12);

    c.below("runtime (s)", start.elapsed().as_secs_f64(), 1.0);
    c.finish()
}

fn c2_critical() -> Outcome {
    let mut c = Checks::default();
    let em = equilibrium(&Potential::gaussian()).map_err(err)?;
    let a_c = critical_a(&em).map_err(err)?;
    c.near("gaussian a_c", a_c, 1.0, 1e-10);
    c.near("gaussian a_c = g'(beta)", g_prime_at_edge(&em), a_c, 1e-8);
    // Independent route: the Cauchy transform just outside the edge.
    let eps = 1e-10;
    let outside = em.g_prime_quadrature(Complex64::new(em.band.beta + eps, 0.0)).map_err(err)?.re;
    c.near("gaussian g'(beta + 1e-10) by quadrature", outside, a_c, 1e-4);

    let em = equilibrium(&quartic()).map_err(err)?;
    let a_c = critical_a(&em).map_err(err)?;
    c.near("quartic a_c", a_c, 0.5 * (16.0f64 / 3.0).powf(0.75), 1e-8);
    c.near("quartic a_c = g'(beta)", g_prime_at_edge(&em), a_c, 1e-8);
    c.finish()
}

fn c3_points() -> Outcome {
    let mut c = Checks::default();
    let em = equilibrium(&Potential::gaussian()).map_err(err)?;
    for a in [1.5, 2.0, 3.0] {
        let l = classify(&em, a).map_err(err)?;
        let a_star = l.a_star.ok_or("a* missing")?;
        c.near(&format!("a* at a={a}"), a_star, a + 1.0 / a, 1e-8);
        let curv = l.curvature_c.ok_or("c missing")?;
        c.near(&format!("c at a={a}"), curv, a * a / (a * a - 1.0), 1e-8);
    }
    for a in [0.3, 0.5, 0.8] {
        let l = classify(&em, a).map_err(err)?;
        c.near(&format!("b* at a={a}"), l.b_star.ok_or("b* missing")?, a + 1.0 / a, 1e-8);
    }
    c.finish()
}

fn c4_regimes() -> Outcome {
    let mut c = Checks::default();
    for (name, v) in [("gaussian", Potential::gaussian()), ("quartic", quartic())] {
        let em = equilibrium(&v).map_err(err)?;
        let a_c = critical_a(&em).map_err(err)?;
        let mut wrong = Vec::new();
        for k in 0..20 {
            let above = a_c + 0.05 + 0.1 * k as f64;
            let below = 0.05 + (a_c - 0.1) * k as f64 / 19.0;
            if classify(&em, above).map_err(err)?.regime != Regime::Supercritical {
                wrong.push(format!("{above:.3}"));
            }
            if classify(&em, below).map_err(err)?.regime != Regime::Subcritical {
                wrong.push(format!("{below:.3}"));
            }
        }
        c.bool(&format!("{name} sweep"), wrong.is_empty(), format!("misclassified a = {wrong:?}"));
        let l = classify(&em, a_c).map_err(err)?;
        c.bool(&format!("{name} a = a_c"), l.regime == Regime::Critical, format!("{}", l.regime));
        c.bool(
            &format!("{name} critical prediction refused"),
            report(&l, 400, 1, None).is_err(),
            "report returned an error".into(),
        );
    }
    c.finish()
}

fn c5_hermite() -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    for r in 1..=8usize {
        let span = 12.0 / (r as f64).sqrt();
        let rule = CompositeRule::new(-span, span, 64, 20);
        let w = |z: f64| (-(r as f64) * z * z / 2.0).exp();
        let mut worst: f64 = 0.0;
        for i in 0..=6 {
            for j in 0..=6 {
                let ip = rule.integrate(|z| hermite(r, i, z) * hermite(r, j, z) * w(z));
                let normalised = ip / (norm_k(r, i) * norm_k(r, j)).sqrt();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((normalised - target).abs());
            }
        }
        c.below(&format!("r={r} orthonormality residual"), worst, 1e-10);
        if r == 2 || r == 4 {
            for j in 0..=6 {
                let ip = rule.integrate(|z| hermite(r, j, z).powi(2) * w(z));
                c.near(&format!("r={r} k_{j}"), ip / norm_k(r, j), 1.0, 1e-10);
                if j > 0 {
                    let printed = (ip / norm_k_printed(r, j) - 1.0).abs();
                    c.bool(&format!("r={r} printed k_{j} rejected"), printed > 1e-2, format!("relative error {printed:.3e}"));
                }
            }
        }
    }
    c.below("runtime (s)", start.elapsed().as_secs_f64(), 5.0);
    c.finish()
}

fn c6_semicircle() -> Outcome {
    let mut c = Checks::default();
    let ctx = GueKernelContext::new(64).map_err(err)?;
    let sup = (0..=360)
        .map(|k| -1.8 + 3.6 * k as f64 / 360.0)
        .map(|z| (ctx.rho(z) - (4.0 - z * z).sqrt() / (2.0 * PI)).abs())
        .fold(0.0, f64::max);
    c.bool("sup |rho_64 - semicircle| on [-1.8, 1.8]", sup <= 0.02, format!("{sup:.4e} <= 0.02"));
    c.finish()
}

fn c7_g_h() -> Outcome {
    let mut c = Checks::default();
    let g2 = g_h(Complex64::new(2.0, 0.0)).map_err(err)?.re;
    c.near("g_H(2)", g2, 1.5, 1e-12);
    let c0 = ch_coeffs(0.0, 4).map_err(err)?;
    c.near("c_1(0)", c0[0], 0.0, 1e-10);
    c.near("c_2(0)", c0[1], 0.5, 1e-10);
    for z0 in [0.1, -0.1] {
        let cs = ch_coeffs(z0, 4).map_err(err)?;
        c.near(&format!("c_1({z0})"), cs[0], -z0, 1e-8);
    }
    c.finish()
}

fn c8_oracle_invariants() -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    let v = Potential::gaussian();
    let n = 24;
    for (r, a) in [(0usize, 0.0), (1, 2.0)] {
        let k = OracleKernel::build(&v, OracleConfig::new(n, r, a).precision(256)).map_err(err)?;
        c.near(&format!("r={r} trace"), k.trace().map_err(err)?, n as f64, 1e-10);

        // int K(x, s) K(s, y) ds = K(x, y) on the oracle's own quadrature.
        let probes = [-1.5, -0.3, 0.8, 1.9, 2.5];
        let (nodes, weights) = k.quadrature();
        let left = k.kernel_matrix(&probes, nodes).map_err(err)?;
        let right = k.kernel_matrix(nodes, &probes).map_err(err)?;
        let direct = k.kernel_matrix(&probes, &probes).map_err(err)?;
        let scale = direct.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut worst: f64 = 0.0;
        for i in 0..probes.len() {
            for j in 0..probes.len() {
                let composed: f64 = (0..nodes.len()).map(|s| left[i][s] * weights[s] * right[s][j]).sum();
                worst = worst.max((composed - direct[i][j]).abs() / scale);
            }
        }
        c.below(&format!("r={r} reproducing residual"), worst, 1e-8);

        let fine = OracleKernel::build(&v, OracleConfig::new(n, r, a).precision(512)).map_err(err)?;
        let xs: Vec<f64> = (0..=60).map(|i| -2.5 + 5.5 * i as f64 / 60.0).collect();
        let d256 = k.diagonal(&xs).map_err(err)?;
        let d512 = fine.diagonal(&xs).map_err(err)?;
        let drift = d256.iter().zip(&d512).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        c.below(&format!("r={r} precision-doubling drift"), drift, 1e-10);

        if r == 0 {
            let rho0 = k.mean_density(0.0).map_err(err)?;
            c.below("r=0 bulk density at 0, relative error to 1/pi", (rho0 * PI - 1.0).abs(), 0.05);
        }
    }
    c.below("runtime (s)", start.elapsed().as_secs_f64(), 120.0);
    c.finish()
}

fn c9_oracle_super() -> Outcome {
    let mut c = Checks::default();
    let v = Potential::gaussian();
    let l = classify(&equilibrium(&v).map_err(err)?, 2.0).map_err(err)?;
    let k = OracleKernel::build(&v, OracleConfig::new(24, 1, 2.0)).map_err(err)?;
    let count = k.expected_count(2.2, 2.8).map_err(err)?;
    c.bool("expected count in [2.2, 2.8]", (0.8..=1.2).contains(&count), format!("{count:.4} in [0.8, 1.2]"));
    let peak = oracle_peak(&k, 2.5, 0.3).map_err(err)?;
    c.below("|peak - 2.5|", (peak - 2.5).abs(), 0.1);
    let disc = density_discrepancy(&k, &l, 24, 1, 2.3, 2.7).map_err(err)?;
    c.bool("relative sup discrepancy on [2.3, 2.7]", disc <= 0.25, format!("{disc:.4} <= 0.25"));
    c.finish()
}

fn c10_oracle_sub() -> Outcome {
    let mut c = Checks::default();
    let k = OracleKernel::build(&Potential::gaussian(), OracleConfig::new(24, 1, 0.5)).map_err(err)?;
    c.below("expected count in [2.35, 2.65]", k.expected_count(2.35, 2.65).map_err(err)?, 0.05);
    c.finish()
}

fn c11_mc_super() -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    let l = classify(&equilibrium(&Potential::gaussian()).map_err(err)?, 2.0).map_err(err)?;
    let cfg = McConfig { n: 500, r: 1, a: 2.0, trials: 2000, seed: 1 };
    let rep = outlier_stats(&cfg, &l).map_err(err)?;
    c.below("|mean - 2.5|", (rep.outlier_means[0] - 2.5).abs(), 4.0 * (0.0015f64 / 2000.0).sqrt());
    c.below("relative variance error", (rep.outlier_variances[0] / 0.0015 - 1.0).abs(), 0.15);
    c.below("KS distance to Normal(2.5, 0.0015)", rep.ks_distance.unwrap_or(1.0), 0.05);
    c.below("runtime (s)", start.elapsed().as_secs_f64(), 300.0);
    c.finish()
}

fn c12_mc_r2() -> Outcome {
    let mut c = Checks::default();
    let l = classify(&equilibrium(&Potential::gaussian()).map_err(err)?, 2.0).map_err(err)?;
    let cfg = McConfig { n: 500, r: 2, a: 2.0, trials: 2000, seed: 1 };
    let rep = outlier_stats(&cfg, &l).map_err(err)?;
    c.below("KS distance to scaled 2x2 GUE", rep.ks_distance.unwrap_or(1.0), 0.06);
    c.finish()
}

fn c13_mc_sub() -> Outcome {
    let mut c = Checks::default();
    let l = classify(&equilibrium(&Potential::gaussian()).map_err(err)?, 0.5).map_err(err)?;
    let cfg = McConfig { n: 500, r: 1, a: 0.5, trials: 2000, seed: 1 };
    let rep = subcritical_escape_rate(&cfg, &l, Some(2.4), false).map_err(err)?;
    c.below("escape rate past 2.4", rep.escape_rate.unwrap_or(1.0), 0.01);
    c.finish()
}

fn c14_determinism() -> Outcome {
    let mut c = Checks::default();
    let dir = tempfile::tempdir().map_err(err)?;
    let runs: [&[&str]; 6] = [
        &["oracle", "--n", "12", "--r", "0", "--a", "0"],
        &["oracle", "--n", "12", "--r", "1", "--a", "2"],
        &["mc", "--n", "60", "--r", "1", "--a", "2", "--trials", "60", "--seed", "5"],
        &["mc", "--n", "60", "--r", "2", "--a", "2", "--trials", "60", "--seed", "5"],
        &["mc", "--n", "60", "--r", "1", "--a", "0.5", "--trials", "60", "--seed", "5"],
        &["compare", "--against", "mc", "--n", "60", "--a", "2", "--trials", "60", "--seed", "5"],
    ];
    for (i, args) in runs.iter().enumerate() {
        // Same path both times: the echoed config includes it.
        let path = dir.path().join(format!("run{i}.json"));
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let status = Command::new(env!("CARGO_BIN_EXE_rmt-outliers"))
                .args(*args)
                .arg("--out")
                .arg(&path)
                .status()
                .map_err(err)?;
            if !matches!(status.code(), Some(0) | Some(2)) {
                return Err(format!("{} exited with {status}", args.join(" ")));
            }
            outputs.push(std::fs::read(&path).map_err(err)?);
        }
        let same = outputs[0] == outputs[1] && !outputs[0].is_empty();
        let detail = if same { "byte-identical" } else { "outputs differ" };
        c.bool(&args.join(" "), same, format!("{detail} ({} bytes)", outputs[0].len()));
    }
    c.finish()
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("1 equilibrium closed forms", c1_equilibrium),
        ("2 critical coupling", c2_critical),
        ("3 outlier and shadow points", c3_points),
        ("4 regime sweep", c4_regimes),
        ("5 Hermite suite", c5_hermite),
        ("6 semicircle limit", c6_semicircle),
        ("7 g_H suite", c7_g_h),
        ("8 oracle invariants", c8_oracle_invariants),
        ("9 oracle vs supercritical kernel", c9_oracle_super),
        ("10 oracle vs subcritical suppression", c10_oracle_sub),
        ("11 Monte Carlo supercritical r=1", c11_mc_super),
        ("12 Monte Carlo r=2 scaled GUE", c12_mc_r2),
        ("13 Monte Carlo subcritical escape", c13_mc_sub),
        ("14 determinism", c14_determinism),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(notes) => println!("PASS criterion {name} ({secs:.1}s): {}", notes.join("; ")),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {name} ({secs:.1}s): {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
