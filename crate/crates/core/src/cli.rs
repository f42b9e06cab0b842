//! Command-line front end: configuration, dispatch and report emission.
//!
//! Every command builds a [`RunConfig`] from an optional JSON file overlaid with
//! flags, validates it, runs, and writes one JSON report (or a CSV grid) either
//! to stdout or atomically to `--out`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::equilibrium::{equilibrium, EquilibriumMeasure};
use crate::error::{Error, Result};
use crate::finite_n_oracle::{OracleConfig, OracleKernel, DEFAULT_PRECISION, MIN_PRECISION};
use crate::landscape::{classify, Landscape, Regime};
use crate::montecarlo::{outlier_stats, subcritical_escape_rate, McConfig, McReport};
use crate::potential::Potential;
use crate::prediction::{self, predict_outlier_density, Grid};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "rmt-outliers", version, about = "Outlier phase diagram and kernel checks for Hermitian matrices with an external source")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibrium measure, critical coupling and regime for one or more `a`.
    Analyze(Flags),
    /// Predicted outlier density (or kernel) near a*, or the subcritical disk.
    Predict(Flags),
    /// Exact finite-n kernel: density grid, trace and expected counts.
    Oracle(Flags),
    /// Monte Carlo outlier statistics for the Gaussian potential.
    Mc(Flags),
    /// Prediction against the oracle or Monte Carlo, with a pass/fail verdict.
    Compare(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Against {
    #[default]
    Oracle,
    Mc,
}

/// Flags shared by all subcommands. Unset flags fall back to `--config`, then to
/// per-command defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON config file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Potential coefficients, lowest degree first, as a JSON array.
    #[arg(long)]
    pub potential: Option<String>,
    /// Source eigenvalue (default 2).
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Matrix size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Rank of the source (default 1).
    #[arg(long)]
    pub r: Option<usize>,
    /// Monte Carlo trials (default 2000).
    #[arg(long)]
    pub trials: Option<usize>,
    /// Monte Carlo seed (default 1).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Oracle working precision in bits, at least 192 (default 256).
    #[arg(long)]
    pub precision_bits: Option<u32>,
    /// Evaluation grid as min:max:points.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Write the result here (atomically) instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Analyze over a range of source strengths, a=start:stop:steps.
    #[arg(long, allow_hyphen_values = true)]
    pub sweep: Option<String>,
    /// Escape threshold for subcritical Monte Carlo (default b* - 0.1).
    #[arg(long, allow_negative_numbers = true)]
    pub threshold: Option<f64>,
    /// Reference for `compare`.
    #[arg(long, value_enum)]
    pub against: Option<Against>,
    /// Regime the caller expects; a mismatch is a usage error.
    #[arg(long)]
    pub expect: Option<String>,
    /// Emit the kernel on grid x grid instead of the density.
    #[arg(long)]
    pub kernel: bool,
}

/// Fully resolved configuration, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub potential: Vec<f64>,
    pub a: f64,
    pub n: Option<usize>,
    pub r: usize,
    pub trials: usize,
    pub seed: u64,
    pub precision_bits: u32,
    pub grid: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub sweep: Option<String>,
    pub threshold: Option<f64>,
    pub against: Against,
    pub expect: Option<String>,
    pub kernel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            potential: vec![0.0, 0.0, 0.5],
            a: 2.0,
            n: None,
            r: 1,
            trials: 2000,
            seed: 1,
            precision_bits: DEFAULT_PRECISION,
            grid: None,
            out: None,
            format: Format::Json,
            sweep: None,
            threshold: None,
            against: Against::Oracle,
            expect: None,
            kernel: false,
        }
    }
}

impl RunConfig {
    /// Config file (if any) overlaid with flags.
    pub fn resolve(flags: &Flags) -> Result<Self> {
        let mut cfg = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| Error::Usage(format!("bad config {}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(p) = &flags.potential {
            cfg.potential = serde_json::from_str(p)
                .map_err(|e| Error::Usage(format!("--potential must be a JSON array of numbers: {e}")))?;
        }
        macro_rules! overlay {
            ($($field:ident),*) => { $( if let Some(v) = flags.$field.clone() { cfg.$field = v; } )* };
        }
        overlay!(a, r, trials, seed, precision_bits, format, against);
        macro_rules! overlay_opt {
            ($($field:ident),*) => { $( if flags.$field.is_some() { cfg.$field = flags.$field.clone(); } )* };
        }
        overlay_opt!(n, grid, out, sweep, threshold, expect);
        cfg.kernel |= flags.kernel;
        Ok(cfg)
    }

    pub fn potential(&self) -> Result<Potential> {
        Potential::new(self.potential.clone())
    }

    fn n_or(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }

    fn grid(&self) -> Result<Option<Grid>> {
        self.grid.as_deref().map(Grid::parse).transpose()
    }

    fn check_kappa(&self, n: usize) -> Result<()> {
        if self.r > 0 && 4 * self.r >= n {
            return Err(Error::Usage(format!(
                "r = {} is not small against n = {n}: need r < n/4 (kappa = r/n < 1/4)",
                self.r
            )));
        }
        Ok(())
    }

    fn check_expect(&self, regime: Regime) -> Result<()> {
        if let Some(want) = &self.expect {
            if !want.eq_ignore_ascii_case(regime.name()) {
                return Err(Error::Usage(format!("expected regime {want}, but the landscape is {regime}")));
            }
        }
        Ok(())
    }
}

/// Output of one command, before serialisation.
pub enum Output {
    Json(Value),
    /// CSV body plus a JSON summary.
    Csv(String, Value),
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one command and emits its output. Returns 0, or 2 for a failed `compare`
/// verdict.
pub fn run(command: &Command) -> Result<i32> {
    let (name, flags) = match command {
        Command::Analyze(f) => ("analyze", f),
        Command::Predict(f) => ("predict", f),
        Command::Oracle(f) => ("oracle", f),
        Command::Mc(f) => ("mc", f),
        Command::Compare(f) => ("compare", f),
    };
    let cfg = RunConfig::resolve(flags)?;
    let output = match command {
        Command::Analyze(_) => cmd_analyze(&cfg)?,
        Command::Predict(_) => cmd_predict(&cfg)?,
        Command::Oracle(_) => cmd_oracle(&cfg)?,
        Command::Mc(_) => cmd_mc(&cfg)?,
        Command::Compare(_) => cmd_compare(&cfg)?,
    };
    let passed = match &output {
        Output::Json(v) => v.get("pass").and_then(Value::as_bool).unwrap_or(true),
        Output::Csv(..) => true,
    };
    emit(name, &cfg, output)?;
    Ok(if passed { 0 } else { 2 })
}

fn envelope(command: &str, cfg: &RunConfig, result: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": cfg,
        "result": result,
    })
}

fn emit(command: &str, cfg: &RunConfig, output: Output) -> Result<()> {
    match output {
        Output::Json(result) => {
            let text = serde_json::to_string_pretty(&envelope(command, cfg, result))? + "\n";
            match &cfg.out {
                Some(path) => write_atomic(path, text.as_bytes()),
                None => write_stdout(&text),
            }
        }
        Output::Csv(body, summary) => {
            let summary = serde_json::to_string_pretty(&envelope(command, cfg, summary))? + "\n";
            match &cfg.out {
                Some(path) => {
                    write_atomic(path, body.as_bytes())?;
                    write_stdout(&summary)
                }
                None => {
                    write_stdout(&body)?;
                    eprint!("{summary}");
                    Ok(())
                }
            }
        }
    }
}

fn write_stdout(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

/// Rounds to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let text = format!("{:.*e}", (digits - 1).max(0) as usize, x);
    text.parse().unwrap_or(x)
}

fn r12(x: f64) -> Value {
    json!(round_sig(x, 12))
}

fn r12_opt(x: Option<f64>) -> Value {
    x.map(r12).unwrap_or(Value::Null)
}

fn landscape_for(cfg: &RunConfig) -> Result<Landscape> {
    let em = equilibrium(&cfg.potential()?)?;
    classify(&em, cfg.a)
}

fn analyze_one(em: &EquilibriumMeasure, a: f64) -> Result<Value> {
    let l = classify(em, a)?;
    Ok(json!({
        "a": r12(a),
        "alpha": r12(em.band.alpha),
        "beta": r12(em.band.beta),
        "l1": r12(em.l1),
        "a_c": r12(l.a_c),
        "regime": l.regime,
        "a_star": r12_opt(l.a_star),
        "b_star": r12_opt(l.b_star),
        "curvature_c": r12_opt(l.curvature_c),
        "l2": r12(l.l2),
        "disk_radius": r12_opt(l.disk_radius),
    }))
}

/// Parses `a=start:stop:steps`.
pub fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Usage(format!("sweep must look like a=start:stop:steps, got {spec:?}"));
    let body = spec.strip_prefix("a=").ok_or_else(bad)?;
    let parts: Vec<&str> = body.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].parse().map_err(|_| bad())?;
    let steps: usize = parts[2].parse().map_err(|_| bad())?;
    if steps == 0 || steps > 100_000 || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    Ok((0..steps).map(|k| start + (stop - start) * k as f64 / (steps - 1) as f64).collect())
}

pub fn cmd_analyze(cfg: &RunConfig) -> Result<Output> {
    let em = equilibrium(&cfg.potential()?)?;
    match &cfg.sweep {
        None => {
            let v = analyze_one(&em, cfg.a)?;
            if let Some(regime) = v.get("regime").and_then(Value::as_str) {
                if let Some(want) = &cfg.expect {
                    if !want.eq_ignore_ascii_case(regime) {
                        return Err(Error::Usage(format!("expected regime {want}, but the landscape is {regime}")));
                    }
                }
            }
            Ok(Output::Json(v))
        }
        Some(spec) => {
            let rows: Vec<Value> = parse_sweep(spec)?
                .into_iter()
                .map(|a| analyze_one(&em, a).unwrap_or_else(|e| json!({ "a": r12(a), "error": e.to_string() })))
                .collect();
            if cfg.format == Format::Csv {
                let mut csv = String::from("a,regime,a_c,a_star,b_star,curvature_c\n");
                for row in &rows {
                    let field = |k: &str| match row.get(k) {
                        Some(Value::Null) | None => String::new(),
                        Some(Value::String(s)) => s.clone(),
                        Some(v) => v.to_string(),
                    };
                    let regime = row.get("error").map(|_| "error".to_string()).unwrap_or_else(|| field("regime"));
                    csv.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        field("a"),
                        regime,
                        field("a_c"),
                        field("a_star"),
                        field("b_star"),
                        field("curvature_c")
                    ));
                }
                return Ok(Output::Csv(csv, json!({ "points": rows.len() })));
            }
            Ok(Output::Json(json!({ "sweep": rows })))
        }
    }
}

fn csv_rows(rows: impl IntoIterator<Item = (f64, Option<f64>, f64)>) -> String {
    let mut out = String::from("x,y,value\n");
    for (x, y, v) in rows {
        match y {
            Some(y) => out.push_str(&format!("{x:?},{y:?},{v:?}\n")),
            None => out.push_str(&format!("{x:?},,{v:?}\n")),
        }
    }
    out
}

pub fn cmd_predict(cfg: &RunConfig) -> Result<Output> {
    let n = cfg.n_or(400);
    cfg.check_kappa(n)?;
    let l = landscape_for(cfg)?;
    cfg.check_expect(l.regime)?;
    let report = prediction::report(&l, n, cfg.r, cfg.grid()?)?;
    let summary = serde_json::to_value(&report)?;
    let Some(sup) = &report.supercritical else {
        return Ok(Output::Json(summary));
    };
    if cfg.format == Format::Json && !cfg.kernel {
        return Ok(Output::Json(summary));
    }
    let xs = sup.grid.values();
    let body = if cfg.kernel {
        let mut rows = Vec::with_capacity(xs.len() * xs.len());
        for &x in &xs {
            for &y in &xs {
                rows.push((x, Some(y), prediction::predict_supercritical_kernel(&l, n, cfg.r, x, y)?));
            }
        }
        csv_rows(rows)
    } else {
        csv_rows(xs.iter().zip(&sup.density).map(|(&x, &d)| (x, None, d)))
    };
    let mut brief = summary;
    if let Some(s) = brief.get_mut("supercritical").and_then(Value::as_object_mut) {
        s.remove("density");
    }
    Ok(Output::Csv(body, brief))
}

/// Intervals where the prediction says something definite: `a* +- 0.3` or `b* +- rho`.
fn count_intervals(l: &Landscape) -> Vec<(f64, f64)> {
    match l.regime {
        Regime::Supercritical => {
            let a = l.a_star.expect("a*");
            let half = 0.3f64.min(0.9 * (a - l.em.band.beta));
            vec![(a - half, a + half)]
        }
        Regime::Subcritical => {
            let b = l.b_star.expect("b*");
            let rho = l.disk_radius.expect("disk").min(0.15);
            vec![(b - rho, b + rho)]
        }
        _ => Vec::new(),
    }
}

fn build_oracle(cfg: &RunConfig, n: usize) -> Result<OracleKernel> {
    if cfg.precision_bits < MIN_PRECISION {
        return Err(Error::Usage(format!(
            "--precision-bits must be at least {MIN_PRECISION}, got {}",
            cfg.precision_bits
        )));
    }
    cfg.check_kappa(n)?;
    OracleKernel::build(&cfg.potential()?, OracleConfig::new(n, cfg.r, cfg.a).precision(cfg.precision_bits))
}

pub fn cmd_oracle(cfg: &RunConfig) -> Result<Output> {
    let n = cfg.n_or(24);
    let oracle = build_oracle(cfg, n)?;
    let (lo, hi) = oracle.domain();
    let grid = match cfg.grid()? {
        Some(g) => g,
        None => Grid::new(lo, hi, 401)?,
    };
    let intervals = match landscape_for(cfg) {
        Ok(l) => {
            cfg.check_expect(l.regime)?;
            count_intervals(&l)
        }
        Err(_) if cfg.expect.is_none() => Vec::new(),
        Err(e) => return Err(e),
    };
    let counts = intervals
        .iter()
        .map(|&(a, b)| Ok(json!({ "interval": [a, b], "count": oracle.expected_count(a.max(lo), b.min(hi))? })))
        .collect::<Result<Vec<_>>>()?;
    let xs = grid.values();
    let density: Vec<f64> = oracle.diagonal(&xs)?.into_iter().map(|k| k / n as f64).collect();
    let summary = json!({
        "oracle": oracle.summary(),
        "trace": oracle.trace()?,
        "expected_counts": counts,
        "grid": grid,
    });
    if cfg.kernel {
        let k = oracle.kernel_matrix(&xs, &xs)?;
        let rows = xs
            .iter()
            .enumerate()
            .flat_map(|(i, &x)| xs.iter().enumerate().map(move |(j, &y)| (i, j, x, y)))
            .map(|(i, j, x, y)| (x, Some(y), k[i][j]));
        return Ok(Output::Csv(csv_rows(rows), summary));
    }
    if cfg.format == Format::Csv {
        return Ok(Output::Csv(csv_rows(xs.iter().zip(&density).map(|(&x, &d)| (x, None, d))), summary));
    }
    let mut full = summary;
    full["mean_density"] = json!(density);
    Ok(Output::Json(full))
}

fn mc_config(cfg: &RunConfig, n: usize) -> McConfig {
    McConfig { n, r: cfg.r, a: cfg.a, trials: cfg.trials, seed: cfg.seed }
}

fn run_mc(cfg: &RunConfig, l: &Landscape, n: usize) -> Result<McReport> {
    if !cfg.potential()?.is_standard_gaussian() {
        return Err(Error::Usage("MC requires Gaussian potential V = x^2/2".into()));
    }
    cfg.check_kappa(n)?;
    let mc = mc_config(cfg, n);
    match l.regime {
        Regime::Supercritical => outlier_stats(&mc, l),
        Regime::Subcritical => subcritical_escape_rate(&mc, l, cfg.threshold, false),
        other => Err(Error::PredictionRefused(format!("no Monte Carlo statistic in the {other} regime"))),
    }
}

pub fn cmd_mc(cfg: &RunConfig) -> Result<Output> {
    if !cfg.potential()?.is_standard_gaussian() {
        return Err(Error::Usage("MC requires Gaussian potential V = x^2/2".into()));
    }
    let l = landscape_for(cfg)?;
    cfg.check_expect(l.regime)?;
    let report = run_mc(cfg, &l, cfg.n_or(500))?;
    Ok(Output::Json(serde_json::to_value(&report)?))
}

/// One line of a comparison verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: String,
    pub pass: bool,
}

impl Check {
    fn below(name: &str, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, bound: format!("< {limit}"), pass: value < limit }
    }

    fn within(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Check { name: name.into(), value, bound: format!("in [{lo}, {hi}]"), pass: value >= lo && value <= hi }
    }
}

/// Oracle density peak near `a*`, located on a fine grid and refined by a parabola.
pub fn oracle_peak(oracle: &OracleKernel, a_star: f64, half: f64) -> Result<f64> {
    let (lo, hi) = oracle.domain();
    let xs: Vec<f64> = (0..=400)
        .map(|k| a_star - half + 2.0 * half * k as f64 / 400.0)
        .filter(|&x| x >= lo && x <= hi)
        .collect();
    let d = oracle.diagonal(&xs)?;
    let i = (0..d.len()).max_by(|&i, &j| d[i].total_cmp(&d[j])).ok_or_else(|| {
        Error::Domain("peak window lies outside the oracle domain".into())
    })?;
    if i == 0 || i + 1 == d.len() {
        return Ok(xs[i]);
    }
    let h = xs[1] - xs[0];
    let denom = d[i - 1] - 2.0 * d[i] + d[i + 1];
    Ok(if denom < 0.0 { xs[i] + 0.5 * h * (d[i - 1] - d[i + 1]) / denom } else { xs[i] })
}

/// `max |oracle - predicted| / max predicted` for the mean density on `[lo, hi]`.
pub fn density_discrepancy(oracle: &OracleKernel, l: &Landscape, n: usize, r: usize, lo: f64, hi: f64) -> Result<f64> {
    let xs: Vec<f64> = (0..=80).map(|k| lo + (hi - lo) * k as f64 / 80.0).collect();
    let diag = oracle.diagonal(&xs)?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (x, k) in xs.iter().zip(diag) {
        let p = predict_outlier_density(l, n, r, *x)?;
        worst = worst.max((k / n as f64 - p).abs());
        scale = scale.max(p);
    }
    Ok(worst / scale)
}

pub fn oracle_checks(l: &Landscape, oracle: &OracleKernel) -> Result<Vec<Check>> {
    let n = oracle.config().n;
    let r = oracle.config().r;
    let mut checks = vec![Check::below("trace error", (oracle.trace()? - n as f64).abs(), 1e-10)];
    match l.regime {
        Regime::Supercritical => {
            let a = l.a_star.expect("a*");
            let half = 0.3f64.min(0.9 * (a - l.em.band.beta));
            let count = oracle.expected_count(a - half, a + half)?;
            checks.push(Check::within("expected count near a*", count, 0.8 * r as f64, 1.2 * r as f64));
            let peak = oracle_peak(oracle, a, half)?;
            checks.push(Check::below("|density peak - a*|", (peak - a).abs(), 0.1));
            let w = (2.0 / 3.0) * half;
            let disc = density_discrepancy(oracle, l, n, r, a - w, a + w)?;
            checks.push(Check::below("relative sup density discrepancy", disc, 0.25));
        }
        Regime::Subcritical => {
            for (lo, hi) in count_intervals(l) {
                checks.push(Check::below("expected count near b*", oracle.expected_count(lo, hi)?, 0.05));
            }
        }
        other => return Err(Error::PredictionRefused(format!("nothing to compare in the {other} regime"))),
    }
    Ok(checks)
}

pub fn mc_checks(l: &Landscape, report: &McReport) -> Vec<Check> {
    let mut checks = Vec::new();
    if let Some(rate) = report.escape_rate {
        checks.push(Check::below("escape rate", rate, 0.01));
        return checks;
    }
    let ks = report.ks_distance.unwrap_or(1.0);
    if report.r == 1 {
        let var = report.predicted_variance.expect("r = 1 prediction");
        let mean = l.a_star.expect("a*");
        let tol = 4.0 * (var / report.trials as f64).sqrt();
        checks.push(Check::below("|mean - a*|", (report.outlier_means[0] - mean).abs(), tol));
        checks.push(Check::below("relative variance error", (report.outlier_variances[0] / var - 1.0).abs(), 0.15));
        checks.push(Check::below("KS distance to normal law", ks, 0.05));
    } else {
        checks.push(Check::below("KS distance to scaled GUE", ks, 0.06));
    }
    checks
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<Output> {
    let l = landscape_for(cfg)?;
    cfg.check_expect(l.regime)?;
    let (checks, reference) = match cfg.against {
        Against::Oracle => {
            let n = cfg.n_or(24);
            let oracle = build_oracle(cfg, n)?;
            (oracle_checks(&l, &oracle)?, json!(oracle.summary()))
        }
        Against::Mc => {
            let report = run_mc(cfg, &l, cfg.n_or(500))?;
            (mc_checks(&l, &report), serde_json::to_value(&report)?)
        }
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(Output::Json(json!({
        "regime": l.regime,
        "against": cfg.against,
        "pass": pass,
        "checks": checks,
        "reference": reference,
    })))
}
