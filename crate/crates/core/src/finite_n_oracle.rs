//! Exact finite-`n` kernel of the source ensemble.
//!
//! With `A = diag(a, .., a, 0, .., 0)` of rank `r`, the eigenvalues form a
//! biorthogonal ensemble built from the monomials `f_j(x) = x^j`, `j < n`, and the
//! weights
//!
//! ```text
//!   g_k(x) = x^k exp(-n V(x)),            k < n - r,
//!   g_k(x) = x^k exp(-n (V(x) - a x)),    k < r.
//! ```
//!
//! With `G_jk = int f_j g_k` and `C = G^{-1}`, the correlation kernel is
//! `K(x, y) = sum_{j,k} g_k(x) C_kj f_j(y)`. Monomial Gram matrices are
//! exponentially ill-conditioned, so `G` is assembled and inverted in
//! arbitrary-precision arithmetic.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::quadrature::CompositeRule;

pub const MAX_N: usize = 32;
pub const MAX_R: usize = 4;
pub const MIN_PRECISION: u32 = 192;
pub const DEFAULT_PRECISION: u32 = 256;

const NODES_PER_PANEL: usize = 32;
const MAX_PANEL_WIDTH: f64 = 0.1;

/// How the factor `exp(-n V)` is split between the two function families.
///
/// `Standard` puts all of it in the weights; `Symmetric` moves `exp(-n V/2)`
/// onto the monomials. The two kernels differ by a diagonal conjugation, which
/// leaves every correlation function unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum Gauge {
    #[default]
    Standard,
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleConfig {
    pub n: usize,
    pub r: usize,
    pub a: f64,
    pub precision_bits: u32,
    pub gauge: Gauge,
}

impl OracleConfig {
    pub fn new(n: usize, r: usize, a: f64) -> Self {
        OracleConfig { n, r, a, precision_bits: DEFAULT_PRECISION, gauge: Gauge::Standard }
    }

    pub fn precision(mut self, bits: u32) -> Self {
        self.precision_bits = bits;
        self
    }

    pub fn gauge(mut self, gauge: Gauge) -> Self {
        self.gauge = gauge;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_N {
            return Err(Error::InvalidArgument(format!("oracle needs 1 <= n <= {MAX_N}, got {}", self.n)));
        }
        if self.r > MAX_R || (self.r > 0 && self.r >= self.n) {
            return Err(Error::InvalidArgument(format!(
                "oracle needs r <= {MAX_R} and r < n, got r = {}",
                self.r
            )));
        }
        if self.precision_bits < MIN_PRECISION {
            return Err(Error::InvalidArgument(format!(
                "precision must be at least {MIN_PRECISION} bits, got {}",
                self.precision_bits
            )));
        }
        if !self.a.is_finite() {
            return Err(Error::InvalidArgument("source strength must be finite".into()));
        }
        Ok(())
    }
}

/// Finite-`n` kernel, immutable after [`OracleKernel::build`].
#[derive(Debug, Clone)]
pub struct OracleKernel {
    config: OracleConfig,
    potential: Potential,
    domain: (f64, f64),
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `C = G^{-1}`, row `k` indexes the weights, column `j` the monomials.
    inverse: Vec<Vec<Float>>,
    residual: f64,
}

/// Build parameters and invariants, as echoed in reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSummary {
    pub config: OracleConfig,
    pub domain: (f64, f64),
    pub quadrature_nodes: usize,
    pub inverse_residual: f64,
}

fn poly_float(coeffs: &[f64], x: &Float) -> Float {
    let prec = x.prec();
    let mut acc = Float::with_val(prec, 0);
    for &c in coeffs.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

impl OracleKernel {
    pub fn build(v: &Potential, config: OracleConfig) -> Result<Self> {
        config.validate()?;
        let prec = config.precision_bits;
        let (n, r) = (config.n, config.r);
        let domain = truncation_domain(v, &config)?;

        let width = domain.1 - domain.0;
        let min_nodes = 8 * (n + v.degree() * n);
        let panels = ((width / MAX_PANEL_WIDTH).ceil() as usize).max(min_nodes.div_ceil(NODES_PER_PANEL));
        let rule = CompositeRule::new(domain.0, domain.1, panels, NODES_PER_PANEL);

        // Moments sum_i w_i x_i^m W(x_i) of both weight families, m < 2n - 1.
        let m_count = 2 * n - 1;
        let per_node: Vec<(Vec<Float>, Vec<Float>)> = rule
            .nodes
            .par_iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| {
                let xf = Float::with_val(prec, x);
                let nv = Float::with_val(prec, poly_float(v.coeffs(), &xf) * n as f64);
                let base = Float::with_val(prec, -&nv).exp() * w;
                let tilt = if r > 0 {
                    Float::with_val(prec, Float::with_val(prec, &xf * (n as f64 * config.a)) - &nv).exp() * w
                } else {
                    Float::with_val(prec, 0)
                };
                let mut p = Float::with_val(prec, 1);
                let mut m0 = Vec::with_capacity(m_count);
                let mut m1 = Vec::with_capacity(m_count);
                for _ in 0..m_count {
                    m0.push(Float::with_val(prec, &p * &base));
                    m1.push(Float::with_val(prec, &p * &tilt));
                    p *= &xf;
                }
                (m0, m1)
            })
            .collect();
        let mut mom0 = vec![Float::with_val(prec, 0); m_count];
        let mut mom1 = vec![Float::with_val(prec, 0); m_count];
        for (m0, m1) in &per_node {
            for m in 0..m_count {
                mom0[m] += &m0[m];
                mom1[m] += &m1[m];
            }
        }

        // G_jk = int f_j g_k.
        let gram: Vec<Vec<Float>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        if k < n - r {
                            mom0[j + k].clone()
                        } else {
                            mom1[j + k - (n - r)].clone()
                        }
                    })
                    .collect()
            })
            .collect();
        let inverse = invert(&gram, prec)?;
        let residual = inverse_residual(&gram, &inverse, prec);
        let bound = 2f64.powf(-(prec as f64) / 4.0);
        if !(residual < bound) {
            return Err(Error::RaisePrecision(format!(
                "Gram inverse residual {residual:e} exceeds {bound:e} at {prec} bits"
            )));
        }

        Ok(OracleKernel {
            config,
            potential: v.clone(),
            domain,
            nodes: rule.nodes,
            weights: rule.weights,
            inverse,
            residual,
        })
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// The composite Gauss–Legendre rule used for the Gram matrix.
    pub fn quadrature(&self) -> (&[f64], &[f64]) {
        (&self.nodes, &self.weights)
    }

    pub fn summary(&self) -> OracleSummary {
        OracleSummary {
            config: self.config.clone(),
            domain: self.domain,
            quadrature_nodes: self.nodes.len(),
            inverse_residual: self.residual,
        }
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if !(x >= self.domain.0 && x <= self.domain.1) {
            return Err(Error::Domain(format!(
                "x = {x} outside the truncation interval [{}, {}]",
                self.domain.0, self.domain.1
            )));
        }
        Ok(())
    }

    fn prec(&self) -> u32 {
        self.config.precision_bits
    }

    fn half_nv(&self, x: &Float) -> Float {
        poly_float(self.potential.coeffs(), x) * (0.5 * self.config.n as f64)
    }

    /// `g_0(x) .. g_{n-1}(x)` in the configured gauge.
    fn weight_values(&self, x: f64) -> Vec<Float> {
        let prec = self.prec();
        let (n, r) = (self.config.n, self.config.r);
        let xf = Float::with_val(prec, x);
        let half = self.half_nv(&xf);
        let mut exponent = Float::with_val(prec, -2 * &half);
        if self.config.gauge == Gauge::Symmetric {
            exponent += &half;
        }
        let base = Float::with_val(prec, &exponent).exp();
        let tilt = Float::with_val(prec, exponent + Float::with_val(prec, &xf * (n as f64 * self.config.a))).exp();
        let mut out = Vec::with_capacity(n);
        let mut p = Float::with_val(prec, 1);
        for _ in 0..n - r {
            out.push(Float::with_val(prec, &p * &base));
            p *= &xf;
        }
        let mut p = Float::with_val(prec, 1);
        for _ in 0..r {
            out.push(Float::with_val(prec, &p * &tilt));
            p *= &xf;
        }
        out
    }

    /// `f_0(y) .. f_{n-1}(y)` in the configured gauge.
    fn monomial_values(&self, y: f64) -> Vec<Float> {
        let prec = self.prec();
        let yf = Float::with_val(prec, y);
        let scale = match self.config.gauge {
            Gauge::Standard => Float::with_val(prec, 1),
            Gauge::Symmetric => Float::with_val(prec, -self.half_nv(&yf)).exp(),
        };
        (0..self.config.n)
            .map(|j| Float::with_val(prec, Float::with_val(prec, (&yf).pow(j as u32)) * &scale))
            .collect()
    }

    /// `u_j(x) = sum_k g_k(x) C_kj`.
    fn left(&self, x: f64) -> Vec<Float> {
        let prec = self.prec();
        let g = self.weight_values(x);
        let n = self.config.n;
        (0..n)
            .map(|j| {
                let mut acc = Float::with_val(prec, 0);
                for (k, gk) in g.iter().enumerate() {
                    acc += Float::with_val(prec, gk * &self.inverse[k][j]);
                }
                acc
            })
            .collect()
    }

    fn dot(&self, u: &[Float], f: &[Float]) -> f64 {
        let mut acc = Float::with_val(self.prec(), 0);
        for (a, b) in u.iter().zip(f) {
            acc += Float::with_val(self.prec(), a * b);
        }
        acc.to_f64()
    }

    /// `K_n(x, y)`.
    pub fn kernel_eval(&self, x: f64, y: f64) -> Result<f64> {
        self.check_domain(x)?;
        self.check_domain(y)?;
        Ok(self.dot(&self.left(x), &self.monomial_values(y)))
    }

    /// `K_n(x_i, y_j)` for all pairs.
    pub fn kernel_matrix(&self, xs: &[f64], ys: &[f64]) -> Result<Vec<Vec<f64>>> {
        for &z in xs.iter().chain(ys) {
            self.check_domain(z)?;
        }
        let lefts: Vec<Vec<Float>> = xs.par_iter().map(|&x| self.left(x)).collect();
        let rights: Vec<Vec<Float>> = ys.par_iter().map(|&y| self.monomial_values(y)).collect();
        Ok(lefts
            .par_iter()
            .map(|u| rights.iter().map(|f| self.dot(u, f)).collect())
            .collect())
    }

    /// `K_n(x, x)` on a list of points.
    pub fn diagonal(&self, xs: &[f64]) -> Result<Vec<f64>> {
        for &z in xs {
            self.check_domain(z)?;
        }
        Ok(xs
            .par_iter()
            .map(|&x| self.dot(&self.left(x), &self.monomial_values(x)))
            .collect())
    }

    /// One-point density normalised to unit mass, `K_n(x, x) / n`.
    pub fn mean_density(&self, x: f64) -> Result<f64> {
        Ok(self.kernel_eval(x, x)? / self.config.n as f64)
    }

    /// Expected number of eigenvalues in `[lo, hi]`, by double-precision
    /// Gauss–Legendre quadrature of the diagonal.
    pub fn expected_count(&self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo <= hi) {
            return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
        }
        self.check_domain(lo)?;
        self.check_domain(hi)?;
        if lo == hi {
            return Ok(0.0);
        }
        let panels = ((hi - lo) / 0.05).ceil() as usize;
        let rule = CompositeRule::new(lo, hi, panels.max(1), 16);
        let diag = self.diagonal(&rule.nodes)?;
        Ok(diag.iter().zip(&rule.weights).map(|(k, w)| k * w).sum())
    }

    /// Expected count over the whole truncation interval; equals `n`.
    pub fn trace(&self) -> Result<f64> {
        self.expected_count(self.domain.0, self.domain.1)
    }
}

/// Interval outside which every Gram integrand is below `2^{-prec/2}` relative to
/// the peak of its own weight family, found by stepping out from each peak of the
/// log envelope. The two families peak at very different heights, so each gets
/// its own interval and the union is returned.
fn truncation_domain(v: &Potential, config: &OracleConfig) -> Result<(f64, f64)> {
    let n = config.n as f64;
    let deg = 2.0 * (config.n as f64 - 1.0);
    let drop = 0.5 * config.precision_bits as f64 * std::f64::consts::LN_2 + 10.0;
    let mut tilts = Vec::new();
    if config.r < config.n {
        tilts.push(0.0);
    }
    if config.r > 0 {
        tilts.push(config.a);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for tilt in tilts {
        let envelope = |x: f64| deg * x.abs().max(1.0).ln() - n * (v.eval_real(x) - tilt * x);
        let (mut peak_x, mut peak) = (0.0, f64::NEG_INFINITY);
        for k in -4000..=4000 {
            let x = k as f64 * 0.005 * (1.0 + tilt.abs());
            let e = envelope(x);
            if e > peak {
                peak = e;
                peak_x = x;
            }
        }
        if !peak.is_finite() {
            return Err(Error::Domain("weight envelope is not finite".into()));
        }
        let step_out = |dir: f64| -> Result<f64> {
            let mut x = peak_x;
            let mut h = 0.05;
            for _ in 0..10_000 {
                x += dir * h;
                if envelope(x) < peak - drop {
                    return Ok(x);
                }
                h = (h * 1.05).min(1.0);
            }
            Err(Error::Domain("weights do not decay fast enough to truncate".into()))
        };
        lo = lo.min(step_out(-1.0)?);
        hi = hi.max(step_out(1.0)?);
    }
    Ok(((lo * 10.0).floor() / 10.0, (hi * 10.0).ceil() / 10.0))
}

/// Inverse by Gaussian elimination with partial pivoting.
fn invert(m: &[Vec<Float>], prec: u32) -> Result<Vec<Vec<Float>>> {
    let n = m.len();
    let mut a: Vec<Vec<Float>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Float> = row.iter().map(|x| Float::with_val(prec, x)).collect();
            r.extend((0..n).map(|j| Float::with_val(prec, if i == j { 1 } else { 0 })));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].clone().abs().partial_cmp(&a[j][col].clone().abs()).expect("finite"))
            .expect("non-empty");
        if a[pivot][col].is_zero() {
            return Err(Error::RaisePrecision("Gram matrix is numerically singular".into()));
        }
        a.swap(col, pivot);
        let inv = Float::with_val(prec, 1) / &a[col][col];
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[col].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= Float::with_val(prec, &factor * p);
            }
        }
    }
    Ok(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// `max |(G C - I)_ij|` with rows of `G` scaled to unit max-norm, so the
/// residual is independent of the overall size of the moments.
fn inverse_residual(g: &[Vec<Float>], c: &[Vec<Float>], prec: u32) -> f64 {
    let n = g.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let scale = g[i].iter().map(|x| x.clone().abs()).fold(Float::with_val(prec, 0), |m, x| if x > m { x } else { m });
        for j in 0..n {
            let mut acc = Float::with_val(prec, 0);
            for k in 0..n {
                acc += Float::with_val(prec, &g[i][k] * &c[k][j]);
            }
            acc /= &scale;
            if i == j {
                acc -= Float::with_val(prec, 1) / &scale;
            }
            worst = worst.max(acc.to_f64().abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn gaussian(n: usize, r: usize, a: f64) -> OracleKernel {
        OracleKernel::build(&Potential::gaussian(), OracleConfig::new(n, r, a)).unwrap()
    }

    #[test]
    fn one_by_one_gaussian() {
        let k = gaussian(1, 0, 0.0);
        for x in [-1.0, 0.0, 0.7, 2.5] {
            let want = (-x * x / 2.0f64).exp() / (2.0 * PI).sqrt();
            assert_abs_diff_eq!(k.kernel_eval(x, x).unwrap(), want, epsilon = 1e-14);
        }
    }

    #[test]
    fn r0_matches_hermite_kernel() {
        // For V = x^2/2 and r = 0 the kernel is the Christoffel–Darboux sum of the
        // Hermite functions with weight exp(-n x^2/2).
        let n = 6;
        let k = gaussian(n, 0, 0.0);
        let ctx = crate::gue_kernel::GueKernelContext::new(n).unwrap();
        for (x, y) in [(0.3, -0.4), (1.2, 1.2), (-1.9, 0.5)] {
            let phi_x = ctx.orthonormal(x);
            let phi_y = ctx.orthonormal(y);
            let sym: f64 = (0..n).map(|j| phi_x[j] * phi_y[j]).sum();
            // standard gauge kernel = e^{-n x^2/4} * sym * e^{n y^2/4}
            let want = sym * (-(n as f64) * (x * x - y * y) / 4.0).exp();
            assert_abs_diff_eq!(k.kernel_eval(x, y).unwrap(), want, epsilon = 1e-12);
        }
    }

    #[test]
    fn trace_and_positivity() {
        for (n, r, a) in [(8, 0, 0.0), (8, 1, 2.0), (10, 2, 1.5)] {
            let k = gaussian(n, r, a);
            assert_abs_diff_eq!(k.trace().unwrap(), n as f64, epsilon = 1e-10);
            let (lo, hi) = k.domain();
            let xs: Vec<f64> = (0..=200).map(|i| (lo + (hi - lo) * i as f64 / 200.0).min(hi)).collect();
            assert!(k.diagonal(&xs).unwrap().iter().all(|&d| d >= -1e-14));
        }
    }

    #[test]
    fn gauges_agree_on_diagonal_and_differ_off_it() {
        let v = Potential::gaussian();
        let s = OracleKernel::build(&v, OracleConfig::new(10, 1, 2.0)).unwrap();
        let t = OracleKernel::build(&v, OracleConfig::new(10, 1, 2.0).gauge(Gauge::Symmetric)).unwrap();
        for x in [-1.0, 0.2, 2.4] {
            assert_abs_diff_eq!(s.mean_density(x).unwrap(), t.mean_density(x).unwrap(), epsilon = 1e-12);
        }
        let ratio = s.kernel_eval(0.3, 1.1).unwrap() / t.kernel_eval(0.3, 1.1).unwrap();
        let expected = (-10.0 * (0.09 - 1.21) / 4.0f64).exp();
        assert_abs_diff_eq!(ratio, expected, epsilon = 1e-10 * expected);
    }

    #[test]
    fn guards() {
        let v = Potential::gaussian();
        assert!(OracleKernel::build(&v, OracleConfig::new(33, 0, 0.0)).is_err());
        assert!(OracleKernel::build(&v, OracleConfig::new(8, 5, 1.0)).is_err());
        assert!(OracleKernel::build(&v, OracleConfig::new(8, 1, 1.0).precision(128)).is_err());
        let k = gaussian(4, 0, 0.0);
        assert!(matches!(k.kernel_eval(1e3, 0.0), Err(Error::Domain(_))));
    }
}
