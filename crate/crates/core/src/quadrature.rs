//! Quadrature rules in double precision.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..(m + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre rule on `[a, b]` with `panels` equal panels of `m` nodes.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, m: usize) -> Self {
        let (x, w) = gauss_legendre(m);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * m);
        let mut weights = Vec::with_capacity(panels * m);
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(lo + 0.5 * h * (xi + 1.0));
                weights.push(0.5 * h * wi);
            }
        }
        CompositeRule { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `(1/pi) * int_{-1}^{1} f(t) / sqrt(1 - t^2) dt` by the `m`-point Gauss–Chebyshev
/// rule, exact for polynomials of degree `< 2m`.
pub fn chebyshev_mean(m: usize, f: impl Fn(f64) -> f64) -> f64 {
    (0..m)
        .map(|k| f(((k as f64 + 0.5) * PI / m as f64).cos()))
        .sum::<f64>()
        / m as f64
}

// Gauss–Kronrod 7/15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).norm())
}

/// Adaptive Gauss–Kronrod integration of a complex-valued integrand.
///
/// `base` initial panels are refined by bisection of the panel with the
/// largest error estimate until the total estimate falls below
/// `max(abs_tol, rel_tol * |I|)` or the panel budget is spent.
pub fn adaptive(
    f: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    base: usize,
    abs_tol: f64,
    rel_tol: f64,
) -> Complex64 {
    let base = base.max(1);
    let h = (b - a) / base as f64;
    let mut panels: Vec<(f64, f64, Complex64, f64)> = (0..base)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = if i + 1 == base { b } else { lo + h };
            let (v, e) = kronrod15(&f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    for _ in 0..4000 {
        let total: Complex64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.norm()) {
            break;
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("at least one panel");
        let (lo, hi, _, _) = panels[idx];
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (v1, e1) = kronrod15(&f, lo, mid);
        let (v2, e2) = kronrod15(&f, mid, hi);
        panels[idx] = (lo, mid, v1, e1);
        panels.push((mid, hi, v2, e2));
    }
    // Summed in position order so the result does not depend on refinement history.
    panels.sort_by(|x, y| x.0.total_cmp(&y.0));
    panels.iter().map(|p| p.2).sum()
}

/// Real-valued convenience wrapper over [`adaptive`].
pub fn adaptive_real(f: impl Fn(f64) -> f64, a: f64, b: f64, base: usize, tol: f64) -> f64 {
    adaptive(|x| Complex64::new(f(x), 0.0), a, b, base, tol, tol).re
}
