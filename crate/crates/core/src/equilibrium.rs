//! Single-band equilibrium measure of a polynomial external field.
//!
//! The measure is `rho(s) = h(s) sqrt((s - alpha)(beta - s)) / (2 pi)` on the band
//! `[alpha, beta]`. Endpoints solve the two moment conditions
//!
//! ```text
//!   int V'(s) / sqrt((s-alpha)(beta-s)) ds           = 0
//!   (1/2pi) int s V'(s) / sqrt((s-alpha)(beta-s)) ds = 1
//! ```
//!
//! and `h` is the Chebyshev average of the difference quotient of `V'`. Under
//! `s = m + w cos(theta)` both are finite Gauss–Chebyshev sums, exact for
//! polynomial `V`.
//!
//! Off the band, `g'(z) = V'(z)/2 - h(z) R(z)/2` with `R = sqrt((z-alpha)(z-beta))`,
//! and `g` follows by integrating `g'` from an endpoint. The direct quadratures of
//! `log(z - s) rho(s)` and its derivatives, adaptive Gauss–Kronrod in `theta`
//! where the square-root endpoint behaviour becomes a smooth `sin^2` factor, fix
//! `l1`, handle points inside the band, and serve as independent checks.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::potential::{Poly, Potential};
use crate::quadrature::{adaptive, chebyshev_mean};

const ENDPOINT_TOL: f64 = 1e-13;
const MAX_NEWTON: usize = 200;
const HOMOTOPY_STEPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub alpha: f64,
    pub beta: f64,
}

impl Band {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && alpha < beta) {
            return Err(Error::Domain(format!("invalid band [{alpha}, {beta}]")));
        }
        Ok(Band { alpha, beta })
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.alpha + self.beta)
    }

    pub fn halfwidth(&self) -> f64 {
        0.5 * (self.beta - self.alpha)
    }

    /// Distance from `z` to the segment `[alpha, beta]`.
    pub fn distance(&self, z: Complex64) -> f64 {
        let x = z.re.clamp(self.alpha, self.beta);
        ((z.re - x).powi(2) + z.im.powi(2)).sqrt()
    }
}

fn node_count(v: &Potential) -> usize {
    v.degree() + 8
}

/// Residuals of the two endpoint conditions at midpoint `m`, half-width `w`.
pub fn endpoint_residuals(v: &Potential, band: Band) -> [f64; 2] {
    residuals(v.poly(), band.midpoint(), band.halfwidth(), node_count(v))
}

fn residuals(v: &Poly, m: f64, w: f64, nodes: usize) -> [f64; 2] {
    let dv = v.derivative();
    let f1 = chebyshev_mean(nodes, |t| dv.eval(m + w * t));
    let f2 = 0.5 * chebyshev_mean(nodes, |t| (m + w * t) * dv.eval(m + w * t)) - 1.0;
    [f1, f2]
}

fn jacobian(v: &Poly, m: f64, w: f64, nodes: usize) -> [[f64; 2]; 2] {
    let dv = v.derivative();
    let d2v = dv.derivative();
    let at = |t: f64| m + w * t;
    [
        [
            chebyshev_mean(nodes, |t| d2v.eval(at(t))),
            chebyshev_mean(nodes, |t| t * d2v.eval(at(t))),
        ],
        [
            0.5 * chebyshev_mean(nodes, |t| dv.eval(at(t)) + at(t) * d2v.eval(at(t))),
            0.5 * chebyshev_mean(nodes, |t| t * dv.eval(at(t)) + at(t) * t * d2v.eval(at(t))),
        ],
    ]
}

/// Damped Newton on the endpoint conditions. Returns `(m, w, iterations)`.
fn newton(v: &Poly, mut m: f64, mut w: f64, nodes: usize, budget: usize) -> Option<(f64, f64, usize)> {
    let norm = |r: [f64; 2]| r[0].abs().max(r[1].abs());
    let mut r = residuals(v, m, w, nodes);
    for it in 0..budget {
        if norm(r) < ENDPOINT_TOL {
            return Some((m, w, it));
        }
        let j = jacobian(v, m, w, nodes);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if !det.is_finite() || det == 0.0 {
            return None;
        }
        let dm = (r[0] * j[1][1] - r[1] * j[0][1]) / det;
        let dw = (j[0][0] * r[1] - j[1][0] * r[0]) / det;
        let mut step = 1.0;
        let current = norm(r);
        loop {
            let (mn, wn) = (m - step * dm, w - step * dw);
            if wn > 0.0 {
                let rn = residuals(v, mn, wn, nodes);
                if norm(rn) < current || step < 1e-3 {
                    m = mn;
                    w = wn;
                    r = rn;
                    break;
                }
            }
            step *= 0.5;
            if step < 1e-6 {
                return None;
            }
        }
    }
    (norm(r) < ENDPOINT_TOL).then_some((m, w, budget))
}

/// Band `[alpha, beta]` of the equilibrium measure.
///
/// Continuation from a quadratic `q (z - z0)^2 / 2`, whose band is known in
/// closed form, to `V` in [`HOMOTOPY_STEPS`] steps, followed by Newton polish.
/// Several quadratics are tried in turn.
pub fn solve_endpoints(v: &Potential) -> Result<Band> {
    let d = v.degree();
    let lead = v.coeffs()[d];
    // Quadratic whose band has the scale of the leading monomial's band.
    let q0 = (2.0 * lead.powf(2.0 / d as f64)).max(1e-6);
    let starts = [q0, 1.0, 0.25 * q0, 4.0 * q0, 1.0 / 16.0, 16.0];
    let nodes = node_count(v);
    for q in starts {
        let start = Poly::new(vec![0.0, 0.0, 0.5 * q]);
        let (mut m, mut w) = (0.0, 2.0 / q.sqrt());
        let mut used = 0;
        let mut ok = true;
        for k in 1..=HOMOTOPY_STEPS {
            let t = k as f64 / HOMOTOPY_STEPS as f64;
            let vt = start.scale(1.0 - t).add(&v.poly().scale(t));
            match newton(&vt, m, w, nodes, MAX_NEWTON - used) {
                Some((mn, wn, it)) => {
                    m = mn;
                    w = wn;
                    used += it;
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Band::new(m - w, m + w);
        }
    }
    Err(Error::NoSingleBand(
        "endpoint Newton iteration did not converge from any homotopy start".into(),
    ))
}

/// Options for the g-function quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadOptions {
    /// Initial number of Gauss–Kronrod panels on `[0, pi]`.
    pub base_panels: usize,
    pub tol: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            base_panels: 4,
            tol: 1e-13,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumMeasure {
    pub band: Band,
    /// Density factor `h`, lowest degree first.
    pub h: Poly,
    pub l1: f64,
    #[serde(skip)]
    potential: Potential,
    #[serde(skip)]
    quad: QuadOptions,
}

/// Solve for the band and build the measure in one go.
pub fn equilibrium(v: &Potential) -> Result<EquilibriumMeasure> {
    let band = solve_endpoints(v)?;
    build_measure(v, band)
}

/// Density factor, multiplier `l1`, and the a posteriori single-band checks.
pub fn build_measure(v: &Potential, band: Band) -> Result<EquilibriumMeasure> {
    build_measure_with(v, band, QuadOptions::default())
}

pub fn build_measure_with(v: &Potential, band: Band, quad: QuadOptions) -> Result<EquilibriumMeasure> {
    let h = density_factor(v, band);
    let scale = h.coeffs().iter().map(|c| c.abs()).fold(0.0, f64::max).max(1e-300);
    let (ha, hb) = (h.eval(band.alpha), h.eval(band.beta));
    if ha <= 1e-10 * scale || hb <= 1e-10 * scale {
        return Err(Error::NonRegular(format!(
            "density factor at endpoints h(alpha) = {ha:.3e}, h(beta) = {hb:.3e}"
        )));
    }
    let samples = 400;
    for i in 1..samples {
        let x = band.alpha + (band.beta - band.alpha) * i as f64 / samples as f64;
        if h.eval(x) < 0.0 {
            return Err(Error::NotSingleBand(format!("density negative at x = {x}")));
        }
    }
    let mut em = EquilibriumMeasure {
        band,
        h,
        l1: 0.0,
        potential: v.clone(),
        quad,
    };
    em.l1 = v.eval_real(band.beta) - 2.0 * em.re_g_quadrature(band.beta);
    em.check_effective_potential()?;
    Ok(em)
}

/// `h(x) = (1/pi) int (V'(s) - V'(x)) / (s - x) ds / sqrt((s-alpha)(beta-s))`.
///
/// With `V'(s) = sum b_k s^k`, the quotient is `sum_k b_k sum_{i<k} s^{k-1-i} x^i`,
/// so the coefficient of `x^i` is `sum_{k>i} b_k M_{k-1-i}` with Chebyshev
/// moments `M_p`.
fn density_factor(v: &Potential, band: Band) -> Poly {
    let dv = v.derivative(1);
    let b = dv.coeffs();
    let (m, w) = (band.midpoint(), band.halfwidth());
    let nodes = node_count(v);
    let moments: Vec<f64> = (0..b.len())
        .map(|p| chebyshev_mean(nodes, |t| (m + w * t).powi(p as i32)))
        .collect();
    let deg = b.len().saturating_sub(1);
    let coeffs = (0..deg.max(1))
        .map(|i| ((i + 1)..b.len()).map(|k| b[k] * moments[k - 1 - i]).sum())
        .collect();
    Poly::new(coeffs)
}

impl EquilibriumMeasure {
    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn with_quadrature(&self, quad: QuadOptions) -> Self {
        let mut em = self.clone();
        em.quad = quad;
        em
    }

    pub fn density(&self, x: f64) -> f64 {
        let (a, b) = (self.band.alpha, self.band.beta);
        if x <= a || x >= b {
            return 0.0;
        }
        self.h.eval(x) * ((x - a) * (b - x)).sqrt() / (2.0 * PI)
    }

    /// Total mass, by Chebyshev quadrature in `theta` (exact for polynomial `h`).
    pub fn mass(&self) -> f64 {
        let (m, w) = (self.band.midpoint(), self.band.halfwidth());
        let n = self.h.degree() + 8;
        // rho(s) ds = h(s) w^2 sin^2(theta) dtheta / (2 pi), and
        // int_0^pi f sin^2 = pi * mean over Chebyshev nodes of f (1 - t^2).
        0.5 * w * w * chebyshev_mean(n, |t| self.h.eval(m + w * t) * (1.0 - t * t))
    }

    /// `int F(z, s) rho(s) ds` over `theta` in `[lo, hi]`.
    fn integrate(&self, lo: f64, hi: f64, f: impl Fn(f64) -> Complex64) -> Complex64 {
        let (m, w) = (self.band.midpoint(), self.band.halfwidth());
        let pref = w * w / (2.0 * PI);
        let panels = ((self.quad.base_panels as f64) * (hi - lo) / PI).ceil().max(1.0) as usize;
        adaptive(
            |th| {
                let s = m + w * th.cos();
                let st = th.sin();
                f(s) * (pref * self.h.eval(s) * st * st)
            },
            lo,
            hi,
            panels,
            self.quad.tol,
            self.quad.tol,
        )
    }

    /// Principal-branch `g(z)`; refuses points on the cut `(-inf, beta]`.
    ///
    /// Integrates the algebraic `g'` along the segment from `beta`, starting from
    /// `g(beta) = (V(beta) - l1)/2`. The substitution `w = beta + (z - beta) s^2`
    /// absorbs the square-root behaviour of `g'` at the endpoint.
    pub fn g(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 && z.re <= self.band.beta {
            return Err(Error::OnBranchCut(z.re));
        }
        Ok(self.g_from_edge(self.band.beta, z))
    }

    /// `g(z)` by direct quadrature of `log(z - s) rho(s)`; kept as an independent
    /// check on [`EquilibriumMeasure::g`].
    pub fn g_quadrature(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 && z.re <= self.band.beta {
            return Err(Error::OnBranchCut(z.re));
        }
        Ok(self.integrate(0.0, PI, |s| (z - s).ln()))
    }

    /// `Re g` at the endpoint `edge` is `(V(edge) - l1)/2`; add `int_edge^z g'`.
    fn g_from_edge(&self, edge: f64, z: Complex64) -> Complex64 {
        let start = 0.5 * (self.potential.eval_real(edge) - self.l1);
        let d = z - edge;
        let integral = adaptive(
            |s| self.g_prime_algebraic(edge + d * (s * s)) * (2.0 * s) * d,
            0.0,
            1.0,
            2,
            1e-14,
            1e-13,
        );
        start + integral
    }

    /// `Re g(x)` on the real axis, defined everywhere including the band.
    pub fn re_g(&self, x: f64) -> f64 {
        let (m, w) = (self.band.midpoint(), self.band.halfwidth());
        if x >= self.band.beta {
            return self.g_from_edge(self.band.beta, Complex64::new(x, 0.0)).re;
        }
        if x <= self.band.alpha {
            return self.g_from_edge(self.band.alpha, Complex64::new(x, 0.0)).re;
        }
        let f = |s: f64| Complex64::new((x - s).abs().ln(), 0.0);
        let th0 = ((x - m) / w).clamp(-1.0, 1.0).acos();
        (self.integrate(0.0, th0, f) + self.integrate(th0, PI, f)).re
    }

    /// `Re g(x)` by quadrature for every `x`; used to fix `l1`.
    fn re_g_quadrature(&self, x: f64) -> f64 {
        let (m, w) = (self.band.midpoint(), self.band.halfwidth());
        let f = |s: f64| Complex64::new((x - s).abs().ln(), 0.0);
        if x > self.band.alpha && x < self.band.beta {
            let th0 = ((x - m) / w).clamp(-1.0, 1.0).acos();
            (self.integrate(0.0, th0, f) + self.integrate(th0, PI, f)).re
        } else {
            self.integrate(0.0, PI, f).re
        }
    }

    fn check_off_support(&self, z: Complex64) -> Result<()> {
        if self.band.distance(z) < 1e-12 {
            return Err(Error::TooCloseToSupport(z.re));
        }
        Ok(())
    }

    /// `g'(z) = int rho(s) / (z - s) ds`, evaluated algebraically.
    pub fn g_prime(&self, z: Complex64) -> Result<Complex64> {
        self.check_off_support(z)?;
        Ok(self.g_prime_algebraic(z))
    }

    /// `g'(z)` by quadrature of the Cauchy transform.
    pub fn g_prime_quadrature(&self, z: Complex64) -> Result<Complex64> {
        self.check_off_support(z)?;
        Ok(self.integrate(0.0, PI, |s| (z - s).inv()))
    }

    /// `g'(beta)`. With `s = m + w cos(theta)` the integrand `rho(s) / (beta - s)`
    /// becomes `h(s) w (1 + cos theta) / (2 pi)`, a polynomial in `cos(theta)`, so
    /// Gauss–Chebyshev quadrature is exact.
    pub fn g_prime_at_beta(&self) -> f64 {
        let (m, w) = (self.band.midpoint(), self.band.halfwidth());
        let n = self.h.degree() + 8;
        0.5 * w * chebyshev_mean(n, |t| self.h.eval(m + w * t) * (1.0 + t))
    }

    /// `g''(z) = V''(z)/2 - (h'(z) R(z) + h(z) R'(z))/2` with `R' = (z - m)/R`.
    pub fn g_second(&self, z: Complex64) -> Result<Complex64> {
        self.check_off_support(z)?;
        let r = self.r_branch(z);
        let u = z - self.band.midpoint();
        Ok(0.5 * self.potential.derivative(2).eval_complex(z)
            - 0.5 * (self.h.derivative().eval_complex(z) * r + self.h.eval_complex(z) * u / r))
    }

    /// `g''(z) = -int rho(s) / (z - s)^2 ds` by quadrature.
    pub fn g_second_quadrature(&self, z: Complex64) -> Result<Complex64> {
        self.check_off_support(z)?;
        Ok(-self.integrate(0.0, PI, |s| ((z - s) * (z - s)).inv()))
    }

    /// Real-axis convenience for `g'`.
    pub fn g_prime_real(&self, x: f64) -> Result<f64> {
        self.g_prime(Complex64::new(x, 0.0)).map(|v| v.re)
    }

    pub fn g_second_real(&self, x: f64) -> Result<f64> {
        self.g_second(Complex64::new(x, 0.0)).map(|v| v.re)
    }

    /// `R(z) = sqrt((z - alpha)(z - beta))`, analytic off the band, `~ z` at infinity.
    fn r_branch(&self, z: Complex64) -> Complex64 {
        let (m, w) = (self.band.midpoint(), self.band.halfwidth());
        let u = z - m;
        u * (Complex64::new(1.0, 0.0) - (w * w) / (u * u)).sqrt()
    }

    /// `g'(z) = V'(z)/2 - h(z) R(z)/2`.
    pub fn g_prime_algebraic(&self, z: Complex64) -> Complex64 {
        0.5 * self.potential.derivative(1).eval_complex(z) - 0.5 * self.h.eval_complex(z) * self.r_branch(z)
    }

    /// `Re P1(x) = -V(x) + 2 Re g(x) + l1`.
    pub fn re_p1(&self, x: f64) -> f64 {
        -self.potential.eval_real(x) + 2.0 * self.re_g(x) + self.l1
    }

    /// `Re P1 < 0` off the band, sampled out to distance 10.
    fn check_effective_potential(&self) -> Result<()> {
        let w = self.band.halfwidth();
        for k in 0..120 {
            let delta = 1e-3 * w * (10.0 / (1e-3 * w)).powf(k as f64 / 119.0);
            for x in [self.band.beta + delta, self.band.alpha - delta] {
                let p1 = self.re_p1(x);
                if p1 >= 0.0 {
                    return Err(Error::NotSingleBand(format!(
                        "effective potential Re P1({x}) = {p1:.3e} is not negative off the band"
                    )));
                }
            }
        }
        Ok(())
    }
}
