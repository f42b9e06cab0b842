//! Effective potentials, outlier points and the regime classifier.
//!
//! With `g` and `l1` from the equilibrium measure,
//!
//! ```text
//!   P1 = -V + 2g + l1
//!   P2 = -V + a z + g + l2
//!   P3 = P2 - P1 = a z - g - l1 + l2
//! ```
//!
//! `a_c = V'(beta)/2 = g'(beta)` separates the sub- and supercritical sides;
//! `b*` minimises `P3` beyond the band when `a < a_c`, and `a*` is the global
//! maximiser of `P2` to the right of `max(beta, b*)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::equilibrium::EquilibriumMeasure;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Half-width of the band around `a_c` reported as [`Regime::Critical`], relative to `max(1, a_c)`.
pub const CRITICAL_BAND: f64 = 1e-8;
/// Two maxima of `P2` closer than this in value signal a jumping outlier.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Supercritical,
    Subcritical,
    Critical,
    JumpingOutlier,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Supercritical => "Supercritical",
            Regime::Subcritical => "Subcritical",
            Regime::Critical => "Critical",
            Regime::JumpingOutlier => "JumpingOutlier",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    P1,
    P2,
    P3,
}

/// `a_c = V'(beta)/2`, cross-checked against a quadrature of `g'(beta+)`.
pub fn critical_a(em: &EquilibriumMeasure) -> Result<f64> {
    let beta = em.band.beta;
    let a_c = 0.5 * em.potential().derivative(1).eval(beta);
    let gp = g_prime_at_edge(em);
    let diff = (a_c - gp).abs();
    if diff > 1e-6 {
        return Err(Error::EquilibriumInconsistency(format!(
            "V'(beta)/2 = {a_c} but g'(beta) = {gp}"
        )));
    }
    Ok(a_c)
}

/// `g'(beta) = int rho(s) / (beta - s) ds`; the integrand stays bounded because
/// `rho` vanishes like a square root at `beta`.
pub fn g_prime_at_edge(em: &EquilibriumMeasure) -> f64 {
    em.g_prime_at_beta()
}

/// `P_which(z)` for explicit `a`, `l2`.
pub fn eval_p(em: &EquilibriumMeasure, a: f64, l2: f64, which: Which, z: Complex64) -> Result<Complex64> {
    let v = em.potential().eval(z);
    let g = em.g(z)?;
    let p1 = -v + 2.0 * g + em.l1;
    let p2 = -v + a * z + g + l2;
    Ok(match which {
        Which::P1 => p1,
        Which::P2 => p2,
        Which::P3 => a * z - g - em.l1 + l2,
    })
}

/// Real part of `P_which` on the real axis, band included.
pub fn re_p(em: &EquilibriumMeasure, a: f64, l2: f64, which: Which, x: f64) -> f64 {
    let v = em.potential().eval_real(x);
    let g = em.re_g(x);
    match which {
        Which::P1 => -v + 2.0 * g + em.l1,
        Which::P2 => -v + a * x + g + l2,
        Which::P3 => a * x - g - em.l1 + l2,
    }
}

/// `P2'(x) = -V'(x) + a + g'(x)` for real `x > beta`.
fn p2_prime(em: &EquilibriumMeasure, a: f64, x: f64) -> Result<f64> {
    Ok(-em.potential().derivative(1).eval(x) + a + em.g_prime_real(x)?)
}

fn p2_second(em: &EquilibriumMeasure, x: f64) -> Result<f64> {
    Ok(-em.potential().derivative(2).eval(x) + em.g_second_real(x)?)
}

/// Unique root of `g'(z) = a` on `(beta, inf)`.
pub fn find_b_star(em: &EquilibriumMeasure, a: f64) -> Result<f64> {
    if a <= 0.0 {
        return Err(Error::Domain(format!("source strength must be positive, got {a}")));
    }
    let a_c = critical_a(em)?;
    if a >= a_c {
        return Err(Error::BStarUndefined { a, a_c });
    }
    let beta = em.band.beta;
    let f = |z: f64| em.g_prime_real(z).map(|g| g - a);
    let mut lo = beta + 1e-12 * (1.0 + beta.abs());
    if f(lo)? <= 0.0 {
        return Err(Error::BStarUndefined { a, a_c });
    }
    let mut hi = beta + 1.0;
    while f(hi)? > 0.0 {
        lo = hi;
        hi = beta + 2.0 * (hi - beta);
        if hi - beta > 1e12 {
            return Err(Error::Convergence("could not bracket b*".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-6 * (hi - beta) {
            break;
        }
    }
    let mut z = 0.5 * (lo + hi);
    for _ in 0..50 {
        let step = f(z)? / em.g_second_real(z)?;
        let next = (z - step).clamp(lo, hi);
        let done = (next - z).abs() < 1e-13 * (1.0 + z.abs());
        z = next;
        if done {
            break;
        }
    }
    Ok(z)
}

/// Right end of the search window: beyond it `V' > a + a_c + 1`, so
/// `P2' = -V' + a + g' < -1` there because `0 < g' <= a_c` past the band.
pub fn search_limit(em: &EquilibriumMeasure, a: f64, a_c: f64) -> f64 {
    let dv = em.potential().derivative(1);
    let shifted = dv.add(&crate::potential::Poly::new(vec![-(a + a_c + 1.0)]));
    let last = shifted.real_roots().into_iter().fold(f64::NEG_INFINITY, f64::max);
    last.max(em.band.beta) + 1.0
}

/// A local maximum of `P2` on the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P2Max {
    pub x: f64,
    /// `P2` at `x` with `l2 = 0`.
    pub value: f64,
}

/// Local maxima of `P2` on `(lo, x_max]`, ascending in position.
///
/// Sign changes of `P2'` are isolated on a geometric grid anchored at `lo`
/// and polished by bisection then Newton.
pub fn p2_local_maxima(em: &EquilibriumMeasure, a: f64, lo: f64, x_max: f64) -> Result<Vec<P2Max>> {
    let span = x_max - lo;
    if !(span > 0.0) {
        return Ok(Vec::new());
    }
    let first = 1e-9 * (1.0 + span);
    let count = 600;
    let ratio = (span / first).powf(1.0 / count as f64);
    let grid: Vec<f64> = std::iter::once(lo + 1e-12 * (1.0 + lo.abs()))
        .chain((0..=count).map(|k| lo + first * ratio.powi(k as i32)))
        .map(|x| x.min(x_max))
        .collect();
    let mut values = Vec::with_capacity(grid.len());
    for &x in &grid {
        values.push(p2_prime(em, a, x)?);
    }
    let mut maxima = Vec::new();
    for i in 0..grid.len() - 1 {
        let (x0, x1) = (grid[i], grid[i + 1]);
        let (f0, f1) = (values[i], values[i + 1]);
        if f0 > 0.0 && f1 <= 0.0 {
            let x = polish_root(|x| p2_prime(em, a, x), |x| p2_second(em, x), x0, x1)?;
            let value = re_p(em, a, 0.0, Which::P2, x);
            maxima.push(P2Max { x, value });
        }
    }
    Ok(maxima)
}

fn polish_root(
    f: impl Fn(f64) -> Result<f64>,
    df: impl Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
) -> Result<f64> {
    let flo = f(lo)?;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if (f(mid)? > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-9 * (1.0 + hi.abs()) {
            break;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..50 {
        let d = df(x)?;
        if d == 0.0 {
            break;
        }
        let next = x - f(x)? / d;
        if !(next > lo - 1e-6 && next < hi + 1e-6) {
            break;
        }
        let done = (next - x).abs() < 1e-14 * (1.0 + x.abs());
        x = next;
        if done {
            break;
        }
    }
    Ok(x)
}

/// Outlier candidate `a*` and whether the global maximum of `P2` is unique.
pub fn find_a_star(em: &EquilibriumMeasure, a: f64) -> Result<(f64, bool)> {
    let a_c = critical_a(em)?;
    let lo = if a < a_c { find_b_star(em, a)? } else { em.band.beta };
    let x_max = search_limit(em, a, a_c);
    let maxima = p2_local_maxima(em, a, lo, x_max)?;
    global_max(&maxima)
        .map(|(m, unique)| (m.x, unique))
        .ok_or_else(|| Error::NoInteriorMaximum(format!("no critical point of P2 on ({lo}, {x_max}]")))
}

fn global_max(maxima: &[P2Max]) -> Option<(P2Max, bool)> {
    let best = maxima.iter().copied().max_by(|p, q| p.value.total_cmp(&q.value))?;
    let ties = maxima.iter().filter(|m| (m.value - best.value).abs() <= TIE_TOL).count();
    Some((best, ties == 1))
}

/// `l2` fixing `P2(a*) = 0` (supercritical) or `P3(b*) = 0` (subcritical).
pub fn fix_l2(em: &EquilibriumMeasure, a: f64, regime: Regime, point: f64) -> f64 {
    match regime {
        Regime::Subcritical => em.l1 - (a * point - em.re_g(point)),
        _ => -(-em.potential().eval_real(point) + a * point + em.re_g(point)),
    }
}

/// `c = V''(a*) - g''(a*)`, the curvature of `-P2` at its maximum.
pub fn curvature(em: &EquilibriumMeasure, a_star: f64) -> Result<f64> {
    let c = em.potential().derivative(2).eval(a_star) - em.g_second_real(a_star)?;
    if c <= 1e-10 {
        return Err(Error::DegenerateMaximum(c));
    }
    Ok(c)
}

/// Classified landscape for one source strength.
#[derive(Debug, Clone, Serialize)]
pub struct Landscape {
    pub a: f64,
    pub a_c: f64,
    pub regime: Regime,
    pub a_star: Option<f64>,
    pub b_star: Option<f64>,
    pub curvature_c: Option<f64>,
    pub l2: f64,
    /// Subcritical only: radius of the disk around `b*` on whose boundary
    /// `Re P2 < 0` was verified.
    pub disk_radius: Option<f64>,
    /// Right end of the numerically scanned window.
    pub x_max: f64,
    #[serde(skip)]
    pub em: EquilibriumMeasure,
}

/// Regime classification for `a > 0`.
pub fn classify(em: &EquilibriumMeasure, a: f64) -> Result<Landscape> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "source strength must be positive (reflect V for a < 0), got {a}"
        )));
    }
    let a_c = critical_a(em)?;
    let beta = em.band.beta;
    let x_max = search_limit(em, a, a_c);
    let mut out = Landscape {
        a,
        a_c,
        regime: Regime::Critical,
        a_star: None,
        b_star: None,
        curvature_c: None,
        l2: 0.0,
        disk_radius: None,
        x_max,
        em: em.clone(),
    };

    if (a - a_c).abs() < CRITICAL_BAND * a_c.max(1.0) {
        out.l2 = fix_l2(em, a, Regime::Critical, beta);
        return Ok(out);
    }

    if a > a_c {
        let maxima = p2_local_maxima(em, a, beta, x_max)?;
        let (best, unique) = global_max(&maxima).ok_or_else(|| {
            Error::NoInteriorMaximum(format!("P2' has no sign change on ({beta}, {x_max}]"))
        })?;
        out.a_star = Some(best.x);
        out.l2 = -best.value;
        if unique {
            out.regime = Regime::Supercritical;
            out.curvature_c = Some(curvature(em, best.x)?);
        } else {
            out.regime = Regime::JumpingOutlier;
        }
        return Ok(out);
    }

    let b_star = find_b_star(em, a)?;
    out.b_star = Some(b_star);
    // With l2 = 0: threshold P3(b*) and the supremum of P2 on [b*, x_max].
    let p3_b = a * b_star - em.re_g(b_star) - em.l1;
    // Past x_max P2 is decreasing, so the window can be empty when b* lies beyond it.
    let hi = x_max.max(b_star);
    let maxima = p2_local_maxima(em, a, b_star, hi)?;
    let grid_sup = (0..=1000)
        .map(|k| b_star + (hi - b_star) * k as f64 / 1000.0)
        .map(|x| re_p(em, a, 0.0, Which::P2, x))
        .fold(f64::NEG_INFINITY, f64::max);
    let sup = maxima.iter().map(|m| m.value).fold(grid_sup, f64::max);

    if sup < p3_b - TIE_TOL {
        out.regime = Regime::Subcritical;
        out.l2 = fix_l2(em, a, Regime::Subcritical, b_star);
        out.disk_radius = Some(certified_radius(&out)?);
        return Ok(out);
    }
    let (best, unique) = global_max(&maxima).ok_or_else(|| {
        Error::NoInteriorMaximum("P2 exceeds P3(b*) without an interior maximum".into())
    })?;
    out.a_star = Some(best.x);
    out.l2 = -best.value;
    if unique && best.value > p3_b + TIE_TOL {
        out.regime = Regime::Supercritical;
        out.curvature_c = Some(curvature(em, best.x)?);
    } else {
        out.regime = Regime::JumpingOutlier;
    }
    Ok(out)
}

/// Largest radius `R <= (b* - beta)/2` with `Re P2 < 0` on the circle `|z - b*| = R`;
/// harmonicity of `Re P2` off the band extends the bound to the whole disk.
fn certified_radius(l: &Landscape) -> Result<f64> {
    let b = l.b_star.expect("subcritical landscape has b*");
    let cap = 0.5 * (b - l.em.band.beta);
    let steps = 40;
    for k in 0..steps {
        let r = cap * (1.0 - k as f64 / steps as f64);
        let mut ok = true;
        for j in 0..64 {
            let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / 64.0;
            let z = Complex64::new(b, 0.0) + Complex64::from_polar(r, phi);
            if eval_p(&l.em, l.a, l.l2, Which::P2, z)?.re >= 0.0 {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(r);
        }
    }
    Err(Error::NoInteriorMaximum("Re P2 is not negative on any disk around b*".into()))
}

impl Landscape {
    pub fn p(&self, which: Which, z: Complex64) -> Result<Complex64> {
        eval_p(&self.em, self.a, self.l2, which, z)
    }

    pub fn re_p(&self, which: Which, x: f64) -> f64 {
        re_p(&self.em, self.a, self.l2, which, x)
    }

    fn require(&self, regime: Regime) -> Result<()> {
        if self.regime != regime {
            return Err(Error::PredictionRefused(format!(
                "landscape is {}, operation needs {}",
                self.regime, regime
            )));
        }
        Ok(())
    }

    /// `P2(z)` relative to `a*`, as `u * int_0^1 P2'(a* + t u) dt` along the segment.
    fn p2_from_a_star(&self, z: Complex64) -> Result<Complex64> {
        let a_star = self.a_star.expect("supercritical landscape has a*");
        let dv = self.em.potential().derivative(1);
        segment_integral(a_star, z, |w| {
            Ok(-dv.eval_complex(w) + self.a + self.em.g_prime(w)?)
        })
    }

    /// `P3(z)` relative to `b*`.
    fn p3_from_b_star(&self, z: Complex64) -> Result<Complex64> {
        let b_star = self.b_star.expect("subcritical landscape has b*");
        segment_integral(b_star, z, |w| Ok(self.a - self.em.g_prime(w)?))
    }

    fn check_chart_point(&self, center: f64, z: Complex64) -> Result<()> {
        if z.im == 0.0 && z.re <= self.em.band.beta {
            return Err(Error::OutsideChart(format!("z = {z} lies on the cut")));
        }
        if (z - center).norm() >= (center - self.em.band.beta) {
            return Err(Error::OutsideChart(format!("z = {z} is too far from {center}")));
        }
        Ok(())
    }

    /// `rho(z) = sqrt(-2 P2(z))` with `rho'(a*) = sqrt(c) > 0`.
    pub fn rho_super(&self, z: Complex64) -> Result<Complex64> {
        self.require(Regime::Supercritical)?;
        let a_star = self.a_star.expect("a*");
        let c = self.curvature_c.expect("c");
        self.check_chart_point(a_star, z)?;
        let u = z - a_star;
        if u.norm() < 1e-7 * (1.0 + a_star.abs()) {
            return Ok(u * c.sqrt());
        }
        let p2 = self.p2_from_a_star(z)?;
        if z.im == 0.0 && p2.re >= 0.0 {
            return Err(Error::OutsideChart(format!("Re P2({z}) = {} is not negative", p2.re)));
        }
        let ratio = -2.0 * p2 / (u * u);
        if ratio.re <= 0.0 {
            return Err(Error::OutsideChart(format!("local coordinate degenerates at {z}")));
        }
        Ok(u * ratio.sqrt())
    }

    /// Local coordinate near `a*`: `zeta = rho(z) / sqrt(kappa)`, `kappa = r/n`, centred at 0.
    pub fn to_local_super(&self, n: usize, r: usize, z: Complex64) -> Result<Complex64> {
        let kappa = kappa(n, r)?;
        Ok(self.rho_super(z)? / kappa.sqrt())
    }

    /// Inverse of [`Landscape::to_local_super`] by Newton iteration.
    pub fn from_local_super(&self, n: usize, r: usize, zeta: Complex64) -> Result<Complex64> {
        self.require(Regime::Supercritical)?;
        let kappa = kappa(n, r)?;
        let a_star = self.a_star.expect("a*");
        let c = self.curvature_c.expect("c");
        let target = zeta * kappa.sqrt();
        let dv = self.em.potential().derivative(1);
        let mut z = Complex64::new(a_star, 0.0) + target / c.sqrt();
        for _ in 0..100 {
            let rho = self.rho_super(z)?;
            let d = if rho.norm() < 1e-12 {
                Complex64::new(c.sqrt(), 0.0)
            } else {
                let p2p = -dv.eval_complex(z) + self.a + self.em.g_prime(z)?;
                -p2p / rho
            };
            let step = (rho - target) / d;
            z -= step;
            if step.norm() < 1e-15 * (1.0 + z.norm()) {
                break;
            }
        }
        if zeta.im == 0.0 {
            z.im = 0.0;
        }
        Ok(z)
    }

    /// `rho(z) = sqrt(2 P3(z))` near `b*` with `rho'(b*) > 0`.
    pub fn rho_sub(&self, z: Complex64) -> Result<Complex64> {
        self.require(Regime::Subcritical)?;
        let b_star = self.b_star.expect("b*");
        self.check_chart_point(b_star, z)?;
        let u = z - b_star;
        let p3pp = -self.em.g_second(Complex64::new(b_star, 0.0))?.re;
        if u.norm() < 1e-7 * (1.0 + b_star.abs()) {
            return Ok(u * p3pp.sqrt());
        }
        let p3 = self.p3_from_b_star(z)?;
        let ratio = 2.0 * p3 / (u * u);
        if ratio.re <= 0.0 {
            return Err(Error::OutsideChart(format!("local coordinate degenerates at {z}")));
        }
        Ok(u * ratio.sqrt())
    }

    /// Local coordinate near `b*`: `zeta = rho(z) / (i sqrt(kappa))`.
    pub fn to_local_sub(&self, n: usize, r: usize, z: Complex64) -> Result<Complex64> {
        let kappa = kappa(n, r)?;
        Ok(self.rho_sub(z)? / Complex64::new(0.0, kappa.sqrt()))
    }
}

/// `kappa = r / n`, required in `(0, 1/4)`.
pub fn kappa(n: usize, r: usize) -> Result<f64> {
    if r == 0 || n == 0 || 4 * r >= n {
        return Err(Error::InvalidArgument(format!(
            "need 0 < r < n/4 for the local coordinate, got n = {n}, r = {r}"
        )));
    }
    Ok(r as f64 / n as f64)
}

/// `(z - z0) * int_0^1 f(z0 + t (z - z0)) dt` by 24-point Gauss–Legendre.
fn segment_integral(
    z0: f64,
    z: Complex64,
    f: impl Fn(Complex64) -> Result<Complex64>,
) -> Result<Complex64> {
    let (x, w) = gauss_legendre(24);
    let u = z - z0;
    let mut acc = Complex64::new(0.0, 0.0);
    for (xi, wi) in x.iter().zip(&w) {
        let t = 0.5 * (xi + 1.0);
        acc += f(z0 + t * u)? * (0.5 * wi);
    }
    Ok(acc * u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::equilibrium;
    use crate::potential::Potential;
    use approx::assert_abs_diff_eq;

    fn gauss() -> EquilibriumMeasure {
        equilibrium(&Potential::gaussian()).unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn critical_values() {
        assert_abs_diff_eq!(critical_a(&gauss()).unwrap(), 1.0, epsilon = 1e-12);
        let q = equilibrium(&Potential::new(vec![0.0, 0.0, 0.0, 0.0, 0.25]).unwrap()).unwrap();
        let expected = 0.5 * (16.0f64 / 3.0).powf(0.75);
        assert_abs_diff_eq!(critical_a(&q).unwrap(), expected, epsilon = 1e-10);
        assert_abs_diff_eq!(g_prime_at_edge(&q), expected, epsilon = 1e-8);
    }

    #[test]
    fn b_star_closed_form() {
        let em = gauss();
        for a in [0.5, 0.8, 0.3] {
            assert_abs_diff_eq!(find_b_star(&em, a).unwrap(), a + 1.0 / a, epsilon = 1e-10);
        }
        assert!(matches!(find_b_star(&em, 1.2), Err(Error::BStarUndefined { .. })));
        assert!(matches!(find_b_star(&em, 0.0), Err(Error::Domain(_))));
        let near = find_b_star(&em, 0.999).unwrap();
        assert!(near > 2.0 && near < 2.01);
    }

    #[test]
    fn a_star_closed_form() {
        let em = gauss();
        for a in [2.0, 3.0, 1.5] {
            let (x, unique) = find_a_star(&em, a).unwrap();
            assert!(unique);
            assert_abs_diff_eq!(x, a + 1.0 / a, epsilon = 1e-10);
        }
    }

    #[test]
    fn l2_normalisations() {
        let em = gauss();
        let sup = classify(&em, 2.0).unwrap();
        assert_abs_diff_eq!(sup.re_p(Which::P2, sup.a_star.unwrap()), 0.0, epsilon = 1e-12);
        let sub = classify(&em, 0.5).unwrap();
        assert_abs_diff_eq!(sub.re_p(Which::P3, sub.b_star.unwrap()), 0.0, epsilon = 1e-12);
        let delta = 0.37;
        let x = 2.9;
        let shifted = re_p(&em, 2.0, sup.l2 + delta, Which::P2, x);
        assert_abs_diff_eq!(shifted - sup.re_p(Which::P2, x), delta, epsilon = 1e-14);
    }

    #[test]
    fn curvature_closed_form() {
        let em = gauss();
        assert_abs_diff_eq!(curvature(&em, 2.5).unwrap(), 4.0 / 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(curvature(&em, 3.0 + 1.0 / 3.0).unwrap(), 9.0 / 8.0, epsilon = 1e-10);
        let shifted = equilibrium(&Potential::gaussian().translate(0.6)).unwrap();
        let l = classify(&shifted, 2.0).unwrap();
        assert_abs_diff_eq!(l.curvature_c.unwrap(), 4.0 / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(l.a_star.unwrap(), 3.1, epsilon = 1e-9);
    }

    #[test]
    fn classify_examples() {
        let em = gauss();
        assert_eq!(classify(&em, 2.0).unwrap().regime, Regime::Supercritical);
        assert_eq!(classify(&em, 0.5).unwrap().regime, Regime::Subcritical);
        assert_eq!(classify(&em, 1.0).unwrap().regime, Regime::Critical);
        assert!(classify(&em, -1.0).is_err());
        assert!(classify(&em, 0.0).is_err());
    }

    #[test]
    fn p_identities() {
        let em = gauss();
        let l = classify(&em, 2.0).unwrap();
        for k in 0..50 {
            let z = Complex64::new(-3.0 + 0.13 * k as f64, 0.05 + 0.07 * (k % 7) as f64);
            let p1 = l.p(Which::P1, z).unwrap();
            let p2 = l.p(Which::P2, z).unwrap();
            let p3 = l.p(Which::P3, z).unwrap();
            assert!((p3 - (p2 - p1)).norm() < 1e-12);
        }
        // band condition Re P1 = 0 at x = 0
        assert_abs_diff_eq!(l.re_p(Which::P1, 0.0), 0.0, epsilon = 1e-12);
        // stationarity of P2 at a* = 2.5 for a = 2
        assert_abs_diff_eq!(p2_prime(&em, 2.0, 2.5).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn local_chart_super() {
        let l = classify(&gauss(), 2.0).unwrap();
        assert_eq!(l.to_local_super(400, 1, c(2.5)).unwrap(), c(0.0));
        let zeta = l.to_local_super(400, 1, c(2.55)).unwrap();
        let lin = (4.0f64 / 3.0 * 400.0).sqrt() * 0.05;
        assert!((zeta.re - lin).abs() < 0.05 * lin, "{zeta}");
        assert!(zeta.im.abs() < 1e-14);
        for k in 0..20 {
            let z = Complex64::new(2.5 + 0.3 * ((k as f64) / 19.0 - 0.5), 0.02 * (k % 5) as f64 - 0.04);
            let zeta = l.to_local_super(400, 2, z).unwrap();
            let back = l.from_local_super(400, 2, zeta).unwrap();
            assert!((back - z).norm() < 1e-10, "{z} -> {zeta} -> {back}");
        }
        assert!(matches!(l.to_local_super(400, 1, c(1.0)), Err(Error::OutsideChart(_))));
        assert!(l.to_local_super(400, 200, c(2.5)).is_err());
    }

    #[test]
    fn local_chart_sub() {
        let l = classify(&gauss(), 0.5).unwrap();
        assert_eq!(l.to_local_sub(400, 1, c(2.5)).unwrap(), c(0.0));
        let zeta = l.to_local_sub(400, 1, c(2.6)).unwrap();
        assert!(zeta.re.abs() < 1e-14 && zeta.im != 0.0);
        // rho'(b*)^2 = P3''(b*) = -g''(b*), checked by central differences.
        let h = 1e-4;
        let d = (l.rho_sub(c(2.5 + h)).unwrap() - l.rho_sub(c(2.5 - h)).unwrap()).re / (2.0 * h);
        let p3pp = -l.em.g_second_real(2.5).unwrap();
        assert_abs_diff_eq!(d * d, p3pp, epsilon = 1e-8);
        assert!(l.to_local_super(400, 1, c(2.5)).is_err());
    }

    #[test]
    fn subcritical_disk() {
        let l = classify(&gauss(), 0.5).unwrap();
        let r = l.disk_radius.unwrap();
        assert!(r > 0.0 && r <= 0.25 + 1e-15);
    }
}
