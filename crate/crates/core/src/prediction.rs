//! Leading-order predictions near the outlier point.
//!
//! Supercritical: with `zeta = rho(x) / sqrt(kappa)` and `c = V''(a*) - g''(a*)`,
//!
//! ```text
//!   K_n(x, y) ~ exp(-(n/2) P3(x) + (n/2) P3(y)) sqrt(c) / k_{r-1} kappa^{-1/2} K_r^GUE(zeta_x, zeta_y)
//! ```
//!
//! so the `r` outliers are a scaled `r x r` GUE. The mean density is reported per
//! eigenvalue of the whole matrix, `rho_hat = K_n(x,x) / n = sqrt(c) kappa^{1/2} rho_r(zeta)`,
//! which puts mass `r/n` near `a*`.
//!
//! Subcritical: the kernel is exponentially small on a fixed disk around `b*`.
//! The error terms of both statements are asymptotic with unknown constants;
//! they appear in reports as text and are never added to values.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gue_kernel::{norm_k, GueKernelContext};
use crate::landscape::{kappa, Landscape, Regime, Which};

/// Order of the neglected terms, as reported.
pub const ERROR_ORDER: &str = "O(n^{-(1-gamma)/2}), constant not computable";

/// Uniform grid `points` samples from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub const MAX_POINTS: usize = 2000;

    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if points == 0 || points > Self::MAX_POINTS {
            return Err(Error::Usage(format!("grid needs 1..={} points, got {points}", Self::MAX_POINTS)));
        }
        if !(min.is_finite() && max.is_finite()) || min > max || (points > 1 && min == max) {
            return Err(Error::Usage(format!("empty grid range {min}:{max}")));
        }
        Ok(Grid { min, max, points })
    }

    /// Parses `min:max:points`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let bad = || Error::Usage(format!("grid must look like min:max:points, got {spec:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let min = parts[0].trim().parse().map_err(|_| bad())?;
        let max = parts[1].trim().parse().map_err(|_| bad())?;
        let points = parts[2].trim().parse().map_err(|_| bad())?;
        Grid::new(min, max, points)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.points - 1) as f64;
        // The last point is pinned so rounding never steps past `max`.
        (0..self.points)
            .map(|k| if k + 1 == self.points { self.max } else { self.min + h * k as f64 })
            .collect()
    }

    /// Trapezoid rule over the grid samples.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        if values.len() < 2 {
            return 0.0;
        }
        let h = (self.max - self.min) / (values.len() - 1) as f64;
        h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[values.len() - 1]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutlierLaw {
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuppressionStatement {
    pub center: f64,
    pub radius: f64,
    pub claim: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupercriticalPrediction {
    pub a_star: f64,
    pub curvature_c: f64,
    pub grid: Grid,
    pub density: Vec<f64>,
    /// `n` times the trapezoid integral of the density over the grid.
    pub mass: f64,
    pub outlier_law: Option<OutlierLaw>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionReport {
    pub regime: Regime,
    pub n: usize,
    pub r: usize,
    pub kappa: f64,
    pub error_order: &'static str,
    pub supercritical: Option<SupercriticalPrediction>,
    pub subcritical: Option<SuppressionStatement>,
}

fn require(l: &Landscape, regime: Regime) -> Result<()> {
    if l.regime != regime {
        return Err(Error::PredictionRefused(format!(
            "prediction needs a {regime} landscape, got {}",
            l.regime
        )));
    }
    Ok(())
}

fn local_real(l: &Landscape, n: usize, r: usize, x: f64) -> Result<f64> {
    Ok(l.to_local_super(n, r, Complex64::new(x, 0.0))?.re)
}

/// Predicted kernel `K_n(x, y)` near `a*`.
pub fn predict_supercritical_kernel(l: &Landscape, n: usize, r: usize, x: f64, y: f64) -> Result<f64> {
    require(l, Regime::Supercritical)?;
    let kappa = kappa(n, r)?;
    let c = l.curvature_c.expect("supercritical landscape has c");
    let ctx = GueKernelContext::new(r)?;
    let (zx, zy) = (local_real(l, n, r, x)?, local_real(l, n, r, y)?);
    let gauge = if x == y {
        1.0
    } else {
        (-0.5 * n as f64 * (l.re_p(Which::P3, x) - l.re_p(Which::P3, y))).exp()
    };
    Ok(gauge * c.sqrt() / norm_k(r, r - 1) / kappa.sqrt() * ctx.kernel(zx, zy))
}

/// Predicted mean eigenvalue density near `a*`, normalised per eigenvalue of the
/// full matrix so that `n * int rho_hat ~ r`.
pub fn predict_outlier_density(l: &Landscape, n: usize, r: usize, x: f64) -> Result<f64> {
    require(l, Regime::Supercritical)?;
    let kappa = kappa(n, r)?;
    let c = l.curvature_c.expect("supercritical landscape has c");
    let ctx = GueKernelContext::new(r)?;
    Ok(c.sqrt() * kappa.sqrt() * ctx.rho(local_real(l, n, r, x)?))
}

/// For `r = 1` the outlier is asymptotically `Normal(a*, 1 / (n c))`.
pub fn predict_outlier_law_r1(l: &Landscape, n: usize) -> Result<OutlierLaw> {
    require(l, Regime::Supercritical)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let c = l.curvature_c.expect("supercritical landscape has c");
    Ok(OutlierLaw { mean: l.a_star.expect("a*"), variance: 1.0 / (n as f64 * c) })
}

/// Subcritical suppression disk around `b*`.
pub fn predict_subcritical(l: &Landscape, n: usize, r: usize) -> Result<SuppressionStatement> {
    require(l, Regime::Subcritical)?;
    kappa(n, r)?;
    let center = l.b_star.expect("subcritical landscape has b*");
    let radius = l.disk_radius.expect("subcritical landscape has a disk");
    Ok(SuppressionStatement {
        center,
        radius,
        claim: format!(
            "expected number of eigenvalues in |z - {center:.6}| <= {radius:.6} decays like exp(-c n)"
        ),
    })
}

/// Default density window: `a* +- 0.3`, shrunk to stay inside the chart.
pub fn default_grid(l: &Landscape) -> Result<Grid> {
    require(l, Regime::Supercritical)?;
    let a_star = l.a_star.expect("a*");
    let half = 0.3f64.min(0.9 * (a_star - l.em.band.beta));
    Grid::new(a_star - half, a_star + half, 121)
}

/// Full report for the landscape's regime.
pub fn report(l: &Landscape, n: usize, r: usize, grid: Option<Grid>) -> Result<PredictionReport> {
    let kappa = kappa(n, r)?;
    let mut out = PredictionReport {
        regime: l.regime,
        n,
        r,
        kappa,
        error_order: ERROR_ORDER,
        supercritical: None,
        subcritical: None,
    };
    match l.regime {
        Regime::Supercritical => {
            let grid = match grid {
                Some(g) => g,
                None => default_grid(l)?,
            };
            let density = grid
                .values()
                .into_iter()
                .map(|x| predict_outlier_density(l, n, r, x))
                .collect::<Result<Vec<_>>>()?;
            let mass = n as f64 * grid.trapezoid(&density);
            out.supercritical = Some(SupercriticalPrediction {
                a_star: l.a_star.expect("a*"),
                curvature_c: l.curvature_c.expect("c"),
                grid,
                density,
                mass,
                outlier_law: if r == 1 { Some(predict_outlier_law_r1(l, n)?) } else { None },
            });
        }
        Regime::Subcritical => out.subcritical = Some(predict_subcritical(l, n, r)?),
        other => {
            return Err(Error::PredictionRefused(format!("no prediction in the {other} regime")));
        }
    }
    Ok(out)
}
