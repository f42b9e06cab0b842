//! Rescaled Hermite polynomials and the `r x r` GUE kernel.
//!
//! `H_k^{(r)}` is the monic polynomial of degree `k` orthogonal for the weight
//! `exp(-r zeta^2 / 2)`, given by `H_{k+1} = zeta H_k - (k/r) H_{k-1}`. Substituting
//! `u = sqrt(r) zeta` into the probabilists' Hermite polynomials gives the
//! squared norms
//!
//! ```text
//!   k_j = int H_j^2 exp(-r zeta^2/2) d zeta = r^(-j-1/2) j! sqrt(2 pi).
//! ```
//!
//! Note the exponent `-j - 1/2`: the companion formula is sometimes quoted with
//! `r^(j - 1/2)`, which is only correct for `r = 1`. The tests compare both
//! against quadrature.
//!
//! Kernel evaluation works with the orthonormal functions
//! `phi_k = H_k exp(-r zeta^2/4) / sqrt(k_k)`, whose recurrence cannot
//! overflow for any `r` in range.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest polynomial degree accepted by [`hermite`].
pub const MAX_DEGREE: usize = 200;

/// `H_k^{(r)}(zeta)` by the three-term recurrence.
///
/// # Panics
/// If `k > MAX_DEGREE` or `r == 0`.
pub fn hermite(r: usize, k: usize, zeta: f64) -> f64 {
    assert!(r > 0, "scale r must be positive");
    assert!(k <= MAX_DEGREE, "degree {k} exceeds {MAX_DEGREE}");
    let rf = r as f64;
    let (mut prev, mut cur) = (1.0, zeta);
    if k == 0 {
        return 1.0;
    }
    for j in 1..k {
        let next = zeta * cur - (j as f64 / rf) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln k_j^{(r)}`.
pub fn ln_norm_k(r: usize, j: usize) -> f64 {
    let ln_fact: f64 = (2..=j).map(|i| (i as f64).ln()).sum();
    -(j as f64 + 0.5) * (r as f64).ln() + ln_fact + 0.5 * (2.0 * PI).ln()
}

/// `k_j^{(r)} = r^(-j-1/2) j! sqrt(2 pi)`.
pub fn norm_k(r: usize, j: usize) -> f64 {
    ln_norm_k(r, j).exp()
}

/// The exponent as printed in the orthogonality relation of the source
/// literature, `r^(j-1/2) j! sqrt(2 pi)`. Kept only so the test suite can show
/// that quadrature rejects it.
pub fn norm_k_printed(r: usize, j: usize) -> f64 {
    let ln_fact: f64 = (2..=j).map(|i| (i as f64).ln()).sum();
    ((j as f64 - 0.5) * (r as f64).ln() + ln_fact + 0.5 * (2.0 * PI).ln()).exp()
}

/// GUE of size `r`, weight `exp(-r zeta^2/2)`, centred at `zeta0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GueKernelContext {
    pub r: usize,
    pub zeta0: f64,
}

impl GueKernelContext {
    pub fn new(r: usize) -> Result<Self> {
        Self::centered(r, 0.0)
    }

    pub fn centered(r: usize, zeta0: f64) -> Result<Self> {
        if r == 0 || r > MAX_DEGREE {
            return Err(Error::InvalidArgument(format!("GUE size must be in 1..={MAX_DEGREE}, got {r}")));
        }
        Ok(GueKernelContext { r, zeta0 })
    }

    /// `phi_0 .. phi_r` at `zeta` (shifted by `zeta0`).
    pub fn orthonormal(&self, zeta: f64) -> Vec<f64> {
        let r = self.r as f64;
        let x = zeta - self.zeta0;
        let mut phi = Vec::with_capacity(self.r + 1);
        // phi_0 = exp(-r x^2/4) / sqrt(k_0)
        phi.push((-r * x * x / 4.0 - 0.5 * ln_norm_k(self.r, 0)).exp());
        if self.r >= 1 {
            phi.push(r.sqrt() * x * phi[0]);
        }
        for k in 1..self.r {
            let kf = k as f64;
            let next = (r / (kf + 1.0)).sqrt() * x * phi[k] - (kf / (kf + 1.0)).sqrt() * phi[k - 1];
            phi.push(next);
        }
        phi
    }

    /// `K_r^GUE(zeta_x, zeta_y)` in divided-difference form, switching to the
    /// confluent form when the arguments are within `1e-8`.
    pub fn kernel(&self, zx: f64, zy: f64) -> f64 {
        let r = self.r;
        let px = self.orthonormal(zx);
        let py = self.orthonormal(zy);
        let scale = (0.5 * (ln_norm_k(r, r) + ln_norm_k(r, r - 1))).exp();
        if (zx - zy).abs() < 1e-8 {
            // d/dx phi_k = sqrt(k r) phi_{k-1} - (r x / 2) phi_k
            let rf = r as f64;
            let xm = 0.5 * (zx + zy) - self.zeta0;
            let pm = if zx == zy { px } else { self.orthonormal(0.5 * (zx + zy)) };
            let d = |k: usize| -> f64 {
                let lower = if k == 0 { 0.0 } else { (k as f64 * rf).sqrt() * pm[k - 1] };
                lower - 0.5 * rf * xm * pm[k]
            };
            return scale * (d(r) * pm[r - 1] - d(r - 1) * pm[r]);
        }
        scale * (px[r] * py[r - 1] - px[r - 1] * py[r]) / (zx - zy)
    }

    /// `K(zeta_x, zeta_y) = k_{r-1} sum_{j<r} phi_j(zeta_x) phi_j(zeta_y)`; the
    /// same kernel by direct summation.
    pub fn kernel_by_sum(&self, zx: f64, zy: f64) -> f64 {
        let px = self.orthonormal(zx);
        let py = self.orthonormal(zy);
        let s: f64 = (0..self.r).map(|j| px[j] * py[j]).sum();
        norm_k(self.r, self.r - 1) * s
    }

    /// Mean eigenvalue density of the `r x r` GUE: `K(zeta, zeta) / (r k_{r-1})`.
    pub fn rho(&self, zeta: f64) -> f64 {
        self.kernel(zeta, zeta) / (self.r as f64 * norm_k(self.r, self.r - 1))
    }
}

/// Robin constant of the quadratic equilibrium problem, `-1 - 2 ln 2`.
pub fn ell_h() -> f64 {
    -1.0 - 2.0 * std::f64::consts::LN_2
}

/// g-function of the semicircle law on `[-2, 2]`,
///
/// ```text
///   g_H(z) = z^2/4 - (z/4) sqrt(z^2 - 4) + ln(z + sqrt(z^2 - 4)) + ell_H / 2,
/// ```
///
/// with the branch for which `g_H(z) - ln z -> 0` at infinity. It is evaluated as
/// `ln z + 1/(1+T) - 1/2 + ln((1+T)/2)` with `T = sqrt(1 - 4/z^2)`, which avoids the
/// cancellation between the quadratic terms.
pub fn g_h(zeta: Complex64) -> Result<Complex64> {
    if zeta.im == 0.0 && zeta.re.abs() < 2.0 {
        return Err(Error::OnBranchCut(zeta.re));
    }
    Ok(zeta.ln() + g_h_minus_log(zeta))
}

/// `g_H(z) - ln z`, computed without cancellation at large `|z|`.
fn g_h_minus_log(zeta: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let t = (one - 4.0 / (zeta * zeta)).sqrt();
    // (1+T)/2 = 1 - (1-T)/2 and 1 - T = (4/z^2) / (1+T)
    let small = -(2.0 / (zeta * zeta)) / (one + t);
    (one + t).inv() - 0.5 + ln_1p(small)
}

fn ln_1p(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        // alternating series, 12 terms is plenty at |w| < 1e-3
        let mut term = w;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=12 {
            acc += term / k as f64;
            term *= -w;
        }
        acc
    } else {
        (Complex64::new(1.0, 0.0) + w).ln()
    }
}

/// `g_H(zeta - zeta0) - ln(zeta)` for real `zeta > 2 + zeta0`.
pub fn shifted_g_h_minus_log(zeta: f64, zeta0: f64) -> f64 {
    let x = Complex64::new(zeta - zeta0, 0.0);
    g_h_minus_log(x).re + ln_1p(Complex64::new(-zeta0 / zeta, 0.0)).re
}

fn catalan(k: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * 2.0 * (2 * i + 1) as f64 / (i + 2) as f64;
    }
    c
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficients `c_1 .. c_K` with
/// `g_H(zeta - zeta0) - ln zeta + sum_j c_j / zeta^j = O(zeta^(-K-1))`.
///
/// Since `g_H(zeta - zeta0)` is the log transform of the semicircle shifted by
/// `zeta0`, `c_j = m_j / j` with `m_j` its `j`-th moment, a polynomial of degree
/// `j` in `zeta0`. The series is checked against direct evaluation far out.
pub fn ch_coeffs(zeta0: f64, k: usize) -> Result<Vec<f64>> {
    if k == 0 || k > 16 {
        return Err(Error::InvalidArgument(format!("number of coefficients must be in 1..=16, got {k}")));
    }
    let moment = |j: usize| -> f64 {
        (0..=j)
            .step_by(2)
            .map(|i| binomial(j, i) * zeta0.powi((j - i) as i32) * catalan(i / 2))
            .sum()
    };
    let coeffs: Vec<f64> = (1..=k).map(|j| moment(j) / j as f64).collect();

    // The first omitted coefficient vanishes for odd k + 1 at zeta0 = 0, so the
    // check radius is sized from the next two.
    let z_check = (k + 1..=k + 2)
        .map(|j| ((moment(j) / j as f64).abs() * 1e10).powf(1.0 / j as f64))
        .fold(20.0 * (1.0 + zeta0.abs()), f64::max);
    let mut residual: f64 = 0.0;
    for z in [z_check, 2.0 * z_check, 4.0 * z_check] {
        let series: f64 = coeffs.iter().enumerate().map(|(j, c)| c / z.powi(j as i32 + 1)).sum();
        residual = residual.max((shifted_g_h_minus_log(z, zeta0) + series).abs());
    }
    if residual > 1e-8 {
        return Err(Error::SeriesExtraction(residual));
    }
    Ok(coeffs)
}
