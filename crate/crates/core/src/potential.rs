//! External-field polynomial `V` and the admissibility checks it must pass.
//!
//! A [`Potential`] is a real polynomial of even degree `d >= 2` with positive
//! leading coefficient. That is exactly the growth condition needed for
//! `V(x) - a x -> +inf` for every real `a`, so every source strength gives a
//! normalisable ensemble.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense real polynomial, coefficients lowest degree first.
///
/// Used both for `V` and its derivatives, which need not satisfy the
/// admissibility invariants of [`Potential`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![0.0] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// `order`-th derivative; orders past the degree give the zero polynomial.
    pub fn nth_derivative(&self, order: usize) -> Poly {
        (0..order).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..len)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(0.0)
                        + other.coeffs.get(k).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Cauchy bound: every complex root has modulus below this.
    pub fn root_bound(&self) -> f64 {
        let lead = self.coeffs[self.degree()];
        if self.degree() == 0 || lead == 0.0 {
            return 1.0;
        }
        1.0 + self.coeffs[..self.degree()]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max)
    }

    /// Real roots in `[lo, hi]`, ascending.
    ///
    /// Roots of `p` are separated by roots of `p'`, so the critical points found
    /// recursively split the interval into monotone pieces; each piece holds at
    /// most one root, located by bisection. Roots of even multiplicity show up
    /// as critical points where `p` vanishes.
    pub fn real_roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        if self.is_zero() || self.degree() == 0 {
            return Vec::new();
        }
        if self.degree() == 1 {
            let r = -self.coeffs[0] / self.coeffs[1];
            return if r >= lo && r <= hi { vec![r] } else { Vec::new() };
        }
        let scale = self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
        let crit = self.derivative().real_roots_in(lo, hi);
        let mut knots = Vec::with_capacity(crit.len() + 2);
        knots.push(lo);
        knots.extend(crit.iter().copied().filter(|&c| c > lo && c < hi));
        knots.push(hi);

        let tiny = |x: f64| {
            let mag = (0..=self.degree())
                .map(|k| (self.coeffs[k] * x.abs().powi(k as i32)).abs())
                .sum::<f64>();
            self.eval(x).abs() <= 1e-13 * mag.max(scale * 1e-300)
        };

        let mut roots: Vec<f64> = Vec::new();
        let push = |r: f64, roots: &mut Vec<f64>| {
            if roots
                .last()
                .map_or(true, |&last| (r - last).abs() > 1e-12 * (1.0 + r.abs()))
            {
                roots.push(r);
            }
        };
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a), self.eval(b));
            if tiny(a) {
                push(a, &mut roots);
            }
            if fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
                push(bisect(|x| self.eval(x), a, b, fa), &mut roots);
            }
        }
        if tiny(hi) {
            push(hi, &mut roots);
        }
        roots
    }

    /// All real roots.
    pub fn real_roots(&self) -> Vec<f64> {
        let b = self.root_bound();
        self.real_roots_in(-b, b)
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Interval on which convexity is checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Real,
    Interval(f64, f64),
}

/// Admissible external field: even degree `d >= 2`, positive leading coefficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Potential {
    poly: Poly,
}

impl Potential {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPotential(
                "coefficients must be finite".into(),
            ));
        }
        let poly = Poly::new(coeffs);
        let d = poly.degree();
        if d < 2 || d % 2 != 0 {
            return Err(Error::InvalidPotential(format!(
                "degree must be even and at least 2, got {d}"
            )));
        }
        if poly.coeffs()[d] <= 0.0 {
            return Err(Error::InvalidPotential(
                "leading coefficient must be positive".into(),
            ));
        }
        Ok(Potential { poly })
    }

    /// `z^2 / 2`.
    pub fn gaussian() -> Self {
        Potential::new(vec![0.0, 0.0, 0.5]).expect("gaussian potential is admissible")
    }

    /// Parse a JSON array of coefficients, lowest degree first (`[0,0,0.5]` is `z^2/2`).
    pub fn from_json(s: &str) -> Result<Self> {
        let coeffs: Vec<f64> = serde_json::from_str(s)
            .map_err(|e| Error::InvalidPotential(format!("expected a JSON array of numbers: {e}")))?;
        Potential::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        self.poly.coeffs()
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.poly.eval_complex(z)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.poly.eval(x)
    }

    pub fn derivative(&self, order: usize) -> Poly {
        self.poly.nth_derivative(order)
    }

    /// True exactly for `V(z) = c0 + c2 z^2` with `c2 = 1/2` up to a constant,
    /// i.e. the potential whose ensemble is GUE plus the source.
    pub fn is_standard_gaussian(&self) -> bool {
        let c = self.coeffs();
        c.len() == 3 && c[1] == 0.0 && (c[2] - 0.5).abs() < 1e-15
    }

    /// `V(z - t)`.
    pub fn translate(&self, t: f64) -> Potential {
        // Taylor shift by repeated synthetic division.
        let mut c = self.coeffs().to_vec();
        let d = c.len() - 1;
        for i in 0..d {
            for j in (i..d).rev() {
                c[j] -= t * c[j + 1];
            }
        }
        Potential::new(c).expect("translation preserves admissibility")
    }

    /// `V(-z)`, used to reduce negative source strengths to positive ones.
    pub fn reflect(&self) -> Potential {
        let c = self
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 1 { -c } else { c })
            .collect();
        Potential::new(c).expect("reflection preserves admissibility")
    }

    /// `V'' >= 0` on the domain; isolated zeros of `V''` are allowed.
    pub fn is_convex(&self, domain: Domain) -> bool {
        let v2 = self.derivative(2);
        let (lo, hi) = match domain {
            Domain::Real => {
                let b = v2.root_bound() + 1.0;
                (-b, b)
            }
            Domain::Interval(a, b) => (a.min(b), a.max(b)),
        };
        if v2.degree() == 0 {
            return v2.coeffs()[0] >= 0.0;
        }
        let roots = v2.real_roots_in(lo, hi);
        let mut knots = vec![lo];
        knots.extend(roots.iter().copied());
        knots.push(hi);
        let scale = v2.coeffs().iter().map(|c| c.abs()).fold(0.0, f64::max);
        let negative = |x: f64| v2.eval(x) < -1e-12 * scale;
        if negative(lo) || negative(hi) {
            return false;
        }
        knots
            .windows(2)
            .filter(|w| w[1] > w[0])
            .all(|w| !negative(0.5 * (w[0] + w[1])))
    }
}
