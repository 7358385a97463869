//! Sparse multivariate polynomials in up to three variables.
//!
//! Element bases are stored as explicit coefficient tables so that point
//! evaluation and divergence are exact polynomial operations.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent triple `(i, j, k)` for the monomial `x^i y^j z^k`.
pub type Exponent = [u8; 3];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    terms: BTreeMap<Exponent, f64>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial([0, 0, 0], c)
    }

    pub fn monomial(exp: Exponent, c: f64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0.0 {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    /// The coordinate function `x_axis`.
    pub fn var(axis: usize) -> Self {
        let mut e = [0; 3];
        e[axis] = 1;
        Self::monomial(e, 1.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &f64)> {
        self.terms.iter()
    }

    /// Total degree; zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&k| k as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let coord = |i: usize| x.get(i).copied().unwrap_or(0.0);
        self.terms
            .iter()
            .map(|(e, c)| c * coord(0).powi(e[0] as i32) * coord(1).powi(e[1] as i32) * coord(2).powi(e[2] as i32))
            .sum()
    }

    pub fn derivative(&self, axis: usize) -> Self {
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[axis] == 0 {
                continue;
            }
            let mut d = *e;
            d[axis] -= 1;
            *out.entry(d).or_insert(0.0) += c * e[axis] as f64;
        }
        Self::pruned(out)
    }

    /// Substitutes `x_axis -> 1 - x_axis`.
    pub fn reflect(&self, axis: usize) -> Self {
        let mut s = Self::zero();
        let one_minus = Self::constant(1.0) - Self::var(axis);
        for (e, c) in &self.terms {
            let mut rest = *e;
            rest[axis] = 0;
            let mut term = Self::monomial(rest, *c);
            for _ in 0..e[axis] {
                term = term * one_minus.clone();
            }
            s = s + term;
        }
        s
    }

    pub fn scale(mut self, s: f64) -> Self {
        for c in self.terms.values_mut() {
            *c *= s;
        }
        if s == 0.0 {
            self.terms.clear();
        }
        self
    }

    fn pruned(terms: BTreeMap<Exponent, f64>) -> Self {
        Self {
            terms: terms.into_iter().filter(|(_, c)| *c != 0.0).collect(),
        }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        for (e, c) in rhs.terms {
            *self.terms.entry(e).or_insert(0.0) += c;
        }
        Poly::pruned(self.terms)
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        let mut out = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                *out.entry(e).or_insert(0.0) += ca * cb;
            }
        }
        Poly::pruned(out)
    }
}

impl Mul<f64> for Poly {
    type Output = Poly;
    fn mul(self, s: f64) -> Poly {
        self.scale(s)
    }
}

impl Mul<Poly> for f64 {
    type Output = Poly;
    fn mul(self, p: Poly) -> Poly {
        p.scale(self)
    }
}

impl Add<f64> for Poly {
    type Output = Poly;
    fn add(self, c: f64) -> Poly {
        self + Poly::constant(c)
    }
}

impl Sub<f64> for Poly {
    type Output = Poly;
    fn sub(self, c: f64) -> Poly {
        self - Poly::constant(c)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        const NAMES: [&str; 3] = ["x", "y", "z"];
        for (n, (e, c)) in self.terms.iter().enumerate() {
            let sign = if *c < 0.0 { "-" } else if n > 0 { "+" } else { "" };
            if n > 0 {
                write!(f, " {sign} ")?;
            } else {
                write!(f, "{sign}")?;
            }
            let mag = c.abs();
            let is_const = e.iter().all(|&k| k == 0);
            if is_const || mag != 1.0 {
                write!(f, "{mag}")?;
            }
            for (axis, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "{}", NAMES[axis])?,
                    _ => write!(f, "{}^{k}", NAMES[axis])?,
                }
            }
        }
        Ok(())
    }
}

/// Vector-valued polynomial with `dim` components.
#[derive(Clone, Debug, PartialEq)]
pub struct VecPoly {
    pub comps: Vec<Poly>,
}

impl VecPoly {
    pub fn new(comps: Vec<Poly>) -> Self {
        Self { comps }
    }

    pub fn zero(dim: usize) -> Self {
        Self { comps: vec![Poly::zero(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.comps) {
            *o = p.eval(x);
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.comps.iter().map(|p| p.eval(x)).collect()
    }

    pub fn divergence(&self) -> Poly {
        self.comps
            .iter()
            .enumerate()
            .fold(Poly::zero(), |acc, (axis, p)| acc + p.derivative(axis))
    }

    pub fn degree(&self) -> usize {
        self.comps.iter().map(Poly::degree).max().unwrap_or(0)
    }
}

impl Add for VecPoly {
    type Output = VecPoly;
    fn add(self, rhs: VecPoly) -> VecPoly {
        VecPoly::new(self.comps.into_iter().zip(rhs.comps).map(|(a, b)| a + b).collect())
    }
}

impl Sub for VecPoly {
    type Output = VecPoly;
    fn sub(self, rhs: VecPoly) -> VecPoly {
        VecPoly::new(self.comps.into_iter().zip(rhs.comps).map(|(a, b)| a - b).collect())
    }
}

impl Neg for VecPoly {
    type Output = VecPoly;
    fn neg(self) -> VecPoly {
        VecPoly::new(self.comps.into_iter().map(|a| -a).collect())
    }
}

impl Mul<VecPoly> for f64 {
    type Output = VecPoly;
    fn mul(self, v: VecPoly) -> VecPoly {
        VecPoly::new(v.comps.into_iter().map(|a| a * self).collect())
    }
}
