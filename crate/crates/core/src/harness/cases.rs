//! Manufactured solutions with closed-form pressure, gradient,
//! conductivity and source `f = div(-K grad p)`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::assembly::ProblemData;
use crate::error::{Error, Result};
use crate::mesh::Family;
use crate::postprocess::ExactSolution;
use crate::quadrature::Point;

/// Finite-difference step of the consistency check.
pub const FD_STEP: f64 = 1e-5;
pub const FD_TOL: f64 = 1e-6;
pub const FD_POINTS: usize = 100;

#[derive(Clone, Copy)]
pub struct ManufacturedCase {
    pub name: &'static str,
    pub dim: usize,
    /// Family used when none is requested.
    pub default_family: Family,
    pub pressure: fn(&Point) -> f64,
    pub gradient: fn(&Point) -> Point,
    pub conductivity: fn(&Point) -> Matrix3<f64>,
    pub source: fn(&Point) -> f64,
    /// Eigenvalue bounds of `K` over the unit square/cube.
    pub bounds: (f64, f64),
}

impl fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedCase").field("name", &self.name).field("dim", &self.dim).finish()
    }
}

impl ManufacturedCase {
    pub fn gradient(&self, x: &Point) -> Point {
        (self.gradient)(x)
    }

    pub fn conductivity(&self, x: &Point) -> Matrix3<f64> {
        (self.conductivity)(x)
    }

    pub fn source(&self, x: &Point) -> f64 {
        (self.source)(x)
    }

    pub fn problem_data(&self) -> ProblemData {
        ProblemData::new(self.dim, self.conductivity, self.source, self.pressure).with_bounds(self.bounds.0, self.bounds.1)
    }

    /// Checks `f = div u` and `grad p` by central differences at seeded
    /// random points of the domain.
    pub fn check_consistency(&self) -> Result<()> {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        let h = FD_STEP;
        for _ in 0..FD_POINTS {
            let mut x = [0.0; 3];
            for a in 0..self.dim {
                x[a] = rng.random_range(0.0..1.0);
            }
            let mut div = 0.0;
            for a in 0..self.dim {
                let (mut xp, mut xm) = (x, x);
                xp[a] += h;
                xm[a] -= h;
                div += (self.velocity(&xp)[a] - self.velocity(&xm)[a]) / (2.0 * h);
                let dp = (self.pressure(&xp) - self.pressure(&xm)) / (2.0 * h);
                let g = self.gradient(&x)[a];
                if (dp - g).abs() > FD_TOL * g.abs().max(1.0) {
                    return Err(Error::Incompatible(format!("case {}: gradient mismatch at {x:?}", self.name)));
                }
            }
            let f = self.source(&x);
            if (div - f).abs() > FD_TOL * f.abs().max(1.0) {
                return Err(Error::Incompatible(format!("case {}: source {f} differs from div u {div} at {x:?}", self.name)));
            }
        }
        Ok(())
    }
}

impl ExactSolution for ManufacturedCase {
    fn pressure(&self, x: &Point) -> f64 {
        (self.pressure)(x)
    }

    fn velocity(&self, x: &Point) -> Point {
        let g = Vector3::from((self.gradient)(x));
        let u = -((self.conductivity)(x) * g);
        [u[0], u[1], u[2]]
    }

    fn divergence(&self, x: &Point) -> f64 {
        (self.source)(x)
    }
}

// paper2d: pressure and conductivity on (-1/2, 1/2)^2 shifted to the unit square

fn paper_k(x: &Point) -> Matrix3<f64> {
    let (xs, ys) = (x[0] - 0.5, x[1] - 0.5);
    let off = 1.0 + (xs * ys).sin();
    Matrix3::new(4.0 + (xs + 2.0).powi(2) + ys * ys, off, 0.0, off, 2.0, 0.0, 0.0, 0.0, 1.0)
}

fn paper_p(x: &Point) -> f64 {
    (PI * (x[0] - 0.5)).sin() * (PI * (x[1] - 0.5)).sin()
}

fn paper_grad(x: &Point) -> Point {
    let (xs, ys) = (x[0] - 0.5, x[1] - 0.5);
    [PI * (PI * xs).cos() * (PI * ys).sin(), PI * (PI * xs).sin() * (PI * ys).cos(), 0.0]
}

fn paper_f(x: &Point) -> f64 {
    let (xs, ys) = (x[0] - 0.5, x[1] - 0.5);
    let k = paper_k(x);
    let (px, py) = (PI * (PI * xs).cos() * (PI * ys).sin(), PI * (PI * xs).sin() * (PI * ys).cos());
    let p = (PI * xs).sin() * (PI * ys).sin();
    let (pxx, pyy) = (-PI * PI * p, -PI * PI * p);
    let pxy = PI * PI * (PI * xs).cos() * (PI * ys).cos();
    let dx_k11 = 2.0 * (xs + 2.0);
    let dy_k21 = xs * (xs * ys).cos();
    let dx_k12 = ys * (xs * ys).cos();
    let dy_k22 = 0.0;
    -(dx_k11 + dy_k21) * px - (dx_k12 + dy_k22) * py - k[(0, 0)] * pxx - 2.0 * k[(0, 1)] * pxy - k[(1, 1)] * pyy
}

// smooth3d

fn smooth_k(x: &Point) -> Matrix3<f64> {
    Matrix3::from_diagonal(&Vector3::new(1.0 + 0.5 * x[0], 1.0 + 0.5 * x[1], 1.0 + 0.5 * x[2]))
}

fn smooth_p(x: &Point) -> f64 {
    (PI * x[0]).sin() * (PI * x[1]).sin() * (PI * x[2]).sin()
}

fn smooth_grad(x: &Point) -> Point {
    let (s, c): (Vec<f64>, Vec<f64>) = x.iter().map(|t| ((PI * t).sin(), (PI * t).cos())).unzip();
    [PI * c[0] * s[1] * s[2], PI * s[0] * c[1] * s[2], PI * s[0] * s[1] * c[2]]
}

fn smooth_f(x: &Point) -> f64 {
    let g = smooth_grad(x);
    let p = smooth_p(x);
    (0..3).map(|a| -(0.5 * g[a] + (1.0 + 0.5 * x[a]) * (-PI * PI * p))).sum()
}

// linear pressures with constant K: u is constant, f = 0

fn linear2d_k(_: &Point) -> Matrix3<f64> {
    Matrix3::new(2.0, 0.5, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 1.0)
}

fn linear3d_k(_: &Point) -> Matrix3<f64> {
    Matrix3::new(2.0, 0.3, 0.0, 0.3, 1.0, 0.2, 0.0, 0.2, 1.5)
}

fn linear2d_p(x: &Point) -> f64 {
    1.0 + 2.0 * x[0] - x[1]
}

fn linear2d_grad(_: &Point) -> Point {
    [2.0, -1.0, 0.0]
}

fn linear3d_p(x: &Point) -> f64 {
    1.0 + x[0] - 2.0 * x[1] + 0.5 * x[2]
}

fn linear3d_grad(_: &Point) -> Point {
    [1.0, -2.0, 0.5]
}

fn one(_: &Point) -> f64 {
    1.0
}

fn zero(_: &Point) -> f64 {
    0.0
}

fn zero_grad(_: &Point) -> Point {
    [0.0; 3]
}

pub const CASES: [ManufacturedCase; 6] = [
    ManufacturedCase {
        name: "constant2d",
        dim: 2,
        default_family: Family::HybridSquare,
        pressure: one,
        gradient: zero_grad,
        conductivity: paper_k,
        source: zero,
        bounds: (1.0, 12.0),
    },
    ManufacturedCase {
        name: "constant3d",
        dim: 3,
        default_family: Family::TetCube,
        pressure: one,
        gradient: zero_grad,
        conductivity: smooth_k,
        source: zero,
        bounds: (1.0, 1.5),
    },
    ManufacturedCase {
        name: "linear2d",
        dim: 2,
        default_family: Family::HybridSquare,
        pressure: linear2d_p,
        gradient: linear2d_grad,
        conductivity: linear2d_k,
        source: zero,
        bounds: (0.5, 2.5),
    },
    ManufacturedCase {
        name: "linear3d",
        dim: 3,
        default_family: Family::TetCube,
        pressure: linear3d_p,
        gradient: linear3d_grad,
        conductivity: linear3d_k,
        source: zero,
        bounds: (0.5, 2.5),
    },
    ManufacturedCase {
        name: "paper2d",
        dim: 2,
        default_family: Family::HybridSquare,
        pressure: paper_p,
        gradient: paper_grad,
        conductivity: paper_k,
        source: paper_f,
        bounds: (1.0, 12.0),
    },
    ManufacturedCase {
        name: "smooth3d",
        dim: 3,
        default_family: Family::TetCube,
        pressure: smooth_p,
        gradient: smooth_grad,
        conductivity: smooth_k,
        source: smooth_f,
        bounds: (1.0, 1.5),
    },
];

pub fn case_by_name(name: &str) -> Result<ManufacturedCase> {
    CASES.iter().find(|c| c.name == name).copied().ok_or_else(|| Error::UnknownCase(name.to_string()))
}
