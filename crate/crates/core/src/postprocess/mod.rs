//! Pressure projections, local post-processing and error norms.
//!
//! The post-processed pressure solves on every cell
//!
//! ```text
//! (grad pt, grad q)_T = -(K^{-1} u_h, grad q)_T   for all q in P_k(T),
//! (pt, 1)_T = (p_h, 1)_T,
//! ```
//!
//! as a symmetric saddle system with one Lagrange multiplier.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::assembly::{physical_velocity, DofMap, ProblemData};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::quadrature::{cell_gauss, Point};
use crate::refelem::SchemeOrder;
use crate::reduce_solve::DiscreteSolution;

/// Gauss degree of the local post-processing integrals.
pub const POST_QUAD_DEGREE: usize = 8;
/// Default Gauss degree of the error norms.
pub const NORM_QUAD_DEGREE: usize = 6;

/// Closed-form exact solution used for the error norms.
pub trait ExactSolution {
    fn pressure(&self, x: &Point) -> f64;
    fn velocity(&self, x: &Point) -> Point;
    fn divergence(&self, x: &Point) -> f64;
}

fn monomial_exponents(dim: usize, degree: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for total in 0..=degree {
        for a in (0..=total).rev() {
            if dim == 2 {
                out.push([a, total - a, 0]);
            } else {
                for b in (0..=(total - a)).rev() {
                    out.push([a, b, total - a - b]);
                }
            }
        }
    }
    out
}

/// Piecewise polynomials in the scaled local monomials
/// `((x - c_T) / h_T)^e`, constant first.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePoly {
    pub dim: usize,
    pub degree: u32,
    pub exponents: Vec<[u32; 3]>,
    pub centers: Vec<Point>,
    pub scales: Vec<f64>,
    pub coeffs: Vec<Vec<f64>>,
}

/// Post-processed pressure.
pub type PostPressure = PiecewisePoly;

impl PiecewisePoly {
    fn empty(mesh: &Mesh, degree: u32) -> Self {
        let centers = (0..mesh.num_cells())
            .map(|c| mesh.maps[c].apply(&mesh.cells[c].shape.centroid()))
            .collect();
        Self {
            dim: mesh.dim,
            degree,
            exponents: monomial_exponents(mesh.dim, degree),
            centers,
            scales: mesh.diameters.clone(),
            coeffs: Vec::with_capacity(mesh.num_cells()),
        }
    }

    pub fn basis_len(&self) -> usize {
        self.exponents.len()
    }

    fn local(&self, cell: usize, x: &Point) -> Point {
        let (c, h) = (&self.centers[cell], self.scales[cell]);
        [(x[0] - c[0]) / h, (x[1] - c[1]) / h, (x[2] - c[2]) / h]
    }

    fn basis(&self, cell: usize, x: &Point, values: &mut [f64], grads: Option<&mut [Point]>) {
        let y = self.local(cell, x);
        let h = self.scales[cell];
        let pw = |t: f64, e: u32| if e == 0 { 1.0 } else { t.powi(e as i32) };
        for (k, e) in self.exponents.iter().enumerate() {
            values[k] = pw(y[0], e[0]) * pw(y[1], e[1]) * pw(y[2], e[2]);
        }
        if let Some(grads) = grads {
            for (k, e) in self.exponents.iter().enumerate() {
                let mut g = [0.0; 3];
                for a in 0..self.dim {
                    if e[a] == 0 {
                        continue;
                    }
                    let mut v = e[a] as f64 * pw(y[a], e[a] - 1) / h;
                    for b in 0..3 {
                        if b != a {
                            v *= pw(y[b], e[b]);
                        }
                    }
                    g[a] = v;
                }
                grads[k] = g;
            }
        }
    }

    pub fn eval(&self, cell: usize, x: &Point) -> f64 {
        let mut v = vec![0.0; self.basis_len()];
        self.basis(cell, x, &mut v, None);
        v.iter().zip(&self.coeffs[cell]).map(|(a, b)| a * b).sum()
    }

    /// Cell mean by Gauss quadrature.
    pub fn mean(&self, mesh: &Mesh, cell: usize) -> f64 {
        let rule = cell_gauss(mesh.cells[cell].shape, 2 * self.degree as usize);
        rule.apply(|xh| self.eval(cell, &mesh.maps[cell].apply(xh)))
    }
}

/// `u_h` at reference point `xh` of `cell`.
pub fn eval_velocity(mesh: &Mesh, dofs: &DofMap, u: &DVector<f64>, cell: usize, xh: &Point) -> Point {
    let def = dofs.def(mesh, cell);
    let mut vals = vec![[0.0; 3]; def.velocity.count()];
    def.velocity.eval_all(xh, &mut vals);
    let mut out = [0.0; 3];
    for (i, vh) in vals.iter().enumerate() {
        let v = physical_velocity(mesh, dofs, cell, i, vh);
        let c = u[dofs.cell_velocity[cell][i]];
        for a in 0..3 {
            out[a] += c * v[a];
        }
    }
    out
}

/// `div u_h` at reference point `xh` of `cell`.
pub fn eval_divergence(mesh: &Mesh, dofs: &DofMap, u: &DVector<f64>, cell: usize, xh: &Point) -> f64 {
    let def = dofs.def(mesh, cell);
    let det = mesh.maps[cell].det;
    (0..def.velocity.count())
        .map(|i| u[dofs.cell_velocity[cell][i]] * dofs.cell_scale[cell][i] * def.velocity.divergence_poly(i).eval(xh) / det)
        .sum()
}

/// `p_h` at reference point `xh` of `cell`.
pub fn eval_pressure(mesh: &Mesh, dofs: &DofMap, p: &DVector<f64>, cell: usize, xh: &Point) -> f64 {
    let def = dofs.def(mesh, cell);
    let p0 = dofs.pressure_offset[cell];
    def.pressure.functions().iter().enumerate().map(|(k, q)| p[p0 + k] * q.eval(xh)).sum()
}

/// Degree of the post-processed pressure paired with each scheme.
pub fn post_degree(order: SchemeOrder) -> u32 {
    match order {
        SchemeOrder::FirstOrder => 1,
        SchemeOrder::SecondOrder => 2,
    }
}

/// Local post-processing into `P_degree` per cell.
pub fn stenberg_postprocess(
    mesh: &Mesh,
    dofs: &DofMap,
    data: &ProblemData,
    sol: &DiscreteSolution,
    degree: u32,
) -> Result<PostPressure> {
    let mut out = PiecewisePoly::empty(mesh, degree);
    let n = out.basis_len();
    let mut vals = vec![0.0; n];
    let mut grads = vec![[0.0; 3]; n];
    for cell in 0..mesh.num_cells() {
        let shape = mesh.cells[cell].shape;
        let map = &mesh.maps[cell];
        let measure = mesh.cell_measure(cell);
        let rule = cell_gauss(shape, POST_QUAD_DEGREE);
        let mut a = DMatrix::<f64>::zeros(n + 1, n + 1);
        let mut rhs = DVector::<f64>::zeros(n + 1);
        let mut ph_mean = 0.0;
        for (xh, w) in rule.points.iter().zip(&rule.weights) {
            let x = map.apply(xh);
            out.basis(cell, &x, &mut vals, Some(&mut grads));
            let uh = Vector3::from(eval_velocity(mesh, dofs, &sol.u, cell, xh));
            let ku = data.inverse_conductivity(&x)? * uh;
            let wt = measure * w;
            for k in 0..n {
                let gk = Vector3::from(grads[k]);
                for l in 0..n {
                    a[(k, l)] += wt * gk.dot(&Vector3::from(grads[l]));
                }
                rhs[k] -= wt * ku.dot(&gk);
                a[(k, n)] += wt * vals[k];
            }
            ph_mean += wt * eval_pressure(mesh, dofs, &sol.p, cell, xh);
        }
        for k in 0..n {
            a[(n, k)] = a[(k, n)];
        }
        rhs[n] = ph_mean;
        let x = a.clone().lu().solve(&rhs).ok_or(Error::SingularLocalSystem { cell })?;
        if !x.iter().all(|v| v.is_finite()) || (&a * &x - &rhs).amax() > 1e-8 * (rhs.amax() + a.amax() * x.amax()) {
            return Err(Error::SingularLocalSystem { cell });
        }
        out.coeffs.push(x.rows(0, n).iter().copied().collect());
    }
    Ok(out)
}

/// Cellwise `L2` projection of `field` onto `P_degree`.
pub fn project_pressure(mesh: &Mesh, degree: u32, field: &dyn Fn(&Point) -> f64) -> Result<PiecewisePoly> {
    let mut out = PiecewisePoly::empty(mesh, degree);
    let n = out.basis_len();
    let mut vals = vec![0.0; n];
    for cell in 0..mesh.num_cells() {
        let rule = cell_gauss(mesh.cells[cell].shape, NORM_QUAD_DEGREE.max(2 * degree as usize + 4));
        let mut m = DMatrix::<f64>::zeros(n, n);
        let mut b = DVector::<f64>::zeros(n);
        for (xh, w) in rule.points.iter().zip(&rule.weights) {
            let x = mesh.maps[cell].apply(xh);
            out.basis(cell, &x, &mut vals, None);
            let fx = field(&x);
            for k in 0..n {
                for l in 0..n {
                    m[(k, l)] += w * vals[k] * vals[l];
                }
                b[k] += w * fx * vals[k];
            }
        }
        let c = m.cholesky().ok_or(Error::SingularLocalSystem { cell })?.solve(&b);
        out.coeffs.push(c.iter().copied().collect());
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ErrorReport {
    pub h: f64,
    pub dof_u: usize,
    pub dof_p: usize,
    /// `||u - u_h|| / ||u||`.
    pub err_u: f64,
    /// `||div(u - u_h)|| / ||div u||`.
    pub err_div: f64,
    /// `||p - p_h|| / ||p||`.
    pub err_p: f64,
    /// `||pi0 (p - p_h)|| / ||p||`.
    pub err_proj0: f64,
    /// `||p - pt_h|| / ||p||`.
    pub err_post: f64,
}

fn relative(err2: f64, norm2: f64) -> f64 {
    // exact fields that vanish fall back to absolute errors
    if norm2 > 0.0 {
        (err2 / norm2).sqrt()
    } else {
        err2.sqrt()
    }
}

/// Relative `L2` errors by cellwise Gauss quadrature of degree
/// `quad_degree` (at least six).
pub fn error_norms(
    mesh: &Mesh,
    dofs: &DofMap,
    exact: &dyn ExactSolution,
    sol: &DiscreteSolution,
    post: Option<&PostPressure>,
    quad_degree: usize,
) -> ErrorReport {
    let degree = quad_degree.max(NORM_QUAD_DEGREE);
    let (mut eu, mut nu, mut ed, mut nd, mut ep, mut np, mut e0, mut et) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for cell in 0..mesh.num_cells() {
        let map = &mesh.maps[cell];
        let measure = mesh.cell_measure(cell);
        let rule = cell_gauss(mesh.cells[cell].shape, degree);
        let mut mean_diff = 0.0;
        for (xh, w) in rule.points.iter().zip(&rule.weights) {
            let x = map.apply(xh);
            let wt = measure * w;
            let u = exact.velocity(&x);
            let uh = eval_velocity(mesh, dofs, &sol.u, cell, xh);
            let du: f64 = (0..mesh.dim).map(|a| (u[a] - uh[a]).powi(2)).sum();
            eu += wt * du;
            nu += wt * (0..mesh.dim).map(|a| u[a] * u[a]).sum::<f64>();
            let d = exact.divergence(&x);
            ed += wt * (d - eval_divergence(mesh, dofs, &sol.u, cell, xh)).powi(2);
            nd += wt * d * d;
            let p = exact.pressure(&x);
            let diff = p - eval_pressure(mesh, dofs, &sol.p, cell, xh);
            ep += wt * diff * diff;
            np += wt * p * p;
            mean_diff += w * diff;
            if let Some(post) = post {
                et += wt * (p - post.eval(cell, &x)).powi(2);
            }
        }
        e0 += measure * mean_diff * mean_diff;
    }
    ErrorReport {
        h: mesh.h(),
        dof_u: dofs.n_velocity,
        dof_p: dofs.n_pressure,
        err_u: relative(eu, nu),
        err_div: relative(ed, nd),
        err_p: relative(ep, np),
        err_proj0: relative(e0, np),
        err_post: if post.is_some() { relative(et, np) } else { f64::NAN },
    }
}

/// Observed orders `log(e_i / e_{i+1}) / log(h_i / h_{i+1})`.
pub fn eoc(h: &[f64], err: &[f64]) -> Result<Vec<f64>> {
    if h.len() != err.len() || h.len() < 2 {
        return Err(Error::DegenerateSequence("need at least two (h, error) pairs".into()));
    }
    if h.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::DegenerateSequence("mesh sizes must strictly decrease".into()));
    }
    if err.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::DegenerateSequence("errors must be positive".into()));
    }
    Ok(h.windows(2).zip(err.windows(2)).map(|(hw, ew)| (ew[0] / ew[1]).ln() / (hw[0] / hw[1]).ln()).collect())
}
