//! Local velocity elimination and the cell-centered pressure system
//!
//! ```text
//! B M^{-1} B^T p = f - B M^{-1} g,    u = M^{-1} (g + B^T p).
//! ```
//!
//! `M` is inverted cluster by cluster with dense Cholesky factors, which are
//! kept for the velocity recovery.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::assembly::LumpedMassMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SchurSystem {
    pub matrix: CsrMatrix<f64>,
    pub rhs: DVector<f64>,
    members: Vec<Vec<usize>>,
    factors: Vec<Cholesky<f64, Dyn>>,
    div_t: CsrMatrix<f64>,
    g: DVector<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Final `||A x - b|| / ||b||`, recomputed from scratch.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct DiscreteSolution {
    pub u: DVector<f64>,
    pub p: DVector<f64>,
    pub stats: SolveStats,
}

impl SchurSystem {
    pub fn size(&self) -> usize {
        self.rhs.len()
    }

    /// Applies `M^{-1}` cluster by cluster.
    pub fn apply_mass_inverse(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(x.len());
        for (members, chol) in self.members.iter().zip(&self.factors) {
            let local = DVector::from_iterator(members.len(), members.iter().map(|&j| x[j]));
            let sol = chol.solve(&local);
            for (a, &j) in members.iter().enumerate() {
                y[j] = sol[a];
            }
        }
        y
    }
}

/// Factors the mass blocks and assembles `S = B M^{-1} B^T` with one dense
/// triple product per cluster, in cluster order.
pub fn reduce(mass: &LumpedMassMatrix, div: &CsrMatrix<f64>, g: &DVector<f64>, f: &DVector<f64>) -> Result<SchurSystem> {
    let np = div.nrows();
    let div_t = div.transpose();
    let mut coo = CooMatrix::new(np, np);
    let mut rhs = f.clone();
    let mut factors = Vec::with_capacity(mass.blocks.len());
    let mut members = Vec::with_capacity(mass.blocks.len());
    for block in &mass.blocks {
        let chol = block.matrix.clone().cholesky().ok_or(Error::NonSpdBlock { cluster: block.cluster })?;
        let mut rows: Vec<usize> = block.members.iter().flat_map(|&j| div_t.row(j).col_indices().to_vec()).collect();
        rows.sort_unstable();
        rows.dedup();
        let s = block.members.len();
        let mut bc = DMatrix::zeros(s, rows.len());
        for (a, &j) in block.members.iter().enumerate() {
            let row = div_t.row(j);
            for (&i, &v) in row.col_indices().iter().zip(row.values()) {
                bc[(a, rows.binary_search(&i).unwrap())] = v;
            }
        }
        // Y = L^{-1} B_c, S_c = Y^T Y is symmetric to the last bit
        let y = chol.l().solve_lower_triangular(&bc).ok_or(Error::NonSpdBlock { cluster: block.cluster })?;
        let sc = y.transpose() * &y;
        for (a, &i) in rows.iter().enumerate() {
            for (b, &k) in rows.iter().enumerate() {
                coo.push(i, k, sc[(a, b)]);
            }
        }
        let gc = DVector::from_iterator(s, block.members.iter().map(|&j| g[j]));
        let mg = chol.solve(&gc);
        let contrib = bc.transpose() * mg;
        for (a, &i) in rows.iter().enumerate() {
            rhs[i] -= contrib[a];
        }
        factors.push(chol);
        members.push(block.members.clone());
    }
    Ok(SchurSystem { matrix: CsrMatrix::from(&coo), rhs, members, factors, div_t, g: g.clone() })
}

fn spmv(a: &CsrMatrix<f64>, x: &DVector<f64>, y: &mut DVector<f64>) {
    for (i, row) in a.row_iter().enumerate() {
        y[i] = row.col_indices().iter().zip(row.values()).map(|(&j, &v)| v * x[j]).sum();
    }
}

/// Jacobi-preconditioned conjugate gradients.
pub fn conjugate_gradient(a: &CsrMatrix<f64>, b: &DVector<f64>, tol: f64) -> Result<(DVector<f64>, SolveStats)> {
    let n = b.len();
    let bnorm = b.norm();
    if bnorm == 0.0 {
        return Ok((DVector::zeros(n), SolveStats::default()));
    }
    let mut diag = DVector::zeros(n);
    for (i, row) in a.row_iter().enumerate() {
        let d = row.get_entry(i).map(|e| e.into_value()).unwrap_or(0.0);
        if !(d > 0.0) {
            return Err(Error::SingularSystem);
        }
        diag[i] = 1.0 / d;
    }
    let max_iter = (10 * n).max(10_000);
    let mut x = DVector::zeros(n);
    let mut r = b.clone();
    let mut z = r.component_mul(&diag);
    let mut p = z.clone();
    let mut ap = DVector::zeros(n);
    let mut rz = r.dot(&z);
    let mut it = 0;
    let true_residual = |x: &DVector<f64>| {
        let mut ax = DVector::zeros(n);
        spmv(a, x, &mut ax);
        (b - ax).norm() / bnorm
    };
    while it < max_iter {
        if r.norm() <= tol * bnorm {
            // guard against drift of the recursive residual
            let res = true_residual(&x);
            if res <= tol {
                return Ok((x, SolveStats { iterations: it, residual: res }));
            }
            spmv(a, &x, &mut ap);
            r = b - &ap;
            z = r.component_mul(&diag);
            p = z.clone();
            rz = r.dot(&z);
        }
        spmv(a, &p, &mut ap);
        let pap = p.dot(&ap);
        if !(pap > 0.0) {
            return Err(Error::NoConvergence { iterations: it, residual: r.norm() / bnorm });
        }
        let alpha = rz / pap;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        z = r.component_mul(&diag);
        let rz_new = r.dot(&z);
        p = &z + (rz_new / rz) * &p;
        rz = rz_new;
        it += 1;
    }
    let res = true_residual(&x);
    if res <= tol {
        return Ok((x, SolveStats { iterations: it, residual: res }));
    }
    Err(Error::NoConvergence { iterations: it, residual: res })
}

pub fn solve(system: &SchurSystem, tol: f64) -> Result<(DVector<f64>, SolveStats)> {
    conjugate_gradient(&system.matrix, &system.rhs, tol)
}

/// `u = M^{-1} (g + B^T p)` with the retained block factors.
pub fn recover_velocity(system: &SchurSystem, p: &DVector<f64>) -> DVector<f64> {
    let mut btp = DVector::zeros(system.div_t.nrows());
    spmv(&system.div_t, p, &mut btp);
    system.apply_mass_inverse(&(&system.g + btp))
}

/// Reduce, solve and recover in one call.
pub fn solve_mixed(mass: &LumpedMassMatrix, div: &CsrMatrix<f64>, g: &DVector<f64>, f: &DVector<f64>, tol: f64) -> Result<DiscreteSolution> {
    let system = reduce(mass, div, g, f)?;
    let (p, stats) = solve(&system, tol)?;
    let u = recover_velocity(&system, &p);
    Ok(DiscreteSolution { u, p, stats })
}

/// Upper bound on the unknowns accepted by [`solve_saddle_dense`].
pub const SADDLE_DENSE_LIMIT: usize = 5000;

/// Direct LU solve of the full indefinite system (test oracle).
pub fn solve_saddle_dense(mass: &DMatrix<f64>, div: &DMatrix<f64>, g: &DVector<f64>, f: &DVector<f64>) -> Result<DiscreteSolution> {
    let (nu, np) = (mass.nrows(), div.nrows());
    if nu + np >= SADDLE_DENSE_LIMIT {
        return Err(Error::Incompatible(format!("dense saddle solve needs fewer than {SADDLE_DENSE_LIMIT} unknowns")));
    }
    let n = nu + np;
    let mut a = DMatrix::zeros(n, n);
    a.view_mut((0, 0), (nu, nu)).copy_from(mass);
    a.view_mut((0, nu), (nu, np)).copy_from(&(-div.transpose()));
    a.view_mut((nu, 0), (np, nu)).copy_from(div);
    let mut rhs = DVector::zeros(n);
    rhs.rows_mut(0, nu).copy_from(g);
    rhs.rows_mut(nu, np).copy_from(f);
    let lu = a.clone().lu();
    let x = lu.solve(&rhs).ok_or(Error::SingularSystem)?;
    let res = (&a * &x - &rhs).norm();
    if !res.is_finite() || res > 1e-8 * (rhs.norm() + a.amax() * x.norm()).max(f64::MIN_POSITIVE) {
        return Err(Error::SingularSystem);
    }
    Ok(DiscreteSolution {
        u: x.rows(0, nu).into_owned(),
        p: x.rows(nu, np).into_owned(),
        stats: SolveStats { iterations: 0, residual: res / rhs.norm().max(f64::MIN_POSITIVE) },
    })
}

#[cfg(test)]
mod tests;
