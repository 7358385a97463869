//! End-to-end runs on manufactured solutions, convergence studies and CSV
//! output.

mod cases;

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DVector;
use nalgebra_sparse::io::save_to_matrix_market_file;
use nalgebra_sparse::CsrMatrix;

use crate::assembly::{assemble_div, assemble_lumped_mass, assemble_rhs, build_dofmap, DofMap};
use crate::error::{Error, Result};
use crate::mesh::{generate, Family, Mesh};
use crate::postprocess::{eoc, error_norms, post_degree, stenberg_postprocess, ErrorReport, PostPressure, NORM_QUAD_DEGREE};
use crate::reduce_solve::{recover_velocity, reduce, solve, DiscreteSolution, SchurSystem};
use crate::refelem::SchemeOrder;

pub use cases::{case_by_name, ManufacturedCase, CASES, FD_POINTS, FD_STEP, FD_TOL};

pub const CSV_HEADER: &str = "h,dof_u,dof_p,err_u,eoc_u,err_p,eoc_p,err_proj0,eoc_proj0,err_post,eoc_post";

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub order: SchemeOrder,
    pub tol: f64,
    pub norm_degree: usize,
    /// Directory for matrix-market dumps of `M`, `B` and `S`.
    pub export_dir: Option<std::path::PathBuf>,
}

impl RunOptions {
    pub fn new(order: SchemeOrder, tol: f64) -> Self {
        Self { order, tol, norm_degree: NORM_QUAD_DEGREE, export_dir: None }
    }
}

/// Everything produced by one solve.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub mesh: Mesh,
    pub dofs: DofMap,
    pub solution: DiscreteSolution,
    pub post: PostPressure,
    pub report: ErrorReport,
    /// `||B u - f|| / ||f||` (absolute when `f = 0`).
    pub conservation: f64,
    /// `||M u - B^T p - g|| / (||g|| + ||B^T p||)`.
    pub velocity_residual: f64,
}

fn export(dir: &Path, mass: &CsrMatrix<f64>, div: &CsrMatrix<f64>, system: &SchurSystem) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    save_to_matrix_market_file(mass, dir.join("mass.mtx"))?;
    save_to_matrix_market_file(div, dir.join("div.mtx"))?;
    save_to_matrix_market_file(&system.matrix, dir.join("schur.mtx"))?;
    Ok(())
}

/// Full pipeline on a given mesh.
pub fn run_on_mesh(case: &ManufacturedCase, mesh: Mesh, opts: &RunOptions) -> Result<RunOutput> {
    if case.dim != mesh.dim {
        return Err(Error::Incompatible(format!("{}D case '{}' on a {}D mesh", case.dim, case.name, mesh.dim)));
    }
    let data = case.problem_data();
    let dofs = build_dofmap(&mesh, opts.order)?;
    let mass = assemble_lumped_mass(&mesh, &dofs, &data)?;
    let div = assemble_div(&mesh, &dofs);
    let (g, f) = assemble_rhs(&mesh, &dofs, &data);
    let system = reduce(&mass, &div, &g, &f)?;
    // B u - f equals the Schur residual, so also bound it relative to ||f||
    let (fnorm, rnorm) = (f.norm(), system.rhs.norm());
    let tol = if fnorm > 0.0 && rnorm > fnorm { opts.tol * fnorm / rnorm } else { opts.tol };
    let (p, stats) = solve(&system, tol)?;
    let u = recover_velocity(&system, &p);
    if let Some(dir) = &opts.export_dir {
        export(dir, &mass.to_csr(), &div, &system)?;
    }

    let bu = &div * &u;
    let conservation = (&bu - &f).norm() / if fnorm > 0.0 { fnorm } else { 1.0 };
    let btp: DVector<f64> = &div.transpose() * &p;
    let scale = g.norm() + btp.norm();
    let velocity_residual = (mass.mul(&u) - &btp - &g).norm() / if scale > 0.0 { scale } else { 1.0 };

    let solution = DiscreteSolution { u, p, stats };
    let post = stenberg_postprocess(&mesh, &dofs, &data, &solution, post_degree(opts.order))?;
    let report = error_norms(&mesh, &dofs, case, &solution, Some(&post), opts.norm_degree);
    Ok(RunOutput { mesh, dofs, solution, post, report, conservation, velocity_residual })
}

/// Generates the mesh and runs the pipeline.
pub fn run_case(case: &ManufacturedCase, family: Family, level: u32, opts: &RunOptions) -> Result<RunOutput> {
    if case.dim != family.dim() {
        return Err(Error::Incompatible(format!("{}D case '{}' on {}D family '{family}'", case.dim, case.name, family.dim())));
    }
    run_on_mesh(case, generate(family, level)?, opts)
}

/// One level of a study.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelRecord {
    pub level: u32,
    pub report: ErrorReport,
    pub conservation: f64,
    pub velocity_residual: f64,
    pub iterations: usize,
    pub solver_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceStudy {
    pub case: &'static str,
    pub family: Family,
    pub order: SchemeOrder,
    pub records: Vec<LevelRecord>,
}

/// Observed orders of one error column; `None` where undefined.
pub fn eoc_column(records: &[ErrorReport], err: impl Fn(&ErrorReport) -> f64) -> Vec<Option<f64>> {
    let mut out = vec![None];
    for w in records.windows(2) {
        out.push(eoc(&[w[0].h, w[1].h], &[err(&w[0]), err(&w[1])]).ok().map(|v| v[0]));
    }
    out.truncate(records.len());
    out
}

impl ConvergenceStudy {
    pub fn reports(&self) -> Vec<ErrorReport> {
        self.records.iter().map(|r| r.report.clone()).collect()
    }

    /// Last-pair observed order of an error column.
    pub fn last_eoc(&self, err: impl Fn(&ErrorReport) -> f64) -> Option<f64> {
        eoc_column(&self.reports(), err).last().copied().flatten()
    }
}

pub fn convergence_study(
    case: &ManufacturedCase,
    family: Family,
    levels: std::ops::RangeInclusive<u32>,
    opts: &RunOptions,
) -> Result<ConvergenceStudy> {
    if levels.end() <= levels.start() {
        return Err(Error::DegenerateSequence("a study needs at least two levels".into()));
    }
    if case.dim != family.dim() {
        return Err(Error::Incompatible(format!("{}D case '{}' on {}D family '{family}'", case.dim, case.name, family.dim())));
    }
    case.check_consistency()?;
    let mut records: Vec<LevelRecord> = Vec::new();
    for level in levels {
        let mut level_opts = opts.clone();
        level_opts.export_dir = opts.export_dir.as_ref().map(|d| d.join(format!("level{level}")));
        let out = run_case(case, family, level, &level_opts)?;
        if let Some(prev) = records.last() {
            let ratio = prev.report.h / out.report.h;
            if (ratio - 2.0).abs() > 1e-9 || out.report.dof_u <= prev.report.dof_u || out.report.dof_p <= prev.report.dof_p {
                return Err(Error::DegenerateSequence(format!("level {level} does not refine the previous level")));
            }
        }
        records.push(LevelRecord {
            level,
            report: out.report,
            conservation: out.conservation,
            velocity_residual: out.velocity_residual,
            iterations: out.solution.stats.iterations,
            solver_residual: out.solution.stats.residual,
        });
    }
    Ok(ConvergenceStudy { case: case.name, family, order: opts.order, records })
}

fn sci(v: f64) -> String {
    format!("{v:.5e}")
}

/// CSV with one row per report; `eoc` cells of the first row are empty.
pub fn emit_csv(records: &[ErrorReport]) -> String {
    let mut s = String::new();
    writeln!(s, "{CSV_HEADER}").unwrap();
    let cols: [fn(&ErrorReport) -> f64; 4] = [|r| r.err_u, |r| r.err_p, |r| r.err_proj0, |r| r.err_post];
    let eocs: Vec<Vec<Option<f64>>> = cols.iter().map(|c| eoc_column(records, c)).collect();
    for (i, r) in records.iter().enumerate() {
        let mut fields = vec![sci(r.h), r.dof_u.to_string(), r.dof_p.to_string()];
        for (c, col) in cols.iter().enumerate() {
            fields.push(sci(col(r)));
            fields.push(eocs[c][i].map(sci).unwrap_or_default());
        }
        writeln!(s, "{}", fields.join(",")).unwrap();
    }
    s
}

#[cfg(test)]
mod tests;
