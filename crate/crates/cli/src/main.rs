//! `mfem`: convergence studies, single runs, mesh tools and reference
//! element dumps.
//!
//! Exit codes: 0 success, 2 solver failure, 3 invalid input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mfmfe::harness::{case_by_name, convergence_study, emit_csv, run_case, ManufacturedCase, RunOptions};
use mfmfe::mesh::{generate, read_mesh, write_mesh, Family, Mesh};
use mfmfe::refelem::{reference_element, CellShape, SchemeOrder};
use mfmfe::Error;

const EXIT_SOLVER: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "mfem", version, about = "Multipoint flux mixed finite elements for Darcy flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convergence study over a range of refinement levels.
    Study(StudyArgs),
    /// Single solve at one refinement level.
    Run(RunArgs),
    /// Mesh generation and validation.
    #[command(subcommand)]
    Mesh(MeshCommand),
    /// Print a reference element (rule, bases, exactness class).
    DumpElement {
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 2)]
        order: u32,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Manufactured case: constant2d, constant3d, linear2d, linear3d, paper2d, smooth3d.
    #[arg(long)]
    case: String,
    /// Mesh family; defaults to the case's family.
    #[arg(long)]
    family: Option<String>,
    /// Scheme order, 1 or 2.
    #[arg(long, default_value_t = 2)]
    order: u32,
    /// Relative CG tolerance.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Write mass, divergence and Schur matrices (matrix market) here.
    #[arg(long)]
    export_matrices: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StudyArgs {
    #[command(flatten)]
    common: Common,
    /// Inclusive level range `A..B`; defaults to 1..4 in 2D and 0..2 in 3D.
    #[arg(long)]
    levels: Option<String>,
    /// CSV output file; the table is also printed.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1)]
    level: u32,
}

#[derive(Subcommand, Debug)]
enum MeshCommand {
    /// Write a generated mesh.
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0)]
        level: u32,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a mesh file and print a summary.
    Check { file: PathBuf },
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn parse_order(k: u32) -> CliResult<SchemeOrder> {
    SchemeOrder::from_number(k).ok_or_else(|| CliError::Input(format!("order must be 1 or 2, got {k}")))
}

fn parse_levels(s: &str) -> CliResult<(u32, u32)> {
    let bad = || CliError::Input(format!("levels must look like A..B, got '{s}'"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if b <= a {
        return Err(CliError::Input(format!("level range {a}..{b} needs at least two levels")));
    }
    Ok((a, b))
}

fn setup(common: &Common) -> CliResult<(ManufacturedCase, Family, RunOptions)> {
    let case = case_by_name(&common.case)?;
    let family = match &common.family {
        Some(f) => f.parse::<Family>()?,
        None => case.default_family,
    };
    if !(common.tol > 0.0 && common.tol < 1.0) {
        return Err(CliError::Input(format!("tolerance must lie in (0, 1), got {}", common.tol)));
    }
    let mut opts = RunOptions::new(parse_order(common.order)?, common.tol);
    opts.export_dir = common.export_matrices.clone();
    Ok((case, family, opts))
}

fn study(args: StudyArgs) -> CliResult<()> {
    let (case, family, opts) = setup(&args.common)?;
    let (a, b) = match &args.levels {
        Some(s) => parse_levels(s)?,
        None if case.dim == 2 => (1, 4),
        None => (0, 2),
    };
    let study = convergence_study(&case, family, a..=b, &opts)?;
    for r in &study.records {
        println!(
            "level {}: h = {:.4e}, cg iterations = {}, cg residual = {:.3e}, conservation = {:.3e}, velocity residual = {:.3e}",
            r.level, r.report.h, r.iterations, r.solver_residual, r.conservation, r.velocity_residual
        );
    }
    let csv = emit_csv(&study.reports());
    print!("{csv}");
    if let Some(path) = &args.out {
        std::fs::write(path, &csv).map_err(Error::from)?;
    }
    Ok(())
}

fn run(args: RunArgs) -> CliResult<()> {
    let (case, family, opts) = setup(&args.common)?;
    let out = run_case(&case, family, args.level, &opts)?;
    let r = &out.report;
    println!("case {} on {family} level {} order {}", case.name, args.level, opts.order.number());
    println!("h = {:.6e}, dof_u = {}, dof_p = {}", r.h, r.dof_u, r.dof_p);
    println!("cg iterations = {}, cg residual = {:.3e}", out.solution.stats.iterations, out.solution.stats.residual);
    println!("conservation = {:.3e}, velocity residual = {:.3e}", out.conservation, out.velocity_residual);
    println!("err_u = {:.6e}", r.err_u);
    println!("err_div = {:.6e}", r.err_div);
    println!("err_p = {:.6e}", r.err_p);
    println!("err_proj0 = {:.6e}", r.err_proj0);
    println!("err_post = {:.6e}", r.err_post);
    Ok(())
}

fn summary(mesh: &Mesh) -> String {
    let shapes: Vec<&str> = mesh.shapes().iter().map(|s| s.tag()).collect();
    format!(
        "dim {}, vertices {}, cells {}, facets {} ({} boundary), shapes [{}], h = {:.6e}, shape regularity = {:.6}",
        mesh.dim,
        mesh.num_vertices(),
        mesh.num_cells(),
        mesh.facets.len(),
        mesh.boundary_facets().count(),
        shapes.join(" "),
        mesh.h(),
        mesh.shape_regularity
    )
}

fn mesh_command(cmd: MeshCommand) -> CliResult<()> {
    match cmd {
        MeshCommand::Gen { family, level, out } => {
            let mesh = generate(family.parse()?, level)?;
            let text = write_mesh(&mesh);
            match out {
                Some(path) => {
                    std::fs::write(&path, text).map_err(Error::from)?;
                    eprintln!("{}", summary(&mesh));
                }
                None => print!("{text}"),
            }
        }
        MeshCommand::Check { file } => {
            let text = std::fs::read_to_string(&file).map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
            let mesh = read_mesh(&text)?;
            println!("ok: {}", summary(&mesh));
        }
    }
    Ok(())
}

fn dump_element(shape: &str, order: u32) -> CliResult<()> {
    let shape = CellShape::from_tag(shape).ok_or_else(|| CliError::Input(format!("unknown shape '{shape}' (tri quad tet hex prism)")))?;
    let def = reference_element(shape, parse_order(order)?)?;
    print!("{def}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Study(args) => study(args),
        Command::Run(args) => run(args),
        Command::Mesh(cmd) => mesh_command(cmd),
        Command::DumpElement { shape, order } => dump_element(&shape, order),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_solver_failure() { EXIT_SOLVER } else { EXIT_INPUT })
        }
    }
}
