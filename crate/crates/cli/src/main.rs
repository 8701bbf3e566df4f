//! `ribbonpatch`: builds biharmonic surface patches over triangulated planar
//! domains from B-spline ribbon boundary data.
//!
//! Exit codes: 0 success, 1 pipeline failure (machine-readable JSON on
//! stderr), 2 usage error. `RIBBONPATCH_THREADS` caps internal parallelism.

mod commands;
mod inputs;
mod job;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::{cmd_blend, cmd_build, cmd_convergence, cmd_param, ConvergenceCase, Outputs};
use job::{FileConfig, JobConfig, Overrides};

#[derive(Debug)]
pub enum CliError {
    /// Invalid invocation; exits 2.
    Usage(String),
    /// Failure while loading inputs or solving; exits 1 with error JSON.
    Pipeline { kind: &'static str, message: String },
}

#[derive(Parser)]
#[command(
    name = "ribbonpatch",
    version,
    about = "Multi-sided biharmonic surface patches from B-spline ribbons"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; explicit flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input mesh (ASCII OFF, planar)
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Input ribbon set (JSON)
    #[arg(long)]
    ribbons: Option<PathBuf>,
    /// Side-assignment sidecar (JSON); otherwise sides come from the ribbon
    /// file's corners_uv
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// Output directory (created if missing)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Lump the mass matrix (default true)
    #[arg(long, value_name = "BOOL")]
    lump_mass: Option<bool>,
    /// Lump the boundary mass matrix (default false: exact edge integrals)
    #[arg(long, value_name = "BOOL")]
    lump_boundary_mass: Option<bool>,
    /// Dirichlet extension of the arc parameter: clamp-linear | nearest
    #[arg(long)]
    s_extension: Option<String>,
    /// Boundary gradient estimator: area-weighted | one-sided
    #[arg(long)]
    gradient_mode: Option<String>,
    /// Linear solver: direct | cg
    #[arg(long)]
    solver: Option<String>,
    /// Relative residual bound for the reduced system
    #[arg(long)]
    solver_tolerance: Option<f64>,
    /// Corner agreement tolerance, relative to the ribbon bounding box
    #[arg(long)]
    corner_tolerance: Option<f64>,
    /// Also dump L, M, N and the reduced operator as triplet text files
    #[arg(long)]
    dump_matrices: bool,
}

impl CommonArgs {
    /// Resolves the job settings and returns the raw file config so
    /// subcommands can read their own fields (side, case, levels) from it.
    fn resolve(self) -> Result<(JobConfig, FileConfig), CliError> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let job = job::resolve(
            &file,
            Overrides {
                mesh: self.mesh,
                ribbons: self.ribbons,
                sidecar: self.sidecar,
                out: self.out,
                lump_mass: self.lump_mass,
                lump_boundary_mass: self.lump_boundary_mass,
                s_extension: self.s_extension,
                gradient_mode: self.gradient_mode,
                solver: self.solver,
                solver_tolerance: self.solver_tolerance,
                corner_tolerance: self.corner_tolerance,
                dump_matrices: self.dump_matrices,
            },
        )?;
        Ok((job, file))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the patch: PLY with curvature colors, curvature CSV, diagnostics
    Build {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Emit the blend field of one ribbon control point
    Blend {
        #[command(flatten)]
        common: CommonArgs,
        /// Side index of the control point
        #[arg(long)]
        side: Option<usize>,
        /// Row (along s) of the control point
        #[arg(long)]
        row: Option<usize>,
        /// Column (along h; 0 = boundary row, 1 = tangent row)
        #[arg(long)]
        col: Option<usize>,
        /// Skip the partition-of-unity sweep over all control points
        #[arg(long)]
        skip_partition_check: bool,
    },
    /// Refinement study on analytic cases: linear | quadratic-biharmonic
    Convergence {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        case: Option<String>,
        /// Number of refinement levels (1 to 7)
        #[arg(long)]
        levels: Option<usize>,
    },
    /// Dump one side's harmonic parameterization and normal derivatives
    Param {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        side: Option<usize>,
    },
}

fn init_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("RIBBONPATCH_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.parse().map_err(|_| {
        CliError::Usage(format!(
            "RIBBONPATCH_THREADS must be a positive integer, got {value:?}"
        ))
    })?;
    if threads == 0 {
        return Err(CliError::Usage(
            "RIBBONPATCH_THREADS must be a positive integer".into(),
        ));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Pipeline {
            kind: "threads",
            message: e.to_string(),
        })
}

fn write_outputs(config: &JobConfig, outputs: Outputs) -> Result<(), CliError> {
    std::fs::create_dir_all(&config.out).map_err(|e| CliError::Pipeline {
        kind: "io",
        message: format!("cannot create {}: {e}", config.out.display()),
    })?;
    for (name, bytes) in outputs {
        let path = config.out.join(&name);
        std::fs::write(&path, bytes).map_err(|e| CliError::Pipeline {
            kind: "io",
            message: format!("cannot write {}: {e}", path.display()),
        })?;
        println!("{}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::Build { common } => {
            let (config, _) = common.resolve()?;
            let outputs = cmd_build(&config)?;
            write_outputs(&config, outputs)
        }
        Command::Blend {
            common,
            side,
            row,
            col,
            skip_partition_check,
        } => {
            let (config, file) = common.resolve()?;
            let side = side
                .or(file.side)
                .ok_or_else(|| CliError::Usage("--side is required".into()))?;
            let row = row.or(file.row).unwrap_or(0);
            let col = col.or(file.col).unwrap_or(0);
            let outputs = cmd_blend(&config, side, row, col, !skip_partition_check)?;
            write_outputs(&config, outputs)
        }
        Command::Convergence {
            common,
            case,
            levels,
        } => {
            let (config, file) = common.resolve()?;
            let case = case
                .or(file.case)
                .ok_or_else(|| CliError::Usage("--case is required".into()))?;
            let case = ConvergenceCase::parse(&case)?;
            let levels = levels.or(file.levels).unwrap_or(3);
            let outputs = cmd_convergence(&config, case, levels)?;
            write_outputs(&config, outputs)
        }
        Command::Param { common, side } => {
            let (config, file) = common.resolve()?;
            let side = side
                .or(file.side)
                .ok_or_else(|| CliError::Usage("--side is required".into()))?;
            let outputs = cmd_param(&config, side)?;
            write_outputs(&config, outputs)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
        Err(CliError::Pipeline { kind, message }) => {
            let doc = serde_json::json!({ "error": { "kind": kind, "message": message } });
            eprintln!("{doc}");
            std::process::exit(1);
        }
    }
}
