//! Job configuration: defaults, optional JSON config file, flag overrides.

use std::path::PathBuf;

use serde::Deserialize;

use ribbonpatch::assembly::{MassMode, SolveConfig, SolverKind};
use ribbonpatch::mesh::BoundaryMassMode;
use ribbonpatch::param::{GradientMode, ParamConfig, SExtension};
use ribbonpatch::patch::PatchConfig;

use crate::CliError;

/// Fields accepted in the JSON config file; command-line flags override any
/// value given here.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub mesh: Option<PathBuf>,
    pub ribbons: Option<PathBuf>,
    pub sidecar: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub lump_mass: Option<bool>,
    pub lump_boundary_mass: Option<bool>,
    pub s_extension: Option<String>,
    pub gradient_mode: Option<String>,
    pub solver: Option<String>,
    pub solver_tolerance: Option<f64>,
    pub corner_tolerance: Option<f64>,
    pub dump_matrices: Option<bool>,
    pub levels: Option<usize>,
    pub case: Option<String>,
    pub side: Option<usize>,
    pub row: Option<usize>,
    pub col: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &PathBuf) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Pipeline {
            kind: "config",
            message: format!("cannot read config file {}: {e}", path.display()),
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Pipeline {
            kind: "config",
            message: format!("invalid config file {}: {e}", path.display()),
        })
    }
}

/// Fully resolved job settings.
#[derive(Clone, Debug)]
pub struct JobConfig {
    pub mesh: Option<PathBuf>,
    pub ribbons: Option<PathBuf>,
    pub sidecar: Option<PathBuf>,
    pub out: PathBuf,
    pub lump_mass: bool,
    pub lump_boundary_mass: bool,
    pub s_extension: SExtension,
    pub gradient_mode: GradientMode,
    pub solver: SolverKind,
    pub solver_tolerance: f64,
    pub corner_tolerance: f64,
    pub dump_matrices: bool,
}

impl JobConfig {
    pub fn param_config(&self) -> ParamConfig {
        ParamConfig {
            s_extension: self.s_extension,
            gradient_mode: self.gradient_mode,
        }
    }

    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            mass_mode: if self.lump_mass {
                MassMode::Lumped
            } else {
                MassMode::Consistent
            },
            boundary_mass_mode: if self.lump_boundary_mass {
                BoundaryMassMode::Lumped
            } else {
                BoundaryMassMode::Consistent
            },
            solver: self.solver,
            residual_tolerance: self.solver_tolerance,
        }
    }

    pub fn patch_config(&self) -> PatchConfig {
        PatchConfig {
            param: self.param_config(),
            solve: self.solve_config(),
            corner_tolerance: self.corner_tolerance,
        }
    }

    pub fn require_mesh(&self) -> Result<&PathBuf, CliError> {
        self.mesh
            .as_ref()
            .ok_or_else(|| CliError::Usage("no mesh path given (--mesh or config file)".into()))
    }

    pub fn require_ribbons(&self) -> Result<&PathBuf, CliError> {
        self.ribbons.as_ref().ok_or_else(|| {
            CliError::Usage("no ribbon path given (--ribbons or config file)".into())
        })
    }
}

pub fn parse_s_extension(name: &str) -> Result<SExtension, CliError> {
    match name {
        "clamp-linear" => Ok(SExtension::ClampLinear),
        "nearest" => Ok(SExtension::Nearest),
        other => Err(CliError::Usage(format!(
            "unknown s-extension {other:?} (expected clamp-linear or nearest)"
        ))),
    }
}

pub fn parse_gradient_mode(name: &str) -> Result<GradientMode, CliError> {
    match name {
        "area-weighted" => Ok(GradientMode::AreaWeightedVertex),
        "one-sided" => Ok(GradientMode::BoundaryOneSided),
        other => Err(CliError::Usage(format!(
            "unknown gradient mode {other:?} (expected area-weighted or one-sided)"
        ))),
    }
}

pub fn parse_solver(name: &str) -> Result<SolverKind, CliError> {
    match name {
        "direct" => Ok(SolverKind::Direct),
        "cg" => Ok(SolverKind::ConjugateGradient),
        other => Err(CliError::Usage(format!(
            "unknown solver {other:?} (expected direct or cg)"
        ))),
    }
}

/// Merges defaults, config file, and flag overrides (flags win).
pub struct Overrides {
    pub mesh: Option<PathBuf>,
    pub ribbons: Option<PathBuf>,
    pub sidecar: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub lump_mass: Option<bool>,
    pub lump_boundary_mass: Option<bool>,
    pub s_extension: Option<String>,
    pub gradient_mode: Option<String>,
    pub solver: Option<String>,
    pub solver_tolerance: Option<f64>,
    pub corner_tolerance: Option<f64>,
    pub dump_matrices: bool,
}

pub fn resolve(file: &FileConfig, flags: Overrides) -> Result<JobConfig, CliError> {
    let s_extension = flags
        .s_extension
        .or(file.s_extension.clone())
        .map(|s| parse_s_extension(&s))
        .transpose()?
        .unwrap_or_default();
    let gradient_mode = flags
        .gradient_mode
        .or(file.gradient_mode.clone())
        .map(|s| parse_gradient_mode(&s))
        .transpose()?
        .unwrap_or_default();
    let solver = flags
        .solver
        .or(file.solver.clone())
        .map(|s| parse_solver(&s))
        .transpose()?
        .unwrap_or_default();
    let solver_tolerance = flags
        .solver_tolerance
        .or(file.solver_tolerance)
        .unwrap_or(1e-10);
    if solver_tolerance.is_nan() || solver_tolerance <= 0.0 {
        return Err(CliError::Usage(format!(
            "solver tolerance must be positive, got {solver_tolerance}"
        )));
    }
    let corner_tolerance = flags
        .corner_tolerance
        .or(file.corner_tolerance)
        .unwrap_or(1e-6);
    if corner_tolerance.is_nan() || corner_tolerance <= 0.0 {
        return Err(CliError::Usage(format!(
            "corner tolerance must be positive, got {corner_tolerance}"
        )));
    }
    Ok(JobConfig {
        mesh: flags.mesh.or(file.mesh.clone()),
        ribbons: flags.ribbons.or(file.ribbons.clone()),
        sidecar: flags.sidecar.or(file.sidecar.clone()),
        out: flags
            .out
            .or(file.out.clone())
            .unwrap_or_else(|| PathBuf::from("out")),
        lump_mass: flags.lump_mass.or(file.lump_mass).unwrap_or(true),
        lump_boundary_mass: flags
            .lump_boundary_mass
            .or(file.lump_boundary_mass)
            .unwrap_or(false),
        s_extension,
        gradient_mode,
        solver,
        solver_tolerance,
        corner_tolerance,
        dump_matrices: flags.dump_matrices || file.dump_matrices.unwrap_or(false),
    })
}
