//! The four subcommands. Each computes everything first and only then
//! returns the files to write, so failures never leave partial output.

use rayon::prelude::*;
use serde::Serialize;

use ribbonpatch::assembly::{boundary_flux_loads, BiharmonicSystem};
use ribbonpatch::geom::{Vec2, Vec3};
use ribbonpatch::mesh::{graded_square, MeshQuality, TriMesh};
use ribbonpatch::output::{
    diverging_colormap, fmt_float, sign_split_colormap, write_multi_csv, write_ply,
    write_scalar_csv,
};
use ribbonpatch::param::side_parameterizations;
use ribbonpatch::patch::{
    blend_function_field, build_patch_with, control_point_ids, CornerDiagnostic, NormalMismatch,
};
use ribbonpatch::sparse::SparseMatrix;
use ribbonpatch::spline::CornerCheck;

use crate::inputs::{load_inputs, LoadedInputs};
use crate::job::JobConfig;
use crate::CliError;

/// File set produced by a command: `(relative name, contents)`.
pub type Outputs = Vec<(String, Vec<u8>)>;

#[derive(Serialize)]
struct MeshSummary {
    vertices: usize,
    triangles: usize,
    boundary_vertices: usize,
    loops: usize,
    sides: usize,
    min_angle_degrees: f64,
    n_obtuse_triangles: usize,
    area: f64,
}

impl MeshSummary {
    fn of(mesh: &TriMesh<f64>) -> Self {
        let q = MeshQuality::of(mesh);
        Self {
            vertices: mesh.n_vertices(),
            triangles: mesh.n_triangles(),
            boundary_vertices: mesh.n_boundary_vertices(),
            loops: mesh.boundary_loops().len(),
            sides: mesh.n_sides(),
            min_angle_degrees: q.min_angle_degrees,
            n_obtuse_triangles: q.n_obtuse_triangles,
            area: q.total_area,
        }
    }
}

#[derive(Serialize)]
struct SolverSummary {
    mass_lumping: bool,
    boundary_mass_lumping: bool,
    solver: String,
    residual_tolerance: f64,
}

impl SolverSummary {
    fn of(config: &JobConfig) -> Self {
        Self {
            mass_lumping: config.lump_mass,
            boundary_mass_lumping: config.lump_boundary_mass,
            solver: match config.solver {
                ribbonpatch::assembly::SolverKind::Direct => "direct".into(),
                ribbonpatch::assembly::SolverKind::ConjugateGradient => "cg".into(),
            },
            residual_tolerance: config.solver_tolerance,
        }
    }
}

#[derive(Serialize)]
struct BuildDiagnostics {
    command: &'static str,
    mesh: MeshSummary,
    solver: SolverSummary,
    solver_residual: f64,
    bbox_min: [f64; 3],
    bbox_max: [f64; 3],
    max_abs_z: f64,
    mean_curvature_range: [f64; 2],
    /// End-to-start agreement of the ribbon loops as loaded, including the
    /// (reported, unenforced) twist gaps.
    ribbon_corners: Vec<CornerCheck>,
    corners: Vec<CornerDiagnostic>,
    normal_mismatch: Vec<NormalMismatch>,
    warnings: Vec<String>,
}

fn to_json(value: &impl Serialize) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("diagnostics serialize");
    text.push('\n');
    text.into_bytes()
}

fn matrix_dump(matrix: &SparseMatrix<f64>) -> Vec<u8> {
    let mut out = String::new();
    out.push_str(&format!(
        "{} {} {}\n",
        matrix.n_rows(),
        matrix.n_cols(),
        matrix.nnz()
    ));
    for (i, j, v) in matrix.triplets() {
        out.push_str(&format!("{i} {j} {}\n", fmt_float(v)));
    }
    out.into_bytes()
}

pub fn cmd_build(config: &JobConfig) -> Result<Outputs, CliError> {
    let LoadedInputs {
        mesh,
        ribbons,
        connectivity,
        warnings,
    } = load_inputs(config)?;
    let params =
        side_parameterizations(&mesh, config.param_config()).map_err(|e| CliError::Pipeline {
            kind: "param",
            message: e.to_string(),
        })?;
    let system =
        BiharmonicSystem::build(&mesh, config.solve_config()).map_err(|e| CliError::Pipeline {
            kind: "solve",
            message: e.to_string(),
        })?;
    let mut patch =
        build_patch_with(&system, &ribbons, &params, config.patch_config()).map_err(|e| {
            CliError::Pipeline {
                kind: "patch",
                message: e.to_string(),
            }
        })?;
    patch.diagnostics.warnings = warnings;

    let mut lo = Vec3::splat(f64::INFINITY);
    let mut hi = Vec3::splat(f64::NEG_INFINITY);
    let mut max_abs_z = 0.0f64;
    for p in &patch.surface_positions {
        lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
        hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        max_abs_z = max_abs_z.max(p.z.abs());
    }
    let curvature_scale = patch
        .mean_curvature
        .iter()
        .map(|h| h.abs())
        .fold(0.0f64, f64::max);
    let colors: Vec<[u8; 3]> = patch
        .mean_curvature
        .iter()
        .map(|&h| diverging_colormap(h, curvature_scale))
        .collect();

    let mut ply = Vec::new();
    write_ply(
        &mut ply,
        &patch.surface_positions,
        mesh.triangles(),
        Some(&colors),
    )
    .expect("in-memory write");
    let mut csv = Vec::new();
    write_scalar_csv(
        &mut csv,
        "vertex,mean_curvature",
        patch.mean_curvature.iter().copied().enumerate(),
    )
    .expect("in-memory write");

    let h_lo = patch
        .mean_curvature
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let h_hi = patch
        .mean_curvature
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let diagnostics = BuildDiagnostics {
        command: "build",
        mesh: MeshSummary::of(&mesh),
        solver: SolverSummary::of(config),
        solver_residual: patch.diagnostics.solver_residual,
        bbox_min: [lo.x, lo.y, lo.z],
        bbox_max: [hi.x, hi.y, hi.z],
        max_abs_z,
        mean_curvature_range: [h_lo, h_hi],
        ribbon_corners: connectivity.corners,
        corners: patch.diagnostics.corners.clone(),
        normal_mismatch: patch.diagnostics.normal_mismatch.clone(),
        warnings: patch.diagnostics.warnings.clone(),
    };

    let mut outputs: Outputs = vec![
        ("patch.ply".into(), ply),
        ("curvature.csv".into(), csv),
        ("diagnostics.json".into(), to_json(&diagnostics)),
    ];
    if config.dump_matrices {
        outputs.push(("L.txt".into(), matrix_dump(system.laplacian())));
        outputs.push(("M.txt".into(), matrix_dump(system.mass())));
        outputs.push(("N.txt".into(), matrix_dump(system.boundary_mass())));
        outputs.push(("reduced.txt".into(), matrix_dump(system.reduced_operator())));
    }
    Ok(outputs)
}

#[derive(Serialize)]
struct BlendDiagnostics {
    command: &'static str,
    mesh: MeshSummary,
    solver: SolverSummary,
    control_point: [usize; 3],
    field_min: f64,
    field_max: f64,
    negative_vertices: usize,
    /// Max deviation of the sum of all control-point fields from 1;
    /// absent when the check is skipped.
    #[serde(skip_serializing_if = "Option::is_none")]
    partition_max_deviation: Option<f64>,
    warnings: Vec<String>,
}

pub fn cmd_blend(
    config: &JobConfig,
    side: usize,
    row: usize,
    col: usize,
    check_partition: bool,
) -> Result<Outputs, CliError> {
    let LoadedInputs {
        mesh,
        ribbons,
        warnings,
        ..
    } = load_inputs(config)?;
    if side >= ribbons.sides.len() {
        return Err(CliError::Usage(format!(
            "side {side} out of range ({} sides)",
            ribbons.sides.len()
        )));
    }
    if row >= ribbons.sides[side].n_rows() || col >= ribbons.sides[side].n_cols() {
        return Err(CliError::Usage(format!(
            "control point ({row}, {col}) out of range for side {side} ({}x{} net)",
            ribbons.sides[side].n_rows(),
            ribbons.sides[side].n_cols()
        )));
    }
    let params =
        side_parameterizations(&mesh, config.param_config()).map_err(|e| CliError::Pipeline {
            kind: "param",
            message: e.to_string(),
        })?;
    let system =
        BiharmonicSystem::build(&mesh, config.solve_config()).map_err(|e| CliError::Pipeline {
            kind: "solve",
            message: e.to_string(),
        })?;
    let field =
        blend_function_field(&system, &ribbons, &params, (side, row, col)).map_err(|e| {
            CliError::Pipeline {
                kind: "patch",
                message: e.to_string(),
            }
        })?;

    let partition_max_deviation = if check_partition {
        // Fields are independent solves against the shared factorization;
        // collected in order, then summed sequentially for reproducibility.
        let fields: Result<Vec<Vec<f64>>, CliError> = control_point_ids(&ribbons)
            .into_par_iter()
            .map(|id| {
                blend_function_field(&system, &ribbons, &params, id).map_err(|e| {
                    CliError::Pipeline {
                        kind: "patch",
                        message: e.to_string(),
                    }
                })
            })
            .collect();
        let mut sum = vec![0.0f64; mesh.n_vertices()];
        for f in fields? {
            for (acc, v) in sum.iter_mut().zip(&f) {
                *acc += v;
            }
        }
        Some(sum.iter().map(|s| (s - 1.0).abs()).fold(0.0f64, f64::max))
    } else {
        None
    };

    let scale = field.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    let colors: Vec<[u8; 3]> = field
        .iter()
        .map(|&v| sign_split_colormap(v, scale))
        .collect();
    // Height-map surface of the field over the domain: level sets read
    // directly off the geometry, sign off the colors.
    let positions: Vec<Vec3<f64>> = mesh
        .vertices()
        .iter()
        .zip(&field)
        .map(|(p, &v)| Vec3::new(p.x, p.y, v))
        .collect();
    let mut ply = Vec::new();
    write_ply(&mut ply, &positions, mesh.triangles(), Some(&colors)).expect("in-memory write");
    let mut csv = Vec::new();
    write_scalar_csv(&mut csv, "vertex,blend", field.iter().copied().enumerate())
        .expect("in-memory write");

    let diagnostics = BlendDiagnostics {
        command: "blend",
        mesh: MeshSummary::of(&mesh),
        solver: SolverSummary::of(config),
        control_point: [side, row, col],
        field_min: field.iter().cloned().fold(f64::INFINITY, f64::min),
        field_max: field.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        negative_vertices: field.iter().filter(|&&v| v < 0.0).count(),
        partition_max_deviation,
        warnings,
    };
    let stem = format!("blend_s{side}_r{row}_c{col}");
    Ok(vec![
        (format!("{stem}.ply"), ply),
        (format!("{stem}.csv"), csv),
        ("diagnostics.json".into(), to_json(&diagnostics)),
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvergenceCase {
    Linear,
    QuadraticBiharmonic,
}

impl ConvergenceCase {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "linear" => Ok(Self::Linear),
            "quadratic-biharmonic" => Ok(Self::QuadraticBiharmonic),
            other => Err(CliError::Usage(format!(
                "unknown convergence case {other:?} (expected linear or quadratic-biharmonic)"
            ))),
        }
    }
}

#[derive(Serialize)]
struct ConvergenceDiagnostics {
    command: &'static str,
    case: &'static str,
    levels: usize,
    errors: Vec<f64>,
    orders: Vec<f64>,
    solver: SolverSummary,
}

/// Per-level interior max error of an exact-data solve on graded grids; the
/// grid is refined by halving `h` each level.
pub fn cmd_convergence(
    config: &JobConfig,
    case: ConvergenceCase,
    levels: usize,
) -> Result<Outputs, CliError> {
    if levels == 0 || levels > 7 {
        return Err(CliError::Usage(format!(
            "refinement levels must be between 1 and 7, got {levels}"
        )));
    }
    let mut rows = Vec::new();
    let mut errors: Vec<f64> = Vec::new();
    for level in 0..levels {
        let n = 12usize << level;
        let mesh = graded_square::<f64>(n, 1.3).map_err(|e| CliError::Pipeline {
            kind: "mesh",
            message: e.to_string(),
        })?;
        let system = BiharmonicSystem::build(&mesh, config.solve_config()).map_err(|e| {
            CliError::Pipeline {
                kind: "solve",
                message: e.to_string(),
            }
        })?;
        #[allow(clippy::type_complexity)]
        let (u_exact, flux): (
            Box<dyn Fn(Vec2<f64>) -> f64>,
            Box<dyn Fn(Vec2<f64>, Vec2<f64>) -> f64>,
        ) = match case {
            ConvergenceCase::Linear => (
                Box::new(|p| 2.0 * p.x - 0.5 * p.y + 0.25),
                Box::new(|_, n| 2.0 * n.x - 0.5 * n.y),
            ),
            ConvergenceCase::QuadraticBiharmonic => (
                Box::new(|p| p.x * p.x + p.y * p.y),
                Box::new(|p, n| 2.0 * (p.x * n.x + p.y * n.y)),
            ),
        };
        let u0: Vec<f64> = mesh
            .boundary_vertices()
            .iter()
            .map(|&v| u_exact(mesh.position(v)))
            .collect();
        let loads = boundary_flux_loads(&mesh, &flux);
        let d0 = system
            .normal_samples_from_loads(&loads)
            .map_err(|e| CliError::Pipeline {
                kind: "solve",
                message: e.to_string(),
            })?;
        let sol = system
            .solve_scalar(&u0, &d0)
            .map_err(|e| CliError::Pipeline {
                kind: "solve",
                message: e.to_string(),
            })?;
        let err = system
            .interior_index()
            .iter()
            .map(|&v| (sol.field[v] - u_exact(mesh.position(v))).abs())
            .fold(0.0f64, f64::max);
        let order = if let Some(prev) = errors.last() {
            (prev / err).ln() / 2.0f64.ln()
        } else {
            f64::NAN
        };
        rows.push((level, n, mesh.n_vertices(), mesh.n_triangles(), err, order));
        errors.push(err);
    }

    match case {
        ConvergenceCase::Linear => {
            // Linear data is reproduced; errors sit at solver-tolerance level.
            for &(level, _, _, _, err, _) in &rows {
                if err > 1e-8 {
                    return Err(CliError::Pipeline {
                        kind: "convergence",
                        message: format!("linear case error {err:e} at level {level}"),
                    });
                }
            }
        }
        ConvergenceCase::QuadraticBiharmonic => {
            for pair in errors.windows(2) {
                if pair[1] >= pair[0] || pair[1].is_nan() {
                    return Err(CliError::Pipeline {
                        kind: "convergence",
                        message: format!("error did not decrease: {:e} -> {:e}", pair[0], pair[1]),
                    });
                }
            }
        }
    }

    let mut csv = String::from("level,n,vertices,triangles,max_interior_error,order\n");
    for (level, n, nv, nt, err, order) in &rows {
        let order_field = if order.is_nan() {
            String::new()
        } else {
            fmt_float(*order)
        };
        csv.push_str(&format!(
            "{level},{n},{nv},{nt},{},{order_field}\n",
            fmt_float(*err)
        ));
    }
    let diagnostics = ConvergenceDiagnostics {
        command: "convergence",
        case: match case {
            ConvergenceCase::Linear => "linear",
            ConvergenceCase::QuadraticBiharmonic => "quadratic-biharmonic",
        },
        levels,
        errors,
        orders: rows.iter().skip(1).map(|r| r.5).collect(),
        solver: SolverSummary::of(config),
    };
    Ok(vec![
        ("convergence.csv".into(), csv.into_bytes()),
        ("diagnostics.json".into(), to_json(&diagnostics)),
    ])
}

#[derive(Serialize)]
struct ParamDiagnostics {
    command: &'static str,
    mesh: MeshSummary,
    side: usize,
    dn_h_min: f64,
    dn_h_max: f64,
    s_range: [f64; 2],
    h_range: [f64; 2],
    warnings: Vec<String>,
}

pub fn cmd_param(config: &JobConfig, side: usize) -> Result<Outputs, CliError> {
    let LoadedInputs { mesh, warnings, .. } = load_inputs(config)?;
    if side >= mesh.n_sides() {
        return Err(CliError::Usage(format!(
            "side {side} out of range ({} sides)",
            mesh.n_sides()
        )));
    }
    let params =
        side_parameterizations(&mesh, config.param_config()).map_err(|e| CliError::Pipeline {
            kind: "param",
            message: e.to_string(),
        })?;
    let sp = &params[side];

    let mut fields_csv = Vec::new();
    write_multi_csv(
        &mut fields_csv,
        "vertex,s,h",
        (0..mesh.n_vertices()).map(|v| (v, vec![sp.s_field[v], sp.h_field[v]])),
    )
    .expect("in-memory write");
    let side_ref = &mesh.sides()[side];
    let mut boundary_csv = Vec::new();
    write_multi_csv(
        &mut boundary_csv,
        "vertex,t,dn_s,dn_h",
        side_ref
            .vertices
            .iter()
            .enumerate()
            .map(|(k, &v)| (v, vec![side_ref.params[k], sp.dn_s[k], sp.dn_h[k]])),
    )
    .expect("in-memory write");

    let range = |xs: &[f64]| {
        [
            xs.iter().cloned().fold(f64::INFINITY, f64::min),
            xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        ]
    };
    let diagnostics = ParamDiagnostics {
        command: "param",
        mesh: MeshSummary::of(&mesh),
        side,
        dn_h_min: sp.dn_h.iter().cloned().fold(f64::INFINITY, f64::min),
        dn_h_max: sp.dn_h.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        s_range: range(&sp.s_field),
        h_range: range(&sp.h_field),
        warnings,
    };
    Ok(vec![
        (format!("param_s{side}.csv"), fields_csv),
        (format!("param_s{side}_boundary.csv"), boundary_csv),
        ("diagnostics.json".into(), to_json(&diagnostics)),
    ])
}
