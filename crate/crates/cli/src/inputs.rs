//! Input loading: OFF mesh, ribbon JSON, side assignment, and the
//! mesh-to-ribbon alignment.

use ribbonpatch::mesh::{parse_side_records, TriMesh};
use ribbonpatch::spline::{ConnectivityReport, LoopSpec, RibbonSet};

use crate::job::JobConfig;
use crate::CliError;

pub struct LoadedInputs {
    pub mesh: TriMesh<f64>,
    /// Ribbons reordered so that ribbon `k` belongs to mesh side `k`.
    pub ribbons: RibbonSet<f64>,
    pub connectivity: ConnectivityReport,
    pub warnings: Vec<String>,
}

pub fn load_inputs(config: &JobConfig) -> Result<LoadedInputs, CliError> {
    let mesh_path = config.require_mesh()?;
    let ribbon_path = config.require_ribbons()?;
    let mesh = TriMesh::<f64>::from_off_file(mesh_path).map_err(|e| CliError::Pipeline {
        kind: "mesh",
        message: format!("{}: {e}", mesh_path.display()),
    })?;
    let mut ribbons =
        RibbonSet::<f64>::from_json_file(ribbon_path).map_err(|e| CliError::Pipeline {
            kind: "ribbon",
            message: format!("{}: {e}", ribbon_path.display()),
        })?;
    let connectivity = ribbons
        .orient_and_check(config.corner_tolerance)
        .map_err(|e| CliError::Pipeline {
            kind: "ribbon",
            message: e.to_string(),
        })?;
    let mut warnings = connectivity.warnings.clone();

    let (mesh, ribbons) = match &config.sidecar {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Pipeline {
                kind: "sidecar",
                message: format!("{}: {e}", path.display()),
            })?;
            let records = parse_side_records::<f64>(&text).map_err(|e| CliError::Pipeline {
                kind: "sidecar",
                message: e.to_string(),
            })?;
            let mesh = mesh
                .with_sides_from_records(&records)
                .map_err(|e| CliError::Pipeline {
                    kind: "sidecar",
                    message: e.to_string(),
                })?;
            (mesh, ribbons)
        }
        None => align_by_corners(mesh, ribbons, &mut warnings)?,
    };

    if mesh.n_sides() != ribbons.sides.len() {
        return Err(CliError::Pipeline {
            kind: "ribbon",
            message: format!(
                "mesh has {} sides but the ribbon set defines {}",
                mesh.n_sides(),
                ribbons.sides.len()
            ),
        });
    }
    Ok(LoadedInputs {
        mesh,
        ribbons,
        connectivity,
        warnings,
    })
}

/// Splits the mesh boundary at the ribbon file's planar corner positions.
/// Ribbon loops are matched to mesh loops by nearest-corner projection, and
/// the ribbons are reordered into mesh side order.
fn align_by_corners(
    mesh: TriMesh<f64>,
    ribbons: RibbonSet<f64>,
    warnings: &mut Vec<String>,
) -> Result<(TriMesh<f64>, RibbonSet<f64>), CliError> {
    let n_loops = mesh.boundary_loops().len();
    if ribbons.loops.len() != n_loops {
        return Err(CliError::Pipeline {
            kind: "ribbon",
            message: format!(
                "mesh has {} boundary loops but the ribbon set defines {}",
                n_loops,
                ribbons.loops.len()
            ),
        });
    }
    for (k, spec) in ribbons.loops.iter().enumerate() {
        if spec.corners_uv.is_none() {
            return Err(CliError::Pipeline {
                kind: "ribbon",
                message: format!("loop {k} has no corners_uv; supply domain corners or a sidecar"),
            });
        }
    }

    // Score each ribbon loop against each mesh loop by summed distance of
    // the corners to their nearest boundary vertices.
    let mut assignment: Vec<Option<usize>> = vec![None; n_loops];
    let mut used = vec![false; ribbons.loops.len()];
    for (mi, cycle) in mesh.boundary_loops().iter().enumerate() {
        let mut best: Option<(f64, usize)> = None;
        for (ri, spec) in ribbons.loops.iter().enumerate() {
            if used[ri] {
                continue;
            }
            let corners = spec.corners_uv.as_ref().unwrap();
            let score: f64 = corners
                .iter()
                .map(|c| {
                    cycle
                        .iter()
                        .map(|&v| (mesh.position(v) - *c).norm())
                        .fold(f64::INFINITY, f64::min)
                })
                .sum();
            if best.is_none_or(|(s, _)| score < s) {
                best = Some((score, ri));
            }
        }
        let (score, ri) = best.expect("at least one unused ribbon loop");
        used[ri] = true;
        assignment[mi] = Some(ri);
        if ri != mi {
            warnings.push(format!(
                "ribbon loop {ri} matched to mesh boundary loop {mi} (distance score {score:.3e})"
            ));
        }
    }

    let corner_lists: Vec<Vec<ribbonpatch::geom::Vec2<f64>>> = assignment
        .iter()
        .map(|ri| ribbons.loops[ri.unwrap()].corners_uv.clone().unwrap())
        .collect();
    let mesh = mesh
        .with_sides_from_corners(&corner_lists)
        .map_err(|e| CliError::Pipeline {
            kind: "mesh",
            message: e.to_string(),
        })?;

    // Reorder ribbons into mesh side order (loop by loop).
    let mut sides = Vec::with_capacity(ribbons.sides.len());
    let mut loops = Vec::with_capacity(n_loops);
    for ri in assignment.iter().map(|r| r.unwrap()) {
        let spec = &ribbons.loops[ri];
        let first = sides.len();
        for &s in &spec.sides {
            sides.push(ribbons.sides[s].clone());
        }
        loops.push(LoopSpec {
            sides: (first..sides.len()).collect(),
            corners_uv: spec.corners_uv.clone(),
        });
    }
    Ok((mesh, RibbonSet { sides, loops }))
}
