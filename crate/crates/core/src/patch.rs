//! End-to-end patch construction: sample ribbon boundary data through the
//! harmonic reparameterizations, solve the biharmonic system, and report the
//! lifted surface with curvature and blend-field diagnostics.

use serde::Serialize;
use thiserror::Error;

use crate::assembly::{BiharmonicSystem, BoundaryConditions, SolveConfig, SolveError};
use crate::geom::{Vec2, Vec3};
use crate::mesh::{inward_boundary_normals, MeshQuality, TriMesh};
use crate::num::Real;
use crate::param::{normal_derivative, side_parameterizations, ParamConfig, ParamError, SideParam};
use crate::spline::{RibbonSet, SplineError};

#[derive(Debug, Error)]
pub enum PatchError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error("mesh has {mesh_sides} sides but the ribbon set defines {ribbons}")]
    RibbonCount { mesh_sides: usize, ribbons: usize },
    #[error("mesh has no side assignment; supply a sidecar or domain corners")]
    NoSides,
    #[error(
        "ribbon corner mismatch at boundary vertex {vertex} between sides {side_a} and {side_b}: gap {gap} exceeds tolerance {tolerance}"
    )]
    CornerMismatch {
        vertex: usize,
        side_a: usize,
        side_b: usize,
        gap: f64,
        tolerance: f64,
    },
    #[error("control point (side {side}, row {row}, column {col}) out of range")]
    BadControlPoint { side: usize, row: usize, col: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct PatchConfig {
    pub param: ParamConfig,
    pub solve: SolveConfig,
    /// Corner position tolerance relative to the ribbon bounding-box scale.
    pub corner_tolerance: f64,
}

impl Default for PatchConfig {
    fn default() -> Self {
        Self {
            param: ParamConfig::default(),
            solve: SolveConfig::default(),
            corner_tolerance: 1e-6,
        }
    }
}

/// Corner agreement measured on the sampled boundary data.
#[derive(Clone, Debug, Serialize)]
pub struct CornerDiagnostic {
    pub vertex: usize,
    pub side_a: usize,
    pub side_b: usize,
    /// Distance between the two sides' position samples at the corner.
    pub position_gap: f64,
    /// Distance between the two sides' normal-derivative samples.
    pub derivative_gap: f64,
}

/// Weak enforcement check: one-sided finite differences of the solved patch
/// against the prescribed cross-derivatives, per side.
#[derive(Clone, Debug, Serialize)]
pub struct NormalMismatch {
    pub side: usize,
    pub max: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PatchDiagnostics {
    pub solver_residual: f64,
    pub min_angle_degrees: f64,
    pub n_obtuse_triangles: usize,
    pub domain_area: f64,
    pub corners: Vec<CornerDiagnostic>,
    pub normal_mismatch: Vec<NormalMismatch>,
    pub warnings: Vec<String>,
}

/// The lifted patch over the domain mesh.
#[derive(Clone, Debug)]
pub struct PatchResult<T> {
    pub surface_positions: Vec<Vec3<T>>,
    pub mean_curvature: Vec<T>,
    pub diagnostics: PatchDiagnostics,
}

/// Samples boundary conditions from the ribbons through the side
/// parameterizations: `u0 = R_i(t, 0)` and `d0` by the normal-derivative
/// chain rule; corner vertices average their two sides' samples (which must
/// agree in position up to `corner_tolerance`, relative to the ribbon scale).
pub fn sample_boundary_conditions<T: Real>(
    mesh: &TriMesh<T>,
    ribbons: &RibbonSet<T>,
    params: &[SideParam<T>],
    corner_tolerance: f64,
) -> Result<(BoundaryConditions<T>, Vec<CornerDiagnostic>), PatchError> {
    let tol = T::of(corner_tolerance) * ribbons.scale();
    sample_with_tolerance(mesh, ribbons, params, Some(tol))
}

fn sample_with_tolerance<T: Real>(
    mesh: &TriMesh<T>,
    ribbons: &RibbonSet<T>,
    params: &[SideParam<T>],
    tolerance: Option<T>,
) -> Result<(BoundaryConditions<T>, Vec<CornerDiagnostic>), PatchError> {
    if !mesh.has_sides() {
        return Err(PatchError::NoSides);
    }
    if mesh.n_sides() != ribbons.sides.len() {
        return Err(PatchError::RibbonCount {
            mesh_sides: mesh.n_sides(),
            ribbons: ribbons.sides.len(),
        });
    }
    assert_eq!(
        params.len(),
        mesh.n_sides(),
        "one parameterization per side"
    );

    let nb = mesh.n_boundary_vertices();
    let mut u0 = vec![Vec3::zero(); nb];
    let mut d0 = vec![Vec3::zero(); nb];
    #[allow(clippy::type_complexity)]
    let mut first_contribution: Vec<Option<(usize, Vec3<T>, Vec3<T>)>> = vec![None; nb];
    let mut corners = Vec::new();

    for (si, side) in mesh.sides().iter().enumerate() {
        let ribbon = &ribbons.sides[si];
        let sp = &params[si];
        for (k, &v) in side.vertices.iter().enumerate() {
            let t = side.params[k];
            let pos = ribbon.eval(t, T::zero())?;
            let partials = ribbon.eval_partials(t, T::zero())?;
            let der = normal_derivative(sp.dn_s[k], sp.dn_h[k], partials);
            let bp = mesh.boundary_position(v).expect("side vertex on boundary");
            match first_contribution[bp] {
                None => {
                    first_contribution[bp] = Some((si, pos, der));
                    u0[bp] = pos;
                    d0[bp] = der;
                }
                Some((first_side, first_pos, first_der)) => {
                    let gap = (pos - first_pos).norm();
                    corners.push(CornerDiagnostic {
                        vertex: v,
                        side_a: first_side,
                        side_b: si,
                        position_gap: gap.to_f64(),
                        derivative_gap: (der - first_der).norm().to_f64(),
                    });
                    if let Some(tol) = tolerance {
                        if gap > tol {
                            return Err(PatchError::CornerMismatch {
                                vertex: v,
                                side_a: first_side,
                                side_b: si,
                                gap: gap.to_f64(),
                                tolerance: tol.to_f64(),
                            });
                        }
                    }
                    let half = T::of(0.5);
                    u0[bp] = (first_pos + pos) * half;
                    d0[bp] = (first_der + der) * half;
                }
            }
        }
    }
    Ok((BoundaryConditions { u0, d0 }, corners))
}

/// Full pipeline: parameterize every side, sample boundary conditions, solve,
/// and attach mean curvature and diagnostics.
pub fn build_patch<T: Real>(
    mesh: &TriMesh<T>,
    ribbons: &RibbonSet<T>,
    config: PatchConfig,
) -> Result<PatchResult<T>, PatchError> {
    let params = side_parameterizations(mesh, config.param)?;
    let system = BiharmonicSystem::build(mesh, config.solve)?;
    build_patch_with(&system, ribbons, &params, config)
}

/// Pipeline against a pre-built system and parameterizations.
pub fn build_patch_with<T: Real>(
    system: &BiharmonicSystem<'_, T>,
    ribbons: &RibbonSet<T>,
    params: &[SideParam<T>],
    config: PatchConfig,
) -> Result<PatchResult<T>, PatchError> {
    let mesh = system.mesh();
    let (bc, corners) = sample_boundary_conditions(mesh, ribbons, params, config.corner_tolerance)?;
    let solution = system.solve_biharmonic(&bc)?;
    let mean_curvature = mean_curvature_3d(mesh.triangles(), &solution.positions);
    let quality = MeshQuality::of(mesh);
    let normal_mismatch = normal_derivative_mismatch(mesh, &solution.positions, &bc);
    let diagnostics = PatchDiagnostics {
        solver_residual: solution.relative_residual.to_f64(),
        min_angle_degrees: quality.min_angle_degrees,
        n_obtuse_triangles: quality.n_obtuse_triangles,
        domain_area: quality.total_area,
        corners,
        normal_mismatch,
        warnings: Vec::new(),
    };
    Ok(PatchResult {
        surface_positions: solution.positions,
        mean_curvature,
        diagnostics,
    })
}

/// Sensitivity of the patch to a unit motion of one ribbon control point:
/// the scalar field obtained by re-sampling the (linear-in-control-points)
/// boundary data with that point displaced and solving. Fields over all
/// control points sum to 1 at every vertex; individual fields may be
/// negative.
pub fn blend_function_field<T: Real>(
    system: &BiharmonicSystem<'_, T>,
    ribbons: &RibbonSet<T>,
    params: &[SideParam<T>],
    control_point: (usize, usize, usize),
) -> Result<Vec<T>, PatchError> {
    let (side, row, col) = control_point;
    let ok = side < ribbons.sides.len()
        && row < ribbons.sides[side].n_rows()
        && col < ribbons.sides[side].n_cols();
    if !ok {
        return Err(PatchError::BadControlPoint { side, row, col });
    }
    let mesh = system.mesh();
    let (base, _) = sample_with_tolerance(mesh, ribbons, params, None)?;
    let mut perturbed_set = ribbons.clone();
    let unit = Vec3::new(T::one(), T::zero(), T::zero());
    let mut net = perturbed_set.sides[side].control_net().to_vec();
    net[row][col] += unit;
    perturbed_set.sides[side] = crate::spline::Ribbon::new(
        perturbed_set.sides[side].degree_s(),
        perturbed_set.sides[side].degree_h(),
        perturbed_set.sides[side].knots_s().to_vec(),
        perturbed_set.sides[side].knots_h().to_vec(),
        net,
    )?;
    let (moved, _) = sample_with_tolerance(mesh, &perturbed_set, params, None)?;
    // Boundary data is linear in control points, so the difference is the
    // exact sensitivity; only the x coordinate was displaced.
    let u0: Vec<T> = moved
        .u0
        .iter()
        .zip(&base.u0)
        .map(|(&a, &b)| a.x - b.x)
        .collect();
    let d0: Vec<T> = moved
        .d0
        .iter()
        .zip(&base.d0)
        .map(|(&a, &b)| a.x - b.x)
        .collect();
    Ok(system.solve_scalar(&u0, &d0)?.field)
}

/// Enumerates `(side, row, col)` for every control point of the set.
pub fn control_point_ids<T: Real>(ribbons: &RibbonSet<T>) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for (si, r) in ribbons.sides.iter().enumerate() {
        for row in 0..r.n_rows() {
            for col in 0..r.n_cols() {
                out.push((si, row, col));
            }
        }
    }
    out
}

/// Discrete mean curvature of the lifted mesh: the cotangent mean-curvature
/// vector projected onto the area-weighted vertex normal, over twice the
/// barycentric vertex area. The projection (rather than the vector norm)
/// keeps boundary vertices finite and makes exactly planar patches report
/// exactly zero.
pub fn mean_curvature_3d<T: Real>(triangles: &[[usize; 3]], positions: &[Vec3<T>]) -> Vec<T> {
    let n = positions.len();
    let mut k_vec = vec![Vec3::zero(); n];
    let mut area = vec![T::zero(); n];
    let mut normal = vec![Vec3::zero(); n];
    let half = T::of(0.5);
    let third = T::of(1.0 / 3.0);
    for tri in triangles {
        let p = [positions[tri[0]], positions[tri[1]], positions[tri[2]]];
        let cross = (p[1] - p[0]).cross(p[2] - p[0]);
        let double_area = cross.norm();
        if double_area == T::zero() {
            continue; // degenerate lift contributes nothing
        }
        for corner in 0..3 {
            let i = tri[corner];
            let j = tri[(corner + 1) % 3];
            let k = tri[(corner + 2) % 3];
            let u = p[(corner + 1) % 3] - p[corner];
            let v = p[(corner + 2) % 3] - p[corner];
            // cot of the 3D angle at this corner weights the opposite edge
            let cot = u.dot(v) / double_area;
            let w = half * cot;
            k_vec[j] += (positions[j] - positions[k]) * w;
            k_vec[k] += (positions[k] - positions[j]) * w;
            area[i] += double_area * half * third;
            normal[i] += cross; // area-weighted face normal
        }
    }
    (0..n)
        .map(|i| {
            let n_i = match normal[i].normalized() {
                Some(u) => u,
                None => return T::zero(),
            };
            let a = area[i];
            if a > T::zero() {
                k_vec[i].dot(n_i) / (a + a)
            } else {
                T::zero()
            }
        })
        .collect()
}

/// One-sided finite-difference check of the prescribed cross-derivatives:
/// steps from each boundary vertex into its incident triangle along the
/// inward normal and compares the directional difference quotient of the
/// solved patch against `d0`.
pub fn normal_derivative_mismatch<T: Real>(
    mesh: &TriMesh<T>,
    positions: &[Vec3<T>],
    bc: &BoundaryConditions<T>,
) -> Vec<NormalMismatch> {
    let normals = inward_boundary_normals(mesh);
    let mut out = Vec::new();
    for (si, side) in mesh.sides().iter().enumerate() {
        let mut max = 0.0f64;
        let mut sum = 0.0f64;
        let mut count = 0usize;
        // Corners are excluded: their data is the average of two sides and
        // has no single prescribed derivative.
        for &v in &side.vertices[1..side.vertices.len() - 1] {
            let bp = mesh.boundary_position(v).expect("boundary vertex");
            let n = normals[bp];
            let Some((triangle, step)) = inward_ray_triangle(mesh, v, n) else {
                continue;
            };
            let q = mesh.position(v) + n * step;
            let value = interpolate_in_triangle(mesh, triangle, q, positions);
            let fd = (value - positions[v]) / step;
            let gap = (fd - bc.d0[bp]).norm().to_f64();
            max = max.max(gap);
            sum += gap;
            count += 1;
        }
        out.push(NormalMismatch {
            side: si,
            max,
            mean: if count > 0 { sum / count as f64 } else { 0.0 },
        });
    }
    out
}

/// Finds an incident triangle containing the inward ray from a boundary
/// vertex and a safe step length inside it.
fn inward_ray_triangle<T: Real>(
    mesh: &TriMesh<T>,
    vertex: usize,
    direction: Vec2<T>,
) -> Option<(usize, T)> {
    let p = mesh.position(vertex);
    let slack = T::of(-1e-9);
    for &t in mesh.vertex_triangles(vertex) {
        let tri = mesh.triangles()[t];
        let corner = tri.iter().position(|&w| w == vertex).unwrap();
        let a = mesh.position(tri[(corner + 1) % 3]) - p;
        let b = mesh.position(tri[(corner + 2) % 3]) - p;
        let det = a.cross(b);
        if det == T::zero() {
            continue;
        }
        // direction = alpha a + beta b
        let alpha = direction.cross(b) / det;
        let beta = a.cross(direction) / det;
        if alpha >= slack && beta >= slack {
            let reach = T::one() / (alpha.max(T::zero()) + beta.max(T::zero()) + T::of(1e-30));
            let step = reach * T::of(0.5);
            return Some((t, step));
        }
    }
    None
}

fn interpolate_in_triangle<T: Real>(
    mesh: &TriMesh<T>,
    triangle: usize,
    point: Vec2<T>,
    values: &[Vec3<T>],
) -> Vec3<T> {
    let tri = mesh.triangles()[triangle];
    let p0 = mesh.position(tri[0]);
    let p1 = mesh.position(tri[1]);
    let p2 = mesh.position(tri[2]);
    let det = (p1 - p0).cross(p2 - p0);
    let l1 = (point - p0).cross(p2 - p0) / det;
    let l2 = (p1 - p0).cross(point - p0) / det;
    let l0 = T::one() - l1 - l2;
    values[tri[0]] * l0 + values[tri[1]] * l1 + values[tri[2]] * l2
}
