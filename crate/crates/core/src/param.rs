//! Harmonic reparameterization of ribbons onto the domain.
//!
//! Each side `i` gets a map `(u,v) -> (s_i, h_i)` whose components are
//! discrete harmonic fields: `s_i` interpolates the side's arc-length
//! parameter, `h_i` vanishes on the side and is 1 on the rest of the
//! boundary. Only the boundary normal derivatives of the map enter the
//! patch construction.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::geom::{Vec2, Vec3};
use crate::ldlt::{LdltError, LdltFactor};
use crate::mesh::{inward_boundary_normals, vertex_gradients, FaceGradients, TriMesh};
use crate::num::Real;
use crate::sparse::SparseMatrix;

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("harmonic factorization failed: {0}")]
    Factor(#[from] LdltError),
    #[error("harmonic solve residual {residual} exceeds tolerance {tolerance}")]
    Residual { residual: f64, tolerance: f64 },
    #[error("boundary vertex {vertex} has no prescribed Dirichlet value")]
    MissingDirichlet { vertex: usize },
    #[error("mesh has no side assignment")]
    NoSides,
    #[error("side {side} out of range, mesh has {n_sides} sides")]
    BadSide { side: usize, n_sides: usize },
}

/// Dirichlet extension of the arc parameter `s_i` off its side.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SExtension {
    /// Hold 0/1 on the two adjacent sides and ramp linearly (by boundary arc
    /// length) across the remaining sides; other loops sit at 1/2.
    #[default]
    ClampLinear,
    /// Arc parameter of the nearest point on the side's polyline.
    Nearest,
}

/// Estimator for the boundary normal derivatives of the parameter fields.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GradientMode {
    /// Area-weighted average of incident face gradients.
    #[default]
    AreaWeightedVertex,
    /// Unweighted average of the gradients of the triangles carrying the
    /// side's boundary edges at the vertex.
    BoundaryOneSided,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParamConfig {
    pub s_extension: SExtension,
    pub gradient_mode: GradientMode,
}

/// Harmonic fields of one side plus their boundary normal derivatives.
#[derive(Clone, Debug)]
pub struct SideParam<T> {
    pub side_index: usize,
    /// Per-vertex harmonic extension of the arc parameter.
    pub s_field: Vec<T>,
    /// Per-vertex harmonic field vanishing on the side, 1 elsewhere on the boundary.
    pub h_field: Vec<T>,
    /// Normal derivative of `s_field` at the side's vertices (aligned with
    /// `Side::vertices`), in parameter per domain unit.
    pub dn_s: Vec<T>,
    /// Normal derivative of `h_field`, same layout.
    pub dn_h: Vec<T>,
}

/// Shared Laplace solver: factors the interior block of the cotangent
/// Laplacian once and serves any number of Dirichlet problems on the mesh.
pub struct HarmonicSolver<'m, T> {
    mesh: &'m TriMesh<T>,
    laplacian: SparseMatrix<T>,
    interior: Vec<usize>,
    factor: Option<LdltFactor<T>>,
    residual_tolerance: T,
}

impl<'m, T: Real> HarmonicSolver<'m, T> {
    pub fn new(mesh: &'m TriMesh<T>) -> Result<Self, ParamError> {
        let laplacian = crate::mesh::cotangent_weights(mesh);
        let interior = mesh.interior_vertices();
        // A connected mesh with nonempty boundary has an SPD interior block.
        let factor = if interior.is_empty() {
            None
        } else {
            Some(LdltFactor::new(&laplacian.submatrix(&interior, &interior))?)
        };
        Ok(Self {
            mesh,
            laplacian,
            interior,
            factor,
            residual_tolerance: T::of(1e-8),
        })
    }

    pub fn mesh(&self) -> &TriMesh<T> {
        self.mesh
    }

    /// Solves `L u = 0` at interior rows given boundary values in
    /// [`TriMesh::boundary_vertices`] order; returns the full vertex field.
    pub fn solve(&self, boundary_values: &[T]) -> Result<Vec<T>, ParamError> {
        assert_eq!(
            boundary_values.len(),
            self.mesh.n_boundary_vertices(),
            "one Dirichlet value per boundary vertex"
        );
        let mut field = vec![T::zero(); self.mesh.n_vertices()];
        for (pos, &v) in self.mesh.boundary_vertices().iter().enumerate() {
            field[v] = boundary_values[pos];
        }
        let Some(factor) = &self.factor else {
            return Ok(field); // no interior vertices
        };
        // rhs = -(L u_b) restricted to interior rows
        let image = self.laplacian.mul_vec(&field);
        let rhs: Vec<T> = self.interior.iter().map(|&v| -image[v]).collect();
        let solution = factor.solve(&rhs);
        for (k, &v) in self.interior.iter().enumerate() {
            field[v] = solution[k];
        }
        // Residual check on the interior rows of the assembled field.
        let full = self.laplacian.mul_vec(&field);
        let scale = rhs.iter().fold(T::one(), |a, &b| a.max(b.abs()));
        let residual = self
            .interior
            .iter()
            .fold(T::zero(), |a, &v| a.max(full[v].abs()))
            / scale;
        if residual > self.residual_tolerance {
            return Err(ParamError::Residual {
                residual: residual.to_f64(),
                tolerance: self.residual_tolerance.to_f64(),
            });
        }
        Ok(field)
    }
}

/// Discrete harmonic interpolation of Dirichlet data given as a map from
/// boundary vertex index to value; every boundary vertex must be present.
pub fn harmonic_field<T: Real>(
    mesh: &TriMesh<T>,
    dirichlet: &HashMap<usize, T>,
) -> Result<Vec<T>, ParamError> {
    let mut values = Vec::with_capacity(mesh.n_boundary_vertices());
    for &v in mesh.boundary_vertices() {
        match dirichlet.get(&v) {
            Some(&x) => values.push(x),
            None => return Err(ParamError::MissingDirichlet { vertex: v }),
        }
    }
    HarmonicSolver::new(mesh)?.solve(&values)
}

/// Chain rule for the normal derivative of a reparameterized ribbon:
/// `dR/dn = dn_s * dR/ds + dn_h * dR/dh`.
pub fn normal_derivative<T: Real>(dn_s: T, dn_h: T, partials: (Vec3<T>, Vec3<T>)) -> Vec3<T> {
    partials.0 * dn_s + partials.1 * dn_h
}

/// Builds the harmonic parameterization of one side.
pub fn side_parameterization<T: Real>(
    solver: &HarmonicSolver<'_, T>,
    side_index: usize,
    config: ParamConfig,
) -> Result<SideParam<T>, ParamError> {
    let mesh = solver.mesh();
    if !mesh.has_sides() {
        return Err(ParamError::NoSides);
    }
    if side_index >= mesh.n_sides() {
        return Err(ParamError::BadSide {
            side: side_index,
            n_sides: mesh.n_sides(),
        });
    }
    let s_values = s_dirichlet(mesh, side_index, config.s_extension);
    let h_values = h_dirichlet(mesh, side_index);
    let s_field = solver.solve(&s_values)?;
    let h_field = solver.solve(&h_values)?;
    let dn_s = side_normal_derivatives(mesh, side_index, &s_field, config.gradient_mode);
    let dn_h = side_normal_derivatives(mesh, side_index, &h_field, config.gradient_mode);
    Ok(SideParam {
        side_index,
        s_field,
        h_field,
        dn_s,
        dn_h,
    })
}

/// Parameterizes every side, sharing one factorization; sides are independent
/// and solved in parallel.
pub fn side_parameterizations<T: Real>(
    mesh: &TriMesh<T>,
    config: ParamConfig,
) -> Result<Vec<SideParam<T>>, ParamError> {
    let solver = HarmonicSolver::new(mesh)?;
    (0..mesh.n_sides())
        .into_par_iter()
        .map(|i| side_parameterization(&solver, i, config))
        .collect()
}

fn h_dirichlet<T: Real>(mesh: &TriMesh<T>, side_index: usize) -> Vec<T> {
    let side = &mesh.sides()[side_index];
    let mut values = vec![T::one(); mesh.n_boundary_vertices()];
    for &v in &side.vertices {
        values[mesh.boundary_position(v).expect("side vertex on boundary")] = T::zero();
    }
    values
}

fn s_dirichlet<T: Real>(mesh: &TriMesh<T>, side_index: usize, mode: SExtension) -> Vec<T> {
    match mode {
        SExtension::ClampLinear => s_dirichlet_clamp_linear(mesh, side_index),
        SExtension::Nearest => s_dirichlet_nearest(mesh, side_index),
    }
}

fn s_dirichlet_clamp_linear<T: Real>(mesh: &TriMesh<T>, side_index: usize) -> Vec<T> {
    let sides = mesh.sides();
    let half = T::of(0.5);
    // Other loops see a constant mid-range value; only behavior near the
    // side matters.
    let mut values = vec![half; mesh.n_boundary_vertices()];
    let pos = |v: usize| mesh.boundary_position(v).expect("boundary vertex");

    // Chain of the loop's sides starting at side_index.
    let chain = loop_chain(mesh, side_index);
    let m = chain.len() - 1; // sides other than side_index
    if m >= 1 {
        let next = &sides[chain[1]];
        let prev = &sides[chain[m]];
        if m == 1 {
            // Two-sided loop: the single opposite side ramps 1 -> 0.
            for (k, &v) in next.vertices.iter().enumerate() {
                values[pos(v)] = T::one() - next.params[k];
            }
        } else {
            for &v in &next.vertices {
                values[pos(v)] = T::one();
            }
            for &v in &prev.vertices {
                values[pos(v)] = T::zero();
            }
            if m == 2 {
                // No middle path: the corner shared by the two adjacent
                // sides takes the midpoint value.
                let corner = *next.vertices.last().unwrap();
                values[pos(corner)] = half;
            } else {
                // Ramp across the middle sides by cumulative arc length.
                let mut lengths = Vec::new();
                let mut total = T::zero();
                for &si in &chain[2..m] {
                    let mut len = T::zero();
                    for w in sides[si].vertices.windows(2) {
                        len += (mesh.position(w[1]) - mesh.position(w[0])).norm();
                    }
                    lengths.push(len);
                    total += len;
                }
                let mut offset = T::zero();
                for (idx, &si) in chain[2..m].iter().enumerate() {
                    let side = &sides[si];
                    let mut cum = offset;
                    for (k, &v) in side.vertices.iter().enumerate() {
                        if k > 0 {
                            cum += (mesh.position(v) - mesh.position(side.vertices[k - 1])).norm();
                        }
                        values[pos(v)] = T::one() - cum / total;
                    }
                    offset += lengths[idx];
                }
            }
        }
    }
    // The side's own parameters last: Dirichlet rows are exact.
    let own = &sides[side_index];
    for (k, &v) in own.vertices.iter().enumerate() {
        values[pos(v)] = own.params[k];
    }
    values
}

fn s_dirichlet_nearest<T: Real>(mesh: &TriMesh<T>, side_index: usize) -> Vec<T> {
    let side = &mesh.sides()[side_index];
    let mut values = vec![T::zero(); mesh.n_boundary_vertices()];
    for (posn, &v) in mesh.boundary_vertices().iter().enumerate() {
        let p = mesh.position(v);
        let mut best = T::infinity();
        let mut best_t = T::zero();
        for k in 0..side.vertices.len() - 1 {
            let a = mesh.position(side.vertices[k]);
            let b = mesh.position(side.vertices[k + 1]);
            let ab = b - a;
            let denom = ab.dot(ab);
            let mut r = if denom > T::zero() {
                (p - a).dot(ab) / denom
            } else {
                T::zero()
            };
            r = r.max(T::zero()).min(T::one());
            let q = a + ab * r;
            let d = (p - q).norm();
            if d < best {
                best = d;
                best_t = side.params[k] + (side.params[k + 1] - side.params[k]) * r;
            }
        }
        values[posn] = best_t;
    }
    // Exact parameters on the side itself.
    for (k, &v) in side.vertices.iter().enumerate() {
        values[mesh.boundary_position(v).expect("boundary vertex")] = side.params[k];
    }
    values
}

/// Sides of the loop containing `side_index`, in traversal order starting
/// at `side_index`.
fn loop_chain<T: Real>(mesh: &TriMesh<T>, side_index: usize) -> Vec<usize> {
    let sides = mesh.sides();
    let li = sides[side_index].loop_index;
    let mut chain = vec![side_index];
    loop {
        let current = &sides[*chain.last().unwrap()];
        let end = *current.vertices.last().unwrap();
        let next = sides
            .iter()
            .enumerate()
            .find(|(si, s)| {
                s.loop_index == li && s.vertices[0] == end && *si != *chain.last().unwrap()
            })
            .map(|(si, _)| si)
            .unwrap_or(side_index);
        if next == side_index {
            break;
        }
        chain.push(next);
    }
    chain
}

fn side_normal_derivatives<T: Real>(
    mesh: &TriMesh<T>,
    side_index: usize,
    field: &[T],
    mode: GradientMode,
) -> Vec<T> {
    let side = &mesh.sides()[side_index];
    let normals = inward_boundary_normals(mesh);
    match mode {
        GradientMode::AreaWeightedVertex => {
            let grads = vertex_gradients(mesh, field);
            side.vertices
                .iter()
                .map(|&v| {
                    let n = normals[mesh.boundary_position(v).expect("boundary vertex")];
                    grads[v].dot(n)
                })
                .collect()
        }
        GradientMode::BoundaryOneSided => {
            let ops = FaceGradients::new(mesh);
            let find_face = |a: usize, b: usize| -> Option<usize> {
                mesh.vertex_triangles(a).iter().copied().find(|&t| {
                    let tri = mesh.triangles()[t];
                    (0..3).any(|e| tri[e] == a && tri[(e + 1) % 3] == b)
                })
            };
            (0..side.vertices.len())
                .map(|k| {
                    let v = side.vertices[k];
                    let mut acc = Vec2::zero();
                    let mut count = 0usize;
                    if k > 0 {
                        if let Some(t) = find_face(side.vertices[k - 1], v) {
                            acc += ops.face_gradient(t, field);
                            count += 1;
                        }
                    }
                    if k + 1 < side.vertices.len() {
                        if let Some(t) = find_face(v, side.vertices[k + 1]) {
                            acc += ops.face_gradient(t, field);
                            count += 1;
                        }
                    }
                    let n = normals[mesh.boundary_position(v).expect("boundary vertex")];
                    (acc / T::of_usize(count.max(1))).dot(n)
                })
                .collect()
        }
    }
}
