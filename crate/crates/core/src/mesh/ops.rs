//! Per-element differential geometry: cotangent stiffness, mass matrices,
//! gradients, and boundary normals.

use crate::geom::Vec2;
use crate::num::Real;
use crate::sparse::{SparseMatrix, TripletBuilder};

use super::TriMesh;

/// Cotangent Laplace (stiffness) matrix: `L_ij = -(cot a_ij + cot b_ij)/2`
/// for edge `(i,j)` with opposite angles `a`, `b` (one term on boundary
/// edges), diagonal set so rows sum to zero. Symmetric positive semidefinite.
/// Obtuse triangles are accepted; off-diagonals may then be positive.
pub fn cotangent_weights<T: Real>(mesh: &TriMesh<T>) -> SparseMatrix<T> {
    let n = mesh.n_vertices();
    let mut b = TripletBuilder::new(n, n);
    let half = T::of(0.5);
    for tri in mesh.triangles() {
        for corner in 0..3 {
            let i = tri[corner];
            let j = tri[(corner + 1) % 3];
            let k = tri[(corner + 2) % 3];
            let u = mesh.position(j) - mesh.position(i);
            let v = mesh.position(k) - mesh.position(i);
            // cot of the angle at corner i, opposite edge (j, k)
            let cot = u.dot(v) / u.cross(v);
            let w = half * cot;
            b.push(j, k, -w);
            b.push(k, j, -w);
            b.push(j, j, w);
            b.push(k, k, w);
        }
    }
    b.build()
}

/// Diagonal (barycentric) mass matrix: entry `i` is one third of the area of
/// the triangles incident to vertex `i`. Equals the consistent-mass row sums.
pub fn lumped_mass<T: Real>(mesh: &TriMesh<T>) -> SparseMatrix<T> {
    let n = mesh.n_vertices();
    let third = T::of(1.0 / 3.0);
    let mut diag = vec![T::zero(); n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let share = mesh.triangle_area(t) * third;
        for &v in tri {
            diag[v] += share;
        }
    }
    SparseMatrix::from_diagonal(&diag)
}

/// Consistent mass matrix `M_ij = integral of phi_i phi_j`; per element
/// `A/12 * [[2,1,1],[1,2,1],[1,1,2]]`.
pub fn consistent_mass<T: Real>(mesh: &TriMesh<T>) -> SparseMatrix<T> {
    let n = mesh.n_vertices();
    let mut b = TripletBuilder::new(n, n);
    let twelfth = T::of(1.0 / 12.0);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let a = mesh.triangle_area(t) * twelfth;
        for i in 0..3 {
            for j in 0..3 {
                let w = if i == j { a + a } else { a };
                b.push(tri[i], tri[j], w);
            }
        }
    }
    b.build()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BoundaryMassMode {
    /// Exact integrals of hat products over boundary edges:
    /// per edge of length `l`, the 2x2 block `[l/3, l/6; l/6, l/3]`.
    #[default]
    Consistent,
    /// Row-sum lumping: `l/2` to each endpoint.
    Lumped,
}

/// Boundary mass matrix `N_ij = integral over the boundary of phi_i phi_j`.
/// Supported on boundary vertices only; interior rows are empty.
pub fn boundary_mass<T: Real>(mesh: &TriMesh<T>, mode: BoundaryMassMode) -> SparseMatrix<T> {
    let n = mesh.n_vertices();
    let mut b = TripletBuilder::new(n, n);
    let third = T::of(1.0 / 3.0);
    let sixth = T::of(1.0 / 6.0);
    let half = T::of(0.5);
    for cycle in mesh.boundary_loops() {
        for i in 0..cycle.len() {
            let a = cycle[i];
            let c = cycle[(i + 1) % cycle.len()];
            let len = (mesh.position(c) - mesh.position(a)).norm();
            match mode {
                BoundaryMassMode::Consistent => {
                    b.push(a, a, len * third);
                    b.push(c, c, len * third);
                    b.push(a, c, len * sixth);
                    b.push(c, a, len * sixth);
                }
                BoundaryMassMode::Lumped => {
                    b.push(a, a, len * half);
                    b.push(c, c, len * half);
                }
            }
        }
    }
    b.build()
}

/// Per-triangle coefficient blocks mapping the three vertex values of a
/// piecewise-linear function to its constant gradient on the face.
#[derive(Clone, Debug)]
pub struct FaceGradients<T> {
    /// `coefficients[t][corner]` is the gradient of that corner's hat
    /// function restricted to triangle `t`.
    coefficients: Vec<[Vec2<T>; 3]>,
    triangles: Vec<[usize; 3]>,
    areas: Vec<T>,
}

impl<T: Real> FaceGradients<T> {
    pub fn new(mesh: &TriMesh<T>) -> Self {
        let mut coefficients = Vec::with_capacity(mesh.n_triangles());
        let mut areas = Vec::with_capacity(mesh.n_triangles());
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let area = mesh.triangle_area(t);
            let inv = T::one() / (area + area);
            let mut block = [Vec2::zero(); 3];
            for corner in 0..3 {
                let j = tri[(corner + 1) % 3];
                let k = tri[(corner + 2) % 3];
                block[corner] = (mesh.position(k) - mesh.position(j)).perp() * inv;
            }
            coefficients.push(block);
            areas.push(area);
        }
        Self {
            coefficients,
            triangles: mesh.triangles().to_vec(),
            areas,
        }
    }

    pub fn face_gradient(&self, t: usize, field: &[T]) -> Vec2<T> {
        let tri = self.triangles[t];
        let block = self.coefficients[t];
        block[0] * field[tri[0]] + block[1] * field[tri[1]] + block[2] * field[tri[2]]
    }

    pub fn apply(&self, field: &[T]) -> Vec<Vec2<T>> {
        (0..self.triangles.len())
            .map(|t| self.face_gradient(t, field))
            .collect()
    }

    pub fn area(&self, t: usize) -> T {
        self.areas[t]
    }
}

/// Constant per-face gradients of the piecewise-linear interpolant.
pub fn face_gradients<T: Real>(mesh: &TriMesh<T>, field: &[T]) -> Vec<Vec2<T>> {
    assert_eq!(field.len(), mesh.n_vertices(), "field length mismatch");
    FaceGradients::new(mesh).apply(field)
}

/// Area-weighted average of incident face gradients at every vertex.
pub fn vertex_gradients<T: Real>(mesh: &TriMesh<T>, field: &[T]) -> Vec<Vec2<T>> {
    assert_eq!(field.len(), mesh.n_vertices(), "field length mismatch");
    let ops = FaceGradients::new(mesh);
    let per_face = ops.apply(field);
    (0..mesh.n_vertices())
        .map(|v| {
            let mut acc = Vec2::zero();
            let mut area = T::zero();
            for &t in mesh.vertex_triangles(v) {
                acc += per_face[t] * ops.area(t);
                area += ops.area(t);
            }
            acc / area
        })
        .collect()
}

/// Unit inward normals at boundary vertices (in [`TriMesh::boundary_vertices`]
/// order): the normalized average of the two incident edge normals, which on
/// straight boundary runs is the exact inward normal and at corners the angle
/// bisector.
pub fn inward_boundary_normals<T: Real>(mesh: &TriMesh<T>) -> Vec<Vec2<T>> {
    per_boundary_vertex_normals(mesh, false)
}

/// Hat-integrated inward normals `g_v = integral of phi_v n ds` (not unit):
/// each incident boundary edge contributes half its length times its inward
/// normal. These are the exact boundary loads of a linear field, satisfying
/// `(L x)_v = -g_v . e_x` at every boundary vertex.
pub fn integrated_inward_normals<T: Real>(mesh: &TriMesh<T>) -> Vec<Vec2<T>> {
    per_boundary_vertex_normals(mesh, true)
}

fn per_boundary_vertex_normals<T: Real>(mesh: &TriMesh<T>, integrated: bool) -> Vec<Vec2<T>> {
    let half = T::of(0.5);
    let mut out = vec![Vec2::zero(); mesh.n_boundary_vertices()];
    for cycle in mesh.boundary_loops() {
        let len = cycle.len();
        for i in 0..len {
            let v = cycle[i];
            let prev = cycle[(i + len - 1) % len];
            let next = cycle[(i + 1) % len];
            // Boundary edges are directed with the domain on the left, so the
            // inward normal of an edge is its direction rotated by +90 deg.
            let d_prev = mesh.position(v) - mesh.position(prev);
            let d_next = mesh.position(next) - mesh.position(v);
            let pos = mesh.boundary_position(v).unwrap();
            if integrated {
                out[pos] = (d_prev.perp() + d_next.perp()) * half;
            } else {
                let n_prev = d_prev
                    .normalized()
                    .expect("zero-length boundary edge")
                    .perp();
                let n_next = d_next
                    .normalized()
                    .expect("zero-length boundary edge")
                    .perp();
                out[pos] = (n_prev + n_next)
                    .normalized()
                    .expect("degenerate boundary corner (reversing edges)");
            }
        }
    }
    out
}

/// Mesh quality numbers reported in CLI diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct MeshQuality {
    pub min_angle_degrees: f64,
    pub n_obtuse_triangles: usize,
    pub total_area: f64,
}

impl MeshQuality {
    pub fn of<T: Real>(mesh: &TriMesh<T>) -> Self {
        let mut min_angle = f64::INFINITY;
        let mut n_obtuse = 0usize;
        for tri in mesh.triangles() {
            let mut obtuse = false;
            for corner in 0..3 {
                let i = tri[corner];
                let j = tri[(corner + 1) % 3];
                let k = tri[(corner + 2) % 3];
                let u = mesh.position(j) - mesh.position(i);
                let v = mesh.position(k) - mesh.position(i);
                let angle = u.cross(v).to_f64().atan2(u.dot(v).to_f64());
                min_angle = min_angle.min(angle);
                if angle > std::f64::consts::FRAC_PI_2 {
                    obtuse = true;
                }
            }
            if obtuse {
                n_obtuse += 1;
            }
        }
        Self {
            min_angle_degrees: min_angle.to_degrees(),
            n_obtuse_triangles: n_obtuse,
            total_area: mesh.total_area().to_f64(),
        }
    }

    /// True when no triangle has an angle above 90 degrees, the condition for
    /// the discrete maximum principle of the cotangent Laplacian.
    pub fn is_non_obtuse(&self) -> bool {
        self.n_obtuse_triangles == 0
    }
}
