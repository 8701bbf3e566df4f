//! Planar triangle meshes: ingestion, boundary topology, side assignment.
//!
//! The domain is a connected triangulated region of the plane, possibly
//! multiply connected. Boundary loops are recovered from edges with a single
//! incident triangle; the outer loop runs counter-clockwise and hole loops
//! clockwise, which is the natural orientation induced by counter-clockwise
//! triangles. Each loop is split into `sides`, one per ribbon, carrying a
//! normalized arc-length parameter; corner vertices belong to both incident
//! sides (with parameter 1 on the incoming side and 0 on the outgoing one).

mod grid;
mod off;
mod ops;

pub use grid::{
    convex_polygon, graded_square, rectangle, sheared_square, square_annulus, unit_square,
    unit_square_symmetric,
};
pub use off::{parse_off, write_off};
pub use ops::{
    boundary_mass, consistent_mass, cotangent_weights, face_gradients, integrated_inward_normals,
    inward_boundary_normals, lumped_mass, vertex_gradients, BoundaryMassMode, FaceGradients,
    MeshQuality,
};

use std::collections::HashMap;

use serde::Deserialize;
use thiserror::Error;

use crate::geom::Vec2;
use crate::num::Real;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("failed to read mesh file: {0}")]
    Io(#[from] std::io::Error),
    #[error("OFF parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("vertex {index} is not planar (z = {z}); the domain must lie in the z=0 plane")]
    NonPlanarVertex { index: usize, z: f64 },
    #[error(
        "triangle {triangle} references vertex {index}, but the mesh has {n_vertices} vertices"
    )]
    IndexOutOfRange {
        triangle: usize,
        index: usize,
        n_vertices: usize,
    },
    #[error("triangle {triangle} is degenerate (zero area)")]
    DegenerateTriangle { triangle: usize },
    #[error("triangle {triangle} has negative signed area; triangles must be counter-clockwise")]
    FlippedTriangle { triangle: usize },
    #[error("non-manifold edge ({a}, {b}): more than two incident triangles")]
    NonManifoldEdge { a: usize, b: usize },
    #[error("non-manifold boundary vertex {vertex}")]
    NonManifoldVertex { vertex: usize },
    #[error("mesh is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("vertex {vertex} is not referenced by any triangle")]
    UnreferencedVertex { vertex: usize },
    #[error("mesh has no boundary; the domain must have at least one boundary loop")]
    NoBoundary,
    #[error("expected exactly one outer (counter-clockwise) boundary loop, found {found}")]
    OuterLoopCount { found: usize },
    #[error("side assignment invalid: {0}")]
    SideAssignment(String),
}

/// One boundary side: a contiguous run of boundary vertices with normalized
/// arc-length parameters. Corner vertices are shared with the adjacent sides.
#[derive(Clone, Debug)]
pub struct Side<T> {
    pub loop_index: usize,
    /// Vertex indices along the loop, including both corners.
    pub vertices: Vec<usize>,
    /// Monotone parameters in `[0, 1]`; first is 0, last is 1.
    pub params: Vec<T>,
}

/// Immutable planar triangulation with boundary topology.
#[derive(Clone, Debug)]
pub struct TriMesh<T> {
    vertices: Vec<Vec2<T>>,
    triangles: Vec<[usize; 3]>,
    boundary_loops: Vec<Vec<usize>>,
    boundary_vertices: Vec<usize>,
    boundary_position: Vec<usize>, // global index -> position in boundary_vertices, or usize::MAX
    vertex_triangles: Vec<Vec<usize>>,
    sides: Vec<Side<T>>,
}

impl<T: Real> TriMesh<T> {
    /// Builds a mesh from raw geometry, validating orientation, manifoldness,
    /// connectivity, and extracting boundary loops.
    pub fn new(vertices: Vec<Vec2<T>>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let n = vertices.len();
        let mut referenced = vec![false; n];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= n {
                    return Err(MeshError::IndexOutOfRange {
                        triangle: t,
                        index: v,
                        n_vertices: n,
                    });
                }
                referenced[v] = true;
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::DegenerateTriangle { triangle: t });
            }
            let area = signed_area(&vertices, tri);
            if area == T::zero() {
                return Err(MeshError::DegenerateTriangle { triangle: t });
            }
            if area < T::zero() {
                return Err(MeshError::FlippedTriangle { triangle: t });
            }
        }
        if let Some(v) = referenced.iter().position(|&r| !r) {
            return Err(MeshError::UnreferencedVertex { vertex: v });
        }

        // Directed edges; a duplicate directed edge means a non-manifold fan.
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &triangles {
            for e in 0..3 {
                let a = tri[e];
                let b = tri[(e + 1) % 3];
                if directed.insert((a, b), a).is_some() {
                    return Err(MeshError::NonManifoldEdge { a, b });
                }
            }
        }

        // Connectivity over undirected edges, before any loop classification
        // so a disconnected mesh is reported as such.
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in directed.keys() {
            adjacency[a].push(b);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count != n {
            let mut components = 1;
            for v in 0..n {
                if !seen[v] {
                    components += 1;
                    let mut stack = vec![v];
                    seen[v] = true;
                    while let Some(u) = stack.pop() {
                        for &w in &adjacency[u] {
                            if !seen[w] {
                                seen[w] = true;
                                stack.push(w);
                            }
                        }
                    }
                }
            }
            return Err(MeshError::Disconnected { components });
        }

        // Boundary edges have no opposite twin; walk them into loops.
        let mut next_out: HashMap<usize, usize> = HashMap::new();
        for &(a, b) in directed.keys() {
            if !directed.contains_key(&(b, a)) && next_out.insert(a, b).is_some() {
                return Err(MeshError::NonManifoldVertex { vertex: a });
            }
        }
        if next_out.is_empty() {
            return Err(MeshError::NoBoundary);
        }
        let mut loop_of: HashMap<usize, usize> = HashMap::new();
        let mut boundary_loops: Vec<Vec<usize>> = Vec::new();
        let mut starts: Vec<usize> = next_out.keys().copied().collect();
        starts.sort_unstable();
        for &start in &starts {
            if loop_of.contains_key(&start) {
                continue;
            }
            let mut cycle = vec![start];
            loop_of.insert(start, boundary_loops.len());
            let mut v = next_out[&start];
            while v != start {
                loop_of.insert(v, boundary_loops.len());
                cycle.push(v);
                v = next_out[&v];
            }
            boundary_loops.push(cycle);
        }
        // Outer loop (positive signed area) first, holes after, each loop
        // rotated to start at its smallest vertex index.
        for cycle in boundary_loops.iter_mut() {
            let min_pos = cycle
                .iter()
                .enumerate()
                .min_by_key(|&(_, &v)| v)
                .map(|(i, _)| i)
                .unwrap();
            cycle.rotate_left(min_pos);
        }
        let mut outer: Vec<Vec<usize>> = Vec::new();
        let mut holes: Vec<Vec<usize>> = Vec::new();
        for cycle in boundary_loops {
            if loop_signed_area(&vertices, &cycle) > T::zero() {
                outer.push(cycle);
            } else {
                holes.push(cycle);
            }
        }
        if outer.len() != 1 {
            return Err(MeshError::OuterLoopCount { found: outer.len() });
        }
        holes.sort_by_key(|c| c[0]);
        let mut boundary_loops = outer;
        boundary_loops.append(&mut holes);

        let mut boundary_vertices = Vec::new();
        for cycle in &boundary_loops {
            boundary_vertices.extend_from_slice(cycle);
        }
        let mut boundary_position = vec![usize::MAX; n];
        for (pos, &v) in boundary_vertices.iter().enumerate() {
            boundary_position[v] = pos;
        }
        let mut vertex_triangles: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                vertex_triangles[v].push(t);
            }
        }

        Ok(Self {
            vertices,
            triangles,
            boundary_loops,
            boundary_vertices,
            boundary_position,
            vertex_triangles,
            sides: Vec::new(),
        })
    }

    pub fn from_off_str(text: &str) -> Result<Self, MeshError> {
        let (vertices, triangles) = parse_off(text)?;
        Self::new(vertices, triangles)
    }

    pub fn from_off_file(path: impl AsRef<std::path::Path>) -> Result<Self, MeshError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_off_str(&text)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self) -> &[Vec2<T>] {
        &self.vertices
    }

    pub fn position(&self, v: usize) -> Vec2<T> {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_loops(&self) -> &[Vec<usize>] {
        &self.boundary_loops
    }

    /// Boundary vertices in loop order (outer loop first, then holes).
    /// All per-boundary-vertex arrays in this crate follow this order.
    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary_vertices
    }

    pub fn n_boundary_vertices(&self) -> usize {
        self.boundary_vertices.len()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary_position[v] != usize::MAX
    }

    /// Position of a vertex in [`Self::boundary_vertices`], if on the boundary.
    pub fn boundary_position(&self, v: usize) -> Option<usize> {
        let p = self.boundary_position[v];
        (p != usize::MAX).then_some(p)
    }

    /// Interior vertices in ascending global order.
    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.n_vertices())
            .filter(|&v| !self.is_boundary(v))
            .collect()
    }

    pub fn vertex_triangles(&self, v: usize) -> &[usize] {
        &self.vertex_triangles[v]
    }

    pub fn triangle_area(&self, t: usize) -> T {
        signed_area(&self.vertices, &self.triangles[t])
    }

    pub fn total_area(&self) -> T {
        (0..self.n_triangles()).fold(T::zero(), |a, t| a + self.triangle_area(t))
    }

    pub fn sides(&self) -> &[Side<T>] {
        &self.sides
    }

    pub fn n_sides(&self) -> usize {
        self.sides.len()
    }

    pub fn has_sides(&self) -> bool {
        !self.sides.is_empty()
    }

    /// `(side index, arc parameter)` pairs for a boundary vertex; two entries
    /// for corner vertices, one otherwise.
    pub fn sides_at(&self, vertex: usize) -> Vec<(usize, T)> {
        let mut out = Vec::new();
        for (i, side) in self.sides.iter().enumerate() {
            for (k, &v) in side.vertices.iter().enumerate() {
                if v == vertex {
                    out.push((i, side.params[k]));
                }
            }
        }
        out
    }

    /// Attaches a validated side assignment.
    pub fn with_sides(mut self, sides: Vec<Side<T>>) -> Result<Self, MeshError> {
        validate_sides(&self, &sides)?;
        self.sides = sides;
        Ok(self)
    }

    /// Splits every boundary loop at the boundary vertices nearest to the
    /// given corner positions and parameterizes each side by normalized arc
    /// length. `corners[k]` lists, in traversal order, the positions where
    /// the sides of loop `k` start.
    pub fn with_sides_from_corners(self, corners: &[Vec<Vec2<T>>]) -> Result<Self, MeshError> {
        if corners.len() != self.boundary_loops.len() {
            return Err(MeshError::SideAssignment(format!(
                "corner list has {} loops, mesh has {}",
                corners.len(),
                self.boundary_loops.len()
            )));
        }
        let mut sides = Vec::new();
        for (li, loop_corners) in corners.iter().enumerate() {
            let cycle = &self.boundary_loops[li];
            if loop_corners.len() < 2 {
                return Err(MeshError::SideAssignment(format!(
                    "loop {li} needs at least 2 corners, got {}",
                    loop_corners.len()
                )));
            }
            let mut corner_pos: Vec<usize> = Vec::with_capacity(loop_corners.len());
            for c in loop_corners {
                let best = (0..cycle.len())
                    .min_by(|&a, &b| {
                        let da = (self.vertices[cycle[a]] - *c).norm();
                        let db = (self.vertices[cycle[b]] - *c).norm();
                        da.partial_cmp(&db).unwrap()
                    })
                    .unwrap();
                corner_pos.push(best);
            }
            let mut sorted = corner_pos.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != corner_pos.len() {
                return Err(MeshError::SideAssignment(format!(
                    "two corners of loop {li} snapped to the same boundary vertex"
                )));
            }
            // Corner order must follow the loop traversal direction.
            let first = corner_pos[0];
            let mut shifted: Vec<usize> = corner_pos
                .iter()
                .map(|&p| (p + cycle.len() - first) % cycle.len())
                .collect();
            let mut increasing = shifted.clone();
            increasing.sort_unstable();
            if shifted != increasing {
                return Err(MeshError::SideAssignment(format!(
                    "corners of loop {li} are not in traversal order"
                )));
            }
            shifted.push(cycle.len());
            for k in 0..corner_pos.len() {
                let from = shifted[k];
                let to = shifted[k + 1];
                let verts: Vec<usize> = (from..=to)
                    .map(|p| cycle[(first + p) % cycle.len()])
                    .collect();
                let params = arc_length_params(&self.vertices, &verts);
                sides.push(Side {
                    loop_index: li,
                    vertices: verts,
                    params,
                });
            }
        }
        self.with_sides(sides)
    }

    /// Attaches sides from explicit `(vertex, side, parameter)` records, the
    /// sidecar form; corner vertices appear once per incident side.
    pub fn with_sides_from_records(self, records: &[SideRecord<T>]) -> Result<Self, MeshError> {
        let n_sides = records
            .iter()
            .map(|r| r.side + 1)
            .max()
            .ok_or_else(|| MeshError::SideAssignment("empty assignment".into()))?;
        let mut grouped: Vec<Vec<(usize, T)>> = vec![Vec::new(); n_sides];
        for r in records {
            grouped[r.side].push((r.vertex, r.t));
        }
        let mut sides = Vec::with_capacity(n_sides);
        for (si, mut group) in grouped.into_iter().enumerate() {
            if group.is_empty() {
                return Err(MeshError::SideAssignment(format!(
                    "side {si} has no vertices"
                )));
            }
            group.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
            let Some(&first_vertex) = group.first().map(|(v, _)| v) else {
                unreachable!()
            };
            let li = self
                .boundary_position(first_vertex)
                .and_then(|_| {
                    self.boundary_loops
                        .iter()
                        .position(|c| c.contains(&first_vertex))
                })
                .ok_or_else(|| {
                    MeshError::SideAssignment(format!(
                        "side {si} starts at non-boundary vertex {first_vertex}"
                    ))
                })?;
            sides.push(Side {
                loop_index: li,
                vertices: group.iter().map(|&(v, _)| v).collect(),
                params: group.iter().map(|&(_, t)| t).collect(),
            });
        }
        self.with_sides(sides)
    }

    /// Bounding box of the vertex set as `(min, max)`.
    pub fn bounding_box(&self) -> (Vec2<T>, Vec2<T>) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for p in &self.vertices {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }
}

/// Sidecar record mapping a boundary vertex to a side and arc parameter.
#[derive(Clone, Copy, Debug, Deserialize)]
pub struct SideRecord<T> {
    pub vertex: usize,
    pub side: usize,
    pub t: T,
}

/// Parses the sidecar JSON document `{ "assignments": [ { vertex, side, t } ] }`.
pub fn parse_side_records<T: Real + for<'de> Deserialize<'de>>(
    text: &str,
) -> Result<Vec<SideRecord<T>>, MeshError> {
    #[derive(Deserialize)]
    struct Doc<T> {
        assignments: Vec<SideRecord<T>>,
    }
    let doc: Doc<T> = serde_json::from_str(text)
        .map_err(|e| MeshError::SideAssignment(format!("sidecar JSON: {e}")))?;
    Ok(doc.assignments)
}

fn validate_sides<T: Real>(mesh: &TriMesh<T>, sides: &[Side<T>]) -> Result<(), MeshError> {
    let err = |msg: String| Err(MeshError::SideAssignment(msg));
    if sides.is_empty() {
        return err("no sides".into());
    }
    let mut covered = vec![0usize; mesh.n_vertices()];
    for (si, side) in sides.iter().enumerate() {
        if side.loop_index >= mesh.boundary_loops.len() {
            return err(format!("side {si} references loop {}", side.loop_index));
        }
        if side.vertices.len() < 2 || side.vertices.len() != side.params.len() {
            return err(format!("side {si} is too short or params length mismatch"));
        }
        if side.params[0] != T::zero() || *side.params.last().unwrap() != T::one() {
            return err(format!("side {si} params must start at 0 and end at 1"));
        }
        for w in side.params.windows(2) {
            if w[1] <= w[0] {
                return err(format!("side {si} params are not strictly increasing"));
            }
        }
        let cycle = &mesh.boundary_loops[side.loop_index];
        let pos_in_loop = |v: usize| cycle.iter().position(|&c| c == v);
        let mut prev = match pos_in_loop(side.vertices[0]) {
            Some(p) => p,
            None => return err(format!("side {si} vertex {} not on loop", side.vertices[0])),
        };
        for &v in &side.vertices[1..] {
            let p = match pos_in_loop(v) {
                Some(p) => p,
                None => return err(format!("side {si} vertex {v} not on its loop")),
            };
            if p != (prev + 1) % cycle.len() {
                return err(format!("side {si} is not contiguous along its loop"));
            }
            prev = p;
        }
        for &v in &side.vertices {
            covered[v] += 1;
        }
    }
    // Every loop must be exactly covered: interior side vertices once,
    // corners twice (once as an end, once as a start).
    for (li, cycle) in mesh.boundary_loops.iter().enumerate() {
        let loop_sides: Vec<&Side<T>> = sides.iter().filter(|s| s.loop_index == li).collect();
        if loop_sides.is_empty() {
            return err(format!("loop {li} has no sides"));
        }
        let edge_count: usize = loop_sides.iter().map(|s| s.vertices.len() - 1).sum();
        if edge_count != cycle.len() {
            return err(format!(
                "loop {li} sides cover {edge_count} edges, loop has {}",
                cycle.len()
            ));
        }
        // Chain check: each side must start where exactly one other ends.
        for s in &loop_sides {
            let end = *s.vertices.last().unwrap();
            let successors = loop_sides.iter().filter(|t| t.vertices[0] == end).count();
            if successors != 1 {
                return err(format!("loop {li} sides do not chain at vertex {end}"));
            }
        }
    }
    for &v in mesh.boundary_vertices() {
        if covered[v] == 0 {
            return err(format!("boundary vertex {v} is not assigned to any side"));
        }
    }
    Ok(())
}

fn signed_area<T: Real>(vertices: &[Vec2<T>], tri: &[usize; 3]) -> T {
    let a = vertices[tri[0]];
    let b = vertices[tri[1]];
    let c = vertices[tri[2]];
    (b - a).cross(c - a) * T::of(0.5)
}

fn loop_signed_area<T: Real>(vertices: &[Vec2<T>], cycle: &[usize]) -> T {
    let mut acc = T::zero();
    for i in 0..cycle.len() {
        let p = vertices[cycle[i]];
        let q = vertices[cycle[(i + 1) % cycle.len()]];
        acc += p.cross(q);
    }
    acc * T::of(0.5)
}

fn arc_length_params<T: Real>(vertices: &[Vec2<T>], verts: &[usize]) -> Vec<T> {
    let mut cumulative = vec![T::zero()];
    for w in verts.windows(2) {
        let step = (vertices[w[1]] - vertices[w[0]]).norm();
        cumulative.push(*cumulative.last().unwrap() + step);
    }
    let total = *cumulative.last().unwrap();
    let mut params: Vec<T> = cumulative.into_iter().map(|c| c / total).collect();
    params[0] = T::zero();
    let last = params.len() - 1;
    params[last] = T::one();
    params
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_triangle() -> TriMesh<f64> {
        TriMesh::new(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(0.0, 1.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn single_triangle_has_one_loop_of_three() {
        let mesh = single_triangle();
        assert_eq!(mesh.boundary_loops().len(), 1);
        assert_eq!(mesh.boundary_loops()[0].len(), 3);
        assert_eq!(mesh.interior_vertices().len(), 0);
    }

    #[test]
    fn split_square_has_one_loop_of_four() {
        let mesh = TriMesh::new(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(0.0, 1.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        assert_eq!(mesh.boundary_loops().len(), 1);
        assert_eq!(mesh.boundary_loops()[0], vec![0, 1, 2, 3]);
    }

    #[test]
    fn annulus_has_hole_loop_clockwise() {
        let mesh = square_annulus::<f64>(2, 0.5).unwrap();
        assert_eq!(mesh.boundary_loops().len(), 2);
        let outer = &mesh.boundary_loops()[0];
        let hole = &mesh.boundary_loops()[1];
        assert!(loop_signed_area(mesh.vertices(), outer) > 0.0);
        assert!(loop_signed_area(mesh.vertices(), hole) < 0.0);
    }

    #[test]
    fn flipped_triangle_is_rejected() {
        let r = TriMesh::new(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(0.0, 1.0),
            ],
            vec![[0, 2, 1]],
        );
        assert!(matches!(r, Err(MeshError::FlippedTriangle { triangle: 0 })));
    }

    #[test]
    fn degenerate_triangle_is_rejected() {
        let r = TriMesh::new(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(2.0, 0.0),
            ],
            vec![[0, 1, 2]],
        );
        assert!(matches!(
            r,
            Err(MeshError::DegenerateTriangle { triangle: 0 })
        ));
    }

    #[test]
    fn non_manifold_edge_is_rejected() {
        // Three triangles sharing edge (0,1): the third reuses the directed
        // edge of the first.
        let r = TriMesh::new(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(0.5, 1.0),
                Vec2::new(0.5, -1.0),
                Vec2::new(0.5, 2.0),
            ],
            vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]],
        );
        assert!(matches!(r, Err(MeshError::NonManifoldEdge { .. })));
    }

    #[test]
    fn disconnected_mesh_is_rejected() {
        let r = TriMesh::new(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(0.0, 1.0),
                Vec2::new(5.0, 0.0),
                Vec2::new(6.0, 0.0),
                Vec2::new(5.0, 1.0),
            ],
            vec![[0, 1, 2], [3, 4, 5]],
        );
        assert!(matches!(r, Err(MeshError::Disconnected { components: 2 })));
    }

    #[test]
    fn sides_from_corners_on_square() {
        let mesh = unit_square::<f64>(4).unwrap();
        assert_eq!(mesh.n_sides(), 4);
        for side in mesh.sides() {
            assert_eq!(side.vertices.len(), 5);
            assert_eq!(side.params[0], 0.0);
            assert_eq!(*side.params.last().unwrap(), 1.0);
        }
        // Corner vertices carry 1 on the incoming side and 0 on the outgoing.
        let corner = mesh.sides()[0].vertices[4];
        let pairs = mesh.sides_at(corner);
        assert_eq!(pairs.len(), 2);
        assert!(pairs.contains(&(0, 1.0)));
        assert!(pairs.contains(&(1, 0.0)));
    }

    #[test]
    fn side_records_round_trip() {
        let mesh = unit_square::<f64>(2).unwrap();
        let mut records = Vec::new();
        for (si, side) in mesh.sides().iter().enumerate() {
            for (v, t) in side.vertices.iter().zip(&side.params) {
                records.push(SideRecord {
                    vertex: *v,
                    side: si,
                    t: *t,
                });
            }
        }
        let plain = TriMesh::new(mesh.vertices().to_vec(), mesh.triangles().to_vec()).unwrap();
        let rebuilt = plain.with_sides_from_records(&records).unwrap();
        assert_eq!(rebuilt.n_sides(), 4);
        for (a, b) in rebuilt.sides().iter().zip(mesh.sides()) {
            assert_eq!(a.vertices, b.vertices);
        }
    }
}
