//! Structured triangulators for simple domains.
//!
//! These exist for tests, convergence studies, and demo inputs; general
//! domains are expected to arrive pre-triangulated as OFF files.

use crate::geom::Vec2;
use crate::num::Real;

use super::{MeshError, TriMesh};

/// Structured grid over `[x0, x0+w] x [y0, y0+h]` with `nx * ny` cells, each
/// split along the same diagonal (all triangles are right triangles). Sides
/// are assigned per rectangle edge: bottom, right, top, left.
pub fn rectangle<T: Real>(
    nx: usize,
    ny: usize,
    origin: Vec2<T>,
    width: T,
    height: T,
) -> Result<TriMesh<T>, MeshError> {
    assert!(nx >= 1 && ny >= 1, "grid needs at least one cell per axis");
    let index = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let x = origin.x + width * T::of_usize(i) / T::of_usize(nx);
            let y = origin.y + height * T::of_usize(j) / T::of_usize(ny);
            vertices.push(Vec2::new(x, y));
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let v00 = index(i, j);
            let v10 = index(i + 1, j);
            let v01 = index(i, j + 1);
            let v11 = index(i + 1, j + 1);
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    let corners = vec![vec![
        origin,
        origin + Vec2::new(width, T::zero()),
        origin + Vec2::new(width, height),
        origin + Vec2::new(T::zero(), height),
    ]];
    TriMesh::new(vertices, triangles)?.with_sides_from_corners(&corners)
}

/// Unit square `[0,1]^2` with `n * n` cells; non-obtuse by construction.
pub fn unit_square<T: Real>(n: usize) -> Result<TriMesh<T>, MeshError> {
    rectangle(n, n, Vec2::zero(), T::one(), T::one())
}

/// Unit square with cell diagonals alternating by parity, making the
/// triangulation itself invariant under both axis mirrors (`n` must be
/// even). Used wherever exact discrete mirror symmetry matters.
pub fn unit_square_symmetric<T: Real>(n: usize) -> Result<TriMesh<T>, MeshError> {
    assert!(
        n >= 2 && n.is_multiple_of(2),
        "symmetric grid needs an even cell count"
    );
    let index = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Vec2::new(
                T::of_usize(i) / T::of_usize(n),
                T::of_usize(j) / T::of_usize(n),
            ));
        }
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let v00 = index(i, j);
            let v10 = index(i + 1, j);
            let v01 = index(i, j + 1);
            let v11 = index(i + 1, j + 1);
            if (i + j) % 2 == 0 {
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            } else {
                triangles.push([v10, v11, v01]);
                triangles.push([v10, v01, v00]);
            }
        }
    }
    let corners = vec![vec![
        Vec2::new(T::zero(), T::zero()),
        Vec2::new(T::one(), T::zero()),
        Vec2::new(T::one(), T::one()),
        Vec2::new(T::zero(), T::one()),
    ]];
    TriMesh::new(vertices, triangles)?.with_sides_from_corners(&corners)
}

/// Unit square with coordinates graded by `t -> t^power`: cell sizes vary,
/// breaking the translation invariance that makes uniform grids exactly
/// reproduce quadratics. The convergence study runs on this family.
pub fn graded_square<T: Real>(n: usize, power: f64) -> Result<TriMesh<T>, MeshError> {
    let base = unit_square::<T>(n)?;
    let p = T::of(power);
    let vertices: Vec<Vec2<T>> = base
        .vertices()
        .iter()
        .map(|q| Vec2::new(q.x.powf(p), q.y.powf(p)))
        .collect();
    let corners = vec![vec![
        Vec2::new(T::zero(), T::zero()),
        Vec2::new(T::one(), T::zero()),
        Vec2::new(T::one(), T::one()),
        Vec2::new(T::zero(), T::one()),
    ]];
    TriMesh::new(vertices, base.triangles().to_vec())?.with_sides_from_corners(&corners)
}

/// Unit square sheared by `x += shear * y`; large shear produces obtuse
/// triangles, exercising the negative-cotangent paths.
pub fn sheared_square<T: Real>(n: usize, shear: T) -> Result<TriMesh<T>, MeshError> {
    let base = unit_square::<T>(n)?;
    let vertices: Vec<Vec2<T>> = base
        .vertices()
        .iter()
        .map(|p| Vec2::new(p.x + shear * p.y, p.y))
        .collect();
    let shear_pt = |p: Vec2<T>| Vec2::new(p.x + shear * p.y, p.y);
    let corners = vec![vec![
        shear_pt(Vec2::new(T::zero(), T::zero())),
        shear_pt(Vec2::new(T::one(), T::zero())),
        shear_pt(Vec2::new(T::one(), T::one())),
        shear_pt(Vec2::new(T::zero(), T::one())),
    ]];
    TriMesh::new(vertices, base.triangles().to_vec())?.with_sides_from_corners(&corners)
}

/// Triangulates a convex polygon with concentric rings shrinking toward the
/// centroid. `corners` must be in counter-clockwise order; each polygon edge
/// becomes one side with `segments_per_side` boundary segments.
pub fn convex_polygon<T: Real>(
    corners: &[Vec2<T>],
    segments_per_side: usize,
    rings: usize,
) -> Result<TriMesh<T>, MeshError> {
    assert!(corners.len() >= 3, "polygon needs at least 3 corners");
    assert!(segments_per_side >= 1 && rings >= 1);
    let k = corners.len();
    let m = segments_per_side;
    let ring_len = k * m;
    let mut centroid = Vec2::zero();
    for &c in corners {
        centroid += c;
    }
    centroid = centroid / T::of_usize(k);

    let mut boundary = Vec::with_capacity(ring_len);
    for side in 0..k {
        let a = corners[side];
        let b = corners[(side + 1) % k];
        for step in 0..m {
            let t = T::of_usize(step) / T::of_usize(m);
            boundary.push(a + (b - a) * t);
        }
    }

    let mut vertices = Vec::with_capacity(ring_len * rings + 1);
    for r in 0..rings {
        let scale = T::of_usize(rings - r) / T::of_usize(rings);
        for &p in &boundary {
            vertices.push(centroid + (p - centroid) * scale);
        }
    }
    let center = vertices.len();
    vertices.push(centroid);

    let mut triangles = Vec::new();
    for r in 0..rings {
        let outer = r * ring_len;
        for s in 0..ring_len {
            let s1 = (s + 1) % ring_len;
            if r + 1 < rings {
                let inner = (r + 1) * ring_len;
                triangles.push([outer + s, outer + s1, inner + s1]);
                triangles.push([outer + s, inner + s1, inner + s]);
            } else {
                triangles.push([outer + s, outer + s1, center]);
            }
        }
    }
    TriMesh::new(vertices, triangles)?.with_sides_from_corners(&[corners.to_vec()])
}

/// Square annulus: outer square `[-1,1]^2`, square hole scaled by
/// `hole_ratio`, connected by `n` structured bands with `n` segments per
/// quarter side. Eight sides: four outer, four on the hole loop.
pub fn square_annulus<T: Real>(n: usize, hole_ratio: f64) -> Result<TriMesh<T>, MeshError> {
    assert!(n >= 1, "annulus needs at least one band");
    assert!(
        hole_ratio > 0.0 && hole_ratio < 1.0,
        "hole ratio must be in (0, 1)"
    );
    let outer_corners = [
        Vec2::new(-T::one(), -T::one()),
        Vec2::new(T::one(), -T::one()),
        Vec2::new(T::one(), T::one()),
        Vec2::new(-T::one(), T::one()),
    ];
    let ratio = T::of(hole_ratio);
    let ring_len = 4 * n;
    let mut outer_ring = Vec::with_capacity(ring_len);
    for side in 0..4 {
        let a = outer_corners[side];
        let b = outer_corners[(side + 1) % 4];
        for step in 0..n {
            let t = T::of_usize(step) / T::of_usize(n);
            outer_ring.push(a + (b - a) * t);
        }
    }

    let mut vertices = Vec::with_capacity(ring_len * (n + 1));
    for r in 0..=n {
        let t = T::of_usize(r) / T::of_usize(n);
        let scale = T::one() + (ratio - T::one()) * t;
        for &p in &outer_ring {
            vertices.push(p * scale);
        }
    }
    let mut triangles = Vec::with_capacity(2 * ring_len * n);
    for r in 0..n {
        let outer = r * ring_len;
        let inner = (r + 1) * ring_len;
        for s in 0..ring_len {
            let s1 = (s + 1) % ring_len;
            triangles.push([outer + s, outer + s1, inner + s1]);
            triangles.push([outer + s, inner + s1, inner + s]);
        }
    }
    // Hole-loop corners listed clockwise, matching the traversal direction of
    // hole loops (domain on the left).
    let hole_corners: Vec<Vec2<T>> = [0, 3, 2, 1]
        .iter()
        .map(|&i| outer_corners[i] * ratio)
        .collect();
    TriMesh::new(vertices, triangles)?
        .with_sides_from_corners(&[outer_corners.to_vec(), hole_corners])
}
