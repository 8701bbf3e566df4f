//! Ready-made sample inputs: meshes and matching ribbon sets for demos,
//! tests, and the bundled example files.

use crate::geom::{Vec2, Vec3};
use crate::mesh::{self, MeshError, TriMesh};
use crate::num::Real;
use crate::spline::{LoopSpec, Ribbon, RibbonSet};

/// Four ribbons collapsed onto a single point; the patch degenerates to it.
pub fn constant_square_ribbons<T: Real>(point: Vec3<T>) -> RibbonSet<T> {
    let net = vec![vec![point; 2]; 2];
    let sides = (0..4)
        .map(|_| Ribbon::bezier(net.clone()).expect("valid net"))
        .collect();
    RibbonSet {
        sides,
        loops: vec![LoopSpec {
            sides: vec![0, 1, 2, 3],
            corners_uv: Some(unit_square_corners()),
        }],
    }
}

fn unit_square_corners<T: Real>() -> Vec<Vec2<T>> {
    vec![
        Vec2::new(T::zero(), T::zero()),
        Vec2::new(T::one(), T::zero()),
        Vec2::new(T::one(), T::one()),
        Vec2::new(T::zero(), T::one()),
    ]
}

/// Planar ribbons around the unit square (z = 0 everywhere); the patch must
/// reproduce the plane.
pub fn flat_square_ribbons<T: Real>(width: f64) -> RibbonSet<T> {
    graph_ribbons(
        &[unit_square_corners()],
        |_| T::zero(),
        |_| Vec2::zero(),
        T::of(width),
    )
}

/// Mirror-symmetric dome over the unit square: the height field is even
/// under `x -> 1-x`, so inputs and patch share the symmetry.
pub fn symmetric_square<T: Real>(n: usize) -> Result<(TriMesh<T>, RibbonSet<T>), MeshError> {
    let mesh = mesh::unit_square_symmetric::<T>(n)?;
    let amp = T::of(0.3);
    let pi = T::PI();
    let g = move |p: Vec2<T>| amp * (pi * p.x).sin() * p.y * (T::one() - p.y);
    let dg = move |p: Vec2<T>| {
        Vec2::new(
            amp * pi * (pi * p.x).cos() * p.y * (T::one() - p.y),
            amp * (pi * p.x).sin() * (T::one() - (p.y + p.y)),
        )
    };
    let ribbons = graph_ribbons(&[unit_square_corners()], g, dg, T::of(0.3));
    Ok((mesh, ribbons))
}

/// Corners of the regular pentagon with circumradius 1, counter-clockwise.
pub fn pentagon_corners<T: Real>() -> Vec<Vec2<T>> {
    (0..5)
        .map(|i| {
            let angle = std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * (i as f64) / 5.0;
            Vec2::new(T::of(angle.cos()), T::of(angle.sin()))
        })
        .collect()
}

/// Five-sided vertex-blend style patch: a dome over the regular pentagon
/// with cubic-by-linear ribbons.
pub fn pentagon_dome<T: Real>(
    segments_per_side: usize,
    rings: usize,
) -> Result<(TriMesh<T>, RibbonSet<T>), MeshError> {
    let corners = pentagon_corners::<T>();
    let mesh = mesh::convex_polygon(&corners, segments_per_side, rings)?;
    let amp = T::of(0.35);
    let g = move |p: Vec2<T>| amp * (T::one() - p.dot(p));
    let dg = move |p: Vec2<T>| p * (-(amp + amp));
    let ribbons = graph_ribbons(&[corners], g, dg, T::of(0.4));
    Ok((mesh, ribbons))
}

/// Corners of an elongated five-sided strip, counter-clockwise. On domains
/// like this the biharmonic response to data on one end decays with sign
/// oscillation, so blend fields show clearly negative regions.
pub fn elongated_pentagon_corners<T: Real>() -> Vec<Vec2<T>> {
    vec![
        Vec2::new(T::zero(), T::zero()),
        Vec2::new(T::of(3.0), T::zero()),
        Vec2::new(T::of(3.6), T::of(0.5)),
        Vec2::new(T::of(3.0), T::one()),
        Vec2::new(T::zero(), T::one()),
    ]
}

/// Five-sided strip-like patch used to demonstrate negative blend fields.
pub fn elongated_pentagon_dome<T: Real>(
    segments_per_side: usize,
    rings: usize,
) -> Result<(TriMesh<T>, RibbonSet<T>), MeshError> {
    let corners = elongated_pentagon_corners::<T>();
    let mesh = mesh::convex_polygon(&corners, segments_per_side, rings)?;
    let amp = T::of(0.25);
    let g = move |p: Vec2<T>| amp * p.y * (T::one() - p.y);
    let dg = move |p: Vec2<T>| Vec2::new(T::zero(), amp * (T::one() - (p.y + p.y)));
    let ribbons = graph_ribbons(&[corners], g, dg, T::of(0.3));
    Ok((mesh, ribbons))
}

/// Multiply connected patch: a dome over a square annulus, eight ribbons on
/// two boundary loops.
pub fn annulus_dome<T: Real>(
    bands: usize,
    hole_ratio: f64,
) -> Result<(TriMesh<T>, RibbonSet<T>), MeshError> {
    let mesh = mesh::square_annulus::<T>(bands, hole_ratio)?;
    let one = T::one();
    let outer: Vec<Vec2<T>> = vec![
        Vec2::new(-one, -one),
        Vec2::new(one, -one),
        Vec2::new(one, one),
        Vec2::new(-one, one),
    ];
    let r = T::of(hole_ratio);
    let hole: Vec<Vec2<T>> = vec![
        Vec2::new(-r, -r),
        Vec2::new(-r, r),
        Vec2::new(r, r),
        Vec2::new(r, -r),
    ];
    let amp = T::of(0.4);
    let g = move |p: Vec2<T>| amp * (one - p.x * p.x) * (one - p.y * p.y);
    let dg = move |p: Vec2<T>| {
        Vec2::new(
            -(amp + amp) * p.x * (one - p.y * p.y),
            -(amp + amp) * p.y * (one - p.x * p.x),
        )
    };
    let ribbons = graph_ribbons(&[outer, hole], g, dg, T::of(0.35));
    Ok((mesh, ribbons))
}

/// Builds cubic-by-linear ribbons along the straight sides spanned by
/// `loops_corners`, sampling the height field `g` for the boundary row and
/// its inward directional derivative for the cross-derivative row. The side
/// order matches [`TriMesh::with_sides_from_corners`] on the same corners.
pub fn graph_ribbons<T: Real>(
    loops_corners: &[Vec<Vec2<T>>],
    g: impl Fn(Vec2<T>) -> T,
    grad_g: impl Fn(Vec2<T>) -> Vec2<T>,
    width: T,
) -> RibbonSet<T> {
    let mut sides = Vec::new();
    let mut loops = Vec::new();
    for corners in loops_corners {
        let k = corners.len();
        let first = sides.len();
        for i in 0..k {
            let a = corners[i];
            let b = corners[(i + 1) % k];
            let inward = (b - a).normalized().expect("distinct corners").perp();
            let sample = |t: f64| {
                let q = a + (b - a) * T::of(t);
                let lift = Vec3::new(q.x, q.y, g(q));
                let cross = Vec3::new(inward.x, inward.y, grad_g(q).dot(inward)) * width;
                (lift, cross)
            };
            let samples: Vec<(Vec3<T>, Vec3<T>)> = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]
                .iter()
                .map(|&t| sample(t))
                .collect();
            let boundary_row =
                cubic_through(samples[0].0, samples[1].0, samples[2].0, samples[3].0);
            let cross_row = cubic_through(samples[0].1, samples[1].1, samples[2].1, samples[3].1);
            let net: Vec<Vec<Vec3<T>>> = (0..4)
                .map(|r| vec![boundary_row[r], boundary_row[r] + cross_row[r]])
                .collect();
            sides.push(Ribbon::bezier(net).expect("valid net"));
        }
        loops.push(LoopSpec {
            sides: (first..first + k).collect(),
            corners_uv: Some(corners.clone()),
        });
    }
    RibbonSet { sides, loops }
}

/// Cubic Bezier control points interpolating four samples at t = 0, 1/3,
/// 2/3, 1.
fn cubic_through<T: Real>(p0: Vec3<T>, p1: Vec3<T>, p2: Vec3<T>, p3: Vec3<T>) -> [Vec3<T>; 4] {
    let sixth = T::of(1.0 / 6.0);
    let c1 = (p0 * T::of(-5.0) + p1 * T::of(18.0) + p2 * T::of(-9.0) + p3 * T::of(2.0)) * sixth;
    let c2 = (p0 * T::of(2.0) + p1 * T::of(-9.0) + p2 * T::of(18.0) + p3 * T::of(-5.0)) * sixth;
    [p0, c1, c2, p3]
}
