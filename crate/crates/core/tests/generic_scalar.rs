//! The numerics are generic over the scalar: spot-check the `f32`
//! instantiation end to end at single-precision tolerances.

use ribbonpatch::assembly::{BiharmonicSystem, BoundaryConditions, SolveConfig};
use ribbonpatch::geom::{Vec2, Vec3};
use ribbonpatch::mesh::{cotangent_weights, unit_square};
use ribbonpatch::spline::Ribbon;

#[test]
fn f32_stiffness_and_spline_behave() {
    let mesh = unit_square::<f32>(6).unwrap();
    let l = cotangent_weights(&mesh);
    for s in l.row_sums() {
        assert!(s.abs() < 1e-5, "row sum {s}");
    }
    let ribbon = Ribbon::<f32>::bezier(vec![
        vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.5)],
        vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 1.0)],
    ])
    .unwrap();
    let p = ribbon.eval(0.5, 0.5).unwrap();
    assert!((p - Vec3::new(0.5, 0.5, 0.375)).norm() < 1e-6);
}

#[test]
fn f32_biharmonic_solve_reproduces_linears() {
    let mesh = unit_square::<f32>(5).unwrap();
    let config = SolveConfig {
        residual_tolerance: 1e-4,
        ..Default::default()
    };
    let system = BiharmonicSystem::build(&mesh, config).unwrap();
    let u0: Vec<f32> = mesh
        .boundary_vertices()
        .iter()
        .map(|&v| mesh.position(v).x)
        .collect();
    let d0 = system.linear_normal_samples(Vec2::new(1.0, 0.0)).unwrap();
    let sol = system.solve_scalar(&u0, &d0).unwrap();
    for v in 0..mesh.n_vertices() {
        assert!(
            (sol.field[v] - mesh.position(v).x).abs() < 1e-3,
            "vertex {v}: {} vs {}",
            sol.field[v],
            mesh.position(v).x
        );
    }
    let _ = BoundaryConditions::<f32>::zero(&mesh);
}
