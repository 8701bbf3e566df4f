//! Harmonic reparameterization checked against the separable series solution
//! of the 0/1 box problem on the unit square.

use ribbonpatch::geom::Vec2;
use ribbonpatch::mesh::{graded_square, unit_square, MeshQuality};
use ribbonpatch::param::{side_parameterization, HarmonicSolver, ParamConfig};

/// Series solution of `lap u = 0` on the unit square with `u = 0` on the
/// bottom edge and `u = 1` on the other three sides.
fn box_solution(p: Vec2<f64>) -> f64 {
    let pi = std::f64::consts::PI;
    let mut acc = 0.0;
    for k in (1..400).step_by(2) {
        let kf = k as f64;
        let c = 4.0 / (kf * pi);
        // top wall
        acc += c * (kf * pi * p.x).sin() * (kf * pi * p.y).sinh() / (kf * pi).sinh();
        // left and right walls
        acc += c * (kf * pi * p.y).sin() * (kf * pi * (1.0 - p.x)).sinh() / (kf * pi).sinh();
        acc += c * (kf * pi * p.y).sin() * (kf * pi * p.x).sinh() / (kf * pi).sinh();
    }
    acc
}

/// Normal derivative of the box solution at the bottom mid-edge (0.5, 0).
fn box_normal_derivative_at_mid() -> f64 {
    let pi = std::f64::consts::PI;
    let mut acc = 0.0;
    for k in (1..400).step_by(2) {
        let kf = k as f64;
        let sign = if (k - 1) % 4 == 0 { 1.0 } else { -1.0 };
        acc += 4.0 * sign / (kf * pi).sinh();
        acc += 4.0 / (kf * pi / 2.0).cosh();
    }
    acc
}

#[test]
fn h_field_matches_series_solution_near_bottom_edge() {
    let mut previous = f64::INFINITY;
    for n in [8usize, 16, 32] {
        let mesh = unit_square::<f64>(n).unwrap();
        let solver = HarmonicSolver::new(&mesh).unwrap();
        let sp = side_parameterization(&solver, 0, ParamConfig::default()).unwrap();
        let mut worst = 0.0f64;
        for v in 0..mesh.n_vertices() {
            let p = mesh.position(v);
            // compare in a band near the bottom-center, away from the
            // corner singularities of the boundary data
            if p.y > 0.0 && p.y <= 0.25 && (p.x - 0.5).abs() <= 0.25 {
                worst = worst.max((sp.h_field[v] - box_solution(p)).abs());
            }
        }
        assert!(worst < previous, "no improvement at n = {n}: {worst}");
        previous = worst;
    }
    assert!(previous < 2e-3, "finest-level error {previous}");
}

#[test]
fn dn_h_converges_to_series_value_at_mid_edge() {
    let expected = box_normal_derivative_at_mid(); // about 2.01497
    assert!((expected - 2.0149674).abs() < 1e-6);
    let mut previous = f64::INFINITY;
    for n in [8usize, 16, 32, 64] {
        let mesh = unit_square::<f64>(n).unwrap();
        let solver = HarmonicSolver::new(&mesh).unwrap();
        let sp = side_parameterization(&solver, 0, ParamConfig::default()).unwrap();
        let side = &mesh.sides()[0];
        let mid = side.vertices.len() / 2;
        let gap = (sp.dn_h[mid] - expected).abs();
        assert!(gap < previous, "no improvement at n = {n}: {gap}");
        previous = gap;
        // dn_s vanishes at the symmetric midpoint
        assert!(sp.dn_s[mid].abs() < 1e-10);
    }
    assert!(previous < 1e-3, "finest-level gap {previous}");
}

#[test]
fn maximum_principle_and_inward_growth_on_non_obtuse_meshes() {
    let meshes = vec![
        unit_square::<f64>(12).unwrap(),
        graded_square::<f64>(16, 1.3).unwrap(),
        ribbonpatch::mesh::rectangle::<f64>(20, 10, Vec2::new(-1.0, 0.0), 2.0, 1.0).unwrap(),
    ];
    for mesh in &meshes {
        assert!(MeshQuality::of(mesh).is_non_obtuse());
        let solver = HarmonicSolver::new(mesh).unwrap();
        for side_index in 0..mesh.n_sides() {
            let sp = side_parameterization(&solver, side_index, ParamConfig::default()).unwrap();
            for field in [&sp.s_field, &sp.h_field] {
                let boundary_lo = mesh
                    .boundary_vertices()
                    .iter()
                    .map(|&v| field[v])
                    .fold(f64::INFINITY, f64::min);
                let boundary_hi = mesh
                    .boundary_vertices()
                    .iter()
                    .map(|&v| field[v])
                    .fold(f64::NEG_INFINITY, f64::max);
                for v in mesh.interior_vertices() {
                    assert!(
                        field[v] >= boundary_lo - 1e-12 && field[v] <= boundary_hi + 1e-12,
                        "maximum principle violated at vertex {v}"
                    );
                }
            }
            // h grows into the domain along the side (corners excluded).
            for k in 1..sp.dn_h.len() - 1 {
                assert!(
                    sp.dn_h[k] >= -1e-8,
                    "dn_h[{k}] = {} on side {side_index}",
                    sp.dn_h[k]
                );
            }
        }
    }
}

#[test]
fn s_extension_modes_agree_on_the_side_itself() {
    let mesh = unit_square::<f64>(10).unwrap();
    let solver = HarmonicSolver::new(&mesh).unwrap();
    for mode in [
        ribbonpatch::param::SExtension::ClampLinear,
        ribbonpatch::param::SExtension::Nearest,
    ] {
        let sp = side_parameterization(
            &solver,
            1,
            ParamConfig {
                s_extension: mode,
                ..Default::default()
            },
        )
        .unwrap();
        let side = &mesh.sides()[1];
        for (k, &v) in side.vertices.iter().enumerate() {
            assert_eq!(sp.s_field[v], side.params[k]);
        }
    }
}
