//! Regenerates the sample inputs under `assets/`.
//!
//! Usage: `cargo run -p ribbonpatch-cli --example gen_assets -- [dir]`

use std::path::PathBuf;

use ribbonpatch::fixtures;
use ribbonpatch::mesh::write_off;

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("assets"));
    std::fs::create_dir_all(&dir).expect("create asset dir");

    let write_pair =
        |name: &str, mesh: &ribbonpatch::TriMesh64, ribbons: &ribbonpatch::RibbonSet64| {
            let mut off = Vec::new();
            write_off(mesh, &mut off).expect("off");
            std::fs::write(dir.join(format!("{name}.off")), off).expect("write off");
            std::fs::write(
                dir.join(format!("{name}_ribbons.json")),
                ribbons.to_json_string(),
            )
            .expect("write ribbons");
            println!(
                "{name}: {} vertices, {} sides",
                mesh.n_vertices(),
                ribbons.sides.len()
            );
        };

    let (mesh, ribbons) = fixtures::pentagon_dome::<f64>(6, 9).unwrap();
    write_pair("pentagon", &mesh, &ribbons);

    let (mesh, ribbons) = fixtures::elongated_pentagon_dome::<f64>(6, 10).unwrap();
    write_pair("strip_pentagon", &mesh, &ribbons);

    let (mesh, ribbons) = fixtures::annulus_dome::<f64>(8, 0.45).unwrap();
    write_pair("annulus", &mesh, &ribbons);

    let mesh = ribbonpatch::mesh::unit_square::<f64>(12).unwrap();
    let ribbons = fixtures::flat_square_ribbons::<f64>(0.25);
    write_pair("flat_square", &mesh, &ribbons);

    let (mesh, ribbons) = fixtures::symmetric_square::<f64>(12).unwrap();
    write_pair("dome_square", &mesh, &ribbons);
}
