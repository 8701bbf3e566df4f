//! ASCII OFF reading and writing for planar triangulations.
//!
//! Accepted dialect: optional `#` comments and blank lines, an `OFF` keyword
//! (counts may follow on the same line), a counts line `nv nf ne`, `nv`
//! vertex lines with 2 or 3 coordinates (z must be zero), and `nf` faces of
//! the form `3 i j k`.

use std::io::Write;

use crate::geom::Vec2;
use crate::num::Real;

use super::{MeshError, TriMesh};

#[allow(clippy::type_complexity)]
pub fn parse_off<T: Real>(text: &str) -> Result<(Vec<Vec2<T>>, Vec<[usize; 3]>), MeshError> {
    let mut tokens: Vec<(usize, &str)> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        for tok in body.split_whitespace() {
            tokens.push((ln + 1, tok));
        }
    }
    let mut cursor = 0usize;
    fn take<'a>(
        tokens: &[(usize, &'a str)],
        cursor: &mut usize,
        what: &str,
    ) -> Result<(usize, &'a str), MeshError> {
        let t = tokens
            .get(*cursor)
            .copied()
            .ok_or_else(|| MeshError::Parse {
                line: tokens.last().map(|&(l, _)| l).unwrap_or(0),
                message: format!("unexpected end of file, expected {what}"),
            })?;
        *cursor += 1;
        Ok(t)
    }

    let (line, keyword) = take(&tokens, &mut cursor, "OFF keyword")?;
    if keyword != "OFF" {
        return Err(MeshError::Parse {
            line,
            message: format!("expected OFF keyword, found {keyword:?}"),
        });
    }
    let parse_usize = |(line, tok): (usize, &str), what: &str| -> Result<usize, MeshError> {
        tok.parse().map_err(|_| MeshError::Parse {
            line,
            message: format!("invalid {what}: {tok:?}"),
        })
    };
    let parse_float = |(line, tok): (usize, &str), what: &str| -> Result<f64, MeshError> {
        tok.parse().map_err(|_| MeshError::Parse {
            line,
            message: format!("invalid {what}: {tok:?}"),
        })
    };

    let n_vertices = parse_usize(take(&tokens, &mut cursor, "vertex count")?, "vertex count")?;
    let n_faces = parse_usize(take(&tokens, &mut cursor, "face count")?, "face count")?;
    let _n_edges = parse_usize(take(&tokens, &mut cursor, "edge count")?, "edge count")?;

    // Coordinates per vertex line: detect 2D files by token count per line.
    let mut vertices = Vec::with_capacity(n_vertices);
    let mut raw: Vec<(usize, f64, f64, f64)> = Vec::with_capacity(n_vertices);
    for _ in 0..n_vertices {
        let (line, tok) = take(&tokens, &mut cursor, "vertex coordinate")?;
        let x = parse_float((line, tok), "x coordinate")?;
        let y = parse_float(take(&tokens, &mut cursor, "y coordinate")?, "y coordinate")?;
        // Peek: a third coordinate is present when the next token is on the
        // same line (3D OFF); otherwise the file is 2D.
        let z = match tokens.get(cursor) {
            Some(&(l, _)) if l == line => {
                parse_float(take(&tokens, &mut cursor, "z coordinate")?, "z coordinate")?
            }
            _ => 0.0,
        };
        raw.push((line, x, y, z));
    }
    let span = raw
        .iter()
        .flat_map(|&(_, x, y, _)| [x.abs(), y.abs()])
        .fold(1.0f64, f64::max);
    for (index, &(_line, x, y, z)) in raw.iter().enumerate() {
        if z.abs() > span * 1e-12 {
            return Err(MeshError::NonPlanarVertex { index, z });
        }
        vertices.push(Vec2::new(T::of(x), T::of(y)));
    }

    let mut triangles = Vec::with_capacity(n_faces);
    for _ in 0..n_faces {
        let (line, tok) = take(&tokens, &mut cursor, "face size")?;
        let arity = parse_usize((line, tok), "face size")?;
        if arity != 3 {
            return Err(MeshError::Parse {
                line,
                message: format!("only triangles are supported, found {arity}-gon"),
            });
        }
        let i = parse_usize(take(&tokens, &mut cursor, "face index")?, "face index")?;
        let j = parse_usize(take(&tokens, &mut cursor, "face index")?, "face index")?;
        let k = parse_usize(take(&tokens, &mut cursor, "face index")?, "face index")?;
        triangles.push([i, j, k]);
    }
    Ok((vertices, triangles))
}

/// Writes a mesh as ASCII OFF with z = 0.
pub fn write_off<T: Real>(mesh: &TriMesh<T>, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "OFF")?;
    writeln!(out, "{} {} 0", mesh.n_vertices(), mesh.n_triangles())?;
    for p in mesh.vertices() {
        writeln!(
            out,
            "{} {} 0",
            crate::output::fmt_float(p.x),
            crate::output::fmt_float(p.y)
        )?;
    }
    for tri in mesh.triangles() {
        writeln!(out, "3 {} {} {}", tri[0], tri[1], tri[2])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_off() {
        let text = "OFF\n3 1 0\n0 0\n1 0\n0 1\n3 0 1 2\n";
        let (v, t) = parse_off::<f64>(text).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(t, vec![[0, 1, 2]]);
    }

    #[test]
    fn parses_counts_on_keyword_line_and_comments() {
        let text = "# a comment\nOFF 3 1 0\n0 0 0\n1 0 0 # corner\n0 1 0\n3 0 1 2\n";
        let (v, t) = parse_off::<f64>(text).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(t.len(), 1);
        assert_eq!(v[1], Vec2::new(1.0, 0.0));
    }

    #[test]
    fn rejects_non_planar_vertices() {
        let text = "OFF\n3 1 0\n0 0 0.5\n1 0 0\n0 1 0\n3 0 1 2\n";
        assert!(matches!(
            parse_off::<f64>(text),
            Err(MeshError::NonPlanarVertex { index: 0, .. })
        ));
    }

    #[test]
    fn rejects_quads() {
        let text = "OFF\n4 1 0\n0 0\n1 0\n1 1\n0 1\n4 0 1 2 3\n";
        assert!(matches!(
            parse_off::<f64>(text),
            Err(MeshError::Parse { .. })
        ));
    }

    #[test]
    fn round_trip_through_writer() {
        let mesh = super::super::unit_square::<f64>(2).unwrap();
        let mut buf = Vec::new();
        write_off(&mesh, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let again = TriMesh::<f64>::from_off_str(&text).unwrap();
        assert_eq!(again.n_vertices(), mesh.n_vertices());
        assert_eq!(again.triangles(), mesh.triangles());
    }
}
