//! Deterministic file emission: PLY surfaces, CSV scalars, colormaps.
//!
//! All floating-point output goes through [`fmt_float`] (17 significant
//! digits), so identical inputs produce byte-identical files.

use std::io::{self, Write};

use crate::geom::Vec3;
use crate::num::Real;

/// Fixed-width scientific formatting with 17 significant digits, enough to
/// round-trip an `f64` exactly.
pub fn fmt_float<T: Real>(x: T) -> String {
    format!("{:.16e}", x.to_f64())
}

/// Writes an ASCII PLY triangle mesh, optionally with per-vertex colors.
pub fn write_ply<T: Real>(
    out: &mut impl Write,
    positions: &[Vec3<T>],
    triangles: &[[usize; 3]],
    colors: Option<&[[u8; 3]]>,
) -> io::Result<()> {
    if let Some(colors) = colors {
        assert_eq!(colors.len(), positions.len(), "one color per vertex");
    }
    writeln!(out, "ply")?;
    writeln!(out, "format ascii 1.0")?;
    writeln!(out, "element vertex {}", positions.len())?;
    writeln!(out, "property double x")?;
    writeln!(out, "property double y")?;
    writeln!(out, "property double z")?;
    if colors.is_some() {
        writeln!(out, "property uchar red")?;
        writeln!(out, "property uchar green")?;
        writeln!(out, "property uchar blue")?;
    }
    writeln!(out, "element face {}", triangles.len())?;
    writeln!(out, "property list uchar int vertex_indices")?;
    writeln!(out, "end_header")?;
    for (i, p) in positions.iter().enumerate() {
        let coords = format!("{} {} {}", fmt_float(p.x), fmt_float(p.y), fmt_float(p.z));
        match colors {
            Some(colors) => {
                let [r, g, b] = colors[i];
                writeln!(out, "{coords} {r} {g} {b}")?;
            }
            None => writeln!(out, "{coords}")?,
        }
    }
    for tri in triangles {
        writeln!(out, "3 {} {} {}", tri[0], tri[1], tri[2])?;
    }
    Ok(())
}

/// Writes `header` then `index,value` rows.
pub fn write_scalar_csv<T: Real>(
    out: &mut impl Write,
    header: &str,
    rows: impl Iterator<Item = (usize, T)>,
) -> io::Result<()> {
    writeln!(out, "{header}")?;
    for (index, value) in rows {
        writeln!(out, "{index},{}", fmt_float(value))?;
    }
    Ok(())
}

/// Writes `header` then rows of an index followed by several values.
pub fn write_multi_csv<T: Real>(
    out: &mut impl Write,
    header: &str,
    rows: impl Iterator<Item = (usize, Vec<T>)>,
) -> io::Result<()> {
    writeln!(out, "{header}")?;
    for (index, values) in rows {
        write!(out, "{index}")?;
        for v in values {
            write!(out, ",{}", fmt_float(v))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn channel(x: f64) -> u8 {
    (x.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Symmetric blue-white-red diverging map on `[-scale, scale]`.
pub fn diverging_colormap<T: Real>(value: T, scale: T) -> [u8; 3] {
    let t = if scale > T::zero() {
        (value / scale).to_f64().clamp(-1.0, 1.0)
    } else {
        0.0
    };
    if t < 0.0 {
        let a = -t;
        [channel(1.0 - 0.8 * a), channel(1.0 - 0.7 * a), channel(1.0)]
    } else {
        [channel(1.0), channel(1.0 - 0.7 * t), channel(1.0 - 0.8 * t)]
    }
}

/// Sign-split map for blend fields: nonnegative values ramp white to blue,
/// negative values ramp to yellow so sign changes are unmistakable.
pub fn sign_split_colormap<T: Real>(value: T, scale: T) -> [u8; 3] {
    let t = if scale > T::zero() {
        (value / scale).to_f64().clamp(-1.0, 1.0)
    } else {
        0.0
    };
    if t < 0.0 {
        let a = (-t).sqrt(); // emphasize small negative regions
        [channel(1.0), channel(1.0 - 0.15 * a), channel(1.0 - a)]
    } else {
        [
            channel(1.0 - 0.75 * t),
            channel(1.0 - 0.45 * t),
            channel(1.0),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_fixed_width_17_digits() {
        assert_eq!(fmt_float(1.0f64), "1.0000000000000000e0");
        assert_eq!(fmt_float(-0.5f64), "-5.0000000000000000e-1");
        let tricky = 0.1f64 + 0.2f64;
        assert_eq!(fmt_float(tricky).parse::<f64>().unwrap(), tricky);
    }

    #[test]
    fn ply_output_shape() {
        let positions = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        let mut buf = Vec::new();
        write_ply(&mut buf, &positions, &[[0, 1, 2]], Some(&[[255, 0, 0]; 3])).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("ply\nformat ascii 1.0\n"));
        assert!(text.contains("property uchar red"));
        assert!(text.trim_end().ends_with("3 0 1 2"));
    }

    #[test]
    fn colormaps_flag_negative_values() {
        let neg = sign_split_colormap(-0.5f64, 1.0);
        let pos = sign_split_colormap(0.5f64, 1.0);
        // Negative: yellow-ish (blue channel suppressed); positive: blue kept.
        assert!(neg[2] < 150 && neg[0] == 255);
        assert!(pos[2] == 255);
        assert_eq!(diverging_colormap(0.0f64, 1.0), [255, 255, 255]);
    }
}
