//! Tensor-product Bezier/B-spline ribbons and their derivatives.
//!
//! A ribbon `R(s, h)` maps `[0,1]^2` into space; the row `h = 0` traces the
//! boundary curve and `dR/dh` along it supplies the cross-derivative. Bezier
//! ribbons are clamped B-splines with no interior knots, sharing one
//! evaluation path.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Vec2, Vec3};
use crate::num::Real;

#[derive(Debug, Error)]
pub enum SplineError {
    #[error("parameter {name} = {value} outside [0, 1]")]
    ParamOutOfRange { name: &'static str, value: f64 },
    #[error("knot vector {name} is invalid: {message}")]
    BadKnots { name: &'static str, message: String },
    #[error("control net is invalid: {0}")]
    BadNet(String),
    #[error("ribbon JSON: {0}")]
    Json(String),
    #[error(
        "ribbons {prev} and {next} of loop {loop_index} do not meet at corner {corner}: gap {gap}"
    )]
    CornerMismatch {
        loop_index: usize,
        corner: usize,
        prev: usize,
        next: usize,
        gap: f64,
    },
    #[error("loop {loop_index} references side {side}, but only {n_sides} sides are defined")]
    BadLoopSide {
        loop_index: usize,
        side: usize,
        n_sides: usize,
    },
}

/// Tensor-product spline surface attached to one boundary side.
///
/// `control_net[row][col]`: rows run along `s`, columns along `h`; column 0
/// is the boundary row.
#[derive(Clone, Debug)]
pub struct Ribbon<T> {
    degree_s: usize,
    degree_h: usize,
    knots_s: Vec<T>,
    knots_h: Vec<T>,
    control_net: Vec<Vec<Vec3<T>>>,
}

impl<T: Real> Ribbon<T> {
    pub fn new(
        degree_s: usize,
        degree_h: usize,
        knots_s: Vec<T>,
        knots_h: Vec<T>,
        control_net: Vec<Vec<Vec3<T>>>,
    ) -> Result<Self, SplineError> {
        if degree_h < 1 {
            return Err(SplineError::BadNet(
                "degree_h must be at least 1 to carry a cross-derivative".into(),
            ));
        }
        let rows = control_net.len();
        if rows == 0 {
            return Err(SplineError::BadNet("empty control net".into()));
        }
        let cols = control_net[0].len();
        if cols < 2 {
            return Err(SplineError::BadNet(
                "control net needs at least 2 columns (boundary and cross-derivative rows)".into(),
            ));
        }
        if control_net.iter().any(|r| r.len() != cols) {
            return Err(SplineError::BadNet("ragged control net".into()));
        }
        if control_net.iter().any(|r| r.iter().any(|p| !p.is_finite())) {
            return Err(SplineError::BadNet("non-finite control point".into()));
        }
        let knots_s = normalize_knots("knots_s", knots_s, degree_s, rows)?;
        let knots_h = normalize_knots("knots_h", knots_h, degree_h, cols)?;
        Ok(Self {
            degree_s,
            degree_h,
            knots_s,
            knots_h,
            control_net,
        })
    }

    /// Bezier ribbon: degrees inferred from the net, clamped knot vectors
    /// with no interior knots.
    pub fn bezier(control_net: Vec<Vec<Vec3<T>>>) -> Result<Self, SplineError> {
        let rows = control_net.len();
        let cols = control_net.first().map(Vec::len).unwrap_or(0);
        if rows == 0 || cols == 0 {
            return Err(SplineError::BadNet("empty control net".into()));
        }
        Self::new(
            rows - 1,
            cols.saturating_sub(1).max(1),
            bezier_knots(rows - 1),
            bezier_knots(cols - 1),
            control_net,
        )
    }

    pub fn degree_s(&self) -> usize {
        self.degree_s
    }

    pub fn degree_h(&self) -> usize {
        self.degree_h
    }

    pub fn knots_s(&self) -> &[T] {
        &self.knots_s
    }

    pub fn knots_h(&self) -> &[T] {
        &self.knots_h
    }

    pub fn control_net(&self) -> &[Vec<Vec3<T>>] {
        &self.control_net
    }

    pub fn n_rows(&self) -> usize {
        self.control_net.len()
    }

    pub fn n_cols(&self) -> usize {
        self.control_net[0].len()
    }

    /// Surface point by de Boor evaluation of both factors.
    pub fn eval(&self, s: T, h: T) -> Result<Vec3<T>, SplineError> {
        check_param("s", s)?;
        check_param("h", h)?;
        let (span_s, basis_s) = basis_at(&self.knots_s, self.degree_s, s);
        let (span_h, basis_h) = basis_at(&self.knots_h, self.degree_h, h);
        let mut acc = Vec3::zero();
        for (a, &bs) in basis_s.iter().enumerate() {
            let row = &self.control_net[span_s - self.degree_s + a];
            for (b, &bh) in basis_h.iter().enumerate() {
                acc += row[span_h - self.degree_h + b] * (bs * bh);
            }
        }
        Ok(acc)
    }

    /// Exact first partials `(dR/ds, dR/dh)`.
    pub fn eval_partials(&self, s: T, h: T) -> Result<(Vec3<T>, Vec3<T>), SplineError> {
        check_param("s", s)?;
        check_param("h", h)?;
        let (span_s, basis_s, dbasis_s) = basis_and_derivative_at(&self.knots_s, self.degree_s, s);
        let (span_h, basis_h, dbasis_h) = basis_and_derivative_at(&self.knots_h, self.degree_h, h);
        let mut ds = Vec3::zero();
        let mut dh = Vec3::zero();
        for a in 0..=self.degree_s {
            let row = &self.control_net[span_s - self.degree_s + a];
            for b in 0..=self.degree_h {
                let p = row[span_h - self.degree_h + b];
                ds += p * (dbasis_s[a] * basis_h[b]);
                dh += p * (basis_s[a] * dbasis_h[b]);
            }
        }
        Ok((ds, dh))
    }

    /// Boundary position and cross-derivative at `(s, 0)`.
    pub fn boundary_data(&self, s: T) -> Result<(Vec3<T>, Vec3<T>), SplineError> {
        let position = self.eval(s, T::zero())?;
        let (_, cross) = self.eval_partials(s, T::zero())?;
        Ok((position, cross))
    }

    /// Reverses the `s` direction: rows flip and the `s` knot vector is
    /// mirrored, so `reversed.eval(s, h) == self.eval(1-s, h)`.
    pub fn reversed_s(&self) -> Self {
        let mut net = self.control_net.clone();
        net.reverse();
        let mut knots: Vec<T> = self.knots_s.iter().map(|&u| T::one() - u).collect();
        knots.reverse();
        Self {
            degree_s: self.degree_s,
            degree_h: self.degree_h,
            knots_s: knots,
            knots_h: self.knots_h.clone(),
            control_net: net,
        }
    }

    /// Applies a point transform to all control points.
    pub fn map_points(&self, f: impl Fn(Vec3<T>) -> Vec3<T>) -> Self {
        let net = self
            .control_net
            .iter()
            .map(|row| row.iter().map(|&p| f(p)).collect())
            .collect();
        Self {
            degree_s: self.degree_s,
            degree_h: self.degree_h,
            knots_s: self.knots_s.clone(),
            knots_h: self.knots_h.clone(),
            control_net: net,
        }
    }
}

fn check_param<T: Real>(name: &'static str, value: T) -> Result<(), SplineError> {
    if value < T::zero() || value > T::one() || !value.is_finite() {
        return Err(SplineError::ParamOutOfRange {
            name,
            value: value.to_f64(),
        });
    }
    Ok(())
}

fn bezier_knots<T: Real>(degree: usize) -> Vec<T> {
    let mut knots = vec![T::zero(); degree + 1];
    knots.extend(vec![T::one(); degree + 1]);
    knots
}

fn normalize_knots<T: Real>(
    name: &'static str,
    mut knots: Vec<T>,
    degree: usize,
    n_ctrl: usize,
) -> Result<Vec<T>, SplineError> {
    let expected = n_ctrl + degree + 1;
    if knots.len() != expected {
        return Err(SplineError::BadKnots {
            name,
            message: format!(
                "expected {expected} knots for degree {degree} with {n_ctrl} control points, got {}",
                knots.len()
            ),
        });
    }
    if knots.windows(2).any(|w| w[1] < w[0]) {
        return Err(SplineError::BadKnots {
            name,
            message: "knots must be non-decreasing".into(),
        });
    }
    let lo = knots[0];
    let hi = *knots.last().unwrap();
    if hi <= lo {
        return Err(SplineError::BadKnots {
            name,
            message: "knot range is empty".into(),
        });
    }
    for u in knots.iter_mut() {
        *u = (*u - lo) / (hi - lo);
    }
    for k in 0..=degree {
        if knots[k] != T::zero() || knots[knots.len() - 1 - k] != T::one() {
            return Err(SplineError::BadKnots {
                name,
                message: format!(
                    "knot vector must be clamped (first/last repeated {} times)",
                    degree + 1
                ),
            });
        }
    }
    // End multiplicity above degree+1 would leave empty spans in the basis
    // recurrence.
    if knots[degree + 1] == T::zero() || knots[knots.len() - degree - 2] == T::one() {
        return Err(SplineError::BadKnots {
            name,
            message: format!("end knot multiplicity exceeds degree + 1 = {}", degree + 1),
        });
    }
    Ok(knots)
}

/// Index of the knot span containing `u` (the largest `i` with `U[i] <= u`,
/// clamped to the last non-empty span at `u = 1`).
fn find_span<T: Real>(knots: &[T], degree: usize, u: T) -> usize {
    let n = knots.len() - degree - 2; // last control index
    if u >= knots[n + 1] {
        return n;
    }
    let mut lo = degree;
    let mut hi = n + 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if u < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Nonzero basis functions at `u` (Cox-de Boor recurrence).
fn basis_at<T: Real>(knots: &[T], degree: usize, u: T) -> (usize, Vec<T>) {
    let span = find_span(knots, degree, u);
    let mut basis = vec![T::zero(); degree + 1];
    basis[0] = T::one();
    let mut left = vec![T::zero(); degree + 1];
    let mut right = vec![T::zero(); degree + 1];
    for j in 1..=degree {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        let mut saved = T::zero();
        for r in 0..j {
            let temp = basis[r] / (right[r + 1] + left[j - r]);
            basis[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        basis[j] = saved;
    }
    (span, basis)
}

/// Nonzero basis functions and their first derivatives at `u`.
fn basis_and_derivative_at<T: Real>(knots: &[T], degree: usize, u: T) -> (usize, Vec<T>, Vec<T>) {
    let span = find_span(knots, degree, u);
    if degree == 0 {
        return (span, vec![T::one()], vec![T::zero()]);
    }
    // Table of basis functions of all orders up to `degree` (triangular
    // scheme), then the standard first-derivative formula of order p from
    // the order p-1 row.
    let mut ndu = vec![vec![T::zero(); degree + 1]; degree + 1];
    ndu[0][0] = T::one();
    let mut left = vec![T::zero(); degree + 1];
    let mut right = vec![T::zero(); degree + 1];
    for j in 1..=degree {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        let mut saved = T::zero();
        for r in 0..j {
            let temp = ndu[j - 1][r] / (right[r + 1] + left[j - r]);
            ndu[j][r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let basis = ndu[degree].clone();
    let p = T::of_usize(degree);
    let lower = &ndu[degree - 1];
    let mut dbasis = vec![T::zero(); degree + 1];
    for r in 0..=degree {
        let mut d = T::zero();
        if r > 0 {
            d += lower[r - 1] / (knots[span + r] - knots[span + r - degree]);
        }
        if r < degree {
            d -= lower[r] / (knots[span + r + 1] - knots[span + r + 1 - degree]);
        }
        dbasis[r] = d * p;
    }
    (span, basis, dbasis)
}

/// Sides of one boundary loop, in traversal order, with optional planar
/// corner positions used to split the mesh boundary into sides.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: serde::de::DeserializeOwned"
))]
pub struct LoopSpec<T> {
    pub sides: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corners_uv: Option<Vec<Vec2<T>>>,
}

/// A full boundary description: one ribbon per side plus the loop structure.
#[derive(Clone, Debug)]
pub struct RibbonSet<T> {
    pub sides: Vec<Ribbon<T>>,
    pub loops: Vec<LoopSpec<T>>,
}

/// Corner agreement report for one loop corner.
#[derive(Clone, Debug, Serialize)]
pub struct CornerCheck {
    pub loop_index: usize,
    pub corner: usize,
    pub prev_side: usize,
    pub next_side: usize,
    /// Distance between the meeting boundary endpoints.
    pub position_gap: f64,
    /// Cross-derivative disagreement at the corner (reported, not enforced).
    pub twist_gap: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ConnectivityReport {
    pub corners: Vec<CornerCheck>,
    pub warnings: Vec<String>,
}

impl<T: Real> RibbonSet<T> {
    pub fn from_json_str(text: &str) -> Result<Self, SplineError>
    where
        T: serde::de::DeserializeOwned,
    {
        let doc: RibbonSetFile<T> =
            serde_json::from_str(text).map_err(|e| SplineError::Json(e.to_string()))?;
        let mut sides = Vec::with_capacity(doc.sides.len());
        for spec in doc.sides {
            let rows = spec.control_net.len();
            let cols = spec.control_net.first().map(Vec::len).unwrap_or(0);
            let net: Vec<Vec<Vec3<T>>> = spec
                .control_net
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|p| Vec3::new(p[0], p[1], p[2]))
                        .collect()
                })
                .collect();
            let knots_s = match spec.knots_s {
                Some(k) => k,
                None => bezier_knots(spec.degree_s.unwrap_or(rows.saturating_sub(1))),
            };
            let knots_h = match spec.knots_h {
                Some(k) => k,
                None => bezier_knots(spec.degree_h.unwrap_or(cols.saturating_sub(1))),
            };
            let degree_s = spec.degree_s.unwrap_or(rows.saturating_sub(1));
            let degree_h = spec.degree_h.unwrap_or(cols.saturating_sub(1)).max(1);
            sides.push(Ribbon::new(degree_s, degree_h, knots_s, knots_h, net)?);
        }
        let loops = if doc.loops.is_empty() {
            vec![LoopSpec {
                sides: (0..sides.len()).collect(),
                corners_uv: None,
            }]
        } else {
            doc.loops
        };
        let set = Self { sides, loops };
        set.check_loop_indices()?;
        Ok(set)
    }

    pub fn from_json_file(path: impl AsRef<std::path::Path>) -> Result<Self, SplineError>
    where
        T: serde::de::DeserializeOwned,
    {
        let text = std::fs::read_to_string(path).map_err(|e| SplineError::Json(e.to_string()))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String
    where
        T: Serialize,
    {
        let doc = RibbonSetFile {
            sides: self
                .sides
                .iter()
                .map(|r| RibbonSpec {
                    degree_s: Some(r.degree_s()),
                    degree_h: Some(r.degree_h()),
                    knots_s: Some(r.knots_s().to_vec()),
                    knots_h: Some(r.knots_h().to_vec()),
                    control_net: r
                        .control_net()
                        .iter()
                        .map(|row| row.iter().map(|p| [p.x, p.y, p.z]).collect())
                        .collect(),
                })
                .collect(),
            loops: self.loops.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("ribbon set serialization cannot fail")
    }

    fn check_loop_indices(&self) -> Result<(), SplineError> {
        for (li, spec) in self.loops.iter().enumerate() {
            for &s in &spec.sides {
                if s >= self.sides.len() {
                    return Err(SplineError::BadLoopSide {
                        loop_index: li,
                        side: s,
                        n_sides: self.sides.len(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Characteristic length of the control nets (bounding-box diagonal),
    /// the scale for corner tolerances.
    pub fn scale(&self) -> T {
        let mut lo = Vec3::splat(T::infinity());
        let mut hi = Vec3::splat(T::neg_infinity());
        for ribbon in &self.sides {
            for row in ribbon.control_net() {
                for p in row {
                    lo.x = lo.x.min(p.x);
                    lo.y = lo.y.min(p.y);
                    lo.z = lo.z.min(p.z);
                    hi.x = hi.x.max(p.x);
                    hi.y = hi.y.max(p.y);
                    hi.z = hi.z.max(p.z);
                }
            }
        }
        (hi - lo).norm().max(T::min_positive_value())
    }

    /// Checks end-to-start chaining around every loop, reversing ribbons
    /// whose `s` direction opposes the loop (with a warning), and reports
    /// per-corner position and twist gaps.
    ///
    /// `tolerance` is relative to [`Self::scale`]; a corner gap above it is a
    /// hard error. Twist gaps are reported but never enforced.
    pub fn orient_and_check(&mut self, tolerance: T) -> Result<ConnectivityReport, SplineError> {
        self.check_loop_indices()?;
        let scale = self.scale();
        let tol = tolerance * scale;
        let mut report = ConnectivityReport::default();
        for li in 0..self.loops.len() {
            let chain = self.loops[li].sides.clone();
            // Greedy orientation pass: keep the first ribbon, reverse any
            // subsequent ribbon whose start is farther than its end from the
            // running endpoint.
            for k in 1..chain.len() {
                let endpoint = self.sides[chain[k - 1]]
                    .eval(T::one(), T::zero())
                    .expect("in-range");
                let ribbon = &self.sides[chain[k]];
                let d_fwd =
                    (ribbon.eval(T::zero(), T::zero()).expect("in-range") - endpoint).norm();
                let d_rev = (ribbon.eval(T::one(), T::zero()).expect("in-range") - endpoint).norm();
                if d_rev < d_fwd {
                    self.sides[chain[k]] = ribbon.reversed_s();
                    report.warnings.push(format!(
                        "reversed ribbon {} to match loop {} orientation",
                        chain[k], li
                    ));
                }
            }
            for k in 0..chain.len() {
                let prev = chain[k];
                let next = chain[(k + 1) % chain.len()];
                let (p_end, t_end) = self.sides[prev].boundary_data(T::one()).expect("in-range");
                let (p_start, t_start) =
                    self.sides[next].boundary_data(T::zero()).expect("in-range");
                let gap = (p_end - p_start).norm();
                report.corners.push(CornerCheck {
                    loop_index: li,
                    corner: (k + 1) % chain.len(),
                    prev_side: prev,
                    next_side: next,
                    position_gap: gap.to_f64(),
                    twist_gap: (t_end - t_start).norm().to_f64(),
                });
                if gap > tol {
                    return Err(SplineError::CornerMismatch {
                        loop_index: li,
                        corner: (k + 1) % chain.len(),
                        prev,
                        next,
                        gap: gap.to_f64(),
                    });
                }
            }
        }
        Ok(report)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: serde::de::DeserializeOwned"
))]
struct RibbonSpec<T> {
    #[serde(default)]
    degree_s: Option<usize>,
    #[serde(default)]
    degree_h: Option<usize>,
    #[serde(default)]
    knots_s: Option<Vec<T>>,
    #[serde(default)]
    knots_h: Option<Vec<T>>,
    control_net: Vec<Vec<[T; 3]>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: serde::de::DeserializeOwned"
))]
struct RibbonSetFile<T> {
    sides: Vec<RibbonSpec<T>>,
    #[serde(default = "Vec::new")]
    loops: Vec<LoopSpec<T>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bilinear() -> Ribbon<f64> {
        Ribbon::bezier(vec![
            vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.5)],
            vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 1.0)],
        ])
        .unwrap()
    }

    #[test]
    fn bilinear_center_is_corner_average() {
        let r = bilinear();
        let p = r.eval(0.5, 0.5).unwrap();
        assert!((p.x - 0.5).abs() < 1e-15);
        assert!((p.y - 0.5).abs() < 1e-15);
        assert!((p.z - 0.375).abs() < 1e-15);
    }

    #[test]
    fn clamped_endpoint_interpolation() {
        let r = bilinear();
        assert_eq!(r.eval(0.0, 0.0).unwrap(), Vec3::new(0.0, 0.0, 0.0));
        assert_eq!(r.eval(1.0, 0.0).unwrap(), Vec3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn linear_h_derivative_is_control_difference() {
        let r = bilinear();
        let (_, dh) = r.eval_partials(0.0, 0.0).unwrap();
        let expected = Vec3::new(0.0, 1.0, 0.5) - Vec3::new(0.0, 0.0, 0.0);
        assert!((dh - expected).norm() < 1e-15);
        // Ruled in h: dR/dh independent of h.
        let (_, dh_mid) = r.eval_partials(0.3, 0.8).unwrap();
        let (_, dh_zero) = r.eval_partials(0.3, 0.0).unwrap();
        assert!((dh_mid - dh_zero).norm() < 1e-15);
    }

    #[test]
    fn out_of_range_parameters_error() {
        let r = bilinear();
        assert!(matches!(
            r.eval(-0.1, 0.5),
            Err(SplineError::ParamOutOfRange { name: "s", .. })
        ));
        assert!(matches!(
            r.eval(0.5, 1.5),
            Err(SplineError::ParamOutOfRange { name: "h", .. })
        ));
    }

    #[test]
    fn boundary_data_matches_eval_and_partials() {
        let r = Ribbon::bezier(vec![
            vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.1, 0.9, 0.2)],
            vec![Vec3::new(0.4, -0.2, 0.3), Vec3::new(0.5, 1.1, 0.0)],
            vec![Vec3::new(0.9, 0.1, -0.1), Vec3::new(1.0, 1.0, 0.4)],
        ])
        .unwrap();
        for k in 0..=50 {
            let s = k as f64 / 50.0;
            let (p, d) = r.boundary_data(s).unwrap();
            assert!((p - r.eval(s, 0.0).unwrap()).norm() < 1e-15);
            assert!((d - r.eval_partials(s, 0.0).unwrap().1).norm() < 1e-15);
        }
    }

    #[test]
    fn partition_of_unity_constant_net() {
        // Interior knots exercise the general B-spline path.
        let knots_s = vec![0.0, 0.0, 0.0, 0.4, 0.7, 1.0, 1.0, 1.0];
        let knots_h = vec![0.0, 0.0, 1.0, 1.0];
        let c = Vec3::new(0.3, -0.7, 2.0);
        let net = vec![vec![c; 2]; 5];
        let r = Ribbon::new(2, 1, knots_s, knots_h, net).unwrap();
        for k in 0..=10 {
            for l in 0..=10 {
                let p = r.eval(k as f64 / 10.0, l as f64 / 10.0).unwrap();
                assert!((p - c).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences_on_bspline() {
        let knots_s = vec![0.0, 0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0, 1.0];
        let knots_h = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let net: Vec<Vec<Vec3<f64>>> = (0..5)
            .map(|i| {
                (0..3)
                    .map(|j| {
                        let fi = i as f64;
                        let fj = j as f64;
                        Vec3::new(fi * 0.3, fj * 0.5, (fi * 1.7 + fj * 0.9).sin())
                    })
                    .collect()
            })
            .collect();
        let r = Ribbon::new(3, 2, knots_s, knots_h, net).unwrap();
        let eps = 1e-6;
        for &(s, h) in &[(0.2, 0.3), (0.5, 0.5), (0.73, 0.11), (0.45, 0.99)] {
            let (ds, dh) = r.eval_partials(s, h).unwrap();
            let fd_s = (r.eval(s + eps, h).unwrap() - r.eval(s - eps, h).unwrap()) / (2.0 * eps);
            let fd_h = (r.eval(s, h + eps).unwrap() - r.eval(s, h - eps).unwrap()) / (2.0 * eps);
            assert!((ds - fd_s).norm() < 1e-6 * (1.0 + ds.norm()));
            assert!((dh - fd_h).norm() < 1e-6 * (1.0 + dh.norm()));
        }
    }

    #[test]
    fn reversed_ribbon_mirrors_s() {
        let r = Ribbon::bezier(vec![
            vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)],
            vec![Vec3::new(0.5, 0.3, 0.2), Vec3::new(0.5, 1.0, 0.1)],
            vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 0.0)],
        ])
        .unwrap();
        let rev = r.reversed_s();
        for k in 0..=8 {
            let s = k as f64 / 8.0;
            let a = r.eval(s, 0.4).unwrap();
            let b = rev.eval(1.0 - s, 0.4).unwrap();
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn json_round_trip_and_orientation_fix() {
        let straight = |a: Vec3<f64>, b: Vec3<f64>| {
            Ribbon::bezier(vec![
                vec![a, a + Vec3::new(0.0, 0.0, 1.0)],
                vec![b, b + Vec3::new(0.0, 0.0, 1.0)],
            ])
            .unwrap()
        };
        let p0 = Vec3::new(0.0, 0.0, 0.0);
        let p1 = Vec3::new(1.0, 0.0, 0.0);
        let p2 = Vec3::new(0.5, 1.0, 0.0);
        let mut set = RibbonSet {
            sides: vec![
                straight(p0, p1),
                straight(p2, p1).reversed_s().reversed_s(), // forward
                straight(p0, p2).reversed_s().reversed_s(), // forward but wrong direction in the loop
            ],
            loops: vec![LoopSpec {
                sides: vec![0, 1, 2],
                corners_uv: None,
            }],
        };
        // Side 1 runs p2 -> p1, should be reversed to p1 -> p2; side 2 runs
        // p0 -> p2, should be reversed to p2 -> p0.
        let report = set.orient_and_check(1e-9).unwrap();
        assert_eq!(report.warnings.len(), 2);
        assert_eq!(report.corners.len(), 3);
        for c in &report.corners {
            assert!(c.position_gap < 1e-15);
        }
        let json = set.to_json_string();
        let again = RibbonSet::<f64>::from_json_str(&json).unwrap();
        assert_eq!(again.sides.len(), 3);
        assert_eq!(again.loops[0].sides, vec![0, 1, 2]);
    }

    #[test]
    fn overclamped_knots_are_rejected() {
        let net = vec![vec![Vec3::new(0.0, 0.0, 0.0); 2]; 5];
        // First knot repeated degree + 2 times.
        let bad = vec![0.0, 0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0];
        assert!(matches!(
            Ribbon::new(2, 1, bad, vec![0.0, 0.0, 1.0, 1.0], net),
            Err(SplineError::BadKnots { .. })
        ));
    }

    #[test]
    fn minimal_json_defaults_to_bezier_and_one_loop() {
        let text = r#"{
            "sides": [
                { "control_net": [[[0,0,0],[0,1,0]], [[1,0,0],[1,1,0]], [[2,0,0],[2,1,0]]] }
            ]
        }"#;
        let set = RibbonSet::<f64>::from_json_str(text).unwrap();
        assert_eq!(set.sides[0].degree_s(), 2);
        assert_eq!(set.sides[0].degree_h(), 1);
        assert_eq!(set.loops.len(), 1);
        assert_eq!(set.loops[0].sides, vec![0]);
        let p = set.sides[0].eval(0.5, 0.0).unwrap();
        assert!((p.x - 1.0).abs() < 1e-15);
    }

    #[test]
    fn corner_mismatch_is_detected() {
        let straight = |a: Vec3<f64>, b: Vec3<f64>| {
            Ribbon::bezier(vec![
                vec![a, a + Vec3::new(0.0, 0.0, 1.0)],
                vec![b, b + Vec3::new(0.0, 0.0, 1.0)],
            ])
            .unwrap()
        };
        let mut set = RibbonSet {
            sides: vec![
                straight(Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)),
                straight(Vec3::new(1.0, 0.1, 0.0), Vec3::new(0.0, 0.0, 0.0)),
            ],
            loops: vec![LoopSpec {
                sides: vec![0, 1],
                corners_uv: None,
            }],
        };
        assert!(matches!(
            set.orient_and_check(1e-6),
            Err(SplineError::CornerMismatch { .. })
        ));
    }
}
