//! Multi-sided biharmonic surface patches from B-spline ribbons.
//!
//! The crate builds smooth surface patches over triangulated planar domains,
//! possibly with holes, by minimizing the Laplacian energy subject to boundary
//! positions and cross-derivatives supplied by tensor-product Bezier/B-spline
//! ribbons. The pipeline:
//!
//! 1. [`mesh`]: load a planar triangulation, extract boundary loops and
//!    per-element quantities (cotangent weights, lumped areas, gradients).
//! 2. [`spline`]: evaluate ribbons `R_i(s, h)` and their partials; row `h=0`
//!    carries boundary positions, `dR/dh` the cross-derivative.
//! 3. [`param`]: reparameterize each ribbon harmonically onto the domain and
//!    compute boundary normal derivatives of the parameter fields.
//! 4. [`assembly`]: assemble and solve the mixed discretization of the
//!    biharmonic problem; extract generalized Hermite operators.
//! 5. [`patch`]: sample boundary conditions, solve, and report the lifted
//!    surface with mean-curvature diagnostics and blend fields.
//!
//! All numerics are generic over the scalar type through [`num::Real`];
//! `f64` aliases for the main types are exported at the crate root.

pub mod assembly;
pub mod cg;
pub mod dense;
pub mod fixtures;
pub mod geom;
pub mod ldlt;
pub mod mesh;
pub mod num;
pub mod output;
pub mod param;
pub mod patch;
pub mod sparse;
pub mod spline;

pub use geom::{Vec2, Vec3};
pub use num::Real;

/// `f64` aliases for the main domain types.
pub type TriMesh64 = mesh::TriMesh<f64>;
pub type Ribbon64 = spline::Ribbon<f64>;
pub type RibbonSet64 = spline::RibbonSet<f64>;
pub type SideParam64 = param::SideParam<f64>;
pub type BiharmonicSystem64<'m> = assembly::BiharmonicSystem<'m, f64>;
pub type BoundaryConditions64 = assembly::BoundaryConditions<f64>;
pub type HermiteOperators64 = assembly::HermiteOperators<f64>;
pub type PatchResult64 = patch::PatchResult<f64>;
