//! Assembly and solution of the mixed biharmonic system.
//!
//! Minimizing the Laplacian energy with prescribed boundary values `u0` and
//! inward normal derivatives `d0` leads, after introducing the auxiliary
//! variable `v = lap(u)` and eliminating the multiplier, to the equations
//!
//! ```text
//!   M v + L u = b         (all vertices)        b = -L[:,B] u0 - N d0
//!   (L v)_I  = 0          (interior vertices)
//!   u_B      = u0         (boundary vertices)
//! ```
//!
//! with `L` the cotangent stiffness, `M` the (lumped) mass and `N` the
//! boundary mass. Eliminating `v` gives the SPD reduced system
//! `(L M^-1 L)[I,I] u_I = (L M^-1 b)_I`, solved by a sparse LDL^T
//! factorization shared across the three coordinates. The full saddle system
//! is also solvable densely at desk scale as an independent reference.

use rayon::prelude::*;
use thiserror::Error;

use crate::cg::{self, CgError};
use crate::dense::{DenseError, DenseMatrix};
use crate::geom::{Vec2, Vec3};
use crate::ldlt::{LdltError, LdltFactor};
use crate::mesh::{
    boundary_mass, consistent_mass, cotangent_weights, integrated_inward_normals, lumped_mass,
    BoundaryMassMode, TriMesh,
};
use crate::num::Real;
use crate::sparse::SparseMatrix;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("factorization failed: {0}")]
    Factor(#[from] LdltError),
    #[error("dense solve failed: {0}")]
    Dense(#[from] DenseError),
    #[error("iterative solve failed: {0}")]
    Iterative(#[from] CgError),
    #[error("solution residual {residual} exceeds tolerance {tolerance}")]
    Residual { residual: f64, tolerance: f64 },
    #[error("boundary data length {got} does not match {expected} boundary vertices")]
    Dimension { expected: usize, got: usize },
    #[error("boundary data contains non-finite values")]
    NonFinite,
    #[error(
        "mesh with {vertices} vertices is too large for the dense saddle solve (limit {limit})"
    )]
    TooLargeForDense { vertices: usize, limit: usize },
}

/// Mass matrix treatment in the reduced operator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MassMode {
    /// Diagonal (barycentric) mass: `M^-1` is trivial and the reduced
    /// operator stays sparse.
    #[default]
    Lumped,
    /// Consistent mass: the saddle equations are solved by Schur elimination
    /// with exact `M^-1` back-solves and a lumped-operator preconditioner.
    Consistent,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SolverKind {
    /// Sparse LDL^T of the reduced interior operator.
    #[default]
    Direct,
    /// Diagonally preconditioned conjugate gradient on the reduced operator
    /// (tolerance 1e-12, at most `10 n` iterations).
    ConjugateGradient,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveConfig {
    pub mass_mode: MassMode,
    pub boundary_mass_mode: BoundaryMassMode,
    pub solver: SolverKind,
    /// Relative residual bound checked after every solve.
    pub residual_tolerance: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            mass_mode: MassMode::default(),
            boundary_mass_mode: BoundaryMassMode::default(),
            solver: SolverKind::default(),
            residual_tolerance: 1e-10,
        }
    }
}

/// Sampled boundary conditions in [`TriMesh::boundary_vertices`] order.
#[derive(Clone, Debug)]
pub struct BoundaryConditions<T> {
    /// Positions on the boundary (Dirichlet data, interpolated exactly).
    pub u0: Vec<Vec3<T>>,
    /// Inward normal derivatives (enforced weakly through the boundary mass).
    pub d0: Vec<Vec3<T>>,
}

impl<T: Real> BoundaryConditions<T> {
    pub fn zero(mesh: &TriMesh<T>) -> Self {
        let n = mesh.n_boundary_vertices();
        Self {
            u0: vec![Vec3::zero(); n],
            d0: vec![Vec3::zero(); n],
        }
    }

    pub fn from_fn(
        mesh: &TriMesh<T>,
        mut u0: impl FnMut(Vec2<T>) -> Vec3<T>,
        mut d0: impl FnMut(Vec2<T>) -> Vec3<T>,
    ) -> Self {
        let u0 = mesh
            .boundary_vertices()
            .iter()
            .map(|&v| u0(mesh.position(v)))
            .collect();
        let d0 = mesh
            .boundary_vertices()
            .iter()
            .map(|&v| d0(mesh.position(v)))
            .collect();
        Self { u0, d0 }
    }

    fn validate(&self, n_boundary: usize) -> Result<(), SolveError> {
        for data in [&self.u0, &self.d0] {
            if data.len() != n_boundary {
                return Err(SolveError::Dimension {
                    expected: n_boundary,
                    got: data.len(),
                });
            }
            if data.iter().any(|p| !p.is_finite()) {
                return Err(SolveError::NonFinite);
            }
        }
        Ok(())
    }

    fn coordinate(&self, axis: usize) -> (Vec<T>, Vec<T>) {
        (
            self.u0.iter().map(|p| p.coord(axis)).collect(),
            self.d0.iter().map(|p| p.coord(axis)).collect(),
        )
    }
}

/// Assembled operators and the shared factorization of the reduced system.
pub struct BiharmonicSystem<'m, T> {
    mesh: &'m TriMesh<T>,
    config: SolveConfig,
    laplacian: SparseMatrix<T>,
    mass: SparseMatrix<T>,
    boundary_mass_matrix: SparseMatrix<T>,
    interior: Vec<usize>,
    /// Reduced operator `(L M_l^-1 L)[I,I]` with lumped mass; for consistent
    /// mass it serves as the preconditioner.
    reduced: SparseMatrix<T>,
    reduced_factor: LdltFactor<T>,
    mass_factor: Option<LdltFactor<T>>,
    lumped_inverse: Vec<T>,
}

/// Scalar solve result: the full vertex field with boundary values
/// substituted, the auxiliary Laplacian variable, and the residual.
#[derive(Clone, Debug)]
pub struct ScalarSolution<T> {
    pub field: Vec<T>,
    /// Discrete `lap(u)` recovered from the first block equation.
    pub aux_laplacian: Vec<T>,
    pub relative_residual: T,
}

/// Vector solve result over the three coordinates.
#[derive(Clone, Debug)]
pub struct Solution<T> {
    pub positions: Vec<Vec3<T>>,
    /// Worst per-coordinate relative residual of the reduced system.
    pub relative_residual: T,
}

/// Dense saddle-system result (reference path).
#[derive(Clone, Debug)]
pub struct SaddleSolution<T> {
    pub positions: Vec<Vec3<T>>,
    /// Auxiliary variable; approximates the Laplacian of the solution.
    pub laplacians: Vec<Vec3<T>>,
}

/// Dense blending operators: interior response to unit boundary positions
/// (`h0`) and unit normal derivatives (`h1`).
#[derive(Clone, Debug)]
pub struct HermiteOperators<T> {
    pub h0: DenseMatrix<T>,
    pub h1: DenseMatrix<T>,
    pub interior: Vec<usize>,
}

impl<T: Real> HermiteOperators<T> {
    /// Interior values for scalar boundary data.
    pub fn apply(&self, u0: &[T], d0: &[T]) -> Vec<T> {
        let a = self.h0.mul_vec(u0);
        let b = self.h1.mul_vec(d0);
        a.iter().zip(&b).map(|(&x, &y)| x + y).collect()
    }
}

impl<'m, T: Real> BiharmonicSystem<'m, T> {
    pub fn build(mesh: &'m TriMesh<T>, config: SolveConfig) -> Result<Self, SolveError> {
        let laplacian = cotangent_weights(mesh);
        let lumped = lumped_mass(mesh);
        let mass = match config.mass_mode {
            MassMode::Lumped => lumped.clone(),
            MassMode::Consistent => consistent_mass(mesh),
        };
        let boundary_mass_matrix = boundary_mass(mesh, config.boundary_mass_mode);
        let interior = mesh.interior_vertices();
        let lumped_inverse: Vec<T> = lumped.diagonal().iter().map(|&d| T::one() / d).collect();
        // (L M_l^-1 L)[I,I]; scale_rows applies M^-1 on the left of the
        // second factor.
        let scaled = laplacian.scale_rows(&lumped_inverse);
        let product = laplacian.mul_mat(&scaled);
        let reduced = product.submatrix(&interior, &interior);
        let reduced_factor = LdltFactor::new(&reduced)?;
        let mass_factor = match config.mass_mode {
            MassMode::Lumped => None,
            MassMode::Consistent => Some(LdltFactor::new(&mass)?),
        };
        Ok(Self {
            mesh,
            config,
            laplacian,
            mass,
            boundary_mass_matrix,
            interior,
            reduced,
            reduced_factor,
            mass_factor,
            lumped_inverse,
        })
    }

    pub fn mesh(&self) -> &TriMesh<T> {
        self.mesh
    }

    pub fn config(&self) -> SolveConfig {
        self.config
    }

    pub fn laplacian(&self) -> &SparseMatrix<T> {
        &self.laplacian
    }

    pub fn mass(&self) -> &SparseMatrix<T> {
        &self.mass
    }

    pub fn boundary_mass(&self) -> &SparseMatrix<T> {
        &self.boundary_mass_matrix
    }

    /// Reduced interior operator (lumped-mass form).
    pub fn reduced_operator(&self) -> &SparseMatrix<T> {
        &self.reduced
    }

    pub fn interior_index(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary_index(&self) -> &[usize] {
        self.mesh.boundary_vertices()
    }

    /// Zero-extends per-boundary-vertex data to a full vertex vector.
    fn extend_boundary(&self, data: &[T]) -> Vec<T> {
        let mut full = vec![T::zero(); self.mesh.n_vertices()];
        for (pos, &v) in self.mesh.boundary_vertices().iter().enumerate() {
            full[v] = data[pos];
        }
        full
    }

    fn extend_interior(&self, data: &[T]) -> Vec<T> {
        let mut full = vec![T::zero(); self.mesh.n_vertices()];
        for (k, &v) in self.interior.iter().enumerate() {
            full[v] = data[k];
        }
        full
    }

    /// Right-hand side `b = -L[:,B] u0 - N d0` for one scalar problem,
    /// over all vertices.
    pub fn assemble_rhs_scalar(&self, u0: &[T], d0: &[T]) -> Vec<T> {
        let lu = self.laplacian.mul_vec(&self.extend_boundary(u0));
        let nd = self.boundary_mass_matrix.mul_vec(&self.extend_boundary(d0));
        lu.iter().zip(&nd).map(|(&a, &b)| -a - b).collect()
    }

    /// Per-coordinate right-hand sides for vector boundary conditions.
    #[allow(clippy::needless_range_loop)]
    pub fn assemble_rhs(&self, bc: &BoundaryConditions<T>) -> Result<[Vec<T>; 3], SolveError> {
        bc.validate(self.mesh.n_boundary_vertices())?;
        let mut out: [Vec<T>; 3] = Default::default();
        for axis in 0..3 {
            let (u0, d0) = bc.coordinate(axis);
            out[axis] = self.assemble_rhs_scalar(&u0, &d0);
        }
        Ok(out)
    }

    fn apply_mass_inverse(&self, x: &[T]) -> Vec<T> {
        match &self.mass_factor {
            None => x
                .iter()
                .zip(&self.lumped_inverse)
                .map(|(&v, &inv)| v * inv)
                .collect(),
            Some(f) => f.solve(x),
        }
    }

    /// Applies the reduced operator `(L M^-1 L)[I,I]` with the configured
    /// mass treatment.
    fn apply_reduced(&self, x_interior: &[T]) -> Vec<T> {
        let full = self.extend_interior(x_interior);
        let lx = self.laplacian.mul_vec(&full);
        let minv = self.apply_mass_inverse(&lx);
        let back = self.laplacian.mul_vec(&minv);
        self.interior.iter().map(|&v| back[v]).collect()
    }

    /// Solves one scalar problem; boundary values are substituted exactly.
    pub fn solve_scalar(&self, u0: &[T], d0: &[T]) -> Result<ScalarSolution<T>, SolveError> {
        let n_boundary = self.mesh.n_boundary_vertices();
        if u0.len() != n_boundary || d0.len() != n_boundary {
            return Err(SolveError::Dimension {
                expected: n_boundary,
                got: u0.len().max(d0.len()),
            });
        }
        let b = self.assemble_rhs_scalar(u0, d0);
        let minv_b = self.apply_mass_inverse(&b);
        let lb = self.laplacian.mul_vec(&minv_b);
        let rhs: Vec<T> = self.interior.iter().map(|&v| lb[v]).collect();

        let interior_solution = if self.interior.is_empty() {
            Vec::new()
        } else {
            match (self.config.mass_mode, self.config.solver) {
                (MassMode::Lumped, SolverKind::Direct) => {
                    // Direct solve plus iterative refinement against the
                    // factored-operator application: keeps the residual near
                    // machine level on badly conditioned (sliver-heavy)
                    // meshes.
                    let mut u = self.reduced_factor.solve(&rhs);
                    let scale = rhs.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
                    let target = T::of(self.config.residual_tolerance * 0.1) * scale;
                    for _ in 0..4 {
                        let applied = self.apply_reduced(&u);
                        let r: Vec<T> = rhs.iter().zip(&applied).map(|(&b, &a)| b - a).collect();
                        let worst = r.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
                        if worst <= target {
                            break;
                        }
                        let correction = self.reduced_factor.solve(&r);
                        for (ui, ci) in u.iter_mut().zip(&correction) {
                            *ui += *ci;
                        }
                    }
                    u
                }
                (MassMode::Lumped, SolverKind::ConjugateGradient) => {
                    let diag = self.reduced.diagonal();
                    cg::pcg(
                        |x| self.reduced.mul_vec(x),
                        |r| r.iter().zip(&diag).map(|(&v, &d)| v / d).collect(),
                        &rhs,
                        T::of(1e-12),
                        10 * rhs.len(),
                    )?
                    .solution
                }
                (MassMode::Consistent, _) => {
                    // Schur elimination of the saddle equations: CG on the
                    // consistent reduced operator, preconditioned by the
                    // lumped factorization.
                    cg::pcg(
                        |x| self.apply_reduced(x),
                        |r| self.reduced_factor.solve(r),
                        &rhs,
                        T::of(1e-12),
                        10 * rhs.len().max(100),
                    )?
                    .solution
                }
            }
        };

        // Residual of the reduced system.
        let applied = if self.interior.is_empty() {
            Vec::new()
        } else {
            self.apply_reduced(&interior_solution)
        };
        let mut scale = T::zero();
        let mut worst = T::zero();
        for (a, r) in applied.iter().zip(&rhs) {
            worst = worst.max((*a - *r).abs());
            scale = scale.max(r.abs());
        }
        let relative_residual = if scale > T::zero() {
            worst / scale
        } else {
            worst
        };
        if relative_residual.to_f64() > self.config.residual_tolerance {
            return Err(SolveError::Residual {
                residual: relative_residual.to_f64(),
                tolerance: self.config.residual_tolerance,
            });
        }

        let mut field = self.extend_boundary(u0);
        for (k, &v) in self.interior.iter().enumerate() {
            field[v] = interior_solution[k];
        }
        // v = M^-1 (b - L u) from the first block equation.
        let lu = self.laplacian.mul_vec(&field);
        let diff: Vec<T> = b.iter().zip(&lu).map(|(&bi, &li)| bi - li).collect();
        let aux_laplacian = self.apply_mass_inverse(&diff);
        Ok(ScalarSolution {
            field,
            aux_laplacian,
            relative_residual,
        })
    }

    /// Solves the three coordinate problems against the shared factorization.
    pub fn solve_biharmonic(&self, bc: &BoundaryConditions<T>) -> Result<Solution<T>, SolveError> {
        bc.validate(self.mesh.n_boundary_vertices())?;
        let mut fields = Vec::with_capacity(3);
        let mut residual = T::zero();
        for axis in 0..3 {
            let (u0, d0) = bc.coordinate(axis);
            let s = self.solve_scalar(&u0, &d0)?;
            residual = residual.max(s.relative_residual);
            fields.push(s.field);
        }
        let positions = (0..self.mesh.n_vertices())
            .map(|v| Vec3::new(fields[0][v], fields[1][v], fields[2][v]))
            .collect();
        Ok(Solution {
            positions,
            relative_residual: residual,
        })
    }

    /// Direct dense solve of the full saddle system with boundary rows of
    /// `u` replaced by identity constraints. Reference path for desk-scale
    /// meshes; a singular matrix signals mis-assembled constraints.
    pub fn solve_saddle_dense(
        &self,
        bc: &BoundaryConditions<T>,
    ) -> Result<SaddleSolution<T>, SolveError> {
        bc.validate(self.mesh.n_boundary_vertices())?;
        let n = self.mesh.n_vertices();
        // Test-scale reference path: the 2n x 2n dense matrix would exhaust
        // memory on production meshes.
        const DENSE_VERTEX_LIMIT: usize = 2000;
        if n > DENSE_VERTEX_LIMIT {
            return Err(SolveError::TooLargeForDense {
                vertices: n,
                limit: DENSE_VERTEX_LIMIT,
            });
        }
        let mut a = DenseMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for (j, v) in self.mass.row(i) {
                a[(i, j)] = v;
            }
            for (j, v) in self.laplacian.row(i) {
                a[(i, n + j)] = v;
            }
        }
        for &i in &self.interior {
            for (j, v) in self.laplacian.row(i) {
                a[(n + i, j)] = v;
            }
        }
        for &bv in self.mesh.boundary_vertices() {
            a[(n + bv, n + bv)] = T::one();
        }
        let factor = a.factor_lu()?;
        let mut positions = vec![Vec3::zero(); n];
        let mut laplacians = vec![Vec3::zero(); n];
        for axis in 0..3 {
            let (u0, d0) = bc.coordinate(axis);
            let nd = self
                .boundary_mass_matrix
                .mul_vec(&self.extend_boundary(&d0));
            let mut rhs = vec![T::zero(); 2 * n];
            for i in 0..n {
                rhs[i] = -nd[i];
            }
            for (pos, &bv) in self.mesh.boundary_vertices().iter().enumerate() {
                rhs[n + bv] = u0[pos];
            }
            let x = factor.solve(&rhs)?;
            for v in 0..n {
                laplacians[v].set_coord(axis, x[v]);
                positions[v].set_coord(axis, x[n + v]);
            }
        }
        Ok(SaddleSolution {
            positions,
            laplacians,
        })
    }

    /// Pre-evaluates the blending operators by substituting unit vectors for
    /// the sampled positions (`h0`) and normal derivatives (`h1`); all
    /// columns share this system's factorization.
    #[allow(clippy::type_complexity)]
    pub fn hermite_operators(&self) -> Result<HermiteOperators<T>, SolveError> {
        let n_boundary = self.mesh.n_boundary_vertices();
        let n_interior = self.interior.len();
        let zero = vec![T::zero(); n_boundary];
        let columns: Result<Vec<(Vec<T>, Vec<T>)>, SolveError> = (0..n_boundary)
            .into_par_iter()
            .map(|j| {
                let mut delta = vec![T::zero(); n_boundary];
                delta[j] = T::one();
                let pos = self.solve_scalar(&delta, &zero)?;
                let der = self.solve_scalar(&zero, &delta)?;
                let h0: Vec<T> = self.interior.iter().map(|&v| pos.field[v]).collect();
                let h1: Vec<T> = self.interior.iter().map(|&v| der.field[v]).collect();
                Ok((h0, h1))
            })
            .collect();
        let columns = columns?;
        let mut h0 = DenseMatrix::zeros(n_interior, n_boundary);
        let mut h1 = DenseMatrix::zeros(n_interior, n_boundary);
        for (j, (c0, c1)) in columns.iter().enumerate() {
            h0.set_column(j, c0);
            h1.set_column(j, c1);
        }
        Ok(HermiteOperators {
            h0,
            h1,
            interior: self.interior.clone(),
        })
    }

    /// Normal-derivative samples whose weak boundary term reproduces the
    /// given hat-integrated loads exactly: solves `N[B,B] d0 = loads`.
    pub fn normal_samples_from_loads(&self, loads: &[T]) -> Result<Vec<T>, SolveError> {
        let boundary = self.mesh.boundary_vertices();
        assert_eq!(loads.len(), boundary.len(), "one load per boundary vertex");
        let block = self.boundary_mass_matrix.submatrix(boundary, boundary);
        let factor = LdltFactor::new(&block)?;
        Ok(factor.solve(loads))
    }

    /// Normal-derivative samples reproducing a linear field `g . (x, y)`
    /// exactly (its inward-normal flux integrated against the hats).
    pub fn linear_normal_samples(&self, gradient: Vec2<T>) -> Result<Vec<T>, SolveError> {
        let loads: Vec<T> = integrated_inward_normals(self.mesh)
            .iter()
            .map(|g| g.dot(gradient))
            .collect();
        self.normal_samples_from_loads(&loads)
    }
}

/// Hat-weighted boundary integrals of a normal flux: for each boundary
/// vertex `v`, the integral of `phi_v * flux(x, n)` over the boundary, with
/// `n` the (constant) inward normal of each edge. Exact for fluxes linear
/// along each edge.
pub fn boundary_flux_loads<T: Real>(
    mesh: &TriMesh<T>,
    flux: impl Fn(Vec2<T>, Vec2<T>) -> T,
) -> Vec<T> {
    let sixth = T::of(1.0 / 6.0);
    let mut loads = vec![T::zero(); mesh.n_boundary_vertices()];
    for cycle in mesh.boundary_loops() {
        for i in 0..cycle.len() {
            let a = cycle[i];
            let b = cycle[(i + 1) % cycle.len()];
            let pa = mesh.position(a);
            let pb = mesh.position(b);
            let edge = pb - pa;
            let len = edge.norm();
            let normal = edge.perp() / len;
            let fa = flux(pa, normal);
            let fb = flux(pb, normal);
            // integral of hat * linear over a segment
            let pos_a = mesh.boundary_position(a).unwrap();
            let pos_b = mesh.boundary_position(b).unwrap();
            loads[pos_a] += len * sixth * (fa + fa + fb);
            loads[pos_b] += len * sixth * (fa + fb + fb);
        }
    }
    loads
}
