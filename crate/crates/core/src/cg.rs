//! Preconditioned conjugate gradient for SPD operators given as closures.

use thiserror::Error;

use crate::num::Real;

#[derive(Debug, Error, PartialEq)]
pub enum CgError {
    #[error("conjugate gradient stalled: residual {residual} after {iterations} iterations (tolerance {tolerance})")]
    NotConverged {
        residual: f64,
        iterations: usize,
        tolerance: f64,
    },
    #[error("preconditioner or operator produced a non-finite value at iteration {iteration}")]
    NonFinite { iteration: usize },
}

pub struct CgReport<T> {
    pub solution: Vec<T>,
    pub iterations: usize,
    /// Relative residual `||b - Ax|| / ||b||` at exit.
    pub relative_residual: T,
}

/// Solves `A x = b` with `A` SPD, applying `A` and an SPD preconditioner
/// through closures. Converges when `||r|| <= tol * ||b||`.
pub fn pcg<T, A, P>(
    apply_a: A,
    apply_prec: P,
    b: &[T],
    tol: T,
    max_iter: usize,
) -> Result<CgReport<T>, CgError>
where
    T: Real,
    A: Fn(&[T]) -> Vec<T>,
    P: Fn(&[T]) -> Vec<T>,
{
    let n = b.len();
    let norm_b = norm(b);
    if norm_b == T::zero() {
        return Ok(CgReport {
            solution: vec![T::zero(); n],
            iterations: 0,
            relative_residual: T::zero(),
        });
    }
    let mut x = vec![T::zero(); n];
    let mut r = b.to_vec();
    let mut z = apply_prec(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let target = tol * norm_b;
    for it in 0..max_iter {
        let res = norm(&r);
        if !res.is_finite() {
            return Err(CgError::NonFinite { iteration: it });
        }
        if res <= target {
            return Ok(CgReport {
                solution: x,
                iterations: it,
                relative_residual: res / norm_b,
            });
        }
        let ap = apply_a(&p);
        let pap = dot(&p, &ap);
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        z = apply_prec(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = norm(&r);
    if res <= target {
        return Ok(CgReport {
            solution: x,
            iterations: max_iter,
            relative_residual: res / norm_b,
        });
    }
    Err(CgError::NotConverged {
        residual: res.to_f64(),
        iterations: max_iter,
        tolerance: (tol * norm_b).to_f64(),
    })
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldlt::LdltFactor;
    use crate::sparse::TripletBuilder;

    #[test]
    fn converges_on_tridiagonal() {
        let n = 40;
        let mut tb = TripletBuilder::new(n, n);
        for i in 0..n {
            tb.push(i, i, 2.1);
            if i + 1 < n {
                tb.push(i, i + 1, -1.0);
                tb.push(i + 1, i, -1.0);
            }
        }
        let a = tb.build();
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).cos()).collect();
        let b = a.mul_vec(&x_true);
        let diag = a.diagonal();
        let report = pcg(
            |v| a.mul_vec(v),
            |r| r.iter().zip(&diag).map(|(ri, di)| ri / di).collect(),
            &b,
            1e-13,
            10 * n,
        )
        .unwrap();
        for (xi, ti) in report.solution.iter().zip(&x_true) {
            assert!((xi - ti).abs() < 1e-10);
        }
    }

    #[test]
    fn exact_preconditioner_converges_immediately() {
        let n = 25;
        let mut tb = TripletBuilder::new(n, n);
        for i in 0..n {
            tb.push(i, i, 4.0 + (i % 3) as f64);
            if i + 1 < n {
                tb.push(i, i + 1, 1.0);
                tb.push(i + 1, i, 1.0);
            }
        }
        let a = tb.build();
        let f = LdltFactor::new(&a).unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64) - 10.0).collect();
        let report = pcg(|v| a.mul_vec(v), |r| f.solve(r), &b, 1e-13, 5).unwrap();
        assert!(report.iterations <= 2);
    }

    #[test]
    fn zero_rhs_short_circuits() {
        let report = pcg(
            |v: &[f64]| v.to_vec(),
            |r| r.to_vec(),
            &[0.0, 0.0],
            1e-12,
            10,
        )
        .unwrap();
        assert_eq!(report.solution, vec![0.0, 0.0]);
        assert_eq!(report.iterations, 0);
    }
}
