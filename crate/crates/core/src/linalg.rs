//! Thin wrappers over `faer` for the dense solves used by the Newton loops and
//! the spectral code.

use faer::linalg::solvers::Solve;
use faer::{c64, Mat, Side};

use crate::error::{Error, Result};

/// Solves `a x = b` by partial-pivoting LU. Fails if the result is not finite.
pub fn solve_real(a: &Mat<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let rhs = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
    let x = a.partial_piv_lu().solve(&rhs);
    let out: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularJacobian(format!("{n}x{n} real system")));
    }
    Ok(out)
}

pub fn solve_complex(a: &Mat<c64>, b: &[c64]) -> Result<Vec<c64>> {
    let n = b.len();
    let rhs = Mat::<c64>::from_fn(n, 1, |i, _| b[i]);
    let x = a.partial_piv_lu().solve(&rhs);
    let out: Vec<c64> = (0..n).map(|i| x[(i, 0)]).collect();
    if out.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::SingularJacobian(format!("{n}x{n} complex system")));
    }
    Ok(out)
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(a: &Mat<f64>) -> Result<Vec<f64>> {
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::EigenSolverFailure(format!("{e:?}")))?;
    let s = evd.S();
    Ok((0..a.nrows()).map(|i| s[i]).collect())
}

/// Eigenvalues and right eigenvectors (columns) of a general real matrix.
pub fn real_eigen(a: &Mat<f64>) -> Result<(Vec<c64>, Mat<c64>)> {
    let evd = a.eigen().map_err(|e| Error::EigenSolverFailure(format!("{e:?}")))?;
    let s = evd.S();
    let vals: Vec<c64> = (0..a.nrows()).map(|i| s[i]).collect();
    check_finite(&vals)?;
    Ok((vals, evd.U().to_owned()))
}

pub fn real_eigenvalues(a: &Mat<f64>) -> Result<Vec<c64>> {
    let vals = a.eigenvalues().map_err(|e| Error::EigenSolverFailure(format!("{e:?}")))?;
    check_finite(&vals)?;
    Ok(vals)
}

pub fn complex_eigenvalues(a: &Mat<c64>) -> Result<Vec<c64>> {
    let vals = a.eigenvalues().map_err(|e| Error::EigenSolverFailure(format!("{e:?}")))?;
    check_finite(&vals)?;
    Ok(vals)
}

fn check_finite(vals: &[c64]) -> Result<()> {
    if vals.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::EigenSolverFailure("non-finite eigenvalue".into()));
    }
    Ok(())
}

/// Eigenvector of `a` for an eigenvalue close to `shift`, by inverse iteration.
/// Returns the unit-norm vector and the Rayleigh-refined eigenvalue.
pub fn inverse_iteration(a: &Mat<c64>, shift: c64, iterations: usize) -> Result<(Vec<c64>, c64)> {
    let n = a.nrows();
    // nudge the shift off the exact eigenvalue so the LU stays finite
    let scale = shift.norm().max(1.0);
    let sigma = shift + c64::new(1e-12 * scale, 1e-12 * scale);
    let shifted = Mat::<c64>::from_fn(n, n, |i, j| if i == j { a[(i, j)] - sigma } else { a[(i, j)] });
    let lu = shifted.partial_piv_lu();
    let mut x = Mat::<c64>::from_fn(n, 1, |i, _| c64::new(1.0 + 0.01 * i as f64, 0.3 - 0.001 * i as f64));
    for _ in 0..iterations.max(1) {
        let y = lu.solve(&x);
        let norm = (0..n).map(|i| y[(i, 0)].norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::EigenSolverFailure("inverse iteration breakdown".into()));
        }
        x = Mat::<c64>::from_fn(n, 1, |i, _| y[(i, 0)] / norm);
    }
    let v: Vec<c64> = (0..n).map(|i| x[(i, 0)]).collect();
    let av = matvec_complex(a, &v);
    let num: c64 = v.iter().zip(&av).map(|(x, y)| x.conj() * y).sum();
    Ok((v, num))
}

pub fn matvec_complex(a: &Mat<c64>, v: &[c64]) -> Vec<c64> {
    let n = a.nrows();
    (0..n).map(|i| (0..a.ncols()).map(|j| a[(i, j)] * v[j]).sum()).collect()
}

pub fn matvec_real(a: &Mat<f64>, v: &[f64]) -> Vec<f64> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)] * v[j]).sum()).collect()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn cnorm(v: &[c64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
