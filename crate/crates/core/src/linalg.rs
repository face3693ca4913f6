//! Dense linear solves with an explicit near-singularity check.
//!
//! Symmetric systems are factored with Cholesky first; nonsymmetric ones,
//! and symmetric ones Cholesky rejects, use partially pivoted LU. Either way a pivot smaller than
//! [`PIVOT_RTOL`] times the largest diagonal magnitude of the input is
//! reported as singular.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const PIVOT_RTOL: f64 = 1e-12;

/// Which factorization produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Cholesky,
    Lu,
}

pub fn solve(a: &DMatrix<f64>, b: &DMatrix<f64>, context: &str) -> Result<DMatrix<f64>> {
    solve_with_method(a, b, context).map(|(x, _)| x)
}

pub fn solve_vector(a: &DMatrix<f64>, b: &DVector<f64>, context: &str) -> Result<DVector<f64>> {
    let rhs = DMatrix::from_column_slice(b.len(), 1, b.as_slice());
    let x = solve(a, &rhs, context)?;
    Ok(x.column(0).into_owned())
}

pub fn solve_with_method(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    context: &str,
) -> Result<(DMatrix<f64>, Method)> {
    if !a.is_square() || a.nrows() != b.nrows() {
        return Err(Error::invalid(format!(
            "{context}: cannot solve {}x{} system with {}-row right-hand side",
            a.nrows(),
            a.ncols(),
            b.nrows()
        )));
    }
    let mut scale = a.diagonal().amax();
    if scale == 0.0 {
        // Zero diagonal: measure pivots against the largest entry instead.
        scale = a.amax();
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::singular(context));
    }
    let threshold = PIVOT_RTOL * scale;

    // Cholesky only reads the lower triangle, so it is limited to exactly
    // symmetric input.
    let symmetric = (0..a.nrows()).all(|i| (0..i).all(|j| a[(i, j)] == a[(j, i)]));
    if let Some(chol) = symmetric.then(|| a.clone().cholesky()).flatten() {
        // The Cholesky pivots are the squared diagonal entries of L.
        let min_pivot = chol
            .l_dirty()
            .diagonal()
            .iter()
            .fold(f64::INFINITY, |acc, v| acc.min(v * v));
        if min_pivot >= threshold {
            let x = chol.solve(b);
            if x.iter().all(|v| v.is_finite()) {
                return Ok((x, Method::Cholesky));
            }
        }
    }

    let lu = a.clone().lu();
    let min_pivot = lu
        .u()
        .diagonal()
        .iter()
        .fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    if min_pivot < threshold {
        return Err(Error::singular(context));
    }
    match lu.solve(b) {
        Some(x) if x.iter().all(|v| v.is_finite()) => Ok((x, Method::Lu)),
        _ => Err(Error::singular(context)),
    }
}

pub fn inverse(a: &DMatrix<f64>, context: &str) -> Result<DMatrix<f64>> {
    solve(a, &DMatrix::identity(a.nrows(), a.nrows()), context)
}
