//! Nadaraya-Watson kernel regression over the labeled points.
//!
//! Unlike the hard-criterion score, whose denominator is the full degree
//! over all `n + m` points, the weights here are normalized over labeled
//! points only.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernel_graph::{row_major, Dataset, KernelSpec};
use crate::solvers::ScoreVector;

/// Weight sums below this are treated as an empty neighborhood.
pub const MIN_WEIGHT_SUM: f64 = 1e-300;

/// Kernel-weighted mean of `labels` at `query`.
pub fn nw_estimate(
    labeled_inputs: &DMatrix<f64>,
    labels: &DVector<f64>,
    query: &[f64],
    kernel: &KernelSpec,
) -> Result<f64> {
    if labeled_inputs.nrows() == 0 {
        return Err(Error::invalid("Nadaraya-Watson needs at least one labeled point"));
    }
    if labeled_inputs.nrows() != labels.len() {
        return Err(Error::invalid(format!(
            "{} labeled points but {} labels",
            labeled_inputs.nrows(),
            labels.len()
        )));
    }
    if labeled_inputs.ncols() != query.len() {
        return Err(Error::invalid(format!(
            "query has dimension {}, labeled points have {}",
            query.len(),
            labeled_inputs.ncols()
        )));
    }
    let points = row_major(labeled_inputs);
    weighted_mean(&points, labels, query, kernel)
}

fn weighted_mean(
    points: &[Vec<f64>],
    labels: &DVector<f64>,
    query: &[f64],
    kernel: &KernelSpec,
) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in points.iter().zip(labels.iter()) {
        let w = kernel.similarity(x, query)?;
        num += w * y;
        den += w;
    }
    if den < MIN_WEIGHT_SUM {
        return Err(Error::EmptyNeighborhood { index: None });
    }
    let (lo, hi) = (labels.min(), labels.max());
    Ok((num / den).clamp(lo, hi))
}

/// Nadaraya-Watson estimate at every unlabeled point of `data`.
pub fn nw_batch(data: &Dataset, kernel: &KernelSpec) -> Result<ScoreVector> {
    let points = row_major(&data.labeled_inputs());
    let queries = row_major(&data.unlabeled_inputs());
    let values = queries
        .iter()
        .enumerate()
        .map(|(a, q)| {
            weighted_mean(&points, data.labels(), q, kernel).map_err(|e| match e {
                Error::EmptyNeighborhood { .. } => Error::EmptyNeighborhood { index: Some(a) },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoreVector::new(DVector::from_vec(values), 0.0))
}
