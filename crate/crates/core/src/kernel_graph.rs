//! Similarity graphs over labeled and unlabeled points.
//!
//! Points are stored one per row. The first `n` rows are labeled, the
//! remaining `m` rows are unlabeled, and every matrix built here keeps that
//! ordering so the labeled/unlabeled block split is a plain slice.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Inputs `X_1..X_{n+m}` with responses for the first `n` of them.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: DMatrix<f64>,
    labels: DVector<f64>,
}

impl Dataset {
    /// Builds a dataset from an `(n+m) x d` input matrix whose first
    /// `labels.len()` rows are labeled.
    pub fn new(inputs: DMatrix<f64>, labels: DVector<f64>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::invalid("dataset needs at least one labeled point"));
        }
        if inputs.nrows() <= n {
            return Err(Error::invalid(format!(
                "dataset needs at least one unlabeled point ({} rows, {} labels)",
                inputs.nrows(),
                n
            )));
        }
        if inputs.ncols() == 0 {
            return Err(Error::invalid("inputs have zero columns"));
        }
        if let Some(pos) = inputs.iter().position(|v| !v.is_finite()) {
            let (row, col) = (pos % inputs.nrows(), pos / inputs.nrows());
            return Err(Error::invalid(format!(
                "non-finite input at row {row}, column {col}"
            )));
        }
        if let Some(i) = labels.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite label at row {i}")));
        }
        Ok(Dataset { inputs, labels })
    }

    /// Stacks labeled rows on top of unlabeled rows.
    pub fn from_parts(
        labeled: &DMatrix<f64>,
        labels: DVector<f64>,
        unlabeled: &DMatrix<f64>,
    ) -> Result<Self> {
        if labeled.nrows() != labels.len() {
            return Err(Error::invalid(format!(
                "{} labeled rows but {} labels",
                labeled.nrows(),
                labels.len()
            )));
        }
        if labeled.ncols() != unlabeled.ncols() {
            return Err(Error::invalid(format!(
                "labeled points have {} columns, unlabeled points have {}",
                labeled.ncols(),
                unlabeled.ncols()
            )));
        }
        let n = labeled.nrows();
        let total = n + unlabeled.nrows();
        let inputs = DMatrix::from_fn(total, labeled.ncols(), |i, j| {
            if i < n {
                labeled[(i, j)]
            } else {
                unlabeled[(i - n, j)]
            }
        });
        Dataset::new(inputs, labels)
    }

    pub fn inputs(&self) -> &DMatrix<f64> {
        &self.inputs
    }

    pub fn labels(&self) -> &DVector<f64> {
        &self.labels
    }

    pub fn n_labeled(&self) -> usize {
        self.labels.len()
    }

    pub fn n_unlabeled(&self) -> usize {
        self.inputs.nrows() - self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.inputs.ncols()
    }

    pub fn labeled_inputs(&self) -> DMatrix<f64> {
        self.inputs.rows(0, self.n_labeled()).into_owned()
    }

    pub fn unlabeled_inputs(&self) -> DMatrix<f64> {
        self.inputs
            .rows(self.n_labeled(), self.n_unlabeled())
            .into_owned()
    }
}

/// Kernel families available for building `w_ij = K((X_i - X_j) / h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelFamily {
    /// `exp(-||x - y||^2 / h^2)`.
    #[default]
    GaussianRbf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    bandwidth: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::invalid(format!(
                "bandwidth must be positive and finite, got {bandwidth}"
            )));
        }
        Ok(KernelSpec { family, bandwidth })
    }

    pub fn rbf(bandwidth: f64) -> Result<Self> {
        KernelSpec::new(KernelFamily::GaussianRbf, bandwidth)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Similarity between two points under this kernel.
    pub fn similarity(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        match self.family {
            KernelFamily::GaussianRbf => rbf_similarity(x, y, self.bandwidth),
        }
    }

    // Callers guarantee equal lengths.
    fn similarity_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.family {
            KernelFamily::GaussianRbf => rbf_kernel(squared_distance(x, y), self.bandwidth),
        }
    }
}

/// Gaussian RBF similarity `exp(-||x - y||^2 / bandwidth^2)`.
pub fn rbf_similarity(x: &[f64], y: &[f64], bandwidth: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::invalid(format!(
            "bandwidth must be positive and finite, got {bandwidth}"
        )));
    }
    Ok(rbf_kernel(squared_distance(x, y), bandwidth))
}

#[inline]
fn rbf_kernel(sq_dist: f64, bandwidth: f64) -> f64 {
    (-sq_dist / (bandwidth * bandwidth)).exp()
}

#[inline]
fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Dense symmetric similarity matrix `W` with degrees `d_i = sum_j w_ij`.
///
/// Self-similarities are kept on the diagonal and counted in the degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph {
    w: DMatrix<f64>,
    degrees: DVector<f64>,
    n_labeled: usize,
}

impl SimilarityGraph {
    /// Wraps a precomputed similarity matrix. The first `n_labeled` rows and
    /// columns belong to labeled points.
    pub fn from_weights(w: DMatrix<f64>, n_labeled: usize) -> Result<Self> {
        if !w.is_square() {
            return Err(Error::invalid(format!(
                "similarity matrix must be square, got {}x{}",
                w.nrows(),
                w.ncols()
            )));
        }
        if n_labeled > w.nrows() {
            return Err(Error::invalid(format!(
                "{n_labeled} labeled points but only {} nodes",
                w.nrows()
            )));
        }
        let size = w.nrows();
        for i in 0..size {
            for j in 0..size {
                let v = w[(i, j)];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::invalid(format!(
                        "weight w[{i},{j}] = {v} outside [0, 1]"
                    )));
                }
                if v != w[(j, i)] {
                    return Err(Error::invalid(format!(
                        "similarity matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let degrees = row_sums(&w);
        Ok(SimilarityGraph {
            w,
            degrees,
            n_labeled,
        })
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn degrees(&self) -> &DVector<f64> {
        &self.degrees
    }

    pub fn n_labeled(&self) -> usize {
        self.n_labeled
    }

    pub fn n_unlabeled(&self) -> usize {
        self.w.nrows() - self.n_labeled
    }

    pub fn len(&self) -> usize {
        self.w.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.w.nrows() == 0
    }

    /// Unlabeled offsets (0-based within the unlabeled block) that cannot
    /// reach any labeled node through positive-weight edges.
    pub fn unreachable_unlabeled(&self) -> Vec<usize> {
        let size = self.len();
        let mut seen = vec![false; size];
        let mut stack: Vec<usize> = (0..self.n_labeled).collect();
        for &i in &stack {
            seen[i] = true;
        }
        while let Some(i) = stack.pop() {
            for j in 0..size {
                if !seen[j] && j != i && self.w[(i, j)] > 0.0 {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        (self.n_labeled..size)
            .filter(|&j| !seen[j])
            .map(|j| j - self.n_labeled)
            .collect()
    }
}

fn row_sums(w: &DMatrix<f64>) -> DVector<f64> {
    // W is symmetric, so column sums equal row sums and walk memory in order.
    DVector::from_iterator(w.ncols(), w.column_iter().map(|c| c.sum()))
}

/// Builds the full `(n+m) x (n+m)` similarity graph of a dataset.
pub fn build_graph(data: &Dataset, kernel: &KernelSpec) -> SimilarityGraph {
    let points = row_major(data.inputs());
    let size = points.len();
    // Upper triangle per row, computed once per pair so W is exactly symmetric.
    let upper: Vec<Vec<f64>> = (0..size)
        .into_par_iter()
        .map(|i| {
            (i..size)
                .map(|j| kernel.similarity_unchecked(&points[i], &points[j]))
                .collect()
        })
        .collect();
    let mut w = DMatrix::zeros(size, size);
    for (i, row) in upper.iter().enumerate() {
        for (offset, &v) in row.iter().enumerate() {
            let j = i + offset;
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    let degrees = row_sums(&w);
    SimilarityGraph {
        w,
        degrees,
        n_labeled: data.n_labeled(),
    }
}

pub(crate) fn row_major(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Unnormalized graph Laplacian `L = D - W`.
pub fn laplacian(graph: &SimilarityGraph) -> DMatrix<f64> {
    let mut l = -graph.w.clone();
    for (i, d) in graph.degrees.iter().enumerate() {
        l[(i, i)] += d;
    }
    l
}

/// Labeled/unlabeled blocks of `W` and `D`. Index 1 is labeled, 2 is unlabeled.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphBlocks {
    pub w11: DMatrix<f64>,
    pub w12: DMatrix<f64>,
    pub w21: DMatrix<f64>,
    pub w22: DMatrix<f64>,
    /// Diagonal of `D11`.
    pub d11: DVector<f64>,
    /// Diagonal of `D22`.
    pub d22: DVector<f64>,
}

impl GraphBlocks {
    pub fn n_labeled(&self) -> usize {
        self.d11.len()
    }

    pub fn n_unlabeled(&self) -> usize {
        self.d22.len()
    }

    /// Reassembles the full `(W, diag(D))` pair.
    pub fn assemble(&self) -> (DMatrix<f64>, DVector<f64>) {
        let (n, m) = (self.n_labeled(), self.n_unlabeled());
        let mut w = DMatrix::zeros(n + m, n + m);
        w.view_mut((0, 0), (n, n)).copy_from(&self.w11);
        w.view_mut((0, n), (n, m)).copy_from(&self.w12);
        w.view_mut((n, 0), (m, n)).copy_from(&self.w21);
        w.view_mut((n, n), (m, m)).copy_from(&self.w22);
        let d = DVector::from_iterator(n + m, self.d11.iter().chain(self.d22.iter()).copied());
        (w, d)
    }

    /// `D22 - W22`.
    pub fn unlabeled_laplacian(&self) -> DMatrix<f64> {
        let mut a = -self.w22.clone();
        for (i, d) in self.d22.iter().enumerate() {
            a[(i, i)] += d;
        }
        a
    }
}

/// Splits a graph into labeled/unlabeled blocks.
pub fn partition(graph: &SimilarityGraph) -> Result<GraphBlocks> {
    let n = graph.n_labeled;
    let m = graph.n_unlabeled();
    if n == 0 {
        return Err(Error::invalid("graph has no labeled points"));
    }
    if m == 0 {
        return Err(Error::invalid("graph has no unlabeled points"));
    }
    let w = &graph.w;
    Ok(GraphBlocks {
        w11: w.view((0, 0), (n, n)).into_owned(),
        w12: w.view((0, n), (n, m)).into_owned(),
        w21: w.view((n, 0), (m, n)).into_owned(),
        w22: w.view((n, n), (m, m)).into_owned(),
        d11: graph.degrees.rows(0, n).into_owned(),
        d22: graph.degrees.rows(n, m).into_owned(),
    })
}
