//! Transductive scores on the unlabeled points.
//!
//! With `W` split into labeled (1) and unlabeled (2) blocks:
//!
//! * hard criterion (`lambda = 0`): `f = (D22 - W22)^-1 W21 Y`
//! * soft criterion (`lambda > 0`):
//!   `f = (D22 - W22 - lambda W21 A^-1 W12)^-1 W21 A^-1 Y`
//!   with `A = I + lambda (D11 - W11)`
//! * `lambda = inf` on a connected graph: every score is the label mean.
//!
//! The soft closed form is the unlabeled tail of the full stationarity
//! system `(V + lambda L) f = V [Y; 0]`, which [`solve_soft_oracle`] solves
//! directly as an independent cross-check.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernel_graph::{laplacian, partition, GraphBlocks, SimilarityGraph};
use crate::linalg;

/// Estimated scores for the unlabeled points, tagged with the `lambda` that
/// produced them (`f64::INFINITY` for the collapsed limit).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    values: DVector<f64>,
    lambda: f64,
}

impl ScoreVector {
    pub fn new(values: DVector<f64>, lambda: f64) -> Self {
        ScoreVector { values, lambda }
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.values.as_slice()
    }

    pub fn into_values(self) -> DVector<f64> {
        self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    /// Stop once the sup-norm change of one sweep drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions {
            tolerance: 1e-10,
            max_iterations: 100_000,
        }
    }
}

impl FixedPointOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::invalid(format!(
                "fixed-point tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("fixed-point max_iterations must be at least 1"));
        }
        Ok(())
    }
}

fn check_labels(graph: &SimilarityGraph, labels: &DVector<f64>) -> Result<()> {
    if labels.len() != graph.n_labeled() {
        return Err(Error::invalid(format!(
            "graph has {} labeled points but {} labels were given",
            graph.n_labeled(),
            labels.len()
        )));
    }
    if labels.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("labels must be finite"));
    }
    Ok(())
}

fn label_range(labels: &DVector<f64>) -> (f64, f64) {
    (labels.min(), labels.max())
}

fn with_disconnected(err: Error, graph: &SimilarityGraph) -> Error {
    match err {
        Error::Singular { context, .. } => Error::Singular {
            context,
            unlabeled_indices: graph.unreachable_unlabeled(),
        },
        other => other,
    }
}

/// Hard-criterion (harmonic) scores: solves `(D22 - W22) f = W21 Y`.
pub fn solve_hard(graph: &SimilarityGraph, labels: &DVector<f64>) -> Result<ScoreVector> {
    check_labels(graph, labels)?;
    let blocks = partition(graph)?;
    solve_hard_blocks(&blocks, labels).map_err(|e| with_disconnected(e, graph))
}

fn solve_hard_blocks(blocks: &GraphBlocks, labels: &DVector<f64>) -> Result<ScoreVector> {
    let system = blocks.unlabeled_laplacian();
    let rhs = &blocks.w21 * labels;
    let mut f = linalg::solve_vector(&system, &rhs, "hard criterion (D22 - W22)")?;
    // Harmonic scores lie in the label range; rounding can leave them a few
    // ulps outside it.
    let (lo, hi) = label_range(labels);
    f.apply(|v| *v = v.clamp(lo, hi));
    Ok(ScoreVector::new(f, 0.0))
}

/// Hard-criterion scores by iterating the neighbor-average update
/// `f_a <- sum_i w_ai f_i / sum_i w_ai` over unlabeled `a` with labeled
/// entries pinned to their responses. Unlabeled scores start at zero and
/// every sweep uses the previous sweep's values.
pub fn solve_hard_fixed_point(
    graph: &SimilarityGraph,
    labels: &DVector<f64>,
    opts: &FixedPointOptions,
) -> Result<ScoreVector> {
    opts.validate()?;
    check_labels(graph, labels)?;
    let blocks = partition(graph)?;
    if let Some(a) = blocks.d22.iter().position(|&d| d <= 0.0) {
        return Err(Error::Singular {
            context: "fixed-point update (zero degree)".into(),
            unlabeled_indices: vec![a],
        });
    }
    // Labeled contribution to each numerator never changes.
    let pinned = &blocks.w21 * labels;
    let mut f = DVector::zeros(blocks.n_unlabeled());
    let mut change = f64::INFINITY;
    for _ in 0..opts.max_iterations {
        let mut next = &pinned + &blocks.w22 * &f;
        next.component_div_assign(&blocks.d22);
        change = (&next - &f).amax();
        f = next;
        if change < opts.tolerance {
            return Ok(ScoreVector::new(f, 0.0));
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        last_change: change,
        last_iterate: f.as_slice().to_vec(),
    })
}

/// Soft-criterion scores from the block-inverse closed form.
///
/// `lambda = 0` is the hard criterion and dispatches to [`solve_hard`].
pub fn solve_soft(
    graph: &SimilarityGraph,
    labels: &DVector<f64>,
    lambda: f64,
) -> Result<ScoreVector> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!(
            "soft criterion needs a finite lambda >= 0, got {lambda}"
        )));
    }
    if lambda == 0.0 {
        return solve_hard(graph, labels);
    }
    check_labels(graph, labels)?;
    let blocks = partition(graph)?;
    let (n, m) = (blocks.n_labeled(), blocks.n_unlabeled());

    // A = I + lambda (D11 - W11)
    let mut inner = -lambda * &blocks.w11;
    for i in 0..n {
        inner[(i, i)] += 1.0 + lambda * blocks.d11[i];
    }
    // One factorization of A for both A^-1 W12 and A^-1 Y.
    let mut rhs = DMatrix::zeros(n, m + 1);
    rhs.columns_mut(0, m).copy_from(&blocks.w12);
    rhs.set_column(m, labels);
    let solved = linalg::solve(&inner, &rhs, "soft criterion I + lambda (D11 - W11)")?;
    let inv_w12 = solved.columns(0, m);
    let inv_y = solved.column(m);

    let mut outer = blocks.unlabeled_laplacian() - lambda * (&blocks.w21 * inv_w12);
    // Exactly symmetric in exact arithmetic; keep it so numerically.
    outer = (&outer + outer.transpose()) * 0.5;
    let target = &blocks.w21 * inv_y;
    let f = linalg::solve_vector(
        &outer,
        &target,
        "soft criterion D22 - W22 - lambda W21 A^-1 W12",
    )
    .map_err(|e| with_disconnected(e, graph))?;
    Ok(ScoreVector::new(f, lambda))
}

/// Full-length minimizer of the soft criterion from the stationarity system
/// `(V + lambda L) f = V [Y; 0]`, where `V` is the identity on labeled
/// coordinates and zero elsewhere. Returns all `n + m` entries.
pub fn solve_soft_oracle(
    graph: &SimilarityGraph,
    labels: &DVector<f64>,
    lambda: f64,
) -> Result<DVector<f64>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!(
            "full-system soft solve needs a finite lambda > 0, got {lambda}"
        )));
    }
    check_labels(graph, labels)?;
    let n = graph.n_labeled();
    let mut system = lambda * laplacian(graph);
    for i in 0..n {
        system[(i, i)] += 1.0;
    }
    let mut rhs = DVector::zeros(graph.len());
    rhs.rows_mut(0, n).copy_from(labels);
    linalg::solve_vector(&system, &rhs, "soft criterion V + lambda L")
        .map_err(|e| with_disconnected(e, graph))
}

/// The `lambda = inf` limit on a connected graph: every unlabeled score is
/// the mean label.
pub fn solve_soft_infinite(labels: &DVector<f64>, n_unlabeled: usize) -> Result<ScoreVector> {
    if labels.is_empty() {
        return Err(Error::invalid("lambda = inf limit needs at least one label"));
    }
    if labels.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("labels must be finite"));
    }
    Ok(ScoreVector::new(
        DVector::from_element(n_unlabeled, labels.mean()),
        f64::INFINITY,
    ))
}

/// Scores under any `lambda`: zero is the hard criterion, positive finite
/// values the soft criterion, and `f64::INFINITY` the label-mean limit.
pub fn score(graph: &SimilarityGraph, labels: &DVector<f64>, lambda: f64) -> Result<ScoreVector> {
    if lambda == f64::INFINITY {
        check_labels(graph, labels)?;
        solve_soft_infinite(labels, graph.n_unlabeled())
    } else {
        solve_soft(graph, labels, lambda)
    }
}

/// Soft-criterion objective
/// `sum_{i<=n} (Y_i - f_i)^2 + lambda/2 * sum_ij w_ij (f_i - f_j)^2`
/// at a full-length score vector.
pub fn soft_objective(
    graph: &SimilarityGraph,
    labels: &DVector<f64>,
    f: &DVector<f64>,
    lambda: f64,
) -> Result<f64> {
    check_labels(graph, labels)?;
    if f.len() != graph.len() {
        return Err(Error::invalid(format!(
            "score vector has {} entries, graph has {} nodes",
            f.len(),
            graph.len()
        )));
    }
    let loss: f64 = labels
        .iter()
        .zip(f.iter())
        .map(|(y, v)| (y - v) * (y - v))
        .sum();
    let w = graph.weights();
    let mut penalty = 0.0;
    for j in 0..graph.len() {
        for i in 0..graph.len() {
            penalty += w[(i, j)] * (f[i] - f[j]) * (f[i] - f[j]);
        }
    }
    Ok(loss + 0.5 * lambda * penalty)
}

/// Inverse of `[[a11, a12], [a21, a22]]` from its four Schur-complement
/// blocks:
///
/// ```text
/// [ (a11 - a12 a22^-1 a21)^-1                 -(a11 - a12 a22^-1 a21)^-1 a12 a22^-1 ]
/// [ -(a22 - a21 a11^-1 a12)^-1 a21 a11^-1      (a22 - a21 a11^-1 a12)^-1            ]
/// ```
///
/// Both diagonal blocks and both Schur complements must be nonsingular.
pub fn block_inverse(
    a11: &DMatrix<f64>,
    a12: &DMatrix<f64>,
    a21: &DMatrix<f64>,
    a22: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let (p, q) = (a11.nrows(), a22.nrows());
    if !a11.is_square()
        || !a22.is_square()
        || a12.shape() != (p, q)
        || a21.shape() != (q, p)
    {
        return Err(Error::invalid(format!(
            "incompatible block shapes: a11 {:?}, a12 {:?}, a21 {:?}, a22 {:?}",
            a11.shape(),
            a12.shape(),
            a21.shape(),
            a22.shape()
        )));
    }
    let a11_inv = linalg::inverse(a11, "block a11")?;
    let a22_inv = linalg::inverse(a22, "block a22")?;
    let schur_11 = linalg::inverse(&(a11 - a12 * &a22_inv * a21), "Schur complement of a22")?;
    let schur_22 = linalg::inverse(&(a22 - a21 * &a11_inv * a12), "Schur complement of a11")?;

    let mut out = DMatrix::zeros(p + q, p + q);
    out.view_mut((0, p), (p, q))
        .copy_from(&(-(&schur_11 * a12 * &a22_inv)));
    out.view_mut((p, 0), (q, p))
        .copy_from(&(-(&schur_22 * a21 * &a11_inv)));
    out.view_mut((0, 0), (p, p)).copy_from(&schur_11);
    out.view_mut((p, p), (q, q)).copy_from(&schur_22);
    Ok(out)
}
