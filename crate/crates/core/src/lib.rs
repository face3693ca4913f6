//! Graph-based semi-supervised learning on dense similarity graphs.
//!
//! The crate scores unlabeled points from a handful of labeled ones:
//!
//! * [`solvers::solve_hard`] keeps labeled scores equal to their responses
//!   and makes each unlabeled score the weighted average of its neighbors.
//! * [`solvers::solve_soft`] trades squared loss on the labeled points
//!   against the Laplacian smoothness penalty, weighted by `lambda`.
//! * [`nadaraya_watson::nw_batch`] is the kernel-regression estimator the
//!   hard solution approaches when labeled data dominate.
//!
//! [`experiment`] reproduces the RMSE-versus-sample-size simulations with
//! data from [`datagen`].
//!
//! ```
//! use gssl::{build_graph, solve_hard, solve_soft, Dataset, KernelSpec};
//! use nalgebra::{DMatrix, DVector};
//!
//! // Two labeled points at 0 and 1, one unlabeled point halfway.
//! let inputs = DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 0.5]);
//! let data = Dataset::new(inputs, DVector::from_vec(vec![1.0, 0.0]))?;
//! let graph = build_graph(&data, &KernelSpec::rbf(0.5)?);
//!
//! let hard = solve_hard(&graph, data.labels())?;
//! assert!((hard.values()[0] - 0.5).abs() < 1e-12);
//! let soft = solve_soft(&graph, data.labels(), 0.1)?;
//! assert!((soft.values()[0] - 0.5).abs() < 1e-12);
//! # Ok::<(), gssl::Error>(())
//! ```

pub mod datagen;
mod error;
pub mod experiment;
pub mod kernel_graph;
pub mod linalg;
pub mod nadaraya_watson;
pub mod solvers;

pub use datagen::{bandwidth, RngSeed, SimModel};
pub use error::{Error, Result};
pub use experiment::{sweep, ExperimentConfig, RmseRecord};
pub use kernel_graph::{build_graph, laplacian, partition, Dataset, KernelSpec, SimilarityGraph};
pub use nadaraya_watson::{nw_batch, nw_estimate};
pub use solvers::{
    block_inverse, solve_hard, solve_hard_fixed_point, solve_soft, solve_soft_infinite,
    solve_soft_oracle, FixedPointOptions, ScoreVector,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/hard.md")]
    mod hard {}
    #[doc = include_str!("../../../book/src/soft.md")]
    mod soft {}
    #[doc = include_str!("../../../book/src/nadaraya-watson.md")]
    mod nadaraya_watson {}
    #[doc = include_str!("../../../book/src/simulations.md")]
    mod simulations {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
