//! Synthetic data for the consistency simulations.
//!
//! Inputs are 5-dimensional normals with mean 0.5, variance 0.1 and
//! covariance 0.05, with every component that falls outside `[0, 1]` set
//! to zero. Responses are Bernoulli with a logistic success probability.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub const DIMENSION: usize = 5;
pub const INPUT_MEAN: f64 = 0.5;
pub const INPUT_VARIANCE: f64 = 0.1;
pub const INPUT_COVARIANCE: f64 = 0.05;

const INTERCEPT: f64 = -1.35;
const COEFFICIENTS: [f64; DIMENSION] = [2.0, -1.0, 1.0, -1.0, 2.0];

/// The two response models of the simulation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SimModel {
    /// Linear logit.
    Model1,
    /// Linear logit plus the interactions `x1 x3 + x2 x4`.
    Model2,
}

impl SimModel {
    pub fn dimension(self) -> usize {
        DIMENSION
    }

    pub fn id(self) -> u8 {
        match self {
            SimModel::Model1 => 1,
            SimModel::Model2 => 2,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(SimModel::Model1),
            2 => Ok(SimModel::Model2),
            other => Err(Error::invalid(format!("unknown model {other}, expected 1 or 2"))),
        }
    }

    pub fn logit(self, x: &[f64]) -> Result<f64> {
        match self {
            SimModel::Model1 => logit_model1(x),
            SimModel::Model2 => logit_model2(x),
        }
    }
}

impl fmt::Display for SimModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

impl FromStr for SimModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let digits = t
            .strip_prefix("model")
            .or_else(|| t.strip_prefix("Model"))
            .unwrap_or(t);
        digits
            .parse::<u8>()
            .map_err(|_| Error::invalid(format!("unknown model {s:?}, expected 1 or 2")))
            .and_then(SimModel::from_id)
    }
}

fn check_dim(x: &[f64]) -> Result<()> {
    if x.len() != DIMENSION {
        return Err(Error::invalid(format!(
            "expected a {DIMENSION}-dimensional input, got {}",
            x.len()
        )));
    }
    Ok(())
}

/// `-1.35 + 2 x1 - x2 + x3 - x4 + 2 x5`
pub fn logit_model1(x: &[f64]) -> Result<f64> {
    check_dim(x)?;
    Ok(INTERCEPT + COEFFICIENTS.iter().zip(x).map(|(b, v)| b * v).sum::<f64>())
}

/// Model 1 logit plus `x1 x3 + x2 x4`.
pub fn logit_model2(x: &[f64]) -> Result<f64> {
    Ok(logit_model1(x)? + x[0] * x[2] + x[1] * x[3])
}

pub fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// `P(Y = 1 | X = x)` under `model`.
pub fn true_probability(model: SimModel, x: &[f64]) -> Result<f64> {
    model.logit(x).map(logistic)
}

/// Probabilities for every row of an input matrix.
pub fn true_probabilities(model: SimModel, inputs: &DMatrix<f64>) -> Result<DVector<f64>> {
    let mut out = DVector::zeros(inputs.nrows());
    let mut row = [0.0; DIMENSION];
    if inputs.ncols() != DIMENSION {
        return Err(Error::invalid(format!(
            "expected {DIMENSION} input columns, got {}",
            inputs.ncols()
        )));
    }
    for i in 0..inputs.nrows() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = inputs[(i, k)];
        }
        out[i] = true_probability(model, &row)?;
    }
    Ok(out)
}

pub fn input_covariance() -> SMatrix<f64, DIMENSION, DIMENSION> {
    SMatrix::from_fn(|i, j| {
        if i == j {
            INPUT_VARIANCE
        } else {
            INPUT_COVARIANCE
        }
    })
}

fn covariance_factor() -> &'static SMatrix<f64, DIMENSION, DIMENSION> {
    static FACTOR: OnceLock<SMatrix<f64, DIMENSION, DIMENSION>> = OnceLock::new();
    FACTOR.get_or_init(|| {
        input_covariance()
            .cholesky()
            .expect("input covariance is positive definite")
            .unpack()
    })
}

/// Draws `count` inputs, one per row. Each row is consumed from the stream
/// as five standard normals in column order.
pub fn sample_truncated_mvn<R: Rng + ?Sized>(rng: &mut R, count: usize) -> DMatrix<f64> {
    let factor = covariance_factor();
    let mut out = DMatrix::zeros(count, DIMENSION);
    for i in 0..count {
        let z: SVector<f64, DIMENSION> = SVector::from_fn(|_, _| rng.sample(StandardNormal));
        let x = factor * z;
        for k in 0..DIMENSION {
            let v = INPUT_MEAN + x[k];
            out[(i, k)] = if (0.0..=1.0).contains(&v) { v } else { 0.0 };
        }
    }
    out
}

/// Independent Bernoulli draws, encoded as 1.0 / 0.0.
pub fn sample_labels<R: Rng + ?Sized>(rng: &mut R, probs: &[f64]) -> DVector<f64> {
    DVector::from_iterator(
        probs.len(),
        probs
            .iter()
            .map(|&p| if rng.random::<f64>() < p { 1.0 } else { 0.0 }),
    )
}

/// Kernel bandwidth `(ln n / n)^(1/5)`.
pub fn bandwidth(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("bandwidth needs n >= 2, got {n}")));
    }
    let n = n as f64;
    Ok((n.ln() / n).powf(0.2))
}

/// What a random stream is used for.
///
/// Labeled and unlabeled inputs come from separate streams, so the first
/// `k` draws of either are the same whatever the other sample size is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamRole {
    LabeledInputs,
    UnlabeledInputs,
    Labels,
}

impl StreamRole {
    fn stream_id(self) -> u64 {
        match self {
            StreamRole::LabeledInputs => 0,
            StreamRole::UnlabeledInputs => 1,
            StreamRole::Labels => 2,
        }
    }
}

/// Master seed from which every replication's streams are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed {
    pub master_seed: u64,
}

impl RngSeed {
    pub fn new(master_seed: u64) -> Self {
        RngSeed { master_seed }
    }

    /// Mixes the master seed with a key (usually just the replication index)
    /// into a derived seed. Distinct keys give unrelated seeds.
    pub fn derive(&self, key: &[u64]) -> u64 {
        key.iter()
            .fold(splitmix64(self.master_seed), |acc, &k| splitmix64(acc ^ splitmix64(k)))
    }

    /// Independent generator for one role of one replication.
    pub fn stream(derived_seed: u64, role: StreamRole) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(derived_seed);
        rng.set_stream(role.stream_id());
        rng
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
