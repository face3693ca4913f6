//! Monte-Carlo RMSE sweeps over labeled size, unlabeled size and `lambda`.
//!
//! Each replication of a `(model, n, m)` cell draws one dataset and scores
//! its unlabeled points under every `lambda` in the grid, so the `lambda`
//! comparison within a replication is paired. Random streams depend only on
//! the master seed and the replication index: replication `r` of a smaller
//! cell sees the first draws of replication `r` of a larger one, which
//! couples comparisons across `n` and `m` as well. Records come out in a fixed
//! order (n grid, then m grid, then lambda grid, then replication) no matter
//! how the work was scheduled.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rayon::prelude::*;

use crate::datagen::{
    bandwidth, sample_labels, sample_truncated_mvn, true_probabilities, RngSeed, SimModel,
    StreamRole,
};
use crate::error::{Error, Result};
use crate::kernel_graph::{build_graph, Dataset, KernelSpec};
use crate::solvers::score;

pub const RECORD_HEADER: [&str; 7] = ["model", "n", "m", "lambda", "rep", "seed", "rmse"];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: SimModel,
    pub n_grid: Vec<usize>,
    pub m_grid: Vec<usize>,
    /// Nonnegative; `f64::INFINITY` selects the label-mean limit.
    pub lambda_grid: Vec<f64>,
    pub replications: usize,
    pub master_seed: RngSeed,
    pub output_path: PathBuf,
}

impl ExperimentConfig {
    /// Labeled sizes and tuning parameters of the `m = 30` study.
    pub fn labeled_size_study(model: SimModel) -> Self {
        ExperimentConfig {
            model,
            n_grid: vec![10, 30, 50, 100, 200, 300, 500, 800, 1000, 1500],
            m_grid: vec![30],
            lambda_grid: vec![0.0, 0.01, 0.1, 5.0],
            replications: 1000,
            master_seed: RngSeed::default(),
            output_path: PathBuf::from("records.csv"),
        }
    }

    /// Unlabeled sizes of the `n = 100` study.
    pub fn unlabeled_size_study(model: SimModel) -> Self {
        ExperimentConfig {
            n_grid: vec![100],
            m_grid: vec![30, 60, 100, 300, 500, 1000],
            ..ExperimentConfig::labeled_size_study(model)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() || self.m_grid.is_empty() || self.lambda_grid.is_empty() {
            return Err(Error::invalid("n, m and lambda grids must be non-empty"));
        }
        if let Some(n) = self.n_grid.iter().find(|&&n| n < 2) {
            return Err(Error::invalid(format!("labeled size must be >= 2, got {n}")));
        }
        if self.m_grid.contains(&0) {
            return Err(Error::invalid("unlabeled size must be >= 1"));
        }
        if let Some(l) = self.lambda_grid.iter().find(|l| !(**l >= 0.0)) {
            return Err(Error::invalid(format!("lambda must be >= 0, got {l}")));
        }
        if self.replications == 0 {
            return Err(Error::invalid("replications must be >= 1"));
        }
        Ok(())
    }

    /// Parses a flat `key = value` file. Grids are comma-separated; `#`
    /// starts a comment. Missing keys keep the values of `base`.
    pub fn parse_with_base(text: &str, path: &Path, base: ExperimentConfig) -> Result<Self> {
        let mut cfg = base;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let wrap = |e: Error| parse_err(e.to_string());
            match key {
                "model" => cfg.model = value.parse().map_err(wrap)?,
                "n_grid" => cfg.n_grid = parse_count_list(value).map_err(wrap)?,
                "m_grid" => cfg.m_grid = parse_count_list(value).map_err(wrap)?,
                "lambda_grid" => cfg.lambda_grid = parse_lambda_list(value).map_err(wrap)?,
                "replications" => {
                    cfg.replications = value
                        .parse()
                        .map_err(|_| parse_err(format!("bad replication count {value:?}")))?
                }
                "master_seed" => {
                    cfg.master_seed = RngSeed::new(
                        value
                            .parse()
                            .map_err(|_| parse_err(format!("bad seed {value:?}")))?,
                    )
                }
                "output_path" => cfg.output_path = PathBuf::from(value),
                other => return Err(parse_err(format!("unknown key {other:?}"))),
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let cfg = Self::parse_with_base(text, path, Self::labeled_size_study(SimModel::Model1))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Serializes to the `key = value` format read by [`ExperimentConfig::parse`].
    pub fn to_kv_string(&self) -> String {
        let join = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let lambdas = self
            .lambda_grid
            .iter()
            .map(|&l| format_lambda(l))
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "model = {}\nn_grid = {}\nm_grid = {}\nlambda_grid = {}\nreplications = {}\nmaster_seed = {}\noutput_path = {}\n",
            self.model,
            join(&self.n_grid),
            join(&self.m_grid),
            lambdas,
            self.replications,
            self.master_seed.master_seed,
            self.output_path.display()
        )
    }
}

pub fn parse_count_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("bad count {:?} in list {s:?}", t.trim())))
        })
        .collect()
}

pub fn parse_lambda(s: &str) -> Result<f64> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    match t.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(Error::invalid(format!(
            "lambda must be a nonnegative number or inf, got {t:?}"
        ))),
    }
}

pub fn parse_lambda_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_lambda).collect()
}

/// Shortest decimal that round-trips, with infinity written as `inf`.
pub fn format_lambda(lambda: f64) -> String {
    if lambda == f64::INFINITY {
        "inf".to_string()
    } else {
        lambda.to_string()
    }
}

/// One Monte-Carlo measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct RmseRecord {
    pub model: SimModel,
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    pub replication: usize,
    /// Seed of the replication's random streams.
    pub seed: u64,
    pub rmse: f64,
}

/// Root mean squared difference between the true regression function and
/// the estimates at the unlabeled points.
pub fn rmse(truth: &[f64], estimates: &[f64]) -> Result<f64> {
    if truth.len() != estimates.len() {
        return Err(Error::invalid(format!(
            "rmse of vectors with lengths {} and {}",
            truth.len(),
            estimates.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::invalid("rmse of empty vectors"));
    }
    let sum: f64 = truth
        .iter()
        .zip(estimates)
        .map(|(t, e)| (t - e) * (t - e))
        .sum();
    Ok((sum / truth.len() as f64).sqrt())
}

/// Seed of replication `rep`, shared by every cell of a sweep.
pub fn replication_seed(seed: &RngSeed, rep: usize) -> u64 {
    seed.derive(&[rep as u64])
}

/// A simulated dataset together with `q(X)` at its unlabeled points.
#[derive(Debug, Clone)]
pub struct SimulatedData {
    pub dataset: Dataset,
    pub truth: DVector<f64>,
}

/// Draws `n` labeled inputs with labels and `m` unlabeled inputs from the
/// streams of `derived_seed`.
pub fn simulate_dataset(
    model: SimModel,
    n: usize,
    m: usize,
    derived_seed: u64,
) -> Result<SimulatedData> {
    let labeled = sample_truncated_mvn(
        &mut RngSeed::stream(derived_seed, StreamRole::LabeledInputs),
        n,
    );
    let unlabeled = sample_truncated_mvn(
        &mut RngSeed::stream(derived_seed, StreamRole::UnlabeledInputs),
        m,
    );
    let probs = true_probabilities(model, &labeled)?;
    let labels = sample_labels(
        &mut RngSeed::stream(derived_seed, StreamRole::Labels),
        probs.as_slice(),
    );
    let truth = true_probabilities(model, &unlabeled)?;
    Ok(SimulatedData {
        dataset: Dataset::from_parts(&labeled, labels, &unlabeled)?,
        truth,
    })
}

/// A replication that could not be scored.
#[derive(Debug, thiserror::Error)]
#[error("model {model}, n = {n}, m = {m}, replication {replication} (seed {seed}){}: {source}",
    .lambda.map(|l| format!(", lambda = {}", format_lambda(l))).unwrap_or_default())]
pub struct ReplicationError {
    pub model: SimModel,
    pub n: usize,
    pub m: usize,
    pub replication: usize,
    pub seed: u64,
    pub lambda: Option<f64>,
    #[source]
    pub source: Error,
}

/// Scores one simulated dataset under every `lambda` of the grid.
pub fn run_replication(
    config: &ExperimentConfig,
    n: usize,
    m: usize,
    replication: usize,
) -> std::result::Result<Vec<RmseRecord>, ReplicationError> {
    let seed = replication_seed(&config.master_seed, replication);
    let fail = |lambda: Option<f64>, source: Error| ReplicationError {
        model: config.model,
        n,
        m,
        replication,
        seed,
        lambda,
        source,
    };
    let sim = simulate_dataset(config.model, n, m, seed).map_err(|e| fail(None, e))?;
    let kernel = bandwidth(n)
        .and_then(KernelSpec::rbf)
        .map_err(|e| fail(None, e))?;
    let graph = build_graph(&sim.dataset, &kernel);
    config
        .lambda_grid
        .iter()
        .map(|&lambda| {
            let scores =
                score(&graph, sim.dataset.labels(), lambda).map_err(|e| fail(Some(lambda), e))?;
            let rmse = rmse(sim.truth.as_slice(), scores.as_slice())
                .map_err(|e| fail(Some(lambda), e))?;
            Ok(RmseRecord {
                model: config.model,
                n,
                m,
                lambda,
                replication,
                seed,
                rmse,
            })
        })
        .collect()
}

#[derive(Debug, Default)]
pub struct SweepOutcome {
    pub records: Vec<RmseRecord>,
    pub failures: Vec<ReplicationError>,
}

/// Runs every replication of every `(n, m)` cell, in parallel.
pub fn sweep(config: &ExperimentConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let tasks: Vec<(usize, usize, usize)> = config
        .n_grid
        .iter()
        .flat_map(|&n| {
            config.m_grid.iter().flat_map(move |&m| {
                (0..config.replications).map(move |rep| (n, m, rep))
            })
        })
        .collect();
    let results: Vec<_> = tasks
        .par_iter()
        .map(|&(n, m, rep)| run_replication(config, n, m, rep))
        .collect();

    let lambdas = config.lambda_grid.len();
    let mut outcome = SweepOutcome::default();
    // Results arrive grouped by (n, m) then replication; emit lambda before
    // replication within each cell.
    let mut results = results.into_iter();
    for _ in 0..tasks.len() / config.replications {
        let mut scored = Vec::with_capacity(config.replications);
        for result in results.by_ref().take(config.replications) {
            match result {
                Ok(records) => scored.push(records),
                Err(e) => outcome.failures.push(e),
            }
        }
        for k in 0..lambdas {
            outcome.records.extend(scored.iter().map(|r| r[k].clone()));
        }
    }
    Ok(outcome)
}

/// Mean RMSE of one `(model, n, m, lambda)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub model: SimModel,
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    pub mean_rmse: f64,
    pub replications: usize,
}

/// Averages records per cell, in order of first appearance.
pub fn aggregate(records: &[RmseRecord]) -> Vec<CellSummary> {
    let mut index: HashMap<(SimModel, usize, usize, u64), usize> = HashMap::new();
    let mut sums: Vec<(CellSummary, f64)> = Vec::new();
    for r in records {
        let key = (r.model, r.n, r.m, r.lambda.to_bits());
        let slot = *index.entry(key).or_insert_with(|| {
            sums.push((
                CellSummary {
                    model: r.model,
                    n: r.n,
                    m: r.m,
                    lambda: r.lambda,
                    mean_rmse: 0.0,
                    replications: 0,
                },
                0.0,
            ));
            sums.len() - 1
        });
        sums[slot].0.replications += 1;
        sums[slot].1 += r.rmse;
    }
    sums.into_iter()
        .map(|(mut s, total)| {
            s.mean_rmse = total / s.replications as f64;
            s
        })
        .collect()
}

/// Looks up a cell's mean RMSE.
pub fn cell_mean(summary: &[CellSummary], n: usize, m: usize, lambda: f64) -> Option<f64> {
    summary
        .iter()
        .find(|c| c.n == n && c.m == m && c.lambda.to_bits() == lambda.to_bits())
        .map(|c| c.mean_rmse)
}

/// Plain-text table of per-cell means.
pub fn format_summary(summary: &[CellSummary]) -> String {
    let mut out = format!(
        "{:>5} {:>6} {:>6} {:>8} {:>6} {:>12}\n",
        "model", "n", "m", "lambda", "reps", "mean_rmse"
    );
    for c in summary {
        let _ = writeln!(
            out,
            "{:>5} {:>6} {:>6} {:>8} {:>6} {:>12.6}",
            c.model,
            c.n,
            c.m,
            format_lambda(c.lambda),
            c.replications,
            c.mean_rmse
        );
    }
    out
}

pub fn write_records_to<W: Write>(records: &[RmseRecord], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Io {
        path: PathBuf::from("<records>"),
        source: e.into(),
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(RECORD_HEADER).map_err(io)?;
    for r in records {
        w.write_record([
            r.model.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            format_lambda(r.lambda),
            r.replication.to_string(),
            r.seed.to_string(),
            r.rmse.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: PathBuf::from("<records>"),
        source,
    })
}

/// Writes records as comma-separated text with a header line.
pub fn write_records(records: &[RmseRecord], path: &Path) -> Result<()> {
    let with_path = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(with_path)?;
    let mut buf = std::io::BufWriter::new(file);
    write_records_to(records, &mut buf).map_err(|e| match e {
        Error::Io { source, .. } => with_path(source),
        other => other,
    })?;
    buf.flush().map_err(with_path)
}

pub fn read_records_from<R: Read>(input: R, path: &Path) -> Result<Vec<RmseRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(input);
    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let line = idx + 1;
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let row = row.map_err(|e| parse_err(e.to_string()))?;
        if idx == 0 {
            if row.iter().ne(RECORD_HEADER.iter().copied()) {
                return Err(parse_err(format!(
                    "expected header {}",
                    RECORD_HEADER.join(",")
                )));
            }
            continue;
        }
        if row.len() != RECORD_HEADER.len() {
            return Err(parse_err(format!(
                "expected {} fields, got {}",
                RECORD_HEADER.len(),
                row.len()
            )));
        }
        let field = |i: usize| &row[i];
        let count = |i: usize| {
            field(i)
                .parse::<usize>()
                .map_err(|_| parse_err(format!("bad {} {:?}", RECORD_HEADER[i], field(i))))
        };
        let rmse: f64 = field(6)
            .parse()
            .map_err(|_| parse_err(format!("bad rmse {:?}", field(6))))?;
        if !(rmse >= 0.0 && rmse.is_finite()) {
            return Err(parse_err(format!("rmse must be finite and >= 0, got {rmse}")));
        }
        records.push(RmseRecord {
            model: field(0).parse().map_err(|e: Error| parse_err(e.to_string()))?,
            n: count(1)?,
            m: count(2)?,
            lambda: parse_lambda(field(3)).map_err(|e| parse_err(e.to_string()))?,
            replication: count(4)?,
            seed: field(5)
                .parse()
                .map_err(|_| parse_err(format!("bad seed {:?}", field(5))))?,
            rmse,
        });
    }
    Ok(records)
}

pub fn read_records(path: &Path) -> Result<Vec<RmseRecord>> {
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_records_from(std::io::BufReader::new(file), path)
}
