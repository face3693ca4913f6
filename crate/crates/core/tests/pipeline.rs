use gssl::datagen::sample_truncated_mvn;
use gssl::experiment::{
    read_records, replication_seed, run_replication, simulate_dataset, write_records,
};
use gssl::{
    build_graph, solve_hard, solve_soft, sweep, ExperimentConfig, KernelSpec, RngSeed, SimModel,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// E[X 1{0 <= X <= 1}] for X ~ N(0.5, 0.1), by composite Simpson on [0, 1].
fn zeroed_marginal_mean() -> f64 {
    let sd = 0.1f64.sqrt();
    let density = |x: f64| {
        let z = (x - 0.5) / sd;
        (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
    };
    let steps = 2000;
    let h = 1.0 / steps as f64;
    let mut total = 0.0;
    for k in 0..=steps {
        let x = k as f64 * h;
        let weight = if k == 0 || k == steps {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        total += weight * x * density(x);
    }
    total * h / 3.0
}

#[test]
fn truncated_inputs_match_marginal_mean() {
    let expected = zeroed_marginal_mean();
    let draws = sample_truncated_mvn(&mut ChaCha8Rng::seed_from_u64(99), 100_000);
    for j in 0..draws.ncols() {
        let mean = draws.column(j).mean();
        assert!((mean - expected).abs() < 0.02, "column {j}: {mean} vs {expected}");
    }
}

#[test]
fn replication_matches_direct_solver_calls() {
    let config = ExperimentConfig {
        n_grid: vec![10],
        m_grid: vec![5],
        lambda_grid: vec![0.0, 5.0],
        replications: 3,
        master_seed: RngSeed::new(21),
        ..ExperimentConfig::labeled_size_study(SimModel::Model2)
    };
    for rep in 0..3 {
        let records = run_replication(&config, 10, 5, rep).unwrap();
        let seed = replication_seed(&config.master_seed, rep);
        let sim = simulate_dataset(SimModel::Model2, 10, 5, seed).unwrap();
        let kernel = KernelSpec::rbf((10f64.ln() / 10.0).powf(0.2)).unwrap();
        let graph = build_graph(&sim.dataset, &kernel);
        let labels = sim.dataset.labels();
        let scores = [
            solve_hard(&graph, labels).unwrap(),
            solve_soft(&graph, labels, 5.0).unwrap(),
        ];
        for (record, f) in records.iter().zip(&scores) {
            let mse = (f.values() - &sim.truth).map(|e| e * e).mean();
            assert!((record.rmse - mse.sqrt()).abs() < 1e-14);
            assert_eq!(record.seed, seed);
            assert_eq!(record.replication, rep);
        }
    }
}

#[test]
fn records_survive_a_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.csv");
    let config = ExperimentConfig {
        n_grid: vec![12],
        m_grid: vec![6],
        lambda_grid: vec![0.0, 0.1, f64::INFINITY],
        replications: 5,
        master_seed: RngSeed::new(4),
        ..ExperimentConfig::labeled_size_study(SimModel::Model1)
    };
    let records = sweep(&config).unwrap().records;
    write_records(&records, &path).unwrap();
    assert_eq!(read_records(&path).unwrap(), records);
}
