use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gssl::experiment::{aggregate, read_records};

fn gssl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gssl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_values(out: &Output) -> Vec<f64> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| l.parse().unwrap())
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

/// Labeled points at 0 and 2 on a line, unlabeled point at 1.
fn line_points(dir: &Path) -> (String, String) {
    (
        write(dir, "labeled.csv", "0.0,1\n2.0,0\n"),
        write(dir, "unlabeled.csv", "1.0\n"),
    )
}

#[test]
fn solve_midpoint_is_half() {
    let dir = tempfile::tempdir().unwrap();
    let (l, u) = line_points(dir.path());
    let out = gssl(&["solve", "--labeled", &l, "--unlabeled", &u, "--bandwidth", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_values(&out);
    assert_eq!(v.len(), 1);
    assert!((v[0] - 0.5).abs() < 1e-12);
}

#[test]
fn solve_infinite_lambda_prints_label_mean() {
    let dir = tempfile::tempdir().unwrap();
    let l = write(dir.path(), "l.csv", "0.0,1\n0.5,0\n1.0,1\n");
    let u = write(dir.path(), "u.csv", "0.2\n0.9\n");
    let out = gssl(&["solve", "--labeled", &l, "--unlabeled", &u, "--lambda", "inf"]);
    assert!(out.status.success());
    for v in stdout_values(&out) {
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
    }
}

#[test]
fn soft_lambda_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let (l, u) = line_points(dir.path());
    let out = gssl(&["solve", "--labeled", &l, "--unlabeled", &u, "--bandwidth", "1", "--lambda", "0.5"]);
    let v = stdout_values(&out);
    // Symmetric layout: the soft score is also the midpoint of the labels.
    assert!((v[0] - 0.5).abs() < 1e-12);
}

#[test]
fn missing_file_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let (l, _) = line_points(dir.path());
    let missing = dir.path().join("nope.csv");
    let out = gssl(&["solve", "--labeled", &l, "--unlabeled", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.csv"));
}

#[test]
fn malformed_row_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let l = write(dir.path(), "l.csv", "0.0,1\n0.5,x\n");
    let u = write(dir.path(), "u.csv", "0.2\n");
    let out = gssl(&["solve", "--labeled", &l, "--unlabeled", &u]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("l.csv:2:"));
}

#[test]
fn negative_lambda_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (l, u) = line_points(dir.path());
    let out = gssl(&["solve", "--labeled", &l, "--unlabeled", &u, "--lambda", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn disconnected_point_is_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let l = write(dir.path(), "l.csv", "0.0,1\n0.1,0\n");
    let u = write(dir.path(), "u.csv", "500.0\n");
    let out = gssl(&["solve", "--labeled", &l, "--unlabeled", &u, "--bandwidth", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn estimate_weights_labeled_points() {
    let dir = tempfile::tempdir().unwrap();
    let (l, u) = line_points(dir.path());
    let out = gssl(&["estimate", "--labeled", &l, "--unlabeled", &u, "--bandwidth", "1"]);
    assert!(out.status.success());
    assert!((stdout_values(&out)[0] - 0.5).abs() < 1e-12);

    let u2 = write(dir.path(), "u2.csv", "0.0\n");
    let out = gssl(&["estimate", "--labeled", &l, "--unlabeled", &u2, "--bandwidth", "1"]);
    let expected = 1.0 / (1.0 + (-4.0f64).exp());
    assert!((stdout_values(&out)[0] - expected).abs() < 1e-12);
}

#[test]
fn simulate_is_reproducible_and_summarized() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = gssl(&[
            "simulate", "--model", "2", "--n-grid", "10,20", "--m-grid", "5",
            "--lambda-grid", "0,0.1,inf", "--reps", "3", "--seed", "7",
            "--out", path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        (path, String::from_utf8(out.stdout).unwrap())
    };
    let (a, summary) = run("a.csv");
    let (b, _) = run("b.csv");
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let text = fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("model,n,m,lambda,rep,seed,rmse\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 3 * 3);
    assert!(text.contains(",inf,"));

    let cells = aggregate(&read_records(&a).unwrap());
    let rows: Vec<&str> = summary.lines().skip(1).collect();
    assert_eq!(rows.len(), cells.len());
    for (row, cell) in rows.iter().zip(&cells) {
        let printed: f64 = row.split_whitespace().last().unwrap().parse().unwrap();
        assert!((printed - cell.mean_rmse).abs() < 5e-7, "{row}");
    }
}

#[test]
fn simulate_rejects_bad_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.csv");
    let out = gssl(&["simulate", "--n-grid", "10,0", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = gssl(&["simulate", "--lambda-grid", "0,-1", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists());
}

#[test]
fn simulate_reads_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.csv");
    let config = write(
        dir.path(),
        "small.conf",
        &format!(
            "# tiny run\nmodel = 1\nn_grid = 10\nm_grid = 4\nlambda_grid = 0, 5\nreplications = 2\nmaster_seed = 3\noutput_path = {}\n",
            out_path.display()
        ),
    );
    let out = gssl(&["simulate", "--config", &config]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read_records(&out_path).unwrap().len(), 4);
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for (name, model, n_cells, m_cells) in [
        ("figure1.conf", "1", 10, 1),
        ("figure2.conf", "1", 1, 6),
        ("figure3.conf", "2", 10, 1),
        ("figure4.conf", "2", 1, 6),
    ] {
        let cfg = gssl::ExperimentConfig::load(&root.join(name)).unwrap();
        assert_eq!(cfg.model.to_string(), model, "{name}");
        assert_eq!(cfg.n_grid.len(), n_cells, "{name}");
        assert_eq!(cfg.m_grid.len(), m_cells, "{name}");
        assert_eq!(cfg.replications, 1000);
    }
}
