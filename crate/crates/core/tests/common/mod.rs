#![allow(dead_code)]

use gssl::{build_graph, Dataset, KernelSpec, SimilarityGraph};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random RBF graph over uniform points with labels in [0, 1].
pub struct Instance {
    pub graph: SimilarityGraph,
    pub labels: DVector<f64>,
}

pub fn random_instance(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize) -> Instance {
    let n = rng.random_range(1..=max_n);
    let m = rng.random_range(1..=max_m);
    sized_instance(rng, n, m)
}

pub fn sized_instance(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Instance {
    let d = rng.random_range(1..=5);
    let h = rng.random_range(0.3..1.0);
    let inputs = DMatrix::from_fn(n + m, d, |_, _| rng.random::<f64>());
    let labels = DVector::from_fn(n, |_, _| rng.random::<f64>());
    let data = Dataset::new(inputs, labels.clone()).unwrap();
    let graph = build_graph(&data, &KernelSpec::rbf(h).unwrap());
    Instance { graph, labels }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian elimination with partial pivoting on plain vectors.
pub fn gauss_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let size = a.nrows();
    let mut m: Vec<Vec<f64>> = (0..size)
        .map(|i| {
            let mut row: Vec<f64> = (0..size).map(|j| a[(i, j)]).collect();
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..size {
        let pivot = (col..size)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        for r in col + 1..size {
            let factor = m[r][col] / m[col][col];
            for c in col..=size {
                m[r][c] -= factor * m[col][c];
            }
        }
    }
    let mut x = vec![0.0; size];
    for r in (0..size).rev() {
        let tail: f64 = (r + 1..size).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][size] - tail) / m[r][r];
    }
    DVector::from_vec(x)
}

/// Inverse by solving against each unit vector.
pub fn gauss_inverse(a: &DMatrix<f64>) -> DMatrix<f64> {
    let size = a.nrows();
    let mut out = DMatrix::zeros(size, size);
    for j in 0..size {
        let mut e = DVector::zeros(size);
        e[j] = 1.0;
        out.set_column(j, &gauss_solve(a, &e));
    }
    out
}

pub fn sup_norm(v: &DVector<f64>) -> f64 {
    v.amax()
}

/// max |a - b| / max(max |b|, tiny).
pub fn relative_sup(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).amax() / b.amax().max(f64::MIN_POSITIVE)
}
