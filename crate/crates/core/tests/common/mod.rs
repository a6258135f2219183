//! Brute-force reference implementations used by the integration tests.
//!
//! Nothing here calls into the library's neighbor search or scoring code;
//! each function is written directly from the formulas.

#![allow(dead_code)]

use noiserank::EmbeddingDataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn dist(a: &[f32], b: &[f32]) -> f64 {
    let mut s = 0.0f64;
    for i in 0..a.len() {
        let d = a[i] as f64 - b[i] as f64;
        s += d * d;
    }
    s.sqrt()
}

pub fn kappa(d: f64, b: f64, e: f64) -> f64 {
    1.0 / (b + d.powf(e))
}

/// Every other instance sorted by `(distance, index)`, truncated to `k`.
pub fn sorted_neighbors(ds: &EmbeddingDataset, q: usize, k: usize) -> Vec<(usize, f64)> {
    let mut all: Vec<(usize, f64)> = (0..ds.len())
        .filter(|&j| j != q)
        .map(|j| (j, dist(ds.row(q), ds.row(j))))
        .collect();
    all.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// Weighted vote and its argmax (first maximum).
pub fn vote(ds: &EmbeddingDataset, q: usize, k: usize, b: f64, e: f64) -> (Vec<f64>, usize) {
    let mut mass = vec![0.0; ds.num_classes()];
    for (j, d) in sorted_neighbors(ds, q, k) {
        mass[ds.label(j)] += kappa(d, b, e);
    }
    let mut best = 0;
    for v in 0..mass.len() {
        if mass[v] > mass[best] {
            best = v;
        }
    }
    (mass, best)
}

pub struct OracleParams {
    pub k: usize,
    pub alpha: f64,
    pub bf: f64,
    pub b: f64,
    pub e: f64,
}

pub fn lambda(y_i: usize, y_j: usize, pred: usize, p: &OracleParams) -> f64 {
    if y_i == y_j {
        -1.0
    } else if pred == y_j {
        1.0 - p.alpha
    } else if pred != y_i {
        p.alpha
    } else {
        p.alpha * p.bf
    }
}

/// Scores over every (instance, prototype) pair with `i != j`; predictions
/// use the `k` nearest neighbors.
pub fn all_pairs_scores(ds: &EmbeddingDataset, protos: &[usize], p: &OracleParams) -> Vec<f64> {
    let preds: Vec<usize> = protos.iter().map(|&j| vote(ds, j, p.k, p.b, p.e).1).collect();
    let mut scores = vec![0.0; ds.len()];
    for (i, score) in scores.iter_mut().enumerate() {
        for (pi, &j) in protos.iter().enumerate() {
            if i == j {
                continue;
            }
            let w = lambda(ds.label(i), ds.label(j), preds[pi], p);
            *score += w * kappa(dist(ds.row(i), ds.row(j)), p.b, p.e);
        }
    }
    scores
}

/// Scores restricted to the voting pairs: `i` is scored by `j` only when
/// `i` is among `j`'s `k` nearest neighbors.
pub fn voter_scores(ds: &EmbeddingDataset, protos: &[usize], p: &OracleParams) -> Vec<f64> {
    let mut scores = vec![0.0; ds.len()];
    for &j in protos {
        let pred = vote(ds, j, p.k, p.b, p.e).1;
        for (i, d) in sorted_neighbors(ds, j, p.k) {
            scores[i] += lambda(ds.label(i), ds.label(j), pred, p) * kappa(d, p.b, p.e);
        }
    }
    scores
}

/// Ranking of ids by descending score, ties by id.
pub fn rank_ids(ids: &[String], scores: &[f64]) -> Vec<String> {
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap()
            .then(ids[a].cmp(&ids[b]))
    });
    order.into_iter().map(|i| ids[i].clone()).collect()
}

/// Uniform random points in `[-5, 5]^dim` with random labels, every class
/// represented.
pub fn random_dataset(seed: u64, n: usize, dim: usize, classes: usize) -> EmbeddingDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vectors: Vec<f32> = (0..n * dim).map(|_| rng.gen_range(-5.0f32..5.0)).collect();
    let labels: Vec<usize> = (0..n)
        .map(|i| if i < classes { i } else { rng.gen_range(0..classes) })
        .collect();
    let ids = (0..n).map(|i| format!("r{i:04}")).collect();
    EmbeddingDataset::with_class_count(ids, dim, vectors, labels, classes).unwrap()
}

/// Rows of `ds` in the order given by `perm`.
pub fn permuted(ds: &EmbeddingDataset, perm: &[usize]) -> EmbeddingDataset {
    ds.subset(perm).unwrap()
}
