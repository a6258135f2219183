//! Exact Euclidean nearest-neighbor search and the distance kernel.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};

/// Euclidean distance between two equal-length vectors, accumulated in f64.
pub fn distance(a: &[f32], b: &[f32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(euclidean(a, b))
}

#[inline]
pub(crate) fn euclidean(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = f64::from(x) - f64::from(y);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Maps a distance to a positive similarity weight.
///
/// Implementations must be strictly decreasing in `distance`.
pub trait Kernel: Sync {
    fn weight(&self, distance: f64) -> f64;
}

/// Inverse-power kernel `1 / (b + d^e)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    /// Bias; keeps the weight finite at `d = 0`.
    pub b: f64,
    /// Distance exponent.
    pub e: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self { b: 1.0, e: 1.0 }
    }
}

impl KernelParams {
    pub fn new(b: f64, e: f64) -> Result<Self> {
        let p = Self { b, e };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::InvalidParam(format!("kernel b must be > 0, got {}", self.b)));
        }
        if !(self.e > 0.0 && self.e.is_finite()) {
            return Err(Error::InvalidParam(format!("kernel e must be > 0, got {}", self.e)));
        }
        Ok(())
    }
}

impl Kernel for KernelParams {
    #[inline]
    fn weight(&self, distance: f64) -> f64 {
        kernel(distance, self)
    }
}

/// `1 / (b + d^e)`, in `(0, 1/b]`.
#[inline]
pub fn kernel(d: f64, p: &KernelParams) -> f64 {
    1.0 / (p.b + d.powf(p.e))
}

/// One neighbor of a query: dataset index and its distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

/// The nearest other instances of one query, ascending by `(distance, index)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    pub query: usize,
    pub neighbors: Vec<Neighbor>,
}

impl NeighborList {
    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Neighbor> {
        self.neighbors.iter()
    }
}

#[inline]
fn by_distance_then_index(a: &Neighbor, b: &Neighbor) -> Ordering {
    a.distance
        .total_cmp(&b.distance)
        .then(a.index.cmp(&b.index))
}

/// Exact k nearest neighbors for each query, excluding the query itself.
///
/// Each list holds `min(k, N - 1)` entries. Equal distances are broken by the
/// smaller index. Queries are processed in parallel; the output is identical
/// to processing them one at a time.
pub fn knn(ds: &EmbeddingDataset, queries: &[usize], k: usize) -> Result<Vec<NeighborList>> {
    check_knn_args(ds, queries, k)?;
    Ok(queries.par_iter().map(|&q| knn_one(ds, q, k)).collect())
}

/// Single-threaded [`knn`].
pub fn knn_sequential(
    ds: &EmbeddingDataset,
    queries: &[usize],
    k: usize,
) -> Result<Vec<NeighborList>> {
    check_knn_args(ds, queries, k)?;
    Ok(queries.iter().map(|&q| knn_one(ds, q, k)).collect())
}

fn check_knn_args(ds: &EmbeddingDataset, queries: &[usize], k: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::InvalidParam("k must be >= 1".into()));
    }
    if ds.is_empty() {
        return Err(Error::Empty("knn over an empty dataset".into()));
    }
    if let Some(&q) = queries.iter().find(|&&q| q >= ds.len()) {
        return Err(Error::InvalidParam(format!(
            "query index {q} out of range for {} rows",
            ds.len()
        )));
    }
    Ok(())
}

fn knn_one(ds: &EmbeddingDataset, query: usize, k: usize) -> NeighborList {
    let x = ds.row(query);
    let mut all: Vec<Neighbor> = ds
        .rows()
        .enumerate()
        .filter(|&(j, _)| j != query)
        .map(|(j, y)| Neighbor {
            index: j,
            distance: euclidean(x, y),
        })
        .collect();
    let k = k.min(all.len());
    if k < all.len() {
        all.select_nth_unstable_by(k, by_distance_then_index);
        all.truncate(k);
    }
    all.sort_unstable_by(by_distance_then_index);
    NeighborList {
        query,
        neighbors: all,
    }
}

/// The `k` nearest members of `candidates` to `query`, skipping `query` itself.
pub(crate) fn nearest_among(
    ds: &EmbeddingDataset,
    query: usize,
    candidates: &[usize],
    k: usize,
) -> NeighborList {
    let x = ds.row(query);
    let mut all: Vec<Neighbor> = candidates
        .iter()
        .filter(|&&j| j != query)
        .map(|&j| Neighbor {
            index: j,
            distance: euclidean(x, ds.row(j)),
        })
        .collect();
    let k = k.min(all.len());
    if k < all.len() {
        all.select_nth_unstable_by(k, by_distance_then_index);
        all.truncate(k);
    }
    all.sort_unstable_by(by_distance_then_index);
    NeighborList {
        query,
        neighbors: all,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f32]) -> EmbeddingDataset {
        let n = points.len();
        EmbeddingDataset::with_class_count(
            (0..n).map(|i| i.to_string()).collect(),
            1,
            points.to_vec(),
            (0..n).map(|i| i % 2).collect(),
            2,
        )
        .unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&[0., 0.], &[3., 4.]).unwrap(), 5.0);
        assert_eq!(distance(&[1.5, -2.], &[1.5, -2.]).unwrap(), 0.0);
        assert!((distance(&[1., 1.], &[2., 2.]).unwrap() - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(matches!(
            distance(&[1.], &[1., 2.]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kernel_examples() {
        let unit = KernelParams::new(1.0, 1.0).unwrap();
        assert_eq!(kernel(0.0, &unit), 1.0);
        assert_eq!(kernel(1.0, &unit), 0.5);
        assert!((kernel(2.0, &KernelParams::new(1.0, 2.0).unwrap()) - 0.2).abs() < 1e-15);
        assert!(KernelParams::new(0.0, 1.0).is_err());
        assert!(KernelParams::new(1.0, -1.0).is_err());
    }

    #[test]
    fn knn_on_a_line() {
        let ds = line(&[0., 1., 10.]);
        let res = knn(&ds, &[0], 1).unwrap();
        assert_eq!(
            res[0].neighbors,
            vec![Neighbor {
                index: 1,
                distance: 1.0
            }]
        );
        let clamped = knn(&ds, &[0], 5).unwrap();
        assert_eq!(clamped[0].len(), 2);
    }

    #[test]
    fn ties_go_to_smaller_index() {
        let ds = line(&[0., 1., -1., 1.]);
        let res = knn(&ds, &[0], 2).unwrap();
        let idx: Vec<usize> = res[0].iter().map(|n| n.index).collect();
        assert_eq!(idx, vec![1, 2]);
    }

    #[test]
    fn bad_arguments() {
        let ds = line(&[0., 1.]);
        assert!(matches!(knn(&ds, &[0], 0), Err(Error::InvalidParam(_))));
        assert!(matches!(knn(&ds, &[5], 1), Err(Error::InvalidParam(_))));
    }
}
