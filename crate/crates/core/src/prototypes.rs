//! Per-class prototype selection.
//!
//! Each class is clustered with K-means on its members' vectors and every
//! centroid is snapped to the nearest member, so prototypes are always real
//! instances carrying a given label.

use std::path::Path;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{write_lines, EmbeddingDataset};
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 100;
const CONVERGENCE_SHIFT: f64 = 1e-6;

/// How prototypes are drawn from each class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrototypePolicy {
    /// Members nearest to per-class K-means centroids.
    #[default]
    KMeans,
    /// A uniformly random sample of members (ablation baseline).
    Random,
}

impl FromStr for PrototypePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kmeans" => Ok(Self::KMeans),
            "random" => Ok(Self::Random),
            other => Err(Error::InvalidParam(format!(
                "unknown prototype policy {other:?} (expected kmeans|random)"
            ))),
        }
    }
}

impl std::fmt::Display for PrototypePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::KMeans => "kmeans",
            Self::Random => "random",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrototypeOptions {
    pub seed: u64,
    /// Replaces the per-class count rule when set.
    pub count_override: Option<usize>,
    pub policy: PrototypePolicy,
}

impl Default for PrototypeOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            count_override: None,
            policy: PrototypePolicy::KMeans,
        }
    }
}

/// Prototype indices grouped by the class they were selected for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrototypeSet {
    per_class: Vec<Vec<usize>>,
}

impl PrototypeSet {
    /// Wraps explicit per-class prototype lists, checking them against `ds`.
    pub fn from_per_class(ds: &EmbeddingDataset, per_class: Vec<Vec<usize>>) -> Result<Self> {
        if per_class.len() != ds.num_classes() {
            return Err(Error::InvalidParam(format!(
                "prototype lists cover {} classes, dataset has {}",
                per_class.len(),
                ds.num_classes()
            )));
        }
        let mut seen = vec![false; ds.len()];
        for (c, list) in per_class.iter().enumerate() {
            for &i in list {
                if i >= ds.len() {
                    return Err(Error::InvalidParam(format!("prototype index {i} out of range")));
                }
                if ds.label(i) != c {
                    return Err(Error::InvalidParam(format!(
                        "prototype {} is not labeled {}",
                        ds.id(i),
                        ds.class_name(c)
                    )));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidParam(format!("duplicate prototype {}", ds.id(i))));
                }
            }
        }
        Ok(Self { per_class })
    }

    /// All prototype indices, class by class.
    pub fn indices(&self) -> Vec<usize> {
        self.per_class.iter().flatten().copied().collect()
    }

    pub fn per_class(&self) -> &[Vec<usize>] {
        &self.per_class
    }

    pub fn per_class_count(&self) -> Vec<usize> {
        self.per_class.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.per_class.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes the `class<TAB>prototype_id` audit file.
    pub fn write_tsv(&self, path: &Path, ds: &EmbeddingDataset) -> Result<()> {
        write_lines(
            path,
            self.per_class.iter().enumerate().flat_map(|(c, list)| {
                list.iter()
                    .map(move |&i| format!("{}\t{}", ds.class_name(c), ds.id(i)))
            }),
        )
    }
}

/// Prototypes per class for an average class size `rho`: `max(1, floor(sqrt(rho / 2)))`.
pub fn prototype_count(rho: f64) -> usize {
    ((rho.max(0.0) / 2.0).sqrt().floor() as usize).max(1)
}

/// K-means prototypes with the given seed.
pub fn select_prototypes(
    ds: &EmbeddingDataset,
    seed: u64,
    count_override: Option<usize>,
) -> Result<PrototypeSet> {
    select_prototypes_with(
        ds,
        &PrototypeOptions {
            seed,
            count_override,
            policy: PrototypePolicy::KMeans,
        },
    )
}

pub fn select_prototypes_with(
    ds: &EmbeddingDataset,
    opts: &PrototypeOptions,
) -> Result<PrototypeSet> {
    if ds.is_empty() {
        return Err(Error::Empty("cannot select prototypes from an empty dataset".into()));
    }
    if opts.count_override == Some(0) {
        return Err(Error::InvalidParam("prototype count must be >= 1".into()));
    }
    let rho = ds.len() as f64 / ds.nonempty_classes() as f64;
    let target = opts.count_override.unwrap_or_else(|| prototype_count(rho));

    let mut members = ds.class_members();
    // Order members by id so the selection does not depend on row order.
    for list in &mut members {
        list.sort_by(|&a, &b| ds.id(a).cmp(ds.id(b)));
    }

    let per_class: Vec<Vec<usize>> = members
        .par_iter()
        .enumerate()
        .map(|(c, list)| {
            if list.is_empty() {
                return Vec::new();
            }
            let q = target.min(list.len());
            let mut rng = ChaCha8Rng::seed_from_u64(class_seed(opts.seed, ds.class_name(c)));
            match opts.policy {
                PrototypePolicy::KMeans => kmeans_prototypes(ds, list, q, &mut rng),
                PrototypePolicy::Random => list.choose_multiple(&mut rng, q).copied().collect(),
            }
        })
        .collect();

    debug_assert!(per_class
        .iter()
        .zip(&members)
        .all(|(p, m)| m.is_empty() || !p.is_empty()));
    Ok(PrototypeSet { per_class })
}

/// Mixes the run seed with a class name (FNV-1a then splitmix64 finalizer).
fn class_seed(seed: u64, class: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in class.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn kmeans_prototypes<R: Rng>(
    ds: &EmbeddingDataset,
    members: &[usize],
    q: usize,
    rng: &mut R,
) -> Vec<usize> {
    let points: Vec<Vec<f64>> = members
        .iter()
        .map(|&i| ds.row(i).iter().map(|&v| f64::from(v)).collect())
        .collect();
    let centroids = kmeans(&points, q, rng);

    let mut chosen: Vec<usize> = Vec::with_capacity(centroids.len());
    for c in &centroids {
        // First minimum in member order wins ties.
        let (pos, _) = points
            .iter()
            .enumerate()
            .map(|(p, x)| (p, sq_dist(x, c)))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        let idx = members[pos];
        if !chosen.contains(&idx) {
            chosen.push(idx);
        }
    }
    chosen
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest_centroid(x: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    centroids
        .iter()
        .enumerate()
        .map(|(c, m)| (c, sq_dist(x, m)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Lloyd's K-means with k-means++ seeding.
///
/// Returns at most `q` centroids; fewer when the points have fewer than `q`
/// distinct positions. Stops after 100 iterations or once no centroid moves
/// by 1e-6 or more. An emptied cluster is reseeded with the point farthest
/// from its assigned centroid.
pub fn kmeans<R: Rng>(points: &[Vec<f64>], q: usize, rng: &mut R) -> Vec<Vec<f64>> {
    if points.is_empty() || q == 0 {
        return Vec::new();
    }
    let mut centroids = plus_plus_init(points, q, rng);
    let k = centroids.len();
    let dim = points[0].len();
    let mut assignment = vec![0usize; points.len()];

    for _ in 0..MAX_ITERATIONS {
        let mut dists = vec![0.0; points.len()];
        for (p, x) in points.iter().enumerate() {
            let (c, d) = nearest_centroid(x, &centroids);
            assignment[p] = c;
            dists[p] = d;
        }

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (x, &c) in points.iter().zip(&assignment) {
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(x) {
                *s += v;
            }
        }

        let mut next: Vec<Vec<f64>> = Vec::with_capacity(k);
        for c in 0..k {
            if counts[c] > 0 {
                let n = counts[c] as f64;
                next.push(sums[c].iter().map(|s| s / n).collect());
            } else {
                next.push(Vec::new());
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                let (far, _) = dists
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |best, (p, &d)| {
                        if d > best.1 {
                            (p, d)
                        } else {
                            best
                        }
                    });
                next[c] = points[far].clone();
                dists[far] = 0.0;
            }
        }

        let shift = centroids
            .iter()
            .zip(&next)
            .map(|(a, b)| sq_dist(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = next;
        if shift < CONVERGENCE_SHIFT {
            break;
        }
    }
    centroids
}

fn plus_plus_init<R: Rng>(points: &[Vec<f64>], q: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut centroids = vec![points[rng.gen_range(0..points.len())].clone()];
    let mut d2: Vec<f64> = points.iter().map(|x| sq_dist(x, &centroids[0])).collect();
    while centroids.len() < q {
        let Ok(sampler) = WeightedIndex::new(&d2) else {
            // Every remaining point coincides with a chosen centroid.
            break;
        };
        let next = points[sampler.sample(rng)].clone();
        for (d, x) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(x, &next));
        }
        centroids.push(next);
    }
    centroids
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_dim(points: &[f32], labels: Vec<usize>, classes: usize) -> EmbeddingDataset {
        EmbeddingDataset::with_class_count(
            (0..points.len()).map(|i| format!("p{i:02}")).collect(),
            1,
            points.to_vec(),
            labels,
            classes,
        )
        .unwrap()
    }

    #[test]
    fn count_rule() {
        assert_eq!(prototype_count(310_009.0 / 101.0), 39);
        assert_eq!(prototype_count(3069.0), 39);
        assert_eq!(prototype_count(2.0), 1);
        assert_eq!(prototype_count(1.0), 1);
        assert_eq!(prototype_count(0.0), 1);
        assert_eq!(prototype_count(8.0), 2);
    }

    #[test]
    fn identical_points_collapse_to_one_prototype() {
        let mut pts = vec![1.0f32; 8];
        pts.extend([5.0f32; 8]);
        let labels = [vec![0; 8], vec![1; 8]].concat();
        let ds = one_dim(&pts, labels, 2);
        let protos = select_prototypes(&ds, 3, None).unwrap();
        // rho = 8, two clusters requested per class, duplicates collapse.
        assert_eq!(protos.per_class_count(), vec![1, 1]);
    }

    #[test]
    fn two_sub_clusters_each_get_a_prototype() {
        let ds = one_dim(&[0.0, 0.1, 10.0, 10.1, 50.0], vec![0, 0, 0, 0, 1], 2);
        for seed in 0..20 {
            let protos = select_prototypes(&ds, seed, Some(2)).unwrap();
            let mut picks: Vec<f32> = protos.per_class()[0].iter().map(|&i| ds.row(i)[0]).collect();
            picks.sort_by(f32::total_cmp);
            assert_eq!(picks.len(), 2, "seed {seed}");
            assert!(picks[0] <= 0.1 && picks[1] >= 10.0, "seed {seed}: {picks:?}");
        }
    }

    #[test]
    fn count_is_clamped_to_class_size() {
        let ds = one_dim(&[0.0, 1.0, 2.0, 3.0], vec![0, 1, 1, 1], 2);
        let protos = select_prototypes(&ds, 0, Some(10)).unwrap();
        assert_eq!(protos.per_class_count(), vec![1, 3]);
    }

    #[test]
    fn absent_class_gets_no_prototypes() {
        let ds = one_dim(&[0.0, 1.0, 2.0], vec![0, 2, 2], 3);
        let protos = select_prototypes(&ds, 0, None).unwrap();
        assert_eq!(protos.per_class_count(), vec![1, 0, 1]);
    }

    #[test]
    fn random_policy_samples_within_class() {
        let pts: Vec<f32> = (0..40).map(|i| i as f32).collect();
        let labels: Vec<usize> = (0..40).map(|i| i % 2).collect();
        let ds = one_dim(&pts, labels, 2);
        let opts = PrototypeOptions {
            seed: 9,
            count_override: None,
            policy: PrototypePolicy::Random,
        };
        let protos = select_prototypes_with(&ds, &opts).unwrap();
        assert_eq!(protos.per_class_count(), vec![3, 3]);
        for (c, list) in protos.per_class().iter().enumerate() {
            assert!(list.iter().all(|&i| ds.label(i) == c));
        }
        assert_eq!(protos, select_prototypes_with(&ds, &opts).unwrap());
    }

    #[test]
    fn from_per_class_validates() {
        let ds = one_dim(&[0.0, 1.0, 2.0], vec![0, 1, 1], 2);
        assert!(PrototypeSet::from_per_class(&ds, vec![vec![0], vec![1, 2]]).is_ok());
        assert!(PrototypeSet::from_per_class(&ds, vec![vec![1], vec![2]]).is_err());
        assert!(PrototypeSet::from_per_class(&ds, vec![vec![0], vec![1, 1]]).is_err());
    }

    #[test]
    fn policy_parses() {
        assert_eq!("random".parse::<PrototypePolicy>().unwrap(), PrototypePolicy::Random);
        assert!("hnsw".parse::<PrototypePolicy>().is_err());
    }
}
