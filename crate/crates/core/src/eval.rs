//! Synthetic benchmarks and detection metrics.
//!
//! Ground truth (the noise mask) is produced here and only ever consumed by
//! the metrics; ranking never sees it.

use std::fmt;
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::{write_lines, EmbeddingDataset};
use crate::error::{Error, Result};
use crate::ranking::ScoreTable;

/// A generated dataset together with each row's generating cluster.
#[derive(Debug, Clone)]
pub struct Blobs {
    pub dataset: EmbeddingDataset,
    pub true_labels: Vec<usize>,
}

/// Isotropic unit-variance Gaussian clusters, `per_class` points each.
///
/// When `dim >= classes`, class `c` is centered at `separation / sqrt(2)`
/// along axis `c`, so every pair of centers is exactly `separation` apart.
/// Otherwise centers sit on the first axis at multiples of `separation`.
/// Rows are class-major with ids `b000000`, `b000001`, ...
pub fn make_blobs(
    classes: usize,
    per_class: usize,
    dim: usize,
    separation: f64,
    seed: u64,
) -> Result<Blobs> {
    make_blobs_sized(&vec![per_class; classes], dim, separation, seed)
}

/// Like [`make_blobs`] with `total` points split as evenly as possible; the
/// first `total % classes` classes get one extra point.
pub fn make_blobs_total(
    classes: usize,
    total: usize,
    dim: usize,
    separation: f64,
    seed: u64,
) -> Result<Blobs> {
    if classes == 0 {
        return Err(Error::InvalidParam("blobs need at least 2 classes".into()));
    }
    let sizes: Vec<usize> = (0..classes)
        .map(|c| total / classes + usize::from(c < total % classes))
        .collect();
    make_blobs_sized(&sizes, dim, separation, seed)
}

/// Blobs with an explicit point count per class.
pub fn make_blobs_sized(sizes: &[usize], dim: usize, separation: f64, seed: u64) -> Result<Blobs> {
    let classes = sizes.len();
    if classes < 2 {
        return Err(Error::InvalidParam("blobs need at least 2 classes".into()));
    }
    if sizes.iter().any(|&s| s < 1) || dim < 1 {
        return Err(Error::InvalidParam("class sizes and dim must be >= 1".into()));
    }
    if !(separation > 0.0 && separation.is_finite()) {
        return Err(Error::InvalidParam("separation must be > 0".into()));
    }
    let centers = blob_centers(classes, dim, separation);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n: usize = sizes.iter().sum();
    let mut vectors = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    for (c, (center, &size)) in centers.iter().zip(sizes).enumerate() {
        for _ in 0..size {
            for &mu in center {
                let z: f64 = rng.sample(StandardNormal);
                vectors.push((mu + z) as f32);
            }
            labels.push(c);
        }
    }
    let ids = (0..n).map(|i| format!("b{i:06}")).collect();
    let dataset = EmbeddingDataset::with_class_count(ids, dim, vectors, labels.clone(), classes)?;
    Ok(Blobs {
        dataset,
        true_labels: labels,
    })
}

/// Cluster centers used by [`make_blobs`].
pub fn blob_centers(classes: usize, dim: usize, separation: f64) -> Vec<Vec<f64>> {
    (0..classes)
        .map(|c| {
            let mut v = vec![0.0; dim];
            if dim >= classes {
                v[c] = separation / std::f64::consts::SQRT_2;
            } else {
                v[0] = c as f64 * separation;
            }
            v
        })
        .collect()
}

/// Where flipped labels go.
#[derive(Debug, Clone, PartialEq)]
pub enum Transition {
    /// Uniform over the other classes.
    Uniform,
    /// Row `a` gives destination probabilities for true class `a`. Diagonals
    /// must be zero; each row sums to 1, or is all zero for a class that
    /// never flips.
    Matrix(Vec<Vec<f64>>),
}

impl Transition {
    /// A matrix sending every flip of `from` to `to`; other classes never flip.
    pub fn single(classes: usize, from: usize, to: usize) -> Self {
        let mut m = vec![vec![0.0; classes]; classes];
        m[from][to] = 1.0;
        Transition::Matrix(m)
    }

    fn validate(&self, classes: usize) -> Result<()> {
        let Transition::Matrix(m) = self else {
            return Ok(());
        };
        if m.len() != classes || m.iter().any(|r| r.len() != classes) {
            return Err(Error::InvalidParam(format!(
                "transition matrix must be {classes}x{classes}"
            )));
        }
        for (a, row) in m.iter().enumerate() {
            if row.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
                return Err(Error::InvalidParam(format!("transition row {a} has a negative or non-finite entry")));
            }
            if row[a] != 0.0 {
                return Err(Error::InvalidParam(format!(
                    "transition row {a} has self-transition mass"
                )));
            }
            let sum: f64 = row.iter().sum();
            if sum != 0.0 && (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParam(format!(
                    "transition row {a} sums to {sum}, expected 1 or 0"
                )));
            }
        }
        Ok(())
    }

    /// Reads a whitespace-separated square matrix, one row per line.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let rows = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(i, l)| {
                l.split_whitespace()
                    .map(|v| {
                        v.parse::<f64>().map_err(|_| {
                            Error::format(path.display().to_string(), format!("row {i}: bad number {v:?}"))
                        })
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Transition::Matrix(rows))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    /// Per-instance flip probability, in `[0, 1)`.
    pub rate: f64,
    pub transition: Transition,
    pub seed: u64,
}

/// A dataset with flipped labels and the mask of flipped rows.
#[derive(Debug, Clone)]
pub struct Noisy {
    pub dataset: EmbeddingDataset,
    pub mask: Vec<bool>,
}

/// Flips each label independently with probability `spec.rate`.
pub fn inject_noise(ds: &EmbeddingDataset, spec: &NoiseSpec) -> Result<Noisy> {
    let c = ds.num_classes();
    if c < 2 {
        return Err(Error::InvalidParam("cannot flip labels with one class".into()));
    }
    if !(0.0..1.0).contains(&spec.rate) {
        return Err(Error::InvalidParam(format!(
            "noise rate must lie in [0, 1), got {}",
            spec.rate
        )));
    }
    spec.transition.validate(c)?;

    let samplers: Vec<Option<WeightedIndex<f64>>> = (0..c)
        .map(|a| match &spec.transition {
            Transition::Uniform => {
                let w: Vec<f64> = (0..c).map(|b| if a == b { 0.0 } else { 1.0 }).collect();
                WeightedIndex::new(w).ok()
            }
            Transition::Matrix(m) => WeightedIndex::new(&m[a]).ok(),
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut labels = ds.labels().to_vec();
    let mut mask = vec![false; ds.len()];
    for (label, flipped) in labels.iter_mut().zip(mask.iter_mut()) {
        let u: f64 = rng.gen();
        if u < spec.rate {
            if let Some(s) = &samplers[*label] {
                *label = s.sample(&mut rng);
                *flipped = true;
            }
        }
    }
    Ok(Noisy {
        dataset: ds.with_labels(labels)?,
        mask,
    })
}

/// Writes `id<TAB>true_label<TAB>noisy` rows.
pub fn write_truth(path: &Path, noisy: &EmbeddingDataset, true_labels: &[usize], mask: &[bool]) -> Result<()> {
    write_lines(
        path,
        noisy
            .ids()
            .iter()
            .zip(true_labels)
            .zip(mask)
            .map(|((id, &t), &m)| format!("{id}\t{}\t{}", noisy.class_name(t), u8::from(m))),
    )
}

/// Reads a truth file into `(id, true_label, noisy)` rows.
pub fn read_truth(path: &Path) -> Result<Vec<(String, String, bool)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let ctx = path.display().to_string();
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let cols: Vec<&str> = l.split('\t').collect();
            let flag = match cols.get(2) {
                Some(&"0") => false,
                Some(&"1") => true,
                _ => {
                    return Err(Error::format(
                        &ctx,
                        format!("line {}: expected id<TAB>true_label<TAB>0|1", i + 1),
                    ))
                }
            };
            if cols.len() != 3 {
                return Err(Error::format(&ctx, format!("line {}: expected 3 columns", i + 1)));
            }
            Ok((cols[0].to_string(), cols[1].to_string(), flag))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Confusion {
    tp: usize,
    fp: usize,
    fn_: usize,
    tn: usize,
}

impl Confusion {
    fn add(&mut self, flagged: bool, noisy: bool) {
        match (flagged, noisy) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    fn errors(&self) -> usize {
        self.fp + self.fn_
    }
}

/// `num / den`, with `0 / 0` read as a vacuous 1.
fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Detection quality of a score table against a known noise mask.
///
/// Removed instances (`keep == false`) count as predicted noisy.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseReport {
    pub instances: usize,
    pub true_noise: usize,
    pub detected: usize,
    pub correctly_detected: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// F1 of the "clean" side of the binary task.
    pub clean_f1: f64,
    /// Mean of the noisy and clean F1.
    pub macro_f1: f64,
    /// Error rate of the noisy/clean prediction per given label; `None` for
    /// classes with no instances.
    pub per_class_error: Vec<Option<f64>>,
    pub average_error_rate: f64,
    pub class_names: Vec<String>,
}

pub fn detection_metrics(table: &ScoreTable, mask: &[bool]) -> Result<NoiseReport> {
    if mask.is_empty() {
        return Err(Error::Empty("noise mask".into()));
    }
    if mask.len() != table.len() {
        return Err(Error::InvalidParam(format!(
            "noise mask has {} entries, score table has {}",
            mask.len(),
            table.len()
        )));
    }
    let classes = table.class_names().len();
    let mut overall = Confusion::default();
    let mut per_class = vec![Confusion::default(); classes];
    for (e, &noisy) in table.entries().iter().zip(mask) {
        overall.add(!e.keep, noisy);
        per_class[e.label].add(!e.keep, noisy);
    }

    // Double-entry check: per-class tallies must add up to the global one.
    let summed = per_class.iter().fold(Confusion::default(), |a, c| Confusion {
        tp: a.tp + c.tp,
        fp: a.fp + c.fp,
        fn_: a.fn_ + c.fn_,
        tn: a.tn + c.tn,
    });
    if summed != overall || overall.total() != mask.len() {
        return Err(Error::Internal(format!(
            "confusion tallies disagree: {summed:?} vs {overall:?}"
        )));
    }

    let precision = ratio(overall.tp, overall.tp + overall.fp);
    let recall = ratio(overall.tp, overall.tp + overall.fn_);
    let clean_precision = ratio(overall.tn, overall.tn + overall.fn_);
    let clean_recall = ratio(overall.tn, overall.tn + overall.fp);
    let noisy_f1 = f1(precision, recall);
    let clean_f1 = f1(clean_precision, clean_recall);

    let per_class_error: Vec<Option<f64>> = per_class
        .iter()
        .map(|c| (c.total() > 0).then(|| c.errors() as f64 / c.total() as f64))
        .collect();
    let present: Vec<f64> = per_class_error.iter().flatten().copied().collect();
    let average_error_rate = present.iter().sum::<f64>() / present.len() as f64;

    Ok(NoiseReport {
        instances: mask.len(),
        true_noise: overall.tp + overall.fn_,
        detected: overall.tp + overall.fp,
        correctly_detected: overall.tp,
        precision,
        recall,
        f1: noisy_f1,
        clean_f1,
        macro_f1: (noisy_f1 + clean_f1) / 2.0,
        per_class_error,
        average_error_rate,
        class_names: table.class_names().to_vec(),
    })
}

impl NoiseReport {
    /// Flat `key=value` lines for scripting.
    pub fn to_key_values(&self) -> Vec<String> {
        let mut out = vec![
            format!("instances={}", self.instances),
            format!("true_noise={}", self.true_noise),
            format!("detected={}", self.detected),
            format!("correctly_detected={}", self.correctly_detected),
            format!("precision={}", self.precision),
            format!("recall={}", self.recall),
            format!("f1={}", self.f1),
            format!("clean_f1={}", self.clean_f1),
            format!("macro_f1={}", self.macro_f1),
            format!("average_error_rate={}", self.average_error_rate),
        ];
        for (name, err) in self.class_names.iter().zip(&self.per_class_error) {
            if let Some(e) = err {
                out.push(format!("error_rate.{name}={e}"));
            }
        }
        out
    }
}

impl fmt::Display for NoiseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pct = |v: f64| 100.0 * v;
        writeln!(
            f,
            "instances {}, true noise {}, flagged {}, correctly flagged {}",
            self.instances, self.true_noise, self.detected, self.correctly_detected
        )?;
        writeln!(
            f,
            "recall {:.2}%  precision {:.2}%  F1 {:.2}%  macro-F1 {:.2}%",
            pct(self.recall),
            pct(self.precision),
            pct(self.f1),
            pct(self.macro_f1)
        )?;
        writeln!(f, "average error rate {:.2}%", pct(self.average_error_rate))?;
        for (name, err) in self.class_names.iter().zip(&self.per_class_error) {
            if let Some(e) = err {
                writeln!(f, "  {name}: {:.2}%", pct(*e))?;
            }
        }
        Ok(())
    }
}

/// Aggregated evidence between prototype classes (rows) and given labels
/// (columns), each column normalized to sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BlameMatrix {
    pub class_names: Vec<String>,
    /// `cells[prototype_class][given_class]`.
    pub cells: Vec<Vec<f64>>,
}

impl BlameMatrix {
    /// Accumulates `|contribution|` of `(given_label, prototype_label,
    /// contribution)` pairs and column-normalizes. All-zero columns stay zero.
    pub fn from_pairs(
        class_names: Vec<String>,
        pairs: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Self {
        let c = class_names.len();
        let mut cells = vec![vec![0.0; c]; c];
        for (given, proto, contribution) in pairs {
            cells[proto][given] += contribution.abs();
        }
        for col in 0..c {
            let sum: f64 = (0..c).map(|r| cells[r][col]).sum();
            if sum > 0.0 {
                for row in cells.iter_mut() {
                    row[col] /= sum;
                }
            }
        }
        Self { class_names, cells }
    }

    pub fn column_sum(&self, col: usize) -> f64 {
        self.cells.iter().map(|r| r[col]).sum()
    }

    /// TSV with a header row of class names; each row starts with its class.
    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        let header = std::iter::once(format!("prototype\\given\t{}", self.class_names.join("\t")));
        let rows = self.class_names.iter().zip(&self.cells).map(|(name, row)| {
            let vals: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            format!("{name}\t{}", vals.join("\t"))
        });
        write_lines(path, header.chain(rows))
    }
}

pub fn blame_matrix(table: &ScoreTable) -> Result<BlameMatrix> {
    if !table.has_evidence() {
        return Err(Error::InvalidParam(
            "score table carries no evidence ledger".into(),
        ));
    }
    Ok(BlameMatrix::from_pairs(
        table.class_names().to_vec(),
        table.entries().iter().flat_map(|e| {
            e.evidence
                .iter()
                .map(move |ev| (e.label, ev.prototype_label, ev.contribution))
        }),
    ))
}

/// Fraction of instances with given label `b` whose true label is `a`, as
/// `m[a][b]`: the empirical counterpart of a column-normalized blame matrix.
pub fn empirical_transition(given: &[usize], truth: &[usize], classes: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; classes]; classes];
    let mut totals = vec![0usize; classes];
    for (&g, &t) in given.iter().zip(truth) {
        m[t][g] += 1.0;
        totals[g] += 1;
    }
    for (b, &n) in totals.iter().enumerate() {
        if n > 0 {
            for row in m.iter_mut() {
                row[b] /= n as f64;
            }
        }
    }
    m
}

/// Ranks with ties replaced by their average (1-based).
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties.
///
/// Returns `None` when either side is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    assert_eq!(a.len(), b.len());
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    (va > 0.0 && vb > 0.0).then(|| cov / (va * vb).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::{CliqueType, Evidence};

    fn table_with(keep_scores: &[f64], labels: &[usize]) -> ScoreTable {
        let rows = keep_scores
            .iter()
            .zip(labels)
            .enumerate()
            .map(|(i, (&s, &l))| (format!("i{i:03}"), l, s, Vec::new()))
            .collect();
        ScoreTable::from_scores(rows, vec!["a".into(), "b".into()], 0.0, false)
    }

    #[test]
    fn blobs_shape_and_determinism() {
        let b = make_blobs(2, 1, 3, 5.0, 0).unwrap();
        assert_eq!(b.dataset.len(), 2);
        let again = make_blobs(2, 1, 3, 5.0, 0).unwrap();
        assert_eq!(b.dataset, again.dataset);
        assert!(make_blobs(1, 5, 3, 5.0, 0).is_err());
    }

    #[test]
    fn centers_are_equidistant() {
        let c = blob_centers(3, 16, 10.0);
        for a in 0..3 {
            for b in (a + 1)..3 {
                let d: f64 = c[a].iter().zip(&c[b]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                assert!((d - 10.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_rate_changes_nothing() {
        let b = make_blobs(3, 20, 4, 5.0, 1).unwrap();
        let spec = NoiseSpec { rate: 0.0, transition: Transition::Uniform, seed: 3 };
        let noisy = inject_noise(&b.dataset, &spec).unwrap();
        assert!(noisy.mask.iter().all(|&m| !m));
        assert_eq!(noisy.dataset.labels(), b.dataset.labels());
    }

    #[test]
    fn single_destination_transition() {
        let b = make_blobs(3, 200, 4, 5.0, 1).unwrap();
        let spec = NoiseSpec { rate: 0.5, transition: Transition::single(3, 0, 1), seed: 3 };
        let noisy = inject_noise(&b.dataset, &spec).unwrap();
        let mut flipped = 0;
        for i in 0..noisy.mask.len() {
            if noisy.mask[i] {
                flipped += 1;
                assert_eq!(b.true_labels[i], 0);
                assert_eq!(noisy.dataset.label(i), 1);
            }
        }
        assert!(flipped > 0);
    }

    #[test]
    fn transition_validation() {
        let ds = make_blobs(2, 2, 2, 1.0, 0).unwrap().dataset;
        let bad = |m: Vec<Vec<f64>>| NoiseSpec { rate: 0.1, transition: Transition::Matrix(m), seed: 0 };
        assert!(inject_noise(&ds, &bad(vec![vec![0.5, 0.5], vec![1.0, 0.0]])).is_err());
        assert!(inject_noise(&ds, &bad(vec![vec![0.0, 0.7], vec![1.0, 0.0]])).is_err());
        assert!(inject_noise(&ds, &bad(vec![vec![0.0, 1.0]])).is_err());
        let rate = NoiseSpec { rate: 1.0, transition: Transition::Uniform, seed: 0 };
        assert!(inject_noise(&ds, &rate).is_err());
    }

    #[test]
    fn perfect_detection() {
        let t = table_with(&[1.0, -1.0, 2.0, -0.5], &[0, 0, 1, 1]);
        let r = detection_metrics(&t, &[true, false, true, false]).unwrap();
        assert_eq!((r.recall, r.precision, r.f1, r.macro_f1), (1.0, 1.0, 1.0, 1.0));
        assert_eq!(r.average_error_rate, 0.0);
    }

    #[test]
    fn nothing_flagged() {
        let t = table_with(&[-1.0; 4], &[0, 0, 1, 1]);
        let r = detection_metrics(&t, &[true, false, false, false]).unwrap();
        assert_eq!(r.recall, 0.0);
        assert_eq!(r.f1, 0.0);
        assert_eq!(r.per_class_error, vec![Some(0.5), Some(0.0)]);
        assert_eq!(r.average_error_rate, 0.25);
        assert!(detection_metrics(&t, &[]).is_err());
    }

    #[test]
    fn f1_matches_precision_and_recall() {
        let t = table_with(&[1.0, 1.0, -1.0, 1.0, -1.0], &[0, 1, 0, 1, 0]);
        let r = detection_metrics(&t, &[true, false, true, true, false]).unwrap();
        assert!((r.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.f1 - 2.0 * r.precision * r.recall / (r.precision + r.recall)).abs() < 1e-9);
    }

    #[test]
    fn single_class_blame_matrix() {
        let m = BlameMatrix::from_pairs(vec!["only".into()], vec![(0, 0, -0.3), (0, 0, -0.2)]);
        assert_eq!(m.cells, vec![vec![1.0]]);
    }

    #[test]
    fn blame_matrix_columns() {
        let ev = |l, x| Evidence {
            prototype_id: "p".into(),
            prototype_label: l,
            clique: CliqueType::C11,
            contribution: x,
        };
        let rows = vec![
            ("a".to_string(), 0, 0.0, vec![ev(0, -3.0), ev(1, 1.0)]),
            ("b".to_string(), 1, 0.0, vec![]),
        ];
        let t = ScoreTable::from_scores(rows, vec!["x".into(), "y".into()], 0.0, true);
        let m = blame_matrix(&t).unwrap();
        assert_eq!(m.cells, vec![vec![0.75, 0.0], vec![0.25, 0.0]]);
        assert_eq!(m.column_sum(1), 0.0);
        let bare = ScoreTable::from_scores(vec![("a".to_string(), 0, 0.0, vec![])], vec!["x".into(), "y".into()], 0.0, false);
        assert!(blame_matrix(&bare).is_err());
    }

    #[test]
    fn spearman_basics() {
        assert!((spearman(&[1., 2., 3.], &[10., 20., 30.]).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&[1., 2., 3.], &[3., 2., 1.]).unwrap() + 1.0).abs() < 1e-12);
        assert!(spearman(&[1., 1.], &[1., 2.]).is_none());
        assert_eq!(average_ranks(&[5., 1., 5.]), vec![2.5, 1.0, 2.5]);
    }
}
