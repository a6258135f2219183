//! Blame/reward scoring of every instance against the class prototypes.
//!
//! Each prototype `j` predicts its own label from a kernel-weighted vote of
//! its `k` nearest instances. Every voter `i` then receives one contribution
//! `weight(clique) * kernel(d(i, j))` whose sign and size depend on how the
//! voter's given label relates to the prototype's given and predicted labels:
//!
//! | clique | condition                     | weight      |
//! |--------|-------------------------------|-------------|
//! | `c11`  | `y_i == y_j`                  | `-1`        |
//! | `c10`  | `y_i != y_j`, `y'_j == y_j`   | `1 - alpha` |
//! | `c01`  | `y'_j` differs from both      | `alpha`     |
//! | `c00`  | `y'_j == y_i != y_j`          | `alpha * b_f` |
//!
//! An instance's score is the sum of its contributions. Higher scores mean
//! the given label is more likely wrong; the instance is removed when its
//! score is strictly greater than the threshold `delta`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};
use crate::neighbors::{self, Kernel, KernelParams, NeighborList};
use crate::prototypes::PrototypeSet;

/// Which (instance, prototype) pairs contribute to scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CliqueScope {
    /// Instance `i` is scored by prototype `j` iff `i` is among `j`'s `k`
    /// nearest neighbors, i.e. iff `i` voted on `j`'s prediction.
    #[default]
    Voters,
    /// Instance `i` is scored by its own `k` nearest prototypes.
    NearestPrototypes,
}

impl FromStr for CliqueScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "voters" => Ok(Self::Voters),
            "nearest-prototypes" => Ok(Self::NearestPrototypes),
            other => Err(Error::InvalidParam(format!(
                "unknown clique scope {other:?} (expected voters|nearest-prototypes)"
            ))),
        }
    }
}

impl fmt::Display for CliqueScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Voters => "voters",
            Self::NearestPrototypes => "nearest-prototypes",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankParams {
    /// Neighborhood size, shared by prediction and scoring.
    pub k: usize,
    /// Impact of an incorrect vote, in `[0.5, 1]`.
    pub alpha: f64,
    /// Blame factor, `>= 1`.
    pub blame_factor: f64,
    pub kernel: KernelParams,
    /// Removal threshold, `>= 0`.
    pub delta: f64,
    pub scope: CliqueScope,
}

impl Default for RankParams {
    fn default() -> Self {
        Self {
            k: 50,
            alpha: 0.5,
            blame_factor: 1.0,
            kernel: KernelParams::default(),
            delta: 0.0,
            scope: CliqueScope::Voters,
        }
    }
}

impl RankParams {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidParam("k must be >= 1".into()));
        }
        if !(0.5..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParam(format!(
                "alpha must lie in [0.5, 1], got {}",
                self.alpha
            )));
        }
        if !(self.blame_factor >= 1.0 && self.blame_factor.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "blame_factor must be >= 1, got {}",
                self.blame_factor
            )));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "delta must be >= 0, got {}",
                self.delta
            )));
        }
        self.kernel.validate()
    }
}

/// Agreement pattern between an instance and a prototype.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CliqueType {
    C11,
    C10,
    C01,
    C00,
}

impl CliqueType {
    pub const ALL: [CliqueType; 4] = [Self::C11, Self::C10, Self::C01, Self::C00];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::C11 => "c11",
            Self::C10 => "c10",
            Self::C01 => "c01",
            Self::C00 => "c00",
        }
    }
}

impl fmt::Display for CliqueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CliqueType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown clique type {s:?}")))
    }
}

/// Clique type for instance label `y_i`, prototype label `y_j` and prototype
/// prediction `y_j_pred`.
pub fn classify_clique(y_i: usize, y_j: usize, y_j_pred: usize) -> CliqueType {
    if y_i == y_j {
        CliqueType::C11
    } else if y_j_pred == y_j {
        CliqueType::C10
    } else if y_j_pred == y_i {
        CliqueType::C00
    } else {
        CliqueType::C01
    }
}

pub fn clique_weight(t: CliqueType, p: &RankParams) -> f64 {
    match t {
        CliqueType::C11 => -1.0,
        CliqueType::C10 => 1.0 - p.alpha,
        CliqueType::C01 => p.alpha,
        CliqueType::C00 => p.alpha * p.blame_factor,
    }
}

/// Weighted-kNN prediction for one prototype.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypePrediction {
    pub prototype: usize,
    pub predicted: usize,
    /// Kernel-weighted vote per class.
    pub votes: Vec<f64>,
    pub neighbors: NeighborList,
}

/// Predicts a prototype's label from its neighbors' given labels.
///
/// Ties between classes go to the smallest class index.
pub fn predict_label(
    ds: &EmbeddingDataset,
    proto: usize,
    neigh: &NeighborList,
    p: &RankParams,
) -> Result<PrototypePrediction> {
    predict_with_kernel(ds, proto, neigh, &p.kernel)
}

pub fn predict_with_kernel<K: Kernel + ?Sized>(
    ds: &EmbeddingDataset,
    proto: usize,
    neigh: &NeighborList,
    kernel: &K,
) -> Result<PrototypePrediction> {
    if neigh.is_empty() {
        return Err(Error::Degenerate(format!(
            "prototype {} has no neighbors to vote",
            ds.id(proto)
        )));
    }
    if neigh.query != proto || neigh.iter().any(|n| n.index == proto) {
        return Err(Error::InvalidParam(format!(
            "neighbor list does not belong to prototype {}",
            ds.id(proto)
        )));
    }
    let mut votes = vec![0.0; ds.num_classes()];
    for n in neigh.iter() {
        votes[ds.label(n.index)] += kernel.weight(n.distance);
    }
    let predicted = argmax_first(&votes);
    Ok(PrototypePrediction {
        prototype: proto,
        predicted,
        votes,
        neighbors: neigh.clone(),
    })
}

fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// One scored (instance, prototype) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    pub prototype_id: String,
    pub prototype_label: usize,
    pub clique: CliqueType,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreEntry {
    pub id: String,
    pub label: usize,
    pub score: f64,
    /// 1 is the most suspect instance.
    pub rank: usize,
    pub keep: bool,
    /// Ordered by prototype id.
    pub evidence: Vec<Evidence>,
}

/// Scores for every instance, in dataset row order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    entries: Vec<ScoreEntry>,
    class_names: Vec<String>,
    delta: f64,
    has_evidence: bool,
}

impl ScoreTable {
    /// Builds a table from per-instance `(id, label, score, evidence)`,
    /// assigning ranks and keep flags.
    pub fn from_scores(
        rows: Vec<(String, usize, f64, Vec<Evidence>)>,
        class_names: Vec<String>,
        delta: f64,
        has_evidence: bool,
    ) -> Self {
        let mut entries: Vec<ScoreEntry> = rows
            .into_iter()
            .map(|(id, label, score, evidence)| ScoreEntry {
                id,
                label,
                score,
                rank: 0,
                keep: score <= delta,
                evidence,
            })
            .collect();
        let mut order: Vec<usize> = (0..entries.len()).collect();
        order.sort_by(|&a, &b| rank_order(&entries[a], &entries[b]));
        for (r, &i) in order.iter().enumerate() {
            entries[i].rank = r + 1;
        }
        Self {
            entries,
            class_names,
            delta,
            has_evidence,
        }
    }

    pub(crate) fn from_entries(
        entries: Vec<ScoreEntry>,
        class_names: Vec<String>,
        delta: f64,
        has_evidence: bool,
    ) -> Self {
        Self {
            entries,
            class_names,
            delta,
            has_evidence,
        }
    }

    pub(crate) fn into_parts(self) -> (Vec<ScoreEntry>, Vec<String>, f64) {
        (self.entries, self.class_names, self.delta)
    }

    pub fn entries(&self) -> &[ScoreEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Whether per-pair evidence was recorded (it is lost when a table is
    /// rebuilt from a score file alone).
    pub fn has_evidence(&self) -> bool {
        self.has_evidence
    }

    pub fn get(&self, id: &str) -> Option<&ScoreEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// Entries sorted by rank.
    pub fn ranked(&self) -> Vec<&ScoreEntry> {
        let mut v: Vec<&ScoreEntry> = self.entries.iter().collect();
        v.sort_by_key(|e| e.rank);
        v
    }

    pub fn keep_flags(&self) -> Vec<bool> {
        self.entries.iter().map(|e| e.keep).collect()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.score).collect()
    }

    /// Recomputes keep flags for a new threshold.
    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        for e in &mut self.entries {
            e.keep = e.score <= delta;
        }
        self
    }

    /// Marks exactly the top `floor(percent * N / 100)` ranked instances for
    /// removal and keeps the rest.
    pub fn with_top_percent_removed(mut self, percent: f64) -> Result<Self> {
        let remove = top_percent_count(self.len(), percent)?;
        for e in &mut self.entries {
            e.keep = e.rank > remove;
        }
        Ok(self)
    }
}

fn rank_order(a: &ScoreEntry, b: &ScoreEntry) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.id.cmp(&b.id))
}

/// How many of `n` ranked rows `percent`% removal takes out.
pub fn top_percent_count(n: usize, percent: f64) -> Result<usize> {
    if !(0.0..=100.0).contains(&percent) {
        return Err(Error::InvalidParam(format!(
            "top percent must lie in [0, 100], got {percent}"
        )));
    }
    // Absorb representation error such as 1.8 * 1000 / 100 = 18.000000000000004.
    let exact = percent * n as f64 / 100.0;
    Ok(((exact + 1e-9).floor() as usize).min(n))
}

/// Scores every instance with the configured kernel.
pub fn score_all(
    ds: &EmbeddingDataset,
    protos: &PrototypeSet,
    p: &RankParams,
) -> Result<ScoreTable> {
    score_with_kernel(ds, protos, p, &p.kernel)
}

/// Prototype predictions only.
pub fn predict_prototypes<K: Kernel + ?Sized>(
    ds: &EmbeddingDataset,
    protos: &PrototypeSet,
    k: usize,
    kernel: &K,
) -> Result<Vec<PrototypePrediction>> {
    let indices = protos.indices();
    let lists = neighbors::knn(ds, &indices, k)?;
    lists
        .par_iter()
        .map(|nl| predict_with_kernel(ds, nl.query, nl, kernel))
        .collect()
}

/// [`score_all`] with an arbitrary kernel in place of `p.kernel`.
pub fn score_with_kernel<K: Kernel + ?Sized>(
    ds: &EmbeddingDataset,
    protos: &PrototypeSet,
    p: &RankParams,
    kernel: &K,
) -> Result<ScoreTable> {
    p.validate()?;
    if protos.is_empty() {
        return Err(Error::Empty("no prototypes to score against".into()));
    }
    let predictions = predict_prototypes(ds, protos, p.k, kernel)?;

    let pairs: Vec<(usize, Evidence)> = match p.scope {
        CliqueScope::Voters => predictions
            .par_iter()
            .flat_map_iter(|pred| {
                pred.neighbors
                    .iter()
                    .map(|n| (n.index, evidence_for(ds, n.index, pred, n.distance, p, kernel)))
                    .collect::<Vec<_>>()
            })
            .collect(),
        CliqueScope::NearestPrototypes => {
            let proto_idx: Vec<usize> = predictions.iter().map(|pr| pr.prototype).collect();
            let by_proto: std::collections::HashMap<usize, &PrototypePrediction> =
                predictions.iter().map(|pr| (pr.prototype, pr)).collect();
            (0..ds.len())
                .into_par_iter()
                .flat_map_iter(|i| {
                    neighbors::nearest_among(ds, i, &proto_idx, p.k)
                        .neighbors
                        .into_iter()
                        .map(|n| {
                            let pred = by_proto[&n.index];
                            (i, evidence_for(ds, i, pred, n.distance, p, kernel))
                        })
                        .collect::<Vec<_>>()
                })
                .collect()
        }
    };

    let mut ledger: Vec<Vec<Evidence>> = vec![Vec::new(); ds.len()];
    for (i, ev) in pairs {
        ledger[i].push(ev);
    }
    let rows = ledger
        .into_iter()
        .enumerate()
        .map(|(i, mut ev)| {
            ev.sort_by(|a, b| a.prototype_id.cmp(&b.prototype_id));
            let score = ev.iter().map(|e| e.contribution).sum();
            (ds.id(i).to_string(), ds.label(i), score, ev)
        })
        .collect();
    Ok(ScoreTable::from_scores(
        rows,
        ds.class_names().to_vec(),
        p.delta,
        true,
    ))
}

fn evidence_for<K: Kernel + ?Sized>(
    ds: &EmbeddingDataset,
    instance: usize,
    pred: &PrototypePrediction,
    distance: f64,
    p: &RankParams,
    kernel: &K,
) -> Evidence {
    let y_j = ds.label(pred.prototype);
    let clique = classify_clique(ds.label(instance), y_j, pred.predicted);
    Evidence {
        prototype_id: ds.id(pred.prototype).to_string(),
        prototype_label: y_j,
        clique,
        contribution: clique_weight(clique, p) * kernel.weight(distance),
    }
}

/// The kept subset of `ds` (row order preserved) and the removed ids.
pub fn denoise(
    ds: &EmbeddingDataset,
    table: &ScoreTable,
) -> Result<(EmbeddingDataset, Vec<String>)> {
    if table.len() != ds.len() {
        return Err(Error::InvalidParam(format!(
            "score table has {} rows, dataset has {}",
            table.len(),
            ds.len()
        )));
    }
    let mut keep = Vec::new();
    let mut removed = Vec::new();
    for (i, e) in table.entries().iter().enumerate() {
        if e.id != ds.id(i) {
            return Err(Error::InvalidParam(format!(
                "score table row {i} is {:?}, dataset row is {:?}",
                e.id,
                ds.id(i)
            )));
        }
        if e.keep {
            keep.push(i);
        } else {
            removed.push(e.id.clone());
        }
    }
    if keep.is_empty() {
        return Err(Error::Degenerate("every instance would be removed".into()));
    }
    Ok((ds.subset(&keep)?, removed))
}

/// Why one instance scored the way it did.
#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    pub id: String,
    pub label: String,
    pub score: f64,
    pub rank: usize,
    pub keep: bool,
    /// Largest-magnitude contributions first.
    pub evidence: Vec<Evidence>,
    pub total_evidence: usize,
}

pub fn explain(table: &ScoreTable, id: &str, top_n: usize) -> Result<Explanation> {
    let entry = table.get(id).ok_or_else(|| Error::NotFound(id.to_string()))?;
    let mut evidence = entry.evidence.clone();
    evidence.sort_by(|a, b| {
        b.contribution
            .abs()
            .total_cmp(&a.contribution.abs())
            .then_with(|| a.prototype_id.cmp(&b.prototype_id))
    });
    evidence.truncate(top_n);
    Ok(Explanation {
        id: entry.id.clone(),
        label: table.class_names()[entry.label].clone(),
        score: entry.score,
        rank: entry.rank,
        keep: entry.keep,
        evidence,
        total_evidence: entry.evidence.len(),
    })
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} (label {}): score {:.6}, rank {}, {}",
            self.id,
            self.label,
            self.score,
            self.rank,
            if self.keep { "kept" } else { "removed" }
        )?;
        writeln!(
            f,
            "top {} of {} evidence pairs:",
            self.evidence.len(),
            self.total_evidence
        )?;
        for e in &self.evidence {
            writeln!(
                f,
                "  {}\t{}\t{:+.6}",
                e.prototype_id, e.clique, e.contribution
            )?;
        }
        Ok(())
    }
}
