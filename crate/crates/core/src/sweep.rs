//! Two-stage hyperparameter search.
//!
//! Stage one scans `k` with `alpha` and `blame_factor` pinned to the smallest
//! grid values. Stage two fixes the winning `k` and scans every
//! `(alpha, blame_factor)` pair. Equal objective values resolve to the
//! smaller `k`, then the smaller `alpha`, then the smaller `blame_factor`.

use std::cmp::Ordering;
use std::fmt;
use std::path::Path;

use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};
use crate::eval::detection_metrics;
use crate::prototypes::PrototypeSet;
use crate::ranking::{score_all, RankParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub k: usize,
    pub alpha: f64,
    pub blame_factor: f64,
}

impl SweepPoint {
    pub fn apply(&self, base: &RankParams) -> RankParams {
        RankParams {
            k: self.k,
            alpha: self.alpha,
            blame_factor: self.blame_factor,
            ..*base
        }
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        self.k
            .cmp(&other.k)
            .then(self.alpha.total_cmp(&other.alpha))
            .then(self.blame_factor.total_cmp(&other.blame_factor))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub ks: Vec<usize>,
    pub alphas: Vec<f64>,
    pub blame_factors: Vec<f64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            ks: vec![5, 10, 20, 50, 100, 250],
            alphas: vec![0.5, 0.6, 0.8],
            blame_factors: vec![1.0, 1.5, 2.0],
        }
    }
}

impl SweepGrid {
    fn normalized(&self) -> Result<Self> {
        let mut g = self.clone();
        g.ks.sort_unstable();
        g.ks.dedup();
        g.alphas.sort_by(f64::total_cmp);
        g.alphas.dedup();
        g.blame_factors.sort_by(f64::total_cmp);
        g.blame_factors.dedup();
        if g.ks.is_empty() || g.alphas.is_empty() || g.blame_factors.is_empty() {
            return Err(Error::InvalidParam("sweep grid has an empty axis".into()));
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    Maximize,
    Minimize,
}

/// Something that scores a hyperparameter setting.
pub trait Objective {
    fn goal(&self) -> Goal;

    /// `Ok(None)` means the point has no value and is skipped.
    fn evaluate(&mut self, point: &SweepPoint) -> Result<Option<f64>>;
}

/// Detection F1 against a known noise mask (synthetic benchmarks).
pub struct DetectionF1<'a> {
    pub dataset: &'a EmbeddingDataset,
    pub prototypes: &'a PrototypeSet,
    pub base: RankParams,
    pub mask: &'a [bool],
}

impl Objective for DetectionF1<'_> {
    fn goal(&self) -> Goal {
        Goal::Maximize
    }

    fn evaluate(&mut self, point: &SweepPoint) -> Result<Option<f64>> {
        let table = score_all(self.dataset, self.prototypes, &point.apply(&self.base))?;
        Ok(Some(detection_metrics(&table, self.mask)?.f1))
    }
}

/// Externally measured losses, one per configuration, to be minimized.
///
/// File format: `k<TAB>alpha<TAB>blame_factor<TAB>objective` per line.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveTable {
    pub entries: Vec<(SweepPoint, f64)>,
}

impl ObjectiveTable {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ctx = path.display().to_string();
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || {
                Error::format(
                    &ctx,
                    format!("line {}: expected k<TAB>alpha<TAB>blame_factor<TAB>objective", lineno + 1),
                )
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(bad());
            }
            let point = SweepPoint {
                k: cols[0].parse().map_err(|_| bad())?,
                alpha: cols[1].parse().map_err(|_| bad())?,
                blame_factor: cols[2].parse().map_err(|_| bad())?,
            };
            let value: f64 = cols[3].parse().map_err(|_| bad())?;
            if !value.is_finite() {
                return Err(bad());
            }
            entries.push((point, value));
        }
        if entries.is_empty() {
            return Err(Error::Empty(format!("{ctx} has no objective rows")));
        }
        Ok(Self { entries })
    }

    /// The grid spanned by the configurations present.
    pub fn grid(&self) -> SweepGrid {
        SweepGrid {
            ks: self.entries.iter().map(|(p, _)| p.k).collect(),
            alphas: self.entries.iter().map(|(p, _)| p.alpha).collect(),
            blame_factors: self.entries.iter().map(|(p, _)| p.blame_factor).collect(),
        }
    }
}

impl Objective for ObjectiveTable {
    fn goal(&self) -> Goal {
        Goal::Minimize
    }

    fn evaluate(&mut self, point: &SweepPoint) -> Result<Option<f64>> {
        Ok(self
            .entries
            .iter()
            .find(|(p, _)| p.key_cmp(point) == Ordering::Equal)
            .map(|&(_, v)| v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub stage: u8,
    pub point: SweepPoint,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub goal: Goal,
    pub evaluations: Vec<Evaluation>,
    pub best: SweepPoint,
    pub best_value: f64,
}

fn better(goal: Goal, a: (&SweepPoint, f64), b: (&SweepPoint, f64)) -> bool {
    let by_value = match goal {
        Goal::Maximize => a.1.total_cmp(&b.1),
        Goal::Minimize => b.1.total_cmp(&a.1),
    };
    match by_value {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a.0.key_cmp(b.0) == Ordering::Less,
    }
}

fn best_of<'a>(goal: Goal, evals: impl Iterator<Item = &'a Evaluation>) -> Option<&'a Evaluation> {
    evals.fold(None, |best: Option<&Evaluation>, e| match best {
        Some(b) if !better(goal, (&e.point, e.value), (&b.point, b.value)) => Some(b),
        _ => Some(e),
    })
}

pub fn sweep<O: Objective + ?Sized>(grid: &SweepGrid, objective: &mut O) -> Result<SweepReport> {
    let grid = grid.normalized()?;
    let goal = objective.goal();
    let mut evaluations = Vec::new();
    let mut run = |stage: u8, point: SweepPoint, evaluations: &mut Vec<Evaluation>| -> Result<()> {
        if let Some(value) = objective.evaluate(&point)? {
            if value.is_nan() {
                return Err(Error::InvalidParam(format!("objective is NaN at {point}")));
            }
            evaluations.push(Evaluation { stage, point, value });
        }
        Ok(())
    };

    let (alpha0, bf0) = (grid.alphas[0], grid.blame_factors[0]);
    for &k in &grid.ks {
        let point = SweepPoint { k, alpha: alpha0, blame_factor: bf0 };
        run(1, point, &mut evaluations)?;
    }

    let best_k = match best_of(goal, evaluations.iter()) {
        Some(e) => e.point.k,
        None => {
            // Nothing at the stage-one anchor; fall back to a full scan.
            for &k in &grid.ks {
                for &alpha in &grid.alphas {
                    for &blame_factor in &grid.blame_factors {
                        run(2, SweepPoint { k, alpha, blame_factor }, &mut evaluations)?;
                    }
                }
            }
            let best = best_of(goal, evaluations.iter())
                .ok_or_else(|| Error::Empty("objective produced no values".into()))?;
            return Ok(SweepReport {
                goal,
                best: best.point,
                best_value: best.value,
                evaluations,
            });
        }
    };

    for &alpha in &grid.alphas {
        for &blame_factor in &grid.blame_factors {
            run(2, SweepPoint { k: best_k, alpha, blame_factor }, &mut evaluations)?;
        }
    }
    let best = best_of(goal, evaluations.iter().filter(|e| e.stage == 2))
        .or_else(|| best_of(goal, evaluations.iter()))
        .expect("stage one produced a value");
    Ok(SweepReport {
        goal,
        best: best.point,
        best_value: best.value,
        evaluations,
    })
}

impl fmt::Display for SweepPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} alpha={} blame_factor={}", self.k, self.alpha, self.blame_factor)
    }
}

impl SweepReport {
    /// `stage<TAB>k<TAB>alpha<TAB>blame_factor<TAB>objective` rows.
    pub fn table_lines(&self) -> Vec<String> {
        self.evaluations
            .iter()
            .map(|e| {
                format!(
                    "{}\t{}\t{}\t{}\t{}",
                    e.stage, e.point.k, e.point.alpha, e.point.blame_factor, e.value
                )
            })
            .collect()
    }
}
