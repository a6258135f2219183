//! The `noiserank` command-line tool.
//!
//! Data goes to files named on the command line; stdout carries a short
//! human-readable summary. Errors map to exit codes via
//! [`Error::exit_code`].

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::artifacts;
use crate::config::{RunConfig, RunManifest};
use crate::dataset::{self, load_dataset_with_classes, EmbeddingDataset};
use crate::error::{Error, Result};
use crate::eval::{self, make_blobs, NoiseSpec, Transition};
use crate::prototypes::select_prototypes_with;
use crate::ranking::{explain, score_all, ScoreTable};
use crate::sweep::{self, DetectionF1, ObjectiveTable, SweepGrid};

#[derive(Debug, Parser)]
#[command(name = "noiserank", version, about = "Rank labeled embeddings by likelihood of label noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score and rank every instance.
    Rank(RankArgs),
    /// Write the ids to keep after thresholding or top-percent removal.
    Denoise(DenoiseArgs),
    /// Detection metrics against a ground-truth file.
    Eval(EvalArgs),
    /// Two-stage hyperparameter search.
    Sweep(SweepArgs),
    /// Show the evidence behind one instance's score.
    Explain(ExplainArgs),
    /// Generate Gaussian blobs with injected label noise.
    Synth(SynthArgs),
}

/// Inputs and hyperparameters shared by `rank` and `sweep`.
#[derive(Debug, Args, Default)]
pub struct ParamArgs {
    /// Binary embedding file.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Label TSV (`id<TAB>label`).
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Optional class list, one name per line, fixing class order.
    #[arg(long)]
    pub classes: Option<PathBuf>,
    /// key=value config file (a previous run's manifest works too).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub blame_factor: Option<f64>,
    #[arg(long)]
    pub kernel_b: Option<f64>,
    #[arg(long)]
    pub kernel_e: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// L2-normalize embeddings before ranking (default true).
    #[arg(long)]
    pub normalize: Option<bool>,
    /// kmeans | random
    #[arg(long)]
    pub prototype_policy: Option<String>,
    /// Prototypes per class; overrides the size-based rule.
    #[arg(long)]
    pub prototype_count: Option<usize>,
    /// voters | nearest-prototypes
    #[arg(long)]
    pub clique_scope: Option<String>,
    /// Iteration number recorded in the manifest.
    #[arg(long)]
    pub round: Option<u32>,
}

impl ParamArgs {
    /// Defaults, then the config file, then explicit flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let p = &mut cfg.params;
        if let Some(v) = self.k {
            p.k = v;
        }
        if let Some(v) = self.alpha {
            p.alpha = v;
        }
        if let Some(v) = self.blame_factor {
            p.blame_factor = v;
        }
        if let Some(v) = self.kernel_b {
            p.kernel.b = v;
        }
        if let Some(v) = self.kernel_e {
            p.kernel.e = v;
        }
        if let Some(v) = self.delta {
            p.delta = v;
        }
        if let Some(v) = &self.clique_scope {
            p.scope = v.parse()?;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.normalize {
            cfg.normalize = v;
        }
        if let Some(v) = &self.prototype_policy {
            cfg.prototype_policy = v.parse()?;
        }
        if let Some(v) = self.prototype_count {
            cfg.prototype_count = Some(v);
        }
        if let Some(v) = self.round {
            cfg.round = v;
        }
        if let Some(v) = &self.embeddings {
            cfg.embeddings = Some(v.clone());
        }
        if let Some(v) = &self.labels {
            cfg.labels = Some(v.clone());
        }
        if let Some(v) = &self.classes {
            cfg.classes = Some(v.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Score TSV output.
    #[arg(long)]
    pub out: PathBuf,
    /// Evidence ledger TSV output.
    #[arg(long)]
    pub evidence: Option<PathBuf>,
    /// Prototype audit TSV output.
    #[arg(long)]
    pub prototypes: Option<PathBuf>,
    /// Kept ids, in dataset order.
    #[arg(long)]
    pub denoised: Option<PathBuf>,
    /// Removed ids, in dataset order.
    #[arg(long)]
    pub removed: Option<PathBuf>,
    /// Column-normalized blame matrix TSV output.
    #[arg(long)]
    pub blame_matrix: Option<PathBuf>,
    /// `index<TAB>class` mapping output.
    #[arg(long)]
    pub class_map: Option<PathBuf>,
    /// Run manifest; defaults to `<out>.manifest`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    #[arg(long)]
    pub scores: PathBuf,
    /// Kept ids output.
    #[arg(long)]
    pub out: PathBuf,
    /// Remove the top x% ranked instances instead of using keep flags.
    #[arg(long, conflicts_with = "delta")]
    pub top_percent: Option<f64>,
    /// Re-threshold scores at this delta instead of using keep flags.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Label TSV whose row order the output follows (default: rank order).
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Removed ids output.
    #[arg(long)]
    pub removed: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub scores: PathBuf,
    /// Ground truth TSV (`id<TAB>true_label<TAB>noisy`).
    #[arg(long)]
    pub truth: PathBuf,
    /// key=value report output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Evidence ledger, needed for the blame matrix.
    #[arg(long)]
    pub evidence: Option<PathBuf>,
    #[arg(long, requires = "evidence")]
    pub blame_out: Option<PathBuf>,
    #[arg(long)]
    pub classes: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Ground truth TSV; the objective becomes detection F1 (maximized).
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Per-config loss TSV (`k<TAB>alpha<TAB>blame_factor<TAB>loss`, minimized).
    #[arg(long, conflicts_with = "truth")]
    pub objective: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub ks: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub blame_factors: Option<Vec<f64>>,
    /// Full evaluation table output.
    #[arg(long)]
    pub out: PathBuf,
    /// Winning settings as a config file.
    #[arg(long)]
    pub best_config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub evidence: PathBuf,
    #[arg(long)]
    pub id: String,
    #[arg(long, default_value_t = 10)]
    pub top: usize,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 3)]
    pub classes: usize,
    #[arg(long, default_value_t = 100)]
    pub per_class: usize,
    #[arg(long, default_value_t = 16)]
    pub dim: usize,
    #[arg(long, default_value_t = 8.0)]
    pub separation: f64,
    #[arg(long, default_value_t = 0.2)]
    pub noise_rate: f64,
    /// `uniform` or a path to a whitespace-separated CxC matrix.
    #[arg(long, default_value = "uniform")]
    pub transition: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_embeddings: PathBuf,
    #[arg(long)]
    pub out_labels: PathBuf,
    /// `id<TAB>true_label<TAB>noisy` output.
    #[arg(long)]
    pub out_truth: PathBuf,
}

/// Parses the process arguments, runs, and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Rank(a) => cmd_rank(&a, out),
        Command::Denoise(a) => cmd_denoise(&a, out),
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Explain(a) => cmd_explain(&a, out),
        Command::Synth(a) => cmd_synth(&a, out),
    }
}

fn say(out: &mut dyn Write, text: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(text)
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| Error::io("<stdout>", e))
}

fn load_for(cfg: &RunConfig) -> Result<EmbeddingDataset> {
    let emb = cfg
        .embeddings
        .as_deref()
        .ok_or_else(|| Error::InvalidParam("no embedding file given (--embeddings)".into()))?;
    let labels = cfg
        .labels
        .as_deref()
        .ok_or_else(|| Error::InvalidParam("no label file given (--labels)".into()))?;
    let classes = cfg.classes.as_deref().map(dataset::read_class_list).transpose()?;
    let ds = load_dataset_with_classes(emb, labels, classes.as_deref())?;
    if cfg.normalize {
        ds.l2_normalize()
    } else {
        Ok(ds)
    }
}

fn read_class_opt(path: Option<&Path>) -> Result<Option<Vec<String>>> {
    path.map(dataset::read_class_list).transpose()
}

pub fn cmd_rank(a: &RankArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = a.params.resolve()?;
    let ds = load_for(&cfg)?;
    let protos = select_prototypes_with(&ds, &cfg.prototype_options())?;
    let table = score_all(&ds, &protos, &cfg.params)?;

    let mut manifest = RunManifest::new(cfg);
    artifacts::write_scores(&a.out, &table)?;
    manifest.add_output("scores", &a.out);
    if let Some(p) = &a.evidence {
        artifacts::write_evidence(p, &table)?;
        manifest.add_output("evidence", p);
    }
    if let Some(p) = &a.prototypes {
        protos.write_tsv(p, &ds)?;
        manifest.add_output("prototypes", p);
    }
    if let Some(p) = &a.denoised {
        let kept = table.entries().iter().filter(|e| e.keep).map(|e| e.id.as_str());
        artifacts::write_ids(p, kept)?;
        manifest.add_output("denoised", p);
    }
    if let Some(p) = &a.removed {
        let removed = table.entries().iter().filter(|e| !e.keep).map(|e| e.id.as_str());
        artifacts::write_ids(p, removed)?;
        manifest.add_output("removed", p);
    }
    if let Some(p) = &a.blame_matrix {
        eval::blame_matrix(&table)?.write_tsv(p)?;
        manifest.add_output("blame_matrix", p);
    }
    if let Some(p) = &a.class_map {
        dataset::write_lines(
            p,
            ds.class_names().iter().enumerate().map(|(i, c)| format!("{i}\t{c}")),
        )?;
        manifest.add_output("class_map", p);
    }
    let manifest_path = a
        .manifest
        .clone()
        .unwrap_or_else(|| append_ext(&a.out, "manifest"));
    manifest.write(&manifest_path)?;

    let removed = table.entries().iter().filter(|e| !e.keep).count();
    say(
        out,
        format_args!(
            "ranked {} instances against {} prototypes (k={}, alpha={}, blame_factor={}); {} flagged above delta={}",
            table.len(),
            protos.len(),
            manifest.config.params.k,
            manifest.config.params.alpha,
            manifest.config.params.blame_factor,
            removed,
            manifest.config.params.delta
        ),
    )?;
    for e in table.ranked().into_iter().take(5) {
        say(out, format_args!("  #{} {}\t{}", e.rank, e.id, e.score))?;
    }
    say(out, format_args!("manifest: {}", manifest_path.display()))
}

fn append_ext(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn cmd_denoise(a: &DenoiseArgs, out: &mut dyn Write) -> Result<()> {
    let mut table = artifacts::read_scores(&a.scores, None, 0.0)?;
    if let Some(pct) = a.top_percent {
        table = table.with_top_percent_removed(pct)?;
    } else if let Some(delta) = a.delta {
        if delta.is_nan() || delta < 0.0 {
            return Err(Error::InvalidParam(format!("delta must be >= 0, got {delta}")));
        }
        table = table.with_delta(delta);
    }

    let order: Vec<&str> = match &a.labels {
        Some(path) => {
            let rows = dataset::read_label_rows(path)?;
            if rows.len() != table.len() {
                return Err(Error::RowCountMismatch {
                    expected: rows.len(),
                    found: table.len(),
                });
            }
            let mut ids = Vec::with_capacity(rows.len());
            for (id, _) in &rows {
                let e = table
                    .get(id)
                    .ok_or_else(|| Error::NotFound(id.clone()))?;
                ids.push(e.id.as_str());
            }
            ids
        }
        None => table.ranked().into_iter().map(|e| e.id.as_str()).collect(),
    };
    let keep_of = |id: &str| table.get(id).map(|e| e.keep).unwrap_or(false);
    let kept: Vec<&str> = order.iter().copied().filter(|id| keep_of(id)).collect();
    let removed: Vec<&str> = order.iter().copied().filter(|id| !keep_of(id)).collect();
    if kept.is_empty() {
        return Err(Error::Degenerate("every instance would be removed".into()));
    }
    artifacts::write_ids(&a.out, kept.iter().copied())?;
    if let Some(p) = &a.removed {
        artifacts::write_ids(p, removed.iter().copied())?;
    }
    say(
        out,
        format_args!("kept {} of {}, removed {}", kept.len(), table.len(), removed.len()),
    )
}

/// Noise mask aligned with `table`'s rows, from a truth file.
fn mask_for(table_ids: &[&str], truth: &Path) -> Result<Vec<bool>> {
    let rows = eval::read_truth(truth)?;
    let lookup: std::collections::HashMap<&str, bool> =
        rows.iter().map(|(id, _, m)| (id.as_str(), *m)).collect();
    table_ids
        .iter()
        .map(|id| {
            lookup
                .get(id)
                .copied()
                .ok_or_else(|| Error::NotFound(format!("{id} (in truth file)")))
        })
        .collect()
}

pub fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let classes = read_class_opt(a.classes.as_deref())?;
    let mut table: ScoreTable = artifacts::read_scores(&a.scores, classes.as_deref(), 0.0)?;
    let ids: Vec<&str> = table.entries().iter().map(|e| e.id.as_str()).collect();
    let mask = mask_for(&ids, &a.truth)?;
    let report = eval::detection_metrics(&table, &mask)?;
    if let Some(p) = &a.out {
        dataset::write_lines(p, report.to_key_values())?;
    }
    if let Some(ev) = &a.evidence {
        table = artifacts::attach_evidence(table, ev)?;
        if let Some(p) = &a.blame_out {
            eval::blame_matrix(&table)?.write_tsv(p)?;
        }
    }
    out.write_all(report.to_string().as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

pub fn cmd_explain(a: &ExplainArgs, out: &mut dyn Write) -> Result<()> {
    let table = artifacts::read_scores(&a.scores, None, 0.0)?;
    let table = artifacts::attach_evidence(table, &a.evidence)?;
    let ex = explain(&table, &a.id, a.top)?;
    out.write_all(ex.to_string().as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

pub fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = a.params.resolve()?;
    let report = match (&a.truth, &a.objective) {
        (Some(truth), None) => {
            let mut grid = SweepGrid::default();
            if let Some(v) = &a.ks {
                grid.ks = v.clone();
            }
            if let Some(v) = &a.alphas {
                grid.alphas = v.clone();
            }
            if let Some(v) = &a.blame_factors {
                grid.blame_factors = v.clone();
            }
            let ds = load_for(&cfg)?;
            let protos = select_prototypes_with(&ds, &cfg.prototype_options())?;
            let mask = mask_for(&ds.ids().iter().map(String::as_str).collect::<Vec<_>>(), truth)?;
            let mut objective = DetectionF1 {
                dataset: &ds,
                prototypes: &protos,
                base: cfg.params,
                mask: &mask,
            };
            sweep::sweep(&grid, &mut objective)?
        }
        (None, Some(path)) => {
            let mut table = ObjectiveTable::read(path)?;
            let grid = table.grid();
            sweep::sweep(&grid, &mut table)?
        }
        _ => {
            return Err(Error::InvalidParam(
                "sweep needs an objective source: --truth or --objective".into(),
            ))
        }
    };

    dataset::write_lines(&a.out, report.table_lines())?;
    if let Some(p) = &a.best_config {
        let mut best = cfg.clone();
        best.params = report.best.apply(&cfg.params);
        dataset::write_lines(p, best.to_key_values())?;
    }
    say(
        out,
        format_args!(
            "{} evaluations; best {} (objective {})",
            report.evaluations.len(),
            report.best,
            report.best_value
        ),
    )
}

pub fn cmd_synth(a: &SynthArgs, out: &mut dyn Write) -> Result<()> {
    let blobs = make_blobs(a.classes, a.per_class, a.dim, a.separation, a.seed)?;
    let transition = match a.transition.as_str() {
        "uniform" => Transition::Uniform,
        path => Transition::read(Path::new(path))?,
    };
    let spec = NoiseSpec {
        rate: a.noise_rate,
        transition,
        // Decorrelate the flip stream from the point stream.
        seed: a.seed.wrapping_add(0x9e37_79b9_7f4a_7c15),
    };
    let noisy = eval::inject_noise(&blobs.dataset, &spec)?;
    dataset::save_embeddings(&a.out_embeddings, &noisy.dataset)?;
    dataset::save_labels(&a.out_labels, &noisy.dataset)?;
    eval::write_truth(&a.out_truth, &noisy.dataset, &blobs.true_labels, &noisy.mask)?;
    let flipped = noisy.mask.iter().filter(|&&m| m).count();
    say(
        out,
        format_args!(
            "wrote {} instances ({} classes, dim {}), {} labels flipped",
            noisy.dataset.len(),
            a.classes,
            a.dim,
            flipped
        ),
    )
}
