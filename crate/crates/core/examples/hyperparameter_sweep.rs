//! Two-stage search over k, then (alpha, blame_factor), against known noise
//! and against an externally measured loss table.
//!
//! cargo run --release --example hyperparameter_sweep

use noiserank::eval::{inject_noise, make_blobs, NoiseSpec, Transition};
use noiserank::sweep::{sweep, DetectionF1, ObjectiveTable, SweepGrid, SweepPoint};
use noiserank::{select_prototypes, RankParams};

fn main() -> noiserank::Result<()> {
    let blobs = make_blobs(3, 250, 16, 8.0, 7)?;
    let noisy = inject_noise(
        &blobs.dataset,
        &NoiseSpec { rate: 0.2, transition: Transition::Uniform, seed: 8 },
    )?;
    let ds = noisy.dataset.l2_normalize()?;
    let protos = select_prototypes(&ds, 0, None)?;

    let mut f1 = DetectionF1 {
        dataset: &ds,
        prototypes: &protos,
        base: RankParams::default(),
        mask: &noisy.mask,
    };
    let report = sweep(&SweepGrid::default(), &mut f1)?;
    println!("stage\tk\talpha\tblame_factor\tF1");
    for line in report.table_lines() {
        println!("{line}");
    }
    println!("best: {} (F1 {:.4})\n", report.best, report.best_value);

    // A loss per configuration, e.g. from a downstream training run.
    let mut losses = ObjectiveTable {
        entries: [(10, 0.5, 1.0, 0.9), (50, 0.5, 1.0, 0.7), (50, 0.8, 1.5, 0.6), (50, 0.6, 2.0, 0.65)]
            .into_iter()
            .map(|(k, alpha, blame_factor, loss)| (SweepPoint { k, alpha, blame_factor }, loss))
            .collect(),
    };
    let grid = losses.grid();
    let report = sweep(&grid, &mut losses)?;
    println!("lowest loss: {} ({})", report.best, report.best_value);
    Ok(())
}
