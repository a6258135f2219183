//! Rank, drop the flagged rows, and rank the remainder again. Between rounds
//! a real pipeline would retrain the embedding model on the kept subset.
//!
//! cargo run --release --example iterative_rounds

use noiserank::config::{RunConfig, RunManifest};
use noiserank::eval::{inject_noise, make_blobs, NoiseSpec, Transition};
use noiserank::{denoise, score_all, select_prototypes};

fn main() -> noiserank::Result<()> {
    let blobs = make_blobs(3, 300, 16, 7.0, 21)?;
    let noisy = inject_noise(
        &blobs.dataset,
        &NoiseSpec { rate: 0.25, transition: Transition::Uniform, seed: 22 },
    )?;
    let mut ds = noisy.dataset.l2_normalize()?;
    let mut cfg = RunConfig::default();
    cfg.params.k = 100;

    for round in 1..=3 {
        cfg.round = round;
        let flipped_left = ds
            .ids()
            .iter()
            .filter(|id| noisy.mask[noisy.dataset.index_of(id).unwrap()])
            .count();
        let protos = select_prototypes(&ds, cfg.seed, cfg.prototype_count)?;
        let table = score_all(&ds, &protos, &cfg.params)?;
        let (kept, removed) = denoise(&ds, &table)?;
        let caught = removed
            .iter()
            .filter(|id| noisy.mask[noisy.dataset.index_of(id).unwrap()])
            .count();
        println!(
            "round {round}: {} rows ({flipped_left} flipped), removed {} ({caught} flipped)",
            ds.len(),
            removed.len()
        );
        if removed.is_empty() {
            break;
        }
        ds = kept;
    }

    println!("\nmanifest of the last round:");
    for line in RunManifest::new(cfg).lines() {
        println!("  {line}");
    }
    Ok(())
}
