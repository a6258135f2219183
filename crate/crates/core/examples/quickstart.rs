//! Generate blobs with 20% flipped labels, rank them, and measure how many
//! flips land at the top of the list.
//!
//! cargo run --example quickstart

use noiserank::eval::{detection_metrics, inject_noise, make_blobs, NoiseSpec, Transition};
use noiserank::{score_all, select_prototypes, RankParams};

fn main() -> noiserank::Result<()> {
    let blobs = make_blobs(3, 300, 16, 8.0, 1)?;
    let noisy = inject_noise(
        &blobs.dataset,
        &NoiseSpec { rate: 0.2, transition: Transition::Uniform, seed: 2 },
    )?;
    let ds = noisy.dataset.l2_normalize()?;

    let protos = select_prototypes(&ds, 0, None)?;
    let params = RankParams { k: 100, ..RankParams::default() };
    let table = score_all(&ds, &protos, &params)?;

    println!("{} instances, {} prototypes", ds.len(), protos.len());
    println!("top of the ranking:");
    for e in table.ranked().into_iter().take(8) {
        let flipped = noisy.mask[ds.index_of(&e.id).unwrap()];
        println!("  #{:<3} {}  score {:+.4}  flipped: {flipped}", e.rank, e.id, e.score);
    }
    print!("{}", detection_metrics(&table, &noisy.mask)?);
    Ok(())
}
