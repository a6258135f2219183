//! Round trip through the on-disk formats: binary embeddings, label TSV,
//! score table, evidence ledger and id lists.
//!
//! cargo run --example file_formats

use noiserank::artifacts::{attach_evidence, read_ids, read_scores, write_evidence, write_ids, write_scores};
use noiserank::dataset::{save_embeddings, save_labels};
use noiserank::eval::{inject_noise, make_blobs, NoiseSpec, Transition};
use noiserank::{denoise, load_dataset, score_all, select_prototypes, RankParams};

fn main() -> noiserank::Result<()> {
    let dir = std::env::temp_dir().join(format!("noiserank-formats-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| noiserank::Error::Io { path: dir.clone(), source: e })?;

    let blobs = make_blobs(2, 60, 5, 6.0, 10)?;
    let noisy = inject_noise(
        &blobs.dataset,
        &NoiseSpec { rate: 0.1, transition: Transition::Uniform, seed: 11 },
    )?;
    let (emb, labels) = (dir.join("train.nrk"), dir.join("train.tsv"));
    save_embeddings(&emb, &noisy.dataset)?;
    save_labels(&labels, &noisy.dataset)?;

    let ds = load_dataset(&emb, &labels)?.l2_normalize()?;
    let protos = select_prototypes(&ds, 0, None)?;
    let table = score_all(&ds, &protos, &RankParams { k: 15, ..RankParams::default() })?;

    let (scores, evidence) = (dir.join("scores.tsv"), dir.join("evidence.tsv"));
    write_scores(&scores, &table)?;
    write_evidence(&evidence, &table)?;

    let reread = attach_evidence(read_scores(&scores, Some(ds.class_names()), 0.0)?, &evidence)?;
    println!("score table reread: {} rows, ranks agree: {}", reread.len(), reread.ranked()[0].id == table.ranked()[0].id);

    let (kept, removed) = denoise(&ds, &table)?;
    let removed_path = dir.join("removed.txt");
    write_ids(&removed_path, removed.iter().map(String::as_str))?;
    println!("kept {} of {}; removed ids: {:?}", kept.len(), ds.len(), read_ids(&removed_path)?);

    for f in ["scores.tsv", "evidence.tsv"] {
        let text = std::fs::read_to_string(dir.join(f)).unwrap_or_default();
        println!("\n{f} (first lines):");
        for line in text.lines().take(3) {
            println!("  {line}");
        }
    }
    println!("\nfiles in {}", dir.display());
    Ok(())
}
