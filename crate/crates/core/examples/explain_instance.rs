//! The evidence behind a flagged instance and a clean one.
//!
//! cargo run --example explain_instance

use noiserank::eval::{inject_noise, make_blobs, NoiseSpec, Transition};
use noiserank::{explain, score_all, select_prototypes, RankParams};

fn main() -> noiserank::Result<()> {
    let blobs = make_blobs(4, 150, 8, 6.0, 3)?;
    let noisy = inject_noise(
        &blobs.dataset,
        &NoiseSpec { rate: 0.15, transition: Transition::Uniform, seed: 4 },
    )?;
    let ds = noisy.dataset.l2_normalize()?;
    let protos = select_prototypes(&ds, 0, None)?;
    let table = score_all(&ds, &protos, &RankParams { k: 40, ..RankParams::default() })?;

    let ranked = table.ranked();
    let top = &ranked[0].id;
    let bottom = &ranked[ranked.len() - 1].id;
    for id in [top, bottom] {
        let i = ds.index_of(id).unwrap();
        println!(
            "true class {}, flipped: {}",
            ds.class_name(blobs.true_labels[i]),
            noisy.mask[i]
        );
        println!("{}", explain(&table, id, 6)?);
    }
    Ok(())
}
