//! Structured noise (every flip goes from class 0 to class 1) and the
//! class-by-class evidence matrix that exposes it.
//!
//! cargo run --release --example blame_matrix

use noiserank::eval::{
    blame_matrix, empirical_transition, inject_noise, make_blobs, spearman, NoiseSpec, Transition,
};
use noiserank::{score_all, select_prototypes, RankParams};

fn print_matrix(title: &str, names: &[String], cells: &[Vec<f64>]) {
    println!("{title}");
    println!("  proto\\given {}", names.iter().map(|n| format!("{n:>8}")).collect::<String>());
    for (name, row) in names.iter().zip(cells) {
        println!("  {name:<11} {}", row.iter().map(|v| format!("{v:>8.3}")).collect::<String>());
    }
}

fn main() -> noiserank::Result<()> {
    let blobs = make_blobs(3, 334, 16, 8.0, 0)?;
    let noisy = inject_noise(
        &blobs.dataset,
        &NoiseSpec { rate: 0.3, transition: Transition::single(3, 0, 1), seed: 7 },
    )?;
    let ds = noisy.dataset.l2_normalize()?;
    let protos = select_prototypes(&ds, 0, None)?;
    let table = score_all(&ds, &protos, &RankParams { k: 50, ..RankParams::default() })?;

    let m = blame_matrix(&table)?;
    let truth = empirical_transition(ds.labels(), &blobs.true_labels, 3);
    print_matrix("evidence matrix (column-normalized):", &m.class_names, &m.cells);
    print_matrix("\ntrue class given the noisy label:", &m.class_names, &truth);

    let flat = |x: &Vec<Vec<f64>>| x.iter().flatten().copied().collect::<Vec<_>>();
    if let Some(rho) = spearman(&flat(&m.cells), &flat(&truth)) {
        println!("\nSpearman correlation: {rho:.3}");
    }
    Ok(())
}
