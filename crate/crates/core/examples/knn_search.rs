//! Exact nearest neighbors and the inverse-power kernel weights used for
//! voting.
//!
//! cargo run --example knn_search

use noiserank::neighbors::{kernel, knn, KernelParams};
use noiserank::ranking::predict_label;
use noiserank::{EmbeddingDataset, RankParams};

fn main() -> noiserank::Result<()> {
    let points = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (5.0, 5.0), (5.5, 5.0), (0.5, 0.5)];
    let ds = EmbeddingDataset::new(
        ["p0", "p1", "p2", "p3", "p4", "q"].iter().map(|s| s.to_string()).collect(),
        2,
        points.iter().flat_map(|&(x, y)| [x as f32, y as f32]).collect(),
        vec![0, 0, 0, 1, 1, 1],
        vec!["left".into(), "right".into()],
    )?;

    let kp = KernelParams { b: 1.0, e: 1.0 };
    let q = ds.index_of("q").unwrap();
    let lists = knn(&ds, &[q], 4)?;
    println!("4 nearest neighbors of q:");
    for n in lists[0].iter() {
        println!(
            "  {}  label {:<5}  distance {:.4}  weight {:.4}",
            ds.id(n.index),
            ds.class_name(ds.label(n.index)),
            n.distance,
            kernel(n.distance, &kp)
        );
    }

    let pred = predict_label(&ds, q, &lists[0], &RankParams { k: 4, ..RankParams::default() })?;
    println!(
        "weighted vote: {:?} -> predicted {} (given {})",
        pred.votes,
        ds.class_name(pred.predicted),
        ds.class_name(ds.label(q))
    );
    Ok(())
}
