//! Per-class prototypes: how many are picked and where they sit.
//!
//! cargo run --example prototype_selection

use noiserank::eval::make_blobs;
use noiserank::prototypes::{prototype_count, select_prototypes_with, PrototypeOptions, PrototypePolicy};

fn main() -> noiserank::Result<()> {
    for rho in [10.0, 100.0, 3069.0, 50_000.0] {
        println!("{rho:>8} instances per class -> {} prototypes per class", prototype_count(rho));
    }

    let ds = make_blobs(3, 200, 4, 6.0, 5)?.dataset;
    for policy in [PrototypePolicy::KMeans, PrototypePolicy::Random] {
        let opts = PrototypeOptions { seed: 42, count_override: None, policy };
        let protos = select_prototypes_with(&ds, &opts)?;
        println!("\n{policy}: {} prototypes", protos.len());
        for (c, members) in protos.per_class().iter().enumerate() {
            let ids: Vec<&str> = members.iter().map(|&i| ds.id(i)).collect();
            println!("  {}: {}", ds.class_name(c), ids.join(" "));
        }
    }
    Ok(())
}
