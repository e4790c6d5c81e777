//! Search vertex labels of the Archimedean polyhedra that realize the
//! reference cycles, and write them as numbering files.
//!
//! ```text
//! cargo run --release --example infer_numbering -- crates/choreo/data/numbering
//! ```

use std::error::Error;
use std::path::PathBuf;

use choreo::homotopy::{infer_numbering, Geometry, LabelledCycle};
use choreo::reference::reference;
use choreo::GroupTag;

fn main() -> Result<(), Box<dyn Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    for tag in [GroupTag::T, GroupTag::O, GroupTag::I] {
        let geo = Geometry::builtin(tag);
        let poly = geo.poly()?;
        let cycles: Vec<LabelledCycle> = reference()
            .cycles(tag)
            .map(|r| {
                let mut labels = r.nu.clone();
                labels.pop();
                LabelledCycle {
                    labels,
                    m: r.m,
                    k1: r.k1,
                }
            })
            .collect();
        let t = std::time::Instant::now();
        let numbering =
            infer_numbering(&geo.group, poly, &cycles).ok_or("no consistent numbering")?;
        println!(
            "{tag}: {} vertices labelled in {:.2?}",
            numbering.labels.len(),
            t.elapsed()
        );
        std::fs::write(
            out.join(format!("{tag}.toml")),
            numbering.to_toml(poly, tag),
        )?;
    }
    Ok(())
}
