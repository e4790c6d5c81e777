//! Builtin symmetry groups: order, poles by order, and the tessellation of
//! the sphere by their reflection groups.

use std::collections::BTreeMap;

use choreo::homotopy::Geometry;
use choreo::{builtin_group, GroupTag};

fn main() {
    let tags = [GroupTag::Z4, GroupTag::Klein, GroupTag::Z2N(5), GroupTag::T, GroupTag::O, GroupTag::I];
    for tag in tags {
        let g = builtin_group(tag);
        let mut census = BTreeMap::new();
        for p in g.poles() {
            *census.entry(p.order).or_insert(0) += 1;
        }
        let census: Vec<String> = census.iter().map(|(o, n)| format!("{n}x{o}")).collect();
        let tess = match Geometry::builtin(tag).tess() {
            Ok(t) => t.len().to_string(),
            Err(_) => "-".into(),
        };
        println!(
            "{:>6}: order {:>2}, poles [{}], triangles {tess}",
            tag.to_string(),
            g.order(),
            census.join(" ")
        );
    }
}
