//! Homotopy classes given by vertex cycles on Archimedean polyhedra:
//! edge counts, extra symmetry, triangle sequences and minimal total angle.

use choreo::homotopy::{max_extra_symmetry, min_total_angle, ConeSpec};
use choreo::reference::reference;

fn main() -> choreo::Result<()> {
    println!("{:>6} {:>3} {:>3} {:>3} {:>5} {:>7} {:>6} {:>10}", "id", "M", "k1", "k2", "tri", "simple", "tied", "angle");
    for row in &reference().table2 {
        let cone = ConeSpec::platonic_labels(row.group, &row.nu, Some(row.m), row.alpha, 1.0, 1.0)?;
        let tess = cone.geometry.tess()?;
        let (m, _) = max_extra_symmetry(cone.nu().unwrap(), cone.group());
        let counts = cone.counts()?;
        let seq = cone.triangles()?;
        let angle = min_total_angle(&cone)?;
        println!(
            "{:>6} {:>3} {:>3} {:>3} {:>5} {:>7} {:>6} {:>10.5}",
            row.id,
            m,
            counts.k1,
            counts.k2,
            seq.len(),
            seq.is_alpha_simple(tess, cone.group(), row.alpha),
            seq.is_tied_to_two_coboundary_axes(tess, cone.group()),
            angle.total
        );
    }
    Ok(())
}
