//! Polyhedron constants and no-collision certificates for every listed
//! vertex cycle, side by side with the shipped reference values.

use choreo::estimates::{certify_no_total_collisions, polyhedron_constants};
use choreo::homotopy::{ConeSpec, Geometry};
use choreo::reference::reference;
use choreo::GroupTag;

fn main() -> choreo::Result<()> {
    println!("{:>3} {:>10} {:>10} {:>10} {:>9} {:>9} {:>9}", "", "zeta0", "zeta1", "zeta2", "delta1", "delta2", "8/(4-l2)");
    for tag in [GroupTag::T, GroupTag::O, GroupTag::I] {
        let c = polyhedron_constants(&Geometry::builtin(tag))?;
        println!(
            "{:>3} {:>10.5} {:>10.5} {:>10.5} {:>9.5} {:>9.5} {:>9.5}",
            tag.to_string(),
            c.zeta0,
            c.zeta1,
            c.zeta2,
            c.delta1,
            c.delta2,
            c.ell_ratio
        );
    }
    println!();
    let r = reference();
    for row in &r.table2 {
        let cone = ConeSpec::platonic_labels(row.group, &row.nu, Some(row.m), row.alpha, 1.0, 0.0)?;
        let cert = certify_no_total_collisions(&cone)?;
        let want = r.table3.get(&row.id).or(r.table4.get(&row.id)).unwrap();
        let cols: Vec<String> = cert
            .columns()
            .iter()
            .zip(want)
            .map(|(g, w)| {
                let mark = if (g / w - 1.0).abs() < 1e-3 { ' ' } else { '*' };
                format!("{g:>10.4}{mark}")
            })
            .collect();
        println!(
            "{:>6} alpha {:.1} {} {}",
            row.id,
            row.alpha,
            cols.join(""),
            if cert.pass { "PASS" } else { "FAIL" }
        );
    }
    println!("\n* differs from the reference row by more than 1e-3");
    Ok(())
}
