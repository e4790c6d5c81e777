//! Fixed-time arcs joining two points at the same distance from the
//! centre, one per admissible winding, and their actions against the
//! collision-ejection path.

use std::f64::consts::PI;

use choreo::arcs::{arc_count, marchal_check, ShootingOptions};

fn main() -> choreo::Result<()> {
    let opts = ShootingOptions::default();
    for (alpha, phi) in [(1.4, PI / 3.0), (1.4, 11.0 * PI / 9.0), (1.7, PI / 2.0)] {
        let count = arc_count(alpha, phi)?;
        let m = marchal_check(alpha, 1.0, phi, &opts)?;
        println!(
            "alpha {alpha}, phi {phi:.4}: windings {}..={} ({} arcs), collision action {:.6}",
            count.k_min, count.k_max, count.k_tot, m.collision_action
        );
        for a in &m.arcs {
            println!(
                "  k = {:>2}  action {:.6}  rmin {:.2e}  residual {:.1e}",
                a.k, a.action, a.min_radius, a.boundary_residual
            );
        }
        println!("  every arc below the collision path: {}", m.holds);
    }
    Ok(())
}
