//! Octahedral cone: continuation in m0 and distance of the rescaled loops
//! to the circular-arc limit loop.

use std::f64::consts::TAU;

use choreo::gamma::{compare_to_limit, gamma_limit_minimizer};
use choreo::homotopy::ConeSpec;
use choreo::minimize::{continuation, MinimizeConfig};
use choreo::reference::reference;

fn main() -> choreo::Result<()> {
    let row = reference().cycle("O_nu4").unwrap();
    let cone = ConeSpec::platonic_labels(row.group, &row.nu, Some(row.m), 1.0, TAU, 0.0)?;
    let limit = gamma_limit_minimizer(&cone)?;
    println!(
        "limit loop: {} arcs, total angle {:.6}, radius {:.6}, action {:.6}",
        limit.arcs.len(),
        limit.total_angle(),
        limit.radius,
        limit.action_quadrature()?
    );
    let c = continuation(&cone, &[0.0, 10.0, 100.0, 1000.0], &MinimizeConfig::default())?;
    println!("{:>6} {:>12} {:>7} {:>10} {:>10}", "m0", "action", "nodes", "L2", "arc fit");
    for s in &c.stages {
        let cmp = compare_to_limit(&s.v_path, &limit, Some(cone.group()))?;
        println!(
            "{:>6} {:>12.4} {:>7} {:>10.2e} {:>10.2e}",
            s.result.m0,
            s.result.action(),
            s.result.path.len(),
            cmp.l2_distance,
            cmp.fit.residual
        );
    }
    if let Some(f) = c.failure {
        println!("stopped: {f}");
    }
    Ok(())
}
