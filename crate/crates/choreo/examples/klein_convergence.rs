//! Minimizers of the rescaled action in the Klein cone as ε → 0 approach
//! the circle in the plane x1 = 0.

use std::f64::consts::TAU;

use choreo::gamma::convergence_study;
use choreo::homotopy::ConeSpec;
use choreo::minimize::{InitMode, MinimizeConfig};

fn main() -> choreo::Result<()> {
    let cone = ConeSpec::klein(1.0, TAU, 1.0)?;
    let cfg = MinimizeConfig {
        init: InitMode::Circular,
        seed: 1,
        ..Default::default()
    };
    let rec = convergence_study(&cone, &[1.0, 0.3, 0.1, 0.03, 0.01, 0.001], &cfg)?;
    println!("limit action {:.6}", rec.gamma_action);
    println!("{:>8} {:>12} {:>10} {:>10}", "eps", "action", "L2", "arc fit");
    for e in &rec.entries {
        println!("{:>8} {:>12.6} {:>10.2e} {:>10.2e}", e.epsilon, e.action, e.l2_distance, e.arc_fit_residual);
    }
    if let Some(f) = rec.failure {
        println!("stopped: {f}");
    }
    Ok(())
}
