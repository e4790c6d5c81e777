//! Hip-hop orbit: minimize from a perturbed circle at m0 = 0 and compare
//! with the rotating square, then continue in m0.

use std::f64::consts::TAU;

use choreo::estimates::{hiphop_collision_bound, hiphop_square_action};
use choreo::homotopy::ConeSpec;
use choreo::minimize::{continuation, default_init, minimize, verify_solution, InitMode, MinimizeConfig};
use choreo::GroupTag;

fn main() -> choreo::Result<()> {
    let cone = ConeSpec::italian(GroupTag::Z4, 1.0, TAU, 0.0)?;
    let cfg = MinimizeConfig {
        init: InitMode::Circular,
        seed: 1,
        ..Default::default()
    };
    let r = minimize(&cone, &cfg, &default_init(&cone, &cfg, None)?)?;
    let v = verify_solution(&r, &cone);
    let zmax = r.path.nodes.iter().map(|x| x.z.abs()).fold(0.0, f64::max);
    println!("m0 = 0: action {:.6} after {} iterations", r.action(), r.iterations);
    println!("  square {:.6}, height {zmax:.4}, energy drift {:.1e}", hiphop_square_action(0.0, TAU), v.energy_drift);

    let c = continuation(&cone, &[0.0, 1.0, 10.0, 100.0], &cfg)?;
    println!("{:>6} {:>12} {:>12} {:>12}", "m0", "action", "square", "bound");
    for s in &c.stages {
        let m0 = s.result.m0;
        println!(
            "{m0:>6} {:>12.4} {:>12.4} {:>12.4}",
            s.result.action(),
            hiphop_square_action(m0, TAU),
            hiphop_collision_bound(m0, TAU).value
        );
    }
    let mut out = std::fs::File::create("hiphop.csv")?;
    r.path.write_csv(&mut out)?;
    println!("trajectory written to hiphop.csv");
    Ok(())
}
