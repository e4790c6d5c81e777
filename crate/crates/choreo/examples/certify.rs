//! Certificate that excludes total collisions for one cone, followed by the
//! direct comparison of test-loop action and collision bound over m0.

use std::f64::consts::TAU;

use choreo::estimates::{certify_no_total_collisions, platonic_collision_bound, test_loop_action_exact};
use choreo::homotopy::ConeSpec;
use choreo::reference::reference;

fn main() -> choreo::Result<()> {
    let id = std::env::args().nth(1).unwrap_or_else(|| "O_nu4".into());
    let row = reference().cycle(&id).expect("unknown cycle id");
    let cone = ConeSpec::platonic_labels(row.group, &row.nu, Some(row.m), row.alpha, TAU, 0.0)?;
    let cert = certify_no_total_collisions(&cone)?;
    let k = &cert.constants;
    println!("{id}: group {}, alpha {}, M = {}, k1 = {}, k2 = {}", row.group, row.alpha, k.m, k.k1, k.k2);
    println!("  potential  {:.4} < {:.4}: {}", cert.potential.lhs, cert.potential.rhs, cert.potential.holds);
    println!("  central    {:.4} < {:.4}: {}", cert.central.lhs, cert.central.rhs, cert.central.holds);
    println!("{:>8} {:>14} {:>14}", "m0", "test loop", "bound");
    for m0 in [0.0, 1.0, 10.0, 100.0, 1000.0] {
        let c = cone.with_m0(m0);
        let a = test_loop_action_exact(&c)?.value;
        let b = platonic_collision_bound(&c)?.value;
        println!("{m0:>8} {a:>14.4} {b:>14.4}");
    }
    Ok(())
}
