//! Post-hoc checks of discrete solutions.

use serde::Serialize;

use crate::action::{Functional, LoopPath, SymmetryReduction};

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    /// max_j |Δ²x_j/h² − ∇V(x_j)| / max_j |∇V(x_j)|
    pub el_residual: f64,
    /// Spread of |ẋ|²/2 − V over the steps, relative to the energy scale.
    pub energy_drift: f64,
    pub constraint_violation: f64,
}

pub fn verify_loop(
    path: &LoopPath,
    f: &Functional,
    reduction: Option<&SymmetryReduction>,
) -> VerificationReport {
    let n = path.len();
    let h = path.step();
    let x = &path.nodes;
    let mut res: f64 = 0.0;
    let mut force: f64 = 0.0;
    for j in 0..n {
        let acc = (x[(j + 1) % n] - x[j] * 2.0 + x[(j + n - 1) % n]) / (h * h);
        let gv = f.potential_gradient(&x[j]);
        res = res.max((acc - gv).norm());
        force = force.max(gv.norm());
    }
    let v = |y| f.potential(y).map_or(f64::INFINITY, |(c, m)| c + m);
    let pot: Vec<f64> = x.iter().map(v).collect();
    let mut e = Vec::with_capacity(n);
    let mut kin = 0.0;
    for j in 0..n {
        let k = path.velocity(j).norm_squared() / 2.0;
        kin += k / n as f64;
        e.push(k - 0.5 * (pot[j] + pot[(j + 1) % n]));
    }
    let mean = e.iter().sum::<f64>() / n as f64;
    let (lo, hi) = e
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    VerificationReport {
        el_residual: res / force.max(1e-300),
        energy_drift: (hi - lo) / mean.abs().max(kin),
        constraint_violation: reduction.map_or(0.0, |r| r.violation(path)),
    }
}
