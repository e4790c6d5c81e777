//! Initial loops for the minimizer.

use std::f64::consts::TAU;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::{Functional, LoopPath, SymmetryReduction};
use crate::error::{Error, Result};
use crate::groups::Vec3;
use crate::homotopy::{vertex_points, ConeKind, ConeSpec};

/// Rescale by the λ minimizing λ²K + λ^{−α}U.
pub fn optimal_rescale(path: &LoopPath, f: &Functional) -> Result<LoopPath> {
    let b = f.evaluate(path)?;
    let u = b.central + b.mutual;
    if b.kinetic <= 0.0 || u <= 0.0 {
        return Ok(path.clone());
    }
    let lambda = (f.alpha * u / (2.0 * b.kinetic)).powf(1.0 / (2.0 + f.alpha));
    Ok(path.scaled(lambda))
}

/// Constant-speed loop along the polyhedron edges of `nu`, sampled at `n` uniform times.
pub fn polyline_loop(points: &[Vec3], n: usize, period: f64) -> LoopPath {
    let k = points.len();
    LoopPath::sample(n, period, |t| {
        let s = t / period * k as f64;
        let e = (s.floor() as usize).min(k - 1);
        let f = s - e as f64;
        points[e] * (1.0 - f) + points[(e + 1) % k] * f
    })
}

fn smooth(path: &LoopPath) -> LoopPath {
    let n = path.len();
    let x = &path.nodes;
    let nodes = (0..n)
        .map(|j| x[(j + n - 1) % n] * 0.25 + x[j] * 0.5 + x[(j + 1) % n] * 0.25)
        .collect();
    LoopPath::new(nodes, path.period)
}

/// Smoothed test loop for Platonic cones, perturbed circles otherwise.
pub fn initial_loop(cone: &ConeSpec, n: usize, seed: u64, f: &Functional) -> Result<LoopPath> {
    let t = cone.period;
    let w = TAU / t;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let path = match &cone.kind {
        ConeKind::Platonic { nu, .. } => {
            let pts = vertex_points(nu, cone.geometry.poly()?);
            smooth(&smooth(&polyline_loop(&pts, n, t)))
        }
        ConeKind::Italian => {
            let a = cone.group().axes()[0];
            let e1 = if a.x.abs() < 0.9 {
                Vec3::x()
            } else {
                Vec3::y()
            };
            let e1 = (e1 - a * a.dot(&e1)).normalize();
            let e2 = a.cross(&e1);
            let phases: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..TAU)).collect();
            let amps = [
                1.0,
                rng.random_range(-0.3..0.3),
                rng.random_range(-0.3..0.3),
            ];
            let pert = |s: f64| -> f64 {
                (0..3)
                    .map(|i| amps[i] * ((2 * i + 1) as f64 * w * s + phases[i]).cos())
                    .sum()
            };
            let peak = (0..n)
                .map(|j| pert(j as f64 * t / n as f64).abs())
                .fold(0.0, f64::max);
            LoopPath::sample(n, t, |s| {
                e1 * (w * s).cos() + e2 * (w * s).sin() + a * (0.1 * pert(s) / peak)
            })
        }
        ConeKind::Klein => {
            let amps = [
                1.0,
                rng.random_range(-0.3..0.3),
                rng.random_range(-0.3..0.3),
            ];
            let pert = |s: f64| -> f64 {
                (0..3)
                    .map(|i| amps[i] * (2.0 * (i + 1) as f64 * w * s).cos())
                    .sum()
            };
            let peak = (0..n)
                .map(|j| pert(j as f64 * t / n as f64).abs())
                .fold(0.0, f64::max);
            LoopPath::sample(n, t, |s| {
                Vec3::new(0.1 * pert(s) / peak, (w * s).cos(), (w * s).sin())
            })
        }
    };
    let path = match SymmetryReduction::for_cone(cone) {
        Some(r) => r.apply(&path)?,
        None => path,
    };
    if path.len() != n {
        return Err(Error::Invalid("initial loop has the wrong size".into()));
    }
    optimal_rescale(&path, f)
}
