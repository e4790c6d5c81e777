use std::f64::consts::TAU;
use std::sync::Arc;

use choreo::action::{Functional, LoopPath, SymmetryReduction};
use choreo::estimates::hiphop_square_action;
use choreo::gamma::{compare_to_limit, gamma_limit_minimizer};
use choreo::groups::rotation;
use choreo::homotopy::{ConeKind, ConeSpec, Geometry};
use choreo::minimize::*;
use choreo::{GroupTag, Vec3};

fn hiphop_config() -> MinimizeConfig {
    MinimizeConfig {
        nodes: 1024,
        init: InitMode::Circular,
        seed: 1,
        ..Default::default()
    }
}

fn hiphop(m0: f64, cfg: &MinimizeConfig) -> MinimizeResult {
    let cone = ConeSpec::italian(GroupTag::Z4, 1.0, TAU, m0).unwrap();
    let init = default_init(&cone, cfg, None).unwrap();
    minimize(&cone, cfg, &init).unwrap()
}

#[test]
fn hiphop_minimizer_beats_the_square() {
    let cone = ConeSpec::italian(GroupTag::Z4, 1.0, TAU, 0.0).unwrap();
    let r = hiphop(0.0, &hiphop_config());
    assert!(r.converged && r.homotopy_verified && r.collision_free());
    assert!(r.action() < hiphop_square_action(0.0, TAU) - 0.5);
    let zmax = r.path.nodes.iter().map(|x| x.z.abs()).fold(0.0, f64::max);
    assert!(zmax > 0.1, "planar minimizer");
    let v = verify_solution(&r, &cone);
    assert!(v.el_residual <= 1e-3, "{v:?}");
    assert!(v.energy_drift <= 1e-4, "{v:?}");
    assert_eq!(v.constraint_violation, 0.0);
}

#[test]
fn logged_actions_never_increase() {
    let r = hiphop(0.0, &hiphop_config());
    assert!(r.log.len() > 3);
    assert!(r.log.windows(2).all(|w| w[1].action <= w[0].action));
    assert!(r.log.iter().all(|l| l.min_gamma_distance > 0.0));
}

#[test]
fn runs_are_bitwise_deterministic() {
    let a = hiphop(0.0, &hiphop_config());
    let b = hiphop(0.0, &hiphop_config());
    assert_eq!(a.log.len(), b.log.len());
    for (x, y) in a.log.iter().zip(&b.log) {
        assert_eq!(x.action.to_bits(), y.action.to_bits());
        assert_eq!(x.gradient_norm.to_bits(), y.gradient_norm.to_bits());
    }
    assert_eq!(a.path, b.path);
}

#[test]
fn minimizer_is_equivariant_under_change_of_frame() {
    let cfg = MinimizeConfig {
        tol: 1e-10,
        ..hiphop_config()
    };
    let cone = ConeSpec::italian(GroupTag::Z4, 1.0, TAU, 0.0).unwrap();
    let q = rotation(Vec3::new(0.3, -0.5, 0.8).normalize(), 1.1);
    let moved = ConeSpec {
        geometry: Arc::new(Geometry::new(cone.group().conjugated(&q)).unwrap()),
        kind: ConeKind::Italian,
        ..cone.clone()
    };
    let init = default_init(&cone, &cfg, None).unwrap();
    let a = minimize(&cone, &cfg, &init).unwrap();
    let b = minimize(&moved, &cfg, &init.transformed(&q)).unwrap();
    assert!(a.converged && b.converged);
    assert!((a.action() - b.action()).abs() < 1e-10 * a.action());
    let d = a
        .path
        .nodes
        .iter()
        .zip(&b.path.nodes)
        .map(|(x, y)| (q * x - y).norm())
        .fold(0.0, f64::max);
    assert!(d < 1e-6, "{d}");
}

#[test]
fn gradient_matches_finite_differences() {
    let r = choreo::reference::reference().cycle("O_nu4").unwrap();
    let cone = ConeSpec::platonic_labels(r.group, &r.nu, Some(r.m), 1.3, TAU, 2.0).unwrap();
    let cfg = MinimizeConfig {
        nodes: 64,
        ..Default::default()
    };
    let path = default_init(&cone, &cfg, None).unwrap();
    let f = Functional::physical(&cone);
    let g = f.gradient(&path).unwrap();
    let h = 1e-6;
    for (j, k) in [(0, 0), (7, 1), (31, 2), (50, 0)] {
        let mut p = path.clone();
        let mut m = path.clone();
        p.nodes[j][k] += h;
        m.nodes[j][k] -= h;
        let fd = (f.evaluate(&p).unwrap().total - f.evaluate(&m).unwrap().total) / (2.0 * h);
        assert!((fd - g[j][k]).abs() < 1e-6 * (1.0 + g[j][k].abs()), "{j},{k}: {fd} vs {}", g[j][k]);
        // the accurate difference agrees with plain subtraction
        let d = f.difference(&m, &p).unwrap();
        assert!((d - 2.0 * h * fd).abs() < 1e-9);
    }
}

#[test]
fn symmetric_cones_stay_symmetric() {
    let r = choreo::reference::reference().cycle("O_nu4").unwrap();
    let cone = ConeSpec::platonic_labels(r.group, &r.nu, Some(r.m), 1.0, TAU, 1.0).unwrap();
    let cfg = MinimizeConfig {
        nodes: 512,
        ..Default::default()
    };
    let res = minimize(&cone, &cfg, &default_init(&cone, &cfg, None).unwrap()).unwrap();
    assert!(res.converged && res.homotopy_verified);
    let red = SymmetryReduction::for_cone(&cone).unwrap();
    assert!(red.violation(&res.path) < 1e-12);
    assert!(verify_solution(&res, &cone).el_residual < 1e-4);
}

#[test]
fn klein_continuation_approaches_the_circle() {
    let cone = ConeSpec::klein(1.0, TAU, 0.0).unwrap();
    let cfg = MinimizeConfig {
        init: InitMode::Circular,
        seed: 1,
        ..Default::default()
    };
    let c = continuation(&cone, &[0.0, 1.0, 10.0, 100.0, 1000.0], &cfg).unwrap();
    assert!(c.failure.is_none(), "{:?}", c.failure);
    let target = gamma_limit_minimizer(&cone).unwrap();
    assert!((target.radius - 1.0).abs() < 1e-12);
    let dist: Vec<f64> = c.stages.iter().map(|s| s.v_path.min_collision_distance(cone.group())).collect();
    assert!(dist[1..].windows(2).all(|w| w[1] < w[0]), "{dist:?}");
    let l2: Vec<f64> = c.stages[1..]
        .iter()
        .map(|s| compare_to_limit(&s.v_path, &target, Some(cone.group())).unwrap().l2_distance)
        .collect();
    assert!(l2.windows(2).all(|w| w[1] < w[0]), "{l2:?}");
    assert!(*l2.last().unwrap() < 0.02);
    let last = c.stages.last().unwrap();
    // the v-frame loop lies near the circle of radius 1 in the plane x1 = 0
    let off_plane = last.v_path.nodes.iter().map(|x| x.x.abs()).fold(0.0, f64::max);
    assert!(off_plane < 0.05);
}

#[test]
fn hiphop_grid_stages_converge() {
    let cone = ConeSpec::italian(GroupTag::Z4, 1.0, TAU, 0.0).unwrap();
    let c = continuation(&cone, &[0.0, 100.0], &hiphop_config()).unwrap();
    assert!(c.failure.is_none());
    for s in &c.stages {
        assert!(s.result.converged);
        assert!(s.result.action() < hiphop_square_action(s.result.m0, TAU));
    }
    let beta = 1.0 / 3.0;
    let s = &c.stages[1];
    assert_eq!(s.v_path, s.result.path.scaled(100f64.powf(-beta)));
}

#[test]
fn single_stage_grid_equals_direct_minimization() {
    let cfg = hiphop_config();
    let cone = ConeSpec::italian(GroupTag::Z4, 1.0, TAU, 3.0).unwrap();
    let c = continuation(&cone, &[3.0], &cfg).unwrap();
    let r = minimize(&cone, &cfg, &default_init(&cone, &cfg, None).unwrap()).unwrap();
    assert_eq!(c.stages.len(), 1);
    assert_eq!(c.stages[0].result.path, r.path);
}

#[test]
fn bad_inputs_are_config_errors() {
    let cone = ConeSpec::italian(GroupTag::Z4, 1.0, TAU, 0.0).unwrap();
    let cfg = hiphop_config();
    assert!(continuation(&cone, &[1.0, 0.5], &cfg).is_err());
    let bad = MinimizeConfig { nodes: 4, ..cfg.clone() };
    let init = LoopPath::sample(1024, TAU, |t| Vec3::new(t.cos(), t.sin(), 0.1 * (2.0 * t).sin()));
    assert!(minimize(&cone, &bad, &init).is_err());
    assert!(minimize_rescaled(&cone, -1.0, &cfg, &init).is_err());
}
