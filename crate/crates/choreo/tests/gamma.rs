use std::f64::consts::{PI, TAU};

use choreo::action::{rescaled_action_eps, LoopPath};
use choreo::gamma::*;
use choreo::homotopy::ConeSpec;
use choreo::minimize::{InitMode, MinimizeConfig};
use choreo::quadrature::integrate;
use choreo::{GroupTag, Vec3};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// Golden-section minimum of T(ρ²ω²/2 + ρ^{−α}) over the radius.
fn circular_orbit_oracle(dtheta: f64, period: f64, alpha: f64) -> f64 {
    let w = dtheta / period;
    let f = |r: f64| period * (0.5 * r * r * w * w + r.powf(-alpha));
    let (mut a, mut b) = (1e-4, 1e4);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..400 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b))
}

fn o_nu4() -> ConeSpec {
    let r = choreo::reference::reference().cycle("O_nu4").unwrap();
    ConeSpec::platonic_labels(r.group, &r.nu, Some(r.m), 1.0, TAU, 0.0).unwrap()
}

#[test]
fn closed_form_matches_circular_orbit_oracle() {
    for (dt, t, a) in [(TAU, TAU, 1.0), (4.9, 1.0, 1.0), (3.0, 2.5, 1.4), (12.0, 0.7, 1.9)] {
        let c = gamma_limit_action_alpha(dt, t, a).unwrap();
        assert!(rel(c, circular_orbit_oracle(dt, t, a)) < 1e-12, "{dt} {t} {a}");
    }
    assert!(rel(gamma_limit_action(TAU, TAU).unwrap(), 3.0 * PI) < 1e-14);
    assert!(gamma_limit_action(0.0, 1.0).is_err());
}

#[test]
fn klein_limit_is_the_circle_in_the_first_coordinate_plane() {
    for t in [1.0, TAU, 10.0] {
        let l = gamma_limit_minimizer(&ConeSpec::klein(1.0, t, 0.0).unwrap()).unwrap();
        assert!(rel(l.total_angle(), TAU) < 1e-12);
        assert!(rel(l.radius, (t / TAU).powf(2.0 / 3.0)) < 1e-12);
        let p = l.sample(64);
        assert!(p.nodes.iter().all(|x| x.x.abs() < 1e-12 && rel(x.norm(), l.radius) < 1e-12));
        assert!(l.flags.elliptic_degenerate && !l.flags.non_unique && l.flags.angle_condition);
        assert!(l.kepler_residual() < 1e-14);
    }
}

#[test]
fn italian_limit_is_not_unique() {
    let l = gamma_limit_minimizer(&ConeSpec::italian(GroupTag::Z4, 1.0, TAU, 0.0).unwrap()).unwrap();
    assert!(l.flags.non_unique);
    assert!(rel(l.total_angle(), TAU) < 1e-12);
}

#[test]
fn quadrature_agrees_with_closed_form_and_discrete_action() {
    for cone in [ConeSpec::klein(1.0, TAU, 0.0).unwrap(), o_nu4()] {
        let l = gamma_limit_minimizer(&cone).unwrap();
        let exact = gamma_limit_action(l.total_angle(), cone.period).unwrap();
        assert!(rel(l.action_quadrature().unwrap(), exact) < 1e-6);
        let disc = rescaled_action_eps(&l.sample(2048), &cone, 0.0).unwrap().total;
        assert!(rel(disc, exact) < 1e-3, "{disc} vs {exact}");
        assert!(l.kepler_residual() < 1e-12);
        let bc = l.natural_bc();
        assert!(bc.max_relative() < 1e-10);
    }
    let l = gamma_limit_minimizer(&o_nu4()).unwrap();
    assert!(l.flags.angle_condition && !l.flags.elliptic_degenerate);
}

#[test]
fn conjectural_flag_for_alpha_above_one() {
    let l = gamma_limit_minimizer(&ConeSpec::klein(1.5, TAU, 0.0).unwrap()).unwrap();
    assert!(l.flags.conjectural);
    let q = l.action_quadrature().unwrap();
    assert!(rel(q, gamma_limit_action_alpha(TAU, TAU, 1.5).unwrap()) < 1e-6);
}

/// Klein circle traversed with quarter durations (a, b, a, b)·T.
fn uneven_klein(n: usize, a: f64) -> (LoopPath, Vec<Vec3>) {
    let l = gamma_limit_minimizer(&ConeSpec::klein(1.0, TAU, 0.0).unwrap()).unwrap();
    let b = 0.5 - a;
    let ends = [0.0, a, 0.5, 0.5 + a, 1.0];
    let path = LoopPath::sample(n, TAU, |t| {
        let s = t / TAU;
        let i = ends.partition_point(|&e| e <= s).clamp(1, 4) - 1;
        let frac = (s - ends[i]) / if i % 2 == 0 { a } else { b };
        l.position((i as f64 + frac) * TAU / 4.0)
    });
    (path, l.semi_axes.clone())
}

#[test]
fn discrete_natural_bc_check() {
    let (even, axes) = uneven_klein(4096, 0.25);
    let r = natural_bc_check(&even, &axes, &NaturalBcOptions::default()).unwrap();
    assert_eq!(r.passages.len(), 4);
    assert!(r.max_relative() < 1e-4, "{}", r.max_relative());
    let (uneven, _) = uneven_klein(4096, 0.3);
    let r = natural_bc_check(&uneven, &axes, &NaturalBcOptions::default()).unwrap();
    // speeds 1/(4·0.3) and 1/(4·0.2) of the even speed
    assert!(r.max_relative() > 0.3, "{}", r.max_relative());
}

#[test]
fn arc_fit_separates_circles_from_ellipses() {
    let (circle, _) = uneven_klein(1024, 0.25);
    let passages = [0, 256, 512, 768];
    assert!(circular_arc_fit(&circle, &passages).unwrap().residual < 1e-12);
    let b = (1.0 - 0.3f64 * 0.3).sqrt();
    let ellipse = LoopPath::new(
        circle.nodes.iter().map(|x| Vec3::new(x.x, x.y, b * x.z)).collect(),
        TAU,
    );
    assert!(circular_arc_fit(&ellipse, &passages).unwrap().residual > 0.01);
}

#[test]
fn alignment_recovers_shift_and_element() {
    let cone = o_nu4();
    let l = gamma_limit_minimizer(&cone).unwrap();
    let p = l.sample(1024);
    let g = cone.group();
    let e = 5;
    let moved = LoopPath::new((0..1024).map(|j| g.elements[e] * p.nodes[(j + 100) % 1024]).collect(), TAU);
    let a = aligned_distance(&p, &moved, Some(g)).unwrap();
    assert!(a.distance < 1e-12);
    let c = compare_to_limit(&moved, &l, Some(g)).unwrap();
    assert!(c.l2_distance < 1e-12 && c.fit.residual < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn limit_action_bounds_deformed_arc_loops(amp in -0.4f64..0.4, k in 1usize..5, phase in 0.0f64..TAU, b in -0.8f64..0.8) {
        let l = gamma_limit_minimizer(&o_nu4()).unwrap();
        let t = l.period;
        let w = TAU / t;
        // radial modulation and a monotone time change
        let f = |s: f64| 1.0 + amp * (k as f64 * w * s + phase).sin();
        let df = |s: f64| amp * k as f64 * w * (k as f64 * w * s + phase).cos();
        let sigma = |s: f64| s + b / w * (w * s).sin();
        let dsigma = |s: f64| 1.0 + b * (w * s).cos();
        let lag = |s: f64| {
            let x = l.position(sigma(s)) * f(s);
            let v = l.position(sigma(s)) * df(s) + l.velocity(sigma(s)) * (f(s) * dsigma(s));
            0.5 * v.norm_squared() + x.norm().powf(-l.alpha)
        };
        let knots: Vec<f64> = (0..=64).map(|i| i as f64 * t / 64.0).collect();
        let a: f64 = knots.windows(2).map(|w| integrate(lag, w[0], w[1], 1e-11).unwrap()).sum();
        let g = gamma_limit_action(l.total_angle(), t).unwrap();
        prop_assert!(a >= g * (1.0 - 1e-9), "{a} < {g}");
    }
}

#[test]
fn klein_epsilon_minimizers_converge() {
    let cone = ConeSpec::klein(1.0, TAU, 1.0).unwrap();
    let cfg = MinimizeConfig {
        init: InitMode::Circular,
        seed: 1,
        ..Default::default()
    };
    let rec = convergence_study(&cone, &[1.0, 0.1, 0.01, 0.001], &cfg).unwrap();
    assert!(rec.failure.is_none());
    assert!(rel(rec.gamma_action, 3.0 * PI) < 1e-14);
    let e = &rec.entries;
    assert!(e.windows(2).all(|w| w[1].action < w[0].action && w[1].l2_distance < w[0].l2_distance));
    assert!(e.iter().all(|x| x.action > rec.gamma_action));
    assert!(rel(e[3].action, rec.gamma_action) < 0.01);
    assert!(e[3].arc_fit_residual < 0.01);
    let target = gamma_limit_minimizer(&cone).unwrap();
    let bc = natural_bc_check(rec.loops.last().unwrap(), &target.semi_axes, &NaturalBcOptions::default()).unwrap();
    assert!(bc.max_relative() < 0.05);
    let mut csv = Vec::new();
    rec.write_csv(&mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 5);
}

#[test]
fn octahedral_epsilon_minimizers_approach_the_arc_loop() {
    let cone = o_nu4();
    let rec = convergence_study(&cone, &[1.0, 0.1, 0.01, 0.001], &MinimizeConfig::default()).unwrap();
    assert!(rec.failure.is_none(), "{:?}", rec.failure);
    let e = &rec.entries;
    assert!(e.windows(2).all(|w| w[1].l2_distance < w[0].l2_distance));
    assert!(e[3].arc_fit_residual < e[0].arc_fit_residual && e[3].arc_fit_residual < 0.05);
    assert!(rel(e[3].action, rec.gamma_action) < 0.02);
}

#[test]
fn schedule_must_decrease() {
    let cone = ConeSpec::klein(1.0, TAU, 1.0).unwrap();
    let cfg = MinimizeConfig::default();
    assert!(convergence_study(&cone, &[0.1, 1.0], &cfg).is_err());
    assert!(convergence_study(&cone, &[0.0], &cfg).is_err());
}
