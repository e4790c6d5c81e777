//! Closed-form constants, level estimates and total-collision certificates.

use std::f64::consts::PI;

use serde::Serialize;

use crate::action::Functional;
use crate::error::{Error, Result};
use crate::groups::{RotationGroup, Tessellation, Vec3};
use crate::homotopy::{open_cycle, ConeKind, ConeSpec, Geometry};
use crate::quadrature::integrate;

const QUAD_TOL: f64 = 1e-10;

/// Σ_{j=1}^{o−1} 1 / sin^α(jπ/o).
pub fn k_alpha_p(alpha: f64, order: usize) -> f64 {
    (1..order)
        .map(|j| (j as f64 * PI / order as f64).sin().powf(-alpha))
        .sum()
}

/// ∫₀¹ Σ_{R≠I} |(R−I)((1−s)a + s b)|^{−α} ds
pub fn zeta_on_segment(group: &RotationGroup, alpha: f64, a: &Vec3, b: &Vec3) -> Result<f64> {
    let id = group.identity_index();
    let ops: Vec<_> = group
        .elements
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != id)
        .map(|(_, r)| r - crate::Mat3::identity())
        .collect();
    integrate(
        |s| {
            let x = a * (1.0 - s) + b * s;
            ops.iter().map(|d| (d * x).norm().powf(-alpha)).sum()
        },
        0.0,
        1.0,
        QUAD_TOL,
    )
}

/// ζ_{α,0} for `which == 0`, ζ_{α,1} or ζ_{α,2} otherwise.
pub fn zeta(geometry: &Geometry, alpha: f64, which: usize) -> Result<f64> {
    let poly = geometry.poly()?;
    match which {
        0 => {
            let (q, q1) = (poly.q, poly.q1);
            integrate(
                |s| 2.0 * (q * (1.0 - s) + q1 * s).norm().powf(-alpha),
                0.0,
                1.0,
                QUAD_TOL,
            )
        }
        1 => zeta_on_segment(&geometry.group, alpha, &poly.q, &poly.q1),
        2 => zeta_on_segment(&geometry.group, alpha, &poly.q, &poly.q2),
        _ => Err(Error::Invalid(format!(
            "no zeta constant with index {which}"
        ))),
    }
}

/// δ_i = min_{R≠I} ½|(R−I)(q + q_i)|
pub fn delta_min(geometry: &Geometry, which: usize) -> Result<f64> {
    let poly = geometry.poly()?;
    let qi = match which {
        1 => poly.q1,
        2 => poly.q2,
        _ => {
            return Err(Error::Invalid(format!(
                "no delta constant with index {which}"
            )))
        }
    };
    let m = poly.q + qi;
    let g = &geometry.group;
    Ok(g.elements
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != g.identity_index())
        .map(|(_, r)| 0.5 * ((r - crate::Mat3::identity()) * m).norm())
        .fold(f64::INFINITY, f64::min))
}

/// max_{u ∈ τ̄} |u × p| for the closed spherical triangle with vertices `tri`.
fn max_cross_on_triangle(tri: &[Vec3; 3], p: &Vec3) -> f64 {
    let d = tri.map(|v| v.dot(p));
    let (lo, hi) = (
        d.iter().copied().fold(f64::INFINITY, f64::min),
        d.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    if lo > 1e-12 || hi < -1e-12 {
        tri.iter().map(|v| v.cross(p).norm()).fold(0.0, f64::max)
    } else {
        1.0
    }
}

fn triangle_vertices(group: &RotationGroup, tess: &Tessellation, t: usize) -> [Vec3; 3] {
    tess.triangles[t]
        .vertices
        .map(|i| group.poles()[i].direction)
}

fn tilde_u0_with(group: &RotationGroup, alpha: f64, max_cross: impl Fn(&Vec3) -> f64) -> f64 {
    let s: f64 = group
        .poles()
        .iter()
        .map(|p| k_alpha_p(alpha, p.order) / max_cross(&p.direction).powf(alpha))
        .sum();
    s / 2f64.powf(alpha + 1.0)
}

/// Ũ_{α,0} evaluated on triangle `t` of the tessellation.
pub fn tilde_u0_on(geometry: &Geometry, alpha: f64, t: usize) -> Result<f64> {
    let tess = geometry.tess()?;
    if t >= tess.len() {
        return Err(Error::Invalid(format!("triangle {t} out of range")));
    }
    let tri = triangle_vertices(&geometry.group, tess, t);
    Ok(tilde_u0_with(&geometry.group, alpha, |p| {
        max_cross_on_triangle(&tri, p)
    }))
}

pub fn tilde_u0(geometry: &Geometry, alpha: f64) -> Result<f64> {
    tilde_u0_on(geometry, alpha, 0)
}

/// Ũ_{α,0} with each max taken over a grid of `n` points per triangle side.
pub fn tilde_u0_grid(geometry: &Geometry, alpha: f64, t: usize, n: usize) -> Result<f64> {
    let tess = geometry.tess()?;
    let tri = triangle_vertices(&geometry.group, tess, t);
    let mut pts = Vec::new();
    for i in 0..=n {
        for j in 0..=n - i {
            let (a, b) = (i as f64 / n as f64, j as f64 / n as f64);
            pts.push((tri[0] * a + tri[1] * b + tri[2] * (1.0 - a - b)).normalize());
        }
    }
    Ok(tilde_u0_with(&geometry.group, alpha, |p| {
        pts.iter().map(|u| u.cross(p).norm()).fold(0.0, f64::max)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundFormula {
    Hiphop,
    Klein,
    PlatoGeneral,
}

/// Lower bound for the action of solutions with `m` total collisions per period.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CollisionBound {
    pub value: f64,
    pub collisions: usize,
    pub formula: BoundFormula,
}

/// Σ over `m` segments of length T/m of (2+α)/(2−α)·(ℳ/2)·[U₀(π/α)^α]^{2/(2+α)}·(T/m)^{(2−α)/(2+α)}.
pub fn general_lower_bound(total_mass: f64, u0: f64, alpha: f64, period: f64, m: usize) -> f64 {
    let e = 2.0 / (2.0 + alpha);
    let seg = (2.0 + alpha) / (2.0 - alpha)
        * 0.5
        * total_mass
        * (u0 * (PI / alpha).powf(alpha)).powf(e)
        * (period / m as f64).powf((2.0 - alpha) / (2.0 + alpha));
    m as f64 * seg
}

pub fn hiphop_collision_bound(m0: f64, period: f64) -> CollisionBound {
    let mass = 4.0 + m0;
    let u0 = 4.0 * (3.0 + 4.0 * m0) / mass.powf(1.5);
    CollisionBound {
        value: general_lower_bound(mass, u0, 1.0, period, 2),
        collisions: 2,
        formula: BoundFormula::Hiphop,
    }
}

pub fn klein_collision_bound(m0: f64, period: f64) -> CollisionBound {
    let mass = 4.0 + m0;
    let u0 = 4.0 * (3.0 * 1.5f64.sqrt() + 4.0 * m0) / mass.powf(1.5);
    CollisionBound {
        value: general_lower_bound(mass, u0, 1.0, period, 2),
        collisions: 2,
        formula: BoundFormula::Klein,
    }
}

/// Action of the uniformly rotating square with the central body.
pub fn hiphop_square_action(m0: f64, period: f64) -> f64 {
    3.0 * 2f64.powf(-1.0 / 3.0)
        * (1.0 + 2.0 * 2f64.sqrt() + 4.0 * m0).powf(2.0 / 3.0)
        * (2.0 * PI).powf(2.0 / 3.0)
        * period.cbrt()
}

/// Minimized four-half-circles bound and its radius ρ*.
pub fn klein_test_loop_bound(m0: f64, period: f64) -> (f64, f64) {
    let c = 3.0 + 2.0 * 2f64.sqrt() * m0;
    let rho = (c * period * period / (64.0 * PI * PI)).cbrt();
    (32.0 * PI * PI * rho * rho / period + c * period / rho, rho)
}

/// Hip-Hop constellation with 2N satellites: collision bound and the action
/// of the rotating regular 2N-gon.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RingComparison {
    pub bound: CollisionBound,
    pub ring_action: f64,
    pub ring_radius: f64,
    pub pass: bool,
}

pub fn hiphop_ring_comparison(
    n: usize,
    alpha: f64,
    m0: f64,
    period: f64,
) -> Result<RingComparison> {
    let cone = ConeSpec::italian(crate::GroupTag::Z2N(n), alpha, period, m0)?;
    let bodies = 2.0 * n as f64;
    let mass = bodies + m0;
    let u0 = (bodies * (bodies - 1.0) / 2f64.powf(alpha) + 2.0 * bodies * m0) / mass
        * (bodies / mass).powf(alpha / 2.0);
    let bound = general_lower_bound(mass, u0, alpha, period, 2);
    // constant integrand along a uniform circle: A(r) = a r² + b r^{-α}
    let f = Functional::physical(&cone);
    let omega = 2.0 * PI / period;
    let (c, m) = f
        .potential(&Vec3::x())
        .ok_or_else(|| Error::Numerical("ring potential is singular".into()))?;
    let u = c + m;
    let a = f.scale * period * omega * omega / 2.0;
    let b = f.scale * period * u;
    let r = (alpha * b / (2.0 * a)).powf(1.0 / (2.0 + alpha));
    let ring = a * r * r + b * r.powf(-alpha);
    Ok(RingComparison {
        bound: CollisionBound {
            value: bound,
            collisions: 2,
            formula: BoundFormula::Hiphop,
        },
        ring_action: ring,
        ring_radius: r,
        pass: ring < bound,
    })
}

/// Per-group constants of the Archimedean polyhedron at the Keplerian exponent.
#[derive(Clone, Debug, Serialize)]
pub struct PolyhedronConstants {
    pub zeta0: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub ell: f64,
    pub ell_ratio: f64,
}

pub fn polyhedron_constants(geometry: &Geometry) -> Result<PolyhedronConstants> {
    let poly = geometry.poly()?;
    Ok(PolyhedronConstants {
        zeta0: zeta(geometry, 1.0, 0)?,
        zeta1: zeta(geometry, 1.0, 1)?,
        zeta2: zeta(geometry, 1.0, 2)?,
        delta1: delta_min(geometry, 1)?,
        delta2: delta_min(geometry, 2)?,
        ell: poly.edge_length,
        ell_ratio: poly.ell_ratio(),
    })
}

/// Side counts over the whole cycle and its minimal period.
fn cycle_counts(cone: &ConeSpec) -> Result<(usize, usize, usize)> {
    let c = cone.counts()?;
    let k = open_cycle(cone.nu().unwrap_or(&[])).len();
    let reps = k / c.k_nu;
    Ok((c.k1 * reps, c.k2 * reps, c.k_nu))
}

fn platonic(cone: &ConeSpec) -> Result<()> {
    match cone.kind {
        ConeKind::Platonic { .. } => Ok(()),
        _ => Err(Error::UnsupportedGroup(cone.group().tag.to_string())),
    }
}

/// Minimum of λ ↦ λ²A_K + λ^{−α}A_U over the rescaled test loops.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TestLoopAction {
    pub value: f64,
    pub lambda_bar: f64,
    pub kinetic: f64,
    pub potential: f64,
}

pub fn test_loop_action_exact(cone: &ConeSpec) -> Result<TestLoopAction> {
    platonic(cone)?;
    let g = &cone.geometry;
    let alpha = cone.alpha;
    let (k1, k2, _) = cycle_counts(cone)?;
    let k = (k1 + k2) as f64;
    let n = g.group.order() as f64;
    let ell = g.poly()?.edge_length;
    let s = k1 as f64 * zeta(g, alpha, 1)?
        + if k2 > 0 {
            k2 as f64 * zeta(g, alpha, 2)?
        } else {
            0.0
        }
        + cone.m0 * k * zeta(g, alpha, 0)?;
    let t = cone.period;
    let kinetic = 0.5 * n * ell * ell * k * k / t;
    let potential = 0.5 * n * t / k * s;
    let lambda_bar = (alpha * potential / (2.0 * kinetic)).powf(1.0 / (2.0 + alpha));
    let value = lambda_bar * lambda_bar * kinetic + lambda_bar.powf(-alpha) * potential;
    Ok(TestLoopAction {
        value,
        lambda_bar,
        kinetic,
        potential,
    })
}

/// Upper bound for the rescaled test-loop action using only Keplerian constants.
pub fn test_loop_action_bound(cone: &ConeSpec) -> Result<f64> {
    platonic(cone)?;
    let c = polyhedron_constants(&cone.geometry)?;
    let alpha = cone.alpha;
    let (k1, k2, _) = cycle_counts(cone)?;
    let k = (k1 + k2) as f64;
    let n = cone.group().order() as f64;
    let s =
        k1 as f64 * c.zeta1 / c.delta1 + k2 as f64 * c.zeta2 / c.delta2 + c.ell_ratio * cone.m0 * k;
    Ok((2.0 + alpha) / 2.0
        * n
        * (c.ell.powf(2.0 * alpha) * s * s * k.powf(2.0 * (alpha - 1.0))
            / (4.0 * alpha.powf(alpha)))
        .powf(1.0 / (2.0 + alpha))
        * cone.period.powf((2.0 - alpha) / (2.0 + alpha)))
}

/// Collision bound for a Platonic cone with M total collisions per period.
pub fn platonic_collision_bound(cone: &ConeSpec) -> Result<CollisionBound> {
    platonic(cone)?;
    let n = cone.group().order() as f64;
    let mass = n + cone.m0;
    let alpha = cone.alpha;
    let u0 =
        (n / mass).powf((2.0 + alpha) / 2.0) * (tilde_u0(&cone.geometry, alpha)? + 2.0 * cone.m0);
    Ok(CollisionBound {
        value: general_lower_bound(mass, u0, alpha, cone.period, cone.m()),
        collisions: cone.m(),
        formula: BoundFormula::PlatoGeneral,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Inequality {
    fn new(lhs: f64, rhs: f64) -> Self {
        Inequality {
            lhs,
            rhs,
            holds: lhs < rhs,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateConstants {
    pub zeta0: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub ell: f64,
    pub tilde_u0: f64,
    /// Only defined for α > 1.
    pub c: Option<f64>,
    pub k1: usize,
    pub k2: usize,
    pub k_nu: usize,
    pub m: usize,
}

/// Comparison at the cone's own m₀.
#[derive(Clone, Debug, Serialize)]
pub struct DirectComparison {
    pub test_loop_action: f64,
    pub collision_bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateCertificate {
    pub cone: String,
    pub alpha: f64,
    pub constants: CertificateConstants,
    /// Coefficient inequality independent of m₀.
    pub potential: Inequality,
    /// Inequality on the coefficients of m₀.
    pub central: Inequality,
    pub direct: DirectComparison,
    pub pass: bool,
}

impl EstimateCertificate {
    /// The four table columns: lhs and rhs of both inequalities.
    pub fn columns(&self) -> [f64; 4] {
        [
            self.potential.lhs,
            self.potential.rhs,
            self.central.lhs,
            self.central.rhs,
        ]
    }
}

/// C = 2k/(2−α)^{(2+α)/2}·(πM/(√α ℓ k))^α
pub fn c_constant(alpha: f64, k: usize, m: usize, ell: f64) -> f64 {
    let k = k as f64;
    2.0 * k / (2.0 - alpha).powf((2.0 + alpha) / 2.0)
        * (PI * m as f64 / (alpha.sqrt() * ell * k)).powf(alpha)
}

pub fn certify_no_total_collisions(cone: &ConeSpec) -> Result<EstimateCertificate> {
    platonic(cone)?;
    let g = &cone.geometry;
    let pc = polyhedron_constants(g)?;
    let alpha = cone.alpha;
    let (k1, k2, k_nu) = cycle_counts(cone)?;
    let k = k1 + k2;
    let m = cone.m();
    let u = tilde_u0(g, alpha)?;
    let (kf1, kf2) = (k1 as f64, k2 as f64);
    let keplerian = (alpha - 1.0).abs() < 1e-12;
    let (potential, central, c) = if keplerian {
        (
            Inequality::new(
                kf1 * pc.zeta1 + kf2 * pc.zeta2,
                2.0 * PI * m as f64 * u / pc.ell,
            ),
            Inequality::new(k as f64 * pc.zeta0, 4.0 * PI * m as f64 / pc.ell),
            None,
        )
    } else {
        let c = c_constant(alpha, k, m, pc.ell);
        (
            Inequality::new(
                kf1 * pc.zeta1 / pc.delta1 + kf2 * pc.zeta2 / pc.delta2,
                c * u,
            ),
            Inequality::new(k as f64 * pc.ell_ratio, c),
            Some(c),
        )
    };
    let tl = test_loop_action_exact(cone)?;
    let bound = platonic_collision_bound(cone)?;
    let direct = DirectComparison {
        test_loop_action: tl.value,
        collision_bound: bound.value,
        holds: tl.value < bound.value,
    };
    let pass = potential.holds && central.holds;
    Ok(EstimateCertificate {
        cone: format!("{} k={} M={} alpha={}", cone.group().tag, k, m, alpha),
        alpha,
        constants: CertificateConstants {
            zeta0: pc.zeta0,
            zeta1: pc.zeta1,
            zeta2: pc.zeta2,
            delta1: pc.delta1,
            delta2: pc.delta2,
            ell: pc.ell,
            tilde_u0: u,
            c,
            k1,
            k2,
            k_nu,
            m,
        },
        potential,
        central,
        direct,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_alpha_p_sums() {
        assert_eq!(k_alpha_p(1.0, 2), 1.0);
        assert!((k_alpha_p(1.0, 4) - (1.0 + 2.0 * 2f64.sqrt())).abs() < 1e-14);
        let s = (PI / 3.0).sin().powf(1.5);
        assert!((k_alpha_p(1.5, 3) - 2.0 / s).abs() < 1e-14);
    }

    #[test]
    fn bounds_closed_forms() {
        for m0 in [0.0f64, 1.0, 7.5] {
            let hh =
                3.0 * 2f64.cbrt() * (2.0 * PI).powf(2.0 / 3.0) * (3.0 + 4.0 * m0).powf(2.0 / 3.0);
            assert!((hiphop_collision_bound(m0, 1.0).value / hh - 1.0).abs() < 1e-13);
            let kl = 6.0 * PI.powf(2.0 / 3.0) * (3.0 * 1.5f64.sqrt() + 4.0 * m0).powf(2.0 / 3.0);
            assert!((klein_collision_bound(m0, 1.0).value / kl - 1.0).abs() < 1e-13);
            let tl = 6.0 * PI.powf(2.0 / 3.0) * (3.0 + 2.0 * 2f64.sqrt() * m0).powf(2.0 / 3.0);
            assert!((klein_test_loop_bound(m0, 1.0).0 / tl - 1.0).abs() < 1e-13);
        }
    }
}
