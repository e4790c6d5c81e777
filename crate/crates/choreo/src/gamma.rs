//! Γ-limit loops made of uniform circular arcs through rotation semi-axes,
//! and convergence of ε-minimizers toward them.

use std::f64::consts::TAU;
use std::io::Write;

use nalgebra::{Matrix3, SymmetricEigen};
use serde::Serialize;

use crate::action::{csv_err, fmt, LoopPath};
use crate::error::{Error, Result};
use crate::groups::{RotationGroup, Vec3};
use crate::homotopy::{is_central, min_total_angle, ConeKind, ConeSpec};
use crate::minimize::{
    default_init, functional_for, minimize_refined, optimal_rescale, MinimizeConfig,
};
use crate::quadrature::integrate;

/// Least value of ∫₀ᵀ(|v̇|²/2 + |v|^{−α}) over loops sweeping the total angle
/// Δθ: ((2+α)/2)·α^{−α/(2+α)}·Δθ^{2α/(2+α)}·T^{(2−α)/(2+α)}.
pub fn gamma_limit_action_alpha(delta_theta: f64, period: f64, alpha: f64) -> Result<f64> {
    if !(delta_theta > 0.0 && period > 0.0 && alpha > 0.0) {
        return Err(Error::Invalid(
            "angle, period and alpha must be positive".into(),
        ));
    }
    let a = alpha;
    Ok((2.0 + a) / 2.0
        * a.powf(-a / (2.0 + a))
        * delta_theta.powf(2.0 * a / (2.0 + a))
        * period.powf((2.0 - a) / (2.0 + a)))
}

/// The α = 1 value, (3/2)·Δθ^{2/3}·T^{1/3} = (3/2)·T/ρ.
pub fn gamma_limit_action(delta_theta: f64, period: f64) -> Result<f64> {
    gamma_limit_action_alpha(delta_theta, period, 1.0)
}

/// Radius of uniform circular motion at angular speed ω under |v|^{−α}.
pub fn kepler_radius(omega: f64, alpha: f64) -> f64 {
    (alpha / (omega * omega)).powf(1.0 / (2.0 + alpha))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LimitFlags {
    /// Rotated copies are minimizers too; one representative is returned.
    pub non_unique: bool,
    /// Δθ is a multiple of 2π, where elliptic arcs tie with circular ones.
    pub elliptic_degenerate: bool,
    /// α > 1: the arc shape is a candidate, not a proven minimizer.
    pub conjectural: bool,
    /// Δθ/M < 2π, the condition under which the arc shape is established.
    pub angle_condition: bool,
}

/// Loop of uniform circular arcs of common radius, one per consecutive
/// pair of points, traversed at constant angular speed.
#[derive(Clone, Debug)]
pub struct CircularArcLoop {
    /// Unit vectors visited in order (rotation semi-axes for Platonic and
    /// Klein cones).
    pub semi_axes: Vec<Vec3>,
    /// `arcs[i]` is the angle from `semi_axes[i]` to `semi_axes[i + 1]`.
    pub arcs: Vec<f64>,
    pub radius: f64,
    pub omega: f64,
    pub period: f64,
    pub alpha: f64,
    pub flags: LimitFlags,
    start: Vec<f64>,
}

impl CircularArcLoop {
    pub fn new(points: &[Vec3], period: f64, alpha: f64) -> Result<Self> {
        if points.len() < 2 || !(period > 0.0) {
            return Err(Error::Invalid(
                "an arc loop needs two points and a positive period".into(),
            ));
        }
        let semi_axes: Vec<Vec3> = points.iter().map(|p| p.normalize()).collect();
        let k = semi_axes.len();
        let mut arcs = Vec::with_capacity(k);
        for i in 0..k {
            let c = semi_axes[i].dot(&semi_axes[(i + 1) % k]).clamp(-1.0, 1.0);
            let th = c.acos();
            if !(th > 1e-12 && th < std::f64::consts::PI - 1e-9) {
                return Err(Error::Invalid(format!("arc {i} has no unique plane")));
            }
            arcs.push(th);
        }
        let mut start = vec![0.0];
        for a in &arcs {
            start.push(start.last().unwrap() + a);
        }
        let total = start[k];
        let omega = total / period;
        let n_turns = total / TAU;
        let flags = LimitFlags {
            elliptic_degenerate: (n_turns - n_turns.round()).abs() < 1e-9 && n_turns.round() >= 1.0,
            conjectural: alpha != 1.0,
            angle_condition: true,
            non_unique: false,
        };
        Ok(CircularArcLoop {
            semi_axes,
            arcs,
            radius: kepler_radius(omega, alpha),
            omega,
            period,
            alpha,
            flags,
            start,
        })
    }

    pub fn total_angle(&self) -> f64 {
        *self.start.last().unwrap()
    }

    /// Times at which the loop passes the points.
    pub fn passage_times(&self) -> Vec<f64> {
        self.start[..self.arcs.len()]
            .iter()
            .map(|s| s / self.omega)
            .collect()
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let phi = (self.omega * t).rem_euclid(self.total_angle());
        let i = self
            .start
            .partition_point(|&s| s <= phi)
            .saturating_sub(1)
            .min(self.arcs.len() - 1);
        (i, phi - self.start[i])
    }

    fn frame(&self, i: usize) -> (Vec3, Vec3) {
        let a = self.semi_axes[i];
        let b = self.semi_axes[(i + 1) % self.semi_axes.len()];
        (a, (b - a * a.dot(&b)).normalize())
    }

    pub fn position(&self, t: f64) -> Vec3 {
        let (i, psi) = self.locate(t);
        let (a, w) = self.frame(i);
        (a * psi.cos() + w * psi.sin()) * self.radius
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        let (i, psi) = self.locate(t);
        self.arc_velocity(i, psi)
    }

    fn arc_velocity(&self, i: usize, psi: f64) -> Vec3 {
        let (a, w) = self.frame(i);
        (w * psi.cos() - a * psi.sin()) * (self.radius * self.omega)
    }

    pub fn sample(&self, n: usize) -> LoopPath {
        LoopPath::sample(n, self.period, |t| self.position(t))
    }

    /// The loop rotated by `m`.
    pub fn transformed(&self, m: &crate::groups::Mat3) -> Self {
        let mut out = self.clone();
        out.semi_axes = self.semi_axes.iter().map(|a| m * a).collect();
        out
    }

    /// ∫₀ᵀ(|v̇|²/2 + |v|^{−α}) by adaptive quadrature along each arc.
    pub fn action_quadrature(&self) -> Result<f64> {
        let mut total = 0.0;
        let times = self.passage_times();
        for i in 0..self.arcs.len() {
            let (t0, t1) = (times[i], times[i] + self.arcs[i] / self.omega);
            total += integrate(
                |t| {
                    let psi = self.omega * (t - t0);
                    let (a, w) = self.frame(i);
                    let x = (a * psi.cos() + w * psi.sin()) * self.radius;
                    0.5 * self.arc_velocity(i, psi).norm_squared() + x.norm().powf(-self.alpha)
                },
                t0,
                t1,
                1e-13,
            )?;
        }
        Ok(total)
    }

    /// Relative residual of the reduced radial equation
    /// ρ̈ = −αρ^{−α−1} + c²/ρ³ with ρ constant and c = ωρ².
    pub fn kepler_residual(&self) -> f64 {
        let r = self.radius;
        let c = self.omega * r * r;
        let force = self.alpha * r.powf(-self.alpha - 1.0);
        (c * c / r.powi(3) - force).abs() / force
    }

    /// Jumps of speed and of axial velocity at every passage, from the
    /// exact one-sided velocities.
    pub fn natural_bc(&self) -> NaturalBcReport {
        let k = self.arcs.len();
        let times = self.passage_times();
        let passages = (0..k)
            .map(|i| {
                let prev = (i + k - 1) % k;
                let vm = self.arc_velocity(prev, self.arcs[prev]);
                let vp = self.arc_velocity(i, 0.0);
                let a = self.semi_axes[i];
                PassageJump {
                    node: None,
                    time: times[i],
                    axis: [a.x, a.y, a.z],
                    speed_jump: (vp.norm() - vm.norm()).abs(),
                    axial_jump: (vp - vm).dot(&a).abs(),
                }
            })
            .collect();
        NaturalBcReport::new(passages, self.radius * self.omega)
    }
}

/// Circular-arc minimizer of the ε → 0 limit functional on `cone`.
pub fn gamma_limit_minimizer(cone: &ConeSpec) -> Result<CircularArcLoop> {
    let (points, non_unique) = match &cone.kind {
        ConeKind::Italian => {
            let a = cone.group().axes()[0].normalize();
            let e1 = if a.x.abs() < 0.9 {
                Vec3::x()
            } else {
                Vec3::y()
            };
            let e1 = (e1 - a * a.dot(&e1)).normalize();
            let e2 = a.cross(&e1);
            (vec![e1, e2, -e1, -e2], true)
        }
        ConeKind::Klein => (min_total_angle(cone)?.semi_axes, false),
        ConeKind::Platonic { .. } => {
            if is_central(cone)? {
                return Err(Error::Invalid(
                    "the class contains a great circle; no axis passage is forced".into(),
                ));
            }
            (min_total_angle(cone)?.semi_axes, false)
        }
    };
    let mut l = CircularArcLoop::new(&points, cone.period, cone.alpha)?;
    l.flags.non_unique = non_unique;
    l.flags.angle_condition = l.total_angle() / cone.m() as f64 <= TAU;
    Ok(l)
}

#[derive(Clone, Debug, Serialize)]
pub struct PassageJump {
    pub node: Option<usize>,
    pub time: f64,
    pub axis: [f64; 3],
    pub speed_jump: f64,
    pub axial_jump: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NaturalBcReport {
    pub passages: Vec<PassageJump>,
    /// Typical speed used to make the jumps relative.
    pub speed_scale: f64,
    pub max_speed_jump: f64,
    pub max_axial_jump: f64,
}

impl NaturalBcReport {
    fn new(passages: Vec<PassageJump>, speed_scale: f64) -> Self {
        let max_speed_jump = passages.iter().map(|p| p.speed_jump).fold(0.0, f64::max);
        let max_axial_jump = passages.iter().map(|p| p.axial_jump).fold(0.0, f64::max);
        NaturalBcReport {
            passages,
            speed_scale,
            max_speed_jump,
            max_axial_jump,
        }
    }

    /// Largest jump divided by the speed scale.
    pub fn max_relative(&self) -> f64 {
        self.max_speed_jump.max(self.max_axial_jump) / self.speed_scale
    }
}

#[derive(Clone, Copy, Debug)]
pub struct NaturalBcOptions {
    /// A passage must come within this angle (radians) of its semi-axis.
    pub capture: f64,
    /// Nodes closer to the axis than `exclude_factor` times the closest
    /// approach are left out of the velocity fits.
    pub exclude_factor: f64,
    /// Nodes in each one-sided fit; 0 picks n/64.
    pub fit_nodes: usize,
}

impl Default for NaturalBcOptions {
    fn default() -> Self {
        NaturalBcOptions {
            capture: 0.25,
            exclude_factor: 4.0,
            fit_nodes: 0,
        }
    }
}

fn angle_to(x: &Vec3, a: &Vec3) -> f64 {
    x.normalize().dot(a).clamp(-1.0, 1.0).acos()
}

/// Nodes where the loop passes the semi-axes, in the given order: each is
/// the closest node of the first stretch of the loop that comes within
/// `capture` of its axis.
pub fn passage_nodes(path: &LoopPath, semi_axes: &[Vec3], capture: f64) -> Result<Vec<usize>> {
    let n = path.len();
    let axes: Vec<Vec3> = semi_axes.iter().map(|a| a.normalize()).collect();
    let ang = |j: usize, a: &Vec3| angle_to(&path.nodes[j % n], a);
    let first = (0..n)
        .min_by(|&i, &j| ang(i, &axes[0]).total_cmp(&ang(j, &axes[0])))
        .ok_or_else(|| Error::Invalid("empty loop".into()))?;
    if ang(first, &axes[0]) > capture {
        return Err(Error::Search(
            "the loop does not pass the first semi-axis".into(),
        ));
    }
    let mut out = vec![first];
    let mut j = first;
    for a in &axes[1..] {
        // leave the current capture region before looking for the next one
        let mut k = j + 1;
        while k < first + n && ang(k, a) > capture {
            k += 1;
        }
        if k >= first + n {
            return Err(Error::Search("a semi-axis is not passed in order".into()));
        }
        let mut best = k;
        while k < first + n && ang(k, a) <= capture {
            if ang(k, a) < ang(best, a) {
                best = k;
            }
            k += 1;
        }
        out.push(best % n);
        j = best;
    }
    Ok(out)
}

/// One-sided velocity at node `j` from a quadratic least-squares fit over
/// `m` nodes starting `skip` nodes away in direction `dir`.
fn fitted_velocity(path: &LoopPath, j: usize, dir: isize, skip: usize, m: usize) -> Vec3 {
    let n = path.len() as isize;
    let h = path.step();
    let mut a = Matrix3::<f64>::zeros();
    let mut b = [Vec3::zeros(); 3];
    for i in 0..m {
        let off = dir * (skip + i) as isize;
        let tau = off as f64;
        let x = path.nodes[((j as isize + off).rem_euclid(n)) as usize];
        let basis = [1.0, tau, tau * tau];
        for r in 0..3 {
            for c in 0..3 {
                a[(r, c)] += basis[r] * basis[c];
            }
            b[r] += x * basis[r];
        }
    }
    let inv = a.try_inverse().unwrap_or_else(Matrix3::zeros);
    (b[0] * inv[(1, 0)] + b[1] * inv[(1, 1)] + b[2] * inv[(1, 2)]) / h
}

/// Speed and axial-velocity jumps of a discrete loop at its passages
/// through `semi_axes`, with velocities extrapolated from both sides of
/// each near-collision swing.
pub fn natural_bc_check(
    path: &LoopPath,
    semi_axes: &[Vec3],
    opts: &NaturalBcOptions,
) -> Result<NaturalBcReport> {
    let n = path.len();
    let h = path.step();
    let nodes = passage_nodes(path, semi_axes, opts.capture)?;
    let m = if opts.fit_nodes == 0 {
        (n / 64).max(5)
    } else {
        opts.fit_nodes
    };
    let passages = nodes
        .iter()
        .zip(semi_axes)
        .map(|(&j, a)| {
            let a = a.normalize();
            let theta0 = angle_to(&path.nodes[j], &a);
            let limit = opts.exclude_factor * theta0;
            let skip = |dir: isize| {
                let mut k = 1;
                while k < n / 8
                    && angle_to(
                        &path.nodes
                            [((j as isize + dir * k as isize).rem_euclid(n as isize)) as usize],
                        &a,
                    ) < limit
                {
                    k += 1;
                }
                k
            };
            let vm = fitted_velocity(path, j, -1, skip(-1), m);
            let vp = fitted_velocity(path, j, 1, skip(1), m);
            PassageJump {
                node: Some(j),
                time: j as f64 * h,
                axis: [a.x, a.y, a.z],
                speed_jump: (vp.norm() - vm.norm()).abs(),
                axial_jump: (vp - vm).dot(&a).abs(),
            }
        })
        .collect();
    let speed = (0..n)
        .map(|j| (path.nodes[(j + 1) % n] - path.nodes[j]).norm())
        .sum::<f64>()
        / (n as f64 * h);
    Ok(NaturalBcReport::new(passages, speed))
}

#[derive(Clone, Debug, Serialize)]
pub struct ArcFitSegment {
    pub radius: f64,
    pub omega: f64,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArcFit {
    /// Largest pointwise deviation from the fitted arcs divided by the mean radius.
    pub residual: f64,
    pub segments: Vec<ArcFitSegment>,
}

/// Least-squares fit of one uniform circular arc (centered at the origin)
/// to each stretch of the loop between consecutive passage nodes.
pub fn circular_arc_fit(path: &LoopPath, passages: &[usize]) -> Result<ArcFit> {
    let n = path.len();
    if passages.is_empty() || passages.iter().any(|&p| p >= n) {
        return Err(Error::Invalid(
            "passage nodes must be given and lie on the loop".into(),
        ));
    }
    let h = path.step();
    let k = passages.len();
    let mut segments = Vec::with_capacity(k);
    for i in 0..k {
        let p = passages[i];
        let mut q = passages[(i + 1) % k];
        while q <= p {
            q += n;
        }
        let xs: Vec<Vec3> = (p..=q).map(|j| path.nodes[j % n]).collect();
        let s: Matrix3<f64> = xs.iter().map(|x| x * x.transpose()).sum();
        let eig = SymmetricEigen::new(s);
        let (imin, _) =
            eig.eigenvalues
                .iter()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |acc, (i, &v)| {
                        if v < acc.1 {
                            (i, v)
                        } else {
                            acc
                        }
                    },
                );
        let normal: Vec3 = eig.eigenvectors.column(imin).into_owned();
        let e1 = (xs[0] - normal * normal.dot(&xs[0])).normalize();
        let e2 = normal.cross(&e1);
        let mut phis: Vec<f64> = Vec::with_capacity(xs.len());
        for x in &xs {
            let raw = x.dot(&e2).atan2(x.dot(&e1));
            let phi = match phis.last() {
                None => raw,
                Some(&prev) => {
                    prev + (raw - prev + std::f64::consts::PI).rem_euclid(TAU)
                        - std::f64::consts::PI
                }
            };
            phis.push(phi);
        }
        // φ ≈ φ₀ + ωτ by least squares
        let m = xs.len() as f64;
        let taus: Vec<f64> = (0..xs.len()).map(|j| j as f64 * h).collect();
        let (st, sp) = (taus.iter().sum::<f64>(), phis.iter().sum::<f64>());
        let stt: f64 = taus.iter().map(|t| t * t).sum();
        let stp: f64 = taus.iter().zip(&phis).map(|(t, p)| t * p).sum();
        let den = m * stt - st * st;
        let omega = if den > 0.0 {
            (m * stp - st * sp) / den
        } else {
            0.0
        };
        let phi0 = (sp - omega * st) / m;
        let dirs: Vec<Vec3> = taus
            .iter()
            .map(|t| {
                let f = phi0 + omega * t;
                e1 * f.cos() + e2 * f.sin()
            })
            .collect();
        let radius = xs.iter().zip(&dirs).map(|(x, u)| x.dot(u)).sum::<f64>() / m;
        let max_deviation = xs
            .iter()
            .zip(&dirs)
            .map(|(x, u)| (x - u * radius).norm())
            .fold(0.0, f64::max);
        segments.push(ArcFitSegment {
            radius,
            omega,
            max_deviation,
        });
    }
    let mean_r = segments.iter().map(|s| s.radius.abs()).sum::<f64>() / k as f64;
    let residual = segments.iter().map(|s| s.max_deviation).fold(0.0, f64::max) / mean_r;
    Ok(ArcFit { residual, segments })
}

/// Best match of `b` to `a` over cyclic time shifts and (optionally) the
/// elements of a group acting on `b`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Alignment {
    /// RMS distance over the period.
    pub distance: f64,
    /// `b` is compared at node `j + shift` with `a` at node `j`.
    pub shift: usize,
    pub element: Option<usize>,
}

pub fn aligned_distance(
    a: &LoopPath,
    b: &LoopPath,
    group: Option<&RotationGroup>,
) -> Result<Alignment> {
    let n = a.len();
    if b.len() != n || n == 0 {
        return Err(Error::Invalid(
            "loops must have the same number of nodes".into(),
        ));
    }
    let stride = n.div_ceil(512);
    let sq = |bb: &[Vec3], s: usize, step: usize| -> f64 {
        (0..n)
            .step_by(step)
            .map(|j| (a.nodes[j] - bb[(j + s) % n]).norm_squared())
            .sum()
    };
    let candidates: Vec<(Option<usize>, Vec<Vec3>)> = match group {
        None => vec![(None, b.nodes.clone())],
        Some(g) => g
            .elements
            .iter()
            .enumerate()
            .map(|(i, r)| (Some(i), b.nodes.iter().map(|x| r * x).collect()))
            .collect(),
    };
    let mut best = (f64::INFINITY, 0, None);
    for (e, bb) in &candidates {
        let (mut bs, mut bv) = (0, f64::INFINITY);
        for s in (0..n).step_by(stride) {
            let v = sq(bb, s, stride);
            if v < bv {
                bv = v;
                bs = s;
            }
        }
        for d in 0..2 * stride {
            let s = (bs + n + d - stride) % n;
            let v = sq(bb, s, 1);
            if v < best.0 {
                best = (v, s, *e);
            }
        }
    }
    Ok(Alignment {
        distance: (best.0 / n as f64).sqrt(),
        shift: best.1,
        element: best.2,
    })
}

/// Distance of a loop to a Γ-limit loop and circular-arc fit between the
/// passages predicted by the best alignment.
#[derive(Clone, Debug, Serialize)]
pub struct LimitComparison {
    /// RMS distance after alignment, divided by the limit radius.
    pub l2_distance: f64,
    pub alignment: Alignment,
    pub passages: Vec<usize>,
    pub fit: ArcFit,
}

pub fn compare_to_limit(
    path: &LoopPath,
    target: &CircularArcLoop,
    group: Option<&RotationGroup>,
) -> Result<LimitComparison> {
    let n = path.len();
    let h = path.step();
    let sampled = target.sample(n);
    let alignment = aligned_distance(path, &sampled, group)?;
    let r = match (group, alignment.element) {
        (Some(g), Some(e)) => g.elements[e],
        _ => crate::groups::Mat3::identity(),
    };
    let k = target.arcs.len();
    let window = (n / (4 * k)).max(1);
    let passages = target
        .passage_times()
        .iter()
        .zip(&target.semi_axes)
        .map(|(t, a)| {
            let a = r * a;
            let centre = ((t / h).round() as usize + n - alignment.shift) % n;
            (0..=2 * window)
                .map(|d| (centre + n + d - window) % n)
                .min_by(|&i, &j| {
                    angle_to(&path.nodes[i], &a).total_cmp(&angle_to(&path.nodes[j], &a))
                })
                .unwrap()
        })
        .collect::<Vec<_>>();
    let fit = circular_arc_fit(path, &passages)?;
    Ok(LimitComparison {
        l2_distance: alignment.distance / target.radius,
        alignment,
        passages,
        fit,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceEntry {
    pub epsilon: f64,
    pub action: f64,
    pub l2_distance: f64,
    pub arc_fit_residual: f64,
    pub min_gamma_distance: f64,
    pub nodes: usize,
    pub iterations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRecord {
    pub entries: Vec<ConvergenceEntry>,
    pub gamma_action: f64,
    pub total_angle: f64,
    pub flags: LimitFlags,
    /// Set when a stage failed; the entries before it are kept.
    pub failure: Option<String>,
    #[serde(skip)]
    pub loops: Vec<LoopPath>,
}

impl ConvergenceRecord {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record([
            "epsilon",
            "action",
            "l2_distance",
            "min_gamma_distance",
            "arc_fit_residual",
            "nodes",
        ])
        .map_err(csv_err)?;
        for e in &self.entries {
            wr.write_record([
                fmt(e.epsilon),
                fmt(e.action),
                fmt(e.l2_distance),
                fmt(e.min_gamma_distance),
                fmt(e.arc_fit_residual),
                e.nodes.to_string(),
            ])
            .map_err(csv_err)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Minimize the rescaled action at each ε of a strictly decreasing
/// schedule, warm-starting from the previous minimizer, and compare each
/// minimizer with the Γ-limit loop.
pub fn convergence_study(
    cone: &ConeSpec,
    schedule: &[f64],
    config: &MinimizeConfig,
) -> Result<ConvergenceRecord> {
    if schedule.is_empty() || schedule.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::config("schedule", "epsilon values must be positive"));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::config(
            "schedule",
            "the epsilon schedule must be strictly decreasing",
        ));
    }
    let target = gamma_limit_minimizer(cone)?;
    let gamma_action = gamma_limit_action_alpha(target.total_angle(), cone.period, cone.alpha)?;
    let group = cone.group();
    let mut record = ConvergenceRecord {
        entries: vec![],
        gamma_action,
        total_angle: target.total_angle(),
        flags: target.flags,
        failure: None,
        loops: vec![],
    };
    for &eps in schedule {
        let f = functional_for(cone, Some(eps));
        let init = match record.loops.last() {
            None => default_init(cone, config, Some(eps))?,
            Some(prev) => optimal_rescale(prev, &f)?,
        };
        let r = match minimize_refined(cone, Some(eps), config, &init) {
            Ok(r) => r,
            Err(why) => {
                record.failure = Some(format!("epsilon = {eps}: {why}"));
                break;
            }
        };
        let cmp = compare_to_limit(&r.path, &target, Some(group))?;
        record.entries.push(ConvergenceEntry {
            epsilon: eps,
            action: r.action(),
            l2_distance: cmp.l2_distance,
            arc_fit_residual: cmp.fit.residual,
            min_gamma_distance: r.min_gamma_distance,
            nodes: r.path.len(),
            iterations: r.iterations,
        });
        record.loops.push(r.path);
    }
    Ok(record)
}
