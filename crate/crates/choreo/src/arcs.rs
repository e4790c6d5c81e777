//! Fixed-time connecting arcs of the planar α-homogeneous Kepler problem
//! ẍ = −ακ·x/|x|^{α+2}, κ = c/2^{α+1}, between two points at the same
//! distance from the origin.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use nalgebra::{Matrix3, Vector3};
use ode_solvers::dop_shared::OutputType;
use ode_solvers::{Dop853, SVector, System};
use rayon::prelude::*;
use serde::Serialize;

use crate::action::{csv_err, fmt};
use crate::error::{Error, Result};
use crate::estimates::k_alpha_p;

/// Strength c of the partial-collision term for a pole of order `order`.
pub fn partial_collision_strength(alpha: f64, order: usize) -> f64 {
    k_alpha_p(alpha, order)
}

/// The strength for which the force is ẍ = −αx/|x|^{α+2}.
pub fn kepler_strength(alpha: f64) -> f64 {
    2f64.powf(alpha + 1.0)
}

fn kappa(alpha: f64, c: f64) -> f64 {
    c / 2f64.powf(alpha + 1.0)
}

/// Radius of the zero-energy ejection from collision after time t:
/// s(t) = ((2+α)^{2/(2+α)}/2)·c^{1/(2+α)}·t^{2/(2+α)}.
pub fn parabolic_ejection(alpha: f64, c: f64, t: f64) -> f64 {
    let e = 2.0 + alpha;
    e.powf(2.0 / e) / 2.0 * c.powf(1.0 / e) * t.powf(2.0 / e)
}

/// Time the parabolic ejection needs to reach radius `rho`.
pub fn ejection_time(alpha: f64, c: f64, rho: f64) -> f64 {
    2.0 * rho.powf((2.0 + alpha) / 2.0) / ((2.0 + alpha) * (c / 2f64.powf(alpha)).sqrt())
}

/// Action of the collision-ejection path made of two parabolic legs
/// between radius `rho` and the origin.
pub fn collision_action(alpha: f64, c: f64, rho: f64) -> f64 {
    4.0 * (2.0 * kappa(alpha, c)).sqrt() * rho.powf((2.0 - alpha) / 2.0) / (2.0 - alpha)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ArcCount {
    pub k_min: i64,
    pub k_max: i64,
    pub k_tot: i64,
}

fn near_integer(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() < 1e-10).then_some(r as i64)
}

/// Range of winding numbers k of the connecting arcs, which sweep the angle φ + 2πk.
pub fn arc_count(alpha: f64, phi: f64) -> Result<ArcCount> {
    if !(1.0..2.0).contains(&alpha) {
        return Err(Error::config("alpha", "alpha must lie in [1, 2)"));
    }
    if !(0.0..TAU).contains(&phi) {
        return Err(Error::config("phi", "phi must lie in [0, 2π)"));
    }
    let a = 1.0 / (2.0 - alpha) + phi / TAU;
    let b = 1.0 / (2.0 - alpha) - phi / TAU;
    let k_min = match near_integer(a) {
        Some(n) => 1 - n,
        None => -(a.floor() as i64),
    };
    let k_max = match near_integer(b) {
        Some(n) => n - 1,
        None => b.floor() as i64,
    };
    Ok(ArcCount {
        k_min,
        k_max,
        k_tot: k_max - k_min + 1,
    })
}

/// Bounds (−π/o, 2[1/(2−α)]π) on the collision angle at a pole of order o.
pub fn collision_angle_bounds(alpha: f64, pole_order: usize) -> Result<(f64, f64)> {
    if !(1.0..2.0).contains(&alpha) || pole_order < 2 {
        return Err(Error::Invalid(
            "need alpha in [1, 2) and a pole order of at least 2".into(),
        ));
    }
    let m = (1.0 / (2.0 - alpha) + 1e-12).floor();
    Ok((-PI / pole_order as f64, 2.0 * m * PI))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ArcProblem {
    pub alpha: f64,
    pub rho_bar: f64,
    pub phi: f64,
    pub k: i64,
    /// Strength c; `None` means [`kepler_strength`].
    pub c_coeff: Option<f64>,
}

impl ArcProblem {
    pub fn strength(&self) -> f64 {
        self.c_coeff.unwrap_or_else(|| kepler_strength(self.alpha))
    }

    /// Signed angle the arc has to sweep.
    pub fn target_angle(&self) -> f64 {
        self.phi + TAU * self.k as f64
    }

    pub fn validate(&self) -> Result<()> {
        let count = arc_count(self.alpha, self.phi)?;
        if !(self.rho_bar > 0.0 && self.rho_bar.is_finite()) {
            return Err(Error::config("rho", "the endpoint radius must be positive"));
        }
        if !(self.strength() > 0.0) {
            return Err(Error::config("c", "the strength must be positive"));
        }
        if self.k < count.k_min || self.k > count.k_max {
            return Err(Error::config(
                "k",
                format!(
                    "winding {} outside the admissible range [{}, {}]",
                    self.k, count.k_min, count.k_max
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ShootingOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Required size of the (radius, angle) endpoint error.
    pub tol: f64,
    pub max_newton: usize,
    /// Points in the returned path.
    pub samples: usize,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions {
            rtol: 1e-12,
            atol: 1e-14,
            tol: 1e-10,
            max_newton: 60,
            samples: 401,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ArcSolution {
    pub k: i64,
    /// Integrated angle swept between the endpoints.
    pub swept_angle: f64,
    pub action: f64,
    /// max(|r(τ) − ρ̄|/ρ̄, |θ(τ) − θ_target|)
    pub boundary_residual: f64,
    pub radial_velocity: f64,
    pub angular_momentum: f64,
    pub min_radius: f64,
    /// Largest change of the energy along the path relative to the local
    /// size |ẋ|²/2 + κ|x|^{−α} of its terms.
    pub energy_drift: f64,
    /// Half-length τ of the time interval [−τ, τ].
    pub tau: f64,
    #[serde(skip)]
    pub times: Vec<f64>,
    #[serde(skip)]
    pub points: Vec<[f64; 2]>,
}

impl ArcSolution {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "x", "y"]).map_err(csv_err)?;
        for (t, p) in self.times.iter().zip(&self.points) {
            wr.write_record([fmt(*t), fmt(p[0]), fmt(p[1])])
                .map_err(csv_err)?;
        }
        wr.flush()?;
        Ok(())
    }
}

type State = SVector<f64, 13>;

/// Polar equations in units ρ̄ = κ = 1 with initial radial velocity `v`
/// and angular momentum `l`, in the variables ln r and q = r^{α/2}ṙ and the
/// regularized time s with dt = r^{1+α/2} ds. The energy enters as the
/// constant E(v, l), which keeps q well conditioned through close approaches.
/// State: ln r, q, θ, t, action, then the sensitivities of (ln r, q, θ, t)
/// to v and to l.
struct Regularized {
    alpha: f64,
    v: f64,
    l: f64,
    t_stop: Option<f64>,
}

impl Regularized {
    fn new(alpha: f64, v: f64, l: f64, t_stop: Option<f64>) -> Self {
        Self { alpha, v, l, t_stop }
    }
}

impl System<f64, State> for Regularized {
    fn system(&self, _s: f64, y: &State, dy: &mut State) {
        let (a, v, l) = (self.alpha, self.v, self.l);
        let e = 0.5 * (v * v + l * l) - 1.0;
        let (x, q) = (y[0], y[1]);
        let pot = (a * x).exp();
        let cent = ((a - 2.0) * x).exp();
        let om = (0.5 * (a - 2.0) * x).exp();
        let dt = ((1.0 + 0.5 * a) * x).exp();
        dy[0] = q;
        dy[1] = a * e * pot + (1.0 - 0.5 * a) * l * l * cent;
        dy[2] = l * om;
        dy[3] = dt;
        dy[4] = ((1.0 - 0.5 * a) * x).exp() * (0.5 * q * q + 1.0) + 0.5 * l * l * om;
        let dq_dx = a * a * e * pot + (1.0 - 0.5 * a) * (a - 2.0) * l * l * cent;
        for (off, wrt_l) in [(5, false), (9, true)] {
            let sx = y[off];
            dy[off] = y[off + 1];
            dy[off + 1] = dq_dx * sx;
            dy[off + 2] = 0.5 * (a - 2.0) * l * om * sx;
            dy[off + 3] = (1.0 + 0.5 * a) * dt * sx;
            if wrt_l {
                dy[off + 1] += a * l * pot + (2.0 - a) * l * cent;
                dy[off + 2] += om;
            } else {
                dy[off + 1] += a * v * pot;
            }
        }
    }

    fn solout(&mut self, _s: f64, y: &State, _dy: &State) -> bool {
        !valid(y) || self.t_stop.is_some_and(|t| y[3] >= t)
    }
}

fn initial(v: f64) -> State {
    let mut y = State::zeros();
    y[1] = v;
    y[6] = 1.0;
    y
}

fn valid(y: &State) -> bool {
    y[0] > -600.0 && y.iter().all(|v| v.is_finite())
}

/// States at `samples` equally spaced values of s in [0, s_end].
fn flow(alpha: f64, v: f64, l: f64, s_end: f64, samples: usize, o: &ShootingOptions) -> Option<(Vec<f64>, Vec<State>)> {
    let sys = Regularized::new(alpha, v, l, None);
    let ds = s_end / (samples.max(2) - 1) as f64;
    let mut st = Dop853::new(sys, 0.0, s_end, ds, initial(v), o.rtol, o.atol);
    if samples <= 2 {
        // dense output over a single interval extrapolates wrongly
        st.set_output(OutputType::Sparse);
    }
    st.integrate().ok()?;
    let (s, y) = (st.x_out().clone(), st.y_out().clone());
    let done = (*s.last()? - s_end).abs() <= 1e-9 * s_end;
    (done && y.iter().all(valid)).then_some((s, y))
}

/// Value of s at which t first reaches `t_end`.
fn crossing(alpha: f64, v: f64, l: f64, t_end: f64, o: &ShootingOptions) -> Option<f64> {
    let sys = Regularized::new(alpha, v, l, Some(t_end));
    let s_max = 1e4 * t_end;
    let mut st = Dop853::new(sys, 0.0, s_max, s_max, initial(v), o.rtol, o.atol);
    st.set_output(OutputType::Sparse);
    st.integrate().ok()?;
    let (ss, ys) = (st.x_out(), st.y_out());
    let n = ss.len();
    if n < 2 || !valid(&ys[n - 1]) || ys[n - 1][3] < t_end {
        return None;
    }
    // t is increasing in s: safeguarded Newton inside the last step
    let (mut lo, mut hi) = (ss[n - 2], ss[n - 1]);
    let mut s = hi - (ys[n - 1][3] - t_end) / ((1.0 + 0.5 * alpha) * ys[n - 1][0]).exp();
    for _ in 0..60 {
        if !(s > lo && s < hi) {
            s = 0.5 * (lo + hi);
        }
        let (_, y) = flow(alpha, v, l, s, 2, o)?;
        let y = *y.last()?;
        let f = y[3] - t_end;
        if f.abs() <= 1e-13 * t_end {
            return Some(s);
        }
        if f > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        s -= f / ((1.0 + 0.5 * alpha) * y[0]).exp();
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Some(s)
}

/// Unit-problem solution: initial radial velocity, angular momentum and
/// regularized length.
#[derive(Clone, Copy, Debug)]
struct Shot {
    v: f64,
    l: f64,
    sigma: f64,
    residual: f64,
}

fn unit_time(alpha: f64) -> f64 {
    2.0 * ejection_time(alpha, kepler_strength(alpha), 1.0)
}

/// Damped Newton on (ln r, θ − target, t − t_end) at s = σ over (v, l, σ).
fn newton(alpha: f64, target: f64, start: (f64, f64, f64), o: &ShootingOptions) -> Option<Shot> {
    let t_end = unit_time(alpha);
    let eval = |v: f64, l: f64, sigma: f64| -> Option<([f64; 3], Matrix3<f64>)> {
        let (_, y) = flow(alpha, v, l, sigma, 2, o)?;
        let y = *y.last()?;
        let res = [y[0], y[2] - target, y[3] - t_end];
        let jac = Matrix3::new(
            y[5], y[9], y[1],
            y[7], y[11], l * (0.5 * (alpha - 2.0) * y[0]).exp(),
            y[8], y[12], ((1.0 + 0.5 * alpha) * y[0]).exp(),
        );
        Some((res, jac))
    };
    let norm = |r: &[f64; 3]| r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let (mut v, mut l, mut sigma) = start;
    let (mut res, mut jac) = eval(v, l, sigma)?;
    for _ in 0..o.max_newton {
        if norm(&res) <= o.tol {
            break;
        }
        let step = jac.lu().solve(&Vector3::new(-res[0], -res[1], -res[2]))?;
        let mut lambda = 1.0;
        let mut next = None;
        while lambda > 1e-3 {
            let (nv, nl, ns) = (v + lambda * step[0], l + lambda * step[1], sigma + lambda * step[2]);
            // the swept angle has the sign of l
            if ns > 0.0 && (target == 0.0 || nl * target > 0.0) {
                if let Some((r, j)) = eval(nv, nl, ns) {
                    if norm(&r) < (1.0 - 1e-4 * lambda) * norm(&res) {
                        next = Some((nv, nl, ns, r, j));
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        (v, l, sigma, res, jac) = next?;
    }
    (norm(&res) <= o.tol).then_some(Shot {
        v,
        l,
        sigma,
        residual: norm(&res),
    })
}

fn shoot(alpha: f64, target: f64, v: f64, l: f64, o: &ShootingOptions) -> Option<Shot> {
    let sigma = crossing(alpha, v, l, unit_time(alpha), o)?;
    newton(alpha, target, (v, l, sigma), o)
}

/// Starting velocities from the near-circular and near-parabolic regimes.
fn seeds(alpha: f64, target: f64) -> Vec<(f64, f64)> {
    let vpar = 2f64.sqrt();
    let l0 = target / unit_time(alpha);
    let mut out = Vec::new();
    for f in [1.0, 0.1] {
        for g in [0.0, -0.9, 0.9] {
            out.push((g * vpar, f * l0));
        }
    }
    out
}

/// Follow the family of arcs in the swept angle from a short arc to `target`.
fn continuation(alpha: f64, target: f64, o: &ShootingOptions) -> Option<Shot> {
    let dir = if target < 0.0 { -1.0 } else { 1.0 };
    let mut theta = dir * target.abs().min(0.5);
    let t_end = unit_time(alpha);
    let mut cur = [(0.5, theta / t_end), (0.0, theta / t_end), (-0.5, theta / t_end)]
        .into_iter()
        .find_map(|(v, l)| shoot(alpha, theta, v, l, o))?;
    let mut prev: Option<(f64, Shot)> = None;
    let mut h = 0.25;
    for _ in 0..400 {
        if theta == target {
            return Some(cur);
        }
        let next = if (target - theta).abs() <= h { target } else { theta + dir * h };
        // secant predictor
        let guess = match prev {
            Some((tp, sp)) => {
                let w = (next - theta) / (theta - tp);
                (cur.v + w * (cur.v - sp.v), cur.l + w * (cur.l - sp.l), cur.sigma + w * (cur.sigma - sp.sigma))
            }
            None => (cur.v, cur.l, cur.sigma),
        };
        let solved = newton(alpha, next, guess, o).or_else(|| newton(alpha, next, (cur.v, cur.l, cur.sigma), o));
        match solved {
            Some(s) => {
                prev = Some((theta, cur));
                theta = next;
                cur = s;
                h = (h * 1.5).min(1.0);
                // the family ends in the collision-ejection path
                if cur.l.abs() < 1e-12 && target != 0.0 {
                    return None;
                }
            }
            None => {
                h *= 0.5;
                if h < 1e-6 {
                    return None;
                }
            }
        }
    }
    None
}

fn finish(problem: &ArcProblem, shot: Shot, o: &ShootingOptions) -> Result<ArcSolution> {
    let (alpha, rho) = (problem.alpha, problem.rho_bar);
    let kap = kappa(alpha, problem.strength());
    // x(t) = ρ̄·X(t/t0), action = √κ·ρ̄^{(2−α)/2}·(unit action)
    let t0 = rho.powf((2.0 + alpha) / 2.0) / kap.sqrt();
    let (_, ys) = flow(alpha, shot.v, shot.l, shot.sigma, o.samples.max(3), o)
        .ok_or_else(|| Error::Numerical("arc integration failed on resampling".into()))?;
    let last = ys.last().unwrap();
    // energy and the size of its terms, both times r^α
    let energy = |y: &State| {
        let c = 0.5 * shot.l * shot.l * ((alpha - 2.0) * y[0]).exp();
        let k = 0.5 * y[1] * y[1];
        ((k - 1.0 + c) * (-alpha * y[0]).exp(), (k + 1.0 + c) * (-alpha * y[0]).exp())
    };
    let e0 = energy(&ys[0]).0;
    let energy_drift = ys
        .iter()
        .map(|y| {
            let (e, size) = energy(y);
            (e - e0).abs() / size
        })
        .fold(0.0, f64::max);
    let t_end = unit_time(alpha);
    let tau = t0 * t_end / 2.0;
    Ok(ArcSolution {
        k: ((last[2] - problem.phi) / TAU).round() as i64,
        swept_angle: last[2],
        action: kap.sqrt() * rho.powf((2.0 - alpha) / 2.0) * last[4],
        boundary_residual: last[0]
            .exp_m1()
            .abs()
            .max((last[2] - problem.target_angle()).abs())
            .max((last[3] - t_end).abs() / t_end),
        radial_velocity: shot.v * rho / t0,
        angular_momentum: shot.l * rho * rho / t0,
        min_radius: rho * ys.iter().map(|y| y[0]).fold(f64::INFINITY, f64::min).exp(),
        energy_drift,
        tau,
        times: ys.iter().map(|y| y[3] * t0 - tau).collect(),
        points: ys
            .iter()
            .map(|y| {
                let r = rho * y[0].exp();
                [r * y[2].cos(), r * y[2].sin()]
            })
            .collect(),
    })
}

fn push_distinct(found: &mut Vec<Shot>, s: Shot) {
    let scale = 2f64.sqrt();
    if !found
        .iter()
        .any(|d| ((d.v - s.v) / scale).hypot((d.l - s.l) / scale) < 1e-5)
    {
        found.push(s);
    }
}

/// Distinct arcs sweeping the problem's target angle, from continuation
/// and from the multistart seeds, and the number of starts tried.
fn arcs_with_winding(problem: &ArcProblem, o: &ShootingOptions) -> (Vec<Shot>, usize) {
    let (alpha, target) = (problem.alpha, problem.target_angle());
    let seeds = seeds(alpha, target);
    let mut found = Vec::new();
    if let Some(s) = continuation(alpha, target, o) {
        push_distinct(&mut found, s);
    }
    let shots: Vec<Shot> = seeds
        .par_iter()
        .filter_map(|&(v, l)| shoot(alpha, target, v, l, o))
        .collect();
    for s in shots {
        push_distinct(&mut found, s);
    }
    (found, seeds.len() + 1)
}

/// Connecting arc of the given winding over [−τ(0), τ(0)], by damped
/// Newton shooting on the initial radial velocity and angular momentum.
pub fn solve_arc(problem: &ArcProblem, opts: &ShootingOptions) -> Result<ArcSolution> {
    problem.validate()?;
    let (shots, tried) = arcs_with_winding(problem, opts);
    let best = shots
        .into_iter()
        .min_by(|a, b| a.residual.total_cmp(&b.residual))
        .ok_or_else(|| {
            Error::Search(format!(
                "shooting for k = {} did not converge from {tried} starts",
                problem.k
            ))
        })?;
    finish(problem, best, opts)
}

/// Every connecting arc found by multistart shooting, scanning one winding
/// beyond each end of the admissible range. Sorted by k.
pub fn find_arcs(
    alpha: f64,
    rho_bar: f64,
    phi: f64,
    c_coeff: Option<f64>,
    opts: &ShootingOptions,
) -> Result<Vec<ArcSolution>> {
    let count = arc_count(alpha, phi)?;
    let mut out = Vec::new();
    for k in count.k_min - 1..=count.k_max + 1 {
        let problem = ArcProblem {
            alpha,
            rho_bar,
            phi,
            k,
            c_coeff,
        };
        for shot in arcs_with_winding(&problem, opts).0 {
            out.push(finish(&problem, shot, opts)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct MarchalReport {
    pub alpha: f64,
    pub rho_bar: f64,
    pub phi: f64,
    pub count: ArcCount,
    pub collision_action: f64,
    pub arcs: Vec<ArcSolution>,
    /// Every arc has action below the collision-ejection path.
    pub holds: bool,
    /// Whether the strict inequality is claimed. At α = 1 the arcs are
    /// Keplerian and only the two-arc count is asserted.
    pub strict: bool,
}

/// Compare the action of every connecting arc with the collision-ejection path.
pub fn marchal_check(alpha: f64, rho_bar: f64, phi: f64, opts: &ShootingOptions) -> Result<MarchalReport> {
    let count = arc_count(alpha, phi)?;
    let arcs = find_arcs(alpha, rho_bar, phi, None, opts)?;
    if arcs.is_empty() {
        return Err(Error::Search("no connecting arc was found".into()));
    }
    let collision_action = collision_action(alpha, kepler_strength(alpha), rho_bar);
    let holds = arcs.iter().all(|a| a.action < collision_action);
    Ok(MarchalReport {
        alpha,
        rho_bar,
        phi,
        count,
        collision_action,
        arcs,
        holds,
        strict: alpha > 1.0,
    })
}
