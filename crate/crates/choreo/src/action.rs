//! Discretized action functionals on loops of the generating particle.

use std::io::Write;

use crate::error::{Error, Result};
use crate::groups::{Mat3, RotationGroup, Vec3};
use crate::homotopy::{ConeKind, ConeSpec};

/// Nodes of a T-periodic path at times `j·T/n`. Node `n` wraps to node 0.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopPath {
    pub nodes: Vec<Vec3>,
    pub period: f64,
}

impl LoopPath {
    pub fn new(nodes: Vec<Vec3>, period: f64) -> Self {
        LoopPath { nodes, period }
    }

    /// Sample `f(t)` at `n` uniform times.
    pub fn sample(n: usize, period: f64, f: impl Fn(f64) -> Vec3) -> Self {
        LoopPath {
            nodes: (0..n).map(|j| f(j as f64 * period / n as f64)).collect(),
            period,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.period / self.nodes.len() as f64
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.step()
    }

    /// Twice as many nodes, the new ones at segment midpoints.
    pub fn refined(&self) -> Self {
        let n = self.len();
        let nodes = (0..2 * n)
            .map(|j| {
                let a = self.nodes[(j / 2) % n];
                if j % 2 == 0 {
                    a
                } else {
                    (a + self.nodes[(j / 2 + 1) % n]) * 0.5
                }
            })
            .collect();
        LoopPath {
            nodes,
            period: self.period,
        }
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        LoopPath {
            nodes: self.nodes.iter().map(|x| x * lambda).collect(),
            period: self.period,
        }
    }

    pub fn transformed(&self, m: &Mat3) -> Self {
        LoopPath {
            nodes: self.nodes.iter().map(|x| m * x).collect(),
            period: self.period,
        }
    }

    /// Velocity on [t_j, t_{j+1}].
    pub fn velocity(&self, j: usize) -> Vec3 {
        let n = self.len();
        (self.nodes[(j + 1) % n] - self.nodes[j]) / self.step()
    }

    pub fn min_norm(&self) -> f64 {
        self.nodes
            .iter()
            .map(|x| x.norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_collision_distance(&self, group: &RotationGroup) -> f64 {
        self.nodes
            .iter()
            .map(|x| group.collision_distance(x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "x", "y", "z"]).map_err(csv_err)?;
        for (j, x) in self.nodes.iter().enumerate() {
            wr.write_record([fmt(self.time(j)), fmt(x.x), fmt(x.y), fmt(x.z)])
                .map_err(csv_err)?;
        }
        wr.flush()?;
        Ok(())
    }

    /// All bodies: body 0 is the central body, body `i + 1` is `elements[i]·u`.
    pub fn write_constellation_csv<W: Write>(&self, group: &RotationGroup, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "body", "x", "y", "z"])
            .map_err(csv_err)?;
        for (j, x) in self.nodes.iter().enumerate() {
            let t = fmt(self.time(j));
            wr.write_record([t.clone(), "0".into(), fmt(0.0), fmt(0.0), fmt(0.0)])
                .map_err(csv_err)?;
            for (b, r) in group.elements.iter().enumerate() {
                let y = r * x;
                wr.write_record([t.clone(), (b + 1).to_string(), fmt(y.x), fmt(y.y), fmt(y.z)])
                    .map_err(csv_err)?;
            }
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(r: R, period: f64) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let mut nodes = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(csv_err)?;
            let v: Vec<f64> = rec
                .iter()
                .skip(1)
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::config("csv", e.to_string()))
                })
                .collect::<Result<_>>()?;
            if v.len() != 3 {
                return Err(Error::config("csv", "expected columns t,x,y,z"));
            }
            nodes.push(Vec3::new(v[0], v[1], v[2]));
        }
        Ok(LoopPath { nodes, period })
    }
}

/// Float formatting for machine-readable output (17 significant digits).
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::config("csv", e.to_string())
}

/// Kinetic, central and mutual parts of an action value.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct ActionBreakdown {
    pub kinetic: f64,
    pub central: f64,
    pub mutual: f64,
    pub total: f64,
}

/// `scale·∫(|u̇|²/2 + c/|u|^α + μ·Σ_{R≠I} |(R−I)u|^{−α})`.
#[derive(Clone, Debug)]
pub struct Functional {
    pub scale: f64,
    pub central: f64,
    pub mutual: f64,
    pub alpha: f64,
    /// `(R − I)ᵀ(R − I)` for every R ≠ I, with `R − I`.
    ops: Vec<(Mat3, Mat3)>,
}

impl Functional {
    pub fn new(group: &RotationGroup, scale: f64, central: f64, mutual: f64, alpha: f64) -> Self {
        let ops = if mutual == 0.0 {
            vec![]
        } else {
            group
                .non_identity()
                .map(|r| {
                    let d = r - Mat3::identity();
                    (d, d.transpose() * d)
                })
                .collect()
        };
        Functional {
            scale,
            central,
            mutual,
            alpha,
            ops,
        }
    }

    /// The action of the cone: N·∫(|u̇|²/2 + m₀/|u|^α + ½Σ|(R−I)u|^{−α}).
    pub fn physical(cone: &ConeSpec) -> Self {
        let g = cone.group();
        Functional::new(g, g.order() as f64, cone.m0, 0.5, cone.alpha)
    }

    /// ∫(|v̇|²/2 + 1/|v|^α + (ε/2)Σ|(R−I)v|^{−α}); the mutual part is dropped at ε = 0.
    pub fn rescaled(cone: &ConeSpec, eps: f64) -> Self {
        Functional::new(cone.group(), 1.0, 1.0, 0.5 * eps, cone.alpha)
    }

    /// Central and mutual potential at one point.
    pub fn potential(&self, x: &Vec3) -> Option<(f64, f64)> {
        let a = self.alpha;
        let r = x.norm();
        let mut c = 0.0;
        if self.central != 0.0 {
            if r <= 1e-300 {
                return None;
            }
            c = self.central * r.powf(-a);
        }
        let mut m = 0.0;
        for (d, _) in &self.ops {
            let s = (d * x).norm();
            if s <= 1e-12 * r || s == 0.0 {
                return None;
            }
            m += s.powf(-a);
        }
        Some((c, self.mutual * m))
    }

    /// ∇ of the potential at one point.
    pub fn potential_gradient(&self, x: &Vec3) -> Vec3 {
        let a = self.alpha;
        let r2 = x.norm_squared();
        let mut g = Vec3::zeros();
        if self.central != 0.0 {
            g -= x * (self.central * a * r2.powf(-(a + 2.0) / 2.0));
        }
        for (d, dtd) in &self.ops {
            let s2 = (d * x).norm_squared();
            g -= dtd * x * (self.mutual * a * s2.powf(-(a + 2.0) / 2.0));
        }
        g
    }

    /// Positive semidefinite part of ∇²V at one point: the rank-one terms
    /// of each power law, which carry the stiffness near collisions.
    pub fn curvature(&self, x: &Vec3) -> Mat3 {
        let a = self.alpha;
        let mut k = Mat3::zeros();
        if self.central != 0.0 {
            let r2 = x.norm_squared();
            k += x * x.transpose() * (self.central * a * (a + 2.0) * r2.powf(-(a + 4.0) / 2.0));
        }
        for (_, dtd) in &self.ops {
            let qx = dtd * x;
            let s2 = x.dot(&qx);
            k += qx * qx.transpose() * (self.mutual * a * (a + 2.0) * s2.powf(-(a + 4.0) / 2.0));
        }
        k
    }

    /// 𝒜(y) − 𝒜(x) evaluated without cancellation, for nearby loops.
    pub fn difference(&self, x: &LoopPath, y: &LoopPath) -> Result<f64> {
        let n = x.len();
        let h = x.step();
        let a = self.alpha;
        let mut kin = Sum::default();
        let mut pot = Sum::default();
        for j in 0..n {
            let dx = x.nodes[(j + 1) % n] - x.nodes[j];
            let dy = y.nodes[(j + 1) % n] - y.nodes[j];
            kin.add((dy - dx).dot(&(dy + dx)));
            let (p, q) = (x.nodes[j], y.nodes[j]);
            let (dif, sum) = (q - p, q + p);
            if self.central != 0.0 {
                let v = inv_pow_diff(p.norm_squared(), dif.dot(&sum), a)
                    .ok_or(Error::InfinitePotential { node: j })?;
                pot.add(self.central * v);
            }
            for (d, _) in &self.ops {
                let v = inv_pow_diff((d * p).norm_squared(), (d * dif).dot(&(d * sum)), a)
                    .ok_or(Error::InfinitePotential { node: j })?;
                pot.add(self.mutual * v);
            }
        }
        Ok(self.scale * (kin.value() / (2.0 * h) + h * pot.value()))
    }

    pub fn evaluate(&self, path: &LoopPath) -> Result<ActionBreakdown> {
        let n = path.len();
        let h = path.step();
        let mut kin = 0.0;
        let mut cen = 0.0;
        let mut mutual = 0.0;
        for j in 0..n {
            let d = path.nodes[(j + 1) % n] - path.nodes[j];
            kin += d.norm_squared();
            let (c, m) = self
                .potential(&path.nodes[j])
                .ok_or(Error::InfinitePotential { node: j })?;
            cen += c;
            mutual += m;
        }
        let kinetic = self.scale * kin / (2.0 * h);
        let central = self.scale * h * cen;
        let mutual = self.scale * h * mutual;
        Ok(ActionBreakdown {
            kinetic,
            central,
            mutual,
            total: kinetic + central + mutual,
        })
    }

    /// Gradient with respect to every node.
    pub fn gradient(&self, path: &LoopPath) -> Result<Vec<Vec3>> {
        let n = path.len();
        let h = path.step();
        let mut g = Vec::with_capacity(n);
        for j in 0..n {
            let x = &path.nodes[j];
            self.potential(x)
                .ok_or(Error::InfinitePotential { node: j })?;
            let lap = 2.0 * x - path.nodes[(j + n - 1) % n] - path.nodes[(j + 1) % n];
            g.push((lap / h + self.potential_gradient(x) * h) * self.scale);
        }
        Ok(g)
    }
}

/// (a² + d)^{−α/2} − a^{−α} with `a2 = a²`, accurate when |d| ≪ a².
fn inv_pow_diff(a2: f64, d: f64, alpha: f64) -> Option<f64> {
    let r = d / a2;
    if !(a2 > 0.0) || !(r > -1.0) || !r.is_finite() {
        return None;
    }
    Some(a2.powf(-alpha / 2.0) * (-(alpha / 2.0) * r.ln_1p()).exp_m1())
}

/// Neumaier compensated summation.
#[derive(Default)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    fn add(&mut self, v: f64) {
        let t = self.s + v;
        if self.s.abs() >= v.abs() {
            self.c += (self.s - t) + v;
        } else {
            self.c += (v - t) + self.s;
        }
        self.s = t;
    }

    fn value(&self) -> f64 {
        self.s + self.c
    }
}

pub fn action(path: &LoopPath, cone: &ConeSpec) -> Result<ActionBreakdown> {
    Functional::physical(cone).evaluate(path)
}

pub fn rescaled_action_eps(path: &LoopPath, cone: &ConeSpec, eps: f64) -> Result<ActionBreakdown> {
    if eps < 0.0 {
        return Err(Error::Invalid("epsilon must be nonnegative".into()));
    }
    Functional::rescaled(cone, eps).evaluate(path)
}

pub fn gradient(path: &LoopPath, cone: &ConeSpec) -> Result<Vec<Vec3>> {
    Functional::physical(cone).gradient(path)
}

/// β = 1/(2 + α), the exponent relating u = m₀^β v.
pub fn rescale_parameter(alpha: f64) -> Result<f64> {
    if !(1.0..2.0).contains(&alpha) {
        return Err(Error::Invalid("alpha must lie in [1, 2)".into()));
    }
    Ok(1.0 / (2.0 + alpha))
}

/// δ²𝒜 of the rotating square along w = cos(ωt)·e₃.
pub fn second_variation_vertical(m0: f64, period: f64) -> f64 {
    let w = std::f64::consts::TAU / period;
    let s2 = std::f64::consts::SQRT_2;
    w * w * period / 2.0 * (1.0 - (s2 + m0) / (1.0 / s2 + 0.25 + m0))
}

/// Symmetry constraints on the nodes of a loop.
#[derive(Clone, Debug)]
pub enum SymmetryReduction {
    Italian,
    KleinReflections,
    Extra { r: Mat3, m: usize },
}

impl SymmetryReduction {
    pub fn for_cone(cone: &ConeSpec) -> Option<Self> {
        match &cone.kind {
            ConeKind::Italian => Some(SymmetryReduction::Italian),
            ConeKind::Klein => Some(SymmetryReduction::KleinReflections),
            ConeKind::Platonic { extra, .. } => extra.map(|e| SymmetryReduction::Extra {
                r: cone.group().elements[e.element],
                m: e.m,
            }),
        }
    }

    fn period_divisor(&self) -> usize {
        match self {
            SymmetryReduction::Italian => 2,
            SymmetryReduction::KleinReflections => 4,
            SymmetryReduction::Extra { m, .. } => *m,
        }
    }

    pub fn check_nodes(&self, n: usize) -> Result<()> {
        if n == 0 || n % self.period_divisor() != 0 {
            return Err(Error::Invalid(format!(
                "{n} nodes are not divisible by {}",
                self.period_divisor()
            )));
        }
        Ok(())
    }

    /// Each node's orbit under the constraint as (node index, matrix) pairs
    /// such that `u_j = S·u_k` for every entry (k, S) of node j's orbit.
    fn orbit(&self, n: usize, j: usize) -> Vec<(usize, Mat3)> {
        let id = Mat3::identity();
        match self {
            SymmetryReduction::Italian => vec![(j, id), ((j + n / 2) % n, -id)],
            SymmetryReduction::KleinReflections => {
                let r3 = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
                let r2 = Mat3::from_diagonal(&Vec3::new(1.0, -1.0, 1.0));
                vec![
                    (j, id),
                    ((n - j) % n, r3),
                    ((n / 2 + n - j) % n, r2),
                    ((n / 2 + j) % n, r2 * r3),
                ]
            }
            SymmetryReduction::Extra { r, m } => {
                let mut out = Vec::with_capacity(*m);
                let mut p = id;
                // u_j = R^{-s} u_{j + s n / M}
                for s in 0..*m {
                    out.push(((j + s * n / m) % n, p.transpose()));
                    p = r * p;
                }
                out
            }
        }
    }

    /// Group average over the constraint orbit; idempotent.
    pub fn apply(&self, path: &LoopPath) -> Result<LoopPath> {
        let n = path.len();
        self.check_nodes(n)?;
        let nodes = (0..n)
            .map(|j| {
                let orb = self.orbit(n, j);
                let sum: Vec3 = orb.iter().map(|(k, s)| s * path.nodes[*k]).sum();
                sum / orb.len() as f64
            })
            .collect();
        Ok(LoopPath {
            nodes,
            period: path.period,
        })
    }

    /// Largest deviation of a node from its constrained value.
    pub fn violation(&self, path: &LoopPath) -> f64 {
        let n = path.len();
        (0..n)
            .flat_map(|j| {
                self.orbit(n, j)
                    .into_iter()
                    .map(move |(k, s)| (path.nodes[j] - s * path.nodes[k]).norm())
            })
            .fold(0.0, f64::max)
    }
}

pub fn apply_symmetry_reduction(
    path: &LoopPath,
    reduction: &SymmetryReduction,
) -> Result<LoopPath> {
    reduction.apply(path)
}
