//! Finite orthogonal groups, their poles, the collision set and the
//! reflection tessellation of the sphere.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat3 = Matrix3<f64>;
pub type Vec3 = Vector3<f64>;

const MAX_ORDER: usize = 200;
const SAME_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GroupTag {
    Z4,
    Z2N(usize),
    Klein,
    T,
    O,
    I,
    /// Built from user generators.
    Custom,
}

impl GroupTag {
    pub fn is_platonic(self) -> bool {
        matches!(self, GroupTag::T | GroupTag::O | GroupTag::I)
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupTag::Z4 => write!(f, "Z4"),
            GroupTag::Z2N(n) => write!(f, "Z2N:{n}"),
            GroupTag::Klein => write!(f, "KLEIN"),
            GroupTag::T => write!(f, "T"),
            GroupTag::O => write!(f, "O"),
            GroupTag::I => write!(f, "I"),
            GroupTag::Custom => write!(f, "CUSTOM"),
        }
    }
}

impl FromStr for GroupTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        match t.as_str() {
            "Z4" => Ok(GroupTag::Z4),
            "KLEIN" => Ok(GroupTag::Klein),
            "T" => Ok(GroupTag::T),
            "O" => Ok(GroupTag::O),
            "I" => Ok(GroupTag::I),
            _ => {
                if let Some(n) = t.strip_prefix("Z2N:") {
                    let n: usize = n
                        .parse()
                        .map_err(|_| Error::config("group", format!("bad Z2N order in {s:?}")))?;
                    if n < 2 {
                        return Err(Error::config("group", "Z2N needs N >= 2"));
                    }
                    Ok(GroupTag::Z2N(n))
                } else {
                    Err(Error::config("group", format!("unknown group tag {s:?}")))
                }
            }
        }
    }
}

impl TryFrom<String> for GroupTag {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GroupTag> for String {
    fn from(t: GroupTag) -> String {
        t.to_string()
    }
}

#[derive(Clone, Debug)]
pub struct Pole {
    pub direction: Vec3,
    pub order: usize,
}

/// Rotation about `axis` by `angle` (Rodrigues).
pub fn rotation(axis: Vec3, angle: f64) -> Mat3 {
    let a = axis.normalize();
    let k = Mat3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0);
    Mat3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}

/// Reflection across the plane through the origin with normal `n`.
pub fn reflection(n: Vec3) -> Mat3 {
    let n = n.normalize();
    Mat3::identity() - 2.0 * n * n.transpose()
}

pub fn is_orthogonal(m: &Mat3) -> bool {
    let d = m * m.transpose() - Mat3::identity();
    d.iter().all(|x| x.abs() <= 1e-12) && (m.determinant().abs() - 1.0).abs() <= 1e-12
}

pub(crate) fn same(a: &Mat3, b: &Mat3) -> bool {
    (a - b).iter().all(|x| x.abs() <= SAME_TOL)
}

fn sort_key(m: &Mat3) -> [i64; 9] {
    // row-major, rounded to 6 decimals
    let mut k = [0i64; 9];
    for r in 0..3 {
        for c in 0..3 {
            k[3 * r + c] = (m[(r, c)] * 1e6).round() as i64;
        }
    }
    k
}

fn find(list: &[Mat3], m: &Mat3) -> Option<usize> {
    list.iter().position(|x| same(x, m))
}

/// A finite subgroup of O(3) with precomputed multiplication table.
#[derive(Clone, Debug)]
pub struct RotationGroup {
    pub tag: GroupTag,
    pub elements: Vec<Mat3>,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    identity: usize,
    poles: Vec<Pole>,
    axes: Vec<Vec3>,
}

/// Closure of `generators` under multiplication.
pub fn generate_group(generators: &[Mat3]) -> Result<RotationGroup> {
    build(GroupTag::Custom, generators)
}

fn build(tag: GroupTag, generators: &[Mat3]) -> Result<RotationGroup> {
    for g in generators {
        if !g.iter().all(|x| x.is_finite()) || !is_orthogonal(g) {
            return Err(Error::Invalid("generator is not orthogonal".into()));
        }
    }
    let mut els = vec![Mat3::identity()];
    let mut frontier = vec![Mat3::identity()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for g in generators {
                let b = g * a;
                if find(&els, &b).is_none() {
                    if els.len() >= MAX_ORDER {
                        return Err(Error::GroupTooLarge(MAX_ORDER));
                    }
                    els.push(b);
                    next.push(b);
                }
            }
        }
        frontier = next;
    }
    els.sort_by_key(sort_key);
    let n = els.len();
    let mut mul = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            mul[i][j] = find(&els, &(els[i] * els[j]))
                .ok_or_else(|| Error::Numerical("group product left the closure".into()))?;
        }
    }
    let identity = find(&els, &Mat3::identity()).expect("identity present");
    let inv = (0..n)
        .map(|i| {
            (0..n)
                .find(|&j| mul[i][j] == identity)
                .expect("inverse exists")
        })
        .collect();
    let mut g = RotationGroup {
        tag,
        elements: els,
        mul,
        inv,
        identity,
        poles: vec![],
        axes: vec![],
    };
    g.compute_poles();
    Ok(g)
}

/// The groups used throughout the crate, with fixed generator conventions.
pub fn builtin_group(tag: GroupTag) -> RotationGroup {
    let z = Vec3::z();
    let flip = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
    let gens: Vec<Mat3> = match tag {
        GroupTag::Z4 => vec![Mat3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0)],
        GroupTag::Z2N(n) => {
            vec![flip * rotation(z, std::f64::consts::PI / n as f64)]
        }
        GroupTag::Klein => vec![
            Mat3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0)),
            Mat3::from_diagonal(&Vec3::new(-1.0, 1.0, -1.0)),
        ],
        GroupTag::T => vec![
            rotation(Vec3::new(1.0, 1.0, 1.0), 2.0 * std::f64::consts::PI / 3.0),
            rotation(z, std::f64::consts::PI),
        ],
        GroupTag::O => vec![
            rotation(Vec3::new(1.0, 1.0, 1.0), 2.0 * std::f64::consts::PI / 3.0),
            rotation(z, std::f64::consts::FRAC_PI_2),
        ],
        GroupTag::I => {
            let phi = (1.0 + 5f64.sqrt()) / 2.0;
            vec![
                rotation(Vec3::new(1.0, 1.0, 1.0), 2.0 * std::f64::consts::PI / 3.0),
                rotation(z, std::f64::consts::PI),
                rotation(Vec3::new(0.0, 1.0, phi), 2.0 * std::f64::consts::PI / 5.0),
            ]
        }
        GroupTag::Custom => vec![],
    };
    build(tag, &gens).expect("builtin generators are valid")
}

impl RotationGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.mul[i][j]
    }

    pub fn inv(&self, i: usize) -> usize {
        self.inv[i]
    }

    pub fn index_of(&self, m: &Mat3) -> Option<usize> {
        find(&self.elements, m)
    }

    /// Elements other than the identity.
    pub fn non_identity(&self) -> impl Iterator<Item = &Mat3> + '_ {
        let id = self.identity;
        self.elements
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != id)
            .map(|(_, m)| m)
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    /// One unit direction per rotation axis line.
    pub fn axes(&self) -> &[Vec3] {
        &self.axes
    }

    pub fn pole_index(&self, p: &Vec3) -> Option<usize> {
        self.poles
            .iter()
            .position(|q| (q.direction - p).norm() < 1e-7)
    }

    /// Index of `-p` in the pole list.
    pub fn antipode(&self, i: usize) -> usize {
        self.pole_index(&-self.poles[i].direction)
            .expect("pole set is symmetric")
    }

    /// Euclidean distance to the union of the fixed lines.
    pub fn collision_distance(&self, x: &Vec3) -> f64 {
        self.axes
            .iter()
            .map(|a| x.cross(a).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Nearest axis line to `x` with the distance to it.
    pub fn nearest_axis(&self, x: &Vec3) -> Option<(usize, f64)> {
        self.axes
            .iter()
            .enumerate()
            .map(|(i, a)| (i, x.cross(a).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    fn compute_poles(&mut self) {
        let mut dirs: Vec<Vec3> = Vec::new();
        for (i, r) in self.elements.iter().enumerate() {
            if i == self.identity || r.determinant() < 0.0 {
                continue;
            }
            let ax = rotation_axis(r);
            for p in [ax, -ax] {
                if !dirs.iter().any(|q| (q - p).norm() < 1e-7) {
                    dirs.push(p);
                }
            }
        }
        let mut poles: Vec<Pole> = dirs
            .into_iter()
            .map(|p| {
                let order = self
                    .elements
                    .iter()
                    .filter(|r| (*r * p - p).norm() < 1e-8)
                    .count();
                Pole {
                    direction: p,
                    order,
                }
            })
            .collect();
        poles.sort_by(|a, b| {
            b.order.cmp(&a.order).then_with(|| {
                let ka = a.direction.map(|x| (x * 1e6).round() as i64);
                let kb = b.direction.map(|x| (x * 1e6).round() as i64);
                kb.as_slice().cmp(ka.as_slice())
            })
        });
        let mut axes: Vec<Vec3> = Vec::new();
        for p in &poles {
            if !axes.iter().any(|a| a.cross(&p.direction).norm() < 1e-7) {
                axes.push(p.direction);
            }
        }
        self.poles = poles;
        self.axes = axes;
    }

    /// Conjugate every element by `q` (q·R·qᵀ).
    pub fn conjugated(&self, q: &Mat3) -> RotationGroup {
        let mut g = self.clone();
        g.tag = GroupTag::Custom;
        g.elements = self
            .elements
            .iter()
            .map(|r| q * r * q.transpose())
            .collect();
        g.compute_poles();
        g
    }
}

/// Unit axis of a proper rotation other than the identity.
pub fn rotation_axis(r: &Mat3) -> Vec3 {
    let w = Vec3::new(
        r[(2, 1)] - r[(1, 2)],
        r[(0, 2)] - r[(2, 0)],
        r[(1, 0)] - r[(0, 1)],
    );
    if w.norm() > 1e-6 {
        return w.normalize();
    }
    // half turn: R + I = 2 a aᵀ
    let s = r + Mat3::identity();
    let mut best = 0;
    for c in 1..3 {
        if s.column(c).norm() > s.column(best).norm() {
            best = c;
        }
    }
    s.column(best).normalize()
}

#[derive(Clone, Debug)]
pub struct Triangle {
    /// Pole indices ordered as (highest order, other, right-angle vertex).
    pub vertices: [usize; 3],
    /// Neighbour across the edge opposite to `vertices[i]`.
    pub neighbors: [usize; 3],
    pub mask: u64,
    /// A point strictly inside the triangle.
    pub interior: Vec3,
}

#[derive(Clone, Debug)]
pub struct Tessellation {
    pub triangles: Vec<Triangle>,
    pub reflections: Vec<Mat3>,
    /// Canonical unit normals of the mirror planes.
    pub normals: Vec<Vec3>,
    /// The extended group (rotations first, then reflected cosets).
    pub full_group: Vec<Mat3>,
    by_mask: HashMap<u64, usize>,
}

impl Tessellation {
    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn mask_of(&self, x: &Vec3) -> Option<u64> {
        let mut m = 0u64;
        for (i, n) in self.normals.iter().enumerate() {
            let d = n.dot(x);
            if d.abs() < 1e-12 * x.norm().max(1e-300) {
                return None;
            }
            if d > 0.0 {
                m |= 1 << i;
            }
        }
        Some(m)
    }

    /// Triangle containing the direction of `x`, if `x` is off every mirror.
    pub fn locate(&self, x: &Vec3) -> Option<usize> {
        self.mask_of(x).and_then(|m| self.by_mask.get(&m).copied())
    }

    pub fn triangle_by_mask(&self, m: u64) -> Option<usize> {
        self.by_mask.get(&m).copied()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.triangles[a].neighbors.contains(&b)
    }

    /// Sum of spherical areas of all triangles.
    pub fn total_area(&self, group: &RotationGroup) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.vertices.map(|i| group.poles()[i].direction);
                spherical_area(&a, &b, &c)
            })
            .sum()
    }
}

/// Area of the spherical triangle with unit vertices a, b, c.
pub fn spherical_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let num = a.dot(&b.cross(c)).abs();
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * num.atan2(den)
}

fn canonical_normal(n: Vec3) -> Vec3 {
    let n = n.normalize();
    for k in 0..3 {
        if n[k].abs() > 1e-9 {
            return if n[k] < 0.0 { -n } else { n };
        }
    }
    n
}

/// Spherical triangles cut by the mirror planes of the reflection-extended group.
pub fn full_group_tessellation(group: &RotationGroup) -> Result<Tessellation> {
    if !group.tag.is_platonic() {
        return Err(Error::UnsupportedGroup(group.tag.to_string()));
    }
    let axes = group.axes();
    let mut best: Option<(usize, Vec<Mat3>)> = None;
    let mut candidates: Vec<Vec3> = Vec::new();
    for i in 0..axes.len() {
        for j in i + 1..axes.len() {
            let n = canonical_normal(axes[i].cross(&axes[j]));
            if !candidates.iter().any(|m| (m - n).norm() < 1e-9) {
                candidates.push(n);
            }
        }
    }
    for n in candidates {
        let s = reflection(n);
        if !group
            .elements
            .iter()
            .all(|r| group.index_of(&(s * r * s)).is_some())
        {
            continue;
        }
        let full: Vec<Mat3> = group
            .elements
            .iter()
            .cloned()
            .chain(group.elements.iter().map(|r| s * r))
            .collect();
        let count = full
            .iter()
            .filter(|m| m.determinant() < 0.0 && (m.trace() - 1.0).abs() < 1e-9)
            .count();
        if best.as_ref().is_none_or(|(c, _)| count > *c) {
            best = Some((count, full));
        }
    }
    let (_, full) = best.ok_or_else(|| Error::Numerical("no compatible mirror plane".into()))?;
    let mut reflections = Vec::new();
    let mut normals: Vec<Vec3> = Vec::new();
    for m in &full {
        if m.determinant() < 0.0 && (m.trace() - 1.0).abs() < 1e-9 {
            reflections.push(*m);
            let p = (Mat3::identity() - m) / 2.0;
            let mut c = 0;
            for k in 1..3 {
                if p.column(k).norm() > p.column(c).norm() {
                    c = k;
                }
            }
            normals.push(canonical_normal(p.column(c).into_owned()));
        }
    }
    if normals.len() > 64 {
        return Err(Error::Numerical("too many mirror planes".into()));
    }

    // base chamber from a generic direction
    let g0 = Vec3::new(0.913, 0.347, 0.129).normalize();
    let sign = |x: &Vec3, n: &Vec3| n.dot(x).signum();
    let base: Vec<usize> = (0..group.poles().len())
        .filter(|&i| {
            let p = group.poles()[i].direction;
            normals.iter().all(|n| {
                let d = n.dot(&p);
                d.abs() < 1e-9 || sign(&p, n) == sign(&g0, n)
            })
        })
        .collect();
    if base.len() != 3 {
        return Err(Error::Numerical(format!(
            "base chamber has {} vertices",
            base.len()
        )));
    }
    let order = |i: usize| group.poles()[i].order;
    let c = *base
        .iter()
        .find(|&&i| order(i) == 2)
        .expect("right-angle vertex");
    let mut rest: Vec<usize> = base.iter().copied().filter(|&i| i != c).collect();
    rest.sort_by(|&a, &b| order(b).cmp(&order(a)).then(a.cmp(&b)));
    let base_tri = [rest[0], rest[1], c];

    let tmp = Tessellation {
        triangles: vec![],
        reflections: vec![],
        normals: normals.clone(),
        full_group: vec![],
        by_mask: HashMap::new(),
    };
    let mut triangles: Vec<Triangle> = Vec::new();
    let mut by_mask = HashMap::new();
    for f in &full {
        let m = tmp.mask_of(&(f * g0)).expect("generic point stays generic");
        if by_mask.contains_key(&m) {
            continue;
        }
        let vertices = base_tri.map(|i| {
            group
                .pole_index(&(f * group.poles()[i].direction))
                .expect("pole orbit is closed")
        });
        by_mask.insert(m, triangles.len());
        triangles.push(Triangle {
            vertices,
            neighbors: [usize::MAX; 3],
            mask: m,
            interior: f * g0,
        });
    }
    for a in 0..triangles.len() {
        for k in 0..3 {
            let shared: Vec<usize> = (0..3)
                .filter(|&j| j != k)
                .map(|j| triangles[a].vertices[j])
                .collect();
            let nb = (0..triangles.len()).find(|&b| {
                b != a && (triangles[a].mask ^ triangles[b].mask).count_ones() == 1 && {
                    let v = &triangles[b].vertices;
                    shared.iter().all(|s| v.contains(s))
                }
            });
            triangles[a].neighbors[k] =
                nb.ok_or_else(|| Error::Numerical("triangle without neighbour".into()))?;
        }
    }
    Ok(Tessellation {
        triangles,
        reflections,
        normals,
        full_group: full,
        by_mask,
    })
}
