//! Least total angle of a loop of circular arcs through rotation semi-axes
//! realizing a given class.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::{PI, TAU};

use super::{ConeKind, ConeSpec};
use crate::error::{Error, Result};
use crate::groups::{RotationGroup, Tessellation, Vec3};

/// Semi-axes visited in order and the arc angles between consecutive ones.
#[derive(Clone, Debug)]
pub struct AngleRoute {
    pub total: f64,
    pub semi_axes: Vec<Vec3>,
    /// `arcs[i]` joins `semi_axes[i]` to `semi_axes[i + 1]` (cyclically).
    pub arcs: Vec<f64>,
}

enum Arc {
    /// Runs inside the listed triangles, first one next to the start.
    Through(Vec<usize>),
    /// Lies on a tessellation edge.
    Edge,
}

fn arc_triangles(p: &Vec3, q: &Vec3, group: &RotationGroup, tess: &Tessellation) -> Option<Arc> {
    let c = p.dot(q).clamp(-1.0, 1.0);
    if c < -1.0 + 1e-9 || c > 1.0 - 1e-9 {
        return None;
    }
    let theta = c.acos();
    let w = (q - p * c).normalize();
    let nrm = p.cross(q).normalize();
    for pole in group.poles() {
        let r = pole.direction;
        if r.dot(&nrm).abs() < 1e-9 {
            let a = r.dot(&w).atan2(r.dot(p));
            if a > 1e-9 && a < theta - 1e-9 {
                return None;
            }
        }
    }
    let mut cuts = vec![0.0, theta];
    for m in &tess.normals {
        let (a, b) = (m.dot(p), m.dot(&w));
        if a.abs() < 1e-12 && b.abs() < 1e-12 {
            return Some(Arc::Edge);
        }
        let t0 = (-a).atan2(b).rem_euclid(PI);
        for t in [t0, t0 + PI] {
            if t > 1e-9 && t < theta - 1e-9 {
                cuts.push(t);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let mut tri: Vec<usize> = Vec::new();
    for pair in cuts.windows(2) {
        if pair[1] - pair[0] < 1e-12 {
            continue;
        }
        let mid = 0.5 * (pair[0] + pair[1]);
        let t = tess.locate(&(p * mid.cos() + w * mid.sin()))?;
        if tri.last() != Some(&t) {
            tri.push(t);
        }
    }
    Some(Arc::Through(tri))
}

#[derive(PartialEq)]
struct State(f64, usize, usize);

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0)
            .then_with(|| (o.1, o.2).cmp(&(self.1, self.2)))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Minimal total angle Δθ over loops of arcs through semi-axes in the
/// class of the cone, with the realizing semi-axes.
pub fn min_total_angle(cone: &ConeSpec) -> Result<AngleRoute> {
    match cone.kind {
        ConeKind::Klein => {
            let axes = vec![Vec3::y(), Vec3::z(), -Vec3::y(), -Vec3::z()];
            return Ok(AngleRoute {
                total: TAU,
                semi_axes: axes,
                arcs: vec![PI / 2.0; 4],
            });
        }
        ConeKind::Italian => {
            return Err(Error::Search(
                "the cone is central; no axis passage is forced".into(),
            ));
        }
        ConeKind::Platonic { .. } => {}
    }
    let group = cone.group();
    let tess = cone.geometry.tess()?;
    let w = cone.triangles()?.triangles;
    let l = w.len();
    if l == 0 {
        return Err(Error::Search("contractible class".into()));
    }
    let poles: Vec<Vec3> = group.poles().iter().map(|p| p.direction).collect();
    let np = poles.len();
    let arcs: Vec<Vec<Option<Arc>>> = (0..np)
        .map(|a| {
            (0..np)
                .map(|b| {
                    if a == b {
                        None
                    } else {
                        arc_triangles(&poles[a], &poles[b], group, tess)
                    }
                })
                .collect()
        })
        .collect();
    let angle = |a: usize, b: usize| poles[a].dot(&poles[b]).clamp(-1.0, 1.0).acos();
    let has = |j: usize, p: usize| tess.triangles[w[j % l]].vertices.contains(&p);

    let mut best: Option<(f64, Vec<usize>)> = None;
    for j0 in 0..l {
        for &p0 in &tess.triangles[w[j0]].vertices {
            // states are (offset from j0, pole)
            let mut dist: HashMap<(usize, usize), f64> = HashMap::new();
            let mut prev: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
            let mut heap = BinaryHeap::new();
            dist.insert((0, p0), 0.0);
            heap.push(State(0.0, 0, p0));
            while let Some(State(d, off, p)) = heap.pop() {
                if d > dist[&(off, p)] {
                    continue;
                }
                if off == l && p == p0 {
                    break;
                }
                if let Some((b, _)) = &best {
                    if d >= *b {
                        break;
                    }
                }
                let j = j0 + off;
                let mut push = |to: (usize, usize), nd: f64, heap: &mut BinaryHeap<State>| {
                    if to.0 <= l && nd < *dist.get(&to).unwrap_or(&f64::INFINITY) {
                        dist.insert(to, nd);
                        prev.insert(to, (off, p));
                        heap.push(State(nd, to.0, to.1));
                    }
                };
                if off < l && has(j + 1, p) {
                    push((off + 1, p), d, &mut heap);
                }
                for &q in &tess.triangles[w[j % l]].vertices {
                    if q != p {
                        if let Some(Some(Arc::Edge)) = arcs[p].get(q) {
                            push((off, q), d + angle(p, q), &mut heap);
                        }
                    }
                }
                for q in 0..np {
                    if let Some(Arc::Through(s)) = &arcs[p][q] {
                        let ok = !s.is_empty()
                            && off + s.len() - 1 <= l
                            && s.iter().enumerate().all(|(i, &t)| w[(j + i) % l] == t);
                        if ok {
                            push((off + s.len() - 1, q), d + angle(p, q), &mut heap);
                        }
                    }
                }
            }
            if let Some(&d) = dist.get(&(l, p0)) {
                if best.as_ref().is_none_or(|(b, _)| d < *b - 1e-12) {
                    let mut path = vec![p0];
                    let mut cur = (l, p0);
                    while cur != (0, p0) {
                        cur = prev[&cur];
                        path.push(cur.1);
                    }
                    path.reverse();
                    path.dedup();
                    path.pop();
                    best = Some((d, path));
                }
            }
        }
    }
    let (total, path) =
        best.ok_or_else(|| Error::Search("no arc loop realizes the class".into()))?;
    let k = path.len();
    let arcs_out: Vec<f64> = (0..k).map(|i| angle(path[i], path[(i + 1) % k])).collect();
    Ok(AngleRoute {
        total,
        semi_axes: path.iter().map(|&i| poles[i]).collect(),
        arcs: arcs_out,
    })
}
