//! Planar loops through the origin: great circles off the axes.

use super::sequence::{cyclic_equal, reduce_cyclic, TriangleSequence};
use super::{ConeKind, ConeSpec};
use crate::error::Result;
use crate::groups::{RotationGroup, Tessellation, Vec3};

fn orthonormal(n: &Vec3) -> (Vec3, Vec3) {
    let t = if n.x.abs() < 0.9 {
        Vec3::x()
    } else {
        Vec3::y()
    };
    let e1 = n.cross(&t).normalize();
    (e1, n.cross(&e1))
}

/// Reduced class of the great circle with unit normal `n`, which must avoid the poles.
pub fn great_circle_class(n: &Vec3, tess: &Tessellation) -> Vec<usize> {
    let (e1, e2) = orthonormal(n);
    let mut angles: Vec<f64> = Vec::new();
    for m in &tess.normals {
        let (a, b) = (m.dot(&e1), m.dot(&e2));
        let t = (-a).atan2(b).rem_euclid(std::f64::consts::PI);
        angles.push(t);
        angles.push(t + std::f64::consts::PI);
    }
    angles.sort_by(f64::total_cmp);
    let k = angles.len();
    let mut walk = Vec::with_capacity(k);
    for i in 0..k {
        let next = if i + 1 < k {
            angles[i + 1]
        } else {
            angles[0] + std::f64::consts::TAU
        };
        let mid = 0.5 * (angles[i] + next);
        let x = e1 * mid.cos() + e2 * mid.sin();
        if let Some(t) = tess.locate(&x) {
            if walk.last() != Some(&t) {
                walk.push(t);
            }
        }
    }
    if walk.len() > 1 && walk.first() == walk.last() {
        walk.pop();
    }
    reduce_cyclic(&walk)
}

/// One representative normal for every region of the arrangement of
/// great circles {n : n·a = 0} over the rotation axes a.
fn region_normals(group: &RotationGroup) -> Vec<Vec3> {
    let axes = group.axes();
    let mut verts: Vec<Vec3> = Vec::new();
    for i in 0..axes.len() {
        for j in i + 1..axes.len() {
            let v = axes[i].cross(&axes[j]).normalize();
            for w in [v, -v] {
                if !verts.iter().any(|u| (u - w).norm() < 1e-9) {
                    verts.push(w);
                }
            }
        }
    }
    let mut seen: Vec<Vec<bool>> = Vec::new();
    let mut out = Vec::new();
    for v in verts {
        let (f1, f2) = orthonormal(&v);
        let mut dirs: Vec<f64> = Vec::new();
        for a in axes.iter().filter(|a| a.dot(&v).abs() < 1e-9) {
            let t = v.cross(a);
            let th = t.dot(&f2).atan2(t.dot(&f1));
            dirs.push(th.rem_euclid(std::f64::consts::TAU));
            dirs.push((th + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU));
        }
        dirs.sort_by(f64::total_cmp);
        for i in 0..dirs.len() {
            let next = if i + 1 < dirs.len() {
                dirs[i + 1]
            } else {
                dirs[0] + std::f64::consts::TAU
            };
            let b = 0.5 * (dirs[i] + next);
            let n = (v + (f1 * b.cos() + f2 * b.sin()) * 1e-4).normalize();
            if axes.iter().any(|a| a.dot(&n).abs() < 1e-7) {
                continue;
            }
            let key: Vec<bool> = axes.iter().map(|a| a.dot(&n) > 0.0).collect();
            if !seen.contains(&key) {
                seen.push(key);
                out.push(n);
            }
        }
    }
    out
}

/// Distinct classes of great circles avoiding the axes, one orientation each region.
pub fn great_circle_classes(group: &RotationGroup, tess: &Tessellation) -> Vec<TriangleSequence> {
    let mut out: Vec<TriangleSequence> = Vec::new();
    for n in region_normals(group) {
        let c = TriangleSequence::new(great_circle_class(&n, tess));
        if !out.iter().any(|o| o.same_class(&c)) {
            out.push(c);
        }
    }
    out
}

fn is_power_of(w: &[usize], c: &[usize]) -> bool {
    if c.is_empty() || w.len() % c.len() != 0 {
        return false;
    }
    let rep: Vec<usize> = c.iter().cycle().take(w.len()).copied().collect();
    cyclic_equal(w, &rep)
}

/// Whether the cone contains a loop lying in a plane through the origin.
pub fn is_central(cone: &ConeSpec) -> Result<bool> {
    match cone.kind {
        // the horizontal circle satisfies the Italian symmetry
        ConeKind::Italian => Ok(true),
        // the quadrant conditions force u(0) and u(±T/4) to span all of space
        ConeKind::Klein => Ok(false),
        ConeKind::Platonic { .. } => {
            let w = cone.triangles()?.triangles;
            let tess = cone.geometry.tess()?;
            Ok(great_circle_classes(cone.group(), tess).iter().any(|c| {
                let mut r = c.triangles.clone();
                r.reverse();
                is_power_of(&w, &c.triangles) || is_power_of(&w, &r)
            }))
        }
    }
}
