//! Detection of loops leaving the cone.

use std::sync::Arc;

use crate::groups::Vec3;
use crate::homotopy::{ConeKind, ConeSpec, Geometry, TriangleSequence};

#[derive(Clone, Debug)]
pub enum Monitor {
    /// Reduced triangle sequence must stay in the target class.
    Class {
        geometry: Arc<Geometry>,
        target: TriangleSequence,
    },
    /// u(0) ∈ {x₁ > 0, x₂ > 0} and u(T/4) ∈ {x₁ < 0, x₃ > 0}.
    KleinQuadrants,
    /// Winding number around the collision axis.
    Winding { axis: Vec3, target: i64 },
}

impl Monitor {
    /// Monitor for `cone`, with the winding target read off `init` where needed.
    pub fn for_cone(cone: &ConeSpec, init: &[Vec3]) -> crate::Result<Self> {
        Ok(match cone.kind {
            ConeKind::Platonic { .. } => Monitor::Class {
                geometry: cone.geometry.clone(),
                target: cone.triangles()?,
            },
            ConeKind::Klein => Monitor::KleinQuadrants,
            ConeKind::Italian => {
                let axis = cone.group().axes()[0];
                let target = winding(&axis, init).ok_or_else(|| {
                    crate::Error::Invalid("the initial loop meets the collision axis".into())
                })?;
                Monitor::Winding { axis, target }
            }
        })
    }

    pub fn admits(&self, nodes: &[Vec3]) -> bool {
        match self {
            Monitor::Class { geometry, target } => {
                let Ok(tess) = geometry.tess() else {
                    return false;
                };
                TriangleSequence::from_points(nodes, tess).is_ok_and(|s| s.same_class(target))
            }
            Monitor::KleinQuadrants => {
                let q = nodes.len() / 4;
                let (a, b) = (nodes[0], nodes[q]);
                a.x > 0.0 && a.y > 0.0 && b.x < 0.0 && b.z > 0.0
            }
            Monitor::Winding { axis, target } => winding(axis, nodes) == Some(*target),
        }
    }
}

/// Winding number of the closed polyline around the line through the origin along `axis`.
pub fn winding(axis: &Vec3, nodes: &[Vec3]) -> Option<i64> {
    let a = axis.normalize();
    let e1 = if a.x.abs() < 0.9 {
        Vec3::x()
    } else {
        Vec3::y()
    };
    let e1 = (e1 - a * a.dot(&e1)).normalize();
    let e2 = a.cross(&e1);
    let mut total = 0.0;
    let n = nodes.len();
    let ang = |x: &Vec3| -> Option<f64> {
        let (p, q) = (x.dot(&e1), x.dot(&e2));
        (p.hypot(q) > 1e-12 * x.norm().max(1e-300)).then(|| q.atan2(p))
    };
    let mut prev = ang(&nodes[0])?;
    for j in 1..=n {
        let cur = ang(&nodes[j % n])?;
        let mut d = cur - prev;
        let pi = std::f64::consts::PI;
        if d > pi {
            d -= 2.0 * pi;
        } else if d < -pi {
            d += 2.0 * pi;
        }
        // a polyline step across the axis cannot be resolved
        if d.abs() > 0.9 * pi {
            return None;
        }
        total += d;
        prev = cur;
    }
    Some((total / std::f64::consts::TAU).round() as i64)
}
