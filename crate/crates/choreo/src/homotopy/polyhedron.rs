use crate::error::{Error, Result};
use crate::groups::{reflection, GroupTag, RotationGroup, Tessellation, Vec3};

/// Edge graph of the orbit of q. Vertex `i` is `elements[i]·q`.
#[derive(Clone, Debug)]
pub struct ArchimedeanPolyhedron {
    pub q: Vec3,
    pub q1: Vec3,
    pub q2: Vec3,
    /// Poles (A, B, C) of the base triangle containing q.
    pub base: [Vec3; 3],
    pub vertices: Vec<Vec3>,
    /// (i, j, type) with i < j.
    pub edges: Vec<(usize, usize, u8)>,
    pub edge_length: f64,
    /// Right multipliers taking vertex g to its neighbours, with edge types.
    pub steps: Vec<(usize, u8)>,
    adjacency: Vec<Vec<(usize, u8)>>,
}

impl ArchimedeanPolyhedron {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_type(&self, i: usize, j: usize) -> Option<u8> {
        self.adjacency
            .get(i)?
            .iter()
            .find(|(k, _)| *k == j)
            .map(|(_, t)| *t)
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, u8)] {
        &self.adjacency[i]
    }

    /// Vertex index of a point of the orbit.
    pub fn vertex_at(&self, x: &Vec3, tol: f64) -> Option<usize> {
        self.vertices.iter().position(|v| (v - x).norm() <= tol)
    }

    /// 8/(4 − ℓ²)
    pub fn ell_ratio(&self) -> f64 {
        8.0 / (4.0 - self.edge_length * self.edge_length)
    }
}

pub fn build_archimedean(
    group: &RotationGroup,
    tess: &Tessellation,
) -> Result<ArchimedeanPolyhedron> {
    if !group.tag.is_platonic() {
        return Err(Error::UnsupportedGroup(group.tag.to_string()));
    }
    // base triangle: the one produced by the identity
    let [a, b, c] = tess.triangles[0]
        .vertices
        .map(|i| group.poles()[i].direction);
    let n_ac = a.cross(&c).normalize();
    let n_bc = b.cross(&c).normalize();
    // equidistant from the planes OAC and OBC, on the edge AB
    let q = (b.dot(&n_ac).abs() * a + a.dot(&n_bc).abs() * b).normalize();
    let q1 = reflection(n_bc) * q;
    let q2 = reflection(n_ac) * q;
    let vertices: Vec<Vec3> = group.elements.iter().map(|g| g * q).collect();
    let find = |x: &Vec3| vertices.iter().position(|v| (v - x).norm() < 1e-9);
    let a1 = find(&q1).ok_or_else(|| Error::Numerical("q1 is not in the orbit of q".into()))?;
    let a2 = find(&q2).ok_or_else(|| Error::Numerical("q2 is not in the orbit of q".into()))?;
    // for T both sides join poles of order 3, so there is one side type
    let t2 = if group.tag == GroupTag::T { 1 } else { 2 };
    let mut steps = vec![
        (a1, 1u8),
        (group.inv(a1), 1u8),
        (a2, t2),
        (group.inv(a2), t2),
    ];
    steps.dedup();
    let n = vertices.len();
    let mut adjacency = vec![Vec::new(); n];
    let mut edges = Vec::new();
    for g in 0..n {
        for &(s, t) in &steps {
            let h = group.mul(g, s);
            if !adjacency[g].iter().any(|(k, _)| *k == h) {
                adjacency[g].push((h, t));
            }
            if g < h && !edges.iter().any(|&(i, j, _)| i == g && j == h) {
                edges.push((g, h, t));
            }
        }
    }
    let edge_length = (q - q1).norm();
    Ok(ArchimedeanPolyhedron {
        q,
        q1,
        q2,
        base: [a, b, c],
        vertices,
        edges,
        edge_length,
        steps,
        adjacency,
    })
}
