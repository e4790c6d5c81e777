//! Triangle sequences: chamber walks of closed polylines, cyclic reduction
//! and the winding conditions on them.

use crate::error::{Error, Result};
use crate::groups::{RotationGroup, Tessellation, Vec3};

/// Cyclic sequence of tessellation triangles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleSequence {
    pub triangles: Vec<usize>,
}

/// Triangles visited by the radial projection of the closed polyline through `points`.
pub fn chamber_walk(points: &[Vec3], tess: &Tessellation) -> Result<Vec<usize>> {
    let n = points.len();
    if n == 0 {
        return Ok(vec![]);
    }
    let mask = |x: &Vec3| -> u64 {
        let mut m = 0u64;
        for (i, nrm) in tess.normals.iter().enumerate() {
            if nrm.dot(x) >= 0.0 {
                m |= 1 << i;
            }
        }
        m
    };
    let lookup = |m: u64, x: &Vec3| {
        tess.triangle_by_mask(m)
            .ok_or(Error::DegenerateProjection([x.x, x.y, x.z]))
    };
    let mut cur = mask(&points[0]);
    let mut out = vec![lookup(cur, &points[0])?];
    let mut crossings: Vec<(f64, usize)> = Vec::new();
    for j in 0..n {
        let a = points[j];
        let b = points[(j + 1) % n];
        let mb = mask(&b);
        if mb == cur {
            continue;
        }
        crossings.clear();
        for (i, nrm) in tess.normals.iter().enumerate() {
            if (cur ^ mb) & (1 << i) != 0 {
                let da = nrm.dot(&a);
                let db = nrm.dot(&b);
                crossings.push((da / (da - db), i));
            }
        }
        crossings.sort_by(|x, y| x.0.total_cmp(&y.0));
        let len = (b - a).norm();
        for w in crossings.windows(2) {
            if (w[1].0 - w[0].0) * len < 1e-13 {
                let x = a + (b - a) * w[0].0;
                return Err(Error::DegenerateProjection([x.x, x.y, x.z]));
            }
        }
        for &(s, i) in &crossings {
            cur ^= 1 << i;
            let x = a + (b - a) * s;
            out.push(lookup(cur, &x)?);
        }
    }
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    Ok(out)
}

/// Remove back-and-forth steps, including across the wrap point. A
/// contractible loop reduces to the empty sequence.
pub fn reduce_cyclic(seq: &[usize]) -> Vec<usize> {
    let mut s: Vec<usize> = Vec::with_capacity(seq.len());
    for &t in seq {
        if s.last() == Some(&t) {
            continue;
        }
        if s.len() >= 2 && s[s.len() - 2] == t {
            s.pop();
            continue;
        }
        s.push(t);
    }
    loop {
        let n = s.len();
        if n >= 2 && s[0] == s[n - 1] {
            s.pop();
            continue;
        }
        if n == 2 {
            s.pop();
            continue;
        }
        if n >= 3 && s[n - 1] == s[1] {
            s.drain(0..2);
            continue;
        }
        if n >= 3 && s[n - 2] == s[0] {
            s.truncate(n - 2);
            continue;
        }
        break;
    }
    if s.len() <= 1 {
        s.clear();
    }
    s
}

/// Whether `b` is a cyclic rotation of `a`.
pub fn cyclic_equal(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..a.len()).any(|r| (0..a.len()).all(|i| a[(i + r) % a.len()] == b[i]))
}

impl TriangleSequence {
    pub fn new(triangles: Vec<usize>) -> Self {
        TriangleSequence { triangles }
    }

    pub fn from_points(points: &[Vec3], tess: &Tessellation) -> Result<Self> {
        Ok(TriangleSequence {
            triangles: reduce_cyclic(&chamber_walk(points, tess)?),
        })
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn is_adjacent_chain(&self, tess: &Tessellation) -> bool {
        let n = self.len();
        n < 2 || (0..n).all(|i| tess.adjacent(self.triangles[i], self.triangles[(i + 1) % n]))
    }

    pub fn same_class(&self, other: &TriangleSequence) -> bool {
        cyclic_equal(&self.triangles, &other.triangles)
    }

    /// Poles touched by the sequence.
    fn poles(&self, tess: &Tessellation) -> Vec<usize> {
        let mut p: Vec<usize> = self
            .triangles
            .iter()
            .flat_map(|&t| tess.triangles[t].vertices)
            .collect();
        p.sort_unstable();
        p.dedup();
        p
    }

    /// Maximal cyclic runs of consecutive triangles containing `pole`, as
    /// (start, length). A single run covering everything has length `usize::MAX`.
    fn runs(&self, tess: &Tessellation, pole: usize) -> Vec<(usize, usize)> {
        let n = self.len();
        let has = |i: usize| {
            tess.triangles[self.triangles[i % n]]
                .vertices
                .contains(&pole)
        };
        if n == 0 {
            return vec![];
        }
        if (0..n).all(has) {
            return vec![(0, usize::MAX)];
        }
        let mut out = Vec::new();
        for i in 0..n {
            if has(i) && !has(i + n - 1) {
                let mut len = 0;
                while has(i + len) {
                    len += 1;
                }
                out.push((i, len));
            }
        }
        out
    }

    pub fn is_alpha_simple(&self, tess: &Tessellation, group: &RotationGroup, alpha: f64) -> bool {
        let m = (1.0 / (2.0 - alpha) + 1e-9).floor() as usize;
        self.poles(tess).into_iter().all(|p| {
            let limit = 2 * m * group.poles()[p].order + 1;
            self.runs(tess, p).iter().all(|&(_, len)| len < limit)
        })
    }

    /// Whether the sequence only winds, in full turns, around two poles of a common triangle.
    pub fn is_tied_to_two_coboundary_axes(
        &self,
        tess: &Tessellation,
        group: &RotationGroup,
    ) -> bool {
        let n = self.len();
        if n == 0 {
            return false;
        }
        let poles = self.poles(tess);
        for (i, &p1) in poles.iter().enumerate() {
            for &p2 in &poles[i + 1..] {
                let common = self.triangles.iter().any(|&t| {
                    let v = &tess.triangles[t].vertices;
                    v.contains(&p1) && v.contains(&p2)
                });
                if !common {
                    continue;
                }
                let mut covered = vec![false; n];
                for p in [p1, p2] {
                    let o = group.poles()[p].order;
                    for (start, len) in self.runs(tess, p) {
                        if len >= 2 * o {
                            for k in 0..len.min(n) {
                                covered[(start + k) % n] = true;
                            }
                        }
                    }
                }
                if covered.iter().all(|&c| c) {
                    return true;
                }
            }
        }
        false
    }

    /// True if every triangle shares one pole (the loop only winds around one axis).
    pub fn winds_single_axis(&self, tess: &Tessellation) -> bool {
        self.poles(tess)
            .into_iter()
            .any(|p| self.runs(tess, p) == vec![(0, usize::MAX)])
    }

    /// Apply a rotation or reflection of the full group, given as an element of `tess.full_group`.
    pub fn transformed(&self, tess: &Tessellation, f: usize) -> TriangleSequence {
        let m = &tess.full_group[f];
        let triangles = self
            .triangles
            .iter()
            .map(|&t| {
                let c = centroid(tess, t);
                tess.locate(&(m * c)).expect("centroid stays interior")
            })
            .collect();
        TriangleSequence { triangles }
    }
}

fn centroid(tess: &Tessellation, t: usize) -> Vec3 {
    tess.triangles[t].interior
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction() {
        assert!(reduce_cyclic(&[1, 2, 1]).is_empty());
        assert!(reduce_cyclic(&[1, 2]).is_empty());
        assert!(reduce_cyclic(&[1, 2, 3, 2]).is_empty());
        assert_eq!(reduce_cyclic(&[7, 1, 2, 3, 4, 3, 2, 1]), Vec::<usize>::new());
        assert!(cyclic_equal(
            &reduce_cyclic(&[5, 1, 2, 3, 4, 1]),
            &[1, 2, 3, 4]
        ));
        assert_eq!(reduce_cyclic(&[1, 2, 3, 4]), vec![1, 2, 3, 4]);
        assert!(cyclic_equal(&[1, 2, 3], &[3, 1, 2]));
        assert!(!cyclic_equal(&[1, 2, 3], &[3, 2, 1]));
    }
}
