//! Vertex labels of the Archimedean polyhedra.
//!
//! A numbering maps labels `1..=n` to orbit vertices. Numberings are stored
//! as coordinate lists so they do not depend on the internal element order.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::polyhedron::ArchimedeanPolyhedron;
use crate::error::{Error, Result};
use crate::groups::{GroupTag, RotationGroup, Vec3};

#[derive(Clone, Debug, PartialEq)]
pub struct Numbering {
    /// `labels[l - 1]` is the vertex index carrying label `l`.
    pub labels: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct NumberingFile {
    group: GroupTag,
    vertices: Vec<[f64; 3]>,
}

const T_FILE: &str = include_str!("../../data/numbering/T.toml");
const O_FILE: &str = include_str!("../../data/numbering/O.toml");
const I_FILE: &str = include_str!("../../data/numbering/I.toml");

impl Numbering {
    /// Label `i + 1` on vertex `i`.
    pub fn canonical(n: usize) -> Self {
        Numbering {
            labels: (0..n).collect(),
        }
    }

    pub fn vertex(&self, label: usize) -> Result<usize> {
        if label == 0 || label > self.labels.len() {
            return Err(Error::config(
                "nu",
                format!("vertex label {label} out of range"),
            ));
        }
        Ok(self.labels[label - 1])
    }

    pub fn label(&self, vertex: usize) -> usize {
        self.labels
            .iter()
            .position(|&v| v == vertex)
            .expect("numbering is a bijection")
            + 1
    }

    pub fn from_toml(text: &str, poly: &ArchimedeanPolyhedron, tag: GroupTag) -> Result<Self> {
        let f: NumberingFile =
            toml::from_str(text).map_err(|e| Error::config("numbering", e.to_string()))?;
        if f.group != tag {
            return Err(Error::config(
                "numbering",
                format!("file is for group {}", f.group),
            ));
        }
        if f.vertices.len() != poly.vertex_count() {
            return Err(Error::config("numbering", "wrong number of vertices"));
        }
        let mut labels = Vec::with_capacity(f.vertices.len());
        for (i, v) in f.vertices.iter().enumerate() {
            let idx = poly
                .vertex_at(&Vec3::new(v[0], v[1], v[2]), 1e-6)
                .ok_or_else(|| {
                    Error::config("numbering", format!("label {} is not a vertex", i + 1))
                })?;
            if labels.contains(&idx) {
                return Err(Error::config(
                    "numbering",
                    format!("label {} repeats a vertex", i + 1),
                ));
            }
            labels.push(idx);
        }
        Ok(Numbering { labels })
    }

    pub fn load(path: &Path, poly: &ArchimedeanPolyhedron, tag: GroupTag) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?, poly, tag)
    }

    /// The shipped numbering for T, O or I.
    pub fn builtin(poly: &ArchimedeanPolyhedron, tag: GroupTag) -> Result<Self> {
        let text = match tag {
            GroupTag::T => T_FILE,
            GroupTag::O => O_FILE,
            GroupTag::I => I_FILE,
            _ => return Err(Error::UnsupportedGroup(tag.to_string())),
        };
        Self::from_toml(text, poly, tag)
    }

    pub fn to_toml(&self, poly: &ArchimedeanPolyhedron, tag: GroupTag) -> String {
        let vertices = self
            .labels
            .iter()
            .map(|&i| {
                let v = poly.vertices[i];
                [v.x, v.y, v.z]
            })
            .collect();
        toml::to_string(&NumberingFile {
            group: tag,
            vertices,
        })
        .expect("serializable")
    }
}

/// A labelled cycle with the counts it must realize.
#[derive(Clone, Debug)]
pub struct LabelledCycle {
    pub labels: Vec<usize>,
    pub m: usize,
    pub k1: usize,
}

/// Search for labels such that every cycle is an edge path whose step word
/// repeats with period `k / M` and has `k1` sides of type 1. Label 1 is
/// put on the vertex of the identity.
pub fn infer_numbering(
    group: &RotationGroup,
    poly: &ArchimedeanPolyhedron,
    cycles: &[LabelledCycle],
) -> Option<Numbering> {
    let mut lab: HashMap<usize, usize> = HashMap::new();
    let mut used: HashSet<usize> = HashSet::new();
    lab.insert(1, group.identity_index());
    used.insert(group.identity_index());
    let ctx = Ctx {
        group,
        poly,
        cycles,
    };
    if !ctx.cycle(0, &mut lab, &mut used) {
        return None;
    }
    let n = poly.vertex_count();
    if lab.keys().any(|&l| l > n) {
        return None;
    }
    let mut free = (0..n).filter(|v| !used.contains(v));
    let mut labels = Vec::with_capacity(n);
    for l in 1..=n {
        match lab.get(&l) {
            Some(&v) => labels.push(v),
            None => labels.push(free.next()?),
        }
    }
    Some(Numbering { labels })
}

struct Ctx<'a> {
    group: &'a RotationGroup,
    poly: &'a ArchimedeanPolyhedron,
    cycles: &'a [LabelledCycle],
}

impl Ctx<'_> {
    fn cycle(&self, ci: usize, lab: &mut HashMap<usize, usize>, used: &mut HashSet<usize>) -> bool {
        let Some(c) = self.cycles.get(ci) else {
            return true;
        };
        if c.m == 0 || c.labels.len() % c.m != 0 {
            return false;
        }
        if !lab.contains_key(&c.labels[0]) {
            // anchor an unlabelled start on any free vertex
            for v in 0..self.poly.vertex_count() {
                if used.contains(&v) {
                    continue;
                }
                lab.insert(c.labels[0], v);
                used.insert(v);
                if self.word(ci, 0, &mut Vec::new(), lab, used) {
                    return true;
                }
                lab.remove(&c.labels[0]);
                used.remove(&v);
            }
            return false;
        }
        self.word(ci, 0, &mut Vec::new(), lab, used)
    }

    fn word(
        &self,
        ci: usize,
        j: usize,
        word: &mut Vec<(usize, u8)>,
        lab: &mut HashMap<usize, usize>,
        used: &mut HashSet<usize>,
    ) -> bool {
        let c = &self.cycles[ci];
        let k = c.labels.len();
        let s = k / c.m;
        if j == s {
            return self.extend(ci, word, lab, used);
        }
        let cur = lab[&c.labels[j]];
        let next_label = c.labels[(j + 1) % k];
        for &(g, t) in &self.poly.steps {
            let nxt = self.group.mul(cur, g);
            word.push((g, t));
            let ok = match lab.get(&next_label) {
                Some(&v) => v == nxt && self.word(ci, j + 1, word, lab, used),
                None if used.contains(&nxt) => false,
                None => {
                    lab.insert(next_label, nxt);
                    used.insert(nxt);
                    let r = self.word(ci, j + 1, word, lab, used);
                    if !r {
                        lab.remove(&next_label);
                        used.remove(&nxt);
                    }
                    r
                }
            };
            word.pop();
            if ok {
                return true;
            }
        }
        false
    }

    fn extend(
        &self,
        ci: usize,
        word: &[(usize, u8)],
        lab: &mut HashMap<usize, usize>,
        used: &mut HashSet<usize>,
    ) -> bool {
        let c = &self.cycles[ci];
        let k = c.labels.len();
        let s = word.len();
        let mut added = Vec::new();
        let mut cur = lab[&c.labels[0]];
        let mut ones = 0;
        let mut ok = true;
        for t in 0..k {
            let (g, ty) = word[t % s];
            ones += usize::from(ty == 1);
            cur = self.group.mul(cur, g);
            let l = c.labels[(t + 1) % k];
            match lab.get(&l) {
                Some(&v) if v != cur => {
                    ok = false;
                    break;
                }
                Some(_) => {}
                None => {
                    if used.contains(&cur) {
                        ok = false;
                        break;
                    }
                    lab.insert(l, cur);
                    used.insert(cur);
                    added.push((l, cur));
                }
            }
        }
        if ok && ones == c.k1 && self.cycle(ci + 1, lab, used) {
            return true;
        }
        for (l, v) in added {
            lab.remove(&l);
            used.remove(&v);
        }
        false
    }
}
