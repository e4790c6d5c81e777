//! Free-homotopy classes of loops avoiding the rotation axes, encoded as
//! vertex sequences of an Archimedean polyhedron or as triangle sequences
//! of the tessellation.

mod angle;
mod central;
pub mod numbering;
mod polyhedron;
pub mod sequence;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

pub use angle::{min_total_angle, AngleRoute};
pub use central::{great_circle_classes, is_central};
pub use numbering::{infer_numbering, LabelledCycle, Numbering};
pub use polyhedron::{build_archimedean, ArchimedeanPolyhedron};
pub use sequence::{chamber_walk, cyclic_equal, reduce_cyclic, TriangleSequence};

use crate::action::LoopPath;
use crate::error::{Error, Result};
use crate::groups::{
    builtin_group, full_group_tessellation, GroupTag, RotationGroup, Tessellation, Vec3,
};

/// A group together with its tessellation and polyhedron when they exist.
#[derive(Debug)]
pub struct Geometry {
    pub group: RotationGroup,
    pub tess: Option<Tessellation>,
    pub poly: Option<ArchimedeanPolyhedron>,
}

impl Geometry {
    pub fn new(group: RotationGroup) -> Result<Self> {
        if group.tag.is_platonic() {
            let tess = full_group_tessellation(&group)?;
            let poly = build_archimedean(&group, &tess)?;
            Ok(Geometry {
                group,
                tess: Some(tess),
                poly: Some(poly),
            })
        } else {
            Ok(Geometry {
                group,
                tess: None,
                poly: None,
            })
        }
    }

    /// Shared instance for a builtin tag.
    pub fn builtin(tag: GroupTag) -> Arc<Geometry> {
        static CACHE: OnceLock<Mutex<HashMap<GroupTag, Arc<Geometry>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut map = cache.lock().expect("geometry cache poisoned");
        map.entry(tag)
            .or_insert_with(|| {
                Arc::new(Geometry::new(builtin_group(tag)).expect("builtin geometry"))
            })
            .clone()
    }

    pub fn tess(&self) -> Result<&Tessellation> {
        self.tess
            .as_ref()
            .ok_or_else(|| Error::UnsupportedGroup(self.group.tag.to_string()))
    }

    pub fn poly(&self) -> Result<&ArchimedeanPolyhedron> {
        self.poly
            .as_ref()
            .ok_or_else(|| Error::UnsupportedGroup(self.group.tag.to_string()))
    }
}

/// Per-period edge counts of a vertex cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SequenceCounts {
    pub k_nu: usize,
    pub k1: usize,
    pub k2: usize,
}

/// Drop a closing repeat of the first vertex.
pub fn open_cycle(nu: &[usize]) -> Vec<usize> {
    let mut v = nu.to_vec();
    if v.len() > 1 && v.first() == v.last() {
        v.pop();
    }
    v
}

/// Counts over the minimal period of the cyclic vertex sequence `nu`.
pub fn sequence_counts(nu: &[usize], poly: &ArchimedeanPolyhedron) -> Result<SequenceCounts> {
    let nu = open_cycle(nu);
    let k = nu.len();
    if k < 2 {
        return Err(Error::Invalid(
            "a vertex cycle needs at least two vertices".into(),
        ));
    }
    let p = (1..=k)
        .find(|&p| k % p == 0 && (0..k).all(|i| nu[i] == nu[(i + p) % k]))
        .unwrap_or(k);
    let (mut k1, mut k2) = (0, 0);
    for i in 0..p {
        let (a, b) = (nu[i], nu[(i + 1) % k]);
        match poly.edge_type(a, b) {
            Some(1) => k1 += 1,
            Some(_) => k2 += 1,
            None => return Err(Error::NotAdjacent(a, b)),
        }
    }
    Ok(SequenceCounts { k_nu: p, k1, k2 })
}

/// Closed polyline through the vertices of `nu`.
pub fn vertex_points(nu: &[usize], poly: &ArchimedeanPolyhedron) -> Vec<Vec3> {
    open_cycle(nu).iter().map(|&i| poly.vertices[i]).collect()
}

pub fn triangles_from_vertices(
    nu: &[usize],
    poly: &ArchimedeanPolyhedron,
    tess: &Tessellation,
) -> Result<TriangleSequence> {
    sequence_counts(nu, poly)?;
    TriangleSequence::from_points(&vertex_points(nu, poly), tess)
}

/// Constant-speed loop along the edges of `nu`, `samples` nodes per period.
pub fn test_loop(
    nu: &[usize],
    poly: &ArchimedeanPolyhedron,
    period: f64,
    samples: usize,
) -> Result<LoopPath> {
    let pts = vertex_points(nu, poly);
    let k = pts.len();
    if k == 0 || samples % k != 0 {
        return Err(Error::Invalid(format!(
            "samples ({samples}) must be a multiple of k ({k})"
        )));
    }
    sequence_counts(nu, poly)?;
    let per = samples / k;
    let mut nodes = Vec::with_capacity(samples);
    for e in 0..k {
        let (a, b) = (pts[e], pts[(e + 1) % k]);
        for i in 0..per {
            nodes.push(a + (b - a) * (i as f64 / per as f64));
        }
    }
    Ok(LoopPath::new(nodes, period))
}

/// Element R with `R·ν_j = ν_{j+k/M}` for all j, if any.
pub fn extra_symmetry_element(nu: &[usize], group: &RotationGroup, m: usize) -> Option<usize> {
    let nu = open_cycle(nu);
    let k = nu.len();
    if m == 0 || k % m != 0 {
        return None;
    }
    let s = k / m;
    let r = group.mul(nu[s % k], group.inv(nu[0]));
    (0..k)
        .all(|j| group.mul(r, nu[j]) == nu[(j + s) % k])
        .then_some(r)
}

/// Largest M for which `nu` has the extra symmetry.
pub fn max_extra_symmetry(nu: &[usize], group: &RotationGroup) -> (usize, usize) {
    let k = open_cycle(nu).len();
    (1..=k)
        .rev()
        .find_map(|m| extra_symmetry_element(nu, group, m).map(|r| (m, r)))
        .unwrap_or((1, group.identity_index()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtraSymmetry {
    /// Index into `group.elements`.
    pub element: usize,
    pub m: usize,
}

#[derive(Clone, Debug)]
pub enum ConeKind {
    /// u(t + T/2) = −u(t), for Z4 and Z2N.
    Italian,
    /// Reflection symmetries and quadrant conditions of the Klein cone.
    Klein,
    Platonic {
        nu: Vec<usize>,
        extra: Option<ExtraSymmetry>,
    },
}

#[derive(Clone, Debug)]
pub struct ConeSpec {
    pub geometry: Arc<Geometry>,
    pub kind: ConeKind,
    pub alpha: f64,
    pub period: f64,
    pub m0: f64,
}

impl ConeSpec {
    pub fn group(&self) -> &RotationGroup {
        &self.geometry.group
    }

    pub fn italian(tag: GroupTag, alpha: f64, period: f64, m0: f64) -> Result<Self> {
        if !matches!(tag, GroupTag::Z4 | GroupTag::Z2N(_)) {
            return Err(Error::config(
                "group",
                "the Italian symmetry needs Z4 or Z2N",
            ));
        }
        check_params(alpha, period, m0)?;
        Ok(ConeSpec {
            geometry: Geometry::builtin(tag),
            kind: ConeKind::Italian,
            alpha,
            period,
            m0,
        })
    }

    pub fn klein(alpha: f64, period: f64, m0: f64) -> Result<Self> {
        check_params(alpha, period, m0)?;
        Ok(ConeSpec {
            geometry: Geometry::builtin(GroupTag::Klein),
            kind: ConeKind::Klein,
            alpha,
            period,
            m0,
        })
    }

    /// Cone of a vertex cycle given by vertex indices.
    pub fn platonic(
        tag: GroupTag,
        nu: &[usize],
        m: Option<usize>,
        alpha: f64,
        period: f64,
        m0: f64,
    ) -> Result<Self> {
        check_params(alpha, period, m0)?;
        let geometry = Geometry::builtin(tag);
        let poly = geometry.poly()?;
        let nu = open_cycle(nu);
        if let Some(&bad) = nu.iter().find(|&&v| v >= poly.vertex_count()) {
            return Err(Error::config("nu", format!("vertex {bad} out of range")));
        }
        sequence_counts(&nu, poly)?;
        let tri = triangles_from_vertices(&nu, poly, geometry.tess()?)?;
        if tri.is_empty() || tri.winds_single_axis(geometry.tess()?) {
            return Err(Error::config(
                "nu",
                "the class winds around a single axis only",
            ));
        }
        let extra = match m {
            None | Some(1) => None,
            Some(m) => {
                let element = extra_symmetry_element(&nu, &geometry.group, m).ok_or_else(|| {
                    Error::config(
                        "M",
                        format!("the sequence has no extra symmetry with M = {m}"),
                    )
                })?;
                Some(ExtraSymmetry { element, m })
            }
        };
        Ok(ConeSpec {
            geometry,
            kind: ConeKind::Platonic { nu, extra },
            alpha,
            period,
            m0,
        })
    }

    /// Cone of a vertex cycle given by labels of the shipped numbering.
    pub fn platonic_labels(
        tag: GroupTag,
        labels: &[usize],
        m: Option<usize>,
        alpha: f64,
        period: f64,
        m0: f64,
    ) -> Result<Self> {
        let geometry = Geometry::builtin(tag);
        let numbering = Numbering::builtin(geometry.poly()?, tag)?;
        let nu = labels
            .iter()
            .map(|&l| numbering.vertex(l))
            .collect::<Result<Vec<_>>>()?;
        Self::platonic(tag, &nu, m, alpha, period, m0)
    }

    pub fn nu(&self) -> Option<&[usize]> {
        match &self.kind {
            ConeKind::Platonic { nu, .. } => Some(nu),
            _ => None,
        }
    }

    pub fn extra(&self) -> Option<ExtraSymmetry> {
        match &self.kind {
            ConeKind::Platonic { extra, .. } => *extra,
            _ => None,
        }
    }

    /// Number of symmetric repetitions of the loop per period.
    pub fn m(&self) -> usize {
        self.extra().map_or(1, |e| e.m)
    }

    pub fn counts(&self) -> Result<SequenceCounts> {
        sequence_counts(
            self.nu()
                .ok_or_else(|| Error::UnsupportedGroup(self.group().tag.to_string()))?,
            self.geometry.poly()?,
        )
    }

    /// Reduced triangle sequence of the class.
    pub fn triangles(&self) -> Result<TriangleSequence> {
        let nu = self
            .nu()
            .ok_or_else(|| Error::UnsupportedGroup(self.group().tag.to_string()))?;
        triangles_from_vertices(nu, self.geometry.poly()?, self.geometry.tess()?)
    }

    pub fn with_m0(&self, m0: f64) -> Self {
        ConeSpec { m0, ..self.clone() }
    }
}

fn check_params(alpha: f64, period: f64, m0: f64) -> Result<()> {
    if !(1.0..2.0).contains(&alpha) {
        return Err(Error::config("alpha", "alpha must lie in [1, 2)"));
    }
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::config("T", "the period must be positive"));
    }
    if !(m0 >= 0.0 && m0.is_finite()) {
        return Err(Error::config("m0", "the central mass must be nonnegative"));
    }
    Ok(())
}

/// Vertex sequence given as labels or as coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NuSpec {
    Labels(Vec<usize>),
    Points(Vec<[f64; 3]>),
}

/// On-disk cone description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeFile {
    pub group: GroupTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<NuSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numbering_file: Option<PathBuf>,
    pub alpha: f64,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(rename = "R_index", default, skip_serializing_if = "Option::is_none")]
    pub r_index: Option<usize>,
    #[serde(rename = "T")]
    pub period: f64,
    pub m0: f64,
}

impl ConeFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let at = e
                .span()
                .map(|s| {
                    let before = &text[..s.start.min(text.len())];
                    let line = before.matches('\n').count() + 1;
                    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
                    format!(" (line {line}, column {col})")
                })
                .unwrap_or_default();
            Error::config("cone", format!("{}{at}", e.message().trim_end()))
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("cone file serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Resolve labels, numbering and the extra symmetry. Relative numbering
    /// paths are taken from `base_dir`.
    pub fn resolve(&self, base_dir: Option<&Path>) -> Result<ConeSpec> {
        match self.group {
            GroupTag::Z4 | GroupTag::Z2N(_) => {
                ConeSpec::italian(self.group, self.alpha, self.period, self.m0)
            }
            GroupTag::Klein => ConeSpec::klein(self.alpha, self.period, self.m0),
            GroupTag::T | GroupTag::O | GroupTag::I => {
                let geometry = Geometry::builtin(self.group);
                let poly = geometry.poly()?;
                let nu: Vec<usize> = match &self.nu {
                    None => return Err(Error::config("nu", "missing vertex sequence")),
                    Some(NuSpec::Points(p)) => p
                        .iter()
                        .map(|x| {
                            poly.vertex_at(&Vec3::new(x[0], x[1], x[2]), 1e-6)
                                .ok_or_else(|| {
                                    Error::config("nu", format!("{x:?} is not a vertex"))
                                })
                        })
                        .collect::<Result<_>>()?,
                    Some(NuSpec::Labels(l)) => {
                        let numbering = match &self.numbering_file {
                            Some(f) => {
                                let path = match base_dir {
                                    Some(d) if f.is_relative() => d.join(f),
                                    _ => f.clone(),
                                };
                                Numbering::load(&path, poly, self.group)?
                            }
                            None => Numbering::builtin(poly, self.group)?,
                        };
                        l.iter()
                            .map(|&i| numbering.vertex(i))
                            .collect::<Result<_>>()?
                    }
                };
                let cone =
                    ConeSpec::platonic(self.group, &nu, self.m, self.alpha, self.period, self.m0)?;
                if let (Some(r), Some(e)) = (self.r_index, cone.extra()) {
                    if r != e.element {
                        return Err(Error::config(
                            "R_index",
                            format!("expected element {}", e.element),
                        ));
                    }
                }
                Ok(cone)
            }
            GroupTag::Custom => Err(Error::config("group", "custom groups cannot define cones")),
        }
    }
}
