//! Tabulated reference values shipped with the crate.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;

use crate::groups::GroupTag;

const DATA: &str = include_str!("../data/reference.toml");

#[derive(Clone, Debug, Deserialize)]
pub struct GroupConstants {
    pub delta1: f64,
    pub delta2: f64,
    pub zeta0: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    pub ell_ratio: f64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct CycleRow {
    pub id: String,
    pub group: GroupTag,
    pub nu: Vec<usize>,
    #[serde(rename = "M")]
    pub m: usize,
    pub k1: usize,
    pub k2: usize,
    pub alpha: f64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Reference {
    pub version: u32,
    pub table1: BTreeMap<String, GroupConstants>,
    pub table2: Vec<CycleRow>,
    pub table3: BTreeMap<String, [f64; 4]>,
    pub table4: BTreeMap<String, [f64; 4]>,
}

pub fn reference() -> &'static Reference {
    static R: OnceLock<Reference> = OnceLock::new();
    R.get_or_init(|| toml::from_str(DATA).expect("reference data parses"))
}

impl Reference {
    pub fn constants(&self, tag: GroupTag) -> Option<&GroupConstants> {
        self.table1.get(&tag.to_string())
    }

    pub fn cycles(&self, tag: GroupTag) -> impl Iterator<Item = &CycleRow> {
        self.table2.iter().filter(move |r| r.group == tag)
    }

    pub fn cycle(&self, id: &str) -> Option<&CycleRow> {
        self.table2.iter().find(|r| r.id == id)
    }
}
