use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use choreo::homotopy::{ConeFile, NuSpec};
use choreo::GroupTag;
use proptest::prelude::*;

fn choreo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_choreo"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn group_reports() {
    let o = choreo(&["groups", "O", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["order"].as_u64(), v["poles"].as_u64(), v["triangles"].as_u64()), (Some(24), Some(26), Some(48)));
    let v: serde_json::Value = serde_json::from_slice(&choreo(&["groups", "KLEIN", "--json"]).stdout).unwrap();
    assert_eq!((v["order"].as_u64(), v["poles"].as_u64()), (Some(4), Some(6)));
    let v: serde_json::Value = serde_json::from_slice(&choreo(&["groups", "Z2N:10", "--json"]).stdout).unwrap();
    assert_eq!(v["order"].as_u64(), Some(20));
    assert_eq!(choreo(&["groups", "Q"]).status.code(), Some(1));
}

#[test]
fn table_documents() {
    for (which, rows, cols) in [("1", 3, 6), ("3", 12, 4), ("4", 7, 4)] {
        let o = choreo(&["tables", which, "--json"]);
        assert_eq!(o.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        let r = v["rows"].as_array().unwrap();
        assert_eq!(r.len(), rows);
        assert!(r.iter().all(|x| x["values"].as_array().unwrap().len() == cols));
    }
}

#[test]
fn certify_a_tetrahedral_cone() {
    let o = choreo(&["certify", "--cone", "cones/T_nu1.cone"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn arcs_report_and_windings() {
    let o = choreo(&["arcs", "--alpha", "1.4", "--phi", "1.0472", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["arcs"].as_array().unwrap().len(), 3);
    assert_eq!(v["marchal_holds"], true);
    let o = choreo(&["arcs", "--alpha", "1.5", "--phi", "0", "--list-k"]);
    assert!(stdout(&o).contains("k from -1 to 1: 3 arcs"));
}

#[test]
fn config_errors_exit_with_one() {
    assert_eq!(choreo(&["arcs", "--alpha", "2.5", "--phi", "1"]).status.code(), Some(1));
    assert_eq!(choreo(&["tables", "2"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cone");
    fs::write(&bad, "group = \"O\"\nalpha = 1.0\nT = 6.28\nm0 = oops\n").unwrap();
    let o = choreo(&["certify", "--cone", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
    let o = Command::new(env!("CARGO_BIN_EXE_choreo"))
        .args(["groups", "T"])
        .env("CHOREO_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_with_two() {
    let o = choreo(&["minimize", "--cone", "cones/hiphop.cone", "--nodes", "128", "--max-iter", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn manifest_replay_is_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_choreo"))
        .args(["minimize", "--cone", "cones/hiphop.cone", "--init", "circular", "--seed", "3", "--nodes", "256", "--out", out])
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .env("CHOREO_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let first = files(dir.path());
    assert_eq!(first.len(), 4);
    let manifest = dir.path().join("manifest.json");
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["seed"], 3);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 4);
    let o = choreo(&["--replay", manifest.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(files(dir.path()), first);
}

#[test]
fn replay_refuses_changed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let cone = dir.path().join("k.cone");
    fs::copy(Path::new(env!("CARGO_MANIFEST_DIR")).join("cones/klein.cone"), &cone).unwrap();
    let out = dir.path().join("out");
    let o = choreo(&["gamma-limit", "--cone", cone.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    fs::write(&cone, fs::read_to_string(&cone).unwrap().replace("m0 = 0.0", "m0 = 2.0")).unwrap();
    let o = choreo(&["--replay", out.join("manifest.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

fn cone_file() -> impl Strategy<Value = ConeFile> {
    let group = prop::sample::select(vec![GroupTag::Z4, GroupTag::Klein, GroupTag::Z2N(3), GroupTag::O]);
    let nu = prop::option::of(prop_oneof![
        prop::collection::vec(1usize..30, 2..10).prop_map(NuSpec::Labels),
        prop::collection::vec(prop::array::uniform3(-1.0f64..1.0), 1..5).prop_map(NuSpec::Points),
    ]);
    (group, nu, 1.0f64..2.0, prop::option::of(1usize..6), prop::option::of(0usize..24), 0.1f64..20.0, 0.0f64..1e4)
        .prop_map(|(group, nu, alpha, m, r_index, period, m0)| ConeFile {
            group,
            nu,
            numbering_file: None,
            alpha,
            m,
            r_index,
            period,
            m0,
        })
}

proptest! {
    #[test]
    fn cone_files_round_trip(c in cone_file()) {
        let text = c.to_toml();
        let back = ConeFile::parse(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_toml(), text);
    }
}
