//! Command-line driver behind the `choreo` binary.
//!
//! Every command that is given `--out DIR` writes its files there together
//! with a `manifest.json`; `choreo --replay DIR/manifest.json` runs the same
//! command again and refuses to do so if its inputs have changed.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::action::{fmt, LoopPath};
use crate::arcs::{self, ArcSolution, ShootingOptions};
use crate::error::{Error, Result};
use crate::estimates::{
    certify_no_total_collisions, k_alpha_p, polyhedron_constants, tilde_u0, EstimateCertificate,
};
use crate::gamma::{convergence_study, gamma_limit_action_alpha, gamma_limit_minimizer};
use crate::homotopy::{ConeFile, ConeSpec, Geometry, NuSpec};
use crate::minimize::{
    continuation, default_init, minimize_refined, minimize_rescaled, verify_solution, InitMode,
    MinimizeConfig, MinimizeResult,
};
use crate::reference::reference;
use crate::{builtin_group, GroupTag};

/// Relative deviation above which a recomputed table cell is flagged.
pub const TABLE_FLAG: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(
    name = "choreo",
    version,
    about = "Symmetric periodic orbits by action minimization",
    args_conflicts_with_subcommands = true
)]
pub struct Cli {
    /// Re-run the command recorded in a manifest.
    #[arg(long, value_name = "MANIFEST")]
    pub replay: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Order, pole census and tessellation of a symmetry group.
    Groups {
        /// Z4, Z2N:<n>, KLEIN, T, O or I.
        tag: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Recompute reference table 1, 3 or 4 and flag deviating cells.
    Tables {
        #[arg(value_parser = ["1", "3", "4"])]
        which: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Constants of the Archimedean polyhedron of T, O or I.
    Constants {
        tag: String,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check the no-total-collision inequalities for a Platonic cone.
    Certify {
        #[command(flatten)]
        cone: ConeArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Minimize the action over a cone.
    Minimize {
        #[command(flatten)]
        cone: ConeArgs,
        /// Minimize the rescaled action at this ε instead.
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Warm-started minimization over an increasing grid of central masses.
    Continue {
        #[command(flatten)]
        cone: ConeArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Circular-arc loop of the m₀ → ∞ limit.
    GammaLimit {
        #[command(flatten)]
        cone: ConeArgs,
        /// Nodes of the sampled loop.
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Minimizers of the rescaled action along a decreasing ε schedule.
    Converge {
        #[command(flatten)]
        cone: ConeArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Fixed-time connecting arcs of the α-homogeneous Kepler problem.
    Arcs {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        phi: f64,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// Strength c of the force; the default gives ẍ = −αx/|x|^{α+2}.
        #[arg(long)]
        c: Option<f64>,
        /// Only list the admissible winding numbers.
        #[arg(long)]
        list_k: bool,
        #[arg(long, default_value_t = 401)]
        samples: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct OutArgs {
    /// Directory for output files and the run manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print machine-readable JSON instead of the human summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct ConeArgs {
    /// Cone spec file.
    #[arg(long, required_unless_present = "id")]
    pub cone: Option<PathBuf>,
    /// Reference cycle id such as O_nu4, in place of a cone file.
    #[arg(long, conflicts_with = "cone")]
    pub id: Option<String>,
    /// Override the central mass of the cone.
    #[arg(long)]
    pub m0: Option<f64>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct RunArgs {
    /// Minimizer settings (TOML); flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// test-loop, circular or a trajectory CSV to start from.
    #[arg(long)]
    pub init: Option<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

/// Record written next to every set of outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    /// Everything the run depends on, with files resolved to their contents.
    pub config: Value,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
}

/// Exit status for a finished command: 0 success, 2 numerical failure, 1 config error.
pub fn exit_code(result: &Result<()>) -> i32 {
    match result {
        Ok(()) => 0,
        Err(e) if e.is_numerical() => 2,
        Err(_) => 1,
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = configure_threads().and_then(|_| match (&cli.replay, &cli.command) {
        (Some(m), _) => replay(m),
        (None, Some(cmd)) => run(cmd, &argv),
        (None, None) => Err(Error::config("command", "no subcommand given (see --help)")),
    });
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    exit_code(&result)
}

/// Cap the rayon pool at `CHOREO_THREADS`.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("CHOREO_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::config("CHOREO_THREADS", format!("expected a positive integer, got {v:?}")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn replay(manifest: &Path) -> Result<()> {
    let m: RunManifest = serde_json::from_str(&fs::read_to_string(manifest)?)
        .map_err(|e| Error::config("manifest", e.to_string()))?;
    let cli = Cli::try_parse_from(&m.args).map_err(|e| Error::config("manifest", e.to_string()))?;
    let cmd = cli
        .command
        .ok_or_else(|| Error::config("manifest", "no command recorded"))?;
    if resolve(&cmd)?.config != m.config {
        return Err(Error::config(
            "manifest",
            "inputs differ from those recorded in the manifest",
        ));
    }
    run(&cmd, &m.args)
}

/// Inputs of a command read from disk, and the resolved configuration.
struct Resolved {
    cone: Option<ConeSpec>,
    minimize: Option<MinimizeConfig>,
    init_path: Option<LoopPath>,
    config: Value,
}

fn cone_of(a: &ConeArgs) -> Result<(ConeFile, Option<PathBuf>)> {
    let (mut file, base) = match (&a.cone, &a.id) {
        (Some(p), _) => (ConeFile::load(p)?, p.parent().map(Path::to_path_buf)),
        (None, Some(id)) => {
            let r = reference()
                .cycle(id)
                .ok_or_else(|| Error::config("id", format!("unknown cycle {id:?}")))?;
            let file = ConeFile {
                group: r.group,
                nu: Some(NuSpec::Labels(r.nu.clone())),
                numbering_file: None,
                alpha: r.alpha,
                m: Some(r.m),
                r_index: None,
                period: TAU,
                m0: 0.0,
            };
            (file, None)
        }
        (None, None) => return Err(Error::config("cone", "give --cone or --id")),
    };
    if let Some(m0) = a.m0 {
        file.m0 = m0;
    }
    Ok((file, base))
}

fn minimize_config(r: &RunArgs) -> Result<(MinimizeConfig, Option<LoopPath>)> {
    let mut cfg = match &r.config {
        Some(p) => toml::from_str(&fs::read_to_string(p)?)
            .map_err(|e| Error::config("config", e.to_string()))?,
        None => MinimizeConfig::default(),
    };
    if let Some(n) = r.nodes {
        cfg.nodes = n;
    }
    if let Some(s) = r.seed {
        cfg.seed = s;
    }
    if let Some(t) = r.tol {
        cfg.tol = t;
    }
    if let Some(m) = r.max_iter {
        cfg.max_iter = m;
    }
    let mut init_path = None;
    match r.init.as_deref() {
        None => {}
        Some("test-loop") => cfg.init = InitMode::TestLoop,
        Some("circular") => cfg.init = InitMode::Circular,
        Some(file) => {
            cfg.init = InitMode::User;
            init_path = Some(LoopPath::read_csv(File::open(file)?, TAU)?);
        }
    }
    cfg.validate()?;
    Ok((cfg, init_path))
}

fn resolve(cmd: &Command) -> Result<Resolved> {
    let (cone_args, run_args) = match cmd {
        Command::Certify { cone, .. } | Command::GammaLimit { cone, .. } => (Some(cone), None),
        Command::Minimize { cone, run, .. }
        | Command::Continue { cone, run, .. }
        | Command::Converge { cone, run, .. } => (Some(cone), Some(run)),
        _ => (None, None),
    };
    let mut config = json!({ "command": cmd });
    let mut cone = None;
    if let Some(a) = cone_args {
        let (file, base) = cone_of(a)?;
        cone = Some(file.resolve(base.as_deref())?);
        config["cone"] = serde_json::to_value(&file).map_err(json_err)?;
    }
    let mut minimize = None;
    let mut init_path = None;
    if let Some(r) = run_args {
        let (cfg, init) = minimize_config(r)?;
        config["minimize"] = serde_json::to_value(&cfg).map_err(json_err)?;
        if let Some(p) = &init {
            config["init_nodes"] = json!(p.nodes.iter().map(|x| [x.x, x.y, x.z]).collect::<Vec<_>>());
        }
        minimize = Some(cfg);
        init_path = init;
    }
    Ok(Resolved {
        cone,
        minimize,
        init_path,
        config,
    })
}

fn json_err(e: serde_json::Error) -> Error {
    Error::config("json", e.to_string())
}

/// Output directory and the files written to it.
struct Sink {
    dir: Option<PathBuf>,
    files: Vec<PathBuf>,
}

impl Sink {
    fn new(out: &OutArgs) -> Result<Self> {
        if let Some(d) = &out.out {
            fs::create_dir_all(d)?;
        }
        Ok(Sink {
            dir: out.out.clone(),
            files: vec![],
        })
    }

    fn file(&mut self, name: &str) -> Result<Option<BufWriter<File>>> {
        let Some(d) = &self.dir else { return Ok(None) };
        let p = d.join(name);
        let f = File::create(&p)?;
        self.files.push(p);
        Ok(Some(BufWriter::new(f)))
    }

    fn json<T: Serialize>(&mut self, name: &str, v: &T) -> Result<()> {
        if let Some(w) = self.file(name)? {
            serde_json::to_writer_pretty(w, v).map_err(json_err)?;
        }
        Ok(())
    }
}

fn out_args(cmd: &Command) -> &OutArgs {
    match cmd {
        Command::Groups { out, .. }
        | Command::Tables { out, .. }
        | Command::Constants { out, .. }
        | Command::Certify { out, .. }
        | Command::GammaLimit { out, .. }
        | Command::Arcs { out, .. } => out,
        Command::Minimize { run, .. } | Command::Continue { run, .. } | Command::Converge { run, .. } => {
            &run.out
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Groups { .. } => "groups",
        Command::Tables { .. } => "tables",
        Command::Constants { .. } => "constants",
        Command::Certify { .. } => "certify",
        Command::Minimize { .. } => "minimize",
        Command::Continue { .. } => "continue",
        Command::GammaLimit { .. } => "gamma-limit",
        Command::Converge { .. } => "converge",
        Command::Arcs { .. } => "arcs",
    }
}

/// Run one command; `args` is the command line recorded in the manifest.
pub fn run(cmd: &Command, args: &[String]) -> Result<()> {
    let res = resolve(cmd)?;
    let out = out_args(cmd);
    let mut sink = Sink::new(out)?;
    let result = match cmd {
        Command::Groups { tag, .. } => cmd_groups(tag, out.json, &mut sink),
        Command::Tables { which, .. } => cmd_tables(which, out.json, &mut sink),
        Command::Constants { tag, alpha, .. } => cmd_constants(tag, *alpha, out.json, &mut sink),
        Command::Certify { .. } => cmd_certify(res.cone.as_ref().unwrap(), out.json, &mut sink),
        Command::Minimize { eps, .. } => cmd_minimize(&res, *eps, out.json, &mut sink),
        Command::Continue { grid, .. } => cmd_continue(&res, grid, out.json, &mut sink),
        Command::GammaLimit { samples, .. } => {
            cmd_gamma(res.cone.as_ref().unwrap(), *samples, out.json, &mut sink)
        }
        Command::Converge { eps, .. } => cmd_converge(&res, eps, out.json, &mut sink),
        Command::Arcs {
            alpha,
            phi,
            rho,
            c,
            list_k,
            samples,
            ..
        } => cmd_arcs(*alpha, *phi, *rho, *c, *list_k, *samples, out.json, &mut sink),
    };
    // the manifest is written even when the run fails numerically
    if let Some(dir) = &sink.dir {
        let manifest = RunManifest {
            command: command_name(cmd).into(),
            args: args.to_vec(),
            config: res.config.clone(),
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            outputs: sink.files.clone(),
            seed: res.minimize.as_ref().map(|c| c.seed),
        };
        let w = BufWriter::new(File::create(dir.join("manifest.json"))?);
        serde_json::to_writer_pretty(w, &manifest).map_err(json_err)?;
    }
    result
}

/// Five significant digits, for human-readable tables.
pub fn sig5(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let d = 4 - x.abs().log10().floor() as i32;
    if (0..=8).contains(&d) {
        format!("{x:.*}", d as usize)
    } else {
        format!("{x:.4e}")
    }
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v).map_err(json_err)?);
    Ok(())
}

fn platonic_tag(tag: &str) -> Result<GroupTag> {
    let t: GroupTag = tag.parse()?;
    if !t.is_platonic() {
        return Err(Error::config("tag", "expected T, O or I"));
    }
    Ok(t)
}

#[derive(Serialize)]
struct GroupReport {
    tag: String,
    order: usize,
    poles: usize,
    /// Number of poles of each order.
    census: BTreeMap<usize, usize>,
    axes: usize,
    triangles: Option<usize>,
}

fn cmd_groups(tag: &str, json: bool, sink: &mut Sink) -> Result<()> {
    let t: GroupTag = tag.parse()?;
    if t == GroupTag::Custom {
        return Err(Error::config("tag", "custom groups have no builtin generators"));
    }
    let g = builtin_group(t);
    let mut census = BTreeMap::new();
    for p in g.poles() {
        *census.entry(p.order).or_insert(0) += 1;
    }
    let triangles = Geometry::builtin(t).tess().ok().map(|x| x.len());
    let r = GroupReport {
        tag: t.to_string(),
        order: g.order(),
        poles: g.poles().len(),
        census,
        axes: g.axes().len(),
        triangles,
    };
    sink.json("group.json", &r)?;
    if json {
        return print_json(&r);
    }
    println!("group {}: order {}", r.tag, r.order);
    let census: Vec<String> = r.census.iter().map(|(o, n)| format!("{n} of order {o}")).collect();
    println!("poles: {} ({})", r.poles, census.join(", "));
    println!("rotation axes: {}", r.axes);
    match r.triangles {
        Some(n) => println!("tessellation: {n} triangles"),
        None => println!("tessellation: none"),
    }
    Ok(())
}

#[derive(Serialize)]
struct TableRow {
    id: String,
    values: Vec<f64>,
    reference: Vec<f64>,
    flagged: Vec<bool>,
    /// Both inequalities hold (tables 3 and 4).
    #[serde(skip_serializing_if = "Option::is_none")]
    inequalities: Option<bool>,
}

#[derive(Serialize)]
struct TableDoc {
    table: String,
    columns: Vec<&'static str>,
    rows: Vec<TableRow>,
    flagged_cells: usize,
    tolerance: f64,
}

fn flags(values: &[f64], reference: &[f64]) -> Vec<bool> {
    values
        .iter()
        .zip(reference)
        .map(|(v, r)| ((v - r) / r).abs() > TABLE_FLAG)
        .collect()
}

/// Recomputed rows of table 1, 3 or 4.
fn table(which: &str) -> Result<TableDoc> {
    let mut rows = vec![];
    let columns = match which {
        "1" => {
            for t in [GroupTag::T, GroupTag::O, GroupTag::I] {
                let c = polyhedron_constants(&Geometry::builtin(t))?;
                let r = reference()
                    .constants(t)
                    .ok_or_else(|| Error::Invalid(format!("no reference constants for {t}")))?;
                let values = vec![c.zeta0, c.zeta1, c.zeta2, c.delta1, c.delta2, c.ell_ratio];
                let reference = vec![r.zeta0, r.zeta1, r.zeta2, r.delta1, r.delta2, r.ell_ratio];
                rows.push(TableRow {
                    id: t.to_string(),
                    flagged: flags(&values, &reference),
                    values,
                    reference,
                    inequalities: None,
                });
            }
            vec!["zeta_1_0", "zeta_1_1", "zeta_1_2", "delta_1", "delta_2", "8/(4-l^2)"]
        }
        _ => {
            let refs = if which == "3" {
                &reference().table3
            } else {
                &reference().table4
            };
            for r in &reference().table2 {
                let Some(want) = refs.get(&r.id) else { continue };
                let cone = ConeSpec::platonic_labels(r.group, &r.nu, Some(r.m), r.alpha, TAU, 0.0)?;
                let cert = certify_no_total_collisions(&cone)?;
                let values = cert.columns().to_vec();
                rows.push(TableRow {
                    id: r.id.clone(),
                    flagged: flags(&values, want),
                    values,
                    reference: want.to_vec(),
                    inequalities: Some(cert.pass),
                });
            }
            if which == "3" {
                vec!["k1*z11+k2*z12", "2piM*U/l", "(k1+k2)*z10", "4piM/l"]
            } else {
                vec!["k1*z11/d1+k2*z12/d2", "C*U", "k*8/(4-l^2)", "C"]
            }
        }
    };
    let flagged_cells = rows.iter().map(|r| r.flagged.iter().filter(|&&f| f).count()).sum();
    Ok(TableDoc {
        table: which.into(),
        columns,
        rows,
        flagged_cells,
        tolerance: TABLE_FLAG,
    })
}

fn cmd_tables(which: &str, json: bool, sink: &mut Sink) -> Result<()> {
    let doc = table(which)?;
    sink.json(&format!("table{which}.json"), &doc)?;
    if json {
        return print_json(&doc);
    }
    println!("table {which} (cells marked * differ from the reference by more than {TABLE_FLAG:e} relative)");
    print!("{:<8}", "");
    for c in &doc.columns {
        print!(" {c:>22}");
    }
    println!();
    for r in &doc.rows {
        print!("{:<8}", r.id);
        for ((v, w), f) in r.values.iter().zip(&r.reference).zip(&r.flagged) {
            let cell = format!("{}{} ({})", if *f { "*" } else { "" }, sig5(*v), sig5(*w));
            print!(" {cell:>22}");
        }
        if let Some(ok) = r.inequalities {
            print!("  {}", if ok { "holds" } else { "FAILS" });
        }
        println!();
    }
    let cells: usize = doc.rows.iter().map(|r| r.values.len()).sum();
    println!("{} of {cells} cells flagged", doc.flagged_cells);
    Ok(())
}

#[derive(Serialize)]
struct ConstantsReport {
    group: String,
    alpha: f64,
    zeta0: f64,
    zeta1: f64,
    zeta2: f64,
    delta1: f64,
    delta2: f64,
    ell: f64,
    ell_ratio: f64,
    tilde_u0: f64,
    /// k_{α,p} for each pole order p of the group.
    k_alpha: BTreeMap<usize, f64>,
}

fn cmd_constants(tag: &str, alpha: f64, json: bool, sink: &mut Sink) -> Result<()> {
    let t = platonic_tag(tag)?;
    if !(1.0..2.0).contains(&alpha) {
        return Err(Error::config("alpha", "alpha must lie in [1, 2)"));
    }
    let g = Geometry::builtin(t);
    let c = polyhedron_constants(&g)?;
    let k_alpha = g
        .group
        .poles()
        .iter()
        .map(|p| (p.order, k_alpha_p(alpha, p.order)))
        .collect();
    let r = ConstantsReport {
        group: t.to_string(),
        alpha,
        zeta0: c.zeta0,
        zeta1: c.zeta1,
        zeta2: c.zeta2,
        delta1: c.delta1,
        delta2: c.delta2,
        ell: c.ell,
        ell_ratio: c.ell_ratio,
        tilde_u0: tilde_u0(&g, alpha)?,
        k_alpha,
    };
    sink.json("constants.json", &r)?;
    if json {
        return print_json(&r);
    }
    println!("group {} (ζ and δ at α = 1)", r.group);
    for (name, v) in [
        ("zeta_1_0", r.zeta0),
        ("zeta_1_1", r.zeta1),
        ("zeta_1_2", r.zeta2),
        ("delta_1", r.delta1),
        ("delta_2", r.delta2),
        ("edge length", r.ell),
        ("8/(4-l^2)", r.ell_ratio),
    ] {
        println!("  {name:<12} {}", sig5(v));
    }
    println!("  U0 at alpha = {}: {}", r.alpha, sig5(r.tilde_u0));
    for (o, k) in &r.k_alpha {
        println!("  k_alpha for order {o}: {}", sig5(*k));
    }
    Ok(())
}

fn cmd_certify(cone: &ConeSpec, json: bool, sink: &mut Sink) -> Result<()> {
    let cert: EstimateCertificate = certify_no_total_collisions(cone)?;
    sink.json("certificate.json", &cert)?;
    if json {
        return print_json(&cert);
    }
    let c = &cert.constants;
    println!("cone {} (k1 = {}, k2 = {}, M = {})", cert.cone, c.k1, c.k2, c.m);
    println!(
        "  potential terms: {} < {}  {}",
        sig5(cert.potential.lhs),
        sig5(cert.potential.rhs),
        if cert.potential.holds { "holds" } else { "FAILS" }
    );
    println!(
        "  central terms:   {} < {}  {}",
        sig5(cert.central.lhs),
        sig5(cert.central.rhs),
        if cert.central.holds { "holds" } else { "FAILS" }
    );
    println!(
        "  at m0 = {}: test loop {} vs collision bound {}",
        cone.m0,
        sig5(cert.direct.test_loop_action),
        sig5(cert.direct.collision_bound)
    );
    println!("{}", if cert.pass { "PASS: no total collisions" } else { "FAIL: not certified" });
    Ok(())
}

fn write_path(sink: &mut Sink, name: &str, path: &LoopPath) -> Result<()> {
    if let Some(w) = sink.file(name)? {
        path.write_csv(w)?;
    }
    Ok(())
}

fn write_log(sink: &mut Sink, r: &MinimizeResult) -> Result<()> {
    if let Some(w) = sink.file("log.csv")? {
        let mut wr = csv::Writer::from_writer(w);
        let e = |e: csv::Error| Error::config("csv", e.to_string());
        wr.write_record(["iteration", "action", "gradient_norm", "min_gamma_distance"])
            .map_err(e)?;
        for l in &r.log {
            wr.write_record([
                l.iteration.to_string(),
                fmt(l.action),
                fmt(l.gradient_norm),
                fmt(l.min_gamma_distance),
            ])
            .map_err(e)?;
        }
        wr.flush()?;
    }
    Ok(())
}

fn cmd_minimize(res: &Resolved, eps: Option<f64>, json: bool, sink: &mut Sink) -> Result<()> {
    let cone = res.cone.as_ref().unwrap();
    let cfg = res.minimize.as_ref().unwrap();
    let init = match &res.init_path {
        Some(p) => LoopPath::new(p.nodes.clone(), cone.period),
        None => default_init(cone, cfg, eps)?,
    };
    let r = match eps {
        Some(e) => minimize_rescaled(cone, e, cfg, &init)?,
        None => minimize_refined(cone, None, cfg, &init).map_err(Error::Numerical)?,
    };
    let v = verify_solution(&r, cone);
    write_path(sink, "trajectory.csv", &r.path)?;
    if let Some(w) = sink.file("constellation.csv")? {
        r.path.write_constellation_csv(cone.group(), w)?;
    }
    write_log(sink, &r)?;
    let doc = json!({ "result": r, "verification": v });
    sink.json("result.json", &doc)?;
    if json {
        print_json(&doc)?;
    } else {
        println!(
            "action {} after {} iterations (gradient {:.3e}, {} nodes)",
            sig5(r.action()),
            r.iterations,
            r.gradient_norm,
            r.path.len()
        );
        println!(
            "  min distance to collisions {}, to the origin {}",
            sig5(r.min_gamma_distance),
            sig5(r.min_origin_distance)
        );
        println!(
            "  Euler-Lagrange residual {:.3e}, energy drift {:.3e}, symmetry violation {:.3e}",
            v.el_residual, v.energy_drift, v.constraint_violation
        );
    }
    if !(r.converged && r.homotopy_verified) {
        return Err(Error::Numerical(format!(
            "minimization stopped without convergence (gradient {:.3e})",
            r.gradient_norm
        )));
    }
    Ok(())
}

fn cmd_continue(res: &Resolved, grid: &[f64], json: bool, sink: &mut Sink) -> Result<()> {
    let cone = res.cone.as_ref().unwrap();
    let c = continuation(cone, grid, res.minimize.as_ref().unwrap())?;
    let mut rows = vec![];
    for (i, s) in c.stages.iter().enumerate() {
        write_path(sink, &format!("stage{i}.csv"), &s.result.path)?;
        write_path(sink, &format!("stage{i}_v.csv"), &s.v_path)?;
        rows.push(json!({
            "m0": s.result.m0,
            "action": s.result.action(),
            "gradient_norm": s.result.gradient_norm,
            "nodes": s.result.path.len(),
            "min_gamma_distance": s.result.min_gamma_distance,
            "v_min_gamma_distance": s.v_path.min_collision_distance(cone.group()),
        }));
    }
    if let Some(w) = sink.file("stages.csv")? {
        let mut wr = csv::Writer::from_writer(w);
        let e = |e: csv::Error| Error::config("csv", e.to_string());
        wr.write_record(["m0", "action", "gradient_norm", "nodes", "min_gamma_distance", "v_min_gamma_distance"])
            .map_err(e)?;
        for s in &c.stages {
            wr.write_record([
                fmt(s.result.m0),
                fmt(s.result.action()),
                fmt(s.result.gradient_norm),
                s.result.path.len().to_string(),
                fmt(s.result.min_gamma_distance),
                fmt(s.v_path.min_collision_distance(cone.group())),
            ])
            .map_err(e)?;
        }
        wr.flush()?;
    }
    let doc = json!({ "stages": rows, "failure": c.failure });
    if json {
        print_json(&doc)?;
    } else {
        println!("{:>12} {:>14} {:>10} {:>8}", "m0", "action", "gradient", "nodes");
        for s in &c.stages {
            println!(
                "{:>12} {:>14} {:>10.2e} {:>8}",
                sig5(s.result.m0),
                sig5(s.result.action()),
                s.result.gradient_norm,
                s.result.path.len()
            );
        }
    }
    match c.failure {
        Some(f) => Err(Error::Numerical(f)),
        None => Ok(()),
    }
}

fn cmd_gamma(cone: &ConeSpec, samples: usize, json: bool, sink: &mut Sink) -> Result<()> {
    if samples < 8 {
        return Err(Error::config("samples", "at least 8 samples are needed"));
    }
    let l = gamma_limit_minimizer(cone)?;
    let exact = gamma_limit_action_alpha(l.total_angle(), cone.period, cone.alpha)?;
    let quad = l.action_quadrature()?;
    write_path(sink, "limit.csv", &l.sample(samples))?;
    let doc = json!({
        "total_angle": l.total_angle(),
        "radius": l.radius,
        "action": exact,
        "action_quadrature": quad,
        "flags": l.flags,
        "passage_times": l.passage_times(),
        "semi_axes": l.semi_axes.iter().map(|x| [x.x, x.y, x.z]).collect::<Vec<_>>(),
    });
    sink.json("limit.json", &doc)?;
    if json {
        return print_json(&doc);
    }
    println!("total angle {} over {} arcs, radius {}", sig5(l.total_angle()), l.semi_axes.len(), sig5(l.radius));
    println!("action {} (quadrature {})", sig5(exact), sig5(quad));
    let f = &l.flags;
    for (on, what) in [
        (f.non_unique, "the minimizer is not unique"),
        (f.elliptic_degenerate, "elliptic arcs have the same action"),
        (!f.angle_condition, "the angle condition fails"),
        (f.conjectural, "alpha > 1: the limit is conjectural"),
    ] {
        if on {
            println!("note: {what}");
        }
    }
    Ok(())
}

fn cmd_converge(res: &Resolved, eps: &[f64], json: bool, sink: &mut Sink) -> Result<()> {
    let cone = res.cone.as_ref().unwrap();
    let rec = convergence_study(cone, eps, res.minimize.as_ref().unwrap())?;
    if let Some(w) = sink.file("convergence.csv")? {
        rec.write_csv(w)?;
    }
    for (i, p) in rec.loops.iter().enumerate() {
        write_path(sink, &format!("eps{i}.csv"), p)?;
    }
    if json {
        print_json(&rec)?;
    } else {
        println!("limit action {}", sig5(rec.gamma_action));
        println!("{:>10} {:>14} {:>12} {:>12}", "epsilon", "action", "L2 distance", "arc fit");
        for e in &rec.entries {
            println!(
                "{:>10} {:>14} {:>12.3e} {:>12.3e}",
                sig5(e.epsilon),
                sig5(e.action),
                e.l2_distance,
                e.arc_fit_residual
            );
        }
    }
    match rec.failure {
        Some(f) => Err(Error::Numerical(f)),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct ArcsReport {
    alpha: f64,
    phi: f64,
    rho_bar: f64,
    strength: f64,
    count: arcs::ArcCount,
    collision_action: f64,
    arcs: Vec<ArcSolution>,
    marchal_holds: bool,
}

#[allow(clippy::too_many_arguments)]
fn cmd_arcs(
    alpha: f64,
    phi: f64,
    rho: f64,
    c: Option<f64>,
    list_k: bool,
    samples: usize,
    json: bool,
    sink: &mut Sink,
) -> Result<()> {
    let count = arcs::arc_count(alpha, phi)?;
    if list_k {
        let ks: Vec<Value> = (count.k_min..=count.k_max)
            .map(|k| json!({ "k": k, "angle": phi + TAU * k as f64 }))
            .collect();
        let doc = json!({ "count": count, "windings": ks });
        sink.json("windings.json", &doc)?;
        if json {
            return print_json(&doc);
        }
        println!("k from {} to {}: {} arcs", count.k_min, count.k_max, count.k_tot);
        for k in count.k_min..=count.k_max {
            println!("  k = {k:>3}  swept angle {}", sig5(phi + TAU * k as f64));
        }
        return Ok(());
    }
    if samples < 3 {
        return Err(Error::config("samples", "at least 3 samples are needed"));
    }
    let strength = c.unwrap_or_else(|| arcs::kepler_strength(alpha));
    let opts = ShootingOptions {
        samples,
        ..Default::default()
    };
    let found = arcs::find_arcs(alpha, rho, phi, c, &opts)?;
    let collision_action = arcs::collision_action(alpha, strength, rho);
    let report = ArcsReport {
        alpha,
        phi,
        rho_bar: rho,
        strength,
        count,
        collision_action,
        marchal_holds: found.iter().all(|a| a.action < collision_action),
        arcs: found,
    };
    for a in &report.arcs {
        if let Some(w) = sink.file(&format!("arc_k{}.csv", a.k))? {
            a.write_csv(w)?;
        }
    }
    sink.json("arcs.json", &report)?;
    if json {
        print_json(&report)?;
    } else {
        println!(
            "{} arcs found, {} expected (k from {} to {})",
            report.arcs.len(),
            count.k_tot,
            count.k_min,
            count.k_max
        );
        println!("{:>4} {:>12} {:>12} {:>12} {:>10}", "k", "angle", "action", "min radius", "residual");
        for a in &report.arcs {
            println!(
                "{:>4} {:>12} {:>12} {:>12} {:>10.2e}",
                a.k,
                sig5(a.swept_angle),
                sig5(a.action),
                sig5(a.min_radius),
                a.boundary_residual
            );
        }
        println!("collision-ejection action {}", sig5(collision_action));
        let verdict = if alpha == 1.0 {
            "alpha = 1: comparison reported, not asserted"
        } else if report.marchal_holds {
            "every arc is below the collision-ejection action"
        } else {
            "VIOLATED: an arc is not below the collision-ejection action"
        };
        println!("{verdict}");
    }
    if report.arcs.len() as i64 != count.k_tot {
        return Err(Error::Numerical(format!(
            "found {} arcs, expected {}",
            report.arcs.len(),
            count.k_tot
        )));
    }
    Ok(())
}
