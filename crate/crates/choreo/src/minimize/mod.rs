//! Minimization of the discretized action over a cone.

mod init;
pub mod lbfgs;
mod monitor;
mod space;
mod verify;

use serde::{Deserialize, Serialize};

use crate::action::{rescale_parameter, ActionBreakdown, Functional, LoopPath, SymmetryReduction};
use crate::error::{Error, Result};
use crate::groups::Mat3;
use crate::homotopy::ConeSpec;

pub use init::{initial_loop, optimal_rescale, polyline_loop};
pub use lbfgs::{LbfgsOptions, Problem, Stop};
pub use monitor::{winding, Monitor};
pub use space::{BlockSolver, FreeSpace};
pub use verify::{verify_loop, VerificationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    TestLoop,
    Circular,
    User,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinimizeConfig {
    pub nodes: usize,
    /// Stop when the L² gradient norm is below `tol·max(1, action)`.
    pub tol: f64,
    pub max_iter: usize,
    pub c1: f64,
    pub memory: usize,
    /// Values of m₀ (or ε) for continuation runs, in order.
    pub schedule: Vec<f64>,
    pub seed: u64,
    pub init: InitMode,
    /// Node doublings allowed per continuation stage when a stage stalls
    /// against the cone boundary.
    pub refine: usize,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        MinimizeConfig {
            nodes: 1024,
            tol: 1e-8,
            max_iter: 20_000,
            c1: 1e-4,
            memory: 10,
            schedule: vec![],
            seed: 0,
            init: InitMode::TestLoop,
            refine: 3,
        }
    }
}

impl MinimizeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 8 {
            return Err(Error::config("nodes", "at least 8 nodes are needed"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::config("tol", "tolerance must be positive"));
        }
        if !(self.c1 > 0.0 && self.c1 < 1.0) {
            return Err(Error::config(
                "c1",
                "sufficient-decrease parameter must lie in (0, 1)",
            ));
        }
        if self.memory == 0 {
            return Err(Error::config("memory", "memory must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct IterLog {
    pub iteration: usize,
    pub action: f64,
    pub gradient_norm: f64,
    pub min_gamma_distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimizeResult {
    #[serde(skip)]
    pub path: LoopPath,
    pub breakdown: ActionBreakdown,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub line_search_failed: bool,
    pub min_gamma_distance: f64,
    pub min_origin_distance: f64,
    pub homotopy_verified: bool,
    pub m0: f64,
    pub eps: Option<f64>,
    pub alpha: f64,
    #[serde(skip)]
    pub log: Vec<IterLog>,
}

impl MinimizeResult {
    pub fn action(&self) -> f64 {
        self.breakdown.total
    }

    pub fn collision_free(&self) -> bool {
        self.min_gamma_distance > 0.0 && self.min_origin_distance > 0.0
    }
}

/// Functional used for a result: the physical action, or the rescaled one at ε.
pub fn functional_for(cone: &ConeSpec, eps: Option<f64>) -> Functional {
    match eps {
        None => Functional::physical(cone),
        Some(e) => Functional::rescaled(cone, e),
    }
}

/// Minimize the physical action from `init`.
pub fn minimize(
    cone: &ConeSpec,
    config: &MinimizeConfig,
    init: &LoopPath,
) -> Result<MinimizeResult> {
    run(cone, None, config, init)
}

/// Minimize the rescaled action 𝒜_ε from `init`.
pub fn minimize_rescaled(
    cone: &ConeSpec,
    eps: f64,
    config: &MinimizeConfig,
    init: &LoopPath,
) -> Result<MinimizeResult> {
    if !(eps >= 0.0) {
        return Err(Error::config("eps", "epsilon must be nonnegative"));
    }
    run(cone, Some(eps), config, init)
}

/// Default starting loop for `cone` under `config`.
pub fn default_init(
    cone: &ConeSpec,
    config: &MinimizeConfig,
    eps: Option<f64>,
) -> Result<LoopPath> {
    initial_loop(cone, config.nodes, config.seed, &functional_for(cone, eps))
}

fn run(
    cone: &ConeSpec,
    eps: Option<f64>,
    config: &MinimizeConfig,
    init: &LoopPath,
) -> Result<MinimizeResult> {
    config.validate()?;
    let f = functional_for(cone, eps);
    let n = init.len();
    let reduction = SymmetryReduction::for_cone(cone);
    let space = FreeSpace::new(reduction.as_ref(), n)?;
    let monitor = Monitor::for_cone(cone, &init.nodes)?;
    let z0 = space.restrict(&init.nodes);
    let start = space.path(&z0, init.period);
    if !monitor.admits(&start.nodes) {
        return Err(Error::Numerical(
            "the initial loop is not in the cone".into(),
        ));
    }
    f.evaluate(&start)?;
    let period = init.period;
    let h = init.step();
    let opts = LbfgsOptions {
        memory: config.memory,
        c1: config.c1,
        max_iter: config.max_iter,
        max_backtracks: 60,
    };
    let group = cone.group();
    let mut problem = ActionProblem {
        f: &f,
        space: &space,
        monitor: &monitor,
        period,
        mu: (std::f64::consts::TAU / period).powi(2),
        tol: config.tol,
        solver: None,
        log: Vec::new(),
        group,
    };
    let out = lbfgs::minimize(z0, &opts, &mut problem)
        .ok_or_else(|| Error::Numerical("the initial loop has infinite action".into()))?;
    let path = space.path(&out.x, period);
    let breakdown = f.evaluate(&path)?;
    Ok(MinimizeResult {
        breakdown,
        gradient_norm: space.scaled_norm(&out.grad, h),
        iterations: out.iterations,
        converged: out.stop == Stop::Converged,
        line_search_failed: out.stop == Stop::LineSearchFailed,
        min_gamma_distance: path.min_collision_distance(group),
        min_origin_distance: path.min_norm(),
        homotopy_verified: monitor.admits(&path.nodes),
        m0: cone.m0,
        eps,
        alpha: cone.alpha,
        log: problem.log,
        path,
    })
}

struct ActionProblem<'a> {
    f: &'a Functional,
    space: &'a FreeSpace,
    monitor: &'a Monitor,
    period: f64,
    mu: f64,
    tol: f64,
    solver: Option<BlockSolver>,
    log: Vec<IterLog>,
    group: &'a crate::groups::RotationGroup,
}

impl ActionProblem<'_> {
    fn h(&self) -> f64 {
        self.period / self.space.nodes() as f64
    }
}

impl Problem for ActionProblem<'_> {
    fn eval(&mut self, z: &[f64]) -> Option<(f64, Vec<f64>)> {
        let p = self.space.path(z, self.period);
        if !self.monitor.admits(&p.nodes) {
            return None;
        }
        let b = self.f.evaluate(&p).ok()?;
        let g = self.f.gradient(&p).ok()?;
        Some((b.total, self.space.pull_back(&g)))
    }

    fn difference(&mut self, x: &[f64], _: f64, y: &[f64], _: f64) -> Option<f64> {
        let (px, py) = (
            self.space.path(x, self.period),
            self.space.path(y, self.period),
        );
        self.f.difference(&px, &py).ok()
    }

    fn update(&mut self, z: &[f64]) {
        let h = self.h();
        let (s, mu) = (self.f.scale, self.mu);
        let blocks: Vec<_> = self
            .space
            .lift(z)
            .iter()
            .map(|x| (Mat3::identity() * (2.0 / h + h * mu) + self.f.curvature(x) * h) * s)
            .collect();
        self.solver = BlockSolver::new(&blocks, s / h);
    }

    fn precondition(&self, v: &[f64]) -> Vec<f64> {
        match &self.solver {
            Some(solver) => self.space.precondition(v, solver),
            None => v.to_vec(),
        }
    }

    fn converged(&self, f: f64, g: &[f64]) -> bool {
        self.space.scaled_norm(g, self.h()) <= self.tol * f.abs().max(1.0)
    }

    fn accepted(&mut self, it: usize, z: &[f64], f: f64, g: &[f64]) {
        let p = self.space.path(z, self.period);
        self.log.push(IterLog {
            iteration: it,
            action: f,
            gradient_norm: self.space.scaled_norm(g, self.h()),
            min_gamma_distance: p.min_collision_distance(self.group),
        })
    }
}

pub fn verify_solution(result: &MinimizeResult, cone: &ConeSpec) -> VerificationReport {
    let f = functional_for(cone, result.eps);
    verify_loop(&result.path, &f, SymmetryReduction::for_cone(cone).as_ref())
}

/// One stage of a continuation run: the minimizer and its rescaled loop v = u/m₀^β.
#[derive(Clone, Debug)]
pub struct Stage {
    pub result: MinimizeResult,
    pub v_path: LoopPath,
}

#[derive(Clone, Debug)]
pub struct Continuation {
    pub stages: Vec<Stage>,
    /// Set when a stage failed; the stages before it are kept.
    pub failure: Option<String>,
}

/// Minimize from `init`, doubling the nodes (up to `config.refine` times)
/// whenever the line search fails.
///
/// Near-collision passages shorter than a time step let segments sweep
/// across Γ at no cost in action; the homotopy monitor then blocks every
/// step. Returns the converged result or a description of the failure.
pub fn minimize_refined(
    cone: &ConeSpec,
    eps: Option<f64>,
    config: &MinimizeConfig,
    init: &LoopPath,
) -> std::result::Result<MinimizeResult, String> {
    let mut init = init.clone();
    let mut refinements = 0;
    loop {
        match run(cone, eps, config, &init) {
            Ok(r) if r.converged && r.homotopy_verified => return Ok(r),
            Ok(r) if r.line_search_failed && refinements < config.refine => {
                refinements += 1;
                init = init.refined();
            }
            Ok(r) => {
                return Err(format!(
                    "stopped without convergence at {} nodes (gradient {:.3e})",
                    r.path.len(),
                    r.gradient_norm
                ))
            }
            Err(e) => return Err(e.to_string()),
        }
    }
}

/// Warm-started minimization over increasing m₀, each stage through
/// [`minimize_refined`].
pub fn continuation(
    cone: &ConeSpec,
    grid: &[f64],
    config: &MinimizeConfig,
) -> Result<Continuation> {
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config(
            "schedule",
            "the m0 grid must be strictly increasing",
        ));
    }
    let beta = rescale_parameter(cone.alpha)?;
    let mut stages: Vec<Stage> = Vec::new();
    for &m0 in grid {
        let c = cone.with_m0(m0);
        let init = match stages.last() {
            None => default_init(&c, config, None)?,
            Some(s) => optimal_rescale(&s.result.path, &Functional::physical(&c))?,
        };
        let result = match minimize_refined(&c, None, config, &init) {
            Ok(r) => r,
            Err(why) => {
                return Ok(Continuation {
                    stages,
                    failure: Some(format!("stage m0 = {m0}: {why}")),
                })
            }
        };
        let v_path = if m0 > 0.0 {
            result.path.scaled(m0.powf(-beta))
        } else {
            result.path.clone()
        };
        stages.push(Stage { result, v_path });
    }
    Ok(Continuation {
        stages,
        failure: None,
    })
}
