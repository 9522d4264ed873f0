//! Lagrangian dual decomposition with subgradient ascent.
//!
//! Relaxing non-anticipativity with multipliers `λ_s` splits the problem into
//! a master over `x` and one subproblem per scenario over `(x_s, y_s)`. The
//! dual function `Z_D(λ)` is concave; ascent uses the supergradient
//! `g_s = x_s − x` with a Polyak step whose scale `γ` halves after repeated
//! stalls. Trust-region DEP solves around the master's `x` supply primal
//! bounds.
//!
//! [`run_lotus`] warm-starts the full solve with multipliers computed on a
//! reduced scenario set; [`run_dd`] is the cold-started baseline.

mod driver;
mod evaluate;
mod heuristic;
mod step;
mod trace;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::mip::Budget;
use crate::scalar::Real;
use crate::smip::{Coupling, TwoStageProblem};

pub use driver::{
    run_dd, run_lotus, run_subgradient, warm_start_map, MappingRule, PhaseOutcome, RunConfig, RunResult, Termination,
};
pub use evaluate::{evaluate_dual, DualEvaluation};
pub use heuristic::{primal_heuristic, recover_primal, HeuristicConfig, PrimalCandidate};
pub use step::{polyak_alpha, polyak_step, subgradient, update_multipliers, GammaController};
pub use trace::{read_trace, write_trace, RunSummary, TRACE_HEADER};

/// Per-scenario multipliers with the sign domain implied by the coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct Multipliers<T> {
    pub values: Vec<Vec<T>>,
    pub coupling: Coupling,
}

impl<T: Real> Multipliers<T> {
    pub fn zeros(problem: &TwoStageProblem<T>) -> Self {
        Self { values: vec![vec![T::zero(); problem.n_first()]; problem.n_scenarios()], coupling: problem.coupling }
    }

    /// Inequality coupling requires every component to be non-negative.
    pub fn in_domain(&self) -> bool {
        self.coupling == Coupling::Equality || self.values.iter().flatten().all(|&v| v >= T::zero())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    WarmStart,
    Full,
    /// Final primal recovery; one record per run.
    Recovery,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::WarmStart => "warm_start",
            Phase::Full => "full",
            Phase::Recovery => "recovery",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualState<T> {
    pub lambda: Multipliers<T>,
    /// Iterations completed in this phase.
    pub k: usize,
    pub gamma: T,
    /// Best dual value seen; `-∞` before the first evaluation.
    pub best_dual: T,
    /// Best primal value; `None` until a heuristic succeeds.
    pub best_primal: Option<T>,
    /// First-stage part of the incumbent.
    pub incumbent: Option<Vec<T>>,
    pub stall: usize,
    pub phase: Phase,
    /// Master solution of the most recent evaluation.
    pub last_master: Vec<T>,
    /// Multipliers at which `best_dual` was attained.
    pub best_lambda: Multipliers<T>,
}

impl<T: Real> DualState<T> {
    pub fn new(lambda: Multipliers<T>, gamma: T, phase: Phase) -> Self {
        Self {
            best_lambda: lambda.clone(),
            lambda,
            k: 0,
            gamma,
            best_dual: T::neg_infinity(),
            best_primal: None,
            incumbent: None,
            stall: 0,
            phase,
            last_master: Vec::new(),
        }
    }

    /// Relative gap between the best bounds, if a primal bound exists.
    pub fn gap(&self) -> Option<T> {
        let zp = self.best_primal?;
        self.best_dual.is_finite().then(|| crate::scalar::relative_gap(zp, self.best_dual))
    }
}

/// One subgradient iteration as written to trace files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Global iteration index across phases.
    pub k: usize,
    pub phase: Phase,
    /// Seconds since the run started, at the end of the iteration.
    pub t_wall_s: f64,
    /// `Z_D(λ^k)`.
    pub z_dual: f64,
    /// Best primal bound of the current phase's problem; empty when none.
    pub z_primal_best: Option<f64>,
    pub rel_gap: Option<f64>,
    pub alpha: f64,
    pub g_norm: f64,
    pub iter_time_s: f64,
    /// False when some subproblem ended without proven optimality.
    pub certified: bool,
}

/// Knobs of one subgradient run.
#[derive(Debug, Clone, PartialEq)]
pub struct DualConfig<T> {
    pub max_iterations: usize,
    pub time_limit: Option<Duration>,
    /// Stop once the relative gap is at most this.
    pub gap_tolerance: T,
    pub gamma0: T,
    pub stall_threshold: usize,
    /// Dual improvements below this do not reset the stall counter.
    pub min_improvement: T,
    /// Heuristic runs at phase iterations `0, p, 2p, ...`.
    pub heuristic_period: usize,
    pub heuristic: HeuristicConfig<T>,
    /// Budget of every master and subproblem solve.
    pub subproblem_budget: Budget<T>,
    /// Solve scenario subproblems on the rayon pool.
    pub parallel: bool,
}

impl<T: Real> Default for DualConfig<T> {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            time_limit: None,
            gap_tolerance: T::lit(1e-4),
            gamma0: T::lit(1.8),
            stall_threshold: 5,
            min_improvement: T::lit(1e-9),
            heuristic_period: 20,
            heuristic: HeuristicConfig::default(),
            subproblem_budget: Budget::default().with_node_limit(20_000),
            parallel: false,
        }
    }
}
