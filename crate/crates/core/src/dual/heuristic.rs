//! Trust-region primal bounds.
//!
//! Two stages, both searching the DEP restricted to the `(1 ± ε)x̃` window:
//!
//! 1. Fix `x` to the window point closest to `x̃` and solve every scenario's
//!    recourse independently. For a fixed first stage this is exact.
//! 2. On small DEPs, run branch-and-bound on the whole restricted DEP with
//!    the first stage's value as cutoff, under a node budget.

use std::time::Duration;

use crate::error::DualError;
use crate::mip::{solve_mip, Budget, VarKind};
use crate::scalar::Real;
use crate::smip::{build_recourse, build_restricted_dep, split_dep_values, trust_region_window, TwoStageProblem};

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicConfig<T> {
    /// Window half-width `ε` relative to `x̃`.
    pub eps: T,
    /// Budget of each scenario's recourse solve.
    pub recourse_budget: Budget<T>,
    /// Node limit of the restricted-DEP refinement; 0 disables it.
    pub refine_node_limit: usize,
    pub refine_time_limit: Option<Duration>,
    /// Refinement only runs when the DEP has at most this many variables.
    pub refine_max_vars: usize,
}

impl<T: Real> Default for HeuristicConfig<T> {
    fn default() -> Self {
        Self {
            eps: T::lit(0.05),
            recourse_budget: Budget::default().with_node_limit(20_000),
            refine_node_limit: 200,
            refine_time_limit: None,
            refine_max_vars: 120,
        }
    }
}

/// A feasible DEP point and its objective.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalCandidate<T> {
    pub objective: T,
    pub x: Vec<T>,
    pub ys: Vec<Vec<T>>,
}

fn fixed_first_stage<T: Real>(
    problem: &TwoStageProblem<T>,
    x: &[T],
    budget: &Budget<T>,
) -> Result<Option<PrimalCandidate<T>>, DualError> {
    if !problem.first_stage_feasible(x, T::lit(T::FEASIBILITY_TOL)) {
        return Ok(None);
    }
    let mut ys = Vec::with_capacity(problem.n_scenarios());
    for s in 0..problem.n_scenarios() {
        let Some(model) = build_recourse(problem, s, x)? else {
            return Ok(None);
        };
        let sol = solve_mip(&model, budget)?;
        if !sol.status.has_solution() {
            return Ok(None);
        }
        ys.push(sol.values);
    }
    let objective = problem.objective_value(x, &ys);
    Ok(Some(PrimalCandidate { objective, x: x.to_vec(), ys }))
}

/// Best primal point found in the `(1 ± ε)` window around `center`.
pub fn primal_heuristic<T: Real>(
    problem: &TwoStageProblem<T>,
    center: &[T],
    config: &HeuristicConfig<T>,
) -> Result<PrimalCandidate<T>, DualError> {
    if center.len() != problem.n_first() {
        return Err(DualError::InvalidConfig(format!(
            "heuristic center has length {}, expected {}",
            center.len(),
            problem.n_first()
        )));
    }
    let mut x = Vec::with_capacity(center.len());
    for (spec, &c) in problem.first_stage.iter().zip(center) {
        let Some((lo, hi)) = trust_region_window(spec, c, config.eps) else {
            return Err(DualError::NoIncumbent);
        };
        let v = if spec.kind == VarKind::Continuous { c } else { c.round() };
        x.push(v.max(lo).min(hi));
    }
    let mut best = fixed_first_stage(problem, &x, &config.recourse_budget)?;

    let dep_vars = problem.n_first() + problem.n_scenarios() * problem.n_second();
    if config.refine_node_limit > 0 && dep_vars <= config.refine_max_vars {
        let model = build_restricted_dep(problem, center, config.eps)?;
        let mut budget = Budget::default().with_node_limit(config.refine_node_limit);
        budget.time_limit = config.refine_time_limit;
        budget.cutoff = best.as_ref().map(|b| b.objective);
        let sol = solve_mip(&model, &budget)?;
        if sol.status.has_solution() && best.as_ref().map_or(true, |b| sol.objective < b.objective) {
            let (x, ys) = split_dep_values(problem, &sol.values);
            best = Some(PrimalCandidate { objective: problem.objective_value(&x, &ys), x, ys });
        }
    }
    best.ok_or(DualError::NoIncumbent)
}

/// Final primal recovery around the last master solution.
pub fn recover_primal<T: Real>(
    problem: &TwoStageProblem<T>,
    center: &[T],
    config: &HeuristicConfig<T>,
) -> Result<PrimalCandidate<T>, DualError> {
    primal_heuristic(problem, center, config)
}
