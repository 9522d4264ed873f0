use rayon::prelude::*;

use crate::error::{DualError, MipError};
use crate::mip::{solve_mip, Budget, MipSolution, MipStatus};
use crate::scalar::Real;
use crate::smip::{build_master, build_subproblem, TwoStageProblem};

use super::Multipliers;

#[derive(Debug, Clone, PartialEq)]
pub struct DualEvaluation<T> {
    /// Master objective plus all subproblem objectives.
    pub z_dual: T,
    pub x_master: Vec<T>,
    /// First-stage part of each subproblem solution.
    pub x_locals: Vec<Vec<T>>,
    pub master_objective: T,
    pub sub_objectives: Vec<T>,
    /// Every solve ended with proven optimality.
    pub certified: bool,
}

fn status_str(s: MipStatus) -> String {
    format!("{s:?}").to_lowercase()
}

/// Solves the master and every scenario subproblem at `λ`.
///
/// Subproblem results are combined in scenario order, so the value is the
/// same whether or not `parallel` is set.
pub fn evaluate_dual<T: Real>(
    problem: &TwoStageProblem<T>,
    lambda: &Multipliers<T>,
    budget: &Budget<T>,
    parallel: bool,
) -> Result<DualEvaluation<T>, DualError> {
    let master = solve_mip(&build_master(problem, &lambda.values)?, budget)?;
    if !master.status.has_solution() {
        return Err(DualError::MasterInfeasible(status_str(master.status)));
    }
    let solve = |s: usize| -> Result<MipSolution<T>, DualError> {
        let model = build_subproblem(problem, s, &lambda.values[s])?;
        let sol = solve_mip(&model, budget).map_err(|e: MipError| DualError::Mip(e))?;
        if !sol.status.has_solution() {
            return Err(DualError::SubproblemInfeasible { scenario: s, status: status_str(sol.status) });
        }
        Ok(sol)
    };
    let subs: Vec<MipSolution<T>> = if parallel {
        (0..problem.n_scenarios()).into_par_iter().map(solve).collect::<Result<_, _>>()?
    } else {
        (0..problem.n_scenarios()).map(solve).collect::<Result<_, _>>()?
    };
    let n = problem.n_first();
    let certified = master.status == MipStatus::Optimal && subs.iter().all(|s| s.status == MipStatus::Optimal);
    let sub_objectives: Vec<T> = subs.iter().map(|s| s.objective).collect();
    let mut z_dual = master.objective;
    for &v in &sub_objectives {
        z_dual += v;
    }
    Ok(DualEvaluation {
        z_dual,
        x_master: master.values,
        x_locals: subs.into_iter().map(|s| s.values[..n].to_vec()).collect(),
        master_objective: master.objective,
        sub_objectives,
        certified,
    })
}
