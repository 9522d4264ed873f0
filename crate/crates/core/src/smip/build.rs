//! Model assembly: deterministic equivalent, Lagrangian master and scenario
//! subproblems, fixed-first-stage recourse, and the trust-region DEP.
//!
//! DEP variable layout: `[x (n) | y_0 (k) | y_1 (k) | ...]`.
//! Subproblem layout: `[x_s (n) | y_s (k)]`.

use crate::error::ModelError;
use crate::mip::{LinearConstraint, MipModel, ObjSense, RowSense, VarKind, VariableSpec};
use crate::scalar::Real;
use crate::smip::TwoStageProblem;

fn first_stage_rows<T: Real>(problem: &TwoStageProblem<T>, offset: usize) -> Vec<LinearConstraint<T>> {
    (0..problem.a.rows)
        .filter_map(|r| {
            let terms: Vec<_> = problem.a.row(r).map(|(j, a)| (offset + j, a)).collect();
            (!terms.is_empty()).then(|| LinearConstraint::new(terms, problem.a_senses[r], problem.b[r]))
        })
        .collect()
}

fn scenario_rows<T: Real>(
    problem: &TwoStageProblem<T>,
    s: usize,
    x_offset: usize,
    y_offset: usize,
) -> Vec<LinearConstraint<T>> {
    let sc = &problem.scenarios[s];
    (0..sc.num_rows())
        .filter_map(|r| {
            let terms: Vec<_> = sc
                .t
                .row(r)
                .map(|(j, a)| (x_offset + j, a))
                .chain(sc.w.row(r).map(|(j, a)| (y_offset + j, a)))
                .collect();
            (!terms.is_empty()).then(|| LinearConstraint::new(terms, sc.senses[r], sc.h[r]))
        })
        .collect()
}

/// Deterministic equivalent: one model over `x` and every `y_s`.
pub fn build_dep<T: Real>(problem: &TwoStageProblem<T>) -> Result<MipModel<T>, ModelError> {
    problem.validate()?;
    let n = problem.n_first();
    let k = problem.n_second();
    let mut model = MipModel::new(ObjSense::Minimize);
    for (spec, &c) in problem.first_stage.iter().zip(&problem.c) {
        model.add_var(*spec, c);
    }
    for sc in &problem.scenarios {
        for (spec, &q) in problem.second_stage.iter().zip(&sc.q) {
            model.add_var(*spec, sc.probability * q);
        }
    }
    model.constraints.extend(first_stage_rows(problem, 0));
    for s in 0..problem.n_scenarios() {
        model.constraints.extend(scenario_rows(problem, s, 0, n + s * k));
    }
    Ok(model)
}

/// Splits DEP variable values into `x` and per-scenario `y_s`.
pub fn split_dep_values<T: Real>(problem: &TwoStageProblem<T>, values: &[T]) -> (Vec<T>, Vec<Vec<T>>) {
    let n = problem.n_first();
    let k = problem.n_second();
    let x = values[..n].to_vec();
    let ys = (0..problem.n_scenarios()).map(|s| values[n + s * k..n + (s + 1) * k].to_vec()).collect();
    (x, ys)
}

fn check_multiplier_len<T>(lambda: &[T], n: usize, s: usize) -> Result<(), ModelError> {
    if lambda.len() != n {
        return Err(ModelError::dims(format!("multiplier for scenario {s} has length {}, expected {n}", lambda.len())));
    }
    Ok(())
}

/// Lagrangian master over `x ∈ 𝒳` with objective `(c − Σ_s λ_s)ᵀ x`.
///
/// The same sign applies to both coupling modes: the relaxed term is
/// `λ_sᵀ(x_s − x)` in either case, and inequality coupling only restricts
/// `λ_s ≥ 0`.
pub fn build_master<T: Real>(problem: &TwoStageProblem<T>, lambda: &[Vec<T>]) -> Result<MipModel<T>, ModelError> {
    let n = problem.n_first();
    if lambda.len() != problem.n_scenarios() {
        return Err(ModelError::dims(format!(
            "{} multiplier vectors for {} scenarios",
            lambda.len(),
            problem.n_scenarios()
        )));
    }
    if problem.c.len() != n {
        return Err(ModelError::dims("c length differs from first-stage dimension"));
    }
    let mut cost = problem.c.clone();
    for (s, l) in lambda.iter().enumerate() {
        check_multiplier_len(l, n, s)?;
        for (c, &v) in cost.iter_mut().zip(l) {
            *c -= v;
        }
    }
    let mut model = MipModel::new(ObjSense::Minimize);
    for (spec, c) in problem.first_stage.iter().zip(cost) {
        model.add_var(*spec, c);
    }
    model.constraints.extend(first_stage_rows(problem, 0));
    Ok(model)
}

/// Scenario subproblem over `(x_s, y_s)` with objective
/// `p_s q_sᵀ y_s + λ_sᵀ x_s`; the local copy keeps `x_s ∈ 𝒳`.
pub fn build_subproblem<T: Real>(
    problem: &TwoStageProblem<T>,
    s: usize,
    lambda_s: &[T],
) -> Result<MipModel<T>, ModelError> {
    let n = problem.n_first();
    if s >= problem.n_scenarios() {
        return Err(ModelError::dims(format!("scenario {s} of {}", problem.n_scenarios())));
    }
    check_multiplier_len(lambda_s, n, s)?;
    let sc = &problem.scenarios[s];
    if sc.q.len() != problem.n_second() {
        return Err(ModelError::dims(format!("scenario {s} q length")));
    }
    let mut model = MipModel::new(ObjSense::Minimize);
    for (spec, &l) in problem.first_stage.iter().zip(lambda_s) {
        model.add_var(*spec, l);
    }
    for (spec, &q) in problem.second_stage.iter().zip(&sc.q) {
        model.add_var(*spec, sc.probability * q);
    }
    model.constraints.extend(first_stage_rows(problem, 0));
    model.constraints.extend(scenario_rows(problem, s, 0, n));
    Ok(model)
}

/// Second-stage problem of scenario `s` with the first stage fixed at `x`:
/// `min p_s q_sᵀ y  s.t.  W_s y (senses) h_s − T_s x`.
///
/// Returns `Ok(None)` when a row without second-stage terms is violated by
/// `x`, i.e. the recourse is infeasible before any `y` is chosen.
pub fn build_recourse<T: Real>(
    problem: &TwoStageProblem<T>,
    s: usize,
    x: &[T],
) -> Result<Option<MipModel<T>>, ModelError> {
    if s >= problem.n_scenarios() {
        return Err(ModelError::dims(format!("scenario {s} of {}", problem.n_scenarios())));
    }
    if x.len() != problem.n_first() {
        return Err(ModelError::dims(format!("x has length {}, expected {}", x.len(), problem.n_first())));
    }
    let sc = &problem.scenarios[s];
    let tx = sc.t.mul_vec(x);
    let tol = T::lit(T::FEASIBILITY_TOL);
    let mut model = MipModel::new(ObjSense::Minimize);
    for (spec, &q) in problem.second_stage.iter().zip(&sc.q) {
        model.add_var(*spec, sc.probability * q);
    }
    for r in 0..sc.num_rows() {
        let terms: Vec<_> = sc.w.row(r).collect();
        let rhs = sc.h[r] - tx[r];
        if terms.is_empty() {
            if sc.senses[r].violation(T::zero(), rhs) > tol {
                return Ok(None);
            }
            continue;
        }
        model.add_constraint(LinearConstraint::new(terms, sc.senses[r], rhs));
    }
    Ok(Some(model))
}

/// Per-coordinate trust region `[(1−ε)x̃_j, (1+ε)x̃_j]` intersected with the
/// variable's bounds, rounded inward for integer variables. `None` marks an
/// empty window.
pub fn trust_region_window<T: Real>(spec: &VariableSpec<T>, center: T, eps: T) -> Option<(T, T)> {
    let a = (T::one() - eps) * center;
    let b = (T::one() + eps) * center;
    let mut lo = a.min(b).max(spec.lower);
    let mut hi = a.max(b).min(spec.upper);
    if spec.kind != VarKind::Continuous {
        let itol = T::lit(T::INTEGRALITY_TOL);
        lo = (lo - itol).ceil();
        hi = (hi + itol).floor();
    }
    (lo <= hi).then_some((lo, hi))
}

/// DEP with the first stage confined to the `(1 ± ε)x̃` window.
///
/// Non-empty windows become tightened bounds. An empty window keeps the
/// original bounds and adds the two window rows explicitly, which leaves the
/// model well-formed but infeasible.
pub fn build_restricted_dep<T: Real>(
    problem: &TwoStageProblem<T>,
    center: &[T],
    eps: T,
) -> Result<MipModel<T>, ModelError> {
    if center.len() != problem.n_first() {
        return Err(ModelError::dims(format!(
            "trust-region center has length {}, expected {}",
            center.len(),
            problem.n_first()
        )));
    }
    if eps < T::zero() {
        return Err(ModelError::Invalid(format!("trust-region tolerance {eps} < 0")));
    }
    let mut model = build_dep(problem)?;
    for (j, &xj) in center.iter().enumerate() {
        let spec = model.variables[j];
        match trust_region_window(&spec, xj, eps) {
            Some((lo, hi)) => {
                model.variables[j].lower = lo;
                model.variables[j].upper = hi;
            }
            None => {
                let a = (T::one() - eps) * xj;
                let b = (T::one() + eps) * xj;
                model.add_constraint(LinearConstraint::new([(j, T::one())], RowSense::Ge, a.min(b)));
                model.add_constraint(LinearConstraint::new([(j, T::one())], RowSense::Le, a.max(b)));
            }
        }
    }
    Ok(model)
}
