use std::time::{Duration, Instant};

use crate::error::DualError;
use crate::reduction::{reduce, ReductionResult};
use crate::scalar::Real;
use crate::smip::TwoStageProblem;

use super::heuristic::{primal_heuristic, recover_primal, HeuristicConfig, PrimalCandidate};
use super::step::{norm_sq, polyak_step, subgradient, update_multipliers, GammaController};
use super::trace::RunSummary;
use super::{evaluate_dual, DualConfig, DualState, IterationRecord, Multipliers, Phase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GapClosed,
    ZeroSubgradient,
    IterationLimit,
    TimeLimit,
}

/// How reduced-set multipliers are spread over the full scenario set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MappingRule {
    /// `λ⁰_i = λ*_ρ(i)`.
    Verbatim,
    /// `λ⁰_i = λ*_ρ(i) · p_i / p'_ρ(i)`: splits each representative's
    /// multiplier over its cluster by probability, so the cluster's
    /// aggregate multiplier equals the representative's.
    ProbabilityScaled,
}

impl MappingRule {
    pub fn as_str(self) -> &'static str {
        match self {
            MappingRule::Verbatim => "verbatim",
            MappingRule::ProbabilityScaled => "probability_scaled",
        }
    }
}

/// Configuration shared by [`run_lotus`] and [`run_dd`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig<T> {
    /// Share of scenarios kept for the warm start, in `(0, 1]`.
    pub fraction: f64,
    /// Warm-start iterations; 0 skips the warm start.
    pub ws_iterations: usize,
    /// Feature weight; defaults to the length of `ξ`.
    pub omega: Option<T>,
    pub mapping: MappingRule,
    /// Applies to each phase; `max_iterations` caps the full phase.
    pub dual: DualConfig<T>,
    /// Wall-clock budget shared by both phases.
    pub total_budget: Option<Duration>,
    /// Final trust-region recovery.
    pub recovery: HeuristicConfig<T>,
}

impl<T: Real> Default for RunConfig<T> {
    fn default() -> Self {
        let recovery = HeuristicConfig { refine_node_limit: 2_000, refine_max_vars: 400, ..HeuristicConfig::default() };
        Self {
            fraction: 0.30,
            ws_iterations: 10,
            omega: None,
            mapping: MappingRule::ProbabilityScaled,
            dual: DualConfig::default(),
            total_budget: None,
            recovery,
        }
    }
}

impl<T: Real> RunConfig<T> {
    pub fn validate(&self) -> Result<(), DualError> {
        let bad = |m: String| Err(DualError::InvalidConfig(m));
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return bad(format!("fraction {} outside (0, 1]", self.fraction));
        }
        if let Some(w) = self.omega {
            if !(w > T::zero()) {
                return bad(format!("ω = {w} must be positive"));
            }
        }
        let d = &self.dual;
        if !(d.gamma0 > T::zero() && d.gamma0 <= T::lit(2.0)) {
            return bad(format!("γ₀ = {} outside (0, 2]", d.gamma0));
        }
        if d.stall_threshold == 0 || d.heuristic_period == 0 {
            return bad("stall threshold and heuristic period must be positive".into());
        }
        if !(d.gap_tolerance >= T::zero()) || !(d.heuristic.eps >= T::zero()) || !(self.recovery.eps >= T::zero()) {
            return bad("tolerances must be non-negative".into());
        }
        if self.total_budget == Some(Duration::ZERO) {
            return bad("total budget must be positive".into());
        }
        Ok(())
    }
}

/// Result of one subgradient phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOutcome<T> {
    pub state: DualState<T>,
    pub trace: Vec<IterationRecord>,
    pub termination: Termination,
    /// Best heuristic point of this phase.
    pub incumbent: Option<PrimalCandidate<T>>,
}

struct Clock {
    start: Instant,
    deadline: Option<Instant>,
}

impl Clock {
    fn new(budget: Option<Duration>) -> Self {
        let start = Instant::now();
        Self { start, deadline: budget.map(|b| start + b) }
    }

    fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn remaining(&self) -> Option<Duration> {
        self.deadline.map(|d| d.saturating_duration_since(Instant::now()))
    }
}

fn f(v: impl Real) -> f64 {
    v.as_f64()
}

fn run_phase<T: Real>(
    problem: &TwoStageProblem<T>,
    lambda0: Multipliers<T>,
    config: &DualConfig<T>,
    phase: Phase,
    clock: &Clock,
    k_offset: usize,
) -> Result<PhaseOutcome<T>, DualError> {
    let mut state = DualState::new(lambda0, config.gamma0, phase);
    let mut gc = GammaController::new(config.gamma0, config.stall_threshold, config.min_improvement);
    let mut trace = Vec::new();
    let mut incumbent: Option<PrimalCandidate<T>> = None;
    let phase_deadline = config.time_limit.map(|t| Instant::now() + t);
    let zero_tol = T::lit(T::PIVOT_TOL);
    let termination = loop {
        if state.k >= config.max_iterations {
            break Termination::IterationLimit;
        }
        if clock.expired() || phase_deadline.is_some_and(|d| Instant::now() >= d) {
            break Termination::TimeLimit;
        }
        let t0 = Instant::now();
        let ev = evaluate_dual(problem, &state.lambda, &config.subproblem_budget, config.parallel)?;
        if ev.certified && ev.z_dual > state.best_dual {
            state.best_dual = ev.z_dual;
            state.best_lambda = state.lambda.clone();
        }
        gc.observe(ev.z_dual);
        state.gamma = gc.gamma;
        state.stall = gc.stall;

        if state.k % config.heuristic_period == 0 {
            match primal_heuristic(problem, &ev.x_master, &config.heuristic) {
                Ok(c) => {
                    if state.best_primal.map_or(true, |zp| c.objective < zp) {
                        state.best_primal = Some(c.objective);
                        state.incumbent = Some(c.x.clone());
                        incumbent = Some(c);
                    }
                }
                Err(DualError::NoIncumbent) => log::debug!("heuristic found nothing at iteration {}", state.k),
                Err(e) => return Err(e),
            }
        }
        state.last_master = ev.x_master.clone();

        let g = subgradient(&ev.x_master, &ev.x_locals);
        let g_norm = norm_sq(&g).sqrt();
        let stop = if g_norm <= zero_tol {
            Some(Termination::ZeroSubgradient)
        } else if state.gap().is_some_and(|gap| gap <= config.gap_tolerance) {
            Some(Termination::GapClosed)
        } else {
            None
        };
        let alpha = if stop.is_some() {
            T::zero()
        } else {
            match polyak_step(&state, &g, ev.z_dual) {
                Ok(a) => a,
                Err(DualError::MissingPrimalBound) => T::one() / (T::from_count(state.k + 1) * g_norm),
                Err(e) => return Err(e),
            }
        };
        trace.push(IterationRecord {
            k: k_offset + state.k,
            phase,
            t_wall_s: clock.elapsed(),
            z_dual: f(ev.z_dual),
            z_primal_best: state.best_primal.map(f),
            rel_gap: state.gap().map(f),
            alpha: f(alpha),
            g_norm: f(g_norm),
            iter_time_s: t0.elapsed().as_secs_f64(),
            certified: ev.certified,
        });
        state.k += 1;
        if let Some(t) = stop {
            break t;
        }
        state.lambda = update_multipliers(&state.lambda, alpha, &g);
    };
    Ok(PhaseOutcome { state, trace, termination, incumbent })
}

/// Subgradient ascent from `lambda0` on `problem`.
pub fn run_subgradient<T: Real>(
    problem: &TwoStageProblem<T>,
    lambda0: Multipliers<T>,
    config: &DualConfig<T>,
    phase: Phase,
) -> Result<PhaseOutcome<T>, DualError> {
    check_lambda(problem, &lambda0)?;
    run_phase(problem, lambda0, config, phase, &Clock::new(None), 0)
}

fn check_lambda<T: Real>(problem: &TwoStageProblem<T>, lambda: &Multipliers<T>) -> Result<(), DualError> {
    if lambda.values.len() != problem.n_scenarios() || lambda.values.iter().any(|l| l.len() != problem.n_first()) {
        return Err(DualError::InvalidConfig("multiplier dimensions do not match the problem".into()));
    }
    if !lambda.in_domain() {
        return Err(DualError::InvalidConfig("inequality coupling needs non-negative multipliers".into()));
    }
    Ok(())
}

/// Spreads reduced-set multipliers over the full scenario set via `ρ`.
pub fn warm_start_map<T: Real>(
    lambda_star: &Multipliers<T>,
    reduction: &ReductionResult<T>,
    probabilities: &[T],
    rule: MappingRule,
) -> Result<Multipliers<T>, DualError> {
    if lambda_star.values.len() != reduction.selected.len() {
        return Err(DualError::InvalidConfig(format!(
            "{} multiplier vectors for {} representatives",
            lambda_star.values.len(),
            reduction.selected.len()
        )));
    }
    if probabilities.len() != reduction.mapping.len() {
        return Err(DualError::InvalidConfig("one probability per original scenario required".into()));
    }
    let values = (0..reduction.mapping.len())
        .map(|i| {
            let pos = reduction.representative_position(i).ok_or(DualError::UnmappedScenario(i))?;
            let src = &lambda_star.values[pos];
            Ok(match rule {
                MappingRule::Verbatim => src.clone(),
                MappingRule::ProbabilityScaled => {
                    let w = probabilities[i] / reduction.probabilities[pos];
                    src.iter().map(|&l| l * w).collect()
                }
            })
        })
        .collect::<Result<Vec<_>, DualError>>()?;
    Ok(Multipliers { values, coupling: lambda_star.coupling })
}

/// Outcome of a complete LOTUS or DD run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult<T> {
    /// State at the end of the full phase, with the recovered bound folded in.
    pub state: DualState<T>,
    /// Warm-start state on the reduced problem, if that phase ran.
    pub warm_state: Option<DualState<T>>,
    pub trace: Vec<IterationRecord>,
    pub termination: Termination,
    /// Best feasible point of the full problem.
    pub best: Option<PrimalCandidate<T>>,
    pub reduction: Option<ReductionResult<T>>,
    pub summary: RunSummary,
}

fn finish<T: Real>(
    problem: &TwoStageProblem<T>,
    config: &RunConfig<T>,
    method: &str,
    clock: &Clock,
    warm: Option<(PhaseOutcome<T>, ReductionResult<T>, f64)>,
    full: PhaseOutcome<T>,
) -> Result<RunResult<T>, DualError> {
    let t_full_end = clock.elapsed();
    let PhaseOutcome { mut state, mut trace, termination, incumbent } = full;
    let mut best = incumbent;
    let t_rec = Instant::now();
    // The refinement may use what is left of the budget, never more.
    let mut recovery = config.recovery.clone();
    if let Some(left) = clock.remaining() {
        recovery.refine_time_limit = Some(recovery.refine_time_limit.map_or(left, |t| t.min(left)));
    }
    match recover_primal(problem, &state.last_master, &recovery) {
        Ok(c) => {
            if best.as_ref().map_or(true, |b| c.objective < b.objective) {
                best = Some(c);
            }
        }
        Err(DualError::NoIncumbent) => log::warn!("primal recovery found no feasible point"),
        Err(e) => return Err(e),
    }
    if let Some(b) = &best {
        state.best_primal = Some(b.objective);
        state.incumbent = Some(b.x.clone());
    }
    let (warm_state, warm_trace, reduction, t_warm) = match warm {
        Some((w, r, t)) => (Some(w.state), w.trace, Some(r), t),
        None => (None, Vec::new(), None, 0.0),
    };
    let k_next = warm_trace.len() + trace.len();
    trace.push(IterationRecord {
        k: k_next,
        phase: Phase::Recovery,
        t_wall_s: clock.elapsed(),
        z_dual: f(state.best_dual),
        z_primal_best: state.best_primal.map(f),
        rel_gap: state.gap().map(f),
        alpha: 0.0,
        g_norm: 0.0,
        iter_time_s: t_rec.elapsed().as_secs_f64(),
        certified: true,
    });
    let mut all = warm_trace;
    all.extend(trace);
    let summary = RunSummary::from_run(
        method,
        problem,
        config,
        reduction.as_ref().map(|r| r.selected.len()),
        &all,
        &state,
        termination,
        t_warm,
        t_full_end,
    );
    Ok(RunResult { state, warm_state, trace: all, termination, best, reduction, summary })
}

/// Dual decomposition cold-started at `λ = 0`, followed by primal recovery.
pub fn run_dd<T: Real>(problem: &TwoStageProblem<T>, config: &RunConfig<T>) -> Result<RunResult<T>, DualError> {
    config.validate()?;
    problem.validate()?;
    let clock = Clock::new(config.total_budget);
    let full = run_phase(problem, Multipliers::zeros(problem), &config.dual, Phase::Full, &clock, 0)?;
    finish(problem, config, "dd", &clock, None, full)
}

/// Reduce, solve the reduced dual, map its multipliers, solve the full dual
/// from there, and recover a primal bound.
pub fn run_lotus<T: Real>(problem: &TwoStageProblem<T>, config: &RunConfig<T>) -> Result<RunResult<T>, DualError> {
    config.validate()?;
    problem.validate()?;
    let clock = Clock::new(config.total_budget);
    let mut warm = None;
    let mut lambda0 = Multipliers::zeros(problem);
    if config.ws_iterations > 0 {
        let xi_dim = problem.scenarios[0].xi.len().max(1);
        let omega = config.omega.unwrap_or_else(|| T::from_count(xi_dim));
        let (reduced, reduction) = reduce(problem, config.fraction, omega)?;
        let ws_config = DualConfig { max_iterations: config.ws_iterations, ..config.dual.clone() };
        let ws = run_phase(&reduced, Multipliers::zeros(&reduced), &ws_config, Phase::WarmStart, &clock, 0)?;
        lambda0 = warm_start_map(&ws.state.best_lambda, &reduction, &problem.probabilities(), config.mapping)?;
        warm = Some((ws, reduction, clock.elapsed()));
    }
    let k_offset = warm.as_ref().map_or(0, |w: &(PhaseOutcome<T>, _, _)| w.0.trace.len());
    let full = run_phase(problem, lambda0, &config.dual, Phase::Full, &clock, k_offset)?;
    finish(problem, config, "lotus", &clock, warm, full)
}
