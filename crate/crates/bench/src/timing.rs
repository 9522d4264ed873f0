//! Per-phase iteration costs and the warm-start gain decomposition.

use lotus_core::dual::{IterationRecord, Phase};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseTiming {
    /// Mean `iter_time_s` over the phase's records; `None` without records.
    pub mean_s: Option<f64>,
    /// Records pooled over all runs.
    pub iterations: usize,
    /// Mean records per run.
    pub iterations_per_run: f64,
}

fn phase_timing(traces: &[&[IterationRecord]], phase: Phase) -> PhaseTiming {
    let times: Vec<f64> =
        traces.iter().flat_map(|t| t.iter()).filter(|r| r.phase == phase).map(|r| r.iter_time_s).collect();
    let per_run = if traces.is_empty() { 0.0 } else { times.len() as f64 / traces.len() as f64 };
    PhaseTiming {
        mean_s: (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64),
        iterations: times.len(),
        iterations_per_run: per_run,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingTable {
    /// `t_L(S′)`: LOTUS iterations on the reduced set.
    pub lotus_reduced: PhaseTiming,
    /// `t_L(S)`: LOTUS iterations on the full set.
    pub lotus_full: PhaseTiming,
    /// `t_DD`.
    pub dd: PhaseTiming,
    /// `(t_DD − t_L(S)) / t_DD · 100`.
    pub speed_gain_pct: Option<f64>,
    /// `N_red · (t_L(S) − t_L(S′))`, with `N_red` the mean warm-start
    /// iterations per LOTUS run.
    pub exploration_savings_s: Option<f64>,
}

pub fn speed_gain_pct(t_dd: f64, t_lotus_full: f64) -> f64 {
    (t_dd - t_lotus_full) / t_dd * 100.0
}

pub fn exploration_savings(n_reduced: f64, t_lotus_full: f64, t_lotus_reduced: f64) -> f64 {
    n_reduced * (t_lotus_full - t_lotus_reduced)
}

/// Recovery records are not subgradient iterations and are never counted.
pub fn timing_table(lotus: &[&[IterationRecord]], dd: &[&[IterationRecord]]) -> TimingTable {
    let lotus_reduced = phase_timing(lotus, Phase::WarmStart);
    let lotus_full = phase_timing(lotus, Phase::Full);
    let dd_t = phase_timing(dd, Phase::Full);
    let speed_gain_pct = match (dd_t.mean_s, lotus_full.mean_s) {
        (Some(d), Some(l)) if d > 0.0 => Some(speed_gain_pct(d, l)),
        _ => None,
    };
    let exploration_savings_s = match (lotus_full.mean_s, lotus_reduced.mean_s) {
        (Some(f), Some(r)) => Some(exploration_savings(lotus_reduced.iterations_per_run, f, r)),
        _ => None,
    };
    TimingTable { lotus_reduced, lotus_full, dd: dd_t, speed_gain_pct, exploration_savings_s }
}
