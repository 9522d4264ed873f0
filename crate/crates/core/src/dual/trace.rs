use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::smip::TwoStageProblem;

use super::driver::{RunConfig, Termination};
use super::{DualState, IterationRecord, Phase};

pub const TRACE_HEADER: &str = "k,phase,t_wall_s,z_dual,z_primal_best,rel_gap,alpha,g_norm,iter_time_s,certified";

/// Writes one CSV row per record under [`TRACE_HEADER`].
pub fn write_trace<W: Write>(records: &[IterationRecord], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(TRACE_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace<R: Read>(input: R) -> Result<Vec<IterationRecord>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// Per-run totals: final bounds, iteration counts per phase, and mean
/// iteration times on the reduced (`t_L(S′)`) and full (`t_L(S)`) sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub method: String,
    pub coupling: String,
    pub n_scenarios: usize,
    pub n_reduced: Option<usize>,
    pub fraction: f64,
    pub ws_iterations: usize,
    pub mapping: String,
    pub iterations_warm: usize,
    pub iterations_full: usize,
    pub t_warm_s: f64,
    pub t_full_s: f64,
    pub t_recovery_s: f64,
    pub t_total_s: f64,
    pub t_l_reduced_s: Option<f64>,
    pub t_l_full_s: Option<f64>,
    pub best_dual: Option<f64>,
    pub best_primal: Option<f64>,
    pub rel_gap: Option<f64>,
    pub termination: Termination,
    pub all_certified: bool,
}

fn mean_iter_time(trace: &[IterationRecord], phase: Phase) -> Option<f64> {
    let times: Vec<f64> = trace.iter().filter(|r| r.phase == phase).map(|r| r.iter_time_s).collect();
    (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64)
}

impl RunSummary {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_run<T: Real>(
        method: &str,
        problem: &TwoStageProblem<T>,
        config: &RunConfig<T>,
        n_reduced: Option<usize>,
        trace: &[IterationRecord],
        state: &DualState<T>,
        termination: Termination,
        t_warm_end: f64,
        t_full_end: f64,
    ) -> Self {
        let count = |p: Phase| trace.iter().filter(|r| r.phase == p).count();
        let t_total = trace.last().map_or(t_full_end, |r| r.t_wall_s);
        let lotus = method == "lotus";
        Self {
            method: method.to_string(),
            coupling: problem.coupling.as_str().to_string(),
            n_scenarios: problem.n_scenarios(),
            n_reduced,
            fraction: if lotus { config.fraction } else { 1.0 },
            ws_iterations: if lotus { config.ws_iterations } else { 0 },
            mapping: config.mapping.as_str().to_string(),
            iterations_warm: count(Phase::WarmStart),
            iterations_full: count(Phase::Full),
            t_warm_s: t_warm_end,
            t_full_s: t_full_end - t_warm_end,
            t_recovery_s: t_total - t_full_end,
            t_total_s: t_total,
            t_l_reduced_s: mean_iter_time(trace, Phase::WarmStart),
            t_l_full_s: mean_iter_time(trace, Phase::Full),
            best_dual: state.best_dual.is_finite().then(|| state.best_dual.as_f64()),
            best_primal: state.best_primal.map(|v| v.as_f64()),
            rel_gap: state.gap().map(|v| v.as_f64()),
            termination,
            all_certified: trace.iter().all(|r| r.certified),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}
