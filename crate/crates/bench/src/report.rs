//! Head-to-head comparison of completed runs.
//!
//! All reported objective values are profits (`−Z`), so larger is better.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::path::Path;

use lotus_core::dual::{IterationRecord, Termination};
use serde::{Deserialize, Serialize};

use crate::error::BenchError;
use crate::ratio::{aggregate_series, ratio_series, time_grid, AggregatePoint, RatioPoint};
use crate::run::{discover_runs, LoadedRun, Method};
use crate::stats::{wilcoxon_signed_rank, Wilcoxon};
use crate::timing::{timing_table, TimingTable};

pub const REPORT_VERSION: u32 = 1;
/// Relative profit difference at or below which a pair is a draw.
pub const DRAW_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub run_dir: String,
    /// Best feasible profit, `−Z_P`.
    pub primal_profit: Option<f64>,
    /// Profit upper bound, `−Z_D`.
    pub dual_profit: Option<f64>,
    pub rel_gap: Option<f64>,
    pub termination: Termination,
    pub iterations_warm: usize,
    pub iterations_full: usize,
    pub t_total_s: f64,
}

impl MethodResult {
    fn from_run(run: &LoadedRun) -> Self {
        let s = &run.summary;
        MethodResult {
            run_dir: run.dir.display().to_string(),
            primal_profit: s.best_primal.map(|z| -z),
            dual_profit: s.best_dual.map(|z| -z),
            rel_gap: s.rel_gap,
            termination: s.termination,
            iterations_warm: s.iterations_warm,
            iterations_full: s.iterations_full,
            t_total_s: s.t_total_s,
        }
    }

    fn has_positive_primal(&self) -> bool {
        self.primal_profit.is_some_and(|p| p > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Win,
    Draw,
    Loss,
}

/// LOTUS against DD on final profits. A missing incumbent ranks below any
/// profit; two missing incumbents draw.
pub fn classify(lotus: Option<f64>, dd: Option<f64>) -> Outcome {
    match (lotus, dd) {
        (None, None) => Outcome::Draw,
        (Some(_), None) => Outcome::Win,
        (None, Some(_)) => Outcome::Loss,
        (Some(l), Some(d)) => {
            if (l - d).abs() / d.abs().max(1e-10) <= DRAW_TOLERANCE {
                Outcome::Draw
            } else if l > d {
                Outcome::Win
            } else {
                Outcome::Loss
            }
        }
    }
}

/// `(P_L − P_D) / |P_D|`.
pub fn profit_improvement(lotus: f64, dd: f64) -> f64 {
    (lotus - dd) / dd.abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub instance: String,
    pub seed: u64,
    pub budget_s: f64,
    pub dd: Option<MethodResult>,
    pub lotus: Option<MethodResult>,
    pub outcome: Option<Outcome>,
    /// Relative profit improvement of LOTUS; only for included pairs.
    pub improvement: Option<f64>,
    /// Why the pair is left out of the paired statistics.
    pub excluded: Option<String>,
    pub ratio_at_horizon: Option<f64>,
}

impl PairRow {
    pub fn id(&self) -> String {
        format!("{}-s{}", self.instance, self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonStats {
    pub pairs: usize,
    /// Pairs where both methods found a positive feasible profit.
    pub included: usize,
    pub wins: usize,
    pub draws: usize,
    pub losses: usize,
    pub win_rate: f64,
    pub draw_rate: f64,
    pub loss_rate: f64,
    /// Mean of `improvement` over included pairs.
    pub avg_improvement: Option<f64>,
    pub avg_improvement_pct: Option<f64>,
    pub wilcoxon: Option<Wilcoxon>,
    pub wilcoxon_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSeries {
    pub pair: String,
    pub series: Vec<RatioPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub grid_step_s: f64,
    pub horizon_s: f64,
    pub aggregate: Vec<AggregatePoint>,
    pub pairs: Vec<PairSeries>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub format_version: u32,
    pub methods: Vec<Method>,
    pub pairs: Vec<PairRow>,
    /// Absent unless both methods ran.
    pub stats: Option<ComparisonStats>,
    pub ratio: Option<RatioReport>,
    pub timing: TimingTable,
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

type PairKey = (String, u64, u64);

fn horizon(pairs: &[(&LoadedRun, &LoadedRun)]) -> f64 {
    let end = |t: &[IterationRecord]| t.last().map_or(0.0, |r| r.t_wall_s);
    pairs
        .iter()
        .map(|(l, d)| l.meta.budget_s.max(d.meta.budget_s).max(end(&l.trace)).max(end(&d.trace)))
        .fold(0.0, f64::max)
}

fn stats(rows: &[PairRow]) -> ComparisonStats {
    let count = |o: Outcome| rows.iter().filter(|r| r.outcome == Some(o)).count();
    let (wins, draws, losses) = (count(Outcome::Win), count(Outcome::Draw), count(Outcome::Loss));
    let n = rows.len();
    let rate = |c: usize| if n == 0 { 0.0 } else { c as f64 / n as f64 };
    let included: Vec<&PairRow> = rows.iter().filter(|r| r.excluded.is_none()).collect();
    let improvements: Vec<f64> = included.iter().filter_map(|r| r.improvement).collect();
    let avg = (!improvements.is_empty()).then(|| improvements.iter().sum::<f64>() / improvements.len() as f64);
    let diffs: Vec<f64> = included
        .iter()
        .map(|r| {
            let p = |m: &Option<MethodResult>| m.as_ref().and_then(|m| m.primal_profit).expect("included pair");
            p(&r.lotus) - p(&r.dd)
        })
        .collect();
    let (wilcoxon, wilcoxon_note) = match wilcoxon_signed_rank(&diffs) {
        Ok(w) => (Some(w), None),
        Err(e) => (None, Some(e.to_string())),
    };
    ComparisonStats {
        pairs: n,
        included: included.len(),
        wins,
        draws,
        losses,
        win_rate: rate(wins),
        draw_rate: rate(draws),
        loss_rate: rate(losses),
        avg_improvement: avg,
        avg_improvement_pct: avg.map(|a| 100.0 * a),
        wilcoxon,
        wilcoxon_note,
    }
}

/// Pairs runs on `(instance, seed, budget)` and computes every comparison
/// quantity. A key with two runs of the same method keeps the first.
pub fn build_report(runs: &[LoadedRun], grid_step: f64) -> Result<ComparisonReport, BenchError> {
    if !(grid_step.is_finite() && grid_step > 0.0) {
        return Err(BenchError::Config(format!("grid step {grid_step} must be positive")));
    }
    let mut groups: BTreeMap<PairKey, BTreeMap<Method, &LoadedRun>> = BTreeMap::new();
    for run in runs {
        let key = (run.meta.instance.clone(), run.meta.seed, run.meta.budget_s.to_bits());
        match groups.entry(key).or_default().entry(run.meta.method) {
            Entry::Occupied(_) => {
                log::warn!("duplicate {} run ignored: {}", run.meta.method.as_str(), run.dir.display())
            }
            Entry::Vacant(slot) => {
                slot.insert(run);
            }
        }
    }
    let mut methods: Vec<Method> = runs.iter().map(|r| r.meta.method).collect();
    methods.sort();
    methods.dedup();
    let head_to_head = methods == [Method::Dd, Method::Lotus];

    let mut rows = Vec::new();
    let mut matched = Vec::new();
    for ((instance, seed, budget_bits), group) in &groups {
        let dd = group.get(&Method::Dd).map(|r| MethodResult::from_run(r));
        let lotus = group.get(&Method::Lotus).map(|r| MethodResult::from_run(r));
        let mut row = PairRow {
            instance: instance.clone(),
            seed: *seed,
            budget_s: f64::from_bits(*budget_bits),
            dd,
            lotus,
            outcome: None,
            improvement: None,
            excluded: None,
            ratio_at_horizon: None,
        };
        if head_to_head {
            match (&row.lotus, &row.dd) {
                (Some(l), Some(d)) => {
                    row.outcome = Some(classify(l.primal_profit, d.primal_profit));
                    let failed: Vec<&str> = [("lotus", l), ("dd", d)]
                        .iter()
                        .filter(|(_, m)| !m.has_positive_primal())
                        .map(|(name, _)| *name)
                        .collect();
                    if failed.is_empty() {
                        row.improvement =
                            Some(profit_improvement(l.primal_profit.unwrap(), d.primal_profit.unwrap()));
                    } else {
                        let why = format!("no feasible positive primal: {}", failed.join(", "));
                        log::info!("pair {} excluded ({why})", row.id());
                        row.excluded = Some(why);
                    }
                    matched.push((group[&Method::Lotus], group[&Method::Dd]));
                }
                _ => {
                    log::warn!("pair {} lacks a counterpart run", row.id());
                    row.excluded = Some("unpaired run".into());
                }
            }
        }
        rows.push(row);
    }

    let (stats, ratio) = if head_to_head {
        let paired: Vec<PairRow> = rows.iter().filter(|r| r.outcome.is_some()).cloned().collect();
        let grid = time_grid(grid_step, horizon(&matched));
        let series: Vec<Vec<RatioPoint>> = matched.iter().map(|(l, d)| ratio_series(&l.trace, &d.trace, &grid)).collect();
        let mut pair_series = Vec::new();
        let mut it = series.iter();
        for row in rows.iter_mut().filter(|r| r.outcome.is_some()) {
            let s = it.next().expect("one series per matched pair");
            row.ratio_at_horizon = s.last().map(|p| p.r);
            pair_series.push(PairSeries { pair: row.id(), series: s.clone() });
        }
        let horizon_s = grid.last().copied().unwrap_or(0.0);
        let ratio = RatioReport { grid_step_s: grid_step, horizon_s, aggregate: aggregate_series(&series), pairs: pair_series };
        (Some(stats(&paired)), Some(ratio))
    } else {
        (None, None)
    };

    let traces = |m: Method| -> Vec<&[IterationRecord]> {
        runs.iter().filter(|r| r.meta.method == m).map(|r| r.trace.as_slice()).collect()
    };
    let timing = timing_table(&traces(Method::Lotus), &traces(Method::Dd));
    Ok(ComparisonReport { format_version: REPORT_VERSION, methods, pairs: rows, stats, ratio, timing })
}

pub fn compare_runs(root: &Path, grid_step: f64) -> Result<ComparisonReport, BenchError> {
    let runs = discover_runs(root)?;
    if runs.is_empty() {
        return Err(BenchError::Config(format!("no runs found below {}", root.display())));
    }
    build_report(&runs, grid_step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draw_threshold_is_relative() {
        assert_eq!(classify(Some(100.0), Some(100.0 + 5e-5)), Outcome::Draw);
        assert_eq!(classify(Some(100.0), Some(100.0 + 2e-4)), Outcome::Loss);
        assert_eq!(classify(Some(101.0), Some(100.0)), Outcome::Win);
        assert_eq!(classify(None, None), Outcome::Draw);
        assert_eq!(classify(Some(-5.0), None), Outcome::Win);
    }

    #[test]
    fn improvement_uses_dd_magnitude() {
        assert!((profit_improvement(102.0, 100.0) - 0.02).abs() < 1e-15);
        assert!((profit_improvement(-90.0, -100.0) - 0.1).abs() < 1e-15);
    }
}
