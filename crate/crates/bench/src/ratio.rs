//! Primal-bound ratio `R(t) = profit_LOTUS(t) / profit_DD(t)` on a time grid.

use lotus_core::dual::{IterationRecord, Phase};
use serde::{Deserialize, Serialize};

use crate::stats::{summarize, Summary};

/// Best full-problem net cost known at time `t`, right-continuous in `t`.
///
/// Warm-start records are ignored: their primal bound belongs to the reduced
/// problem.
pub fn best_primal_at(trace: &[IterationRecord], t: f64) -> Option<f64> {
    trace
        .iter()
        .filter(|r| r.phase != Phase::WarmStart && r.t_wall_s <= t)
        .filter_map(|r| r.z_primal_best)
        .min_by(f64::total_cmp)
}

/// Grid `0, step, 2·step, ...` up to and including the first point at or
/// past `horizon`.
pub fn time_grid(step: f64, horizon: f64) -> Vec<f64> {
    assert!(step > 0.0, "grid step must be positive");
    let n = (horizon.max(0.0) / step).ceil() as usize;
    (0..=n).map(|k| k as f64 * step).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub t: f64,
    pub r: f64,
}

/// `R(t)` in profit orientation; `1` at `t = 0` and wherever either method
/// has no incumbent with positive profit yet, so the ratio never changes sign
/// or divides by zero.
pub fn ratio_series(lotus: &[IterationRecord], dd: &[IterationRecord], grid: &[f64]) -> Vec<RatioPoint> {
    grid.iter()
        .map(|&t| {
            let r = match (t > 0.0).then(|| (best_primal_at(lotus, t), best_primal_at(dd, t))) {
                Some((Some(zl), Some(zd))) if zl < 0.0 && zd < 0.0 => (-zl) / (-zd),
                _ => 1.0,
            };
            RatioPoint { t, r }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregatePoint {
    pub t: f64,
    #[serde(flatten)]
    pub summary: Summary,
}

/// Pointwise mean, median and quartiles over series on a common grid.
pub fn aggregate_series(series: &[Vec<RatioPoint>]) -> Vec<AggregatePoint> {
    let Some(first) = series.first() else { return Vec::new() };
    assert!(series.iter().all(|s| s.len() == first.len()), "series must share a grid");
    first
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let values: Vec<f64> = series.iter().map(|s| s[i].r).collect();
            AggregatePoint { t: p.t, summary: summarize(&values).expect("non-empty") }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(t: f64, phase: Phase, zp: Option<f64>) -> IterationRecord {
        IterationRecord {
            k: 0,
            phase,
            t_wall_s: t,
            z_dual: -200.0,
            z_primal_best: zp,
            rel_gap: None,
            alpha: 0.0,
            g_norm: 1.0,
            iter_time_s: 0.1,
            certified: true,
        }
    }

    #[test]
    fn identical_traces_give_one() {
        let t = vec![rec(0.5, Phase::Full, Some(-100.0)), rec(1.5, Phase::Full, Some(-110.0))];
        let grid = time_grid(1.0, 3.0);
        assert!(ratio_series(&t, &t, &grid).iter().all(|p| p.r == 1.0));
    }

    #[test]
    fn ratio_after_both_incumbents() {
        let lotus = vec![rec(0.2, Phase::WarmStart, Some(-500.0)), rec(2.0, Phase::Full, Some(-102.0))];
        let dd = vec![rec(0.5, Phase::Full, Some(-100.0))];
        let s = ratio_series(&lotus, &dd, &time_grid(1.0, 3.0));
        let r: Vec<f64> = s.iter().map(|p| p.r).collect();
        assert_eq!(r[..2], [1.0, 1.0]);
        assert!((r[2] - 1.02).abs() < 1e-12);
        assert!((r[3] - 1.02).abs() < 1e-12);
    }

    #[test]
    fn non_positive_profit_counts_as_no_incumbent() {
        let lotus = vec![rec(0.5, Phase::Full, Some(-50.0))];
        let dd = vec![rec(0.5, Phase::Full, Some(10.0))];
        assert!(ratio_series(&lotus, &dd, &time_grid(1.0, 2.0)).iter().all(|p| p.r == 1.0));
    }

    #[test]
    fn grid_covers_the_horizon() {
        assert_eq!(time_grid(1.0, 2.5), vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(time_grid(0.5, 1.0), vec![0.0, 0.5, 1.0]);
    }
}
