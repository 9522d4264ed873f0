//! Wilcoxon signed-rank test and order statistics for paired comparisons.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::statistics::{Data, OrderStatistics};
use thiserror::Error;

/// Below this many non-zero differences the p-value is exact.
pub const EXACT_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("no differences supplied")]
    Empty,
    #[error("every difference is zero")]
    AllZeroDifferences,
    #[error("non-finite difference")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wilcoxon {
    /// `min(W⁺, W⁻)`.
    pub statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Two-sided.
    pub p_value: f64,
    /// Non-zero differences that were ranked.
    pub n: usize,
    pub method: PValueMethod,
}

/// Signed ranks of the non-zero differences, with midranks for ties in `|d|`.
pub struct SignedRanks {
    pub ranks: Vec<f64>,
    pub positive: Vec<bool>,
    /// Sizes of tie groups among `|d|`.
    pub ties: Vec<usize>,
}

pub fn signed_ranks(differences: &[f64]) -> Result<SignedRanks, StatsError> {
    if differences.is_empty() {
        return Err(StatsError::Empty);
    }
    if differences.iter().any(|d| !d.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut nz: Vec<f64> = differences.iter().copied().filter(|&d| d != 0.0).collect();
    if nz.is_empty() {
        return Err(StatsError::AllZeroDifferences);
    }
    nz.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut ranks = vec![0.0; nz.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < nz.len() {
        let mut j = i;
        while j + 1 < nz.len() && nz[j + 1].abs() == nz[i].abs() {
            j += 1;
        }
        // Positions i..=j share the mean of ranks i+1..=j+1.
        let mid = (i + j + 2) as f64 / 2.0;
        ranks[i..=j].iter_mut().for_each(|r| *r = mid);
        ties.push(j - i + 1);
        i = j + 1;
    }
    let positive = nz.iter().map(|&d| d > 0.0).collect();
    Ok(SignedRanks { ranks, positive, ties })
}

fn sums(sr: &SignedRanks) -> (f64, f64) {
    sr.ranks.iter().zip(&sr.positive).fold((0.0, 0.0), |(p, m), (&r, &pos)| if pos { (p + r, m) } else { (p, m + r) })
}

/// Exact two-sided p-value: the share of the `2ⁿ` equally likely sign
/// assignments whose `W⁺` is at least as extreme as observed.
///
/// Counts `W⁺` values by dynamic programming over doubled ranks, which are
/// integers even with midranks.
pub fn wilcoxon_exact(differences: &[f64]) -> Result<Wilcoxon, StatsError> {
    let sr = signed_ranks(differences)?;
    let (w_plus, w_minus) = sums(&sr);
    let doubled: Vec<usize> = sr.ranks.iter().map(|&r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0f64; total + 1];
    counts[0] = 1.0;
    for &r in &doubled {
        for s in (r..=total).rev() {
            counts[s] += counts[s - r];
        }
    }
    let patterns = 2f64.powi(sr.ranks.len() as i32);
    let w = w_plus.min(w_minus);
    let w2 = (2.0 * w).round() as usize;
    // By symmetry P(W⁺ ≥ total − w) equals the lower tail.
    let lower: f64 = counts[..=w2].iter().sum();
    let p_value = (2.0 * lower / patterns).min(1.0);
    Ok(Wilcoxon { statistic: w, w_plus, w_minus, p_value, n: sr.ranks.len(), method: PValueMethod::Exact })
}

/// Normal approximation with tie-corrected variance and a 0.5 continuity
/// correction.
pub fn wilcoxon_normal(differences: &[f64]) -> Result<Wilcoxon, StatsError> {
    let sr = signed_ranks(differences)?;
    let (w_plus, w_minus) = sums(&sr);
    let n = sr.ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let tie: f64 = sr.ties.iter().map(|&t| (t * t * t - t) as f64).sum();
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie / 48.0;
    let w = w_plus.min(w_minus);
    let p_value = if var > 0.0 {
        let z = ((mean - w).abs() - 0.5).max(0.0) / var.sqrt();
        let phi = Normal::standard();
        (2.0 * (1.0 - phi.cdf(z))).min(1.0)
    } else {
        1.0
    };
    Ok(Wilcoxon { statistic: w, w_plus, w_minus, p_value, n: sr.ranks.len(), method: PValueMethod::Normal })
}

/// Exact below [`EXACT_LIMIT`] non-zero differences, normal otherwise.
pub fn wilcoxon_signed_rank(differences: &[f64]) -> Result<Wilcoxon, StatsError> {
    let nz = differences.iter().filter(|&&d| d != 0.0).count();
    if nz > 0 && nz < EXACT_LIMIT {
        wilcoxon_exact(differences)
    } else {
        wilcoxon_normal(differences)
    }
}

/// Mean and quartiles; quantiles use the median-unbiased (type 8) estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub p25: f64,
    pub p75: f64,
}

/// `None` for an empty sample.
pub fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let mut data = Data::new(values.to_vec());
    Some(Summary { mean, median: data.median(), p25: data.quantile(0.25), p75: data.quantile(0.75) })
}
