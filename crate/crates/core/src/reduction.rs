//! Scenario reduction by fast forward selection over combined features.
//!
//! Each scenario gets a feature vector made of its z-scored stochastic data
//! `ξ_s` and its z-scored LP-relaxation value `v_s` scaled by `ω`. Distances
//! are Euclidean on the concatenation. Greedy selection then picks `m`
//! representatives, every scenario is mapped to its nearest representative,
//! and probabilities are summed along the mapping.

use std::fmt::Write as _;

use crate::error::ReductionError;
use crate::mip::{relax_integrality, solve_lp, LpStatus};
use crate::scalar::Real;
use crate::smip::{build_subproblem, TwoStageProblem};

/// Standardized scenario features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<T> {
    /// z-scored `ξ_s`.
    pub data: Vec<T>,
    /// `ω` times the z-scored LP proxy.
    pub cost: T,
}

impl<T: Real> FeatureVector<T> {
    pub fn distance(&self, other: &Self) -> T {
        let d2: T = self.data.iter().zip(&other.data).map(|(&a, &b)| (a - b) * (a - b)).sum();
        let dc = self.cost - other.cost;
        (d2 + dc * dc).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionResult<T> {
    /// Representatives in selection order.
    pub selected: Vec<usize>,
    /// `mapping[i]` is the scenario index of `i`'s representative.
    pub mapping: Vec<usize>,
    /// Aggregated probability of `selected[j]`.
    pub probabilities: Vec<T>,
}

impl<T: Real> ReductionResult<T> {
    pub fn identity(probabilities: &[T]) -> Self {
        let n = probabilities.len();
        Self { selected: (0..n).collect(), mapping: (0..n).collect(), probabilities: probabilities.to_vec() }
    }

    /// Position of scenario `i`'s representative within `selected`.
    pub fn representative_position(&self, i: usize) -> Option<usize> {
        let rep = *self.mapping.get(i)?;
        self.selected.iter().position(|&s| s == rep)
    }

    /// Positions for every scenario, i.e. `ρ` expressed over reduced indices.
    pub fn positions(&self) -> Vec<Option<usize>> {
        (0..self.mapping.len()).map(|i| self.representative_position(i)).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("lotus-reduction 1\n");
        let _ = write!(out, "selected {}", self.selected.len());
        for s in &self.selected {
            let _ = write!(out, " {s}");
        }
        out.push_str("\nprobabilities");
        for p in &self.probabilities {
            let _ = write!(out, " {p}");
        }
        let _ = write!(out, "\nmapping {}", self.mapping.len());
        for r in &self.mapping {
            let _ = write!(out, " {r}");
        }
        out.push('\n');
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ReductionError> {
        let bad = |m: &str| ReductionError::InvalidInput(format!("reduction file: {m}"));
        let mut lines = text.lines().map(str::split_whitespace);
        if lines.next().map(Iterator::collect::<Vec<_>>) != Some(vec!["lotus-reduction", "1"]) {
            return Err(bad("missing `lotus-reduction 1` header"));
        }
        let mut counted = |key: &str| -> Result<Vec<String>, ReductionError> {
            let toks: Vec<String> = lines.next().ok_or_else(|| bad("truncated"))?.map(String::from).collect();
            if toks.first().map(String::as_str) != Some(key) {
                return Err(bad(&format!("expected `{key}`")));
            }
            Ok(toks[1..].to_vec())
        };
        let parse_idx = |toks: &[String]| -> Result<Vec<usize>, ReductionError> {
            let n: usize = toks.first().and_then(|t| t.parse().ok()).ok_or_else(|| bad("missing count"))?;
            let v: Vec<usize> = toks[1..].iter().map(|t| t.parse()).collect::<Result<_, _>>().map_err(|_| bad("index"))?;
            if v.len() != n {
                return Err(bad("count mismatch"));
            }
            Ok(v)
        };
        let selected = parse_idx(&counted("selected")?)?;
        let probabilities: Vec<T> = counted("probabilities")?
            .iter()
            .map(|t| t.parse::<T>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("probability"))?;
        let mapping = parse_idx(&counted("mapping")?)?;
        if probabilities.len() != selected.len() {
            return Err(bad("one probability per selected scenario required"));
        }
        Ok(Self { selected, mapping, probabilities })
    }
}

/// Optimal value of scenario `s` solved on its own with integrality relaxed
/// and zero multipliers.
pub fn compute_lp_proxy<T: Real>(problem: &TwoStageProblem<T>, s: usize) -> Result<T, ReductionError> {
    let zeros = vec![T::zero(); problem.n_first()];
    let sub = relax_integrality(&build_subproblem(problem, s, &zeros)?);
    let sol = solve_lp(&sub)?;
    if sol.status != LpStatus::Optimal {
        return Err(ReductionError::ProxyNotOptimal { scenario: s, status: format!("{:?}", sol.status) });
    }
    Ok(sol.objective)
}

pub fn compute_lp_proxies<T: Real>(problem: &TwoStageProblem<T>) -> Result<Vec<T>, ReductionError> {
    (0..problem.n_scenarios()).map(|s| compute_lp_proxy(problem, s)).collect()
}

/// z-scores with population standard deviation; a constant input maps to 0.
pub fn zscore<T: Real>(values: &[T]) -> Vec<T> {
    if values.is_empty() {
        return Vec::new();
    }
    let n = T::from_count(values.len());
    let mean = values.iter().copied().sum::<T>() / n;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
    let sd = var.sqrt();
    if !(sd > T::zero()) {
        return vec![T::zero(); values.len()];
    }
    values.iter().map(|&v| (v - mean) / sd).collect()
}

pub fn build_features<T: Real>(xi: &[Vec<T>], v: &[T], omega: T) -> Result<Vec<FeatureVector<T>>, ReductionError> {
    if xi.is_empty() {
        return Err(ReductionError::EmptyScenarioSet);
    }
    if xi.len() != v.len() {
        return Err(ReductionError::InvalidInput(format!("{} ξ vectors but {} proxies", xi.len(), v.len())));
    }
    if !(omega > T::zero()) || !omega.is_finite() {
        return Err(ReductionError::InvalidInput(format!("ω = {omega} must be positive")));
    }
    let dim = xi[0].len();
    if xi.iter().any(|x| x.len() != dim) {
        return Err(ReductionError::InvalidInput("ξ vectors differ in length".into()));
    }
    if xi.iter().flatten().chain(v).any(|x| !x.is_finite()) {
        return Err(ReductionError::InvalidInput("non-finite feature input".into()));
    }
    let mut data = vec![Vec::with_capacity(dim); xi.len()];
    for j in 0..dim {
        let col: Vec<T> = xi.iter().map(|x| x[j]).collect();
        for (row, z) in data.iter_mut().zip(zscore(&col)) {
            row.push(z);
        }
    }
    let cost = zscore(v);
    Ok(data.into_iter().zip(cost).map(|(data, c)| FeatureVector { data, cost: omega * c }).collect())
}

/// `Σ_{k ∉ sel} p_k · min_{s ∈ sel} ‖F_k − F_s‖`.
pub fn selection_distance<T: Real>(features: &[FeatureVector<T>], probabilities: &[T], selected: &[usize]) -> T {
    (0..features.len())
        .filter(|k| !selected.contains(k))
        .map(|k| {
            let d = selected.iter().map(|&s| features[k].distance(&features[s])).fold(T::infinity(), T::min);
            probabilities[k] * d
        })
        .sum()
}

/// Greedy fast forward selection of `m` scenarios.
///
/// Ties in the greedy step and in the nearest-representative mapping go to
/// the lowest scenario index.
pub fn fast_forward_select<T: Real>(
    features: &[FeatureVector<T>],
    probabilities: &[T],
    m: usize,
) -> Result<ReductionResult<T>, ReductionError> {
    let n = features.len();
    if n == 0 {
        return Err(ReductionError::EmptyScenarioSet);
    }
    if probabilities.len() != n {
        return Err(ReductionError::InvalidInput(format!("{n} features but {} probabilities", probabilities.len())));
    }
    if m == 0 || m > n {
        return Err(ReductionError::InvalidTargetSize { target: m, available: n });
    }
    if m == 1 && n > 1 {
        log::warn!("reducing {n} scenarios to a single representative");
    }
    let dist: Vec<Vec<T>> = features.iter().map(|a| features.iter().map(|b| a.distance(b)).collect()).collect();
    let mut chosen = vec![false; n];
    let mut nearest = vec![T::infinity(); n];
    let mut selected = Vec::with_capacity(m);
    for _ in 0..m {
        let mut best: Option<(usize, T)> = None;
        for u in (0..n).filter(|&u| !chosen[u]) {
            let value: T = (0..n)
                .filter(|&k| !chosen[k] && k != u)
                .map(|k| probabilities[k] * nearest[k].min(dist[k][u]))
                .sum();
            if best.map_or(true, |(_, b)| value < b) {
                best = Some((u, value));
            }
        }
        let (u, _) = best.expect("an unselected candidate exists while |selected| < m ≤ n");
        chosen[u] = true;
        selected.push(u);
        for k in 0..n {
            nearest[k] = nearest[k].min(dist[k][u]);
        }
    }

    let mut by_index = selected.clone();
    by_index.sort_unstable();
    let mapping: Vec<usize> = (0..n)
        .map(|i| {
            if chosen[i] {
                return i;
            }
            let mut rep = by_index[0];
            for &s in &by_index[1..] {
                if dist[i][s] < dist[i][rep] {
                    rep = s;
                }
            }
            rep
        })
        .collect();
    let probs: Vec<T> = selected
        .iter()
        .map(|&s| (0..n).filter(|&i| mapping[i] == s).map(|i| probabilities[i]).sum())
        .collect();
    Ok(ReductionResult { selected, mapping, probabilities: probs })
}

/// `max(1, round(fraction · n))`, capped at `n`.
pub fn target_size(n: usize, fraction: f64) -> usize {
    ((fraction * n as f64).round() as usize).clamp(1, n.max(1))
}

/// Full reduction pipeline: LP proxies, features, selection, and the reduced
/// problem carrying aggregated probabilities.
pub fn reduce<T: Real>(
    problem: &TwoStageProblem<T>,
    fraction: f64,
    omega: T,
) -> Result<(TwoStageProblem<T>, ReductionResult<T>), ReductionError> {
    if problem.scenarios.is_empty() {
        return Err(ReductionError::EmptyScenarioSet);
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(ReductionError::InvalidInput(format!("fraction {fraction} outside (0, 1]")));
    }
    problem.validate()?;
    let v = compute_lp_proxies(problem)?;
    let xi: Vec<Vec<T>> = problem.scenarios.iter().map(|s| s.xi.clone()).collect();
    let features = build_features(&xi, &v, omega)?;
    let m = target_size(problem.n_scenarios(), fraction);
    let result = fast_forward_select(&features, &problem.probabilities(), m)?;
    Ok((problem.with_scenarios(&result.selected, &result.probabilities), result))
}
