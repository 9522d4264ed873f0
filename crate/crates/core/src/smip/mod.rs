//! Two-stage stochastic MIPs and the models built from them.
//!
//! A [`TwoStageProblem`] is always stated in minimization form:
//!
//! ```text
//! min  cᵀx + Σ_s p_s q_sᵀ y_s
//! s.t. A x (senses) b
//!      T_s x + W_s y_s (senses) h_s      for every scenario s
//!      x, y_s within their (finite) bounds and integrality
//! ```
//!
//! Scenarios interact only through `x`. Dual decomposition gives every
//! scenario a local copy `x_s` tied to `x` by non-anticipativity: either
//! `x_s = x` ([`Coupling::Equality`]) or `x_s ≤ x` ([`Coupling::Inequality`]).

mod build;
mod format;
mod production;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::mip::{RowSense, VariableSpec};
use crate::scalar::Real;

pub use build::{
    build_dep, build_master, build_recourse, build_restricted_dep, build_subproblem, split_dep_values,
    trust_region_window,
};
pub use format::{parse_instance, serialize_instance, InstanceFile, FORMAT_VERSION};
pub use production::{build_production_problem, to_profit, ProductionInstance, ProductionLayout, ProductionScenario};

/// Sparse matrix as sorted `(row, col, value)` triples without duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, T)>,
}

impl<T: Real> SparseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: Vec::new() }
    }

    /// Builds from triples, summing duplicates and dropping zeros.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self, ModelError> {
        let mut map = std::collections::BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(ModelError::dims(format!("entry ({r}, {c}) outside {rows}x{cols}")));
            }
            *map.entry((r, c)).or_insert_with(T::zero) += v;
        }
        let entries = map.into_iter().filter(|(_, v)| *v != T::zero()).map(|((r, c), v)| (r, c, v)).collect();
        Ok(Self { rows, cols, entries })
    }

    pub fn from_dense(dense: &[Vec<T>]) -> Self {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        let entries = dense
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().enumerate().filter(|(_, v)| **v != T::zero()).map(move |(c, &v)| (r, c, v)))
            .collect();
        Self { rows, cols, entries }
    }

    /// Nonzeros of row `r` as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let start = self.entries.partition_point(|e| e.0 < r);
        self.entries[start..].iter().take_while(move |e| e.0 == r).map(|&(_, c, v)| (c, v))
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.row(r).find(|&(cc, _)| cc == c).map_or(T::zero(), |(_, v)| v)
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.rows];
        for &(r, c, v) in &self.entries {
            out[r] += v * x[c];
        }
        out
    }

    fn check_sorted(&self) -> Result<(), ModelError> {
        for pair in self.entries.windows(2) {
            if (pair[0].0, pair[0].1) >= (pair[1].0, pair[1].1) {
                return Err(ModelError::dims("matrix entries unsorted or duplicated"));
            }
        }
        if self.entries.iter().any(|&(r, c, _)| r >= self.rows || c >= self.cols) {
            return Err(ModelError::dims("matrix entry out of range"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    /// `x_s = x`; multipliers are free.
    Equality,
    /// `x_s ≤ x`; multipliers are non-negative.
    Inequality,
}

impl Coupling {
    pub fn as_str(self) -> &'static str {
        match self {
            Coupling::Equality => "equality",
            Coupling::Inequality => "inequality",
        }
    }
}

/// Scenario data `(p_s, q_s, T_s, W_s, h_s)` plus the stochastic parameter
/// vector `ξ_s` used for scenario distances.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioData<T> {
    pub probability: T,
    pub q: Vec<T>,
    pub t: SparseMatrix<T>,
    pub w: SparseMatrix<T>,
    pub senses: Vec<RowSense>,
    pub h: Vec<T>,
    pub xi: Vec<T>,
}

impl<T: Real> ScenarioData<T> {
    pub fn num_rows(&self) -> usize {
        self.h.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoStageProblem<T> {
    pub first_stage: Vec<VariableSpec<T>>,
    pub c: Vec<T>,
    pub a: SparseMatrix<T>,
    pub a_senses: Vec<RowSense>,
    pub b: Vec<T>,
    pub second_stage: Vec<VariableSpec<T>>,
    pub scenarios: Vec<ScenarioData<T>>,
    pub coupling: Coupling,
}

impl<T: Real> TwoStageProblem<T> {
    pub fn n_first(&self) -> usize {
        self.first_stage.len()
    }

    pub fn n_second(&self) -> usize {
        self.second_stage.len()
    }

    pub fn n_scenarios(&self) -> usize {
        self.scenarios.len()
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.scenarios.iter().map(|s| s.probability).collect()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.n_first();
        let k = self.n_second();
        if self.c.len() != n {
            return Err(ModelError::dims(format!("c has {} entries for {n} first-stage variables", self.c.len())));
        }
        if self.a.rows != self.b.len() || self.a.rows != self.a_senses.len() || self.a.cols != n {
            return Err(ModelError::dims(format!(
                "A is {}x{}, b has {}, senses {}, n = {n}",
                self.a.rows,
                self.a.cols,
                self.b.len(),
                self.a_senses.len()
            )));
        }
        self.a.check_sorted()?;
        for (j, v) in self.first_stage.iter().chain(&self.second_stage).enumerate() {
            v.check(j).map_err(|e| ModelError::Invalid(e.to_string()))?;
        }
        if self.scenarios.is_empty() {
            return Err(ModelError::Invalid("no scenarios".into()));
        }
        let xi_len = self.scenarios[0].xi.len();
        let mut mass = T::zero();
        for (s, sc) in self.scenarios.iter().enumerate() {
            let m = sc.num_rows();
            if sc.q.len() != k
                || sc.t.rows != m
                || sc.w.rows != m
                || sc.senses.len() != m
                || sc.t.cols != n
                || sc.w.cols != k
            {
                return Err(ModelError::dims(format!("scenario {s} data inconsistent with n = {n}, k = {k}")));
            }
            if sc.xi.len() != xi_len {
                return Err(ModelError::dims(format!("scenario {s} has ξ of length {}", sc.xi.len())));
            }
            sc.t.check_sorted()?;
            sc.w.check_sorted()?;
            if !(sc.probability > T::zero() && sc.probability <= T::one()) {
                return Err(ModelError::Invalid(format!("scenario {s} has probability {}", sc.probability)));
            }
            mass += sc.probability;
        }
        let tol = T::lit(1e-9).max(T::epsilon() * T::from_count(8 * self.scenarios.len()));
        if (mass - T::one()).abs() > tol {
            return Err(ModelError::Invalid(format!("probabilities sum to {mass}")));
        }
        Ok(())
    }

    /// Same problem restricted to `selected` scenarios with new probabilities.
    pub fn with_scenarios(&self, selected: &[usize], probabilities: &[T]) -> Self {
        let scenarios = selected
            .iter()
            .zip(probabilities)
            .map(|(&s, &p)| ScenarioData { probability: p, ..self.scenarios[s].clone() })
            .collect();
        Self { scenarios, ..self.clone() }
    }

    /// Checks first-stage bounds, integrality, and `A x (senses) b`.
    pub fn first_stage_feasible(&self, x: &[T], tol: T) -> bool {
        let in_bounds = self.first_stage.iter().zip(x).all(|(v, &xj)| {
            xj >= v.lower - tol && xj <= v.upper + tol && (!v.kind.is_integral() || (xj - xj.round()).abs() <= tol)
        });
        in_bounds
            && self
                .a
                .mul_vec(x)
                .iter()
                .zip(&self.a_senses)
                .zip(&self.b)
                .all(|((&lhs, sense), &rhs)| sense.violation(lhs, rhs) <= tol)
    }

    /// Evaluates `cᵀx + Σ p_s q_sᵀ y_s`.
    pub fn objective_value(&self, x: &[T], ys: &[Vec<T>]) -> T {
        let first = crate::scalar::dot(&self.c, x);
        first
            + self
                .scenarios
                .iter()
                .zip(ys)
                .map(|(sc, y)| sc.probability * crate::scalar::dot(&sc.q, y))
                .sum::<T>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_rows_and_products() {
        let m = SparseMatrix::from_triplets(2, 3, [(1, 2, 4.0), (0, 0, 1.0), (1, 0, 2.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(m.entries, vec![(0, 0, 1.0), (1, 0, 2.0), (1, 2, 5.0)]);
        assert_eq!(m.row(1).collect::<Vec<_>>(), vec![(0, 2.0), (2, 5.0)]);
        assert_eq!(m.mul_vec(&[1.0, 1.0, 2.0]), vec![1.0, 12.0]);
        assert_eq!(m.get(1, 1), 0.0);
        assert!(SparseMatrix::<f64>::from_triplets(1, 1, [(1, 0, 1.0)]).is_err());
    }
}
