//! Desk-scale mixed-integer linear programming.
//!
//! A bounded-variable primal simplex ([`solve_lp`]) sits underneath a
//! best-bound branch-and-bound ([`solve_mip`]). Every variable carries finite
//! bounds, so an LP can only end optimal or infeasible; an unbounded outcome
//! is still reported, since it points at malformed input.

mod bnb;
mod dump;
mod lp;

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::MipError;
use crate::scalar::Real;

pub use bnb::solve_mip;
pub use dump::{dump_model, write_model_dump};
pub use lp::solve_lp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Continuous,
    Integer,
    Binary,
}

impl VarKind {
    pub fn is_integral(self) -> bool {
        !matches!(self, VarKind::Continuous)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VarKind::Continuous => "continuous",
            VarKind::Integer => "integer",
            VarKind::Binary => "binary",
        }
    }
}

impl std::str::FromStr for VarKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "continuous" | "C" => Ok(VarKind::Continuous),
            "integer" | "I" => Ok(VarKind::Integer),
            "binary" | "B" => Ok(VarKind::Binary),
            other => Err(format!("unknown variable kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariableSpec<T> {
    pub lower: T,
    pub upper: T,
    pub kind: VarKind,
}

impl<T: Real> VariableSpec<T> {
    pub fn continuous(lower: T, upper: T) -> Self {
        Self { lower, upper, kind: VarKind::Continuous }
    }

    pub fn integer(lower: T, upper: T) -> Self {
        Self { lower, upper, kind: VarKind::Integer }
    }

    pub fn binary() -> Self {
        Self { lower: T::zero(), upper: T::one(), kind: VarKind::Binary }
    }

    pub(crate) fn check(&self, index: usize) -> Result<(), MipError> {
        if !self.lower.is_finite() || !self.upper.is_finite() {
            return Err(MipError::malformed(format!("variable {index} has a non-finite bound")));
        }
        if self.lower > self.upper {
            return Err(MipError::malformed(format!(
                "variable {index} has lower {} > upper {}",
                self.lower, self.upper
            )));
        }
        if self.kind == VarKind::Binary && (self.lower < T::zero() || self.upper > T::one()) {
            return Err(MipError::malformed(format!("binary variable {index} bounds outside [0, 1]")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RowSense {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

impl RowSense {
    pub fn as_str(self) -> &'static str {
        match self {
            RowSense::Ge => ">=",
            RowSense::Le => "<=",
            RowSense::Eq => "=",
        }
    }

    /// Signed violation of `lhs (sense) rhs`; non-positive when satisfied.
    pub fn violation<T: Real>(self, lhs: T, rhs: T) -> T {
        match self {
            RowSense::Ge => rhs - lhs,
            RowSense::Le => lhs - rhs,
            RowSense::Eq => (lhs - rhs).abs(),
        }
    }
}

impl std::str::FromStr for RowSense {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            ">=" | "G" => Ok(RowSense::Ge),
            "<=" | "L" => Ok(RowSense::Le),
            "=" | "==" | "E" => Ok(RowSense::Eq),
            other => Err(format!("unknown row sense `{other}`")),
        }
    }
}

/// A sparse row `Σ a_j x_j (sense) rhs`. Coefficients are kept sorted by
/// variable index, which also rules out duplicate indices.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint<T> {
    pub coefficients: Vec<(usize, T)>,
    pub sense: RowSense,
    pub rhs: T,
}

impl<T: Real> LinearConstraint<T> {
    /// Builds a row, merging repeated indices and dropping exact zeros.
    pub fn new(terms: impl IntoIterator<Item = (usize, T)>, sense: RowSense, rhs: T) -> Self {
        let mut merged: BTreeMap<usize, T> = BTreeMap::new();
        for (j, a) in terms {
            *merged.entry(j).or_insert_with(T::zero) += a;
        }
        let coefficients = merged.into_iter().filter(|(_, a)| *a != T::zero()).collect();
        Self { coefficients, sense, rhs }
    }

    pub fn activity(&self, x: &[T]) -> T {
        self.coefficients.iter().map(|&(j, a)| a * x[j]).sum()
    }

    pub fn violation(&self, x: &[T]) -> T {
        self.sense.violation(self.activity(x), self.rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjSense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MipModel<T> {
    pub sense: ObjSense,
    pub objective: Vec<T>,
    pub variables: Vec<VariableSpec<T>>,
    pub constraints: Vec<LinearConstraint<T>>,
}

impl<T: Real> MipModel<T> {
    pub fn new(sense: ObjSense) -> Self {
        Self { sense, objective: Vec::new(), variables: Vec::new(), constraints: Vec::new() }
    }

    /// Appends a variable and returns its index.
    pub fn add_var(&mut self, spec: VariableSpec<T>, cost: T) -> usize {
        self.variables.push(spec);
        self.objective.push(cost);
        self.variables.len() - 1
    }

    pub fn add_constraint(&mut self, row: LinearConstraint<T>) {
        self.constraints.push(row);
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_integer_vars(&self) -> usize {
        self.variables.iter().filter(|v| v.kind.is_integral()).count()
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        crate::scalar::dot(&self.objective, x)
    }

    /// Checks dimensions, bounds, and row indices.
    pub fn validate(&self) -> Result<(), MipError> {
        if self.objective.len() != self.variables.len() {
            return Err(MipError::malformed(format!(
                "objective has {} entries for {} variables",
                self.objective.len(),
                self.variables.len()
            )));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(MipError::malformed("non-finite objective coefficient"));
        }
        for (j, v) in self.variables.iter().enumerate() {
            v.check(j)?;
        }
        let n = self.variables.len();
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coefficients.is_empty() {
                return Err(MipError::malformed(format!("constraint {i} has no nonzero coefficient")));
            }
            if !row.rhs.is_finite() {
                return Err(MipError::malformed(format!("constraint {i} has a non-finite rhs")));
            }
            let mut prev = None;
            for &(j, a) in &row.coefficients {
                if j >= n {
                    return Err(MipError::malformed(format!(
                        "constraint {i} references variable {j} of {n}"
                    )));
                }
                if prev.is_some_and(|p| p >= j) {
                    return Err(MipError::malformed(format!(
                        "constraint {i} has unsorted or duplicate index {j}"
                    )));
                }
                if !a.is_finite() {
                    return Err(MipError::malformed(format!("constraint {i} has a non-finite coefficient")));
                }
                prev = Some(j);
            }
        }
        Ok(())
    }

    /// Largest bound or row violation at `x` (zero when feasible).
    pub fn max_violation(&self, x: &[T]) -> T {
        let mut worst = T::zero();
        for (v, &xj) in self.variables.iter().zip(x) {
            worst = worst.max(v.lower - xj).max(xj - v.upper);
        }
        for row in &self.constraints {
            worst = worst.max(row.violation(x));
        }
        worst
    }

    /// Largest distance to the nearest integer over integer variables.
    pub fn max_fractionality(&self, x: &[T]) -> T {
        self.variables
            .iter()
            .zip(x)
            .filter(|(v, _)| v.kind.is_integral())
            .map(|(_, &xj)| (xj - xj.round()).abs())
            .fold(T::zero(), T::max)
    }
}

/// Returns the same model with every variable continuous.
pub fn relax_integrality<T: Real>(model: &MipModel<T>) -> MipModel<T> {
    let mut relaxed = model.clone();
    for v in &mut relaxed.variables {
        v.kind = VarKind::Continuous;
    }
    relaxed
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub values: Vec<T>,
    pub objective: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MipStatus {
    Optimal,
    Feasible,
    Infeasible,
    BudgetExhausted,
}

impl MipStatus {
    pub fn has_solution(self) -> bool {
        matches!(self, MipStatus::Optimal | MipStatus::Feasible)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MipSolution<T> {
    pub status: MipStatus,
    pub values: Vec<T>,
    pub objective: T,
    /// Best proven bound: a lower bound when minimizing, upper when maximizing.
    pub bound: T,
    pub nodes_explored: usize,
}

impl<T: Real> MipSolution<T> {
    pub fn gap(&self) -> T {
        crate::scalar::relative_gap(self.objective, self.bound)
    }
}

/// Numerical tolerances used by the LP and branch-and-bound layers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub feasibility: T,
    pub integrality: T,
    pub pivot: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            feasibility: T::lit(T::FEASIBILITY_TOL),
            integrality: T::lit(T::INTEGRALITY_TOL),
            pivot: T::lit(T::PIVOT_TOL),
        }
    }
}

/// How branch-and-bound picks the variable to branch on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branching {
    /// Largest distance to the nearest integer; lowest index on ties.
    #[default]
    MostFractional,
    /// Product of estimated per-direction bound degradations. Estimates come
    /// from observed child bounds; variables with fewer than `reliability`
    /// observations per direction are strong-branched first.
    PseudoCost { reliability: usize },
}

impl Branching {
    pub const fn pseudo_cost() -> Self {
        Branching::PseudoCost { reliability: 1 }
    }
}

/// Limits on a single branch-and-bound solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget<T> {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<usize>,
    pub rel_gap: T,
    /// Only solutions strictly better than this objective are of interest.
    /// With a cutoff, `Infeasible` means "nothing better than the cutoff".
    pub cutoff: Option<T>,
    pub tolerances: Tolerances<T>,
    pub branching: Branching,
}

impl<T: Real> Default for Budget<T> {
    fn default() -> Self {
        Self {
            time_limit: None,
            node_limit: None,
            rel_gap: T::lit(T::MIP_GAP),
            cutoff: None,
            tolerances: Tolerances::default(),
            branching: Branching::MostFractional,
        }
    }
}

impl<T: Real> Budget<T> {
    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn with_node_limit(mut self, limit: usize) -> Self {
        self.node_limit = Some(limit);
        self
    }

    pub fn with_cutoff(mut self, cutoff: T) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn with_branching(mut self, branching: Branching) -> Self {
        self.branching = branching;
        self
    }
}
