//! Production planning under demand uncertainty.
//!
//! A manufacturer buys resources `x̄` (capped by `L`, with a fixed cost when
//! a resource is opened at all) and then, once demand `d_s` is known,
//! produces furniture `y_s` in minimum batches, leaving shortfall `υ_s`.
//!
//! Mapped onto [`TwoStageProblem`] (minimizing net cost):
//!
//! ```text
//! first stage   x = (x̄ ∈ [0, L] continuous, ᾱ binary),  cost (c, u)
//!               L_r ᾱ_r − x̄_r ≥ 0
//! second stage  y ∈ ℤ ∩ [0, d_max], υ ∈ ℤ ∩ [0, d_max], β binary,
//!               cost (−q, f, 0)
//!               x̄_r − Σ_f W_rf y_f ≥ 0      resource use
//!               y + υ = d_s                  demand balance
//!               y − b β ≥ 0                  minimum batch
//!               d_s β − y ≥ 0                production indicator
//! ```
//!
//! Coupling is [`Coupling::Inequality`]: a scenario's local copy of
//! `(x̄, ᾱ)` may only use less than was bought. The profit of a solution is
//! the negated net cost.

use crate::error::ModelError;
use crate::mip::{RowSense, VariableSpec};
use crate::scalar::Real;
use crate::smip::{Coupling, ScenarioData, SparseMatrix, TwoStageProblem};

#[derive(Debug, Clone, PartialEq)]
pub struct ProductionScenario<T> {
    pub probability: T,
    pub demand: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductionInstance<T> {
    /// Unit resource cost, length `|R|`.
    pub c: Vec<T>,
    /// Fixed cost of opening a resource, length `|R|`.
    pub u: Vec<T>,
    /// Resource caps `L`, length `|R|`.
    pub cap: Vec<T>,
    /// Sale prices, length `|F|`.
    pub q: Vec<T>,
    /// Shortage penalties, length `|F|`.
    pub f: Vec<T>,
    /// Minimum batch sizes, length `|F|`.
    pub batch: Vec<T>,
    /// Technology matrix, `|R| × |F|`.
    pub w: SparseMatrix<T>,
    pub scenarios: Vec<ProductionScenario<T>>,
}

/// Variable positions of the production model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductionLayout {
    pub resources: usize,
    pub furniture: usize,
}

impl ProductionLayout {
    pub fn x_bar(&self, r: usize) -> usize {
        r
    }

    pub fn alpha_bar(&self, r: usize) -> usize {
        self.resources + r
    }

    pub fn y(&self, f: usize) -> usize {
        f
    }

    pub fn shortfall(&self, f: usize) -> usize {
        self.furniture + f
    }

    pub fn beta(&self, f: usize) -> usize {
        2 * self.furniture + f
    }

    pub fn n_first(&self) -> usize {
        2 * self.resources
    }

    pub fn n_second(&self) -> usize {
        3 * self.furniture
    }
}

impl<T: Real> ProductionInstance<T> {
    pub fn num_resources(&self) -> usize {
        self.c.len()
    }

    pub fn num_furniture(&self) -> usize {
        self.q.len()
    }

    pub fn layout(&self) -> ProductionLayout {
        ProductionLayout { resources: self.num_resources(), furniture: self.num_furniture() }
    }

    /// Largest demand per furniture type over all scenarios.
    pub fn max_demand(&self) -> Vec<T> {
        (0..self.num_furniture())
            .map(|f| self.scenarios.iter().map(|s| s.demand[f]).fold(T::zero(), T::max))
            .collect()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let r = self.num_resources();
        let nf = self.num_furniture();
        for (name, len, want) in [
            ("u", self.u.len(), r),
            ("cap", self.cap.len(), r),
            ("f", self.f.len(), nf),
            ("batch", self.batch.len(), nf),
        ] {
            if len != want {
                return Err(ModelError::dims(format!("{name} has {len} entries, expected {want}")));
            }
        }
        if self.w.rows != r || self.w.cols != nf {
            return Err(ModelError::dims(format!("W is {}x{}, expected {r}x{nf}", self.w.rows, self.w.cols)));
        }
        self.w.check_sorted()?;
        let all = self
            .c
            .iter()
            .chain(&self.u)
            .chain(&self.cap)
            .chain(&self.q)
            .chain(&self.f)
            .chain(&self.batch)
            .chain(self.w.entries.iter().map(|e| &e.2));
        for v in all {
            if !v.is_finite() || *v < T::zero() {
                return Err(ModelError::Invalid(format!("parameter {v} is negative or not finite")));
            }
        }
        if self.scenarios.is_empty() {
            return Err(ModelError::Invalid("no scenarios".into()));
        }
        let mut mass = T::zero();
        for (s, sc) in self.scenarios.iter().enumerate() {
            if sc.demand.len() != nf {
                return Err(ModelError::dims(format!("scenario {s} has {} demands, expected {nf}", sc.demand.len())));
            }
            // y and υ are integral, so y + υ = d needs integral d.
            if sc.demand.iter().any(|d| !d.is_finite() || *d < T::zero() || d.fract() != T::zero()) {
                return Err(ModelError::Invalid(format!("scenario {s} demand must be non-negative integers")));
            }
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
}

/// Profit of a solution whose net cost is `z`.
pub fn to_profit<T: Real>(z: T) -> T {
    -z
}

pub fn build_production_problem<T: Real>(instance: &ProductionInstance<T>) -> Result<TwoStageProblem<T>, ModelError> {
    instance.validate()?;
    let lay = instance.layout();
    let nr = lay.resources;
    let nf = lay.furniture;
    let dmax = instance.max_demand();

    let mut first_stage = Vec::with_capacity(lay.n_first());
    first_stage.extend(instance.cap.iter().map(|&l| VariableSpec::continuous(T::zero(), l)));
    first_stage.extend((0..nr).map(|_| VariableSpec::binary()));
    let c: Vec<T> = instance.c.iter().chain(&instance.u).copied().collect();
    let a = SparseMatrix::from_triplets(
        nr,
        lay.n_first(),
        (0..nr).flat_map(|r| [(r, lay.alpha_bar(r), instance.cap[r]), (r, lay.x_bar(r), -T::one())]),
    )?;

    let mut second_stage = Vec::with_capacity(lay.n_second());
    second_stage.extend(dmax.iter().map(|&d| VariableSpec::integer(T::zero(), d)));
    second_stage.extend(dmax.iter().map(|&d| VariableSpec::integer(T::zero(), d)));
    second_stage.extend((0..nf).map(|_| VariableSpec::binary()));
    let q: Vec<T> = instance
        .q
        .iter()
        .map(|&v| -v)
        .chain(instance.f.iter().copied())
        .chain((0..nf).map(|_| T::zero()))
        .collect();

    // Rows: resources [0, nr), demand [nr, nr+nf), batch [nr+nf, nr+2nf),
    // indicator [nr+2nf, nr+3nf).
    let rows = nr + 3 * nf;
    let t = SparseMatrix::from_triplets(rows, lay.n_first(), (0..nr).map(|r| (r, lay.x_bar(r), T::one())))?;
    let mut senses = vec![RowSense::Ge; rows];
    for s in &mut senses[nr..nr + nf] {
        *s = RowSense::Eq;
    }
    let scenarios = instance
        .scenarios
        .iter()
        .map(|sc| {
            let mut trip: Vec<(usize, usize, T)> = instance.w.entries.iter().map(|&(r, f, v)| (r, lay.y(f), -v)).collect();
            for f in 0..nf {
                trip.push((nr + f, lay.y(f), T::one()));
                trip.push((nr + f, lay.shortfall(f), T::one()));
                trip.push((nr + nf + f, lay.y(f), T::one()));
                trip.push((nr + nf + f, lay.beta(f), -instance.batch[f]));
                trip.push((nr + 2 * nf + f, lay.y(f), -T::one()));
                trip.push((nr + 2 * nf + f, lay.beta(f), sc.demand[f]));
            }
            let w = SparseMatrix::from_triplets(rows, lay.n_second(), trip)?;
            let mut h = vec![T::zero(); rows];
            h[nr..nr + nf].copy_from_slice(&sc.demand);
            Ok(ScenarioData {
                probability: sc.probability,
                q: q.clone(),
                t: t.clone(),
                w,
                senses: senses.clone(),
                h,
                xi: sc.demand.clone(),
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;

    Ok(TwoStageProblem {
        first_stage,
        c,
        a,
        a_senses: vec![RowSense::Ge; nr],
        b: vec![T::zero(); nr],
        second_stage,
        scenarios,
        coupling: Coupling::Inequality,
    })
}
