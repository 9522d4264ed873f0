//! Bounded-variable primal simplex on a dense tableau.
//!
//! Every row is normalized to `a·x + s = b` with a slack `s ≥ 0`; equality
//! rows enter as two such inequalities. Structural columns start nonbasic at
//! their lower bound. Rows whose residual is negative get an artificial column
//! and phase one minimizes the artificial sum. Dantzig pricing is used until
//! `2·(rows + cols)` degenerate pivots have been taken, after which the solve
//! switches to Bland's rule for the remainder.

use crate::error::MipError;
use crate::mip::{LpSolution, LpStatus, MipModel, ObjSense, RowSense, Tolerances};
use crate::scalar::Real;

/// Solves the LP relaxation of `model`; integrality markers are ignored.
pub fn solve_lp<T: Real>(model: &MipModel<T>) -> Result<LpSolution<T>, MipError> {
    model.validate()?;
    let lower: Vec<T> = model.variables.iter().map(|v| v.lower).collect();
    let upper: Vec<T> = model.variables.iter().map(|v| v.upper).collect();
    solve_lp_bounded(model, &lower, &upper, &Tolerances::default())
}

/// Solves the LP of `model` with the variable bounds replaced by
/// `lower`/`upper`. The model itself is assumed valid.
pub(crate) fn solve_lp_bounded<T: Real>(
    model: &MipModel<T>,
    lower: &[T],
    upper: &[T],
    tol: &Tolerances<T>,
) -> Result<LpSolution<T>, MipError> {
    let n = model.num_vars();
    if lower.iter().zip(upper).any(|(&l, &u)| l > u + tol.feasibility) {
        return Ok(infeasible(n));
    }
    let mut simplex = Simplex::build(model, lower, upper, *tol);
    let phase_one_done = simplex.run_phase_one()?;
    if !phase_one_done {
        return Ok(infeasible(n));
    }
    simplex.start_phase_two(model);
    match simplex.iterate()? {
        Outcome::Optimal => {}
        Outcome::Unbounded => {
            return Ok(LpSolution { status: LpStatus::Unbounded, values: vec![T::zero(); n], objective: T::neg_infinity() })
        }
    }

    let mut values = simplex.structural_values(n);
    if exceeds(model, lower, upper, &values, tol.feasibility) {
        // Drift from long pivot sequences; rebuild the tableau from the basis.
        simplex.refactor()?;
        if let Outcome::Unbounded = simplex.iterate()? {
            return Ok(LpSolution { status: LpStatus::Unbounded, values: vec![T::zero(); n], objective: T::neg_infinity() });
        }
        values = simplex.structural_values(n);
        if exceeds(model, lower, upper, &values, tol.feasibility) {
            return Err(MipError::NumericalBreakdown(
                "basic solution violates rows after refactorization".into(),
            ));
        }
    }
    for (v, (&l, &u)) in values.iter_mut().zip(lower.iter().zip(upper)) {
        *v = v.max(l).min(u);
    }
    let objective = model.objective_value(&values);
    Ok(LpSolution { status: LpStatus::Optimal, values, objective })
}

fn infeasible<T: Real>(n: usize) -> LpSolution<T> {
    LpSolution { status: LpStatus::Infeasible, values: vec![T::zero(); n], objective: T::nan() }
}

fn exceeds<T: Real>(model: &MipModel<T>, lower: &[T], upper: &[T], x: &[T], tol: T) -> bool {
    let bound_viol = x
        .iter()
        .zip(lower.iter().zip(upper))
        .any(|(&v, (&l, &u))| v < l - tol || v > u + tol);
    bound_viol || model.constraints.iter().any(|row| row.violation(x) > tol)
}

enum Outcome {
    Optimal,
    Unbounded,
}

struct Simplex<T> {
    rows: usize,
    cols: usize,
    /// Current tableau `B⁻¹·A`, row-major.
    tab: Vec<T>,
    /// Original `[A | I | ±I_art]` and right-hand side, kept for refactoring.
    orig: Vec<T>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    at_upper: Vec<bool>,
    xb: Vec<T>,
    lo: Vec<T>,
    hi: Vec<T>,
    cost: Vec<T>,
    reduced: Vec<T>,
    first_artificial: usize,
    tol: Tolerances<T>,
    degenerate_pivots: usize,
    pivots_since_refactor: usize,
    bland: bool,
}

const REFACTOR_PERIOD: usize = 400;

impl<T: Real> Simplex<T> {
    fn build(model: &MipModel<T>, lower: &[T], upper: &[T], tol: Tolerances<T>) -> Self {
        let n = model.num_vars();
        // Every row in `a·x ≤ b` form.
        let mut rows: Vec<(Vec<(usize, T)>, T)> = Vec::with_capacity(model.constraints.len());
        for c in &model.constraints {
            let negated = || c.coefficients.iter().map(|&(j, a)| (j, -a)).collect::<Vec<_>>();
            match c.sense {
                RowSense::Le => rows.push((c.coefficients.clone(), c.rhs)),
                RowSense::Ge => rows.push((negated(), -c.rhs)),
                RowSense::Eq => {
                    rows.push((c.coefficients.clone(), c.rhs));
                    rows.push((negated(), -c.rhs));
                }
            }
        }
        let m = rows.len();
        let residual: Vec<T> = rows
            .iter()
            .map(|(coef, b)| *b - coef.iter().map(|&(j, a)| a * lower[j]).sum::<T>())
            .collect();
        let needs_art: Vec<usize> = (0..m).filter(|&i| residual[i] < T::zero()).collect();
        let cols = n + m + needs_art.len();

        let mut orig = vec![T::zero(); m * cols];
        let mut rhs = vec![T::zero(); m];
        for (i, (coef, b)) in rows.iter().enumerate() {
            for &(j, a) in coef {
                orig[i * cols + j] = a;
            }
            orig[i * cols + n + i] = T::one();
            rhs[i] = *b;
        }

        let mut lo = Vec::with_capacity(cols);
        let mut hi = Vec::with_capacity(cols);
        lo.extend_from_slice(lower);
        hi.extend_from_slice(upper);
        lo.extend(std::iter::repeat(T::zero()).take(m + needs_art.len()));
        hi.extend(std::iter::repeat(T::infinity()).take(m + needs_art.len()));

        let mut tab = orig.clone();
        let mut basis = vec![0; m];
        let mut xb = vec![T::zero(); m];
        for i in 0..m {
            basis[i] = n + i;
            xb[i] = residual[i];
        }
        for (k, &i) in needs_art.iter().enumerate() {
            let a = n + m + k;
            orig[i * cols + a] = -T::one();
            // Negate the row so the artificial column is +e_i in the tableau.
            for j in 0..cols {
                tab[i * cols + j] = -orig[i * cols + j];
            }
            basis[i] = a;
            xb[i] = -residual[i];
        }

        let mut is_basic = vec![false; cols];
        for &b in &basis {
            is_basic[b] = true;
        }
        let sign = match model.sense {
            ObjSense::Minimize => T::one(),
            ObjSense::Maximize => -T::one(),
        };
        let mut cost = vec![T::zero(); cols];
        for (c, &o) in cost.iter_mut().zip(&model.objective) {
            *c = sign * o;
        }

        Self {
            rows: m,
            cols,
            tab,
            orig,
            rhs,
            basis,
            is_basic,
            at_upper: vec![false; cols],
            xb,
            lo,
            hi,
            cost,
            reduced: vec![T::zero(); cols],
            first_artificial: n + m,
            tol,
            degenerate_pivots: 0,
            pivots_since_refactor: 0,
            bland: false,
        }
    }

    /// Returns `false` when the phase-one optimum leaves an artificial positive.
    fn run_phase_one(&mut self) -> Result<bool, MipError> {
        if self.first_artificial == self.cols {
            return Ok(true);
        }
        let phase_two_cost = std::mem::take(&mut self.cost);
        self.cost = vec![T::zero(); self.cols];
        for c in &mut self.cost[self.first_artificial..] {
            *c = T::one();
        }
        self.price_from_scratch();
        let outcome = self.iterate()?;
        self.cost = phase_two_cost;
        if let Outcome::Unbounded = outcome {
            return Err(MipError::NumericalBreakdown("phase one reported unbounded".into()));
        }
        let worst = (0..self.rows)
            .filter(|&i| self.basis[i] >= self.first_artificial)
            .map(|i| self.xb[i])
            .fold(T::zero(), T::max);
        if worst > self.tol.feasibility {
            return Ok(false);
        }
        for j in self.first_artificial..self.cols {
            self.hi[j] = T::zero();
            self.at_upper[j] = false;
        }
        self.drive_out_artificials();
        Ok(true)
    }

    fn drive_out_artificials(&mut self) {
        for r in 0..self.rows {
            if self.basis[r] < self.first_artificial {
                continue;
            }
            let row = &self.tab[r * self.cols..(r + 1) * self.cols];
            let candidate = (0..self.first_artificial)
                .filter(|&j| !self.is_basic[j] && self.lo[j] < self.hi[j])
                .max_by(|&a, &b| row[a].abs().partial_cmp(&row[b].abs()).unwrap_or(std::cmp::Ordering::Equal));
            if let Some(q) = candidate {
                if self.tab[r * self.cols + q].abs() > self.tol.pivot {
                    // Zero-length step: the entering column keeps its bound value.
                    let value = self.nonbasic_value(q);
                    self.pivot(r, q);
                    self.xb[r] = value;
                }
            }
        }
    }

    fn start_phase_two(&mut self, _model: &MipModel<T>) {
        self.price_from_scratch();
    }

    fn nonbasic_value(&self, j: usize) -> T {
        if self.at_upper[j] {
            self.hi[j]
        } else {
            self.lo[j]
        }
    }

    fn price_from_scratch(&mut self) {
        self.reduced.copy_from_slice(&self.cost);
        for i in 0..self.rows {
            let cb = self.cost[self.basis[i]];
            if cb == T::zero() {
                continue;
            }
            let row = &self.tab[i * self.cols..(i + 1) * self.cols];
            for (d, &t) in self.reduced.iter_mut().zip(row) {
                *d -= cb * t;
            }
        }
        for i in 0..self.rows {
            self.reduced[self.basis[i]] = T::zero();
        }
    }

    fn choose_entering(&self) -> Option<(usize, T)> {
        let eps = self.tol.pivot;
        let eligible = |j: usize| -> Option<T> {
            if self.is_basic[j] || self.lo[j] >= self.hi[j] {
                return None;
            }
            let d = self.reduced[j];
            if !self.at_upper[j] && d < -eps {
                Some(T::one())
            } else if self.at_upper[j] && d > eps {
                Some(-T::one())
            } else {
                None
            }
        };
        if self.bland {
            return (0..self.cols).find_map(|j| eligible(j).map(|dir| (j, dir)));
        }
        let mut best: Option<(usize, T, T)> = None;
        for j in 0..self.cols {
            if let Some(dir) = eligible(j) {
                let score = self.reduced[j].abs();
                if best.map_or(true, |(_, _, s)| score > s) {
                    best = Some((j, dir, score));
                }
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn iterate(&mut self) -> Result<Outcome, MipError> {
        let limit = 50 * (self.rows + self.cols) + 1000;
        let degenerate_switch = 2 * (self.rows + self.cols);
        let tiny = T::lit(1e-12);
        for _ in 0..limit {
            let Some((q, dir)) = self.choose_entering() else {
                return Ok(Outcome::Optimal);
            };

            // Ratio test: each basic moves at rate `-dir·t_iq` per unit step.
            let flip = self.hi[q] - self.lo[q];
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.rows {
                let t = self.tab[i * self.cols + q];
                if t.abs() <= self.tol.pivot {
                    continue;
                }
                let rate = -dir * t;
                let b = self.basis[i];
                let limit = if rate < T::zero() {
                    (self.xb[i] - self.lo[b]) / -rate
                } else if self.hi[b].is_finite() {
                    (self.hi[b] - self.xb[i]) / rate
                } else {
                    continue;
                };
                let limit = limit.max(T::zero());
                best = match best {
                    None => Some((i, limit)),
                    Some((r, l)) => {
                        if limit < l - tiny {
                            Some((i, limit))
                        } else if limit <= l + tiny {
                            let prefer = if self.bland {
                                b < self.basis[r]
                            } else {
                                t.abs() > self.tab[r * self.cols + q].abs()
                            };
                            if prefer {
                                Some((i, limit.min(l)))
                            } else {
                                Some((r, l.min(limit)))
                            }
                        } else {
                            Some((r, l))
                        }
                    }
                };
            }

            let take_flip = match best {
                None => true,
                Some((_, l)) => flip <= l,
            };
            if take_flip {
                if !flip.is_finite() {
                    return Ok(Outcome::Unbounded);
                }
                for i in 0..self.rows {
                    let t = self.tab[i * self.cols + q];
                    if t != T::zero() {
                        self.xb[i] -= dir * t * flip;
                    }
                }
                self.at_upper[q] = !self.at_upper[q];
                continue;
            }

            let (r, step) = best.expect("ratio test produced a row");
            if step <= tiny {
                self.degenerate_pivots += 1;
                if self.degenerate_pivots > degenerate_switch {
                    self.bland = true;
                }
            }
            let entering_value = self.nonbasic_value(q) + dir * step;
            for i in 0..self.rows {
                let t = self.tab[i * self.cols + q];
                if t != T::zero() && i != r {
                    self.xb[i] -= dir * t * step;
                }
            }
            let leaving = self.basis[r];
            let leaving_rate = -dir * self.tab[r * self.cols + q];
            self.at_upper[leaving] = leaving_rate > T::zero();
            self.pivot(r, q);
            self.xb[r] = entering_value;

            self.pivots_since_refactor += 1;
            if self.pivots_since_refactor >= REFACTOR_PERIOD {
                self.refactor()?;
            }
        }
        Err(MipError::NumericalBreakdown(format!(
            "simplex iteration limit reached ({} rows, {} columns)",
            self.rows, self.cols
        )))
    }

    /// Gauss-Jordan pivot on `(r, q)`; updates basis bookkeeping and prices.
    fn pivot(&mut self, r: usize, q: usize) {
        let cols = self.cols;
        let drop = T::epsilon() * T::lit(16.0);
        let p = self.tab[r * cols + q];
        let inv = T::one() / p;
        let mut nz: Vec<usize> = Vec::new();
        {
            let row = &mut self.tab[r * cols..(r + 1) * cols];
            for (j, v) in row.iter_mut().enumerate() {
                if *v != T::zero() {
                    *v *= inv;
                    if v.abs() < drop {
                        *v = T::zero();
                    } else {
                        nz.push(j);
                    }
                }
            }
            row[q] = T::one();
        }
        let (head, rest) = self.tab.split_at_mut(r * cols);
        let (pivot_row, tail) = rest.split_at_mut(cols);
        let update = |row: &mut [T]| {
            let f = row[q];
            if f == T::zero() {
                return;
            }
            for &j in &nz {
                let v = row[j] - f * pivot_row[j];
                row[j] = if v.abs() < drop { T::zero() } else { v };
            }
            row[q] = T::zero();
        };
        head.chunks_mut(cols).for_each(update);
        tail.chunks_mut(cols).for_each(update);

        let f = self.reduced[q];
        if f != T::zero() {
            for &j in &nz {
                self.reduced[j] -= f * pivot_row[j];
            }
        }
        self.reduced[q] = T::zero();

        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
    }

    /// Rebuilds `B⁻¹·A`, basic values, and prices from the original matrix.
    fn refactor(&mut self) -> Result<(), MipError> {
        let (m, cols) = (self.rows, self.cols);
        let mut tab = self.orig.clone();
        let mut rhs = self.rhs.clone();
        let mut assigned = vec![false; m];
        let mut new_basis = vec![usize::MAX; m];
        for &j in &self.basis.clone() {
            let mut best: Option<(usize, T)> = None;
            for r in 0..m {
                if assigned[r] {
                    continue;
                }
                let v = tab[r * cols + j].abs();
                if best.map_or(true, |(_, b)| v > b) {
                    best = Some((r, v));
                }
            }
            let (r, mag) = best.ok_or_else(|| MipError::NumericalBreakdown("refactor ran out of rows".into()))?;
            if mag <= self.tol.pivot {
                return Err(MipError::NumericalBreakdown("basis matrix is singular".into()));
            }
            let inv = T::one() / tab[r * cols + j];
            for v in &mut tab[r * cols..(r + 1) * cols] {
                *v *= inv;
            }
            rhs[r] *= inv;
            for i in 0..m {
                if i == r {
                    continue;
                }
                let f = tab[i * cols + j];
                if f == T::zero() {
                    continue;
                }
                for k in 0..cols {
                    let v = tab[r * cols + k];
                    if v != T::zero() {
                        tab[i * cols + k] -= f * v;
                    }
                }
                tab[i * cols + j] = T::zero();
                let rr = rhs[r];
                rhs[i] -= f * rr;
            }
            assigned[r] = true;
            new_basis[r] = j;
        }
        self.tab = tab;
        self.basis = new_basis;
        for i in 0..m {
            let mut v = rhs[i];
            let row = &self.tab[i * cols..(i + 1) * cols];
            for j in 0..cols {
                if !self.is_basic[j] && row[j] != T::zero() {
                    v -= row[j] * self.nonbasic_value(j);
                }
            }
            let b = self.basis[i];
            // Clamp sub-tolerance drift back into the box.
            if v < self.lo[b] && v > self.lo[b] - self.tol.feasibility {
                v = self.lo[b];
            }
            if v > self.hi[b] && v < self.hi[b] + self.tol.feasibility {
                v = self.hi[b];
            }
            self.xb[i] = v;
        }
        self.price_from_scratch();
        self.pivots_since_refactor = 0;
        Ok(())
    }

    fn structural_values(&self, n: usize) -> Vec<T> {
        let mut x: Vec<T> = (0..n).map(|j| self.nonbasic_value(j)).collect();
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.xb[i];
            }
        }
        x
    }
}
