//! Best-bound-first branch-and-bound over the LP relaxation.
//!
//! Branching picks the most fractional integer variable (lowest index on
//! ties) unless the budget asks for pseudo-cost branching. Among open nodes
//! with equal bounds the most recently created one is expanded first. No presolve, cuts, or heuristics: every incumbent comes
//! from an integral LP solution.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::error::MipError;
use crate::mip::lp::solve_lp_bounded;
use crate::mip::{Branching, Budget, LpSolution, LpStatus, MipModel, MipSolution, MipStatus, ObjSense, Tolerances};
use crate::scalar::Real;

struct Node<T> {
    /// LP bound in minimization orientation.
    bound: T,
    id: usize,
    lower: Vec<T>,
    upper: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> PartialEq for Node<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Real> Eq for Node<T> {}

impl<T: Real> PartialOrd for Node<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Node<T> {
    // BinaryHeap is a max-heap: the smallest bound must compare greatest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap_or(Ordering::Equal)
            .then(self.id.cmp(&other.id))
    }
}

/// Solves `model` to the relative gap in `budget`, or until a limit is hit.
pub fn solve_mip<T: Real>(model: &MipModel<T>, budget: &Budget<T>) -> Result<MipSolution<T>, MipError> {
    model.validate()?;
    let start = Instant::now();
    let tol = budget.tolerances;
    let n = model.num_vars();
    let sign = match model.sense {
        ObjSense::Minimize => T::one(),
        ObjSense::Maximize => -T::one(),
    };
    let integral: Vec<usize> = (0..n).filter(|&j| model.variables[j].kind.is_integral()).collect();

    let mut lower: Vec<T> = model.variables.iter().map(|v| v.lower).collect();
    let mut upper: Vec<T> = model.variables.iter().map(|v| v.upper).collect();
    for &j in &integral {
        lower[j] = (lower[j] - tol.integrality).ceil();
        upper[j] = (upper[j] + tol.integrality).floor();
    }

    let report = |status, values: Vec<T>, objective_min: T, bound_min: T, nodes| MipSolution {
        status,
        values,
        objective: sign * objective_min,
        bound: sign * bound_min,
        nodes_explored: nodes,
    };

    let root = solve_lp_bounded(model, &lower, &upper, &tol)?;
    match root.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Ok(report(MipStatus::Infeasible, vec![T::zero(); n], T::infinity(), T::infinity(), 1))
        }
        LpStatus::Unbounded => return Err(MipError::malformed("LP relaxation is unbounded")),
    }

    let cutoff = budget.cutoff.map(|c| sign * c);
    let mut heap = BinaryHeap::new();
    let mut next_id = 0usize;
    heap.push(Node { bound: sign * root.objective, id: next_id, lower, upper, values: root.values });
    next_id += 1;

    let mut incumbent: Option<(T, Vec<T>)> = None;
    // Smallest bound among nodes discarded only because of the gap tolerance.
    let mut pruned_floor = T::infinity();
    let mut nodes = 0usize;
    let mut hit_limit = false;
    let mut pseudo = PseudoCosts::new(n);

    let gap_abs = |inc: T| budget.rel_gap * inc.abs().max(T::lit(1e-10));

    loop {
        let Some(top) = heap.peek() else { break };
        if let Some((inc, _)) = &incumbent {
            if top.bound >= *inc - gap_abs(*inc) {
                break;
            }
        }
        let out_of_time = budget.time_limit.is_some_and(|l| start.elapsed() >= l);
        let out_of_nodes = budget.node_limit.is_some_and(|l| nodes >= l);
        if out_of_time || out_of_nodes {
            hit_limit = true;
            break;
        }

        let node = heap.pop().expect("peeked node");
        nodes += 1;
        let threshold = match (&incumbent, cutoff) {
            (Some((inc, _)), Some(c)) => inc.min(c),
            (Some((inc, _)), None) => *inc,
            (None, Some(c)) => c,
            (None, None) => T::infinity(),
        };
        if node.bound >= threshold {
            continue;
        }

        let fractional: Vec<(usize, T)> = integral
            .iter()
            .map(|&j| {
                let v = node.values[j];
                (j, (v - v.round()).abs())
            })
            .filter(|&(_, frac)| frac > tol.integrality)
            .collect();

        if fractional.is_empty() {
            let mut values = node.values;
            let unrounded = values.clone();
            for &k in &integral {
                values[k] = values[k].round();
            }
            if model.max_violation(&values) > tol.feasibility {
                values = unrounded;
            }
            let obj = sign * model.objective_value(&values);
            if obj < threshold {
                incumbent = Some((obj, values));
            }
            continue;
        }

        let (j, mut solved) = match budget.branching {
            Branching::MostFractional => (most_fractional(&fractional), [None, None]),
            Branching::PseudoCost { reliability } => {
                pseudo.select(model, &node, &fractional, reliability, sign, &tol)?
            }
        };

        let v = node.values[j];
        let mut children = Vec::with_capacity(2);
        let mut down_upper = node.upper.clone();
        down_upper[j] = v.floor();
        children.push((node.lower.clone(), down_upper, solved[0].take()));
        let mut up_lower = node.lower;
        up_lower[j] = v.ceil();
        children.push((up_lower, node.upper, solved[1].take()));

        let mut child_bounds = [None, None];
        for (side, (lo, hi, cached)) in children.into_iter().enumerate() {
            let lp = match cached {
                Some(lp) => lp,
                None => child_lp(model, &lo, &hi, &tol)?,
            };
            if lp.status == LpStatus::Infeasible {
                continue;
            }
            let bound = sign * lp.objective;
            child_bounds[side] = Some(bound);
            let threshold = match (&incumbent, cutoff) {
                (Some((inc, _)), _) => *inc,
                (None, Some(c)) => c,
                (None, None) => T::infinity(),
            };
            if bound >= threshold {
                continue;
            }
            if let Some((inc, _)) = &incumbent {
                if bound >= *inc - gap_abs(*inc) {
                    pruned_floor = pruned_floor.min(bound);
                    continue;
                }
            }
            heap.push(Node { bound, id: next_id, lower: lo, upper: hi, values: lp.values });
            next_id += 1;
        }
        pseudo.record(j, v, node.bound, child_bounds);
    }

    let open_floor = heap.peek().map_or(T::infinity(), |n| n.bound);
    match incumbent {
        Some((obj, values)) => {
            let bound = open_floor.min(pruned_floor).min(obj);
            let gap = (obj - bound).abs() / obj.abs().max(T::lit(1e-10));
            let status = if !hit_limit || gap <= budget.rel_gap { MipStatus::Optimal } else { MipStatus::Feasible };
            Ok(report(status, values, obj, bound, nodes))
        }
        None => {
            let status = if hit_limit { MipStatus::BudgetExhausted } else { MipStatus::Infeasible };
            let bound = if hit_limit { open_floor } else { cutoff.unwrap_or(T::infinity()) };
            Ok(report(status, vec![T::zero(); n], T::infinity(), bound, nodes))
        }
    }
}

fn child_lp<T: Real>(model: &MipModel<T>, lower: &[T], upper: &[T], tol: &Tolerances<T>) -> Result<LpSolution<T>, MipError> {
    let lp = solve_lp_bounded(model, lower, upper, tol)?;
    if lp.status == LpStatus::Unbounded {
        return Err(MipError::malformed("LP relaxation is unbounded"));
    }
    Ok(lp)
}

fn most_fractional<T: Real>(fractional: &[(usize, T)]) -> usize {
    fractional
        .iter()
        .fold(None::<(usize, T)>, |best, &(j, frac)| match best {
            Some((_, f)) if f >= frac => best,
            _ => Some((j, frac)),
        })
        .expect("at least one fractional variable")
        .0
}

/// Cap on strong-branching LP pairs per node.
const STRONG_CANDIDATES: usize = 8;

/// Per-unit bound degradation observed when branching down (`[0]`) or up
/// (`[1]`) on each variable. Infeasible children are not recorded.
struct PseudoCosts<T> {
    sum: Vec<[T; 2]>,
    count: Vec<[usize; 2]>,
}

impl<T: Real> PseudoCosts<T> {
    fn new(n: usize) -> Self {
        Self { sum: vec![[T::zero(); 2]; n], count: vec![[0; 2]; n] }
    }

    fn observe(&mut self, j: usize, side: usize, gain: T, distance: T) {
        self.sum[j][side] += (gain / distance).max(T::zero());
        self.count[j][side] += 1;
    }

    fn record(&mut self, j: usize, v: T, parent: T, children: [Option<T>; 2]) {
        let f = v - v.floor();
        for (side, bound) in children.into_iter().enumerate() {
            if let Some(b) = bound {
                let distance = if side == 0 { f } else { T::one() - f };
                self.observe(j, side, b - parent, distance);
            }
        }
    }

    /// Mean over variables with observations; one when there are none.
    fn average(&self, side: usize) -> T {
        let (sum, cnt) = self
            .sum
            .iter()
            .zip(&self.count)
            .filter(|(_, c)| c[side] > 0)
            .fold((T::zero(), 0usize), |(s, k), (p, c)| (s + p[side] / T::from_count(c[side]), k + 1));
        if cnt == 0 {
            T::one()
        } else {
            sum / T::from_count(cnt)
        }
    }

    fn estimate(&self, j: usize, side: usize, average: T) -> T {
        match self.count[j][side] {
            0 => average,
            c => self.sum[j][side] / T::from_count(c),
        }
    }

    /// Picks the branching variable. Unreliable candidates (most fractional
    /// first, at most [`STRONG_CANDIDATES`]) are scored by solving both
    /// children; their LPs are returned for reuse when chosen.
    #[allow(clippy::type_complexity)]
    fn select(
        &mut self,
        model: &MipModel<T>,
        node: &Node<T>,
        fractional: &[(usize, T)],
        reliability: usize,
        sign: T,
        tol: &Tolerances<T>,
    ) -> Result<(usize, [Option<LpSolution<T>>; 2]), MipError> {
        let eps = T::lit(1e-6);
        let score = |down: T, up: T| down.max(eps) * up.max(eps);

        let mut unreliable: Vec<(usize, T)> = fractional
            .iter()
            .copied()
            .filter(|&(j, _)| self.count[j][0].min(self.count[j][1]) < reliability)
            .collect();
        // Stable sort keeps index order among equal fractionality.
        unreliable.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        unreliable.truncate(STRONG_CANDIDATES);

        let mut best: Option<(usize, T)> = None;
        let mut best_lps: [Option<LpSolution<T>>; 2] = [None, None];
        for &(j, _) in &unreliable {
            let v = node.values[j];
            let mut hi = node.upper.clone();
            hi[j] = v.floor();
            let down = child_lp(model, &node.lower, &hi, tol)?;
            let mut lo = node.lower.clone();
            lo[j] = v.ceil();
            let up = child_lp(model, &lo, &node.upper, tol)?;
            let gain = |lp: &LpSolution<T>| match lp.status {
                LpStatus::Optimal => Some(sign * lp.objective - node.bound),
                _ => None,
            };
            let (gd, gu) = (gain(&down), gain(&up));
            let f = v - v.floor();
            if let Some(g) = gd {
                self.observe(j, 0, g, f);
            }
            if let Some(g) = gu {
                self.observe(j, 1, g, T::one() - f);
            }
            // An infeasible side settles that branch at once.
            let big = T::lit(1e15);
            let s = score(gd.unwrap_or(big), gu.unwrap_or(big));
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((j, s));
                best_lps = [Some(down), Some(up)];
            }
        }

        let (avg_down, avg_up) = (self.average(0), self.average(1));
        for &(j, _) in fractional {
            if unreliable.iter().any(|&(u, _)| u == j) {
                continue;
            }
            let f = node.values[j] - node.values[j].floor();
            let s = score(self.estimate(j, 0, avg_down) * f, self.estimate(j, 1, avg_up) * (T::one() - f));
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((j, s));
                best_lps = [None, None];
            }
        }
        let (j, _) = best.expect("at least one fractional variable");
        Ok((j, best_lps))
    }
}
