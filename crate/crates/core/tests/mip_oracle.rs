mod common;

use common::{grid, rng};
use lotus_core::mip::{
    relax_integrality, solve_lp, solve_mip, Branching, Budget, LinearConstraint, LpStatus, MipModel, MipStatus,
    ObjSense, RowSense, VariableSpec,
};
use proptest::prelude::*;
use rand::Rng;

fn random_model(seed: u64, max_vars: usize, integer: bool) -> MipModel<f64> {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_vars);
    let sense = if r.gen_bool(0.5) { ObjSense::Minimize } else { ObjSense::Maximize };
    let mut m = MipModel::new(sense);
    let mut anchor = Vec::with_capacity(n);
    for _ in 0..n {
        let lo = r.gen_range(0..=1) as f64;
        let hi = lo + r.gen_range(0..=3) as f64;
        let spec = if integer { VariableSpec::integer(lo, hi) } else { VariableSpec::continuous(lo, hi) };
        anchor.push(r.gen_range(lo as i64..=hi as i64) as f64);
        m.add_var(spec, r.gen_range(-5..=5) as f64);
    }
    // Rows hold at the integer anchor point, except occasional random ones.
    for _ in 0..r.gen_range(1..=4) {
        let terms: Vec<(usize, f64)> = (0..n).map(|j| (j, r.gen_range(-3..=3) as f64)).collect();
        if terms.iter().all(|t| t.1 == 0.0) {
            continue;
        }
        let sense = [RowSense::Le, RowSense::Ge, RowSense::Eq][r.gen_range(0..3)];
        let activity: f64 = terms.iter().map(|&(j, a)| a * anchor[j]).sum();
        let slack = r.gen_range(0..=2) as f64;
        let rhs = if r.gen_bool(0.1) {
            r.gen_range(-4..=8) as f64
        } else {
            match sense {
                RowSense::Le => activity + slack,
                RowSense::Ge => activity - slack,
                RowSense::Eq => activity,
            }
        };
        m.add_constraint(LinearConstraint::new(terms, sense, rhs));
    }
    m
}

/// Best objective over all integer points, in the model's own sense.
fn enumerate(m: &MipModel<f64>) -> Option<f64> {
    let better = |a: f64, b: f64| match m.sense {
        ObjSense::Minimize => a < b,
        ObjSense::Maximize => a > b,
    };
    grid(&m.variables)
        .into_iter()
        .filter(|x| m.max_violation(x) <= 1e-9)
        .map(|x| m.objective_value(&x))
        .fold(None, |best, v| match best {
            Some(b) if !better(v, b) => Some(b),
            _ => Some(v),
        })
}

/// Dense Gaussian elimination with partial pivoting; `None` if singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for i in 0..n {
            if i != col {
                let f = a[i][col] / a[col][col];
                for k in col..n {
                    a[i][k] -= f * a[col][k];
                }
                b[i] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// LP optimum by enumerating every basic solution: choose `n` tight
/// constraints among rows and bounds, solve, keep the feasible ones.
fn vertex_optimum(m: &MipModel<f64>) -> Option<f64> {
    let n = m.num_vars();
    let mut tight: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in &m.constraints {
        let mut a = vec![0.0; n];
        for &(j, v) in &row.coefficients {
            a[j] = v;
        }
        tight.push((a, row.rhs));
    }
    for (j, v) in m.variables.iter().enumerate() {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        tight.push((e.clone(), v.lower));
        tight.push((e, v.upper));
    }
    let mut best: Option<f64> = None;
    let mut pick = vec![0usize; n];
    fn walk(
        depth: usize,
        start: usize,
        pick: &mut Vec<usize>,
        tight: &[(Vec<f64>, f64)],
        m: &MipModel<f64>,
        best: &mut Option<f64>,
    ) {
        if depth == pick.len() {
            let a = pick.iter().map(|&i| tight[i].0.clone()).collect();
            let b = pick.iter().map(|&i| tight[i].1).collect();
            if let Some(x) = solve_square(a, b) {
                if m.max_violation(&x) <= 1e-7 {
                    let v = m.objective_value(&x);
                    let improves = match (m.sense, *best) {
                        (_, None) => true,
                        (ObjSense::Minimize, Some(b)) => v < b,
                        (ObjSense::Maximize, Some(b)) => v > b,
                    };
                    if improves {
                        *best = Some(v);
                    }
                }
            }
            return;
        }
        for i in start..tight.len() {
            pick[depth] = i;
            walk(depth + 1, i + 1, pick, tight, m, best);
        }
    }
    walk(0, 0, &mut pick, &tight, m, &mut best);
    best
}

#[test]
fn integer_models_match_enumeration() {
    let mut feasible = 0;
    for seed in 0..150 {
        let m = random_model(seed, 6, true);
        let sol = solve_mip(&m, &Budget::default()).unwrap();
        match enumerate(&m) {
            None => assert_eq!(sol.status, MipStatus::Infeasible, "seed {seed}"),
            Some(v) => {
                feasible += 1;
                assert_eq!(sol.status, MipStatus::Optimal, "seed {seed}");
                assert!((sol.objective - v).abs() <= 1e-6, "seed {seed}: {} vs {v}", sol.objective);
                assert!(m.max_violation(&sol.values) <= 1e-6);
                assert!(m.max_fractionality(&sol.values) <= 1e-6);
            }
        }
    }
    assert!(feasible >= 100, "only {feasible} feasible models");
}

#[test]
fn pseudo_cost_branching_reaches_the_same_optimum() {
    let budget = Budget::default().with_branching(Branching::pseudo_cost());
    for seed in 0..150 {
        let m = random_model(seed, 6, true);
        let sol = solve_mip(&m, &budget).unwrap();
        match enumerate(&m) {
            None => assert_eq!(sol.status, MipStatus::Infeasible, "seed {seed}"),
            Some(v) => assert!((sol.objective - v).abs() <= 1e-6, "seed {seed}"),
        }
    }
}

#[test]
fn lp_matches_vertex_enumeration() {
    let mut feasible = 0;
    for seed in 1000..1150 {
        let m = random_model(seed, 3, false);
        let lp = solve_lp(&m).unwrap();
        match vertex_optimum(&m) {
            None => assert_eq!(lp.status, LpStatus::Infeasible, "seed {seed}"),
            Some(v) => {
                feasible += 1;
                assert_eq!(lp.status, LpStatus::Optimal, "seed {seed}");
                assert!((lp.objective - v).abs() <= 1e-6, "seed {seed}: {} vs {v}", lp.objective);
            }
        }
    }
    assert!(feasible >= 100, "only {feasible} feasible models");
}

#[test]
fn repeated_solves_are_identical() {
    for seed in 0..20 {
        let m = random_model(seed, 6, true);
        let a = solve_mip(&m, &Budget::default()).unwrap();
        let b = solve_mip(&m, &Budget::default()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn single_precision_solver_agrees_on_small_models() {
    for seed in 0..30 {
        let m = random_model(seed, 4, true);
        let m32 = MipModel::<f32> {
            sense: m.sense,
            objective: m.objective.iter().map(|&v| v as f32).collect(),
            variables: m.variables.iter().map(|v| VariableSpec::integer(v.lower as f32, v.upper as f32)).collect(),
            constraints: m
                .constraints
                .iter()
                .map(|c| LinearConstraint {
                    coefficients: c.coefficients.iter().map(|&(j, a)| (j, a as f32)).collect(),
                    sense: c.sense,
                    rhs: c.rhs as f32,
                })
                .collect(),
        };
        let a = solve_mip(&m, &Budget::default()).unwrap();
        let b = solve_mip(&m32, &Budget::default()).unwrap();
        assert_eq!(a.status, b.status, "seed {seed}");
        if a.status == MipStatus::Optimal {
            assert!((a.objective - b.objective as f64).abs() <= 1e-3, "seed {seed}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relaxation_bounds_the_integer_optimum(seed in 0u64..10_000) {
        let m = random_model(seed, 5, true);
        let lp = solve_lp(&relax_integrality(&m)).unwrap();
        let mip = solve_mip(&m, &Budget::default()).unwrap();
        if mip.status == MipStatus::Optimal {
            prop_assert_eq!(lp.status, LpStatus::Optimal);
            match m.sense {
                ObjSense::Minimize => prop_assert!(lp.objective <= mip.objective + 1e-6),
                ObjSense::Maximize => prop_assert!(lp.objective >= mip.objective - 1e-6),
            }
            match m.sense {
                ObjSense::Minimize => prop_assert!(mip.bound <= mip.objective + 1e-9),
                ObjSense::Maximize => prop_assert!(mip.bound >= mip.objective - 1e-9),
            }
        }
    }

    #[test]
    fn node_limited_solutions_stay_feasible(seed in 0u64..10_000, limit in 1usize..6) {
        let m = random_model(seed, 6, true);
        let s = solve_mip(&m, &Budget::default().with_node_limit(limit)).unwrap();
        if s.status.has_solution() {
            prop_assert!(m.max_violation(&s.values) <= 1e-6);
            prop_assert!(m.max_fractionality(&s.values) <= 1e-6);
        }
    }
}
