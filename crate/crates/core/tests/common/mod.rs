//! Toy problems and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use lotus_core::mip::{RowSense, VariableSpec};
use lotus_core::smip::{Coupling, ScenarioData, SparseMatrix, TwoStageProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-6;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two integer first-stage variables in `[0, 2]` with `x0 + x1 ≤ 3`, three
/// integer recourse variables, the last one a costly slack that keeps every
/// scenario feasible for any `x`.
pub fn toy_problem(seed: u64, scenarios: usize, coupling: Coupling) -> TwoStageProblem<f64> {
    let mut r = rng(seed);
    let n = 2;
    let first_stage = vec![VariableSpec::integer(0.0, 2.0); n];
    let c: Vec<f64> = (0..n).map(|_| r.gen_range(-2.0..3.0)).collect();
    let second_stage = vec![
        VariableSpec::integer(0.0, 3.0),
        VariableSpec::integer(0.0, 3.0),
        VariableSpec::integer(0.0, 12.0),
    ];
    let mut raw_p: Vec<f64> = (0..scenarios).map(|_| r.gen_range(0.5..1.5)).collect();
    let total: f64 = raw_p.iter().sum();
    raw_p.iter_mut().for_each(|p| *p /= total);
    let scenarios = raw_p
        .into_iter()
        .map(|p| {
            let h0 = r.gen_range(1.0..5.0_f64).round();
            let h1 = r.gen_range(0.0..4.0_f64).round();
            let t = SparseMatrix::from_dense(&[
                vec![r.gen_range(0.0..2.0_f64).round(), 1.0],
                vec![1.0, r.gen_range(0.0..2.0_f64).round()],
            ]);
            let w = SparseMatrix::from_dense(&[
                vec![r.gen_range(1.0..3.0_f64).round(), 1.0, 1.0],
                vec![1.0, r.gen_range(1.0..3.0_f64).round(), 1.0],
            ]);
            ScenarioData {
                probability: p,
                q: vec![r.gen_range(-1.0..4.0), r.gen_range(-1.0..4.0), 10.0],
                t,
                w,
                senses: vec![RowSense::Ge, RowSense::Ge],
                h: vec![h0, h1],
                xi: vec![h0, h1],
            }
        })
        .collect();
    TwoStageProblem {
        first_stage,
        c,
        a: SparseMatrix::from_dense(&[vec![1.0, 1.0]]),
        a_senses: vec![RowSense::Le],
        b: vec![3.0],
        second_stage,
        scenarios,
        coupling,
    }
}

/// Every integer point of a box given by integer bounds.
pub fn grid(specs: &[VariableSpec<f64>]) -> Vec<Vec<f64>> {
    let mut points = vec![Vec::new()];
    for v in specs {
        let (lo, hi) = (v.lower.ceil() as i64, v.upper.floor() as i64);
        points = points
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |k| {
                    let mut q = p.clone();
                    q.push(k as f64);
                    q
                })
            })
            .collect();
    }
    points
}

fn rows_hold(m: &SparseMatrix<f64>, senses: &[RowSense], rhs: &[f64], v: &[f64], shift: &[f64]) -> bool {
    let lhs = m.mul_vec(v);
    lhs.iter().zip(shift).zip(senses.iter().zip(rhs)).all(|((&l, &s), (sense, &b))| sense.violation(l + s, b) <= 1e-9)
}

pub fn first_stage_points(p: &TwoStageProblem<f64>) -> Vec<Vec<f64>> {
    let zero = vec![0.0; p.a.rows];
    grid(&p.first_stage).into_iter().filter(|x| rows_hold(&p.a, &p.a_senses, &p.b, x, &zero)).collect()
}

/// `min_y p_s q_sᵀ y` over integer `y` feasible for `x`; `None` if empty.
pub fn recourse_value(p: &TwoStageProblem<f64>, s: usize, x: &[f64]) -> Option<f64> {
    let sc = &p.scenarios[s];
    let tx = sc.t.mul_vec(x);
    grid(&p.second_stage)
        .into_iter()
        .filter(|y| rows_hold(&sc.w, &sc.senses, &sc.h, y, &tx))
        .map(|y| sc.probability * sc.q.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>())
        .min_by(f64::total_cmp)
}

/// `Z_I` by enumerating first stage, then each scenario's recourse.
pub fn two_level_optimum(p: &TwoStageProblem<f64>) -> f64 {
    first_stage_points(p)
        .iter()
        .filter_map(|x| {
            let first: f64 = p.c.iter().zip(x).map(|(a, b)| a * b).sum();
            (0..p.n_scenarios()).map(|s| recourse_value(p, s, x)).sum::<Option<f64>>().map(|r| first + r)
        })
        .min_by(f64::total_cmp)
        .expect("toy problems have a feasible point")
}

/// `Z_D(λ)` by enumeration of the master and of each scenario's `(x_s, y_s)`.
pub fn dual_value(p: &TwoStageProblem<f64>, lambda: &[Vec<f64>]) -> f64 {
    let xs = first_stage_points(p);
    let master = xs
        .iter()
        .map(|x| {
            (0..x.len())
                .map(|j| (p.c[j] - lambda.iter().map(|l| l[j]).sum::<f64>()) * x[j])
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);
    let subs: f64 = (0..p.n_scenarios())
        .map(|s| {
            xs.iter()
                .filter_map(|x| {
                    let lx: f64 = lambda[s].iter().zip(x).map(|(a, b)| a * b).sum();
                    recourse_value(p, s, x).map(|r| lx + r)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    master + subs
}

/// The same problem with every scenario split into two halves of equal
/// probability.
pub fn duplicated(p: &TwoStageProblem<f64>) -> TwoStageProblem<f64> {
    let scenarios = p
        .scenarios
        .iter()
        .flat_map(|s| {
            let half = ScenarioData { probability: s.probability / 2.0, ..s.clone() };
            [half.clone(), half]
        })
        .collect();
    TwoStageProblem { scenarios, ..p.clone() }
}
