//! Seeded production-planning instances.
//!
//! Every component draws from its own ChaCha8 stream, all seeded with
//! `seed`; the stream number is fixed per component (see [`Stream`]), so
//! changing one recipe leaves the others' draws untouched.
//!
//! Recipe, all knobs in [`GenConfig`]:
//! - `W_rf ~ U[0.5, 2.5]`, nonzero with probability `w_density`; every
//!   furniture type uses at least one resource.
//! - `c_r ~ U[1, 3]`; `q_f` is the unit resource cost of `f` times
//!   `U[1.5, 2.5]`; `f_f = penalty_factor · q_f`.
//! - Demand: each furniture type has a base mean `demand_mean · U[0.5, 1.5]`.
//!   A scenario is in the high regime with probability `high_regime_prob`,
//!   which multiplies every mean by `high_regime_factor`. Demands are
//!   `round(max(0, N(mean, (dispersion · mean)²)))`.
//! - `L_r = ceil(scarcity · Σ_f W_rf E[d_f])`.
//! - `u_r = fixed_cost_factor · (expected variable profit) / |R| · U[0.8, 1.2]`.
//! - `b_f` uniform integer in `[batch_min, batch_max]`; `p_s = 1/|S|`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::GenError;
use crate::scalar::Real;
use crate::smip::{ProductionInstance, ProductionScenario, SparseMatrix, FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub scenarios: usize,
    pub furniture: usize,
    pub resources: usize,
    pub seed: u64,
    pub demand_mean: f64,
    /// Coefficient of variation within a regime.
    pub demand_dispersion: f64,
    pub high_regime_prob: f64,
    pub high_regime_factor: f64,
    /// Capacity as a share of expected resource consumption, in `(0, 1]`.
    pub scarcity: f64,
    pub fixed_cost_factor: f64,
    pub penalty_factor: f64,
    pub w_density: f64,
    pub batch_min: u32,
    pub batch_max: u32,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            scenarios: 10,
            furniture: 3,
            resources: 3,
            seed: 0,
            demand_mean: 8.0,
            demand_dispersion: 0.35,
            high_regime_prob: 0.3,
            high_regime_factor: 2.0,
            scarcity: 0.7,
            fixed_cost_factor: 0.25,
            penalty_factor: 0.25,
            w_density: 1.0,
            batch_min: 2,
            batch_max: 4,
        }
    }
}

/// Stream numbers per instance component.
#[derive(Debug, Clone, Copy)]
#[repr(u64)]
pub enum Stream {
    Technology = 1,
    Prices = 2,
    DemandMeans = 3,
    Demands = 4,
    Batches = 5,
    FixedCosts = 6,
}

fn rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream as u64);
    r
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::InvalidConfig(m.to_string()));
        if self.scenarios == 0 || self.furniture == 0 || self.resources == 0 {
            return bad("scenario, furniture and resource counts must be at least 1");
        }
        if !(self.scarcity > 0.0 && self.scarcity <= 1.0) {
            return bad("scarcity must lie in (0, 1]");
        }
        if !(self.w_density > 0.0 && self.w_density <= 1.0) {
            return bad("w_density must lie in (0, 1]");
        }
        if !(0.0..=1.0).contains(&self.high_regime_prob) {
            return bad("high_regime_prob must lie in [0, 1]");
        }
        let nonneg = [
            self.demand_mean,
            self.demand_dispersion,
            self.high_regime_factor,
            self.fixed_cost_factor,
            self.penalty_factor,
        ];
        if nonneg.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return bad("demand, fixed-cost and penalty knobs must be finite and non-negative");
        }
        if self.batch_min > self.batch_max {
            return bad("batch_min exceeds batch_max");
        }
        Ok(())
    }
}

pub fn generate<T: Real>(config: &GenConfig) -> Result<ProductionInstance<T>, GenError> {
    config.validate()?;
    let (nr, nf, ns) = (config.resources, config.furniture, config.scenarios);

    let mut r = rng(config.seed, Stream::Technology);
    let mut w = vec![vec![0.0; nf]; nr];
    for f in 0..nf {
        for row in w.iter_mut() {
            if r.gen::<f64>() < config.w_density {
                row[f] = r.gen_range(0.5..2.5);
            }
        }
        if (0..nr).all(|i| w[i][f] == 0.0) {
            let i = r.gen_range(0..nr);
            w[i][f] = r.gen_range(0.5..2.5);
        }
    }

    let mut r = rng(config.seed, Stream::Prices);
    let c: Vec<f64> = (0..nr).map(|_| r.gen_range(1.0..3.0)).collect();
    let unit_cost: Vec<f64> = (0..nf).map(|f| (0..nr).map(|i| c[i] * w[i][f]).sum()).collect();
    let q: Vec<f64> = unit_cost.iter().map(|&uc| uc * r.gen_range(1.5..2.5)).collect();
    let pen: Vec<f64> = q.iter().map(|&v| config.penalty_factor * v).collect();

    let mut r = rng(config.seed, Stream::DemandMeans);
    let base: Vec<f64> = (0..nf).map(|_| config.demand_mean * r.gen_range(0.5..1.5)).collect();
    let regime = 1.0 + config.high_regime_prob * (config.high_regime_factor - 1.0);
    let expected: Vec<f64> = base.iter().map(|m| m * regime).collect();

    let mut r = rng(config.seed, Stream::Demands);
    let p = 1.0 / ns as f64;
    let scenarios = (0..ns)
        .map(|_| {
            let high = r.gen::<f64>() < config.high_regime_prob;
            let demand = base
                .iter()
                .map(|&m| {
                    let mean = if high { m * config.high_regime_factor } else { m };
                    let sd = config.demand_dispersion * mean;
                    let draw = if sd > 0.0 { Normal::new(mean, sd).expect("sd > 0").sample(&mut r) } else { mean };
                    T::lit(draw.max(0.0).round())
                })
                .collect();
            ProductionScenario { probability: T::lit(p), demand }
        })
        .collect();

    let cap: Vec<f64> =
        (0..nr).map(|i| (config.scarcity * (0..nf).map(|f| w[i][f] * expected[f]).sum::<f64>()).ceil()).collect();

    let mut r = rng(config.seed, Stream::FixedCosts);
    let profit: f64 = (0..nf).map(|f| (q[f] - unit_cost[f]) * expected[f]).sum();
    let u: Vec<f64> = (0..nr).map(|_| config.fixed_cost_factor * profit / nr as f64 * r.gen_range(0.8..1.2)).collect();

    let mut r = rng(config.seed, Stream::Batches);
    let batch: Vec<f64> = (0..nf).map(|_| f64::from(r.gen_range(config.batch_min..=config.batch_max))).collect();

    let lit = |v: &[f64]| v.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
    let w_t: Vec<Vec<T>> = w.iter().map(|row| lit(row)).collect();
    Ok(ProductionInstance {
        c: lit(&c),
        u: lit(&u),
        cap: lit(&cap),
        q: lit(&q),
        f: lit(&pen),
        batch: lit(&batch),
        w: SparseMatrix::from_dense(&w_t),
        scenarios,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Structural checks of an instance; never fails, reports per check.
pub fn validate<T: Real>(instance: &ProductionInstance<T>) -> ValidationReport {
    let mut checks = Vec::new();
    let mut add = |name: &str, passed: bool, detail: String| {
        checks.push(Check { name: name.to_string(), passed, detail });
    };
    let (nr, nf) = (instance.num_resources(), instance.num_furniture());

    let dims_ok = instance.u.len() == nr
        && instance.cap.len() == nr
        && instance.f.len() == nf
        && instance.batch.len() == nf
        && instance.w.rows == nr
        && instance.w.cols == nf
        && instance.w.entries.iter().all(|&(r, c, _)| r < nr && c < nf)
        && instance.scenarios.iter().all(|s| s.demand.len() == nf);
    add("dimensions", dims_ok, format!("|R| = {nr}, |F| = {nf}, |S| = {}", instance.scenarios.len()));

    let params = instance
        .c
        .iter()
        .chain(&instance.u)
        .chain(&instance.q)
        .chain(&instance.f)
        .chain(&instance.batch)
        .chain(instance.w.entries.iter().map(|e| &e.2));
    let nonneg = params.clone().all(|v| v.is_finite() && *v >= T::zero());
    add("nonnegativity", nonneg, "costs, prices, penalties, batches and W are finite and >= 0".into());

    let caps_finite = instance.cap.iter().all(|v| v.is_finite() && *v >= T::zero());
    let demand_finite = instance.scenarios.iter().flat_map(|s| &s.demand).all(|d| d.is_finite() && *d >= T::zero());
    add("compactness", caps_finite && demand_finite, "resource caps and demands are finite".into());

    let integral = instance.scenarios.iter().flat_map(|s| &s.demand).all(|d| d.fract() == T::zero());
    add("demand_integrality", integral, "demands are integers".into());

    // y = 0, υ = d, β = 0 is feasible for any x̄ ≥ 0 once υ's upper bound
    // covers every demand and W ≥ 0.
    let mass: T = instance.scenarios.iter().map(|s| s.probability).sum();
    let probs_ok = instance.scenarios.iter().all(|s| s.probability > T::zero() && s.probability <= T::one());
    add(
        "complete_recourse",
        dims_ok && demand_finite && integral && instance.w.entries.iter().all(|e| e.2 >= T::zero()),
        "shortfall absorbs every demand at zero production".into(),
    );
    add(
        "probability_mass",
        probs_ok && !instance.scenarios.is_empty() && (mass - T::one()).abs() <= T::lit(1e-9),
        format!("sum p = {mass}"),
    );
    ValidationReport { checks }
}

/// Generation manifest: format version plus the full config.
pub fn manifest_toml(config: &GenConfig) -> String {
    #[derive(Serialize)]
    struct Manifest<'a> {
        format_version: u32,
        generator: &'a str,
        config: &'a GenConfig,
    }
    toml::to_string(&Manifest { format_version: FORMAT_VERSION, generator: "lotus-gen 1", config })
        .expect("manifest serializes")
}
