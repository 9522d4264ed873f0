//! Two-stage stochastic mixed-integer programming with warm-started dual
//! decomposition.
//!
//! - [`mip`]: bounded-variable simplex and branch-and-bound.
//! - [`smip`]: two-stage problems, the models built from them, the
//!   production-planning case and the instance file format.
//! - [`reduction`]: scenario reduction by fast forward selection.
//! - [`dual`]: subgradient dual decomposition, cold ([`dual::run_dd`]) or
//!   warm-started from a reduced scenario set ([`dual::run_lotus`]).
//! - [`gen`]: seeded production-planning instances.
//!
//! Everything numeric is generic over [`Real`] (`f64` or `f32`); the aliases
//! below fix `f64`, and the `F32` variants fix `f32`.

pub mod dual;
pub mod error;
pub mod gen;
pub mod mip;
pub mod reduction;
pub mod scalar;
pub mod smip;

pub use error::{DualError, FormatError, GenError, MipError, ModelError, ReductionError};
pub use scalar::Real;

pub type MipModel = mip::MipModel<f64>;
pub type MipSolution = mip::MipSolution<f64>;
pub type LpSolution = mip::LpSolution<f64>;
pub type Budget = mip::Budget<f64>;
pub type TwoStageProblem = smip::TwoStageProblem<f64>;
pub type ProductionInstance = smip::ProductionInstance<f64>;
pub type InstanceFile = smip::InstanceFile<f64>;
pub type ReductionResult = reduction::ReductionResult<f64>;
pub type Multipliers = dual::Multipliers<f64>;
pub type DualState = dual::DualState<f64>;
pub type RunConfig = dual::RunConfig<f64>;
pub type RunResult = dual::RunResult<f64>;

pub type MipModelF32 = mip::MipModel<f32>;
pub type MipSolutionF32 = mip::MipSolution<f32>;
pub type TwoStageProblemF32 = smip::TwoStageProblem<f32>;
pub type ProductionInstanceF32 = smip::ProductionInstance<f32>;
pub type RunConfigF32 = dual::RunConfig<f32>;
