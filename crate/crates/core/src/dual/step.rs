use crate::error::DualError;
use crate::scalar::Real;
use crate::smip::Coupling;

use super::{DualState, Multipliers};

/// `g_s = x_s − x` for every scenario.
pub fn subgradient<T: Real>(x_master: &[T], x_locals: &[Vec<T>]) -> Vec<Vec<T>> {
    x_locals.iter().map(|xs| xs.iter().zip(x_master).map(|(&a, &b)| a - b).collect()).collect()
}

pub(crate) fn norm_sq<T: Real>(g: &[Vec<T>]) -> T {
    g.iter().map(|gs| crate::scalar::norm_sq(gs)).sum()
}

/// `γ · |Z_P − Z_D| / ‖g‖²`.
pub fn polyak_alpha<T: Real>(gamma: T, z_primal: T, z_dual: T, g_norm_sq: T) -> T {
    gamma * (z_primal - z_dual).abs() / g_norm_sq
}

/// Polyak step for the current state.
pub fn polyak_step<T: Real>(state: &DualState<T>, g: &[Vec<T>], z_dual: T) -> Result<T, DualError> {
    let n2 = norm_sq(g);
    if !(n2 > T::zero()) {
        return Err(DualError::ZeroSubgradient);
    }
    let zp = state.best_primal.ok_or(DualError::MissingPrimalBound)?;
    Ok(polyak_alpha(state.gamma, zp, z_dual, n2))
}

/// `λ + αg`, projected onto `λ ≥ 0` under inequality coupling.
pub fn update_multipliers<T: Real>(lambda: &Multipliers<T>, alpha: T, g: &[Vec<T>]) -> Multipliers<T> {
    let values = lambda
        .values
        .iter()
        .zip(g)
        .map(|(ls, gs)| {
            ls.iter()
                .zip(gs)
                .map(|(&l, &gi)| {
                    let v = l + alpha * gi;
                    match lambda.coupling {
                        Coupling::Equality => v,
                        Coupling::Inequality => v.max(T::zero()),
                    }
                })
                .collect()
        })
        .collect();
    Multipliers { values, coupling: lambda.coupling }
}

/// Tracks the best dual value and halves `γ` after `threshold` consecutive
/// non-improving observations.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaController<T> {
    pub gamma: T,
    pub best: T,
    pub stall: usize,
    pub threshold: usize,
    pub min_improvement: T,
}

impl<T: Real> GammaController<T> {
    pub fn new(gamma0: T, threshold: usize, min_improvement: T) -> Self {
        Self { gamma: gamma0, best: T::neg_infinity(), stall: 0, threshold, min_improvement }
    }

    /// Records a dual value; returns whether it improved the best by at least
    /// `min_improvement`.
    pub fn observe(&mut self, z_dual: T) -> bool {
        let improved = !self.best.is_finite() || z_dual - self.best >= self.min_improvement;
        self.best = self.best.max(z_dual);
        if improved {
            self.stall = 0;
        } else {
            self.stall += 1;
            if self.stall >= self.threshold {
                self.gamma = self.gamma * T::lit(0.5);
                self.stall = 0;
            }
        }
        improved
    }
}
