//! Convex-optimization kernel: the ℓ∞/ℓ1 group norm, curvature accumulation, Bregman
//! divergences and the regularized Newton subproblem solved every round.

mod composite;
mod curvature;
mod group_norm;
mod oracle;
pub(crate) mod qp;

pub(crate) use composite::{clean_simplex, SimplexQp};
pub use composite::{
    composite_newton_step, composite_objective, min_group_norm_on_simplex, StepSolution,
};
pub use curvature::{bregman, update_curvature, CurvatureMatrix};
pub use group_norm::{group_norm, group_norm_subgradient, max_group};
pub use oracle::brute_force_simplex_min;

use alloc::format;

use crate::error::{Error, Result};

/// Method used for the per-round subproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubproblemSolver {
    /// Exact primal active-set solve of the epigraph quadratic program.
    #[default]
    ActiveSet,
    /// Projected subgradient with `c/√k` steps and best-iterate tracking.
    ProjectedSubgradient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeStepParams {
    /// Weight of the Bregman (Newton) term.
    pub eta: f64,
    /// Weight of the group-norm regularizer.
    pub lambda: f64,
    /// Initial curvature `A_0 = εI`.
    pub epsilon: f64,
    pub inner_tol: f64,
    pub inner_max_iter: usize,
    pub solver: SubproblemSolver,
}

impl Default for CompositeStepParams {
    fn default() -> Self {
        let (eta, epsilon) = theory_eta(1.0, 1.0, core::f64::consts::SQRT_2)
            .expect("constant theory parameters are valid");
        CompositeStepParams {
            eta,
            lambda: 0.0,
            epsilon,
            inner_tol: 1e-8,
            inner_max_iter: 20_000,
            solver: SubproblemSolver::ActiveSet,
        }
    }
}

impl CompositeStepParams {
    /// Parameters from [`theory_eta`] with the given regularization weight.
    pub fn from_theory(alpha: f64, grad_bound: f64, diameter: f64, lambda: f64) -> Result<Self> {
        let (eta, epsilon) = theory_eta(alpha, grad_bound, diameter)?;
        Ok(CompositeStepParams {
            eta,
            epsilon,
            lambda,
            ..Self::default()
        })
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        CompositeStepParams { lambda, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.eta) {
            return Err(Error::param(format!("eta must be > 0, got {}", self.eta)));
        }
        if !positive(self.epsilon) {
            return Err(Error::param(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::param(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if !positive(self.inner_tol) {
            return Err(Error::param("inner_tol must be > 0"));
        }
        if self.inner_max_iter == 0 {
            return Err(Error::param("inner_max_iter must be >= 1"));
        }
        Ok(())
    }
}

/// Newton-step constants for an `alpha`-exp-concave loss with gradients bounded by
/// `grad_bound` on a domain of diameter `diameter`:
/// `η = ½·min{α, 1/(4GD)}` and `ε₀ = 1/(η²D²)`.
pub fn theory_eta(alpha: f64, grad_bound: f64, diameter: f64) -> Result<(f64, f64)> {
    for (name, v) in [("alpha", alpha), ("G", grad_bound), ("D", diameter)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(format!("{name} must be > 0, got {v}")));
        }
    }
    let eta = 0.5 * alpha.min(1.0 / (4.0 * grad_bound * diameter));
    let eps0 = 1.0 / (eta * eta * diameter * diameter);
    Ok((eta, eps0))
}

/// A-priori bound on `‖∇g_t(w)‖₂ = ‖Pᵀx‖/⟨x, Pw⟩` over the simplex for column-stochastic
/// `P` with `dim` columns: each entry of `Pᵀx` is at most `max x`, and `⟨x, Pw⟩ ≥ min x`.
pub fn gradient_norm_bound(max_dispersion: f64, dim: usize) -> f64 {
    libm::sqrt(dim as f64) * max_dispersion
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theory_eta_examples() {
        let (eta, eps) = theory_eta(1.0, 1.0, 1.0).unwrap();
        assert_eq!(eta, 0.125);
        assert_eq!(eps, 64.0);

        let d = core::f64::consts::SQRT_2;
        let (eta, eps) = theory_eta(0.1, 10.0, d).unwrap();
        let expected = 0.5 * 0.1_f64.min(1.0 / (40.0 * d));
        assert_eq!(eta, expected);
        assert!((eps - 1.0 / (expected * expected * 2.0)).abs() < 1e-9 * eps);
    }

    #[test]
    fn doubling_gradient_bound_halves_eta() {
        let (a, _) = theory_eta(1.0, 3.0, 1.0).unwrap();
        let (b, _) = theory_eta(1.0, 6.0, 1.0).unwrap();
        assert_eq!(a, 2.0 * b);
    }

    #[test]
    fn rejects_nonpositive_constants() {
        assert!(theory_eta(0.0, 1.0, 1.0).is_err());
        assert!(theory_eta(1.0, -1.0, 1.0).is_err());
        let bad = CompositeStepParams {
            lambda: -0.1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
