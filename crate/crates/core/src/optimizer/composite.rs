use alloc::vec;
use alloc::vec::Vec;

use super::group_norm::{group_norm, group_norm_subgradient, max_group};
use super::qp::{Constraint, QuadraticProgram};
use super::{CompositeStepParams, CurvatureMatrix, SubproblemSolver};
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::market::Grouping;
use crate::portfolio::{on_simplex, project_simplex};

/// Outcome of an inner minimization over the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSolution {
    pub w: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// False when the iteration cap was hit; `w` is then the best iterate found.
    pub converged: bool,
}

/// `½ wᵀHw + cᵀw (+ λ·L(w)) (s.t. L(w) ≤ K)` over the probability simplex.
pub(crate) struct SimplexQp<'a> {
    pub hessian: &'a Matrix,
    pub linear: &'a [f64],
    pub penalty: Option<(f64, &'a Grouping)>,
    pub cap: Option<(f64, &'a Grouping)>,
}

impl SimplexQp<'_> {
    /// Exact minimizer by the active-set method, started from a feasible `start`.
    pub fn solve(&self, start: &[f64]) -> Result<(Vec<f64>, bool, usize)> {
        let p = self.linear.len();
        let penalty = self.penalty.filter(|(l, _)| *l > 0.0);
        let nz = p + usize::from(penalty.is_some());

        let mut hessian = Matrix::zeros(nz, nz);
        for i in 0..p {
            for j in 0..p {
                hessian[(i, j)] = self.hessian[(i, j)];
            }
        }
        let mut linear = self.linear.to_vec();
        let mut eq = vec![1.0; p];
        if let Some((lambda, _)) = penalty {
            linear.push(lambda);
            eq.push(0.0);
        }

        let mut inequalities: Vec<Constraint> = (0..p)
            .map(|i| {
                let mut a = vec![0.0; nz];
                a[i] = -1.0;
                Constraint { a, b: 0.0 }
            })
            .collect();
        let mut working: Vec<usize> = (0..p).filter(|&i| start[i] <= 0.0).collect();
        let mut z0 = start.to_vec();

        if let Some((_, g)) = penalty {
            let first = inequalities.len();
            for grp in g.groups() {
                let mut a = vec![0.0; nz];
                for &i in &grp.indices {
                    a[i] = 1.0;
                }
                a[p] = -1.0;
                inequalities.push(Constraint { a, b: 0.0 });
            }
            z0.push(g.group_masses(start).into_iter().fold(0.0, f64::max));
            // the epigraph variable is pinned by at least one group constraint
            working.push(first + max_group(start, g));
        }
        if let Some((k, g)) = self.cap {
            for grp in g.groups() {
                let mut a = vec![0.0; nz];
                for &i in &grp.indices {
                    a[i] = 1.0;
                }
                inequalities.push(Constraint { a, b: k });
            }
        }

        let qp = QuadraticProgram {
            hessian,
            linear,
            equalities: vec![Constraint { a: eq, b: 1.0 }],
            inequalities,
        };
        let max_iter = 50 * (nz + qp.inequalities.len() + 2);
        let sol = qp.solve(z0, working, max_iter)?;
        Ok((clean_simplex(&sol.z[..p]), sol.converged, sol.iterations))
    }
}

/// Clamps rounding-level negatives and renormalizes.
pub(crate) fn clean_simplex(w: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = w.iter().map(|v| v.max(0.0)).collect();
    let s: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= s);
    out
}

/// Value of `⟨grad, w − w_prev⟩ + λ·L(w) + η·D_A(w ‖ w_prev)`.
pub fn composite_objective(
    grad: &[f64],
    a: &CurvatureMatrix,
    w_prev: &[f64],
    params: &CompositeStepParams,
    grouping: &Grouping,
    w: &[f64],
) -> f64 {
    let d: Vec<f64> = w.iter().zip(w_prev).map(|(x, y)| x - y).collect();
    let reg = grouping.group_masses(w).into_iter().fold(0.0, f64::max);
    dot(grad, &d) + params.lambda * reg + 0.5 * params.eta * a.matrix().quad_form(&d)
}

/// Minimizes the regularized Newton objective
/// `⟨grad, w − w_prev⟩ + λ·L(w) + η·D_A(w ‖ w_prev)` over the probability simplex.
pub fn composite_newton_step(
    grad: &[f64],
    a: &CurvatureMatrix,
    w_prev: &[f64],
    params: &CompositeStepParams,
    grouping: &Grouping,
) -> Result<StepSolution> {
    params.validate()?;
    let p = a.dim();
    for len in [grad.len(), w_prev.len(), grouping.dim()] {
        if len != p {
            return Err(Error::dims(p, len));
        }
    }
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("composite step gradient"));
    }
    let start = if on_simplex(w_prev, 1e-9) {
        clean_simplex(w_prev)
    } else {
        project_simplex(w_prev)?
    };
    let objective = |w: &[f64]| composite_objective(grad, a, w_prev, params, grouping, w);

    match params.solver {
        SubproblemSolver::ActiveSet => {
            let hessian = a.matrix().scale(params.eta);
            let pull = hessian.mul_vec(w_prev);
            let linear: Vec<f64> = grad.iter().zip(&pull).map(|(g, h)| g - h).collect();
            let qp = SimplexQp {
                hessian: &hessian,
                linear: &linear,
                penalty: Some((params.lambda, grouping)),
                cap: None,
            };
            match qp.solve(&start) {
                Ok((w, true, iterations)) => Ok(StepSolution {
                    objective: objective(&w),
                    w,
                    iterations,
                    converged: true,
                }),
                // degenerate cycling or a singular working set: fall back to subgradient
                Ok((w, false, _)) => {
                    let mut sol = projected_subgradient(grad, a, w_prev, params, grouping, &w)?;
                    sol.converged = false;
                    Ok(sol)
                }
                Err(Error::Solver(_)) => {
                    let mut sol = projected_subgradient(grad, a, w_prev, params, grouping, &start)?;
                    sol.converged = false;
                    Ok(sol)
                }
                Err(e) => Err(e),
            }
        }
        SubproblemSolver::ProjectedSubgradient => {
            projected_subgradient(grad, a, w_prev, params, grouping, &start)
        }
    }
}

/// Projected subgradient descent with step `c/√k`, `c = 1/(η·λ_min(A) + 1)`, tracking the
/// best iterate. Stops once the best objective improves by less than `inner_tol` over 50
/// consecutive iterations.
fn projected_subgradient(
    grad: &[f64],
    a: &CurvatureMatrix,
    w_prev: &[f64],
    params: &CompositeStepParams,
    grouping: &Grouping,
    start: &[f64],
) -> Result<StepSolution> {
    const PATIENCE: usize = 50;
    let c = 1.0 / (params.eta * a.min_eigenvalue()? + 1.0);
    let objective = |w: &[f64]| composite_objective(grad, a, w_prev, params, grouping, w);

    let mut w = start.to_vec();
    let mut best = w.clone();
    let mut best_f = objective(&w);
    let mut anchor_f = best_f;
    let mut since_anchor = 0;
    for k in 1..=params.inner_max_iter {
        let d: Vec<f64> = w.iter().zip(w_prev).map(|(x, y)| x - y).collect();
        let curv = a.matrix().mul_vec(&d);
        let sub = group_norm_subgradient(&w, grouping)?;
        let step = c / libm::sqrt(k as f64);
        let moved: Vec<f64> = (0..w.len())
            .map(|i| w[i] - step * (grad[i] + params.lambda * sub[i] + params.eta * curv[i]))
            .collect();
        w = project_simplex(&moved)?;
        let f = objective(&w);
        if f < best_f {
            best_f = f;
            best.copy_from_slice(&w);
        }
        since_anchor += 1;
        if since_anchor == PATIENCE {
            if anchor_f - best_f < params.inner_tol {
                return Ok(StepSolution {
                    w: best,
                    objective: best_f,
                    iterations: k,
                    converged: true,
                });
            }
            anchor_f = best_f;
            since_anchor = 0;
        }
    }
    Ok(StepSolution {
        w: best,
        objective: best_f,
        iterations: params.inner_max_iter,
        converged: false,
    })
}

/// Smallest achievable group norm over the simplex together with a point attaining it.
pub fn min_group_norm_on_simplex(grouping: &Grouping) -> Result<(f64, Vec<f64>)> {
    let p = grouping.dim();
    // a tiny proximal term keeps the program strictly convex without moving the optimum
    // by more than ~1e-12
    let hessian = Matrix::scaled_identity(p, 1e-10);
    let linear = vec![0.0; p];
    let qp = SimplexQp {
        hessian: &hessian,
        linear: &linear,
        penalty: Some((1.0, grouping)),
        cap: None,
    };
    let (w, _, _) = qp.solve(&vec![1.0 / p as f64; p])?;
    Ok((group_norm(&w, grouping)?, w))
}
