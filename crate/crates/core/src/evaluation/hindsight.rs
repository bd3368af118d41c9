use alloc::vec;
use alloc::vec::Vec;

use crate::erep::{EnsembleGrouping, PortfolioMatrix};
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::market::MarketSeries;
use crate::optimizer::{clean_simplex, group_norm, SimplexQp};

/// Best fixed allocation for a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct HindsightSolution {
    pub w_star: Vec<f64>,
    /// `Σ_t (g_t(w*) + λ·L(w*))`.
    pub objective: f64,
    /// Objective decrease achieved by the last iteration.
    pub certificate: f64,
    /// Every round's loss is constant on the simplex and λ = 0, so any point is optimal.
    pub flat: bool,
    pub converged: bool,
    pub iterations: usize,
}

/// Per-round vectors `u_t = P_tᵀ x_t`, so that `g_t(w) = −log⟨u_t, w⟩`.
pub fn round_payoffs(matrices: &[PortfolioMatrix], market: &MarketSeries) -> Result<Vec<Vec<f64>>> {
    if matrices.len() != market.n_days() {
        return Err(Error::dims(market.n_days(), matrices.len()));
    }
    matrices
        .iter()
        .enumerate()
        .map(|(t, p)| {
            if p.n_stocks() != market.n_stocks() {
                return Err(Error::dims(market.n_stocks(), p.n_stocks()));
            }
            Ok(p.matrix().tr_mul_vec(market.day(t)))
        })
        .collect()
}

/// `Σ_t (−log⟨u_t, w⟩ + λ·L(w))`: the regularizer is charged every round, as it is online.
pub fn hindsight_objective(
    payoffs: &[Vec<f64>],
    lambda: f64,
    eg: &EnsembleGrouping,
    w: &[f64],
) -> f64 {
    let mut f = 0.0;
    for u in payoffs {
        let s = dot(u, w);
        if s <= 0.0 {
            return f64::INFINITY;
        }
        f -= libm::log(s);
    }
    f + payoffs.len() as f64 * lambda * eg.group_masses(w).into_iter().fold(0.0, f64::max)
}

/// Minimizes `Σ_t (g_t(w) + λ·L(w))` over the simplex.
///
/// Damped proximal Newton: each iteration solves the quadratic model of the log terms plus
/// the exact group-norm penalty, then backtracks on the true objective.
pub fn best_fixed_allocation(
    matrices: &[PortfolioMatrix],
    market: &MarketSeries,
    lambda: f64,
    eg: &EnsembleGrouping,
) -> Result<HindsightSolution> {
    let payoffs = round_payoffs(matrices, market)?;
    hindsight_from_payoffs(&payoffs, lambda, eg)
}

pub fn hindsight_from_payoffs(
    payoffs: &[Vec<f64>],
    lambda: f64,
    eg: &EnsembleGrouping,
) -> Result<HindsightSolution> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::param("lambda must be >= 0"));
    }
    let p = eg.dim();
    if let Some(u) = payoffs.iter().find(|u| u.len() != p) {
        return Err(Error::dims(p, u.len()));
    }
    let objective = |w: &[f64]| hindsight_objective(payoffs, lambda, eg, w);
    let mut w = vec![1.0 / p as f64; p];

    let flat = lambda == 0.0
        && payoffs.iter().all(|u| {
            let hi = u.iter().copied().fold(f64::MIN, f64::max);
            let lo = u.iter().copied().fold(f64::MAX, f64::min);
            hi - lo <= 1e-15 * hi.abs()
        });
    if flat || p == 1 {
        return Ok(HindsightSolution {
            objective: objective(&w),
            w_star: w,
            certificate: 0.0,
            flat,
            converged: true,
            iterations: 0,
        });
    }

    let mut f = objective(&w);
    let mut certificate = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=200 {
        iterations = it;
        let mut grad = vec![0.0; p];
        let mut hessian = Matrix::zeros(p, p);
        for u in payoffs {
            let s = dot(u, &w);
            for (g, v) in grad.iter_mut().zip(u) {
                *g -= v / s;
            }
            hessian.add_outer(u, 1.0 / (s * s));
        }
        // damping keeps the model strictly convex when the payoffs span few directions; it
        // changes the step, not the fixed point
        let scale = (0..p).map(|i| hessian[(i, i)]).fold(1.0, f64::max);
        for i in 0..p {
            hessian[(i, i)] += 1e-9 * scale;
        }
        let hw = hessian.mul_vec(&w);
        let linear: Vec<f64> = grad.iter().zip(&hw).map(|(g, h)| g - h).collect();
        let qp = SimplexQp {
            hessian: &hessian,
            linear: &linear,
            penalty: Some((payoffs.len() as f64 * lambda, eg)),
            cap: None,
        };
        let (target, _, _) = qp.solve(&w)?;
        let dir: Vec<f64> = target.iter().zip(&w).map(|(t, v)| t - v).collect();

        let mut step = 1.0;
        let mut next = None;
        while step > 1e-12 {
            let cand = clean_simplex(
                &w.iter()
                    .zip(&dir)
                    .map(|(v, d)| v + step * d)
                    .collect::<Vec<_>>(),
            );
            let fc = objective(&cand);
            if fc <= f {
                next = Some((cand, fc));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, fc)) = next else {
            certificate = 0.0;
            converged = true;
            break;
        };
        certificate = f - fc;
        w = cand;
        f = fc;
        if certificate < 1e-13 * (1.0 + f.abs()) {
            converged = true;
            break;
        }
    }
    Ok(HindsightSolution {
        w_star: w,
        objective: f,
        certificate,
        flat: false,
        converged,
        iterations,
    })
}

/// Cumulative regret of the online regularized losses against the fixed hindsight point.
pub fn regret_curve(
    online_losses: &[f64],
    hindsight: &HindsightSolution,
    matrices: &[PortfolioMatrix],
    market: &MarketSeries,
    lambda: f64,
    eg: &EnsembleGrouping,
) -> Result<Vec<f64>> {
    let payoffs = round_payoffs(matrices, market)?;
    regret_from_payoffs(online_losses, hindsight, &payoffs, lambda, eg)
}

pub fn regret_from_payoffs(
    online_losses: &[f64],
    hindsight: &HindsightSolution,
    payoffs: &[Vec<f64>],
    lambda: f64,
    eg: &EnsembleGrouping,
) -> Result<Vec<f64>> {
    if online_losses.len() != payoffs.len() {
        return Err(Error::dims(payoffs.len(), online_losses.len()));
    }
    let reg = lambda * group_norm(&hindsight.w_star, eg)?;
    let mut total = 0.0;
    Ok(online_losses
        .iter()
        .zip(payoffs)
        .map(|(l, u)| {
            total += l - (-libm::log(dot(u, &hindsight.w_star)) + reg);
            total
        })
        .collect())
}
