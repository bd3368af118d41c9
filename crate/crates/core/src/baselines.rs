//! Comparison algorithms: MAons and ORSAD.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::erep::run_erep;
use crate::error::{Error, Result};
use crate::evaluation::{BacktestReport, ReportBuilder};
use crate::linalg::{dot, Matrix};
use crate::market::{Grouping, MarketSeries};
use crate::optimizer::{
    clean_simplex, gradient_norm_bound, group_norm, theory_eta, CompositeStepParams, SimplexQp,
};
use crate::portfolio::{on_simplex, Portfolio};

/// Newton ensemble over whole-market copies of the bases: the engine with one sector and no
/// regularization.
pub fn maons_run(
    bases: &[crate::strategies::StrategySpec],
    market: &MarketSeries,
    params: &CompositeStepParams,
) -> Result<BacktestReport> {
    let whole = Grouping::single(market.n_stocks());
    let mut report = run_erep(market, bases, &whole, &params.with_lambda(0.0), "MAons")?.report;
    report.lambda = None;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrsadParams {
    pub eta: f64,
    /// Cap on the largest group mass.
    pub k: f64,
}

impl OrsadParams {
    /// Step size from the Newton-step constants for the market's gradient bound, and the cap
    /// halfway between the tightest feasible value `1/m` and the vacuous value 1.
    pub fn for_market(market: &MarketSeries, grouping: &Grouping) -> Result<Self> {
        let g = gradient_norm_bound(market.max_dispersion(), market.n_stocks());
        let (eta, _) = theory_eta(1.0, g, core::f64::consts::SQRT_2)?;
        let m = grouping.len() as f64;
        Ok(OrsadParams {
            eta,
            k: 0.5 * (1.0 / m + 1.0),
        })
    }

    pub fn validate(&self, grouping: &Grouping) -> Result<()> {
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::param(format!(
                "ORSAD eta must be >= 0, got {}",
                self.eta
            )));
        }
        let floor = 1.0 / grouping.len() as f64;
        if !(self.k.is_finite() && self.k >= floor - 1e-12) {
            return Err(Error::param(format!(
                "ORSAD cap K = {} is infeasible; it must be at least 1/{} for this grouping",
                self.k,
                grouping.len()
            )));
        }
        Ok(())
    }
}

/// Portfolio spreading `1/m` over each of the `m` groups, evenly within a group. Its group
/// norm is `1/m`, the smallest possible, so it is feasible for every valid cap.
fn balanced_portfolio(grouping: &Grouping) -> Result<Vec<f64>> {
    if !grouping.is_partition() {
        return Err(Error::grouping(
            "ORSAD needs disjoint groups covering every stock",
        ));
    }
    let m = grouping.len() as f64;
    let mut b = vec![0.0; grouping.dim()];
    for g in grouping.groups() {
        let share = 1.0 / (m * g.indices.len() as f64);
        for &i in &g.indices {
            b[i] = share;
        }
    }
    Ok(b)
}

fn orsad_objective(b: &[f64], b_prev: &[f64], x: &[f64], eta: f64) -> f64 {
    let d2: f64 = b.iter().zip(b_prev).map(|(u, v)| (u - v) * (u - v)).sum();
    let s = dot(b, x);
    if s <= 0.0 {
        return f64::INFINITY;
    }
    -eta * libm::log(s) + 0.5 * d2
}

/// Minimizes `−η·log⟨b, x⟩ + ½‖b − b_prev‖²` over portfolios whose largest group mass is at
/// most `K`.
///
/// Each iteration solves the quadratic model of the objective exactly over the feasible
/// polytope and takes a backtracked step toward it. The objective is 1-strongly convex, so
/// this converges quadratically near the optimum.
pub fn orsad_step(
    b_prev: &[f64],
    x: &[f64],
    params: &OrsadParams,
    grouping: &Grouping,
) -> Result<Portfolio> {
    params.validate(grouping)?;
    let n = grouping.dim();
    for len in [b_prev.len(), x.len()] {
        if len != n {
            return Err(Error::dims(n, len));
        }
    }
    if x.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::data("market relatives must be finite and positive"));
    }
    let feasible = |b: &[f64]| {
        on_simplex(b, 1e-9) && group_norm(b, grouping).is_ok_and(|l| l <= params.k + 1e-9)
    };
    let mut b = if feasible(b_prev) {
        clean_simplex(b_prev)
    } else {
        balanced_portfolio(grouping)?
    };
    if params.eta == 0.0 && feasible(b_prev) {
        return Portfolio::new(b);
    }

    let cap = Some((params.k, grouping));
    let mut f = orsad_objective(&b, b_prev, x, params.eta);
    for _ in 0..100 {
        let s = dot(&b, x);
        let mut hessian = Matrix::identity(n);
        hessian.add_outer(x, params.eta / (s * s));
        // gradient of the objective at b, shifted so the model is expressed in b itself
        let hb = hessian.mul_vec(&b);
        let linear: Vec<f64> = (0..n)
            .map(|i| -params.eta * x[i] / s + (b[i] - b_prev[i]) - hb[i])
            .collect();
        let qp = SimplexQp {
            hessian: &hessian,
            linear: &linear,
            penalty: None,
            cap,
        };
        let (target, _, _) = qp.solve(&b)?;
        let dir: Vec<f64> = target.iter().zip(&b).map(|(t, v)| t - v).collect();
        if dir.iter().all(|d| d.abs() < 1e-15) {
            break;
        }
        let mut step = 1.0;
        let mut moved = false;
        while step > 1e-10 {
            let cand: Vec<f64> = b.iter().zip(&dir).map(|(v, d)| v + step * d).collect();
            let fc = orsad_objective(&cand, b_prev, x, params.eta);
            if fc <= f {
                moved = fc < f;
                b = clean_simplex(&cand);
                f = orsad_objective(&b, b_prev, x, params.eta);
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    if !feasible(&b) {
        return Err(Error::Solver(format!(
            "ORSAD step left the feasible set (group norm {})",
            group_norm(&b, grouping)?
        )));
    }
    Portfolio::new(b)
}

/// Runs ORSAD over the stocks, starting from the feasible point closest to uniform.
pub fn orsad_run(
    market: &MarketSeries,
    params: &OrsadParams,
    grouping: &Grouping,
) -> Result<BacktestReport> {
    params.validate(grouping)?;
    let n = market.n_stocks();
    if grouping.dim() != n {
        return Err(Error::dims(n, grouping.dim()));
    }
    let uniform = vec![1.0 / n as f64; n];
    let identity = Matrix::identity(n);
    let pull: Vec<f64> = uniform.iter().map(|u| -u).collect();
    let start = balanced_portfolio(grouping)?;
    let (mut b, _, _) = SimplexQp {
        hessian: &identity,
        linear: &pull,
        penalty: None,
        cap: Some((params.k, grouping)),
    }
    .solve(&start)?;

    let mut report = ReportBuilder::new("ORSAD", None);
    for t in 0..market.n_days() {
        let x = market.day(t);
        let g = dot(&b, x);
        let exposure = group_norm(&b, grouping)?;
        report.push_round(
            market.date(t),
            b.clone(),
            Vec::new(),
            g,
            -libm::log(g),
            0.0,
            exposure,
            true,
        );
        b = orsad_step(&b, x, params, grouping)?.into_inner();
    }
    Ok(report.finish())
}
