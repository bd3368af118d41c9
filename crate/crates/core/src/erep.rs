//! The exposure-regularized ensemble engine.
//!
//! Every base strategy is instantiated once per sector, trading only that sector's stocks.
//! The engine keeps an allocation `w` over the resulting `k·d` sub-algorithms and updates it
//! each round with a curvature-weighted (Newton) step penalized by the ℓ∞/ℓ1 group norm over
//! sectors, which pushes capital toward being spread across sectors.
//!
//! Allocation coordinates are sector-major: sub-algorithm `(base i, sector j)` sits at index
//! `j·d + i`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::evaluation::{BacktestReport, ReportBuilder};
use crate::linalg::{dot, Matrix};
use crate::market::{Group, Grouping, MarketSeries};
use crate::optimizer::{composite_newton_step, group_norm, CompositeStepParams, CurvatureMatrix};
use crate::portfolio::Portfolio;
use crate::strategies::{StrategySpec, StrategyState};

/// `n × (k·d)` matrix whose columns are the sub-algorithm portfolios embedded in stock space.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioMatrix {
    m: Matrix,
}

impl PortfolioMatrix {
    /// Checks that every column is a portfolio.
    pub fn new(m: Matrix) -> Result<Self> {
        for j in 0..m.cols() {
            let col = m.column(j);
            if col.iter().any(|&v| !(v >= 0.0)) {
                return Err(Error::param(format!(
                    "column {j} has a negative or NaN entry"
                )));
            }
            let s: f64 = col.iter().sum();
            if (s - 1.0).abs() > crate::portfolio::SIMPLEX_TOL {
                return Err(Error::param(format!("column {j} sums to {s}")));
            }
        }
        Ok(PortfolioMatrix { m })
    }

    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let n = cols.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != n {
                return Err(Error::dims(n, c.len()));
            }
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Self::new(m)
    }

    pub fn n_stocks(&self) -> usize {
        self.m.rows()
    }

    pub fn n_columns(&self) -> usize {
        self.m.cols()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.m.column(j)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    fn check(&self, x: &[f64], w: &[f64]) -> Result<()> {
        if x.len() != self.n_stocks() {
            return Err(Error::dims(self.n_stocks(), x.len()));
        }
        if w.len() != self.n_columns() {
            return Err(Error::dims(self.n_columns(), w.len()));
        }
        Ok(())
    }
}

/// Stock portfolio `b = P w` induced by an allocation over sub-algorithms.
pub fn aggregate_portfolio(p: &PortfolioMatrix, w: &[f64]) -> Result<Portfolio> {
    if w.len() != p.n_columns() {
        return Err(Error::dims(p.n_columns(), w.len()));
    }
    Portfolio::new(p.m.mul_vec(w))
}

fn growth(x: &[f64], p: &PortfolioMatrix, w: &[f64]) -> Result<f64> {
    p.check(x, w)?;
    let g = dot(x, &p.m.mul_vec(w));
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::data(format!("nonpositive wealth factor {g}")));
    }
    Ok(g)
}

/// Round loss `g_t(w) = −log⟨x, P w⟩`.
pub fn loss_g(x: &[f64], p: &PortfolioMatrix, w: &[f64]) -> Result<f64> {
    Ok(-libm::log(growth(x, p, w)?))
}

/// Gradient of [`loss_g`]: `−Pᵀx / ⟨x, P w⟩`.
pub fn grad_g(x: &[f64], p: &PortfolioMatrix, w: &[f64]) -> Result<Vec<f64>> {
    let g = growth(x, p, w)?;
    Ok(p.m.tr_mul_vec(x).into_iter().map(|v| -v / g).collect())
}

/// Grouping of the allocation coordinates by sector: group `j` holds `{(i, j) : i < d}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleGrouping(Grouping);

impl EnsembleGrouping {
    pub fn new(sectors: &Grouping, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::param("no base algorithms"));
        }
        let k = sectors.len();
        let groups = sectors
            .groups()
            .iter()
            .enumerate()
            .map(|(j, g)| Group {
                name: g.name.clone(),
                indices: (0..d).map(|i| j * d + i).collect(),
            })
            .collect();
        Ok(EnsembleGrouping(Grouping::new(k * d, groups)?))
    }

    pub fn grouping(&self) -> &Grouping {
        &self.0
    }
}

impl core::ops::Deref for EnsembleGrouping {
    type Target = Grouping;
    fn deref(&self) -> &Grouping {
        &self.0
    }
}

/// The `k·d` sector-restricted copies of the base strategies.
#[derive(Debug, Clone)]
pub struct SubAlgorithmGrid {
    bases: Vec<StrategySpec>,
    sectors: Grouping,
    states: Vec<StrategyState>,
    n: usize,
}

impl SubAlgorithmGrid {
    pub fn new(bases: &[StrategySpec], sectors: &Grouping, n: usize) -> Result<Self> {
        if bases.is_empty() {
            return Err(Error::param("no base algorithms"));
        }
        if sectors.dim() != n {
            return Err(Error::dims(n, sectors.dim()));
        }
        if !sectors.is_partition() {
            return Err(Error::grouping(
                "sectors used to restrict sub-algorithms must be disjoint and cover every stock",
            ));
        }
        let d = bases.len();
        let mut states = Vec::with_capacity(d * sectors.len());
        for (j, g) in sectors.groups().iter().enumerate() {
            for (i, spec) in bases.iter().enumerate() {
                let st = StrategyState::new(*spec, g.indices.len()).map_err(|e| {
                    Error::SubAlgorithm {
                        base: i,
                        sector: j,
                        source: Box::new(e),
                    }
                })?;
                states.push(st);
            }
        }
        Ok(SubAlgorithmGrid {
            bases: bases.to_vec(),
            sectors: sectors.clone(),
            states,
            n,
        })
    }

    pub fn n_bases(&self) -> usize {
        self.bases.len()
    }

    pub fn n_sectors(&self) -> usize {
        self.sectors.len()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn sectors(&self) -> &Grouping {
        &self.sectors
    }

    pub fn state(&self, base: usize, sector: usize) -> &StrategyState {
        &self.states[sector * self.bases.len() + base]
    }

    pub fn ensemble_grouping(&self) -> EnsembleGrouping {
        EnsembleGrouping::new(&self.sectors, self.bases.len()).expect("grid has valid sectors")
    }

    /// Column labels `base@sector`, in allocation order.
    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.len());
        for g in self.sectors.groups() {
            for b in &self.bases {
                out.push(format!("{}@{}", b.label(), g.name));
            }
        }
        out
    }

    /// Current sub-algorithm portfolios embedded in stock space.
    pub fn matrix(&self) -> PortfolioMatrix {
        let d = self.bases.len();
        let mut m = Matrix::zeros(self.n, self.states.len());
        for (j, g) in self.sectors.groups().iter().enumerate() {
            for i in 0..d {
                let col = j * d + i;
                let b = self.states[col].portfolio();
                for (&stock, &v) in g.indices.iter().zip(b.iter()) {
                    m[(stock, col)] = v;
                }
            }
        }
        PortfolioMatrix { m }
    }

    /// Feeds one market row to every sub-algorithm (each sees its own sector's slice) and
    /// returns the next round's portfolio matrix.
    pub fn collect_portfolios(&mut self, x: &[f64]) -> Result<PortfolioMatrix> {
        if x.len() != self.n {
            return Err(Error::dims(self.n, x.len()));
        }
        let d = self.bases.len();
        for (j, g) in self.sectors.groups().iter().enumerate() {
            let slice: Vec<f64> = g.indices.iter().map(|&s| x[s]).collect();
            for i in 0..d {
                self.states[j * d + i]
                    .observe(&slice)
                    .map_err(|e| Error::SubAlgorithm {
                        base: i,
                        sector: j,
                        source: Box::new(e),
                    })?;
            }
        }
        Ok(self.matrix())
    }
}

/// Allocation, curvature, round counter and accumulated log-wealth.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleState {
    pub w: Vec<f64>,
    pub a: CurvatureMatrix,
    pub t: usize,
    pub log_wealth: f64,
}

impl EnsembleState {
    /// Uniform allocation and `A_0 = εI`.
    pub fn new(dim: usize, epsilon: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("empty allocation space"));
        }
        Ok(EnsembleState {
            w: vec![1.0 / dim as f64; dim],
            a: CurvatureMatrix::new(dim, epsilon)?,
            t: 0,
            log_wealth: 0.0,
        })
    }
}

/// What happened in one round, as seen by diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub growth: f64,
    pub loss: f64,
    /// `g_t(w_t) + λ·L(w_t)`.
    pub regularized_loss: f64,
    pub gradient: Vec<f64>,
    /// `‖∇g_t(w_t)‖²` in the `A_t⁻¹` norm.
    pub lemma2_term: f64,
    pub solver_converged: bool,
    pub solver_iterations: usize,
}

/// Plays `state.w` against `x` using the matrix `p` the round was traded with, then updates
/// curvature and allocation.
pub fn erep_step(
    state: &EnsembleState,
    x: &[f64],
    p: &PortfolioMatrix,
    params: &CompositeStepParams,
    eg: &EnsembleGrouping,
) -> Result<(EnsembleState, StepRecord)> {
    let growth = growth(x, p, &state.w)?;
    let loss = -libm::log(growth);
    let gradient: Vec<f64> = p.m.tr_mul_vec(x).into_iter().map(|v| -v / growth).collect();
    let mut a = state.a.clone();
    a.add_gradient(&gradient)?;
    let lemma2_term = a.cholesky()?.inv_quad_form(&gradient);
    let step = composite_newton_step(&gradient, &a, &state.w, params, eg)?;
    let reg = group_norm(&state.w, eg)?;
    let next = EnsembleState {
        w: step.w,
        a,
        t: state.t + 1,
        log_wealth: state.log_wealth + libm::log(growth),
    };
    let record = StepRecord {
        growth,
        loss,
        regularized_loss: loss + params.lambda * reg,
        gradient,
        lemma2_term,
        solver_converged: step.converged,
        solver_iterations: step.iterations,
    };
    Ok((next, record))
}

/// Full trajectory of an ensemble run, kept for hindsight and replay diagnostics.
#[derive(Debug, Clone)]
pub struct EnsembleRun {
    pub report: BacktestReport,
    /// Matrix each round was traded with.
    pub matrices: Vec<PortfolioMatrix>,
    pub gradients: Vec<Vec<f64>>,
    pub final_state: EnsembleState,
    pub grouping: EnsembleGrouping,
    pub params: CompositeStepParams,
    pub labels: Vec<String>,
}

/// Runs the engine over the whole market series.
pub fn run_erep(
    market: &MarketSeries,
    bases: &[StrategySpec],
    sectors: &Grouping,
    params: &CompositeStepParams,
    name: &str,
) -> Result<EnsembleRun> {
    params.validate()?;
    let mut grid = SubAlgorithmGrid::new(bases, sectors, market.n_stocks())?;
    let eg = grid.ensemble_grouping();
    let mut state = EnsembleState::new(grid.len(), params.epsilon)?;
    let mut current = grid.matrix();
    let mut report = ReportBuilder::new(name, Some(params.lambda));
    let mut matrices = Vec::with_capacity(market.n_days());
    let mut gradients = Vec::with_capacity(market.n_days());

    for t in 0..market.n_days() {
        let x = market.day(t);
        let b = aggregate_portfolio(&current, &state.w)?;
        let exposure = group_norm(&state.w, &eg)?;
        let (next, rec) = erep_step(&state, x, &current, params, &eg)?;
        report.push_round(
            market.date(t),
            b.into_inner(),
            state.w.clone(),
            rec.growth,
            rec.regularized_loss,
            rec.lemma2_term,
            exposure,
            rec.solver_converged,
        );
        let upcoming = grid.collect_portfolios(x)?;
        matrices.push(core::mem::replace(&mut current, upcoming));
        gradients.push(rec.gradient);
        state = next;
    }

    Ok(EnsembleRun {
        report: report.finish(),
        matrices,
        gradients,
        final_state: state,
        grouping: eg,
        params: *params,
        labels: grid.labels(),
    })
}

/// The matrices each round trades with. They depend only on the bases and the market, not on
/// the allocation.
pub fn portfolio_matrices(
    market: &MarketSeries,
    bases: &[StrategySpec],
    sectors: &Grouping,
) -> Result<Vec<PortfolioMatrix>> {
    let mut grid = SubAlgorithmGrid::new(bases, sectors, market.n_stocks())?;
    let mut out = Vec::with_capacity(market.n_days());
    out.push(grid.matrix());
    for t in 0..market.n_days().saturating_sub(1) {
        out.push(grid.collect_portfolios(market.day(t))?);
    }
    Ok(out)
}

/// Runs a single base strategy over all stocks.
pub fn run_strategy(
    market: &MarketSeries,
    spec: StrategySpec,
    sectors: &Grouping,
) -> Result<BacktestReport> {
    let mut state = StrategyState::new(spec, market.n_stocks())?;
    let mut report = ReportBuilder::new(&spec.label(), None);
    for t in 0..market.n_days() {
        let x = market.day(t);
        let b = state.portfolio().clone();
        let g = b.growth(x);
        let exposure = group_norm(&b, sectors)?;
        report.push_round(
            market.date(t),
            b.into_inner(),
            Vec::new(),
            g,
            -libm::log(g),
            0.0,
            exposure,
            true,
        );
        state.observe(x)?;
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::portfolio::on_simplex;

    fn sectors() -> Grouping {
        Grouping::from_indices(4, &[&[0, 1], &[2, 3]]).unwrap()
    }

    #[test]
    fn grid_sizes() {
        let bases = [
            StrategySpec::EG_DEFAULT,
            StrategySpec::ANTICOR_DEFAULT,
            StrategySpec::OLMAR_DEFAULT,
        ];
        let four = Grouping::from_indices(8, &[&[0, 1], &[2, 3], &[4, 5], &[6, 7]]).unwrap();
        assert_eq!(SubAlgorithmGrid::new(&bases, &four, 8).unwrap().len(), 12);
        let single = SubAlgorithmGrid::new(&bases[..1], &Grouping::single(8), 8).unwrap();
        assert_eq!(single.len(), 1);
        let overlap = Grouping::from_indices(3, &[&[0, 1], &[1, 2]]).unwrap();
        assert!(SubAlgorithmGrid::new(&bases, &overlap, 3).is_err());
    }

    #[test]
    fn warm_up_columns_are_uniform_on_their_sector() {
        let grid = SubAlgorithmGrid::new(&[StrategySpec::ANTICOR_DEFAULT], &sectors(), 4).unwrap();
        let p = grid.matrix();
        assert_eq!(p.column(0), [0.5, 0.5, 0.0, 0.0]);
        assert_eq!(p.column(1), [0.0, 0.0, 0.5, 0.5]);
    }

    #[test]
    fn single_cell_grid_tracks_the_base() {
        let spec = StrategySpec::EG_DEFAULT;
        let mut grid = SubAlgorithmGrid::new(&[spec], &Grouping::single(3), 3).unwrap();
        let mut base = StrategyState::new(spec, 3).unwrap();
        for x in [[1.1, 0.9, 1.0], [0.95, 1.02, 1.01]] {
            let p = grid.collect_portfolios(&x).unwrap();
            assert_eq!(p.column(0), base.observe(&x).unwrap().weights());
        }
    }

    #[test]
    fn loss_examples() {
        let p = PortfolioMatrix::new(Matrix::identity(3)).unwrap();
        let w = [0.2, 0.3, 0.5];
        assert!(loss_g(&[1.0; 3], &p, &w).unwrap().abs() < 1e-15);
        let e1 = [0.0, 1.0, 0.0];
        let x = [1.1, 0.8, 1.3];
        assert!((loss_g(&x, &p, &e1).unwrap() + libm::log(0.8)).abs() < 1e-15);
    }

    #[test]
    fn flat_market_gradient_is_minus_one() {
        let p = PortfolioMatrix::from_columns(&[vec![0.5, 0.5, 0.0], vec![0.0, 0.2, 0.8]]).unwrap();
        let g = grad_g(&[1.0; 3], &p, &[0.4, 0.6]).unwrap();
        assert!(g.iter().all(|v| (v + 1.0).abs() < 1e-15), "{g:?}");
    }

    #[test]
    fn gradient_is_scale_invariant() {
        let p = PortfolioMatrix::from_columns(&[vec![0.5, 0.5, 0.0], vec![0.0, 0.2, 0.8]]).unwrap();
        let x = [1.1, 0.9, 1.05];
        let scaled: Vec<f64> = x.iter().map(|v| 3.7 * v).collect();
        let a = grad_g(&x, &p, &[0.4, 0.6]).unwrap();
        let b = grad_g(&scaled, &p, &[0.4, 0.6]).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn aggregate_examples() {
        let cols = [vec![0.5, 0.5, 0.0], vec![0.0, 0.2, 0.8]];
        let p = PortfolioMatrix::from_columns(&cols).unwrap();
        assert_eq!(
            aggregate_portfolio(&p, &[0.0, 1.0]).unwrap().weights(),
            &cols[1][..]
        );
        let same = PortfolioMatrix::from_columns(&[cols[0].clone(), cols[0].clone()]).unwrap();
        let b = aggregate_portfolio(&same, &[0.5, 0.5]).unwrap();
        assert_eq!(b.weights(), &cols[0][..]);
    }

    #[test]
    fn symmetric_flat_round_keeps_uniform_allocation() {
        let grid = SubAlgorithmGrid::new(&[StrategySpec::EG_DEFAULT], &sectors(), 4).unwrap();
        let eg = grid.ensemble_grouping();
        let state = EnsembleState::new(2, 1.0).unwrap();
        let params = CompositeStepParams {
            lambda: 0.3,
            ..Default::default()
        };
        let (next, rec) = erep_step(&state, &[1.0; 4], &grid.matrix(), &params, &eg).unwrap();
        assert!(rec.loss.abs() < 1e-15);
        for w in &next.w {
            assert!((w - 0.5).abs() < 1e-12, "{:?}", next.w);
        }
        assert_eq!(next.t, 1);
    }

    #[test]
    fn run_stays_on_simplex() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|t| {
                let s = (t as f64 * 0.9).sin() * 0.03;
                vec![1.0 + s, 1.0 - s, 1.0 + 0.5 * s, 1.0 - 0.2 * s]
            })
            .collect();
        let names = (0..4).map(|i| format!("s{i}")).collect();
        let market = MarketSeries::new(names, rows, None).unwrap();
        let bases = [
            StrategySpec::EG_DEFAULT,
            StrategySpec::Olmar {
                window: 3,
                epsilon: 1.5,
            },
        ];
        let params = CompositeStepParams {
            lambda: 0.1,
            ..Default::default()
        };
        let run = run_erep(&market, &bases, &sectors(), &params, "EREP").unwrap();
        for r in &run.report.rounds {
            assert!(on_simplex(&r.allocation, 1e-9));
            assert!(on_simplex(&r.portfolio, 1e-9));
        }
        assert_eq!(run.matrices.len(), 40);
    }
}
