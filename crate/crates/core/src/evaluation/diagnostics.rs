use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::optimizer::CurvatureMatrix;

use super::BacktestReport;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Report {
    /// `Σ_t ‖∇g_t(w_t)‖²` in the `A_t⁻¹` norm.
    pub statistic: f64,
    /// `k·d·log T`.
    pub bound: f64,
    pub satisfied: bool,
}

/// Compares the engine's accumulated statistic with `dim·log T`.
pub fn lemma2_report(report: &BacktestReport, dim: usize) -> Lemma2Report {
    let t = report.n_rounds();
    let statistic = report.lemma2_statistic();
    let bound = if t == 0 {
        0.0
    } else {
        dim as f64 * libm::log(t as f64)
    };
    Lemma2Report {
        statistic,
        bound,
        satisfied: statistic <= bound,
    }
}

/// Recomputes the statistic from logged gradients, rebuilding `A_t = εI + Σ_{s≤t} g_s g_sᵀ`.
pub fn replay_lemma2(gradients: &[Vec<f64>], epsilon: f64) -> Result<f64> {
    let Some(first) = gradients.first() else {
        return Ok(0.0);
    };
    let mut a = CurvatureMatrix::new(first.len(), epsilon)?;
    let mut total = 0.0;
    for g in gradients {
        a.add_gradient(g)?;
        total += a.cholesky()?.inv_quad_form(g);
    }
    Ok(total)
}

/// Slack of the exp-concavity lower bound for `f(w) = −log⟨u, w⟩` between `x` and `y`:
/// `f(y) − f(x) − ⟨∇f(x), y−x⟩ − (η/2)⟨∇f(x), y−x⟩²`. Nonnegative when the bound holds.
pub fn lemma1_slack(u: &[f64], x: &[f64], y: &[f64], eta: f64) -> Result<f64> {
    if x.len() != u.len() {
        return Err(Error::dims(u.len(), x.len()));
    }
    if y.len() != u.len() {
        return Err(Error::dims(u.len(), y.len()));
    }
    let sx = dot(u, x);
    let sy = dot(u, y);
    if !(sx > 0.0 && sy > 0.0) {
        return Err(Error::data("nonpositive payoff"));
    }
    // ⟨∇f(x), y − x⟩ = −⟨u, y − x⟩/⟨u, x⟩ = 1 − sy/sx
    let lin = 1.0 - sy / sx;
    Ok(-libm::log(sy) + libm::log(sx) - lin - 0.5 * eta * lin * lin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn zero_gradient_statistic() {
        assert_eq!(replay_lemma2(&[vec![0.0; 3]], 1.0).unwrap(), 0.0);
    }

    #[test]
    fn lemma1_slack_is_zero_on_the_diagonal() {
        let u = [1.1, 0.9];
        assert_eq!(
            lemma1_slack(&u, &[0.4, 0.6], &[0.4, 0.6], 0.1).unwrap(),
            0.0
        );
        assert!(lemma1_slack(&u, &[1.0, 0.0], &[0.0, 1.0], 0.1).unwrap() >= 0.0);
    }
}
