use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Tolerance on `|Σ b_i − 1|` for anything called a portfolio or an allocation.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Nonnegative wealth fractions summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Portfolio(Vec<f64>);

impl Portfolio {
    /// Renormalizes `weights` onto the simplex. Rejects negative, nonfinite, or all-zero input.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::param("portfolio over zero assets"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("portfolio weights"));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::param("negative portfolio weight"));
        }
        let s: f64 = weights.iter().sum();
        if s <= 0.0 {
            return Err(Error::param("portfolio weights sum to zero"));
        }
        Ok(Portfolio(weights.into_iter().map(|w| w / s).collect()))
    }

    pub fn uniform(n: usize) -> Self {
        Portfolio(vec![1.0 / n as f64; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Portfolio(v)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Wealth growth factor `⟨b, x⟩` for one day of relatives.
    pub fn growth(&self, x: &[f64]) -> f64 {
        crate::linalg::dot(&self.0, x)
    }
}

impl core::ops::Deref for Portfolio {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// True when `v` is entrywise nonnegative and sums to one, both within `tol`.
pub fn on_simplex(v: &[f64], tol: f64) -> bool {
    let s: f64 = v.iter().sum();
    (s - 1.0).abs() <= tol && v.iter().all(|&x| x >= -tol)
}

/// Euclidean projection onto the probability simplex (sort and threshold).
pub fn project_simplex(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::param("projection of an empty vector"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("simplex projection input"));
    }
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumsum += uk;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|&x| (x - theta).max(0.0)).collect();
    // absorb the rounding residue so the sum is 1 to machine precision
    let s: f64 = out.iter().sum();
    if s > 0.0 {
        out.iter_mut().for_each(|x| *x /= s);
    }
    Ok(out)
}
