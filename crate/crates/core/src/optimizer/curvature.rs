use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, Cholesky, Matrix};

/// Symmetric positive-definite curvature estimate `εI + Σ ∇g ∇gᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureMatrix {
    m: Matrix,
}

impl CurvatureMatrix {
    /// `epsilon · I` of order `dim`.
    pub fn new(dim: usize, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::param("initial curvature must be > 0"));
        }
        Ok(CurvatureMatrix {
            m: Matrix::scaled_identity(dim, epsilon),
        })
    }

    /// Wraps an arbitrary matrix after checking symmetry and positive definiteness.
    pub fn from_matrix(m: Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::dims(m.rows(), m.cols()));
        }
        let scale = m.as_slice().iter().fold(1.0_f64, |s, v| s.max(v.abs()));
        if m.max_asymmetry() > 1e-12 * scale {
            return Err(Error::param("curvature matrix is not symmetric"));
        }
        Cholesky::new(&m).map_err(|_| Error::param("curvature matrix is not positive definite"))?;
        Ok(CurvatureMatrix { m })
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    /// In-place rank-one update `A += g gᵀ`.
    pub fn add_gradient(&mut self, grad: &[f64]) -> Result<()> {
        if grad.len() != self.dim() {
            return Err(Error::dims(self.dim(), grad.len()));
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("curvature update gradient"));
        }
        self.m.add_outer(grad, 1.0);
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(symmetric_eigenvalues(&self.m)?[0])
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        symmetric_eigenvalues(&self.m)
    }

    pub fn cholesky(&self) -> Result<Cholesky> {
        Cholesky::new(&self.m)
    }
}

/// `A + grad gradᵀ` as a new matrix.
pub fn update_curvature(a: &CurvatureMatrix, grad: &[f64]) -> Result<CurvatureMatrix> {
    let mut next = a.clone();
    next.add_gradient(grad)?;
    Ok(next)
}

/// Bregman divergence of `½ wᵀAw`: `½ (w − x)ᵀ A (w − x)`.
pub fn bregman(a: &CurvatureMatrix, w: &[f64], x: &[f64]) -> Result<f64> {
    if w.len() != a.dim() {
        return Err(Error::dims(a.dim(), w.len()));
    }
    if x.len() != a.dim() {
        return Err(Error::dims(a.dim(), x.len()));
    }
    let d: Vec<f64> = w.iter().zip(x).map(|(a, b)| a - b).collect();
    Ok(0.5 * a.m.quad_form(&d))
}
