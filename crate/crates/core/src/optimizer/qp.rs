//! Primal active-set method for small convex quadratic programs
//!
//! ```text
//! minimize    ½ zᵀ H z + cᵀ z
//! subject to  a_k · z  = b_k   (equalities)
//!             a_i · z ≤ b_i    (inequalities)
//! ```
//!
//! `H` may be singular as long as it is positive definite on the null space of every working
//! set the iteration visits; the callers in this crate guarantee that structurally. The method
//! needs a feasible starting point and a linearly independent initial working set.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, solve, Matrix};

pub(crate) struct Constraint {
    pub a: Vec<f64>,
    pub b: f64,
}

pub(crate) struct QuadraticProgram {
    pub hessian: Matrix,
    pub linear: Vec<f64>,
    pub equalities: Vec<Constraint>,
    pub inequalities: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub(crate) struct QpSolution {
    pub z: Vec<f64>,
    /// Multipliers of the inequalities (zero for inactive ones).
    #[allow(dead_code)]
    pub multipliers: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl QuadraticProgram {
    pub fn solve(
        &self,
        z0: Vec<f64>,
        mut working: Vec<usize>,
        max_iter: usize,
    ) -> Result<QpSolution> {
        let n = self.linear.len();
        if z0.len() != n {
            return Err(Error::dims(n, z0.len()));
        }
        let mut z = z0;
        let scale = 1.0 + z.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let step_tol = 1e-13 * scale;
        let mult_tol = 1e-12 * (1.0 + self.linear.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
        let mut multipliers = vec![0.0; self.inequalities.len()];

        for iter in 0..max_iter {
            let (p, nu) = self.equality_step(&z, &working)?;
            let pmax = p.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if pmax <= step_tol {
                let ne = self.equalities.len();
                let worst = working
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| (k, i, nu[ne + k]))
                    .min_by(|a, b| a.2.total_cmp(&b.2));
                match worst {
                    Some((k, _, m)) if m < -mult_tol => {
                        working.remove(k);
                    }
                    _ => {
                        multipliers.iter_mut().for_each(|m| *m = 0.0);
                        for (k, &i) in working.iter().enumerate() {
                            multipliers[i] = nu[ne + k];
                        }
                        return Ok(QpSolution {
                            z,
                            multipliers,
                            iterations: iter + 1,
                            converged: true,
                        });
                    }
                }
                continue;
            }

            let mut alpha = 1.0;
            let mut blocking = None;
            for (i, c) in self.inequalities.iter().enumerate() {
                if working.contains(&i) {
                    continue;
                }
                let ap = dot(&c.a, &p);
                if ap <= 1e-15 * (1.0 + pmax) {
                    continue;
                }
                let slack = (c.b - dot(&c.a, &z)).max(0.0);
                let ratio = slack / ap;
                if ratio < alpha {
                    alpha = ratio;
                    blocking = Some(i);
                }
            }
            for (zi, pi) in z.iter_mut().zip(&p) {
                *zi += alpha * pi;
            }
            if let Some(i) = blocking {
                working.push(i);
            }
        }
        Ok(QpSolution {
            z,
            multipliers,
            iterations: max_iter,
            converged: false,
        })
    }

    /// Solves the equality-constrained subproblem on the current working set, returning the
    /// step and the multipliers (equalities first, then working inequalities in order).
    fn equality_step(&self, z: &[f64], working: &[usize]) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.linear.len();
        let rows: Vec<&[f64]> = self
            .equalities
            .iter()
            .map(|c| c.a.as_slice())
            .chain(working.iter().map(|&i| self.inequalities[i].a.as_slice()))
            .collect();
        let m = rows.len();
        let dim = n + m;
        let mut kkt = Matrix::zeros(dim, dim);
        for i in 0..n {
            for j in 0..n {
                kkt[(i, j)] = self.hessian[(i, j)];
            }
        }
        for (r, a) in rows.iter().enumerate() {
            for (j, &v) in a.iter().enumerate() {
                kkt[(n + r, j)] = v;
                kkt[(j, n + r)] = v;
            }
        }
        let grad = {
            let mut g = self.hessian.mul_vec(z);
            for (gi, ci) in g.iter_mut().zip(&self.linear) {
                *gi += ci;
            }
            g
        };
        let mut rhs = vec![0.0; dim];
        for i in 0..n {
            rhs[i] = -grad[i];
        }
        let sol = solve(&kkt, &rhs)?;
        Ok((sol[..n].to_vec(), sol[n..].to_vec()))
    }
}
