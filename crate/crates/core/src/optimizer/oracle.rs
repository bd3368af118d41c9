use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Exhaustive minimization over the simplex grid `{k/N : Σk = N}` with `N = round(1/step)`.
///
/// Meant as a reference oracle for the iterative solvers, so it is limited to `dim ≤ 4`.
/// Objectives may return `f64::INFINITY` to mark infeasible points. Ties keep the first
/// point in enumeration order.
pub fn brute_force_simplex_min<F>(objective: F, dim: usize, step: f64) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    if !(2..=4).contains(&dim) {
        return Err(Error::param("grid oracle supports dimensions 2 to 4"));
    }
    if !(step > 0.0 && step <= 1e-2) {
        return Err(Error::param("grid step must lie in (0, 0.01]"));
    }
    let n = libm::round(1.0 / step) as usize;
    let inv = 1.0 / n as f64;
    let mut counts = vec![0usize; dim];
    let mut point = vec![0.0; dim];
    let mut best = (vec![f64::NAN; dim], f64::INFINITY);

    // odometer over the first dim−1 counts; the last one takes the remainder
    loop {
        let used: usize = counts[..dim - 1].iter().sum();
        if used <= n {
            counts[dim - 1] = n - used;
            for (p, &c) in point.iter_mut().zip(&counts) {
                *p = c as f64 * inv;
            }
            let f = objective(&point);
            if f < best.1 {
                best = (point.clone(), f);
            }
        }
        let mut k = 0;
        loop {
            if k == dim - 1 {
                return if best.1.is_finite() {
                    Ok(best)
                } else {
                    Err(Error::Solver("no feasible grid point".into()))
                };
            }
            counts[k] += 1;
            if counts[..dim - 1].iter().sum::<usize>() <= n {
                break;
            }
            counts[k] = 0;
            k += 1;
        }
    }
}
