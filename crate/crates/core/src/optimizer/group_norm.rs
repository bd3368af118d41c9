use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::market::Grouping;

fn check(w: &[f64], grouping: &Grouping) -> Result<()> {
    if w.len() != grouping.dim() {
        return Err(Error::dims(grouping.dim(), w.len()));
    }
    Ok(())
}

/// Index of the group with the largest ℓ1 mass; the lowest index wins ties.
pub fn max_group(w: &[f64], grouping: &Grouping) -> usize {
    let masses = grouping.group_masses(w);
    let mut best = 0;
    for (j, &m) in masses.iter().enumerate() {
        if m > masses[best] {
            best = j;
        }
    }
    best
}

/// ℓ∞/ℓ1 group norm: the largest within-group ℓ1 mass.
pub fn group_norm(w: &[f64], grouping: &Grouping) -> Result<f64> {
    check(w, grouping)?;
    Ok(grouping.group_masses(w).into_iter().fold(0.0, f64::max))
}

/// A subgradient of [`group_norm`] at `w`: the sign pattern of the maximizing group, with
/// `sign(0) = +1`, and zero elsewhere.
pub fn group_norm_subgradient(w: &[f64], grouping: &Grouping) -> Result<Vec<f64>> {
    check(w, grouping)?;
    let mut v = vec![0.0; w.len()];
    for &i in &grouping.group(max_group(w, grouping)).indices {
        v[i] = if w[i] < 0.0 { -1.0 } else { 1.0 };
    }
    Ok(v)
}
