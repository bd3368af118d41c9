use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::portfolio::Portfolio;

/// Exponentiated-gradient update `b'_i ∝ b_i · exp(η x_i / ⟨b, x⟩)`.
pub fn eg_update(b: &Portfolio, x: &[f64], eta: f64) -> Result<Portfolio> {
    if x.len() != b.len() {
        return Err(Error::dims(b.len(), x.len()));
    }
    let growth = b.growth(x);
    if !(growth > 0.0) {
        return Err(Error::data("nonpositive portfolio growth in EG update"));
    }
    let expo: Vec<f64> = x.iter().map(|&xi| eta * xi / growth).collect();
    if expo.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFinite("EG exponent"));
    }
    // shift by the max exponent; the common factor cancels in the normalization
    let top = expo.iter().copied().fold(f64::MIN, f64::max);
    let w = b
        .iter()
        .zip(&expo)
        .map(|(&bi, &e)| bi * libm::exp(e - top))
        .collect();
    Portfolio::new(w)
}
