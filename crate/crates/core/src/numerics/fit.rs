//! Least-squares fits in powers of a single variable.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Coefficients `c` minimising `Σ_i (y_i - Σ_j c_j x_i^{p_j})²`.
pub fn power_fit(xs: &[f64], ys: &[f64], powers: &[f64]) -> Result<Vec<f64>> {
    if xs.len() != ys.len() || xs.len() < powers.len() {
        return Err(Error::domain(
            "power_fit",
            format!("{} points, {} values, {} terms", xs.len(), ys.len(), powers.len()),
        ));
    }
    let a = DMatrix::from_fn(xs.len(), powers.len(), |i, j| xs[i].powf(powers[j]));
    let b = DVector::from_column_slice(ys);
    let c = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::domain("power_fit", e.to_string()))?;
    Ok(c.iter().copied().collect())
}

/// Fit of `y ≈ A + B ℓ^(-1/2) + C ℓ^(-1) + D ℓ^(-3/2)`; returns `[A, B, C, D]`.
pub fn inverse_sqrt_fit(ells: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    power_fit(ells, ys, &[0.0, -0.5, -1.0, -1.5])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_coefficients() {
        let xs: Vec<f64> = (0..13).map(|i| 6.0 + 0.5 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.3 - 2.0 / x.sqrt() + 5.0 / x - 1.0 / x.powf(1.5)).collect();
        let c = inverse_sqrt_fit(&xs, &ys).unwrap();
        for (a, b) in c.iter().zip([0.3, -2.0, 5.0, -1.0]) {
            assert!((a - b).abs() < 1e-7, "{c:?}");
        }
    }

    #[test]
    fn rejects_underdetermined() {
        assert!(power_fit(&[1.0], &[1.0], &[0.0, 1.0]).is_err());
    }
}
