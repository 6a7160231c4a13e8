//! Symmetric centred normal inverse Gaussian jumps.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, InverseGaussian, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mellin::{ErrorOrder, MellinSource, MellinStrip, Side, TailAsymptote};
use crate::numerics::special::ln_bessel_k1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NigParams {
    pub alpha: f64,
    pub delta: f64,
    pub t: f64,
}

/// Density value; `underflow` marks a result flushed to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValue {
    pub value: f64,
    pub underflow: bool,
}

/// Default regime guard for the tail asymptotes: `|log x| ≥ 4`.
pub const NIG_TAIL_GUARD: f64 = 4.0;

impl NigParams {
    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64, bool, &'static str); 3] = [
            ("alpha", self.alpha, self.alpha > 0.0 && self.alpha.is_finite(), "alpha > 0"),
            ("delta", self.delta, self.delta > 0.0 && self.delta.is_finite(), "delta > 0"),
            ("t", self.t, self.t > 0.0 && self.t.is_finite(), "t > 0"),
        ];
        for (name, value, ok, constraint) in checks {
            if !ok {
                return Err(Error::InvalidParameter { name, value, constraint });
            }
        }
        Ok(())
    }

    /// `k(t) = αδt e^(αδt) / π`
    pub fn k(&self) -> f64 {
        self.ln_k().exp()
    }

    fn ln_k(&self) -> f64 {
        let adt = self.alpha * self.delta * self.t;
        adt.ln() + adt - PI.ln()
    }

    /// `ln` of the density of `Y_t` at `y`.
    pub fn ln_log_density(&self, y: f64) -> Result<f64> {
        let dt = self.delta * self.t;
        let r = y.hypot(dt);
        Ok(self.ln_k() + ln_bessel_k1(self.alpha * r)? - r.ln())
    }

    /// Density of `Y_t` at `y`.
    pub fn log_density(&self, y: f64) -> Result<DensityValue> {
        let ln = self.ln_log_density(y)?;
        let value = ln.exp();
        let underflow = value < f64::MIN_POSITIVE;
        Ok(DensityValue {
            value: if underflow { 0.0 } else { value },
            underflow,
        })
    }

    /// Density of `e^(Y_t)` at `x > 0`.
    pub fn price_density(&self, x: f64) -> Result<DensityValue> {
        if !(x > 0.0) {
            return Err(Error::domain("nig_price_density", format!("x = {x} must be positive")));
        }
        let ln = self.ln_log_density(x.ln())? - x.ln();
        let value = ln.exp();
        let underflow = value < f64::MIN_POSITIVE;
        Ok(DensityValue {
            value: if underflow { 0.0 } else { value },
            underflow,
        })
    }

    /// `k(t)√(π/2α) x^(-α-1) (log x)^(-3/2)` as `x → ∞`.
    pub fn tail_asymptote(&self) -> TailAsymptote {
        TailAsymptote {
            r1: self.k() * (PI / (2.0 * self.alpha)).sqrt(),
            r2: 0.0,
            r3: self.alpha + 1.0,
            r4: -1.5,
            side: Side::AtInfinity,
            error_order: ErrorOrder::InvLog,
        }
    }

    /// Mirror image of [`tail_asymptote`](Self::tail_asymptote) under `x ↦ 1/x`:
    /// `k(t)√(π/2α) x^(α-1) (log 1/x)^(-3/2)` as `x → 0`.
    pub fn zero_asymptote(&self) -> TailAsymptote {
        TailAsymptote {
            r3: self.alpha - 1.0,
            side: Side::AtZero,
            ..self.tail_asymptote()
        }
    }

    /// Leading term of the price density; requires `log x ≥ 4`.
    pub fn tail_value(&self, x: f64) -> Result<f64> {
        if !(x.ln() >= NIG_TAIL_GUARD) {
            return Err(Error::regime(format!("NIG tail needs log x >= {NIG_TAIL_GUARD}, got x = {x}")));
        }
        self.tail_asymptote().value(x)
    }

    /// `μ = δ(√(α²-1) - α)`, which requires `α ≥ 1`.
    pub fn no_arb_drift(&self) -> Result<f64> {
        if !(self.alpha >= 1.0) {
            return Err(Error::NoArbitrage {
                detail: format!("alpha = {} < 1: E[exp(Y_t)] is infinite", self.alpha),
            });
        }
        Ok(self.delta * ((self.alpha * self.alpha - 1.0).sqrt() - self.alpha))
    }

    pub fn ln_mgf(&self, s: f64) -> Result<f64> {
        if !(s.abs() < self.alpha) {
            return Err(Error::MomentExplosion {
                order: s,
                detail: format!("NIG moments need |s| < alpha = {}", self.alpha),
            });
        }
        Ok(self.delta * self.t * (self.alpha - (self.alpha * self.alpha - s * s).sqrt()))
    }

    /// `E[e^(sY_t)] = exp{δt(α - √(α² - s²))}` for `|s| < α`.
    pub fn mgf(&self, s: f64) -> Result<f64> {
        self.ln_mgf(s).map(f64::exp)
    }

    /// `log E[e^(iuY_t)]` for complex `u` with `|Im u| < α`.
    pub fn log_cf(&self, u: Complex64) -> Complex64 {
        let root = (u * u + self.alpha * self.alpha).sqrt();
        self.delta * self.t * (self.alpha - root)
    }

    /// One draw of `Y_t` by inverse-Gaussian subordination.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let dt = self.delta * self.t;
        let ig = InverseGaussian::new(dt / self.alpha, dt * dt).expect("validated NIG parameters");
        let time: f64 = ig.sample(rng);
        let z: f64 = StandardNormal.sample(rng);
        time.sqrt() * z
    }
}

/// The NIG price factor `e^(Y_t)` has moments of order in `(-α, α)`.
impl MellinSource for NigParams {
    fn strip(&self) -> MellinStrip {
        MellinStrip {
            sigma: -self.alpha - 1.0,
            tau: self.alpha - 1.0,
        }
    }

    fn mellin(&self, z: f64) -> Result<f64> {
        self.mgf(-z - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, Tolerance};

    const P: NigParams = NigParams {
        alpha: 1.25,
        delta: 1.0,
        t: 1.0,
    };

    #[test]
    fn drift_values() {
        assert!((P.no_arb_drift().unwrap() + 0.5).abs() < 1e-15);
        let q = NigParams { alpha: 1.0, delta: 0.7, t: 1.0 };
        assert!((q.no_arb_drift().unwrap() + 0.7).abs() < 1e-15);
        let bad = NigParams { alpha: 0.9, ..P };
        assert!(matches!(bad.no_arb_drift(), Err(Error::NoArbitrage { .. })));
    }

    #[test]
    fn mgf_values() {
        assert_eq!(P.mgf(0.0).unwrap(), 1.0);
        assert!((P.mgf(1.0).unwrap() - 0.5f64.exp()).abs() < 1e-14);
        assert!((P.mgf(0.7).unwrap() - P.mgf(-0.7).unwrap()).abs() < 1e-15);
        assert!(P.mgf(1.25).is_err());
        let near = P.mgf(1.25 - 1e-12).unwrap();
        assert!((near / 1.25f64.exp() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn density_is_normalized_symmetric_and_peaked() {
        let tol = Tolerance::rel(1e-12);
        let f = |y: f64| P.log_density(y).unwrap().value;
        let total = integrate(f, f64::NEG_INFINITY, f64::INFINITY, &tol).unwrap();
        assert!((total - 1.0).abs() < 1e-10);
        assert_eq!(f(1.3), f(-1.3));
        assert!(f(0.0) > f(0.01));
        let x = 3.0;
        let a = P.price_density(x).unwrap().value;
        assert!((a - f(x.ln()) / x).abs() < 1e-15);
    }

    #[test]
    fn underflow_is_flagged() {
        let v = P.log_density(1e4).unwrap();
        assert!(v.underflow && v.value == 0.0);
    }

    #[test]
    fn tail_ratio_converges_at_rate_inv_log() {
        let a = P.tail_asymptote();
        let mut prev = f64::INFINITY;
        for ell in [8.0, 16.0, 32.0] {
            let x = f64::exp(ell);
            let exact = P.ln_log_density(ell).unwrap() - ell;
            let res = (exact - a.ln_value(x).unwrap()).exp_m1().abs();
            assert!(res * ell < 5.0);
            assert!(res < prev);
            prev = res;
        }
    }

    #[test]
    fn cf_matches_mgf_on_imaginary_axis() {
        let z = P.log_cf(Complex64::new(0.0, -0.8));
        assert!((z.re - P.ln_mgf(0.8).unwrap()).abs() < 1e-14);
        assert!(z.im.abs() < 1e-14);
    }
}
