//! Mellin transforms and convolutions, numerically and asymptotically.
//!
//! Conventions:
//!
//! * `MU(z) = ∫₀^∞ t^(-z) U(t) dt/t`, so for a density `MU(η)` is the moment
//!   of order `-η-1`.
//! * `(f ⋆ g)(x) = ∫₀^∞ f(x/t) g(t) dt/t`, the density of a product of
//!   independent positive variables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate, Tolerance};

/// Which end of the half-line an asymptote describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    AtInfinity,
    AtZero,
}

/// Order of the relative error term attached to an asymptote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorOrder {
    /// `(log x)^(-1)`
    InvLog,
    /// `(log x)^(-1/2)`
    InvSqrtLog,
}

impl ErrorOrder {
    /// Value of the error function at `ell = |log x|`.
    pub fn at(self, ell: f64) -> f64 {
        match self {
            ErrorOrder::InvLog => 1.0 / ell,
            ErrorOrder::InvSqrtLog => 1.0 / ell.sqrt(),
        }
    }

    /// The weaker (larger) of two error orders.
    pub fn max(self, other: Self) -> Self {
        Ord::max(self, other)
    }
}

/// `r1 · x^(-r3) · exp(r2 √log x) · (log x)^r4` as `x → ∞`, or the mirrored
/// `r1 · x^(r3) · exp(r2 √log(1/x)) · (log 1/x)^r4` as `x → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailAsymptote {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    pub side: Side,
    pub error_order: ErrorOrder,
}

impl TailAsymptote {
    pub fn new(r1: f64, r2: f64, r3: f64, r4: f64, side: Side, error_order: ErrorOrder) -> Result<Self> {
        if !(r1 > 0.0 && r1.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "r1",
                value: r1,
                constraint: "r1 > 0 and finite",
            });
        }
        if !(r2 >= 0.0 && r2.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "r2",
                value: r2,
                constraint: "r2 >= 0 and finite",
            });
        }
        if !r3.is_finite() || !r4.is_finite() {
            return Err(Error::InvalidParameter {
                name: "r3/r4",
                value: if r3.is_finite() { r4 } else { r3 },
                constraint: "finite",
            });
        }
        Ok(Self {
            r1,
            r2,
            r3,
            r4,
            side,
            error_order,
        })
    }

    /// `|log x|` measured on this asymptote's side; errors on the wrong side of 1.
    pub fn ell(&self, x: f64) -> Result<f64> {
        let l = x.ln();
        match self.side {
            Side::AtInfinity if l > 0.0 => Ok(l),
            Side::AtZero if l < 0.0 => Ok(-l),
            _ => Err(Error::regime(format!(
                "x = {x} lies on the wrong side of 1 for a {:?} asymptote",
                self.side
            ))),
        }
    }

    /// Natural logarithm of the asymptote at `x`.
    pub fn ln_value(&self, x: f64) -> Result<f64> {
        Ok(self.ln_value_at_ell(self.ell(x)?))
    }

    /// [`ln_value`](Self::ln_value) in terms of `ell = |log x|`, for points
    /// beyond the range of `f64`.
    pub fn ln_value_at_ell(&self, ell: f64) -> f64 {
        // x^(-r3) at infinity and x^(r3) at zero are both exp(-r3·ell)
        self.ln_slowly_varying_at_ell(ell) - self.r3 * ell
    }

    /// `ln l` at `ell = |log x|`.
    pub fn ln_slowly_varying_at_ell(&self, ell: f64) -> f64 {
        self.r1.ln() + self.r2 * ell.sqrt() + self.r4 * ell.ln()
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.ln_value(x).map(f64::exp)
    }

    /// Slowly varying factor `l` (everything except the power), at `x`.
    pub fn slowly_varying(&self, x: f64) -> Result<f64> {
        let ell = self.ell(x)?;
        Ok(self.r1 * (self.r2 * ell.sqrt()).exp() * ell.powf(self.r4))
    }

    /// The same record with the prefactor multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.r1 * factor, self.r2, self.r3, self.r4, self.side, self.error_order)
    }
}

/// Open strip `(sigma, tau)` on which a Mellin transform converges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MellinStrip {
    pub sigma: f64,
    pub tau: f64,
}

impl MellinStrip {
    pub fn new(sigma: f64, tau: f64) -> Result<Self> {
        if !(sigma < tau) {
            return Err(Error::InvalidParameter {
                name: "strip",
                value: sigma,
                constraint: "sigma < tau",
            });
        }
        Ok(Self { sigma, tau })
    }

    pub fn contains(&self, z: f64) -> bool {
        self.sigma < z && z < self.tau
    }

    pub fn check(&self, rho: f64) -> Result<()> {
        if self.contains(rho) {
            Ok(())
        } else {
            Err(Error::Strip {
                sigma: self.sigma,
                rho,
                tau: self.tau,
            })
        }
    }

    /// Strip of `u ↦ U(1/u)`.
    pub fn reflected(&self) -> Self {
        Self {
            sigma: -self.tau,
            tau: -self.sigma,
        }
    }
}

/// A function whose Mellin transform is known in closed form on a strip.
pub trait MellinSource {
    fn strip(&self) -> MellinStrip;

    /// `MU(z)` for `z` inside the open strip.
    fn mellin(&self, z: f64) -> Result<f64>;
}

/// `u ↦ U(1/u)`, whose transform is `MU(-z)`.
#[derive(Debug, Clone, Copy)]
pub struct Reflected<'a, U: ?Sized>(pub &'a U);

impl<U: MellinSource + ?Sized> MellinSource for Reflected<'_, U> {
    fn strip(&self) -> MellinStrip {
        self.0.strip().reflected()
    }

    fn mellin(&self, z: f64) -> Result<f64> {
        self.0.mellin(-z)
    }
}

/// `MU(z)` by quadrature in the logarithmic variable. A NaN from `u` at
/// `x = 0` or `x = ∞` is read as a vanishing limit.
pub fn mellin_transform<U: Fn(f64) -> f64>(u: U, z: f64, tol: &Tolerance) -> Result<f64> {
    let integrand = |y: f64| {
        let (x, w) = (y.exp(), (-z * y).exp());
        if w == 0.0 {
            return 0.0;
        }
        let v = u(x);
        let endpoint = x == 0.0 || x.is_infinite();
        if v == 0.0 || (endpoint && v.is_nan()) {
            0.0
        } else {
            v * w
        }
    };
    let left = integrate(integrand, f64::NEG_INFINITY, 0.0, tol);
    let right = integrate(integrand, 0.0, f64::INFINITY, tol);
    match (left, right) {
        (Ok(l), Ok(r)) if (l + r).is_finite() => Ok(l + r),
        _ => Err(Error::Divergence { z }),
    }
}

/// `(f ⋆ g)(x)` by quadrature; breaks the line at `t = 1` and `t = x`.
pub fn mellin_convolve<F, G>(f: F, g: G, x: f64, tol: &Tolerance) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    mellin_convolve_with_breaks(f, g, x, &[], tol)
}

/// As [`mellin_convolve`], with extra breakpoints given in `log t`.
pub fn mellin_convolve_with_breaks<F, G>(f: F, g: G, x: f64, extra: &[f64], tol: &Tolerance) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if !(x > 0.0) {
        return Err(Error::domain("mellin_convolve", format!("x = {x} must be positive")));
    }
    let lx = x.ln();
    let mut points = vec![f64::NEG_INFINITY, 0.0, lx, f64::INFINITY];
    points.extend(extra.iter().copied().filter(|p| p.is_finite()));
    points.sort_by(f64::total_cmp);
    points.dedup();
    let integrand = |y: f64| {
        let gv = g(y.exp());
        if gv == 0.0 {
            return 0.0;
        }
        let fv = f((lx - y).exp());
        if fv == 0.0 {
            0.0
        } else {
            fv * gv
        }
    };
    let mut total = 0.0;
    for w in points.windows(2) {
        match integrate(integrand, w[0], w[1], tol) {
            Ok(v) => total += v,
            Err(Error::Convergence { .. }) => return Err(Error::Divergence { z: x }),
            Err(e) => return Err(e),
        }
    }
    if total.is_finite() {
        Ok(total)
    } else {
        Err(Error::Divergence { z: x })
    }
}

/// Large-`x` asymptote of `U ⋆ f` when `f(x) ~ x^ρ l(x)` with `ρ = -tail.r3`
/// inside the strip of `U`: the result is `MU(ρ) x^ρ l(x)`.
pub fn convolve_asymptote_infinity<U: MellinSource + ?Sized>(u: &U, tail: &TailAsymptote) -> Result<TailAsymptote> {
    if tail.side != Side::AtInfinity {
        return Err(Error::domain(
            "convolve_asymptote_infinity",
            "input asymptote must describe x → ∞",
        ));
    }
    let rho = -tail.r3;
    u.strip().check(rho)?;
    let m = u.mellin(rho)?;
    tail.scaled(m)
}

/// Small-`x` asymptote of `U ⋆ f` when `f(x) ~ x^ρ l(1/x)` with `ρ = tail.r3`,
/// obtained by reflecting both factors and applying the large-`x` result.
pub fn convolve_asymptote_zero<U: MellinSource + ?Sized>(u: &U, tail: &TailAsymptote) -> Result<TailAsymptote> {
    if tail.side != Side::AtZero {
        return Err(Error::domain("convolve_asymptote_zero", "input asymptote must describe x → 0"));
    }
    // f(1/y) ~ y^(-ρ) l(y) as y → ∞
    let reflected_tail = TailAsymptote {
        side: Side::AtInfinity,
        ..*tail
    };
    let out = convolve_asymptote_infinity(&Reflected(u), &reflected_tail)?;
    Ok(TailAsymptote {
        side: Side::AtZero,
        ..out
    })
}

/// Relative step used by [`zygmund_epsilon`].
pub const ZYGMUND_STEP: f64 = 1e-6;

/// `x l'(x) / l(x)` by a relative central difference.
pub fn zygmund_epsilon<L: Fn(f64) -> f64>(l: L, x: f64) -> Result<f64> {
    zygmund_epsilon_with_step(l, x, ZYGMUND_STEP)
}

pub fn zygmund_epsilon_with_step<L: Fn(f64) -> f64>(l: L, x: f64, step: f64) -> Result<f64> {
    let lx = l(x);
    if lx == 0.0 || !lx.is_finite() {
        return Err(Error::domain("zygmund_epsilon", format!("l({x}) = {lx}")));
    }
    let h = step * x;
    Ok(x * (l(x + h) - l(x - h)) / (2.0 * h * lx))
}

/// `l(λx)/l(x) - 1`.
pub fn slow_variation_remainder<L: Fn(f64) -> f64>(l: L, lambda: f64, x: f64) -> Result<f64> {
    let lx = l(x);
    if lx == 0.0 || !lx.is_finite() {
        return Err(Error::domain("slow_variation_remainder", format!("l({x}) = {lx}")));
    }
    Ok(l(lambda * x) / lx - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::rel(1e-11)
    }

    fn indicator(t: f64) -> f64 {
        if t > 0.0 && t < 1.0 {
            1.0
        } else {
            0.0
        }
    }

    #[test]
    fn transform_of_elementary_functions() {
        let v = mellin_transform(indicator, -2.0, &tol()).unwrap();
        assert!((v - 0.5).abs() < 1e-10);
        let v = mellin_transform(|t: f64| (-t).exp(), -1.0, &tol()).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        // MU(z) = Γ(-z) for U = e^{-t}
        let v = mellin_transform(|t: f64| (-t).exp(), -3.5, &tol()).unwrap();
        let g = crate::numerics::special::log_gamma(3.5).unwrap().exp();
        assert!((v / g - 1.0).abs() < 1e-9);
    }

    #[test]
    fn transform_divergence_is_reported() {
        let err = mellin_transform(|t: f64| (-t).exp(), 0.5, &Tolerance::rel(1e-10).with_max_iter(200)).unwrap_err();
        assert_eq!(err, Error::Divergence { z: 0.5 });
    }

    #[test]
    fn convolution_of_indicators() {
        let x = (-1.0f64).exp();
        let v = mellin_convolve(indicator, indicator, x, &tol()).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn convolution_of_exponentials_is_bessel_k0() {
        // ∫ e^{-x/t - t} dt/t = 2 K0(2√x)
        let v = mellin_convolve(|t: f64| (-t).exp(), |t: f64| (-t).exp(), 1.0, &tol()).unwrap();
        assert!((v - 2.0 * 0.113_893_872_749_533_435_7).abs() < 1e-10);
    }

    #[test]
    fn zygmund_and_remainder_of_log() {
        let x = 1e6f64;
        let e = zygmund_epsilon(f64::ln, x).unwrap();
        assert!((e - 1.0 / x.ln()).abs() < 1e-8);
        assert!(zygmund_epsilon(|_| 3.0, 5.0).unwrap().abs() < 1e-12);
        let r = slow_variation_remainder(f64::ln, 2.0, x).unwrap();
        assert!((r - 2f64.ln() / x.ln()).abs() < 1e-12);
        assert!(zygmund_epsilon(|_| 0.0, 5.0).is_err());
    }

    #[test]
    fn asymptote_evaluation_both_sides() {
        let a = TailAsymptote::new(2.0, 0.5, 3.0, -0.75, Side::AtInfinity, ErrorOrder::InvSqrtLog).unwrap();
        let x = 1e5f64;
        let l = x.ln();
        let want = 2.0 * x.powf(-3.0) * (0.5 * l.sqrt()).exp() * l.powf(-0.75);
        assert!((a.value(x).unwrap() / want - 1.0).abs() < 1e-13);
        assert!(a.value(0.5).is_err());
        let z = TailAsymptote { side: Side::AtZero, ..a };
        let want = 2.0 * (1.0 / x).powf(3.0) * (0.5 * l.sqrt()).exp() * l.powf(-0.75);
        assert!((z.value(1.0 / x).unwrap() / want - 1.0).abs() < 1e-12);
    }

    struct Unit;
    impl MellinSource for Unit {
        fn strip(&self) -> MellinStrip {
            MellinStrip::new(-10.0, 10.0).unwrap()
        }
        fn mellin(&self, _z: f64) -> Result<f64> {
            Ok(1.0)
        }
    }

    #[test]
    fn identity_prefactor_and_strip_check() {
        let tail = TailAsymptote::new(1.5, 0.3, 3.0, 0.0, Side::AtInfinity, ErrorOrder::InvSqrtLog).unwrap();
        assert_eq!(convolve_asymptote_infinity(&Unit, &tail).unwrap(), tail);
        let far = TailAsymptote { r3: 12.0, ..tail };
        assert!(matches!(convolve_asymptote_infinity(&Unit, &far), Err(Error::Strip { .. })));
        let zero = TailAsymptote { side: Side::AtZero, ..tail };
        assert_eq!(convolve_asymptote_zero(&Unit, &zero).unwrap(), zero);
    }
}
