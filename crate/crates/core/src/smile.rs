//! Black–Scholes pricing and inversion, wing call/put asymptotics and the
//! five-term implied-volatility expansions.
//!
//! Wing prices can be far below the smallest double (`e^(-1000)` at
//! `log K = 100`), so prices are carried as logarithms wherever the
//! asymptotic regime is involved.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kou::KouJumpParams;
use crate::mellin::{ErrorOrder, Side, TailAsymptote};
use crate::mixed::{MixedModel, Wing};
use crate::numerics::special::{erfcx, norm_cdf};
use crate::numerics::{find_root, Tolerance};

/// Default lower bound on `L` for the wing formulas.
pub const WING_GUARD: f64 = 4.0;

/// `μ = λ(q/(η2+1) - p/(η1-1))`, the drift that makes the Kou-mixed price a
/// martingale at zero rate.
pub fn risk_neutral_drift(params: &KouJumpParams) -> Result<f64> {
    params.risk_neutral_drift()
}

/// `ln C_BS(x0, K, T, σ)` at zero rate.
pub fn ln_bs_call(x0: f64, strike: f64, t: f64, sigma: f64) -> f64 {
    x0.ln() + ln_unit_call((strike / x0).ln(), sigma * t.sqrt())
}

/// `ln C_BS(1, e^k)` with total volatility `s = σ√T`; usable for any `k`
/// whose price is representable in logs.
pub fn ln_unit_call(k: f64, s: f64) -> f64 {
    if s == 0.0 {
        return (-k.exp_m1()).max(0.0).ln();
    }
    let d1 = (-k + 0.5 * s * s) / s;
    let d2 = d1 - s;
    if d1 < 0.0 {
        // Both terms share the factor e^(-d1²/2); what remains is a
        // difference of erfcx values, free of underflow.
        let diff = erfcx_diff(-d1 / SQRT_2, s / SQRT_2);
        -std::f64::consts::LN_2 - 0.5 * d1 * d1 + diff.ln()
    } else {
        (norm_cdf(d1) - k.exp() * norm_cdf(d2)).ln()
    }
}

/// `erfcx(a) - erfcx(a + gap)` for `a > 0`, `gap > 0`; past `a = 1e3` the
/// asymptotic series is differenced term by term to avoid cancellation.
fn erfcx_diff(a: f64, gap: f64) -> f64 {
    let b = a + gap;
    if a < 1e3 {
        return erfcx(a) - erfcx(b);
    }
    let (ia, ib) = (1.0 / a, 1.0 / b);
    let d2 = ia * ia + ia * ib + ib * ib;
    let d4 = ia.powi(4) + ia.powi(3) * ib + ia * ia * ib * ib + ia * ib.powi(3) + ib.powi(4);
    gap * ia * ib * (1.0 - 0.5 * d2 + 0.75 * d4) / PI.sqrt()
}

/// `ln P_BS(x0, K, T, σ)`; the zero-rate put equals the call with spot and
/// strike exchanged.
pub fn ln_bs_put(x0: f64, strike: f64, t: f64, sigma: f64) -> f64 {
    ln_bs_call(strike, x0, t, sigma)
}

pub fn bs_call(x0: f64, strike: f64, t: f64, sigma: f64) -> f64 {
    ln_bs_call(x0, strike, t, sigma).exp()
}

pub fn bs_put(x0: f64, strike: f64, t: f64, sigma: f64) -> f64 {
    ln_bs_put(x0, strike, t, sigma).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptionKind {
    Call,
    Put,
}

/// Volatility whose Black–Scholes price has logarithm `ln_price`.
pub fn bs_implied_vol_ln(ln_price: f64, x0: f64, strike: f64, t: f64, kind: OptionKind) -> Result<f64> {
    match kind {
        OptionKind::Call => unit_implied_vol_ln(ln_price - x0.ln(), (strike / x0).ln(), t),
        OptionKind::Put => unit_implied_vol_ln(ln_price - strike.ln(), (x0 / strike).ln(), t),
    }
}

/// Volatility whose call price `C_BS(1, e^k, T, σ)` has logarithm `ln_price`.
pub fn unit_implied_vol_ln(ln_price: f64, k: f64, t: f64) -> Result<f64> {
    let lower = (-k.exp_m1()).max(0.0);
    if !(ln_price < 0.0) || !(ln_price > lower.ln()) {
        return Err(Error::PriceBounds {
            price: ln_price.exp(),
            lower,
            upper: 1.0,
        });
    }
    let rt = t.sqrt();
    let f = |sigma: f64| ln_unit_call(k, sigma * rt) - ln_price;
    let lo = 1e-8;
    let mut hi = 10.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::PriceBounds {
                price: ln_price.exp(),
                lower,
                upper: 1.0,
            });
        }
    }
    let lo = if f(lo) > 0.0 { f64::MIN_POSITIVE } else { lo };
    find_root(f, lo, hi, &Tolerance::rel(1e-15).with_abs(1e-16))
}

/// Black–Scholes implied volatility of a call price, inverted on the
/// out-of-the-money side (through put-call parity when `K < x0`).
pub fn bs_implied_vol(price: f64, x0: f64, strike: f64, t: f64) -> Result<f64> {
    let intrinsic = (x0 - strike).max(0.0);
    if !(price > intrinsic && price < x0) {
        return Err(Error::PriceBounds {
            price,
            lower: intrinsic,
            upper: x0,
        });
    }
    if strike >= x0 {
        bs_implied_vol_ln(price.ln(), x0, strike, t, OptionKind::Call)
    } else {
        bs_implied_vol_ln((price - intrinsic).ln(), x0, strike, t, OptionKind::Put)
    }
}

/// Black–Scholes implied volatility of a put price.
pub fn bs_implied_vol_put(price: f64, x0: f64, strike: f64, t: f64) -> Result<f64> {
    bs_implied_vol_ln(price.ln(), x0, strike, t, OptionKind::Put)
}

fn wing_log(x0: f64, strike: f64, guard: f64, large: bool) -> Result<f64> {
    if !(strike > 0.0) {
        return Err(Error::domain("wing", format!("strike {strike} must be positive")));
    }
    let l = if large { (strike / x0).ln() } else { (x0 / strike).ln() };
    if !(l >= guard) {
        return Err(Error::regime(format!(
            "{} wing needs log-moneyness >= {guard}, got {l}",
            if large { "large" } else { "small" }
        )));
    }
    Ok(l)
}

/// Large-strike density tail rescaled to `x0 = 1`: `r1 ↦ r1 x0^(1-r3)`.
pub fn normalized_large_tail(tail: &TailAsymptote, x0: f64) -> Result<TailAsymptote> {
    if tail.side != Side::AtInfinity {
        return Err(Error::domain("normalized_large_tail", "tail must describe x → ∞"));
    }
    Ok(TailAsymptote {
        r1: tail.r1 * x0.powf(1.0 - tail.r3),
        ..*tail
    })
}

/// Small-strike density tail `s1 x^ζ ...` turned into the large-strike tail
/// of `x^(-3) D(1/x)` at `x0 = 1`: exponent `ζ + 3 = s3 + 2`, `s1 ↦ s1 x0^(ζ+1)`.
pub fn reflected_small_tail(tail: &TailAsymptote, x0: f64) -> Result<TailAsymptote> {
    if tail.side != Side::AtZero {
        return Err(Error::domain("reflected_small_tail", "tail must describe x → 0"));
    }
    Ok(TailAsymptote {
        r1: tail.r1 * x0.powf(tail.r3 + 1.0),
        r3: tail.r3 + 3.0,
        side: Side::AtInfinity,
        ..*tail
    })
}

fn ln_call_normalized(tail: &TailAsymptote, l: f64) -> Result<f64> {
    let r3 = tail.r3;
    if !(r3 > 2.0) {
        return Err(Error::InfinitePrice { r3 });
    }
    Ok(tail.r1.ln() - ((r3 - 1.0) * (r3 - 2.0)).ln() + tail.r4 * l.ln() + tail.r2 * l.sqrt() + (2.0 - r3) * l)
}

/// `ln C(K)` from the leading term of a large-strike density tail:
/// `C ~ x0 r1' L^r4 e^(r2√L) (K/x0)^(2-r3) / ((r3-1)(r3-2))`, `L = log(K/x0)`.
pub fn ln_call_asymptote(tail: &TailAsymptote, strike: f64, x0: f64) -> Result<f64> {
    let l = wing_log(x0, strike, WING_GUARD, true)?;
    Ok(x0.ln() + ln_call_normalized(&normalized_large_tail(tail, x0)?, l)?)
}

pub fn call_asymptote(tail: &TailAsymptote, strike: f64, x0: f64) -> Result<f64> {
    ln_call_asymptote(tail, strike, x0).map(f64::exp)
}

/// `ln P(K)` from the leading term of a small-strike density tail:
/// `P ~ x0 s1' L^s4 e^(s2√L) (K/x0)^(s3+1) / (s3(s3+1))`, `L = log(x0/K)`.
pub fn ln_put_asymptote(tail: &TailAsymptote, strike: f64, x0: f64) -> Result<f64> {
    let l = wing_log(x0, strike, WING_GUARD, false)?;
    let g = reflected_small_tail(tail, x0)?;
    // P(K) = K·G(1/K) at x0 = 1
    Ok(x0.ln() + ln_call_normalized(&g, l)? - l)
}

pub fn put_asymptote(tail: &TailAsymptote, strike: f64, x0: f64) -> Result<f64> {
    ln_put_asymptote(tail, strike, x0).map(f64::exp)
}

/// Five-term implied-volatility expansion in one wing:
/// `c_lead √L + c_const + c_llog log L/√L + c_inv/√L + c_llog2 log L/L + O(1/L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmileExpansion {
    pub wing: Wing,
    pub c_lead: f64,
    pub c_const: f64,
    pub c_llog: f64,
    pub c_inv: f64,
    pub c_llog2: f64,
    pub error_order: ErrorOrder,
    /// Large-strike tail at `x0 = 1` that generates the expansion (for the
    /// small wing, the tail of the reflected law).
    pub tail: TailAsymptote,
    pub x0: f64,
    pub t: f64,
    pub guard: f64,
}

impl SmileExpansion {
    /// Coefficients for a large-strike tail already rescaled to `x0 = 1`.
    pub fn from_normalized_tail(tail: TailAsymptote, wing: Wing, x0: f64, t: f64) -> Result<Self> {
        let (r1, r2, r3, r4) = (tail.r1, tail.r2, tail.r3, tail.r4);
        if !(r3 > 2.0) {
            return Err(Error::InfinitePrice { r3 });
        }
        let (u, v) = ((r3 - 1.0).sqrt(), (r3 - 2.0).sqrt());
        let rt = (2.0 * t).sqrt();
        let inv_diff = 1.0 / v - 1.0 / u;
        let inv_diff3 = (r3 - 2.0).powf(-1.5) - (r3 - 1.0).powf(-1.5);
        let out = Self {
            wing,
            c_lead: SQRT_2 / t.sqrt() * (u - v),
            c_const: r2 / rt * inv_diff,
            c_llog: (2.0 * r4 + 1.0) / (2.0 * rt) * inv_diff,
            c_inv: -inv_diff * (u * v * (u - v) / (2.0 * PI.sqrt() * r1)).ln() / rt + r2 * r2 / (4.0 * rt) * inv_diff3,
            c_llog2: r2 * (2.0 * r4 + 1.0) / (4.0 * rt) * inv_diff3,
            error_order: ErrorOrder::InvLog,
            tail,
            x0,
            t,
            guard: WING_GUARD,
        };
        let coefs = [out.c_lead, out.c_const, out.c_llog, out.c_inv, out.c_llog2];
        if !coefs.iter().all(|c| c.is_finite()) || !(out.c_lead > 0.0) {
            return Err(Error::domain("smile_expansion", format!("non-finite coefficients {coefs:?}")));
        }
        Ok(out)
    }

    /// Expansion for large strikes from a density tail in model units.
    pub fn large(tail: &TailAsymptote, x0: f64, t: f64) -> Result<Self> {
        Self::from_normalized_tail(normalized_large_tail(tail, x0)?, Wing::Large, x0, t)
    }

    /// Expansion for small strikes from a density tail at zero in model units.
    pub fn small(tail: &TailAsymptote, x0: f64, t: f64) -> Result<Self> {
        Self::from_normalized_tail(reflected_small_tail(tail, x0)?, Wing::Small, x0, t)
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    /// `L = log(K/x0)` (large wing) or `log(x0/K)` (small wing), guarded.
    pub fn log_moneyness(&self, strike: f64) -> Result<f64> {
        wing_log(self.x0, strike, self.guard, self.wing == Wing::Large)
    }

    /// The expansion evaluated at `L`.
    pub fn at(&self, l: f64) -> f64 {
        let (sl, ll) = (l.sqrt(), l.ln());
        self.c_lead * sl + self.c_const + self.c_llog * ll / sl + self.c_inv / sl + self.c_llog2 * ll / l
    }

    /// Leading-term price in the wing at `L`, as a logarithm: the call price
    /// for the large wing, the put price for the small wing.
    pub fn ln_price_at(&self, l: f64) -> Result<f64> {
        let ln_g = ln_call_normalized(&self.tail, l)?;
        Ok(self.x0.ln()
            + match self.wing {
                Wing::Large => ln_g,
                Wing::Small => ln_g - l,
            })
    }

    /// Implied volatility of the leading-term price at `L`, by exact
    /// Black–Scholes inversion.
    pub fn implied_vol_of_asymptotic_price(&self, l: f64) -> Result<f64> {
        // The small wing is priced as the reflected call G(1/k) = P(k)/k,
        // which has the same implied volatility.
        unit_implied_vol_ln(ln_call_normalized(&self.tail, l)?, l, self.t)
    }
}

/// `σ(K) ≈ c_lead √L + ...` at a strike on the expansion's wing.
pub fn implied_vol_approx(expansion: &SmileExpansion, strike: f64) -> Result<f64> {
    Ok(expansion.at(expansion.log_moneyness(strike)?))
}

fn require_martingale_drift(model: &MixedModel) -> Result<()> {
    let mu = model.jumps.martingale_drift()?;
    let have = model.heston.params.mu;
    if (have - mu).abs() > 1e-12 * mu.abs().max(1.0) {
        return Err(Error::NoArbitrage {
            detail: format!("drift {have} differs from the martingale drift {mu}"),
        });
    }
    Ok(())
}

/// Expansion of the mixed model's smile in one wing, with the tail
/// constants selected by the dominant component.
pub fn smile_expansion(model: &MixedModel, wing: Wing) -> Result<SmileExpansion> {
    require_martingale_drift(model)?;
    let p = &model.heston.params;
    match wing {
        Wing::Large => SmileExpansion::large(&model.tail_asymptote()?.asymptote, p.x0, p.t),
        Wing::Small => SmileExpansion::small(&model.zero_asymptote()?.asymptote, p.x0, p.t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heston::HestonParams;
    use crate::mellin::ErrorOrder;

    fn tail(r1: f64, r2: f64, r3: f64, r4: f64) -> TailAsymptote {
        TailAsymptote {
            r1,
            r2,
            r3,
            r4,
            side: Side::AtInfinity,
            error_order: ErrorOrder::InvSqrtLog,
        }
    }

    #[test]
    fn black_scholes_values() {
        let c = bs_call(1.0, 1.0, 1.0, 0.2);
        let expect = 2.0 * norm_cdf(0.1) - 1.0;
        assert!((c - expect).abs() < 1e-15);
        assert!((c - 0.079_655_674_554_057_9).abs() < 1e-12);
        assert_eq!(bs_call(1.0, 0.7, 1.0, 0.0), 1.0 - 0.7);
        assert!(bs_call(1.0, 0.7, 1.0, 1e-9) - 0.3 < 1e-15);
        let (k, s) = (1.3, 0.35);
        assert!((bs_call(1.0, k, 2.0, s) - bs_put(1.0, k, 2.0, s) - (1.0 - k)).abs() < 1e-15);
    }

    #[test]
    fn log_price_is_accurate_far_out() {
        let (k, s) = (3.0f64, 0.4);
        let d1 = (-k.ln() + 0.5 * s * s) / s;
        let direct = norm_cdf(d1) - k * norm_cdf(d1 - s);
        assert!((ln_bs_call(1.0, k, 1.0, s) - direct.ln()).abs() < 1e-12);
        let deep = ln_bs_call(1.0, 1e40, 1.0, 0.5);
        assert!(deep.is_finite() && deep < -700.0);
        let v = bs_implied_vol_ln(deep, 1.0, 1e40, 1.0, OptionKind::Call).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn implied_vol_round_trip() {
        for s in [0.05, 0.2, 0.7, 2.0] {
            for k in [0.5, 0.9, 1.0, 1.2, 2.0] {
                let v = bs_implied_vol(bs_call(1.0, k, 1.0, s), 1.0, k, 1.0);
                if k >= 1.0 || s >= 0.2 {
                    assert!((v.unwrap() - s).abs() < 1e-10, "{s} {k}");
                }
                let v = bs_implied_vol_put(bs_put(1.0, k, 1.0, s), 1.0, k, 1.0);
                if k <= 1.0 || s >= 0.2 {
                    assert!((v.unwrap() - s).abs() < 1e-10, "put {s} {k}");
                }
            }
        }
        assert!(matches!(bs_implied_vol(1.2, 1.0, 1.0, 1.0), Err(Error::PriceBounds { .. })));
        assert!(matches!(bs_implied_vol(0.1, 1.0, 0.8, 1.0), Err(Error::PriceBounds { .. })));
    }

    #[test]
    fn call_asymptote_substitution_and_scaling() {
        let a = tail(1.0, 0.0, 3.0, 0.0);
        let k = 1e5;
        assert!((call_asymptote(&a, k, 1.0).unwrap() - 0.5 / k).abs() < 1e-18);
        let b = tail(3.0, 0.0, 3.0, 0.0);
        assert!((call_asymptote(&b, k, 1.0).unwrap() / call_asymptote(&a, k, 1.0).unwrap() - 3.0).abs() < 1e-14);
        assert!(matches!(call_asymptote(&tail(1.0, 0.0, 2.0, 0.0), k, 1.0), Err(Error::InfinitePrice { .. })));
        assert!(matches!(call_asymptote(&a, 10.0, 1.0), Err(Error::Regime { .. })));
    }

    #[test]
    fn leading_coefficient_and_lee_bound() {
        let e = SmileExpansion::large(&tail(1.0, 0.0, 3.0, 0.0), 1.0, 1.0).unwrap();
        assert!((e.c_lead - SQRT_2 * (SQRT_2 - 1.0)).abs() < 1e-15);
        assert_eq!((e.c_const, e.c_llog2), (0.0, 0.0));
        let mut prev = f64::INFINITY;
        for r3 in [2.01, 2.5, 3.0, 5.0, 10.0, 50.0, 1e3] {
            let c = SmileExpansion::large(&tail(1.0, 1.0, r3, -0.75), 1.0, 2.0).unwrap().c_lead;
            let scaled = c * 2f64.sqrt() / SQRT_2;
            assert!(scaled > 0.0 && scaled < 1.0 && c < prev);
            prev = c;
        }
    }

    #[test]
    fn small_wing_matches_stated_formula() {
        let zero = TailAsymptote {
            r1: 0.7,
            r2: 1.3,
            r3: 2.5,
            r4: -0.75,
            side: Side::AtZero,
            error_order: ErrorOrder::InvSqrtLog,
        };
        let t = 0.8;
        let e = SmileExpansion::small(&zero, 1.0, t).unwrap();
        let (s1, s2, s3, s4) = (0.7, 1.3, 3.5, -0.75);
        let (u, v) = ((s3 + 1.0f64).sqrt(), s3.sqrt());
        let rt = (2.0 * t).sqrt();
        let d3 = s3.powf(-1.5) - (s3 + 1.0).powf(-1.5);
        let expect = [
            SQRT_2 / t.sqrt() * (u - v),
            s2 / rt * (1.0 / v - 1.0 / u),
            (2.0 * s4 + 1.0) / (2.0 * rt) * (1.0 / v - 1.0 / u),
            -(1.0 / v - 1.0 / u) * (u * v * (u - v) / (2.0 * PI.sqrt() * s1)).ln() / rt + s2 * s2 / (4.0 * rt) * d3,
            s2 * (2.0 * s4 + 1.0) / (4.0 * rt) * d3,
        ];
        let got = [e.c_lead, e.c_const, e.c_llog, e.c_inv, e.c_llog2];
        for (a, b) in got.iter().zip(expect) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300), "{got:?} {expect:?}");
        }
    }

    #[test]
    fn reflected_call_and_put_share_implied_vol() {
        let zero = TailAsymptote {
            r1: 0.7,
            r2: 1.3,
            r3: 2.5,
            r4: -0.75,
            side: Side::AtZero,
            error_order: ErrorOrder::InvSqrtLog,
        };
        let x0 = 1.7;
        let e = SmileExpansion::small(&zero, x0, 1.0).unwrap();
        for l in [5.0f64, 20.0] {
            let k = x0 * (-l).exp();
            let ln_p = ln_put_asymptote(&zero, k, x0).unwrap();
            assert!((ln_p - e.ln_price_at(l).unwrap()).abs() < 1e-12);
            let via_put = bs_implied_vol_ln(ln_p, x0, k, 1.0, OptionKind::Put).unwrap();
            let via_call = e.implied_vol_of_asymptotic_price(l).unwrap();
            assert!((via_put - via_call).abs() < 1e-10);
        }
    }

    #[test]
    fn expansion_tracks_inverted_asymptotic_price() {
        let e = SmileExpansion::large(&tail(2.0, 1.5, 4.0, -0.75), 1.0, 1.0).unwrap();
        let res = |l: f64| (e.implied_vol_of_asymptotic_price(l).unwrap() - e.at(l)).abs() * l;
        let lo = res(10.0).max(res(20.0)).max(res(30.0));
        let hi = res(50.0).max(res(75.0)).max(res(100.0));
        assert!(hi < 3.0 * lo.max(1e-3), "{lo} {hi}");
    }

    #[test]
    fn model_expansion_requires_martingale_drift() {
        let j = KouJumpParams {
            lambda: 1.0,
            eta1: 4.0,
            eta2: 3.0,
            p: 0.5,
            q: 0.5,
            t: 1.0,
        };
        let m = MixedModel::kou(HestonParams::REFERENCE, j).unwrap();
        assert!(matches!(smile_expansion(&m, Wing::Large), Err(Error::NoArbitrage { .. })));
        let m = m.with_martingale_drift().unwrap();
        let e = smile_expansion(&m, Wing::Large).unwrap();
        assert!((e.c_lead - SQRT_2 * (4f64.sqrt() - 3f64.sqrt())).abs() < 1e-12);
        let s = smile_expansion(&m, Wing::Small).unwrap();
        assert_eq!(s.wing, Wing::Small);
        assert!((s.tail.r3 - 5.0).abs() < 1e-12);
    }

    #[test]
    fn unit_call_at_tiny_volatility() {
        for (k, s) in [(30.0, 1e-8), (0.5, 1e-9), (45.0, 0.05)] {
            let v = ln_unit_call(k, s);
            assert!(v.is_finite() && v < 0.0, "k={k} s={s}: {v}");
        }
        // large-argument branch against the direct difference near the switch
        let (a, b) = (1e3, 1e3 + 0.7);
        let direct = erfcx(a) - erfcx(b);
        assert!((erfcx_diff(a, b - a) - direct).abs() < 1e-9 * direct);
        let back = unit_implied_vol_ln(ln_unit_call(45.0, 0.05), 45.0, 1.0).unwrap();
        assert!((back - 0.05).abs() < 1e-10);
    }

    #[test]
    fn residual_matches_high_precision_inversion() {
        // residual·L from a 60-digit inversion of the leading-term price
        let tail = TailAsymptote {
            r1: 1.3,
            r2: 2.0,
            r3: 5.0,
            r4: -0.75,
            side: Side::AtInfinity,
            error_order: ErrorOrder::InvSqrtLog,
        };
        let e = SmileExpansion::large(&tail, 1.0, 1.0).unwrap();
        for (l, expect) in [(30.0, 0.05115), (100.0, 0.05079), (1000.0, 0.05135)] {
            let res = (e.implied_vol_of_asymptotic_price(l).unwrap() - e.at(l)) * l;
            assert!((res - expect).abs() < 2e-4, "L={l}: {res}");
        }
    }
}
