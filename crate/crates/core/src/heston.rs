//! Heston diffusion component: moment explosion, critical moments, tail
//! constants, wing asymptotes and transforms of the log-price.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mellin::{ErrorOrder, MellinSource, MellinStrip, Side, TailAsymptote};
use crate::numerics::{find_root, Jet, Tolerance};

/// `dX = μX dt + √Y X dW`, `dY = (a - bY) dt + c√Y dZ`, `d<W,Z> = ρ dt`,
/// observed at horizon `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HestonParams {
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub rho: f64,
    pub x0: f64,
    pub y0: f64,
    pub t: f64,
}

impl HestonParams {
    /// Parameters used throughout the test-suite and the CLI examples.
    pub const REFERENCE: HestonParams = HestonParams {
        mu: 0.0,
        a: 1.0,
        b: 2.0,
        c: 0.5,
        rho: -0.3,
        x0: 1.0,
        y0: 0.04,
        t: 1.0,
    };

    /// Checks every invariant. Positive correlation is rejected because the
    /// tail formulas are only established for `-1 < ρ ≤ 0`.
    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64, bool, &'static str); 8] = [
            ("mu", self.mu, self.mu.is_finite(), "finite"),
            ("a", self.a, self.a >= 0.0 && self.a.is_finite(), "a >= 0"),
            ("b", self.b, self.b >= 0.0 && self.b.is_finite(), "b >= 0"),
            ("c", self.c, self.c > 0.0 && self.c.is_finite(), "c > 0"),
            (
                "rho",
                self.rho,
                self.rho > -1.0 && self.rho <= 0.0,
                "-1 < rho <= 0 (tail formulas unproven for rho > 0)",
            ),
            ("x0", self.x0, self.x0 > 0.0 && self.x0.is_finite(), "x0 > 0"),
            ("y0", self.y0, self.y0 > 0.0 && self.y0.is_finite(), "y0 > 0"),
            ("t", self.t, self.t > 0.0 && self.t.is_finite(), "t > 0"),
        ];
        for (name, value, ok, constraint) in checks {
            if !ok {
                return Err(Error::InvalidParameter { name, value, constraint });
            }
        }
        Ok(())
    }

    /// `x0 · e^(μt)`, the mean of the terminal price.
    pub fn forward(&self) -> f64 {
        self.x0 * (self.mu * self.t).exp()
    }

    pub fn with_horizon(&self, t: f64) -> Self {
        Self { t, ..*self }
    }

    fn beta(&self, s: f64) -> f64 {
        self.c * self.rho * s - self.b
    }

    fn discriminant(&self, s: f64) -> f64 {
        let beta = self.beta(s);
        beta * beta - self.c * self.c * (s * s - s)
    }
}

/// Branch of the closed-form explosion time that applies at a given order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplosionBranch {
    Never,
    Logarithmic,
    Arctangent,
}

/// Classifies `s` by the sign of the Riccati discriminant and of `β(s)`.
pub fn explosion_branch(params: &HestonParams, s: f64) -> ExplosionBranch {
    if (0.0..=1.0).contains(&s) {
        return ExplosionBranch::Never;
    }
    let delta = params.discriminant(s);
    if delta >= 0.0 {
        if params.beta(s) <= 0.0 {
            ExplosionBranch::Never
        } else {
            ExplosionBranch::Logarithmic
        }
    } else {
        ExplosionBranch::Arctangent
    }
}

fn explosion_time_jet(p: &HestonParams, s: Jet) -> Jet {
    let beta = s * (p.c * p.rho) - p.b;
    let delta = beta * beta - (s * s - s) * (p.c * p.c);
    match explosion_branch(p, s.v) {
        ExplosionBranch::Never => Jet::constant(f64::INFINITY),
        ExplosionBranch::Logarithmic => {
            if delta.v == 0.0 {
                return Jet::constant(2.0) / beta;
            }
            let g = delta.sqrt();
            ((beta + g) / (beta - g)).ln() / g
        }
        ExplosionBranch::Arctangent => {
            let w = (-delta).sqrt();
            // atan(w/β) + π·1{β<0}, written to stay smooth through β = 0
            let angle = Jet::constant(FRAC_PI_2) - (beta / w).atan();
            Jet::constant(2.0) * angle / w
        }
    }
}

/// `T*(s)`: the horizon at which the moment of order `s` first becomes infinite.
pub fn explosion_time(params: &HestonParams, s: f64) -> f64 {
    explosion_time_jet(params, Jet::constant(s)).v
}

/// `(T*(s), T*'(s), T*''(s))` by forward-mode differentiation.
pub fn explosion_time_derivatives(params: &HestonParams, s: f64) -> (f64, f64, f64) {
    let j = explosion_time_jet(params, Jet::variable(s));
    (j.v, j.d1, j.d2)
}

/// Critical moments, slopes and curvatures at a fixed horizon.
///
/// Both slopes are reported as positive numbers: `σ₊ = -T*'(s₊)` and
/// `σ₋ = T*'(s₋)` (the explosion time rises towards `s = 0` from the left).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalMoments {
    pub s_plus: f64,
    pub s_minus: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    pub t: f64,
}

fn search_critical(params: &HestonParams, upward: bool) -> Result<f64> {
    let t = params.t;
    let sign = if upward { 1.0 } else { -1.0 };
    let near = if upward { 1.0 + 1e-9 } else { -1e-9 };
    let mut far = if upward { 2.0 } else { -1.0 };
    let mut steps = 0;
    while explosion_time(params, far) >= t {
        far = near + 2.0 * (far - near);
        steps += 1;
        if steps > 200 || !far.is_finite() {
            return Err(Error::CriticalMomentSearch {
                detail: format!(
                    "no order with explosion time below t = {t} found {} s = {near}",
                    if upward { "above" } else { "below" }
                ),
            });
        }
    }
    let tol = Tolerance::rel(1e-15).with_abs(1e-15).with_max_iter(500);
    let (lo, hi) = if upward { (near, far) } else { (far, near) };
    find_root(|s| explosion_time(params, s) - t, lo, hi, &tol).map_err(|e| Error::CriticalMomentSearch {
        detail: format!("{} root search on [{lo}, {hi}] failed: {e}", if sign > 0.0 { "upper" } else { "lower" }),
    })
}

/// Solves `T*(s) = t` on both sides of `[0, 1]`.
pub fn critical_moments(params: &HestonParams) -> Result<CriticalMoments> {
    params.validate()?;
    let s_plus = search_critical(params, true)?;
    let s_minus = search_critical(params, false)?;
    let (_, d1p, d2p) = explosion_time_derivatives(params, s_plus);
    let (_, d1m, d2m) = explosion_time_derivatives(params, s_minus);
    Ok(CriticalMoments {
        s_plus,
        s_minus,
        sigma_plus: -d1p,
        sigma_minus: d1m,
        kappa_plus: d2p,
        kappa_minus: d2m,
        t: params.t,
    })
}

/// Constants of the two wing asymptotes of the Heston density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct HestonTailConstants {
    pub A1: f64,
    pub A2: f64,
    pub A3: f64,
    pub A1t: f64,
    pub A2t: f64,
    pub A3t: f64,
    pub B1: f64,
    pub B1t: f64,
    /// The radicand in the `A1` bracket was negative and the sine form was used.
    pub sin_continuation_plus: bool,
    /// Same, for `Ã1`.
    pub sin_continuation_minus: bool,
}

/// `ln A1` (or `ln Ã1`) at a critical moment `s` with slope `sigma` and curvature `kappa`.
fn ln_prefactor(p: &HestonParams, s: f64, sigma: f64, kappa: f64) -> Result<(f64, bool)> {
    let c2 = p.c * p.c;
    let e = p.a / c2;
    let beta = p.beta(s);
    let radicand = (p.b - p.c * p.rho * s).powi(2) + c2 * (s - s * s);
    let (ratio, continued) = if radicand > 0.0 {
        let r = radicand.sqrt();
        (2.0 * r / (0.5 * p.t * r).sinh(), false)
    } else if radicand < 0.0 {
        let r = (-radicand).sqrt();
        (2.0 * r / (0.5 * p.t * r).sin(), true)
    } else {
        (4.0 / p.t, false)
    };
    let bracket = ratio / (c2 * s * (s - 1.0));
    if !(bracket > 0.0) || !(sigma > 0.0) {
        return Err(Error::domain(
            "tail_constants",
            format!("non-positive bracket {bracket:e} or slope {sigma:e} at s = {s}"),
        ));
    }
    let ln = -0.5 * PI.ln() + (-0.75 - e) * 2f64.ln() + (0.25 - e) * p.y0.ln() + (2.0 * e - 0.5) * p.c.ln()
        - (e + 0.25) * sigma.ln()
        - p.y0 * (beta / c2 + kappa / (c2 * sigma * sigma))
        - e * p.t * beta
        + 2.0 * e * bracket.ln();
    Ok((ln, continued))
}

/// All eight constants of the Heston wing asymptotes.
///
/// `B1 = A1·m^(A3-1)` and `B̃1 = Ã1·m^(-Ã3-1)` with `m = x0·e^(μt)`: the
/// density of `m·Z` is `D_Z(x/m)/m`, and the shift `log x - log m` is
/// absorbed in the `(log x)^(-1/2)` error term.
pub fn tail_constants(params: &HestonParams, cm: &CriticalMoments) -> Result<HestonTailConstants> {
    params.validate()?;
    let (ln_a1, cont_p) = ln_prefactor(params, cm.s_plus, cm.sigma_plus, cm.kappa_plus)?;
    let (ln_a1t, cont_m) = ln_prefactor(params, cm.s_minus, cm.sigma_minus, cm.kappa_minus)?;
    let root = 2.0 * (2.0 * params.y0).sqrt() / params.c;
    let a3 = cm.s_plus + 1.0;
    let a3t = -(cm.s_minus + 1.0);
    let ln_m = params.x0.ln() + params.mu * params.t;
    Ok(HestonTailConstants {
        A1: ln_a1.exp(),
        A2: root / cm.sigma_plus.sqrt(),
        A3: a3,
        A1t: ln_a1t.exp(),
        A2t: root / cm.sigma_minus.sqrt(),
        A3t: a3t,
        B1: (ln_a1 + (a3 - 1.0) * ln_m).exp(),
        B1t: (ln_a1t - (a3t + 1.0) * ln_m).exp(),
        sin_continuation_plus: cont_p,
        sin_continuation_minus: cont_m,
    })
}

/// `log E[X_t^s]` in closed form; errors outside the open critical interval.
pub fn ln_mgf(params: &HestonParams, s: f64) -> Result<f64> {
    params.validate()?;
    let p = params;
    let explode = || Error::MomentExplosion {
        order: s,
        detail: format!("explosion time {} does not exceed t = {}", explosion_time(p, s), p.t),
    };
    if explosion_time(p, s) <= p.t {
        return Err(explode());
    }
    let c2 = p.c * p.c;
    let beta = p.beta(s);
    let delta = p.discriminant(s);
    let k = 0.5 * s * (s - 1.0);
    let half = 0.5 * p.t;
    // ln(C - βS) and S/(C - βS) where C = cosh(Γt/2), S = sinh(Γt/2)/Γ
    let (ln_den, ratio) = if delta > 0.0 {
        let g = delta.sqrt();
        let x = g * half;
        let e2 = (-2.0 * x).exp();
        let inner = (1.0 - beta / g) + e2 * (1.0 + beta / g);
        if !(inner > 0.0) {
            return Err(explode());
        }
        (x - 2f64.ln() + inner.ln(), (1.0 - e2) / (g * inner))
    } else if delta < 0.0 {
        let w = (-delta).sqrt();
        let x = w * half;
        let den = x.cos() - beta * x.sin() / w;
        if !(den > 0.0) {
            return Err(explode());
        }
        (den.ln(), x.sin() / (w * den))
    } else {
        let den = 1.0 - beta * half;
        if !(den > 0.0) {
            return Err(explode());
        }
        (den.ln(), half / den)
    };
    let psi = 2.0 * k * ratio;
    let a_term = -(2.0 * p.a / c2) * ln_den - p.a * beta * p.t / c2;
    Ok(s * (p.x0.ln() + p.mu * p.t) + a_term + p.y0 * psi)
}

/// `E[X_t^s]`, the moment of order `s` of the Heston density.
pub fn mgf(params: &HestonParams, s: f64) -> Result<f64> {
    ln_mgf(params, s).map(f64::exp)
}

/// `log E[exp(i u log X_t)]` for complex `u`, in the branch-stable form.
///
/// Real `u` gives the characteristic function; `u = v - iα` tilts it by
/// `e^(α log X)`, which is finite for `α` inside the critical interval.
pub fn log_cf(params: &HestonParams, u: Complex64) -> Complex64 {
    let p = params;
    let i = Complex64::i();
    let iu = i * u;
    let c2 = p.c * p.c;
    let kappa = p.b - p.rho * p.c * iu;
    let d = (kappa * kappa + c2 * (iu + u * u)).sqrt();
    let d = if d.re < 0.0 { -d } else { d };
    let minus = kappa - d;
    let g = minus / (kappa + d);
    let edt = (-d * p.t).exp();
    let one = Complex64::new(1.0, 0.0);
    let big_c = (p.a / c2) * (minus * p.t - 2.0 * ((one - g * edt) / (one - g)).ln());
    let big_d = (minus / c2) * (one - edt) / (one - g * edt);
    iu * (p.x0.ln() + p.mu * p.t) + big_c + big_d * p.y0
}

/// The Heston component with its derived constants, computed once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HestonModel {
    pub params: HestonParams,
    pub moments: CriticalMoments,
    pub constants: HestonTailConstants,
}

impl HestonModel {
    pub fn new(params: HestonParams) -> Result<Self> {
        let moments = critical_moments(&params)?;
        let constants = tail_constants(&params, &moments)?;
        Ok(Self {
            params,
            moments,
            constants,
        })
    }

    /// `(log x)` exponent shared by both wings: `-3/4 + a/c²`.
    pub fn log_power(&self) -> f64 {
        -0.75 + self.params.a / (self.params.c * self.params.c)
    }

    /// Large-`x` asymptote `B1 x^(-A3) e^(A2 √log x) (log x)^(-3/4 + a/c²)`.
    pub fn tail_asymptote(&self) -> TailAsymptote {
        let k = &self.constants;
        TailAsymptote {
            r1: k.B1,
            r2: k.A2,
            r3: k.A3,
            r4: self.log_power(),
            side: Side::AtInfinity,
            error_order: ErrorOrder::InvSqrtLog,
        }
    }

    /// Small-`x` asymptote `B̃1 x^(Ã3) e^(Ã2 √log(1/x)) (log 1/x)^(-3/4 + a/c²)`.
    pub fn zero_asymptote(&self) -> TailAsymptote {
        let k = &self.constants;
        TailAsymptote {
            r1: k.B1t,
            r2: k.A2t,
            r3: k.A3t,
            r4: self.log_power(),
            side: Side::AtZero,
            error_order: ErrorOrder::InvSqrtLog,
        }
    }

    /// Leading term of the density as `x → ∞`; requires `x > max(m, e)`.
    pub fn density_tail(&self, x: f64) -> Result<f64> {
        let guard = self.params.forward().max(std::f64::consts::E);
        if !(x > guard) {
            return Err(Error::regime(format!("density_tail needs x > {guard}, got {x}")));
        }
        self.tail_asymptote().value(x)
    }

    /// Leading term of the density as `x → 0`; requires `x < min(m, 1/e)`.
    pub fn density_zero(&self, x: f64) -> Result<f64> {
        let guard = self.params.forward().min(1.0 / std::f64::consts::E);
        if !(x > 0.0 && x < guard) {
            return Err(Error::regime(format!("density_zero needs 0 < x < {guard}, got {x}")));
        }
        self.zero_asymptote().value(x)
    }

    pub fn mgf(&self, s: f64) -> Result<f64> {
        mgf(&self.params, s)
    }
}

impl MellinSource for HestonModel {
    /// `(-A3, Ã3)`: the transform at `z` is the moment of order `-z-1`.
    fn strip(&self) -> MellinStrip {
        MellinStrip {
            sigma: -self.constants.A3,
            tau: self.constants.A3t,
        }
    }

    fn mellin(&self, z: f64) -> Result<f64> {
        self.mgf(-z - 1.0)
    }
}
