//! Heston diffusion times an independent jump factor.
//!
//! The price is `X_t = X¹_t · e^(J_t)` with independent factors, so its
//! density is the Mellin convolution of the two factor laws. Which factor
//! controls a wing is decided by comparing power exponents.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heston::{HestonModel, HestonParams};
use crate::kou::{KouJumpParams, KouJumps};
use crate::mellin::{mellin_convolve_with_breaks, TailAsymptote};
use crate::nig::NigParams;
use crate::numerics::Tolerance;
use crate::oracles::density_fourier;

/// Default relative tolerance on exponent comparisons.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// `log t` reach of the Kou coefficient table built by [`MixedModel::kou`].
pub const KOU_REACH: f64 = 400.0;

/// [`MixedModel::density`] drops the diffusion factor at `z` once `|log z|` exceeds `|log x|` by this much.
const CONVOLUTION_MARGIN: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Jumps {
    Kou(KouJumps),
    Nig(NigParams),
}

impl Jumps {
    pub fn t(&self) -> f64 {
        match self {
            Jumps::Kou(k) => k.params.t,
            Jumps::Nig(n) => n.t,
        }
    }

    /// `log E[e^(s J_t)]`.
    pub fn ln_mgf(&self, s: f64) -> Result<f64> {
        match self {
            Jumps::Kou(k) => crate::kou::ln_jump_mgf(&k.params, s),
            Jumps::Nig(n) => n.ln_mgf(s),
        }
    }

    pub fn mgf(&self, s: f64) -> Result<f64> {
        self.ln_mgf(s).map(f64::exp)
    }

    /// Open interval of orders with a finite moment.
    pub fn moment_interval(&self) -> (f64, f64) {
        match self {
            Jumps::Kou(k) => (-k.params.eta2, k.params.eta1),
            Jumps::Nig(n) => (-n.alpha, n.alpha),
        }
    }

    /// Drift `μ` that makes the mixed price a martingale.
    pub fn martingale_drift(&self) -> Result<f64> {
        match self {
            Jumps::Kou(k) => k.params.risk_neutral_drift(),
            Jumps::Nig(n) => n.no_arb_drift(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wing {
    Large,
    Small,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominant {
    Jump,
    Diffusion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WingRegime {
    pub wing: Wing,
    pub dominant: Dominant,
    /// Distance between the competing power exponents.
    pub margin: f64,
}

/// A wing asymptote together with the regime that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WingAsymptote {
    pub asymptote: TailAsymptote,
    pub regime: WingRegime,
    /// Set for the NIG small wing, which is built by the `x ↦ 1/x` mirror
    /// of the large-wing argument rather than from a stated theorem.
    pub extrapolated_by_symmetry: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedModel {
    pub heston: HestonModel,
    pub jumps: Jumps,
    pub degeneracy_tol: f64,
}

impl MixedModel {
    pub fn new(heston: HestonParams, jumps: Jumps) -> Result<Self> {
        let t = jumps.t();
        if (heston.t - t).abs() > 1e-12 * heston.t.max(1.0) {
            return Err(Error::InvalidParameter {
                name: "t",
                value: t,
                constraint: "jump horizon must equal the Heston horizon",
            });
        }
        if let Jumps::Nig(n) = &jumps {
            n.validate()?;
        }
        Ok(Self {
            heston: HestonModel::new(heston)?,
            jumps,
            degeneracy_tol: DEGENERACY_TOL,
        })
    }

    pub fn kou(heston: HestonParams, jumps: KouJumpParams) -> Result<Self> {
        let k = KouJumps::with_reach(jumps, KOU_REACH, Tolerance::rel(1e-15))?;
        Self::new(heston, Jumps::Kou(k))
    }

    pub fn nig(heston: HestonParams, jumps: NigParams) -> Result<Self> {
        Self::new(heston, Jumps::Nig(jumps))
    }

    /// The same model with `μ` replaced by the martingale drift of the jumps.
    pub fn with_martingale_drift(&self) -> Result<Self> {
        let mu = self.jumps.martingale_drift()?;
        Ok(Self {
            heston: HestonModel::new(HestonParams {
                mu,
                ..self.heston.params
            })?,
            jumps: self.jumps.clone(),
            degeneracy_tol: self.degeneracy_tol,
        })
    }

    pub fn with_degeneracy_tol(mut self, tol: f64) -> Self {
        self.degeneracy_tol = tol;
        self
    }

    /// `log E[X_t^s]` of the mixed price.
    pub fn ln_mgf(&self, s: f64) -> Result<f64> {
        Ok(crate::heston::ln_mgf(&self.heston.params, s)? + self.jumps.ln_mgf(s)?)
    }

    pub fn mgf(&self, s: f64) -> Result<f64> {
        self.ln_mgf(s).map(f64::exp)
    }

    /// Open interval of orders with a finite mixed moment.
    pub fn moment_interval(&self) -> (f64, f64) {
        let (lo, hi) = self.jumps.moment_interval();
        let cm = &self.heston.moments;
        (lo.max(cm.s_minus), hi.min(cm.s_plus))
    }

    /// Exponents `(jump, diffusion)` compared in a wing.
    fn exponents(&self, wing: Wing) -> (f64, f64) {
        let k = &self.heston.constants;
        match (wing, &self.jumps) {
            (Wing::Large, Jumps::Kou(j)) => (1.0 + j.params.eta1, k.A3),
            (Wing::Small, Jumps::Kou(j)) => (j.params.eta2 - 1.0, k.A3t),
            (Wing::Large, Jumps::Nig(n)) => (n.alpha + 1.0, k.A3),
            (Wing::Small, Jumps::Nig(n)) => (n.alpha - 1.0, k.A3t),
        }
    }

    /// The factor with the smaller exponent has the heavier wing and wins.
    pub fn classify_wing(&self, wing: Wing) -> Result<WingRegime> {
        let (jump, diffusion) = self.exponents(wing);
        let margin = (diffusion - jump).abs();
        let scale = jump.abs().max(diffusion.abs()).max(1.0);
        if margin <= self.degeneracy_tol * scale {
            let what = match wing {
                Wing::Large => "1 + jump exponent equals A3",
                Wing::Small => "jump exponent - 1 equals Ã3",
            };
            return Err(Error::Degenerate {
                wing: match wing {
                    Wing::Large => "large",
                    Wing::Small => "small",
                },
                detail: format!("{what} ({jump} vs {diffusion}); the two wing terms are of the same order"),
            });
        }
        let dominant = if jump < diffusion {
            Dominant::Jump
        } else {
            Dominant::Diffusion
        };
        Ok(WingRegime { wing, dominant, margin })
    }

    /// Regimes at `x → ∞` and `x → 0`.
    pub fn classify(&self) -> Result<(WingRegime, WingRegime)> {
        Ok((self.classify_wing(Wing::Large)?, self.classify_wing(Wing::Small)?))
    }

    /// `m_s(H) = E[e^(sJ_t); J_t ≠ 0]`, the moment of the continuous part of
    /// the Kou jump factor (the full moment minus the atom).
    pub fn kou_continuous_moment(&self, s: f64) -> Result<f64> {
        match &self.jumps {
            Jumps::Kou(k) => Ok(self.jumps.mgf(s)? - k.atom_mass()),
            Jumps::Nig(_) => Err(Error::domain("kou_continuous_moment", "model has NIG jumps")),
        }
    }

    /// Density asymptote as `x → ∞`.
    pub fn tail_asymptote(&self) -> Result<WingAsymptote> {
        let regime = self.classify_wing(Wing::Large)?;
        let h = &self.heston;
        let asymptote = match (regime.dominant, &self.jumps) {
            (Dominant::Jump, Jumps::Kou(k)) => {
                let tail = k.jump_tail_asymptote();
                tail.scaled(h.mgf(k.params.eta1)?)?
            }
            (Dominant::Jump, Jumps::Nig(n)) => n.tail_asymptote().scaled(h.mgf(n.alpha)?)?,
            (Dominant::Diffusion, Jumps::Kou(k)) => {
                let weight = k.atom_mass() + self.kou_continuous_moment(h.constants.A3 - 1.0)?;
                h.tail_asymptote().scaled(weight)?
            }
            (Dominant::Diffusion, Jumps::Nig(_)) => {
                let weight = self.jumps.mgf(h.constants.A3 - 1.0)?;
                h.tail_asymptote().scaled(weight)?
            }
        };
        Ok(WingAsymptote {
            asymptote,
            regime,
            extrapolated_by_symmetry: false,
        })
    }

    /// Density asymptote as `x → 0`.
    pub fn zero_asymptote(&self) -> Result<WingAsymptote> {
        let regime = self.classify_wing(Wing::Small)?;
        let h = &self.heston;
        let index = -h.constants.A3t - 1.0;
        let asymptote = match (regime.dominant, &self.jumps) {
            (Dominant::Jump, Jumps::Kou(k)) => {
                let tail = k.jump_zero_asymptote();
                tail.scaled(h.mgf(-k.params.eta2)?)?
            }
            (Dominant::Jump, Jumps::Nig(n)) => n.zero_asymptote().scaled(h.mgf(-n.alpha)?)?,
            (Dominant::Diffusion, Jumps::Kou(k)) => {
                let weight = k.atom_mass() + self.kou_continuous_moment(index)?;
                h.zero_asymptote().scaled(weight)?
            }
            (Dominant::Diffusion, Jumps::Nig(_)) => h.zero_asymptote().scaled(self.jumps.mgf(index)?)?,
        };
        Ok(WingAsymptote {
            asymptote,
            regime,
            extrapolated_by_symmetry: matches!(self.jumps, Jumps::Nig(_)),
        })
    }

    /// Density of `X_t` at `x` by quadrature Mellin convolution of the
    /// Fourier-inverted Heston density with the jump law.
    pub fn density(&self, x: f64, tol: &Tolerance) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain("mixed_density", format!("x = {x} must be positive")));
        }
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let record = |e: Error| {
            failure.borrow_mut().get_or_insert(e);
            0.0
        };
        let inner = Tolerance::rel((tol.rel * 1e-2).clamp(1e-13, 1e-9)).with_abs(1e-300);
        let lx = x.ln();
        let window = lx.abs() + CONVOLUTION_MARGIN;
        let diffusion = |z: f64| {
            if z.ln().abs() > window {
                return 0.0;
            }
            density_fourier(&self.heston, z, &inner).unwrap_or_else(record)
        };
        let breaks = [lx - window, lx + window];
        let (atom, conv) = match &self.jumps {
            Jumps::Kou(k) => {
                let reach = KOU_REACH.min(window + lx.abs() + 1.0);
                let jump = |t: f64| {
                    if t.ln().abs() > reach {
                        return 0.0;
                    }
                    k.h_density(t).unwrap_or_else(record)
                };
                let conv = mellin_convolve_with_breaks(diffusion, jump, x, &breaks, tol)?;
                (k.atom_mass() * density_fourier(&self.heston, x, &inner)?, conv)
            }
            Jumps::Nig(n) => {
                let jump = |t: f64| n.price_density(t).map(|d| d.value).unwrap_or_else(record);
                (0.0, mellin_convolve_with_breaks(diffusion, jump, x, &breaks, tol)?)
            }
        };
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(atom + conv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mellin::{convolve_asymptote_infinity, convolve_asymptote_zero, Side};

    fn kou(eta1: f64, eta2: f64) -> KouJumpParams {
        KouJumpParams {
            lambda: 1.0,
            eta1,
            eta2,
            p: 0.5,
            q: 0.5,
            t: 1.0,
        }
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs())
    }

    #[test]
    fn classification_by_exponents() {
        let h = HestonParams::REFERENCE;
        let a3 = HestonModel::new(h).unwrap().constants.A3;
        let m = MixedModel::kou(h, kou(a3 - 3.0, 2.0)).unwrap();
        let (large, small) = m.classify().unwrap();
        assert_eq!(large.dominant, Dominant::Jump);
        assert!((large.margin - 2.0).abs() < 1e-12);
        assert_eq!(small.wing, Wing::Small);
        let m = MixedModel::kou(h, kou(a3 + 3.0, 2.0)).unwrap();
        assert_eq!(m.classify_wing(Wing::Large).unwrap().dominant, Dominant::Diffusion);
    }

    #[test]
    fn equal_exponents_are_degenerate() {
        let h = HestonParams::REFERENCE;
        let k = HestonModel::new(h).unwrap().constants;
        let m = MixedModel::kou(h, kou(k.A3 - 1.0, 2.0)).unwrap();
        assert!(matches!(m.tail_asymptote(), Err(Error::Degenerate { wing: "large", .. })));
        let m = MixedModel::kou(h, kou(3.0, k.A3t + 1.0)).unwrap();
        assert!(matches!(m.zero_asymptote(), Err(Error::Degenerate { wing: "small", .. })));
    }

    #[test]
    fn explicit_coefficients_match_convolution_route() {
        let h = HestonParams::REFERENCE;
        for (eta1, eta2) in [(4.0, 3.0), (20.0, 12.0)] {
            let m = MixedModel::kou(h, kou(eta1, eta2)).unwrap();
            let Jumps::Kou(k) = &m.jumps else { unreachable!() };
            let large = m.tail_asymptote().unwrap();
            let route = match large.regime.dominant {
                Dominant::Jump => convolve_asymptote_infinity(&m.heston, &k.jump_tail_asymptote()),
                Dominant::Diffusion => convolve_asymptote_infinity(k, &m.heston.tail_asymptote()),
            }
            .unwrap();
            assert!(close(large.asymptote.r1, route.r1, 1e-12));
            assert_eq!((large.asymptote.r2, large.asymptote.r3), (route.r2, route.r3));
            let small = m.zero_asymptote().unwrap();
            let route = match small.regime.dominant {
                Dominant::Jump => convolve_asymptote_zero(&m.heston, &k.jump_zero_asymptote()),
                Dominant::Diffusion => convolve_asymptote_zero(k, &m.heston.zero_asymptote()),
            }
            .unwrap();
            assert!(close(small.asymptote.r1, route.r1, 1e-12));
            assert_eq!(small.asymptote.side, Side::AtZero);
        }
    }

    #[test]
    fn jump_dominant_exponent_ignores_heston() {
        let mut h = HestonParams::REFERENCE;
        let m1 = MixedModel::kou(h, kou(3.0, 2.0)).unwrap();
        h.c = 0.4;
        let m2 = MixedModel::kou(h, kou(3.0, 2.0)).unwrap();
        let (a, b) = (m1.tail_asymptote().unwrap(), m2.tail_asymptote().unwrap());
        assert_eq!(a.asymptote.r3, 4.0);
        assert_eq!(a.asymptote.r3, b.asymptote.r3);
        assert_eq!(a.asymptote.r2, b.asymptote.r2);
    }

    #[test]
    fn vanishing_intensity_recovers_heston() {
        let h = HestonParams::REFERENCE;
        let mut p = kou(30.0, 30.0);
        p.lambda = 1e-12;
        let m = MixedModel::kou(h, p).unwrap();
        let a = m.tail_asymptote().unwrap();
        assert_eq!(a.regime.dominant, Dominant::Diffusion);
        assert!(close(a.asymptote.r1, m.heston.constants.B1, 1e-10));
    }

    #[test]
    fn nig_small_wing_is_flagged() {
        let h = HestonParams::REFERENCE;
        let m = MixedModel::nig(h, NigParams { alpha: 3.0, delta: 0.5, t: 1.0 }).unwrap();
        let (large, small) = (m.tail_asymptote().unwrap(), m.zero_asymptote().unwrap());
        assert!(!large.extrapolated_by_symmetry && small.extrapolated_by_symmetry);
        assert_eq!(large.regime.dominant, Dominant::Jump);
        assert_eq!(large.asymptote.r3, 4.0);
        let route = convolve_asymptote_infinity(&m.heston, &NigParams { alpha: 3.0, delta: 0.5, t: 1.0 }.tail_asymptote()).unwrap();
        assert!(close(large.asymptote.r1, route.r1, 1e-12));
    }

    #[test]
    fn convolution_density_matches_fourier_route() {
        let tol = Tolerance::rel(1e-10);
        let m = MixedModel::kou(HestonParams::REFERENCE, kou(4.0, 3.0))
            .unwrap()
            .with_martingale_drift()
            .unwrap();
        for x in [0.2, 1.0, 3.0] {
            let a = m.density(x, &tol).unwrap();
            let b = density_fourier(&m, x, &Tolerance::rel(1e-12)).unwrap();
            assert!((a - b).abs() < 1e-10, "{x}: {a} {b}");
        }
    }

    #[test]
    fn mismatched_horizons_rejected() {
        let mut p = kou(3.0, 2.0);
        p.t = 2.0;
        assert!(MixedModel::kou(HestonParams::REFERENCE, p).is_err());
    }
}

