//! JSON model configuration and the model it builds.
//!
//! ```json
//! {
//!   "model": "heston+kou",
//!   "heston": { "a": 1.0, "b": 2.0, "c": 0.5, "rho": -0.3, "y0": 0.04, "x0": 1.0, "t": 1.0 },
//!   "kou": { "lambda": 1.0, "eta1": 4.0, "eta2": 3.0, "p": 0.5 }
//! }
//! ```
//!
//! Every field not shown has a default; unknown fields are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heston::{HestonModel, HestonParams};
use crate::kou::KouJumpParams;
use crate::mellin::TailAsymptote;
use crate::mixed::{MixedModel, Wing, WingAsymptote, DEGENERACY_TOL};
use crate::nig::NigParams;
use crate::numerics::Tolerance;
use crate::oracles::{density_fourier, simulate_heston_paths, simulate_paths, McSettings};
use crate::smile::{smile_expansion, SmileExpansion};
use crate::validation::ValidationSettings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "heston")]
    Heston,
    #[serde(rename = "heston+kou")]
    HestonKou,
    #[serde(rename = "heston+nig")]
    HestonNig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HestonConfig {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub rho: f64,
    pub y0: f64,
    #[serde(default = "one")]
    pub x0: f64,
    #[serde(default = "one")]
    pub t: f64,
    /// Drift; replaced by the no-arbitrage drift when `martingale_drift` is set.
    #[serde(default)]
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KouConfig {
    pub lambda: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub p: f64,
    /// Defaults to `1 - p`.
    #[serde(default)]
    pub q: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NigConfig {
    pub alpha: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    /// Relative tolerance of quadratures and root finders.
    pub rel: f64,
    /// Relative tolerance of the Fourier oracles.
    pub oracle_rel: f64,
    /// Exponent margin below which a wing is reported as degenerate.
    pub degeneracy: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            oracle_rel: 1e-11,
            degeneracy: DEGENERACY_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonteCarloConfig {
    pub paths: usize,
    pub steps: usize,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        let v = ValidationSettings::default();
        Self {
            paths: v.mc_paths,
            steps: v.mc_steps,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub constants: Option<String>,
    pub density: Option<String>,
    pub smile: Option<String>,
    pub validate: Option<String>,
    pub sample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub model: ModelKind,
    pub heston: HestonConfig,
    #[serde(default)]
    pub kou: Option<KouConfig>,
    #[serde(default)]
    pub nig: Option<NigConfig>,
    /// Install the drift that makes the price a martingale (jump models only).
    #[serde(default = "yes")]
    pub martingale_drift: bool,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default)]
    pub monte_carlo: MonteCarloConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

fn default_seed() -> u64 {
    ValidationSettings::default().seed
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.check()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The reference Heston set, optionally with jumps.
    pub fn reference(kind: ModelKind) -> Self {
        let p = HestonParams::REFERENCE;
        Self {
            model: kind,
            heston: HestonConfig {
                a: p.a,
                b: p.b,
                c: p.c,
                rho: p.rho,
                y0: p.y0,
                x0: p.x0,
                t: p.t,
                mu: p.mu,
            },
            kou: (kind == ModelKind::HestonKou).then_some(KouConfig {
                lambda: 1.0,
                eta1: 4.0,
                eta2: 3.0,
                p: 0.5,
                q: None,
            }),
            nig: (kind == ModelKind::HestonNig).then_some(NigConfig { alpha: 3.0, delta: 0.5 }),
            martingale_drift: true,
            seed: default_seed(),
            tolerances: ToleranceConfig::default(),
            monte_carlo: MonteCarloConfig::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Structural checks: the component block matches `model`, tolerances are usable.
    pub fn check(&self) -> Result<()> {
        let (need_kou, need_nig) = match self.model {
            ModelKind::Heston => (false, false),
            ModelKind::HestonKou => (true, false),
            ModelKind::HestonNig => (false, true),
        };
        let blocks = [("kou", need_kou, self.kou.is_some()), ("nig", need_nig, self.nig.is_some())];
        for (name, need, have) in blocks {
            if need != have {
                return Err(Error::Config(format!(
                    "model {:?} {} a \"{name}\" block",
                    self.model,
                    if need { "requires" } else { "does not take" }
                )));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [("rel", t.rel), ("oracle_rel", t.oracle_rel), ("degeneracy", t.degeneracy)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("tolerances.{name} = {v} must lie in (0, 1)")));
            }
        }
        if self.monte_carlo.paths == 0 || self.monte_carlo.steps == 0 {
            return Err(Error::Config("monte_carlo.paths and monte_carlo.steps must be positive".into()));
        }
        Ok(())
    }

    pub fn heston_params(&self) -> HestonParams {
        let h = &self.heston;
        HestonParams {
            mu: h.mu,
            a: h.a,
            b: h.b,
            c: h.c,
            rho: h.rho,
            x0: h.x0,
            y0: h.y0,
            t: h.t,
        }
    }

    pub fn kou_params(&self) -> Option<KouJumpParams> {
        self.kou.map(|k| KouJumpParams {
            lambda: k.lambda,
            eta1: k.eta1,
            eta2: k.eta2,
            p: k.p,
            q: k.q.unwrap_or(1.0 - k.p),
            t: self.heston.t,
        })
    }

    pub fn nig_params(&self) -> Option<NigParams> {
        self.nig.map(|n| NigParams {
            alpha: n.alpha,
            delta: n.delta,
            t: self.heston.t,
        })
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance::rel(self.tolerances.rel)
    }

    pub fn oracle_tolerance(&self) -> Tolerance {
        Tolerance::rel(self.tolerances.oracle_rel).with_abs(1e-300)
    }

    pub fn mc_settings(&self) -> McSettings {
        McSettings::new(self.monte_carlo.paths, self.monte_carlo.steps, self.seed)
    }

    pub fn validation_settings(&self) -> ValidationSettings {
        ValidationSettings {
            mc_paths: self.monte_carlo.paths,
            mc_steps: self.monte_carlo.steps,
            seed: self.seed,
            oracle_rel: self.tolerances.oracle_rel,
        }
    }

    /// Builds the model, re-checking every component invariant.
    pub fn build(&self) -> Result<Model> {
        self.check()?;
        let heston = self.heston_params();
        let mixed = match self.model {
            ModelKind::Heston => {
                let mu = if self.martingale_drift { 0.0 } else { heston.mu };
                return Ok(Model::Heston(HestonModel::new(HestonParams { mu, ..heston })?));
            }
            ModelKind::HestonKou => MixedModel::kou(heston, self.kou_params().expect("checked"))?,
            ModelKind::HestonNig => MixedModel::nig(heston, self.nig_params().expect("checked"))?,
        };
        let mixed = mixed.with_degeneracy_tol(self.tolerances.degeneracy);
        Ok(Model::Mixed(if self.martingale_drift {
            mixed.with_martingale_drift()?
        } else {
            mixed
        }))
    }
}

/// Either the pure Heston model or Heston with jumps.
#[derive(Debug, Clone)]
pub enum Model {
    Heston(HestonModel),
    Mixed(MixedModel),
}

impl Model {
    pub fn heston(&self) -> &HestonModel {
        match self {
            Model::Heston(h) => h,
            Model::Mixed(m) => &m.heston,
        }
    }

    pub fn x0(&self) -> f64 {
        self.heston().params.x0
    }

    pub fn t(&self) -> f64 {
        self.heston().params.t
    }

    /// Density asymptote on one wing. The pure Heston model reports a
    /// diffusion-dominant wing without a regime record.
    pub fn wing_asymptote(&self, wing: Wing) -> Result<(TailAsymptote, Option<WingAsymptote>)> {
        match (self, wing) {
            (Model::Heston(h), Wing::Large) => Ok((h.tail_asymptote(), None)),
            (Model::Heston(h), Wing::Small) => Ok((h.zero_asymptote(), None)),
            (Model::Mixed(m), Wing::Large) => m.tail_asymptote().map(|w| (w.asymptote, Some(w))),
            (Model::Mixed(m), Wing::Small) => m.zero_asymptote().map(|w| (w.asymptote, Some(w))),
        }
    }

    pub fn density_fourier(&self, x: f64, tol: &Tolerance) -> Result<f64> {
        match self {
            Model::Heston(h) => density_fourier(h, x, tol),
            Model::Mixed(m) => density_fourier(m, x, tol),
        }
    }

    pub fn smile_expansion(&self, wing: Wing) -> Result<SmileExpansion> {
        match self {
            Model::Heston(h) => {
                let (x0, t) = (h.params.x0, h.params.t);
                if h.params.mu != 0.0 {
                    return Err(Error::NoArbitrage {
                        detail: format!("the Heston price is a martingale only for mu = 0, got {}", h.params.mu),
                    });
                }
                match wing {
                    Wing::Large => SmileExpansion::large(&h.tail_asymptote(), x0, t),
                    Wing::Small => SmileExpansion::small(&h.zero_asymptote(), x0, t),
                }
            }
            Model::Mixed(m) => smile_expansion(m, wing),
        }
    }

    pub fn simulate(&self, settings: &McSettings) -> Result<Vec<f64>> {
        match self {
            Model::Heston(h) => simulate_heston_paths(&h.params, settings),
            Model::Mixed(m) => simulate_paths(m, settings),
        }
    }
}
