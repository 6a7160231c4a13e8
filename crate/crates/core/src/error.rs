use thiserror::Error;

/// Errors raised by the numerical engine.
///
/// Every variant names the violated condition so that callers (and the CLI)
/// can render a structured diagnostic instead of a bare number.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("invalid parameter {name} = {value}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("{what} did not converge (best estimate {estimate:e}, error {error:e})")]
    Convergence {
        what: &'static str,
        estimate: f64,
        error: f64,
    },

    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo:e}, f(hi) = {f_hi:e})")]
    Bracketing { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("Mellin integral diverges at z = {z}")]
    Divergence { z: f64 },

    #[error("moment of order {order} is infinite ({detail})")]
    MomentExplosion { order: f64, detail: String },

    #[error("asymptotic regime guard violated: {detail}")]
    Regime { detail: String },

    #[error("degenerate wing ({wing}): {detail}")]
    Degenerate { wing: &'static str, detail: String },

    #[error("critical moment search failed: {detail}")]
    CriticalMomentSearch { detail: String },

    #[error("strip condition violated: need {sigma} < {rho} < {tau}")]
    Strip { sigma: f64, rho: f64, tau: f64 },

    #[error("option price {price:e} outside no-arbitrage bounds ({lower:e}, {upper:e})")]
    PriceBounds { price: f64, lower: f64, upper: f64 },

    #[error("call price is infinite: tail exponent r3 = {r3} must exceed 2")]
    InfinitePrice { r3: f64 },

    #[error("no-arbitrage drift impossible: {detail}")]
    NoArbitrage { detail: String },

    #[error("Fourier oracle failure: {detail}")]
    Oracle { detail: String },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }

    pub(crate) fn regime(detail: impl Into<String>) -> Self {
        Error::Regime {
            detail: detail.into(),
        }
    }

    /// Short machine-readable tag used in JSON diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Convergence { .. } => "convergence",
            Error::Bracketing { .. } => "bracketing",
            Error::Divergence { .. } => "divergence",
            Error::MomentExplosion { .. } => "moment_explosion",
            Error::Regime { .. } => "regime",
            Error::Degenerate { .. } => "degenerate",
            Error::CriticalMomentSearch { .. } => "critical_moment_search",
            Error::Strip { .. } => "strip",
            Error::PriceBounds { .. } => "price_bounds",
            Error::InfinitePrice { .. } => "infinite_price",
            Error::NoArbitrage { .. } => "no_arbitrage",
            Error::Oracle { .. } => "oracle",
            Error::Config(_) => "config",
        }
    }
}
