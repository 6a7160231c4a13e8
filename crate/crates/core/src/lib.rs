//! Asymptotics of mixed stochastic-volatility and jump models.

pub mod error;
pub mod numerics;

pub use error::{Error, Result};
pub mod mellin;
pub mod heston;
pub mod kou;
pub mod nig;
pub mod mixed;
pub mod oracles;
pub mod smile;
pub mod validation;
pub mod config;
