//! Numerical building blocks: quadrature, root finding, special functions,
//! dual numbers and seeded random streams.

pub mod fit;
pub mod jet;
pub mod quad;
pub mod rng;
pub mod roots;
pub mod special;

pub use fit::{inverse_sqrt_fit, power_fit};
pub use jet::Jet;
pub use quad::{integrate, integrate_pieces, integrate_with_error, Tolerance};
pub use roots::{bracket_upward, find_root};
