//! Desk-scale fractal dimension laboratory.
//!
//! * [`geometry`]: dyadic fixed-point point sets, products, translations, rigid motions
//!   and proximity intersections.
//! * [`generators`]: self-similar sets (Cantor, Sierpinski, Koch) and the Moran similarity
//!   dimension.
//! * [`estimators`]: box counting with multi-scale regression, cover and packing sums.
//! * [`algodim`]: compression-based proxies for precision-r Kolmogorov complexity and the
//!   effective, mutual and conditional dimension estimates built on them.
//! * [`experiments`]: campaigns that check intersection, motion, product, invariance and
//!   chain-rule inequalities on generated sets and emit JSON reports.

pub mod algodim;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod generators;
pub mod geometry;
pub mod io;
pub mod rng;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
