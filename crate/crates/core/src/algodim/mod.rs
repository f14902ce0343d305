//! Compression proxies for precision-`r` complexity and the density estimates
//! built on them.
//!
//! All quantities are upper-bound proxies: [`klen`] is the output length of the
//! in-repo coder in [`compress`], never the true (uncomputable) complexity. The
//! min/max over the upper half of a precision list is reported as a
//! "lower/upper density estimate".

pub mod bits;
mod calibration;
pub mod compress;
mod dims;
mod encoding;

pub use calibration::{calibrate, Calibration, CALIBRATION_SEEDS, CALIBRATION_VERSION};
pub use compress::{
    cond_klen, header_overhead, klen, klen_joint, mutual_info, mutual_info_clamped,
    JOIN_OVERHEAD,
};
pub use dims::{
    cdim_estimate, chain_rule_residuals, complexity_profile, dim_estimate, mdim_estimate,
    precision_ladder, tail, ChainResiduals, ComplexityProfile, DensityEstimate, MIN_PRECISIONS,
};
pub use encoding::{encode, BinaryPoint, BitEncoding, Scheme};
