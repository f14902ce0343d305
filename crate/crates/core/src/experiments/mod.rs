//! Campaigns that turn the intersection, product, invariance and chain
//! statements into finite checks with a violation budget.

mod chain;
mod intersection;
mod invariance;
mod product;
mod report;

pub use chain::{
    chain_campaign, normalized_points, p2s_probe, prng_pairs, ChainParams, ProbeParams,
    MIN_CHAIN_PAIRS, MIN_PROBE_POINTS,
};
pub use intersection::{
    default_sweep, intersection_campaign, motion_campaign, packing_intersection_campaign,
    IntersectionParams, ZBox, EXCEPTIONAL_MARGIN, MIN_CAMPAIGN_SAMPLES, SLOPE_AGREEMENT,
};
pub use invariance::{invariance_campaign, InvarianceParams, Transform};
pub use product::{product_campaign, ProductParams, RUNG_NAMES};
pub use report::{Check, ExperimentReport, NamedValue, SampleRow, SweepEntry, TheoremTag};
