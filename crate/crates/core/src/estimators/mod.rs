//! Box counting with multi-scale regression, and direct cover and packing sums.

mod boxcount;
mod regression;
mod sums;

pub use boxcount::{box_count, box_profile, product_profile, ScaleProfile};
pub use regression::{
    auto_range, box_dimension, box_dimension_auto, box_dimension_windowed, default_window,
    estimate_from_counts, estimate_from_profile, estimate_with_window, least_squares, DimensionEstimate,
    AUTO_RANGE_SPREAD,
};
pub use sums::{
    cover_scale, critical_exponent, effective_diameter, greedy_cover, greedy_packing,
    hausdorff_sum, packing_sum, power_sum, Ball, CriticalExponent, SumKind,
};
