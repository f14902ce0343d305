use log::info;

use super::boxcount::{box_profile, ScaleProfile};
use crate::error::{Error, Result};
use crate::geometry::PointSet;

/// Spread allowed among consecutive slopes inside an automatically chosen range.
pub const AUTO_RANGE_SPREAD: f64 = 0.2;

/// Slope of `log2 N_r` against `r` with a lower/upper envelope.
///
/// `lower_slope` and `upper_slope` are the smallest and largest least-squares
/// slopes over the sub-windows of `window` octaves inside `[r_min, r_max]`,
/// widened if needed so that they bracket `value`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DimensionEstimate {
    pub value: f64,
    pub lower_slope: f64,
    pub upper_slope: f64,
    pub r_min: u32,
    pub r_max: u32,
    pub residual: f64,
    /// All counts equal: the slope is reported as 0.
    #[serde(skip)]
    pub degenerate: bool,
}

impl DimensionEstimate {
    pub fn zero(r_min: u32, r_max: u32) -> Self {
        Self {
            value: 0.0,
            lower_slope: 0.0,
            upper_slope: 0.0,
            r_min,
            r_max,
            residual: 0.0,
            degenerate: true,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct serializes")
    }
}

/// Ordinary least squares `y = a + b x`; returns `(b, rms residual)`.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return (0.0, 0.0);
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss: f64 = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    (b, (ss / n).sqrt())
}

/// Default envelope width: one octave shorter than the full range.
pub fn default_window(r_min: u32, r_max: u32) -> u32 {
    (r_max - r_min).saturating_sub(1).max(1)
}

/// Fit over the whole profile with the default envelope width.
pub fn estimate_from_profile(profile: &ScaleProfile) -> Result<DimensionEstimate> {
    let s = profile.scales();
    let (lo, hi) = (s[0], s[s.len() - 1]);
    estimate_with_window(profile, default_window(lo, hi))
}

pub fn estimate_with_window(profile: &ScaleProfile, window: u32) -> Result<DimensionEstimate> {
    estimate_from_counts(profile.scales(), profile.counts(), window)
}

/// Fit on raw counts over consecutive scales. Counts need not be monotone (the
/// per-scale sets of a thickened intersection shrink with the scale); slopes are
/// then clamped at 0.
pub fn estimate_from_counts(scales: &[u32], counts: &[u64], window: u32) -> Result<DimensionEstimate> {
    if scales.len() < 2 || scales.len() != counts.len() {
        return Err(Error::param("a slope needs at least two scales"));
    }
    if scales.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(Error::param("profile scales must be consecutive"));
    }
    if counts.contains(&0) {
        return Err(Error::param("counts must be positive"));
    }
    let (r_min, r_max) = (scales[0], scales[scales.len() - 1]);
    let w = window.clamp(1, r_max - r_min) as usize;
    if counts.iter().all(|&c| c == counts[0]) {
        return Ok(DimensionEstimate::zero(r_min, r_max));
    }
    let x: Vec<f64> = scales.iter().map(|&r| r as f64).collect();
    let y: Vec<f64> = counts.iter().map(|&c| (c as f64).log2()).collect();
    let (value, residual) = least_squares(&x, &y);
    let (mut lower, mut upper) = (value, value);
    for start in 0..x.len() - w {
        let (b, _) = least_squares(&x[start..=start + w], &y[start..=start + w]);
        lower = lower.min(b);
        upper = upper.max(b);
    }
    Ok(DimensionEstimate {
        value: value.max(0.0),
        lower_slope: lower.max(0.0),
        upper_slope: upper.max(0.0),
        r_min,
        r_max,
        residual,
        degenerate: false,
    })
}

/// Box-counting dimension over `[r_min, r_max]`.
pub fn box_dimension(set: &PointSet, r_min: u32, r_max: u32) -> Result<DimensionEstimate> {
    box_dimension_windowed(set, r_min, r_max, default_window(r_min, r_max.max(r_min + 1)))
}

pub fn box_dimension_windowed(
    set: &PointSet,
    r_min: u32,
    r_max: u32,
    window: u32,
) -> Result<DimensionEstimate> {
    if r_min >= r_max {
        return Err(Error::param(format!("need r_min < r_max, got [{r_min}, {r_max}]")));
    }
    if r_max > set.precision() {
        return Err(Error::ScaleBeyondPrecision {
            scale: r_max,
            precision: set.precision(),
        });
    }
    estimate_with_window(&box_profile(set, r_min, r_max)?, window)
}

/// Longest run of scales whose consecutive slopes stay within
/// [`AUTO_RANGE_SPREAD`] of each other; the earliest run wins ties.
pub fn auto_range(profile: &ScaleProfile) -> Result<(u32, u32)> {
    let s = profile.scales();
    if s.len() < 2 {
        return Err(Error::param("auto range needs at least two scales"));
    }
    let y = profile.log2_counts();
    let slopes: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let mut best = (0usize, 0usize);
    for start in 0..slopes.len() {
        let (mut lo, mut hi) = (slopes[start], slopes[start]);
        let mut end = start;
        while end + 1 < slopes.len() {
            let v = slopes[end + 1];
            if hi.max(v) - lo.min(v) >= AUTO_RANGE_SPREAD {
                break;
            }
            lo = lo.min(v);
            hi = hi.max(v);
            end += 1;
        }
        if end - start > best.1 - best.0 {
            best = (start, end);
        }
    }
    let range = (s[best.0], s[best.1 + 1]);
    info!(
        "auto range for {}: r in [{}, {}] ({} octaves)",
        profile.label(),
        range.0,
        range.1,
        range.1 - range.0
    );
    Ok(range)
}

/// Profiles `[r_lo, r_hi]`, picks the range with [`auto_range`] and fits there.
pub fn box_dimension_auto(set: &PointSet, r_lo: u32, r_hi: u32) -> Result<DimensionEstimate> {
    let profile = box_profile(set, r_lo, r_hi)?;
    let (a, b) = auto_range(&profile)?;
    estimate_from_profile(&profile.window(a, b)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_line() {
        let (b, rms) = least_squares(&[0.0, 1.0, 2.0], &[2.0, 5.0, 8.0]);
        assert!((b - 3.0).abs() < 1e-12);
        assert!(rms < 1e-12);
    }

    #[test]
    fn filled_square() {
        let k = 8;
        let pts: Vec<[f64; 2]> = (0..1 << k)
            .flat_map(|i| (0..1 << k).map(move |j| [i as f64 / 256.0, j as f64 / 256.0]))
            .collect();
        let s = PointSet::from_f64_points(2, 30, pts.iter().map(|p| &p[..]), "sq").unwrap();
        let e = box_dimension(&s, 1, 7).unwrap();
        assert!((e.value - 2.0).abs() < 0.05, "{e:?}");
    }

    #[test]
    fn singleton_is_degenerate() {
        let s = PointSet::from_mantissas(1, 30, &[5], "p").unwrap();
        let e = box_dimension(&s, 2, 9).unwrap();
        assert_eq!(e.value, 0.0);
        assert!(e.degenerate);
    }

    #[test]
    fn envelope_brackets_value() {
        let p = ScaleProfile::new(vec![0, 1, 2, 3, 4], vec![1, 2, 3, 8, 12], "x").unwrap();
        for w in 1..=4 {
            let e = estimate_with_window(&p, w).unwrap();
            assert!(e.lower_slope <= e.value && e.value <= e.upper_slope);
        }
        let e1 = estimate_with_window(&p, 1).unwrap();
        assert!((e1.upper_slope - (8f64 / 3.0).log2()).abs() < 1e-12);
        assert!((e1.lower_slope - (12f64 / 8.0).log2()).abs() < 1e-12);
    }

    #[test]
    fn json_fields() {
        let e = DimensionEstimate::zero(3, 8);
        assert_eq!(
            e.to_json(),
            r#"{"value":0.0,"lower_slope":0.0,"upper_slope":0.0,"r_min":3,"r_max":8,"residual":0.0}"#
        );
    }

    #[test]
    fn auto_range_skips_saturation() {
        let p = ScaleProfile::new(
            (0..10).collect(),
            vec![1, 2, 4, 8, 16, 32, 40, 41, 41, 41],
            "x",
        )
        .unwrap();
        assert_eq!(auto_range(&p).unwrap(), (0, 5));
    }
}
