use rayon::prelude::*;

use super::report::{budget_pass, Check, ExperimentReport, NamedValue, SampleRow, SweepEntry, TheoremTag};
use crate::error::{Error, Result};
use crate::estimators::{
    box_profile, default_window, estimate_from_counts, estimate_with_window, product_profile,
    DimensionEstimate,
};
use crate::geometry::{
    apply_motion_clipped, diameter, pow2, within, Coords, NearestIndex, PointSet,
    RigidMotion, MAX_DIM, WORKSPACE_MANTISSA,
};
use crate::io::Provenance;
use crate::rng::ShiftRegister64;

pub const MIN_CAMPAIGN_SAMPLES: usize = 30;
/// Margin by which the aligned sample must beat the bound.
pub const EXCEPTIONAL_MARGIN: f64 = 0.3;
/// Largest lower/upper slope gap accepted before a packing-side campaign runs.
pub const SLOPE_AGREEMENT: f64 = 0.1;

/// Thickenings `2^-(r_max+2), 2^-(r_max+1), 2^-r_max`; the middle one decides.
pub fn default_sweep(r_max: u32) -> Vec<f64> {
    vec![pow2(-(r_max as i32 + 2)), pow2(-(r_max as i32 + 1)), pow2(-(r_max as i32))]
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionParams {
    pub r_min: u32,
    pub r_max: u32,
    /// Thickening at the finest scale `r_max`; scale `r` uses `delta * 2^(r_max - r)`.
    pub deltas: Vec<f64>,
    /// Index into `deltas` of the thickening that decides pass/fail.
    pub primary: usize,
    pub tolerance: f64,
    pub allowed_fraction: f64,
    pub seed: u64,
    /// Multiplier on the sampling box side `2 (diam E + diam F)`.
    pub box_scale: f64,
    /// Sub-window width for the slope envelope; defaults to one octave under the range.
    pub window: Option<u32>,
    /// Similarity ratio applied by motion campaigns (1 for rigid motions).
    pub motion_scale: f64,
}

impl IntersectionParams {
    pub fn new(r_min: u32, r_max: u32) -> Self {
        Self {
            r_min,
            r_max,
            deltas: default_sweep(r_max),
            primary: 1,
            tolerance: 0.1,
            allowed_fraction: 0.05,
            seed: 0,
            box_scale: 1.0,
            window: None,
            motion_scale: 1.0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn window(&self) -> u32 {
        self.window.unwrap_or_else(|| default_window(self.r_min, self.r_max))
    }

    fn validate(&self) -> Result<()> {
        if self.r_min >= self.r_max {
            return Err(Error::param("need r_min < r_max"));
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::param("thickenings must be positive"));
        }
        if self.primary >= self.deltas.len() {
            return Err(Error::param("primary thickening index out of range"));
        }
        if !(self.box_scale > 0.0 && self.motion_scale > 0.0) {
            return Err(Error::param("box and motion scales must be positive"));
        }
        Ok(())
    }

    /// Largest thickening used at any scale.
    fn reach(&self) -> f64 {
        let d = self.deltas.iter().copied().fold(0.0, f64::max);
        d * pow2((self.r_max - self.r_min) as i32)
    }
}

/// Uniform sampling box for translations.
#[derive(Debug, Clone, PartialEq)]
pub struct ZBox {
    pub center: Vec<f64>,
    pub side: f64,
}

impl ZBox {
    /// Side `2 (diam E + diam F) * scale`, centered on `center(E) - center(F)`.
    pub fn between(e: &PointSet, f: &PointSet, scale: f64) -> Result<Self> {
        let ce = e.center().ok_or(Error::EmptySet)?;
        let cf = f.center().ok_or(Error::EmptySet)?;
        Ok(Self {
            center: ce.iter().zip(&cf).map(|(a, b)| a - b).collect(),
            side: 2.0 * (diameter(e)? + diameter(f)?) * scale,
        })
    }

    pub fn sample(&self, rng: &mut ShiftRegister64) -> Vec<f64> {
        self.center
            .iter()
            .map(|c| c + (rng.next_f64() - 0.5) * self.side)
            .collect()
    }
}

/// `F + z` with `z` rounded to the grid, keeping only points within the mantissa
/// box `[lo, hi]`.
fn translate_clipped(f: &PointSet, z: &[i64], lo: &[i64], hi: &[i64]) -> Result<PointSet> {
    let n = f.dim();
    let mut out: Vec<Coords> = Vec::new();
    'points: for c in f.iter() {
        let mut y = [0i64; MAX_DIM];
        for k in 0..n {
            let v = c[k] as i128 + z[k] as i128;
            if v < lo[k] as i128 || v > hi[k] as i128 {
                continue 'points;
            }
            if v.abs() > WORKSPACE_MANTISSA as i128 {
                return Err(Error::WorkspaceOverflow);
            }
            y[k] = v as i64;
        }
        out.push(y);
    }
    Ok(PointSet::from_coords(n, f.precision(), out, f.label().to_string()))
}

/// Per-thickening estimate for `E` against an already placed `F`; `None` when
/// nothing of `E` lies within the thickening at the finest scale.
pub(crate) fn thickened_estimates(
    e: &PointSet,
    placed: &PointSet,
    params: &IntersectionParams,
) -> Result<Vec<Option<DimensionEstimate>>> {
    let p = e.precision();
    if placed.is_empty() {
        return Ok(vec![None; params.deltas.len()]);
    }
    let index = NearestIndex::new(placed);
    let bound = index.radius_sq(params.reach());
    let d2: Vec<Option<i128>> = e.iter().map(|x| index.nearest_sq_within(x, bound)).collect();
    let scales: Vec<u32> = (params.r_min..=params.r_max).collect();
    params
        .deltas
        .iter()
        .map(|&delta| {
            let mut counts = Vec::with_capacity(scales.len());
            for &r in &scales {
                let dr = delta * pow2((params.r_max - r) as i32);
                let s = e.select(|i| d2[i].is_some_and(|d| within(d, dr, p)));
                if s.is_empty() {
                    return Ok(None);
                }
                counts.push(crate::estimators::box_count(&s, r)?);
            }
            estimate_from_counts(&scales, &counts, params.window()).map(Some)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    /// Regression slope (Hausdorff side).
    Value,
    /// Largest sub-window slope (packing side).
    Upper,
}

impl Side {
    fn read(self, e: &DimensionEstimate) -> f64 {
        match self {
            Side::Value => e.value,
            Side::Upper => e.upper_slope,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Placement {
    Translation,
    Motion,
}

/// `dim(E ∩ (F + z)) <= max{0, dim(E x F) - n}` for PRNG-uniform `z` in the box.
pub fn intersection_campaign(
    e: &PointSet,
    f: &PointSet,
    count: usize,
    params: &IntersectionParams,
) -> Result<ExperimentReport> {
    run(e, f, count, params, Placement::Translation, Side::Value, TheoremTag::Intersection)
}

/// As [`intersection_campaign`] with `F` first moved by a PRNG-uniform rotation
/// (scaled by `motion_scale`).
pub fn motion_campaign(
    e: &PointSet,
    f: &PointSet,
    count: usize,
    params: &IntersectionParams,
) -> Result<ExperimentReport> {
    run(e, f, count, params, Placement::Motion, Side::Value, TheoremTag::Motion)
}

/// Translation campaign reading the upper slope on both sides of the bound.
pub fn packing_intersection_campaign(
    e: &PointSet,
    f: &PointSet,
    count: usize,
    params: &IntersectionParams,
) -> Result<ExperimentReport> {
    run(e, f, count, params, Placement::Translation, Side::Upper, TheoremTag::Packing)
}

fn run(
    e: &PointSet,
    f: &PointSet,
    count: usize,
    params: &IntersectionParams,
    placement: Placement,
    side: Side,
    tag: TheoremTag,
) -> Result<ExperimentReport> {
    if count < MIN_CAMPAIGN_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_CAMPAIGN_SAMPLES,
            got: count,
        });
    }
    params.validate()?;
    if e.dim() != f.dim() {
        return Err(Error::DimensionMismatch(e.dim(), f.dim()));
    }
    if e.precision() != f.precision() {
        return Err(Error::PrecisionMismatch(e.precision(), f.precision()));
    }
    if params.r_max > e.precision() {
        return Err(Error::ScaleBeyondPrecision {
            scale: params.r_max,
            precision: e.precision(),
        });
    }
    let n = e.dim();
    let p = e.precision();
    let range = (params.r_min, params.r_max);
    let w = params.window();

    let pe = box_profile(e, params.r_min, params.r_max)?;
    let pf = box_profile(f, params.r_min, params.r_max)?;
    let est_e = estimate_with_window(&pe, w)?;
    let est_f = estimate_with_window(&pf, w)?;
    let est_ef = estimate_with_window(&product_profile(&pe, &pf)?, w)?;
    let product_dim = side.read(&est_ef);
    let bound = (product_dim - n as f64).max(0.0);

    let reach = params.reach();
    let (lo, hi) = e.bounding_box().ok_or(Error::EmptySet)?;
    let reach_m = (reach * pow2(p as i32)).ceil() as i64 + 1;
    let lo_m: Vec<i64> = lo.iter().map(|v| v - reach_m).collect();
    let hi_m: Vec<i64> = hi.iter().map(|v| v + reach_m).collect();
    let unit = pow2(-(p as i32));
    let lo_f: Vec<f64> = lo_m.iter().map(|&v| v as f64 * unit).collect();
    let hi_f: Vec<f64> = hi_m.iter().map(|&v| v as f64 * unit).collect();
    let zbox = ZBox::between(e, f, params.box_scale)?;
    let cf = f.center().ok_or(Error::EmptySet)?;

    let place = |rng: Option<&mut ShiftRegister64>| -> Result<PointSet> {
        match (placement, rng) {
            (Placement::Translation, None) => translate_clipped(f, &vec![0; n], &lo_m, &hi_m),
            (Placement::Translation, Some(rng)) => {
                let z = zbox.sample(rng);
                // Shifts may exceed the workspace; only the clipped image must fit.
                let zm: Vec<i64> = z.iter().map(|&v| (v * pow2(p as i32)).round_ties_even() as i64).collect();
                translate_clipped(f, &zm, &lo_m, &hi_m)
            }
            (Placement::Motion, None) => {
                let m = RigidMotion::identity(n);
                apply_motion_clipped(f, &m, Some((&lo_f, &hi_f)))
            }
            (Placement::Motion, Some(rng)) => {
                let rot = RigidMotion::random_rotation(n, rng, vec![0.0; n], params.motion_scale)?;
                // Moved center of F is uniform in the box shifted onto center(E).
                let mut moved_cf = vec![0.0; n];
                rot.apply(&cf, &mut moved_cf);
                let u = zbox.sample(rng);
                let t: Vec<f64> = (0..n).map(|k| u[k] + cf[k] - moved_cf[k]).collect();
                let m = rot.with_translation(t)?;
                apply_motion_clipped(f, &m, Some((&lo_f, &hi_f)))
            }
        }
    };

    let results: Vec<Vec<Option<DimensionEstimate>>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ShiftRegister64::stream(params.seed, i as u64);
            let placed = place(Some(&mut rng))?;
            thickened_estimates(e, &placed, params)
        })
        .collect::<Result<_>>()?;
    let aligned = thickened_estimates(e, &place(None)?, params)?;

    let mut rows = Vec::with_capacity(count * params.deltas.len());
    let mut sweep = Vec::with_capacity(params.deltas.len());
    for (j, &delta) in params.deltas.iter().enumerate() {
        let (mut nonempty, mut violations, mut max_est) = (0, 0, 0.0f64);
        for (i, r) in results.iter().enumerate() {
            let est = r[j].as_ref().map(|d| side.read(d));
            let violation = est.is_some_and(|v| v > bound + params.tolerance);
            nonempty += est.is_some() as usize;
            violations += violation as usize;
            max_est = max_est.max(est.unwrap_or(0.0));
            rows.push(SampleRow {
                index: i,
                delta,
                estimate: est.unwrap_or(0.0),
                bound,
                empty: est.is_none(),
                violation,
            });
        }
        sweep.push(SweepEntry {
            delta,
            nonempty,
            violations,
            max_estimate: max_est,
            pass: budget_pass(violations, count, params.allowed_fraction),
        });
    }
    let primary = &sweep[params.primary];
    let dp = params.deltas[params.primary];
    let nonempty_est: Vec<f64> = results
        .iter()
        .filter_map(|r| r[params.primary].as_ref().map(|d| side.read(d)))
        .collect();
    let mean = if nonempty_est.is_empty() {
        0.0
    } else {
        nonempty_est.iter().sum::<f64>() / nonempty_est.len() as f64
    };
    let aligned_est = aligned[params.primary].as_ref().map_or(0.0, |d| side.read(d));

    let mut checks = Vec::new();
    if e.iter().eq(f.iter()) && params.motion_scale == 1.0 {
        let excess = aligned_est - bound;
        checks.push(Check {
            name: "aligned sample exceeds bound".into(),
            value: excess,
            threshold: EXCEPTIONAL_MARGIN,
            pass: excess >= EXCEPTIONAL_MARGIN,
        });
    }
    if side == Side::Upper {
        for (label, est) in [("E", &est_e), ("F", &est_f)] {
            let gap = est.upper_slope - est.lower_slope;
            checks.push(Check {
                name: format!("upper/lower slope agreement on {label}"),
                value: gap,
                threshold: SLOPE_AGREEMENT,
                pass: gap < SLOPE_AGREEMENT,
            });
        }
    }

    let mut prov = Provenance::new(tag.as_str(), params.seed)
        .with("count", count)
        .with("r_min", params.r_min)
        .with("r_max", params.r_max)
        .with("window", w)
        .with("deltas", join(&params.deltas))
        .with("primary_delta", dp)
        .with("thickening", "scale-matched: delta * 2^(r_max - r) at scale r")
        .with("tolerance", params.tolerance)
        .with("allowed_fraction", params.allowed_fraction)
        .with("box_side", zbox.side)
        .with("box_center", join(&zbox.center))
        .with("e", format!("{} ({} points)", e.label(), e.len()))
        .with("f", format!("{} ({} points)", f.label(), f.len()))
        .with("precision", p)
        .with("estimate_side", if side == Side::Upper { "upper_slope" } else { "value" });
    if placement == Placement::Motion {
        prov.set("motion_scale", params.motion_scale);
    }

    Ok(ExperimentReport {
        name: format!("{}-vs-{}", e.label(), f.label()),
        theorem_tag: tag,
        samples: count,
        estimates: vec![
            NamedValue::new("mean_nonempty_estimate", mean, range, Some(dp)),
            NamedValue::new("max_estimate", primary.max_estimate, range, Some(dp)),
            NamedValue::new("product_dimension", product_dim, range, None),
            NamedValue::new("dimension_e", side.read(&est_e), range, None),
            NamedValue::new("dimension_f", side.read(&est_f), range, None),
            NamedValue::new("aligned_estimate", aligned_est, range, Some(dp)),
            NamedValue::new("nonempty_fraction", primary.nonempty as f64 / count as f64, range, Some(dp)),
        ],
        bound,
        violations: primary.violations,
        tolerance: params.tolerance,
        allowed_fraction: params.allowed_fraction,
        pass: Some(primary.pass),
        checks,
        sweep,
        provenance: prov,
        rows,
    })
}

pub(crate) fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(";")
}
