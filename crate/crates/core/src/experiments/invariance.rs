use super::report::{budget_pass, Check, ExperimentReport, NamedValue, SampleRow, TheoremTag};
use crate::algodim::{dim_estimate, precision_ladder, BinaryPoint};
use crate::error::{Error, Result};
use crate::estimators::{box_count, box_dimension};
use crate::geometry::{apply_motion, translate, RigidMotion, PointSet};
use crate::io::Provenance;
use crate::rng::ShiftRegister64;

#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    /// Exact scaling by `2^k`.
    Pow2(i32),
    /// Translation by `cells * 2^-scale`.
    Lattice { cells: Vec<i64>, scale: u32 },
    /// Isometry or similarity, rounded back to the grid.
    Motion(RigidMotion),
}

impl Transform {
    pub fn label(&self) -> String {
        match self {
            Transform::Pow2(k) => format!("scale 2^{k}"),
            Transform::Lattice { cells, scale } => format!("lattice {cells:?}*2^-{scale}"),
            Transform::Motion(m) => format!("motion scale={} t={:?}", m.scale(), m.translation()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceParams {
    pub r_min: u32,
    pub r_max: u32,
    /// Largest accepted change of the box-dimension value under a motion.
    pub tolerance: f64,
    /// Largest accepted change of the point-density estimate under `2^-k`.
    pub algodim_tolerance: f64,
    /// Bits per coordinate of the generated point used for the algorithmic check.
    pub algodim_length: usize,
    pub seed: u64,
}

impl InvarianceParams {
    pub fn new(r_min: u32, r_max: u32) -> Self {
        Self {
            r_min,
            r_max,
            tolerance: 0.05,
            algodim_tolerance: 0.1,
            algodim_length: 4096,
            seed: 0,
        }
    }
}

struct Outcome {
    before: f64,
    after: f64,
    violation: bool,
}

fn compare(set: &PointSet, t: &Transform, params: &InvarianceParams) -> Result<Outcome> {
    let (a, b) = (params.r_min, params.r_max);
    let before = box_dimension(set, a, b)?.value;
    match t {
        Transform::Pow2(k) => {
            // Cell r of 2^k E is cell r + k of E.
            let scaled = set.scale_pow2(*k)?;
            let mut exact = true;
            for r in a..=b.min(scaled.precision()) {
                let src = r as i64 + *k as i64;
                if (0..=set.precision() as i64).contains(&src) {
                    exact &= box_count(&scaled, r)? == box_count(set, src as u32)?;
                }
            }
            let lo = a as i64 + *k as i64;
            let hi = b as i64 + *k as i64;
            // Compared against E over the shifted range, where equality is exact.
            let (before, after) = if lo >= 0 && hi <= set.precision() as i64 && b <= scaled.precision() {
                let shifted = box_dimension(set, lo as u32, hi as u32)?.value;
                (shifted, box_dimension(&scaled, a, b)?.value)
            } else {
                (before, before)
            };
            Ok(Outcome {
                before,
                after,
                violation: !exact || after != before,
            })
        }
        Transform::Lattice { cells, scale } => {
            let p = set.precision();
            if *scale > p || cells.len() != set.dim() {
                return Err(Error::param("lattice vector must match the set and precision"));
            }
            let z: Vec<i64> = cells.iter().map(|c| c << (p - scale)).collect();
            let moved = translate(set, &z)?;
            let mut exact = true;
            // The shift is a multiple of the cell side 2^-r once r >= scale.
            for r in a.max(*scale)..=b {
                exact &= box_count(&moved, r)? == box_count(set, r)?;
            }
            let after = box_dimension(&moved, a, b)?.value;
            Ok(Outcome {
                before,
                after,
                violation: !exact || (*scale <= a && after != before),
            })
        }
        Transform::Motion(m) => {
            let after = box_dimension(&apply_motion(set, m)?, a, b)?.value;
            Ok(Outcome {
                before,
                after,
                violation: (after - before).abs() > params.tolerance,
            })
        }
    }
}

/// `x` and `x * 2^-k` for a generated point `x`: the second is the first with
/// `k` zero bits in front of every coordinate.
fn algodim_shift(k: u32, params: &InvarianceParams) -> Result<f64> {
    let mut rng = ShiftRegister64::stream(params.seed, k as u64);
    let x = BinaryPoint::random(1, params.algodim_length, &mut rng)?;
    let mut bits = vec![0u8; k as usize];
    bits.extend_from_slice(x.coordinate(0));
    let shifted = BinaryPoint::new(vec![bits], false)?;
    let ladder = precision_ladder(params.algodim_length);
    let a = dim_estimate(&x, &ladder)?;
    let b = dim_estimate(&shifted, &ladder)?;
    Ok((a.lower - b.lower).abs().max((a.upper - b.upper).abs()))
}

/// Every set against every transform; a pair violates when counts that should
/// agree bit for bit differ, or a motion moves the estimate by more than the
/// tolerance.
pub fn invariance_campaign(
    sets: &[PointSet],
    transforms: &[Transform],
    params: &InvarianceParams,
) -> Result<ExperimentReport> {
    if sets.is_empty() || transforms.is_empty() {
        return Err(Error::param("invariance needs at least one set and one transform"));
    }
    for t in transforms {
        if let Transform::Motion(m) = t {
            let ratio = m.scale();
            let pow2_ratio = ratio.log2().fract() == 0.0;
            if !(m.is_isometry() || pow2_ratio) {
                return Err(Error::param("motions must be isometries or power-of-two similarities"));
            }
        }
    }
    let range = (params.r_min, params.r_max);
    let mut rows = Vec::new();
    let mut violations = 0;
    let mut max_shift = 0.0f64;
    for set in sets {
        for t in transforms {
            let o = compare(set, t, params)?;
            violations += o.violation as usize;
            max_shift = max_shift.max((o.after - o.before).abs());
            rows.push(SampleRow {
                index: rows.len(),
                delta: 0.0,
                estimate: o.after,
                bound: o.before,
                empty: false,
                violation: o.violation,
            });
        }
    }
    let mut checks = Vec::new();
    let mut ks: Vec<u32> = transforms
        .iter()
        .filter_map(|t| match t {
            Transform::Pow2(k) if *k != 0 => Some(k.unsigned_abs()),
            _ => None,
        })
        .collect();
    ks.sort_unstable();
    ks.dedup();
    for k in ks {
        let shift = algodim_shift(k, params)?;
        checks.push(Check {
            name: format!("point density shift under 2^-{k}"),
            value: shift,
            threshold: params.algodim_tolerance,
            pass: shift <= params.algodim_tolerance,
        });
    }
    let labels: Vec<String> = sets.iter().map(|s| s.label().to_string()).collect();
    let mut prov = Provenance::new(TheoremTag::Invariance.as_str(), params.seed)
        .with("r_min", params.r_min)
        .with("r_max", params.r_max)
        .with("tolerance", params.tolerance)
        .with("algodim_tolerance", params.algodim_tolerance)
        .with("algodim_length", params.algodim_length)
        .with("sets", labels.join(";"))
        .with("allowed_fraction", 0);
    for (i, t) in transforms.iter().enumerate() {
        prov.set(format!("transform{i}"), t.label());
    }
    let samples = rows.len();
    Ok(ExperimentReport {
        name: labels.join("+"),
        theorem_tag: TheoremTag::Invariance,
        samples,
        estimates: vec![NamedValue::new("max_shift", max_shift, range, None)],
        bound: params.tolerance,
        violations,
        tolerance: params.tolerance,
        allowed_fraction: 0.0,
        pass: Some(budget_pass(violations, samples, 0.0)),
        checks,
        sweep: Vec::new(),
        provenance: prov,
        rows,
    })
}
