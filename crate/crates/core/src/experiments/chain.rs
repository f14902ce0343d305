use rayon::prelude::*;

use super::report::{budget_pass, ExperimentReport, NamedValue, SampleRow, TheoremTag};
use crate::algodim::{chain_rule_residuals, dim_estimate, precision_ladder, BinaryPoint, Calibration};
use crate::error::{Error, Result};
use crate::estimators::box_dimension;
use crate::geometry::PointSet;
use crate::io::Provenance;
use crate::rng::ShiftRegister64;

pub const MIN_CHAIN_PAIRS: usize = 20;
pub const MIN_PROBE_POINTS: usize = 50;

/// `count` pairs of one-dimensional generator points with `len` bits each.
pub fn prng_pairs(count: usize, len: usize, seed: u64) -> Result<Vec<(BinaryPoint, BinaryPoint)>> {
    (0..count)
        .map(|i| {
            let mut rng = ShiftRegister64::stream(seed, i as u64);
            Ok((BinaryPoint::random(1, len, &mut rng)?, BinaryPoint::random(1, len, &mut rng)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainParams {
    pub allowed_fraction: f64,
    /// Recorded in the report; the pairs themselves carry the randomness.
    pub seed: u64,
}

impl Default for ChainParams {
    fn default() -> Self {
        Self {
            allowed_fraction: 0.10,
            seed: 0,
        }
    }
}

/// A pair passes when all four chain residuals clear `-sigma(r) / r` at the
/// smallest tail precision.
pub fn chain_campaign(
    pairs: &[(BinaryPoint, BinaryPoint)],
    r_list: &[usize],
    calibration: &Calibration,
    params: &ChainParams,
) -> Result<ExperimentReport> {
    if pairs.len() < MIN_CHAIN_PAIRS {
        return Err(Error::InsufficientSamples {
            needed: MIN_CHAIN_PAIRS,
            got: pairs.len(),
        });
    }
    let results = pairs
        .par_iter()
        .map(|(x, y)| chain_rule_residuals(x, y, r_list))
        .collect::<Result<Vec<_>>>()?;
    let r = results[0].r();
    let slack = calibration.sigma(r);
    let tol = -slack / r as f64;
    let mut rows = Vec::with_capacity(results.len());
    let mut violations = 0;
    let mut sums = [0.0f64; 4];
    let mut worst = f64::INFINITY;
    for (i, res) in results.iter().enumerate() {
        let ok = res.passes(slack).iter().all(|&b| b);
        violations += !ok as usize;
        let min = res.residuals.iter().copied().fold(f64::INFINITY, f64::min);
        worst = worst.min(min);
        for (s, v) in sums.iter_mut().zip(res.residuals) {
            *s += v;
        }
        rows.push(SampleRow {
            index: i,
            delta: 0.0,
            estimate: min,
            bound: tol,
            empty: false,
            violation: !ok,
        });
    }
    let n = results.len() as f64;
    let range = (r as u32, results[0].joint.r_max as u32);
    let mut estimates = vec![NamedValue::new("pass_fraction", 1.0 - violations as f64 / n, range, None)];
    for (k, s) in sums.iter().enumerate() {
        estimates.push(NamedValue::new(format!("mean_residual_{}", k + 1), s / n, range, None));
    }
    estimates.push(NamedValue::new("min_residual", worst, range, None));
    let prov = Provenance::new(TheoremTag::Chain.as_str(), params.seed)
        .with("pairs", pairs.len())
        .with("r_list", join(r_list))
        .with("slack_bits", slack)
        .with("calibration_c0", calibration.c0)
        .with("calibration_c1", calibration.c1)
        .with("encoder", &calibration.encoder)
        .with("allowed_fraction", params.allowed_fraction);
    Ok(ExperimentReport {
        name: format!("{}-pairs", pairs.len()),
        theorem_tag: TheoremTag::Chain,
        samples: pairs.len(),
        estimates,
        bound: tol,
        violations,
        tolerance: slack,
        allowed_fraction: params.allowed_fraction,
        pass: Some(budget_pass(violations, pairs.len(), params.allowed_fraction)),
        checks: Vec::new(),
        sweep: Vec::new(),
        provenance: prov,
        rows,
    })
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeParams {
    pub seed: u64,
    /// Scale range of the box-dimension reference.
    pub r_min: u32,
    pub r_max: u32,
}

/// Exact binary expansions of the chosen points after moving the bounding box
/// corner to the origin and rescaling by a power of two into `[0, 1)^n`.
pub fn normalized_points(set: &PointSet, indices: &[usize]) -> Result<(Vec<BinaryPoint>, usize)> {
    let (lo, hi) = set.bounding_box().ok_or(Error::EmptySet)?;
    let extent = lo.iter().zip(&hi).map(|(a, b)| (b - a) as u64).max().unwrap_or(0);
    let width = (set.precision() as usize).max(64 - extent.leading_zeros() as usize);
    let points = indices
        .iter()
        .map(|&i| {
            let coords = set
                .point(i)
                .iter()
                .zip(&lo)
                .map(|(&m, &l)| {
                    let v = (m - l) as u64;
                    (1..=width).map(|j| ((v >> (width - j)) & 1) as u8).collect()
                })
                .collect();
            BinaryPoint::new(coords, true)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((points, width))
}

/// Point densities of sampled members against the set's box dimension. Report
/// only: `pass` is `None`.
pub fn p2s_probe(
    set: &PointSet,
    sample_count: usize,
    r_list: Option<&[usize]>,
    params: &ProbeParams,
) -> Result<ExperimentReport> {
    if sample_count < MIN_PROBE_POINTS {
        return Err(Error::InsufficientSamples {
            needed: MIN_PROBE_POINTS,
            got: sample_count,
        });
    }
    if set.len() < sample_count {
        return Err(Error::InsufficientSamples {
            needed: sample_count,
            got: set.len(),
        });
    }
    // Partial Fisher-Yates: distinct members.
    let mut rng = ShiftRegister64::new(params.seed);
    let mut order: Vec<usize> = (0..set.len()).collect();
    for i in 0..sample_count {
        let j = i + (rng.next_u64() % (set.len() - i) as u64) as usize;
        order.swap(i, j);
    }
    order.truncate(sample_count);
    let (points, width) = normalized_points(set, &order)?;
    let ladder = match r_list {
        Some(l) => l.to_vec(),
        None => precision_ladder(width),
    };
    let dens = points
        .par_iter()
        .map(|x| dim_estimate(x, &ladder))
        .collect::<Result<Vec<_>>>()?;
    let reference = box_dimension(set, params.r_min, params.r_max)?.value;
    let max_upper = dens.iter().map(|d| d.upper).fold(f64::NEG_INFINITY, f64::max);
    let max_lower = dens.iter().map(|d| d.lower).fold(f64::NEG_INFINITY, f64::max);
    let mean_lower = dens.iter().map(|d| d.lower).sum::<f64>() / dens.len() as f64;
    let rows = order
        .iter()
        .zip(&dens)
        .enumerate()
        .map(|(i, (_, d))| SampleRow {
            index: i,
            delta: 0.0,
            estimate: d.upper,
            bound: reference,
            empty: false,
            violation: false,
        })
        .collect();
    let tail = (dens[0].r_min as u32, dens[0].r_max as u32);
    let boxr = (params.r_min, params.r_max);
    let prov = Provenance::new(TheoremTag::PointToSet.as_str(), params.seed)
        .with("sample_count", sample_count)
        .with("r_list", join(&ladder))
        .with("box_r_min", params.r_min)
        .with("box_r_max", params.r_max)
        .with("bits_per_coordinate", width)
        .with("set", format!("{} ({} points)", set.label(), set.len()))
        .with("allowed_fraction", "n/a");
    Ok(ExperimentReport {
        name: set.label().to_string(),
        theorem_tag: TheoremTag::PointToSet,
        samples: sample_count,
        estimates: vec![
            NamedValue::new("gap", max_upper - reference, tail, None),
            NamedValue::new("max_point_upper", max_upper, tail, None),
            NamedValue::new("max_point_lower", max_lower, tail, None),
            NamedValue::new("mean_point_lower", mean_lower, tail, None),
            NamedValue::new("box_dimension", reference, boxr, None),
        ],
        bound: reference,
        violations: 0,
        tolerance: 0.0,
        allowed_fraction: 0.0,
        pass: None,
        checks: Vec::new(),
        sweep: Vec::new(),
        provenance: prov,
        rows,
    })
}
