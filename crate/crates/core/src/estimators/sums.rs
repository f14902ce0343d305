//! Direct cover and packing sums at a finite resolution.

use crate::error::{Error, Result};
use crate::geometry::{diameter, pow2, sq_distance, PointSet};

use super::regression::{box_dimension, DimensionEstimate};

const EXPONENT_TOL: f64 = 1e-3;

/// Diameter with singletons counted as one grid unit `2^-p`.
pub fn effective_diameter(set: &PointSet) -> Result<f64> {
    let d = diameter(set)?;
    Ok(if d == 0.0 { pow2(-(set.precision() as i32)) } else { d })
}

/// `sum diam(U_i)^s` over the cover elements.
pub fn hausdorff_sum(cover: &[PointSet], s: f64) -> Result<f64> {
    let d = cover
        .iter()
        .map(effective_diameter)
        .collect::<Result<Vec<_>>>()?;
    Ok(power_sum(&d, s))
}

pub fn power_sum(diameters: &[f64], s: f64) -> f64 {
    diameters.iter().map(|d| d.powf(s)).sum()
}

/// Scale of the dyadic cells used by [`greedy_cover`]: the coarsest `r` with
/// `2^-r * sqrt(n) <= delta`, capped at the precision.
pub fn cover_scale(dim: usize, precision: u32, delta: f64) -> u32 {
    let r = ((dim as f64).sqrt() / delta).log2().ceil().max(0.0);
    (r as u32).min(precision)
}

/// Partition of the points by dyadic cell of side at most `delta / sqrt(n)`.
pub fn greedy_cover(set: &PointSet, delta: f64) -> Result<Vec<PointSet>> {
    if !(delta > 0.0) {
        return Err(Error::param("cover delta must be positive"));
    }
    let shift = set.precision() - cover_scale(set.dim(), set.precision(), delta);
    let mut out: Vec<PointSet> = Vec::new();
    let mut start = 0;
    // Sorted lexicographic order does not group cells, so bucket explicitly.
    let mut keyed: Vec<(Vec<i64>, usize)> = set
        .iter()
        .enumerate()
        .map(|(i, c)| (c.iter().map(|&m| m >> shift).collect(), i))
        .collect();
    keyed.sort();
    while start < keyed.len() {
        let mut end = start + 1;
        while end < keyed.len() && keyed[end].0 == keyed[start].0 {
            end += 1;
        }
        let flat: Vec<i64> = keyed[start..end]
            .iter()
            .flat_map(|(_, i)| set.point(*i).to_vec())
            .collect();
        out.push(PointSet::from_mantissas(set.dim(), set.precision(), &flat, set.label())?);
        start = end;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
}

/// Disjoint balls centered at set points: radii `delta/2, delta/4, ...` down to
/// `2^-p`, each level scanned in lexicographic center order.
pub fn greedy_packing(set: &PointSet, delta: f64) -> Result<Vec<Ball>> {
    if !(delta > 0.0) {
        return Err(Error::param("packing delta must be positive"));
    }
    let unit = pow2(set.precision() as i32);
    let floor = pow2(-(set.precision() as i32));
    let mut used = vec![false; set.len()];
    let mut balls: Vec<Ball> = Vec::new();
    let mut rho = delta / 2.0;
    while rho >= floor {
        for i in 0..set.len() {
            if used[i] {
                continue;
            }
            let x = set.point(i);
            let free = balls.iter().all(|b| {
                let reach = (rho + b.radius) * unit;
                sq_distance(x, set.point(b.center)) as f64 > reach * reach
            });
            if free {
                used[i] = true;
                balls.push(Ball { center: i, radius: rho });
            }
        }
        rho /= 2.0;
    }
    Ok(balls)
}

/// `sum (2 rho_i)^s` over [`greedy_packing`].
pub fn packing_sum(set: &PointSet, delta: f64, s: f64) -> Result<f64> {
    if s < 0.0 {
        return Err(Error::param("exponent must be nonnegative"));
    }
    let d: Vec<f64> = greedy_packing(set, delta)?
        .iter()
        .map(|b| 2.0 * b.radius)
        .collect();
    Ok(power_sum(&d, s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SumKind {
    Hausdorff,
    Packing,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CriticalExponent {
    pub value: f64,
    /// `(delta, crossing exponent)` for every delta in the sequence.
    pub per_delta: Vec<(f64, f64)>,
    /// The crossing exponents were not monotone in delta.
    pub monotonicity_violated: bool,
    /// Present when the value came from box counting instead.
    pub fallback: Option<DimensionEstimate>,
}

/// Exponent where the sum at the smallest delta crosses 1, by bisection on `[0, n]`.
///
/// Shrinking delta may only raise the Hausdorff crossing and only lower the
/// packing one; otherwise the box-counting estimate over the matching scales is
/// returned with a flag.
pub fn critical_exponent(set: &PointSet, kind: SumKind, deltas: &[f64]) -> Result<CriticalExponent> {
    if deltas.len() < 2 || deltas.windows(2).any(|w| w[1] >= w[0]) || deltas[deltas.len() - 1] <= 0.0 {
        return Err(Error::param("delta sequence must be positive, strictly decreasing, length >= 2"));
    }
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = set.dim() as f64;
    let mut per_delta = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let diam: Vec<f64> = match kind {
            SumKind::Hausdorff => greedy_cover(set, delta)?
                .iter()
                .map(effective_diameter)
                .collect::<Result<_>>()?,
            SumKind::Packing => greedy_packing(set, delta)?
                .iter()
                .map(|b| 2.0 * b.radius)
                .collect(),
        };
        per_delta.push((delta, crossing(&diam, n)));
    }
    let slack = EXPONENT_TOL;
    let violated = per_delta.windows(2).any(|w| match kind {
        SumKind::Hausdorff => w[1].1 < w[0].1 - slack,
        SumKind::Packing => w[1].1 > w[0].1 + slack,
    });
    let value = per_delta[per_delta.len() - 1].1;
    if !violated {
        return Ok(CriticalExponent {
            value,
            per_delta,
            monotonicity_violated: false,
            fallback: None,
        });
    }
    let p = set.precision();
    let r_of = |d: f64| ((1.0 / d).log2().round().max(0.0) as u32).min(p);
    let (lo, hi) = (r_of(deltas[0]), r_of(deltas[deltas.len() - 1]).max(r_of(deltas[0]) + 1));
    let est = box_dimension(set, lo, hi.min(p))?;
    Ok(CriticalExponent {
        value: est.value,
        per_delta,
        monotonicity_violated: true,
        fallback: Some(est),
    })
}

/// Root of `sum d_i^s = 1` in `[0, n]`, clamped at the ends.
fn crossing(diam: &[f64], n: f64) -> f64 {
    let f = |s: f64| power_sum(diam, s) - 1.0;
    if f(0.0) <= 0.0 {
        return 0.0;
    }
    if f(n) > 0.0 {
        return n;
    }
    let (mut lo, mut hi) = (0.0, n);
    while hi - lo > EXPONENT_TOL / 4.0 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
