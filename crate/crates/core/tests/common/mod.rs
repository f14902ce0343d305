#![allow(dead_code)]

use std::path::PathBuf;

use fdim::geometry::PointSet;
use fdim::rng::ShiftRegister64;

pub const P: u32 = 30;

pub fn calibration_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../calibration/fdim-calibration.txt")
}

/// `count` points with mantissas in `[0, 2^span)` per coordinate.
pub fn random_set(rng: &mut ShiftRegister64, count: usize, dim: usize, span: u32) -> PointSet {
    let flat: Vec<i64> = (0..count * dim)
        .map(|_| (rng.next_u64() % (1u64 << span)) as i64)
        .collect();
    PointSet::from_mantissas(dim, P, &flat, "random").unwrap()
}

fn sq(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| ((x - y) as i128).pow(2)).sum()
}

/// Smallest `sum diam^s` over all partitions into parts of diameter at most
/// `delta`, singletons costing `2^-p`. Subset DP, so keep it to a dozen points.
pub fn exhaustive_cover_optimum(set: &PointSet, delta: f64, s: f64) -> f64 {
    let pts: Vec<&[i64]> = set.iter().collect();
    let n = pts.len();
    assert!(n <= 14);
    let unit = 2f64.powi(-(set.precision() as i32));
    let full = (1usize << n) - 1;
    let mut maxd2 = vec![0i128; full + 1];
    for mask in 1..=full {
        let hi = usize::BITS - 1 - mask.leading_zeros();
        let rest = mask & !(1 << hi);
        let mut d = maxd2[rest];
        for j in 0..n {
            if rest >> j & 1 == 1 {
                d = d.max(sq(pts[hi as usize], pts[j]));
            }
        }
        maxd2[mask] = d;
    }
    let cost = |mask: usize| -> Option<f64> {
        let diam = (maxd2[mask] as f64).sqrt() * unit;
        if diam > delta * (1.0 + 1e-12) {
            return None;
        }
        Some(if diam == 0.0 { unit } else { diam }.powf(s))
    };
    let mut best = vec![f64::INFINITY; full + 1];
    best[0] = 0.0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask & !low;
        // Every subset of `rest`, joined with the lowest point.
        let mut sub = rest;
        loop {
            let part = sub | low;
            if let Some(c) = cost(part) {
                let v = c + best[mask & !part];
                if v < best[mask] {
                    best[mask] = v;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    best[full]
}

/// `{x in E : some y in F with |x - y| <= delta}` by scanning every pair.
pub fn brute_proximal(e: &PointSet, f: &PointSet, delta: f64) -> PointSet {
    let scale = delta * 2f64.powi(e.precision() as i32);
    e.filter(|x| f.iter().any(|y| (sq(x, y) as f64) <= scale * scale))
}
