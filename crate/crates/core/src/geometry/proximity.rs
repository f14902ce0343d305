use std::collections::HashMap;

use super::{pow2, sq_distance, Coords, PointSet, MAX_DIM};
use crate::error::{Error, Result};

/// Distance predicate shared by every proximity routine: `|x - y| <= delta`, with
/// `d2` the squared mantissa distance at precision `p`.
pub fn within(d2: i128, delta: f64, precision: u32) -> bool {
    let dm = delta * pow2(precision as i32);
    (d2 as f64) <= dm * dm
}

fn check_pair(e: &PointSet, f: &PointSet) -> Result<()> {
    if e.dim() != f.dim() {
        return Err(Error::DimensionMismatch(e.dim(), f.dim()));
    }
    if e.precision() != f.precision() {
        return Err(Error::PrecisionMismatch(e.precision(), f.precision()));
    }
    Ok(())
}

/// `{x in E : dist(x, F) <= delta}`.
///
/// F is hashed into dyadic cells of side `2^-r >= delta`, so only the 3^n cells
/// around a query point can hold a neighbor.
pub fn proximal_intersection(e: &PointSet, f: &PointSet, delta: f64) -> Result<PointSet> {
    check_pair(e, f)?;
    if !(delta > 0.0) {
        return Err(Error::param("proximity delta must be positive"));
    }
    let p = e.precision();
    if e.is_empty() || f.is_empty() {
        return Ok(e.filter(|_| false));
    }
    // 2^-r >= delta, and r <= p so the shift is non-negative. Very coarse deltas
    // saturate at a single cell per 2^31 mantissa units.
    let r = ((1.0 / delta).log2().floor() as i64).clamp(p as i64 - 32, p as i64);
    let shift = (p as i64 - r) as u32;
    let n = e.dim();
    let mut grid: HashMap<Coords, Vec<u32>> = HashMap::new();
    for (i, c) in f.coords().iter().enumerate() {
        grid.entry(cell(c, n, shift)).or_default().push(i as u32);
    }
    let offsets = neighbor_offsets(n);
    let fc = f.coords();
    Ok(e.filter(|x| {
        let mut base = [0i64; MAX_DIM];
        for k in 0..n {
            base[k] = x[k] >> shift;
        }
        offsets.iter().any(|off| {
            let mut key = base;
            for k in 0..n {
                key[k] += off[k];
            }
            grid.get(&key).is_some_and(|ids| {
                ids.iter()
                    .any(|&j| within(sq_distance(x, &fc[j as usize][..n]), delta, p))
            })
        })
    }))
}

fn cell(c: &Coords, n: usize, shift: u32) -> Coords {
    let mut k = [0i64; MAX_DIM];
    for i in 0..n {
        k[i] = c[i] >> shift;
    }
    k
}

fn neighbor_offsets(n: usize) -> Vec<Coords> {
    let mut out = vec![[0i64; MAX_DIM]];
    for axis in 0..n {
        out = out
            .into_iter()
            .flat_map(|o| {
                [-1, 0, 1].into_iter().map(move |d| {
                    let mut v = o;
                    v[axis] = d;
                    v
                })
            })
            .collect();
    }
    out
}

/// Static k-d tree answering exact nearest-neighbor distance queries.
pub struct NearestIndex {
    dim: usize,
    precision: u32,
    points: Vec<Coords>,
    axes: Vec<u8>,
}

impl NearestIndex {
    pub fn new(set: &PointSet) -> Self {
        let mut points = set.coords().to_vec();
        let mut axes = vec![0u8; points.len()];
        let n = set.dim();
        build(&mut points, &mut axes, n);
        Self {
            dim: n,
            precision: set.precision(),
            points,
            axes,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Squared mantissa distance from `q` to the nearest indexed point, if that
    /// distance is at most `bound_sq`.
    pub fn nearest_sq_within(&self, q: &[i64], bound_sq: i128) -> Option<i128> {
        let mut best = bound_sq.saturating_add(1);
        self.search(0, self.points.len(), q, &mut best);
        (best <= bound_sq).then_some(best)
    }

    pub fn nearest_sq(&self, q: &[i64]) -> Option<i128> {
        self.nearest_sq_within(q, i128::MAX - 1)
    }

    /// Squared mantissa radius of a real distance, rounded up.
    pub fn radius_sq(&self, delta: f64) -> i128 {
        let dm = delta * pow2(self.precision as i32);
        (dm * dm).ceil() as i128
    }

    fn search(&self, lo: usize, hi: usize, q: &[i64], best: &mut i128) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        let p = &self.points[mid];
        let d2 = sq_distance(q, &p[..self.dim]);
        if d2 < *best {
            *best = d2;
        }
        let axis = self.axes[mid] as usize;
        let diff = (q[axis] - p[axis]) as i128;
        let (near, far) = if diff < 0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(near.0, near.1, q, best);
        if diff * diff < *best {
            self.search(far.0, far.1, q, best);
        }
    }
}

fn build(points: &mut [Coords], axes: &mut [u8], n: usize) {
    if points.len() <= 1 {
        if let Some(a) = axes.first_mut() {
            *a = 0;
        }
        return;
    }
    let axis = (0..n)
        .max_by_key(|&k| {
            let (lo, hi) = points
                .iter()
                .fold((i64::MAX, i64::MIN), |(lo, hi), c| (lo.min(c[k]), hi.max(c[k])));
            hi - lo
        })
        .unwrap_or(0);
    let mid = points.len() / 2;
    points.select_nth_unstable_by_key(mid, |c| c[axis]);
    axes[mid] = axis as u8;
    let (lp, rp) = points.split_at_mut(mid);
    let (la, ra) = axes.split_at_mut(mid);
    build(lp, la, n);
    build(&mut rp[1..], &mut ra[1..], n);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set1(xs: &[f64]) -> PointSet {
        PointSet::from_f64_points(1, 30, xs.iter().map(std::slice::from_ref), "t").unwrap()
    }

    #[test]
    fn self_intersection_is_identity() {
        let e = set1(&[0.0, 0.1, 0.7, 1.3]);
        for d in [1e-9, 0.01, 1.0, 100.0] {
            assert_eq!(proximal_intersection(&e, &e, d).unwrap(), e);
        }
    }

    #[test]
    fn disjoint_below_gap() {
        let e = set1(&[0.0, 0.125]);
        let f = set1(&[0.5, 0.625]);
        assert!(proximal_intersection(&e, &f, 0.37).unwrap().is_empty());
        assert_eq!(proximal_intersection(&e, &f, 0.375).unwrap().len(), 1);
    }

    #[test]
    fn worked_example() {
        let e = set1(&[0.0, 1.0]);
        let f = set1(&[0.4]);
        assert_eq!(proximal_intersection(&e, &f, 0.45).unwrap(), set1(&[0.0]));
    }

    #[test]
    fn rejects_nonpositive_delta() {
        let e = set1(&[0.0]);
        assert!(proximal_intersection(&e, &e, 0.0).is_err());
        assert!(proximal_intersection(&e, &e, -1.0).is_err());
    }

    #[test]
    fn kd_tree_matches_linear_scan() {
        let mut rng = crate::rng::ShiftRegister64::new(11);
        let pts: Vec<[f64; 3]> = (0..300)
            .map(|_| [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)])
            .collect();
        let s = PointSet::from_f64_points(3, 30, pts.iter().map(|p| &p[..]), "k").unwrap();
        let idx = NearestIndex::new(&s);
        for _ in 0..200 {
            let q: Vec<i64> = (0..3)
                .map(|_| super::super::to_mantissa(rng.uniform(-1.2, 1.2), 30).unwrap())
                .collect();
            let brute = s.iter().map(|p| sq_distance(&q, p)).min().unwrap();
            assert_eq!(idx.nearest_sq(&q), Some(brute));
        }
    }
}
