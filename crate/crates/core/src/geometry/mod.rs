//! Dyadic fixed-point point sets.
//!
//! Every coordinate is stored as a signed integer mantissa `m` with value `m * 2^-p`,
//! where the precision `p` is shared by all points of a set. Grid cells, products
//! and translations are therefore exact integer operations.

mod io;
mod motion;
mod proximity;

pub use io::{
    decode_points, encode_points, points_from_csv, points_to_csv, read_points, read_points_csv,
    write_points, write_points_csv, POINTS_MAGIC,
};
pub use motion::{apply_motion, RigidMotion};
pub(crate) use motion::apply_motion_clipped;
pub use proximity::{proximal_intersection, within, NearestIndex};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 4;
pub const DEFAULT_PRECISION: u32 = 30;
/// Mantissa magnitude bound: `|x| <= 2^31 * 2^-p`.
pub const WORKSPACE_MANTISSA: i64 = 1 << 31;
/// Largest precision a set may carry (keeps `m << k` shifts inside i64).
pub const MAX_PRECISION: u32 = 62;
pub const DEFAULT_PRODUCT_CAP: u64 = 100_000_000;

pub(crate) type Coords = [i64; MAX_DIM];

/// Round `x * 2^p` to the nearest integer, ties to even.
pub fn to_mantissa(x: f64, precision: u32) -> Result<i64> {
    let scaled = (x * pow2(precision as i32)).round_ties_even();
    if !scaled.is_finite() || scaled.abs() > WORKSPACE_MANTISSA as f64 {
        return Err(Error::WorkspaceOverflow);
    }
    Ok(scaled as i64)
}

pub fn from_mantissa(m: i64, precision: u32) -> f64 {
    m as f64 * pow2(-(precision as i32))
}

pub(crate) fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

fn check_dim(n: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::BadDimension(n))
    }
}

fn check_mantissa(m: i64) -> Result<()> {
    if m.abs() > WORKSPACE_MANTISSA {
        Err(Error::WorkspaceOverflow)
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    coords: Vec<i64>,
    precision: u32,
}

impl Point {
    pub fn new(coords: Vec<i64>, precision: u32) -> Result<Self> {
        check_dim(coords.len())?;
        if precision > MAX_PRECISION {
            return Err(Error::param(format!("precision {precision} > {MAX_PRECISION}")));
        }
        coords.iter().try_for_each(|&m| check_mantissa(m))?;
        Ok(Self { coords, precision })
    }

    pub fn from_f64(coords: &[f64], precision: u32) -> Result<Self> {
        let m = coords
            .iter()
            .map(|&x| to_mantissa(x, precision))
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, precision)
    }

    pub fn mantissas(&self) -> &[i64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|&m| from_mantissa(m, self.precision)).collect()
    }
}

/// Index of the half-open dyadic cube of side `2^-r` containing the point.
pub fn dyadic_cell(point: &Point, r: u32) -> Result<Vec<i64>> {
    if r > point.precision {
        return Err(Error::ScaleBeyondPrecision {
            scale: r,
            precision: point.precision,
        });
    }
    let shift = point.precision - r;
    Ok(point.coords.iter().map(|&m| m >> shift).collect())
}

/// Finite set of points at a common precision, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    precision: u32,
    points: Vec<Coords>,
    label: String,
}

impl PointSet {
    pub fn empty(dim: usize, precision: u32, label: impl Into<String>) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            precision,
            points: Vec::new(),
            label: label.into(),
        })
    }

    /// Builds a set from a flat list of mantissas (`dim` per point), sorting and
    /// removing duplicates.
    pub fn from_mantissas(
        dim: usize,
        precision: u32,
        flat: &[i64],
        label: impl Into<String>,
    ) -> Result<Self> {
        check_dim(dim)?;
        if precision > MAX_PRECISION {
            return Err(Error::param(format!("precision {precision} > {MAX_PRECISION}")));
        }
        if flat.len() % dim != 0 {
            return Err(Error::param("mantissa count is not a multiple of dim"));
        }
        let mut points = Vec::with_capacity(flat.len() / dim);
        for chunk in flat.chunks_exact(dim) {
            let mut c = [0i64; MAX_DIM];
            for (slot, &m) in c.iter_mut().zip(chunk) {
                check_mantissa(m)?;
                *slot = m;
            }
            points.push(c);
        }
        Ok(Self::from_coords(dim, precision, points, label.into()))
    }

    pub fn from_f64_points<'a, I>(
        dim: usize,
        precision: u32,
        points: I,
        label: impl Into<String>,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        check_dim(dim)?;
        let mut flat = Vec::new();
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch(dim, p.len()));
            }
            for &x in p {
                flat.push(to_mantissa(x, precision)?);
            }
        }
        Self::from_mantissas(dim, precision, &flat, label)
    }

    pub(crate) fn from_coords(
        dim: usize,
        precision: u32,
        mut points: Vec<Coords>,
        label: String,
    ) -> Self {
        points.sort_unstable();
        points.dedup();
        Self {
            dim,
            precision,
            points,
            label,
        }
    }

    /// Caller guarantees sorted, deduplicated, in-bounds coordinates.
    pub(crate) fn from_sorted_coords(
        dim: usize,
        precision: u32,
        points: Vec<Coords>,
        label: String,
    ) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        Self {
            dim,
            precision,
            points,
            label,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[i64] {
        &self.points[i][..self.dim]
    }

    pub fn point_owned(&self, i: usize) -> Point {
        Point {
            coords: self.point(i).to_vec(),
            precision: self.precision,
        }
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[i64]> + '_ {
        self.points.iter().map(move |c| &c[..self.dim])
    }

    pub(crate) fn coords(&self) -> &[Coords] {
        &self.points
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        if p.len() != self.dim {
            return false;
        }
        let mut key = [0i64; MAX_DIM];
        key[..self.dim].copy_from_slice(p);
        self.points.binary_search(&key).is_ok()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.iter()
            .map(|p| p.iter().map(|&m| from_mantissa(m, self.precision)).collect())
            .collect()
    }

    /// Per-axis (min, max) mantissas; `None` for the empty set.
    pub fn bounding_box(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let first = self.points.first()?;
        let mut lo = first[..self.dim].to_vec();
        let mut hi = lo.clone();
        for p in self.iter() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        Some((lo, hi))
    }

    /// Center of the bounding box in real coordinates.
    pub fn center(&self) -> Option<Vec<f64>> {
        let (lo, hi) = self.bounding_box()?;
        Some(
            lo.iter()
                .zip(&hi)
                .map(|(&a, &b)| from_mantissa(a, self.precision) * 0.5 + from_mantissa(b, self.precision) * 0.5)
                .collect(),
        )
    }

    /// Keeps the points for which `keep` returns true.
    pub fn filter(&self, mut keep: impl FnMut(&[i64]) -> bool) -> PointSet {
        let points = self
            .points
            .iter()
            .filter(|c| keep(&c[..self.dim]))
            .copied()
            .collect();
        Self::from_sorted_coords(self.dim, self.precision, points, self.label.clone())
    }

    /// Keeps the points whose index satisfies `keep`.
    pub fn select(&self, mut keep: impl FnMut(usize) -> bool) -> PointSet {
        let points = (0..self.points.len())
            .filter(|&i| keep(i))
            .map(|i| self.points[i])
            .collect();
        Self::from_sorted_coords(self.dim, self.precision, points, self.label.clone())
    }

    /// Projection onto the coordinate range `axes`, deduplicated.
    pub fn project(&self, axes: std::ops::Range<usize>) -> Result<PointSet> {
        if axes.is_empty() || axes.end > self.dim {
            return Err(Error::param("projection axes out of range"));
        }
        let dim = axes.len();
        let points = self
            .points
            .iter()
            .map(|c| {
                let mut out = [0i64; MAX_DIM];
                out[..dim].copy_from_slice(&c[axes.clone()]);
                out
            })
            .collect();
        Ok(Self::from_coords(dim, self.precision, points, self.label.clone()))
    }

    /// Exact scaling by `2^k`: the mantissas are kept and the precision becomes `p - k`.
    pub fn scale_pow2(&self, k: i32) -> Result<PointSet> {
        let p = self.precision as i64 - k as i64;
        if !(0..=MAX_PRECISION as i64).contains(&p) {
            return Err(Error::param(format!("scaling by 2^{k} leaves precision range")));
        }
        Ok(Self {
            dim: self.dim,
            precision: p as u32,
            points: self.points.clone(),
            label: format!("{}*2^{k}", self.label),
        })
    }

    /// Same real points at a finer precision (exact).
    pub fn refine_precision(&self, precision: u32) -> Result<PointSet> {
        if precision < self.precision || precision > MAX_PRECISION {
            return Err(Error::param("refine_precision needs a finer precision"));
        }
        let shift = precision - self.precision;
        let mut points = self.points.clone();
        for c in &mut points {
            for m in &mut c[..self.dim] {
                let v = m.checked_shl(shift).ok_or(Error::WorkspaceOverflow)?;
                check_mantissa(v)?;
                *m = v;
            }
        }
        Ok(Self::from_sorted_coords(self.dim, precision, points, self.label.clone()))
    }
}

/// Largest Euclidean distance between two points of the set.
pub fn diameter(set: &PointSet) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptyDiameter);
    }
    Ok((max_sq_distance(set) as f64).sqrt() * pow2(-(set.precision as i32)))
}

pub(crate) fn sq_distance(a: &[i64], b: &[i64]) -> i128 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = (x - y) as i128;
            d * d
        })
        .sum()
}

fn max_sq_distance(set: &PointSet) -> i128 {
    use rayon::prelude::*;
    let pts = set.coords();
    let dim = set.dim;
    if dim == 1 {
        let d = (pts[pts.len() - 1][0] - pts[0][0]) as i128;
        return d * d;
    }
    (0..pts.len())
        .into_par_iter()
        .with_min_len(256)
        .map(|i| {
            let a = &pts[i][..dim];
            pts[i + 1..]
                .iter()
                .map(|b| sq_distance(a, &b[..dim]))
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// All concatenated pairs `(x, y)`, `x` from `e` and `y` from `f`.
pub fn cartesian_product(e: &PointSet, f: &PointSet, cap: u64) -> Result<PointSet> {
    if e.precision != f.precision {
        return Err(Error::PrecisionMismatch(e.precision, f.precision));
    }
    let dim = e.dim + f.dim;
    if dim > MAX_DIM {
        return Err(Error::BadDimension(dim));
    }
    let required = e.len() as u128 * f.len() as u128;
    if required > cap as u128 {
        return Err(Error::ProductTooLarge { required, cap });
    }
    let mut points = Vec::with_capacity(required as usize);
    for x in e.iter() {
        for y in f.iter() {
            let mut c = [0i64; MAX_DIM];
            c[..e.dim].copy_from_slice(x);
            c[e.dim..dim].copy_from_slice(y);
            points.push(c);
        }
    }
    // Lexicographic order of sorted factors is already lexicographic on pairs.
    Ok(PointSet::from_sorted_coords(
        dim,
        e.precision,
        points,
        format!("{}x{}", e.label, f.label),
    ))
}

/// Shifts every point by the mantissa vector `z`.
pub fn translate(set: &PointSet, z: &[i64]) -> Result<PointSet> {
    if z.len() != set.dim {
        return Err(Error::DimensionMismatch(set.dim, z.len()));
    }
    let mut points = set.points.clone();
    for c in &mut points {
        for (m, &dz) in c.iter_mut().zip(z) {
            let v = m.checked_add(dz).ok_or(Error::WorkspaceOverflow)?;
            check_mantissa(v)?;
            *m = v;
        }
    }
    Ok(PointSet::from_sorted_coords(
        set.dim,
        set.precision,
        points,
        set.label.clone(),
    ))
}

/// Translation by a real vector, rounded to the set's precision first.
pub fn translate_f64(set: &PointSet, z: &[f64]) -> Result<PointSet> {
    let m = z
        .iter()
        .map(|&x| to_mantissa(x, set.precision))
        .collect::<Result<Vec<_>>>()?;
    translate(set, &m)
}
