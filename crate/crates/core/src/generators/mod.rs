//! Self-similar sets with known similarity dimension.

mod parse;
mod shapes;

pub use parse::{parse_ifs, read_ifs};
pub use shapes::{
    cantor_ifs, cantor_set, cantor_set_with, koch_curve_ifs, koch_segment_ifs, koch_snowflake,
    koch_snowflake_with, sierpinski, sierpinski_ifs, sierpinski_with,
};

use crate::error::{Error, Result};
use crate::geometry::{to_mantissa, PointSet, DEFAULT_PRECISION, MAX_DIM};

/// Default limit on `|maps|^depth`.
pub const DEFAULT_ATTRACTOR_CAP: u64 = 1 << 24;
const MORAN_TOL: f64 = 1e-12;

/// `x -> ratio * R x + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Similarity {
    ratio: f64,
    rotation: Vec<f64>,
    offset: Vec<f64>,
}

impl Similarity {
    pub fn new(ratio: f64, rotation: Vec<f64>, offset: Vec<f64>) -> Result<Self> {
        let n = offset.len();
        if !(1..=MAX_DIM).contains(&n) {
            return Err(Error::BadDimension(n));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::param(format!("similarity ratio {ratio} is not in (0, 1)")));
        }
        if rotation.len() != n * n {
            return Err(Error::param("rotation must be dim x dim"));
        }
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| rotation[k * n + i] * rotation[k * n + j]).sum();
                if (dot - f64::from(u8::from(i == j))).abs() > 1e-9 {
                    return Err(Error::param("similarity rotation is not orthogonal"));
                }
            }
        }
        Ok(Self {
            ratio,
            rotation,
            offset,
        })
    }

    /// No rotation.
    pub fn scaling(ratio: f64, offset: Vec<f64>) -> Result<Self> {
        let n = offset.len();
        let mut rotation = vec![0.0; n * n];
        for i in 0..n {
            rotation[i * n + i] = 1.0;
        }
        Self::new(ratio, rotation, offset)
    }

    /// Planar map with rotation by `degrees`.
    pub fn planar(ratio: f64, degrees: f64, offset: [f64; 2]) -> Result<Self> {
        let (s, c) = degrees.to_radians().sin_cos();
        Self::new(ratio, vec![c, -s, s, c], offset.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn rotation(&self) -> &[f64] {
        &self.rotation
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let dot: f64 = (0..n).map(|k| self.rotation[i * n + k] * x[k]).sum();
            out[i] = self.ratio * dot + self.offset[i];
        }
    }

    /// Solves `(I - ratio R) x = offset`; unique because the map contracts.
    pub fn fixed_point(&self) -> Vec<f64> {
        let n = self.dim();
        let mut a = vec![0.0; n * (n + 1)];
        for i in 0..n {
            for k in 0..n {
                let id = if i == k { 1.0 } else { 0.0 };
                a[i * (n + 1) + k] = id - self.ratio * self.rotation[i * n + k];
            }
            a[i * (n + 1) + n] = self.offset[i];
        }
        let w = n + 1;
        for c in 0..n {
            let piv = (c..n)
                .max_by(|&i, &j| a[i * w + c].abs().total_cmp(&a[j * w + c].abs()))
                .unwrap();
            for k in 0..w {
                a.swap(piv * w + k, c * w + k);
            }
            for i in 0..n {
                if i != c {
                    let f = a[i * w + c] / a[c * w + c];
                    for k in c..w {
                        a[i * w + k] -= f * a[c * w + k];
                    }
                }
            }
        }
        (0..n).map(|i| a[i * w + n] / a[i * w + i]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IteratedFunctionSystem {
    dim: usize,
    maps: Vec<Similarity>,
    label: String,
}

impl IteratedFunctionSystem {
    pub fn new(maps: Vec<Similarity>, label: impl Into<String>) -> Result<Self> {
        let dim = maps
            .first()
            .ok_or_else(|| Error::param("an IFS needs at least one map"))?
            .dim();
        if let Some(m) = maps.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, m.dim()));
        }
        Ok(Self {
            dim,
            maps,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn maps(&self) -> &[Similarity] {
        &self.maps
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.maps.iter().map(Similarity::ratio).collect()
    }

    /// Text form accepted by [`parse_ifs`].
    pub fn to_text(&self) -> String {
        let mut s = format!("dim={}\nlabel={}\n", self.dim, self.label);
        for m in &self.maps {
            let offset: Vec<String> = m.offset.iter().map(|v| format!("{v}")).collect();
            let rotate = if self.dim == 2 {
                m.rotation[2].atan2(m.rotation[0]).to_degrees()
            } else {
                0.0
            };
            s.push_str(&format!(
                "map ratio={} rotate={} offset={}\n",
                m.ratio,
                rotate,
                offset.join(",")
            ));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractorOptions {
    pub precision: u32,
    pub cap: u64,
}

impl Default for AttractorOptions {
    fn default() -> Self {
        Self {
            precision: DEFAULT_PRECISION,
            cap: DEFAULT_ATTRACTOR_CAP,
        }
    }
}

pub fn attractor(ifs: &IteratedFunctionSystem, depth: u32) -> Result<PointSet> {
    attractor_with(ifs, depth, AttractorOptions::default())
}

/// Images of the first map's fixed point under every length-`depth` composition,
/// rounded to the working precision.
pub fn attractor_with(
    ifs: &IteratedFunctionSystem,
    depth: u32,
    opts: AttractorOptions,
) -> Result<PointSet> {
    let pts = attractor_f64(ifs, depth, opts.cap)?;
    let n = ifs.dim;
    let mut flat = Vec::with_capacity(pts.len());
    for &x in &pts {
        flat.push(to_mantissa(x, opts.precision)?);
    }
    debug_assert_eq!(flat.len() % n, 0);
    PointSet::from_mantissas(n, opts.precision, &flat, ifs.label.clone())
}

/// Flat `dim`-strided real coordinates, before rounding.
pub(crate) fn attractor_f64(ifs: &IteratedFunctionSystem, depth: u32, cap: u64) -> Result<Vec<f64>> {
    let m = ifs.maps.len() as u128;
    let required = m.checked_pow(depth).unwrap_or(u128::MAX);
    if required > cap as u128 {
        return Err(Error::CapExceeded { required, cap });
    }
    let n = ifs.dim;
    let mut cur = ifs.maps[0].fixed_point();
    let mut y = [0.0; MAX_DIM];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(cur.len() * ifs.maps.len());
        for map in &ifs.maps {
            for x in cur.chunks_exact(n) {
                map.apply(x, &mut y[..n]);
                next.extend_from_slice(&y[..n]);
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// Root of the Moran equation `sum r_i^s = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoranSolution {
    pub dimension: f64,
    /// `sum r_i^n > 1`: the maps cannot satisfy the open set condition and the
    /// ambient dimension is returned.
    pub overlapping: bool,
}

pub fn moran_dimension(ifs: &IteratedFunctionSystem) -> MoranSolution {
    let ratios = ifs.ratios();
    let f = |s: f64| ratios.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0;
    let n = ifs.dim as f64;
    if f(n) > 0.0 {
        return MoranSolution {
            dimension: n,
            overlapping: true,
        };
    }
    let (mut lo, mut hi) = (0.0, n);
    if f(0.0) <= 0.0 {
        hi = 0.0;
    }
    while hi - lo > MORAN_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    MoranSolution {
        dimension: 0.5 * (lo + hi),
        overlapping: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moran_examples() {
        let c = moran_dimension(&cantor_ifs(1.0 / 3.0).unwrap());
        assert!((c.dimension - 2f64.ln() / 3f64.ln()).abs() < 1e-10);
        assert!(!c.overlapping);
        let k = moran_dimension(&koch_curve_ifs());
        assert!((k.dimension - 4f64.ln() / 3f64.ln()).abs() < 1e-10);
        let one = IteratedFunctionSystem::new(vec![Similarity::scaling(0.5, vec![0.0]).unwrap()], "h")
            .unwrap();
        assert_eq!(moran_dimension(&one).dimension, 0.0);
    }

    #[test]
    fn moran_flags_overlap() {
        let maps = (0..3)
            .map(|i| Similarity::scaling(0.5, vec![i as f64 * 0.1]).unwrap())
            .collect();
        let ifs = IteratedFunctionSystem::new(maps, "o").unwrap();
        let m = moran_dimension(&ifs);
        assert!(m.overlapping);
        assert_eq!(m.dimension, 1.0);
    }

    #[test]
    fn similarity_rejects_non_contractions() {
        assert!(Similarity::scaling(1.0, vec![0.0]).is_err());
        assert!(Similarity::scaling(0.0, vec![0.0]).is_err());
        assert!(Similarity::new(0.5, vec![1.0, 1.0, 0.0, 1.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn fixed_points() {
        let f = Similarity::scaling(1.0 / 3.0, vec![2.0 / 3.0]).unwrap();
        assert!((f.fixed_point()[0] - 1.0).abs() < 1e-15);
        let g = Similarity::planar(0.5, 90.0, [1.0, 0.0]).unwrap();
        let p = g.fixed_point();
        let mut q = [0.0; 2];
        g.apply(&p, &mut q);
        assert!((p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12);
    }

    #[test]
    fn attractor_depth_zero_is_seed() {
        let s = attractor(&koch_curve_ifs(), 0).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.point(0), &[0, 0]);
    }

    #[test]
    fn cantor_depth_three() {
        let s = attractor(&cantor_ifs(1.0 / 3.0).unwrap(), 3).unwrap();
        assert_eq!(s.len(), 8);
        let v: Vec<f64> = s.to_f64().into_iter().map(|p| p[0]).collect();
        assert!(v.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert!(v.windows(2).all(|w| w[1] - w[0] >= 1.0 / 27.0 - 1e-9));
    }

    #[test]
    fn cap_enforced() {
        let err = attractor_with(
            &koch_curve_ifs(),
            5,
            AttractorOptions {
                cap: 1000,
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::CapExceeded { required: 1024, cap: 1000 }));
    }
}
