use super::{pow2, to_mantissa, Coords, PointSet, MAX_DIM};
use crate::error::{Error, Result};
use crate::rng::ShiftRegister64;

const ORTHO_TOL: f64 = 1e-9;

/// `x -> scale * R x + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidMotion {
    dim: usize,
    /// Row-major `dim x dim`.
    rotation: Vec<f64>,
    translation: Vec<f64>,
    scale: f64,
}

impl RigidMotion {
    pub fn new(rotation: Vec<f64>, translation: Vec<f64>, scale: f64) -> Result<Self> {
        let dim = translation.len();
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::BadDimension(dim));
        }
        if rotation.len() != dim * dim {
            return Err(Error::param("rotation must be dim x dim"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::param("motion scale must be positive"));
        }
        if !is_orthogonal(&rotation, dim) {
            return Err(Error::param("rotation is not orthogonal within 1e-9"));
        }
        Ok(Self {
            dim,
            rotation,
            translation,
            scale,
        })
    }

    pub fn identity(dim: usize) -> Self {
        let mut rotation = vec![0.0; dim * dim];
        for i in 0..dim {
            rotation[i * dim + i] = 1.0;
        }
        Self {
            dim,
            rotation,
            translation: vec![0.0; dim],
            scale: 1.0,
        }
    }

    /// Planar rotation by `angle` radians about the origin, then translation.
    pub fn planar(angle: f64, translation: [f64; 2], scale: f64) -> Result<Self> {
        let (s, c) = exact_sin_cos(angle);
        Self::new(vec![c, -s, s, c], translation.to_vec(), scale)
    }

    /// Rotation drawn uniformly from O(n)'s rotation subgroup (Gram-Schmidt on
    /// Gaussian columns, determinant fixed to +1), with the given translation and scale.
    pub fn random_rotation(
        dim: usize,
        rng: &mut ShiftRegister64,
        translation: Vec<f64>,
        scale: f64,
    ) -> Result<Self> {
        let rotation = match dim {
            1 => vec![1.0],
            2 => {
                let a = rng.uniform(0.0, 2.0 * std::f64::consts::PI);
                let (s, c) = a.sin_cos();
                vec![c, -s, s, c]
            }
            _ => random_orthogonal(dim, rng),
        };
        Self::new(rotation, translation, scale)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn translation(&self) -> &[f64] {
        &self.translation
    }

    pub fn rotation(&self) -> &[f64] {
        &self.rotation
    }

    pub fn is_isometry(&self) -> bool {
        self.scale == 1.0
    }

    /// Same linear part, different translation.
    pub fn with_translation(&self, translation: Vec<f64>) -> Result<Self> {
        if translation.len() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, translation.len()));
        }
        Ok(Self {
            translation,
            ..self.clone()
        })
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim;
        for i in 0..n {
            let row = &self.rotation[i * n..(i + 1) * n];
            let dot: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            out[i] = self.scale * dot + self.translation[i];
        }
    }
}

/// sin/cos that are exact at multiples of a quarter turn.
fn exact_sin_cos(angle: f64) -> (f64, f64) {
    let quarter = angle / std::f64::consts::FRAC_PI_2;
    if (quarter - quarter.round()).abs() < 1e-15 {
        match (quarter.round() as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        angle.sin_cos()
    }
}

fn is_orthogonal(r: &[f64], n: usize) -> bool {
    for i in 0..n {
        for j in 0..n {
            let dot: f64 = (0..n).map(|k| r[k * n + i] * r[k * n + j]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            if (dot - want).abs() > ORTHO_TOL {
                return false;
            }
        }
    }
    true
}

fn random_orthogonal(n: usize, rng: &mut ShiftRegister64) -> Vec<f64> {
    loop {
        let mut cols: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.normal()).collect()).collect();
        let mut ok = true;
        for i in 0..n {
            for j in 0..i {
                let dot: f64 = (0..n).map(|k| cols[i][k] * cols[j][k]).sum();
                for k in 0..n {
                    cols[i][k] -= dot * cols[j][k];
                }
            }
            let norm: f64 = cols[i].iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            cols[i].iter_mut().for_each(|v| *v /= norm);
        }
        if !ok {
            continue;
        }
        let mut r = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                r[k * n + i] = cols[i][k];
            }
        }
        if determinant(&r, n) < 0.0 {
            for k in 0..n {
                r[k * n] = -r[k * n];
            }
        }
        return r;
    }
}

fn determinant(m: &[f64], n: usize) -> f64 {
    let mut a = m.to_vec();
    let mut det = 1.0;
    for c in 0..n {
        let pivot = (c..n)
            .max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs()))
            .unwrap();
        if a[pivot * n + c] == 0.0 {
            return 0.0;
        }
        if pivot != c {
            for k in 0..n {
                a.swap(pivot * n + k, c * n + k);
            }
            det = -det;
        }
        det *= a[c * n + c];
        for i in c + 1..n {
            let f = a[i * n + c] / a[c * n + c];
            for k in c..n {
                a[i * n + k] -= f * a[c * n + k];
            }
        }
    }
    det
}

/// Maps every point through `motion` and rounds to the set's precision
/// (nearest, ties to even).
pub fn apply_motion(set: &PointSet, motion: &RigidMotion) -> Result<PointSet> {
    apply_motion_clipped(set, motion, None)
}

/// As [`apply_motion`], discarding images that fall outside the real box
/// `[lo, hi]` before rounding.
pub(crate) fn apply_motion_clipped(
    set: &PointSet,
    motion: &RigidMotion,
    window: Option<(&[f64], &[f64])>,
) -> Result<PointSet> {
    let n = set.dim();
    if motion.dim != n {
        return Err(Error::DimensionMismatch(n, motion.dim));
    }
    let p = set.precision();
    let unit = pow2(-(p as i32));
    let mut x = [0.0f64; MAX_DIM];
    let mut y = [0.0f64; MAX_DIM];
    let mut out: Vec<Coords> = Vec::with_capacity(set.len());
    'points: for c in set.iter() {
        for k in 0..n {
            x[k] = c[k] as f64 * unit;
        }
        motion.apply(&x[..n], &mut y[..n]);
        if let Some((lo, hi)) = window {
            for k in 0..n {
                if y[k] < lo[k] || y[k] > hi[k] {
                    continue 'points;
                }
            }
        }
        let mut m = [0i64; MAX_DIM];
        for k in 0..n {
            m[k] = to_mantissa(y[k], p)?;
        }
        out.push(m);
    }
    Ok(PointSet::from_coords(n, p, out, set.label().to_string()))
}
