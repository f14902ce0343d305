use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{PointSet, WORKSPACE_MANTISSA};

/// Number of distinct dyadic cells of side `2^-r` that contain a point.
pub fn box_count(set: &PointSet, r: u32) -> Result<u64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let p = set.precision();
    if r > p {
        return Err(Error::ScaleBeyondPrecision { scale: r, precision: p });
    }
    let shift = p - r;
    let n = set.dim();
    // Cells lie in [-o, o]; offsetting by o makes them nonnegative.
    let o = WORKSPACE_MANTISSA >> shift.min(63);
    let bits = 64 - ((2 * o) as u64).leading_zeros();
    let count = if n as u32 * bits <= 64 {
        let mut keys: Vec<u64> = set
            .iter()
            .map(|c| {
                c.iter()
                    .fold(0u64, |acc, &m| (acc << bits) | ((m >> shift) + o) as u64)
            })
            .collect();
        distinct(&mut keys)
    } else if n as u32 * bits <= 128 {
        let mut keys: Vec<u128> = set
            .iter()
            .map(|c| {
                c.iter()
                    .fold(0u128, |acc, &m| (acc << bits) | ((m >> shift) + o) as u128)
            })
            .collect();
        distinct(&mut keys)
    } else {
        let mut keys: Vec<[i64; 4]> = set
            .iter()
            .map(|c| {
                let mut k = [0i64; 4];
                for (slot, &m) in k.iter_mut().zip(c) {
                    *slot = m >> shift;
                }
                k
            })
            .collect();
        distinct(&mut keys)
    };
    Ok(count as u64)
}

fn distinct<T: Ord>(keys: &mut [T]) -> usize {
    keys.sort_unstable();
    1 + keys.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Box counts `N_r` over a run of scales.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ScaleProfile {
    scales: Vec<u32>,
    counts: Vec<u64>,
    label: String,
}

impl ScaleProfile {
    /// Scales must increase strictly and counts must be positive and nondecreasing.
    pub fn new(scales: Vec<u32>, counts: Vec<u64>, label: impl Into<String>) -> Result<Self> {
        if scales.len() != counts.len() || scales.is_empty() {
            return Err(Error::param("profile needs one count per scale"));
        }
        if scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("profile scales must increase"));
        }
        if counts.contains(&0) || counts.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::param("profile counts must be positive and nondecreasing"));
        }
        Ok(Self {
            scales,
            counts,
            label: label.into(),
        })
    }

    pub fn scales(&self) -> &[u32] {
        &self.scales
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn count_at(&self, r: u32) -> Option<u64> {
        self.scales.iter().position(|&s| s == r).map(|i| self.counts[i])
    }

    pub fn log2_counts(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| (c as f64).log2()).collect()
    }

    /// Restriction to `r_min..=r_max`.
    pub fn window(&self, r_min: u32, r_max: u32) -> Result<Self> {
        let idx: Vec<usize> = (0..self.scales.len())
            .filter(|&i| (r_min..=r_max).contains(&self.scales[i]))
            .collect();
        if idx.len() != (r_max - r_min + 1) as usize {
            return Err(Error::param(format!("profile does not cover [{r_min}, {r_max}]")));
        }
        Ok(Self {
            scales: idx.iter().map(|&i| self.scales[i]).collect(),
            counts: idx.iter().map(|&i| self.counts[i]).collect(),
            label: self.label.clone(),
        })
    }

    /// CSV with columns `r,N_r,log2_N`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,N_r,log2_N\n");
        for (r, (c, l)) in self.scales.iter().zip(self.counts.iter().zip(self.log2_counts())) {
            s.push_str(&format!("{r},{c},{l}\n"));
        }
        s
    }
}

/// Counts at every scale in `r_min..=r_max`, computed scale-parallel.
pub fn box_profile(set: &PointSet, r_min: u32, r_max: u32) -> Result<ScaleProfile> {
    if r_min > r_max {
        return Err(Error::param("r_min > r_max"));
    }
    let scales: Vec<u32> = (r_min..=r_max).collect();
    let counts = scales
        .par_iter()
        .map(|&r| box_count(set, r))
        .collect::<Result<Vec<_>>>()?;
    ScaleProfile::new(scales, counts, set.label())
}

/// Profile of `E x F` from the factor profiles, via `N_r(E x F) = N_r(E) N_r(F)`.
pub fn product_profile(e: &ScaleProfile, f: &ScaleProfile) -> Result<ScaleProfile> {
    if e.scales != f.scales {
        return Err(Error::param("product profile needs matching scales"));
    }
    let counts = e
        .counts
        .iter()
        .zip(&f.counts)
        .map(|(a, b)| a.checked_mul(*b).ok_or(Error::WorkspaceOverflow))
        .collect::<Result<Vec<_>>>()?;
    ScaleProfile::new(e.scales.clone(), counts, format!("{}x{}", e.label, f.label))
}
