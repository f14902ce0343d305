use rayon::prelude::*;

use super::compress::{cond_klen, klen, mutual_info};
use super::encoding::{BinaryPoint, Scheme};
use crate::error::{Error, Result};

pub const MIN_PRECISIONS: usize = 4;

/// `r_max * k / 8` for `k = 1..=8`.
pub fn precision_ladder(r_max: usize) -> Vec<usize> {
    (1..=8).map(|k| r_max * k / 8).collect()
}

fn check_list(r_list: &[usize]) -> Result<()> {
    if r_list.len() < MIN_PRECISIONS {
        return Err(Error::InsufficientSamples {
            needed: MIN_PRECISIONS,
            got: r_list.len(),
        });
    }
    if r_list[0] == 0 || r_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("precisions must be positive and increasing"));
    }
    Ok(())
}

/// Upper half of the precision list.
pub fn tail(r_list: &[usize]) -> &[usize] {
    &r_list[r_list.len() / 2..]
}

/// Lower/upper density estimate: min and max of a per-precision ratio over the
/// tail window.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DensityEstimate {
    pub lower: f64,
    pub upper: f64,
    pub r_min: usize,
    pub r_max: usize,
}

fn tail_density(r_list: &[usize], f: impl Fn(usize) -> Result<f64> + Sync) -> Result<DensityEstimate> {
    check_list(r_list)?;
    let t = tail(r_list);
    let ratios = t
        .par_iter()
        .map(|&r| Ok(f(r)? / r as f64))
        .collect::<Result<Vec<f64>>>()?;
    Ok(DensityEstimate {
        lower: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        upper: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        r_min: t[0],
        r_max: t[t.len() - 1],
    })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ComplexityProfile {
    pub precisions: Vec<usize>,
    pub klens: Vec<usize>,
    pub ratios: Vec<f64>,
}

impl ComplexityProfile {
    /// CSV with columns `r,klen,ratio`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,klen,ratio\n");
        for i in 0..self.precisions.len() {
            s.push_str(&format!("{},{},{}\n", self.precisions[i], self.klens[i], self.ratios[i]));
        }
        s
    }
}

pub fn complexity_profile(x: &BinaryPoint, r_list: &[usize], scheme: Scheme) -> Result<ComplexityProfile> {
    let klens = r_list
        .par_iter()
        .map(|&r| Ok(klen(&x.encode(r, scheme)?.bits)))
        .collect::<Result<Vec<_>>>()?;
    let ratios = klens
        .iter()
        .zip(r_list)
        .map(|(&k, &r)| if r == 0 { 0.0 } else { k as f64 / r as f64 })
        .collect();
    Ok(ComplexityProfile {
        precisions: r_list.to_vec(),
        klens,
        ratios,
    })
}

fn enc(x: &BinaryPoint, r: usize) -> Result<Vec<u8>> {
    Ok(x.encode(r, Scheme::Interleaved)?.bits)
}

/// Tail min/max of `klen(encode(x, r)) / r`.
pub fn dim_estimate(x: &BinaryPoint, r_list: &[usize]) -> Result<DensityEstimate> {
    tail_density(r_list, |r| Ok(klen(&enc(x, r)?) as f64))
}

/// Tail min/max of `mutual_info(encode(x, r), encode(y, r)) / r`.
pub fn mdim_estimate(x: &BinaryPoint, y: &BinaryPoint, r_list: &[usize]) -> Result<DensityEstimate> {
    tail_density(r_list, |r| Ok(mutual_info(&enc(x, r)?, &enc(y, r)?) as f64))
}

/// Tail min/max of `cond_klen(encode(x, r) | encode(y, r)) / r`.
pub fn cdim_estimate(x: &BinaryPoint, y: &BinaryPoint, r_list: &[usize]) -> Result<DensityEstimate> {
    tail_density(r_list, |r| Ok(cond_klen(&enc(x, r)?, &enc(y, r)?) as f64))
}

/// Estimates entering the four chain-rule inequalities and their residuals
/// (right side minus left side, so a violation is negative):
///
/// 1. `dim(x) + dim(y|x) <= dim(x,y)`
/// 2. `dim(x,y) <= dim(x) + Dim(y|x)`
/// 3. `dim(x) + Dim(y|x) <= Dim(x,y)`
/// 4. `Dim(x,y) <= Dim(x) + Dim(y|x)`
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ChainResiduals {
    pub x: DensityEstimate,
    pub y_given_x: DensityEstimate,
    pub joint: DensityEstimate,
    pub residuals: [f64; 4],
}

impl ChainResiduals {
    /// Smallest precision of the tail window, where the slack is evaluated.
    pub fn r(&self) -> usize {
        self.joint.r_min
    }

    pub fn passes(&self, slack_bits: f64) -> [bool; 4] {
        let tol = -slack_bits / self.r() as f64;
        self.residuals.map(|v| v >= tol)
    }
}

pub fn chain_rule_residuals(x: &BinaryPoint, y: &BinaryPoint, r_list: &[usize]) -> Result<ChainResiduals> {
    let joint_point = x.join(y)?;
    let dx = dim_estimate(x, r_list)?;
    let dyx = cdim_estimate(y, x, r_list)?;
    let dxy = dim_estimate(&joint_point, r_list)?;
    let residuals = [
        dxy.lower - (dx.lower + dyx.lower),
        dx.lower + dyx.upper - dxy.lower,
        dxy.upper - (dx.lower + dyx.upper),
        dx.upper + dyx.upper - dxy.upper,
    ];
    Ok(ChainResiduals {
        x: dx,
        y_given_x: dyx,
        joint: dxy,
        residuals,
    })
}
