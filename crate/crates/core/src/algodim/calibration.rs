//! Measured constants for the coder's additive overheads.
//!
//! Text format, one `key=value` per line, `#` comments:
//! `version`, `encoder`, `reference_length`, `header_overhead`, `join_overhead`,
//! `c0`, `c1` (slack `sigma(r) = c0 + c1 * sqrt(r)` in bits) and the measured
//! densities of the canonical strings.

use std::collections::BTreeMap;
use std::path::Path;

use super::compress::{header_overhead, klen, klen_joint};
use super::dims::{chain_rule_residuals, precision_ladder};
use super::encoding::BinaryPoint;
use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::rng::ShiftRegister64;

pub const CALIBRATION_VERSION: u32 = 1;
pub const ENCODER_ID: &str = "lz-gamma-stride4-v1";
/// Seeds of the calibration corpus; campaigns should draw from other seeds.
pub const CALIBRATION_SEEDS: [u64; 8] = [
    0xC0FF_EE00, 0xC0FF_EE01, 0xC0FF_EE02, 0xC0FF_EE03, 0xC0FF_EE04, 0xC0FF_EE05, 0xC0FF_EE06,
    0xC0FF_EE07,
];
const REFERENCE_LENGTH: usize = 4096;
const SLACK_MARGIN: f64 = 2.0;
const FIT_SCALES: [usize; 4] = [512, 1024, 2048, 4096];

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub version: u32,
    pub encoder: String,
    pub reference_length: usize,
    pub header_overhead: usize,
    pub join_overhead: usize,
    pub c0: f64,
    pub c1: f64,
    pub zero_density: f64,
    pub prng_density: f64,
    pub periodic_density: f64,
}

fn periodic(n: usize) -> Vec<u8> {
    (0..n).map(|i| ((i / 3) % 2) as u8).collect()
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

/// Runs the measurement on the fixed corpus; deterministic for a given coder.
pub fn calibrate() -> Result<Calibration> {
    let n = REFERENCE_LENGTH;
    let zeros = vec![0u8; n];
    let prng = ShiftRegister64::new(CALIBRATION_SEEDS[0]).bits(n);
    let other = ShiftRegister64::new(CALIBRATION_SEEDS[1]).bits(n);
    let per = periodic(n);
    let corpus: [&[u8]; 4] = [&zeros, &prng, &other, &per];
    let mut join = 0i64;
    for p in corpus {
        for q in corpus {
            let d = klen_joint(&[p, q]) as i64 - klen(p) as i64 - klen(q) as i64;
            join = join.max(d);
        }
    }

    // Largest chain-rule deficit in bits at each fit scale.
    let mut points = Vec::new();
    for &r_max in &FIT_SCALES {
        let ladder = precision_ladder(r_max);
        let mut pairs = Vec::new();
        for (i, &seed) in CALIBRATION_SEEDS.iter().enumerate().skip(2) {
            let mut rng = ShiftRegister64::stream(seed, r_max as u64);
            let x = BinaryPoint::random(1, r_max, &mut rng)?;
            let y = BinaryPoint::random(1, r_max, &mut rng)?;
            pairs.push((x.clone(), if i == 2 { x } else { y }));
        }
        let z = BinaryPoint::new(vec![vec![0; r_max]], false)?;
        let w = BinaryPoint::new(vec![periodic(r_max)], false)?;
        pairs.push((z.clone(), pairs[1].0.clone()));
        pairs.push((w.clone(), pairs[1].1.clone()));
        pairs.push((z, w));
        let mut worst = 0f64;
        let mut r_tail = 0;
        for (x, y) in &pairs {
            let c = chain_rule_residuals(x, y, &ladder)?;
            r_tail = c.r();
            for v in c.residuals {
                worst = worst.max(-v * r_tail as f64);
            }
        }
        points.push((r_tail as f64, worst));
    }
    // Least squares D ~ a + b sqrt(r), b >= 0, then raise a to cover every point.
    let xs: Vec<f64> = points.iter().map(|p| p.0.sqrt()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (b, _) = crate::estimators::least_squares(&xs, &ys);
    let b = b.max(0.0);
    let a = xs.iter().zip(&ys).map(|(x, y)| y - b * x).fold(0.0, f64::max);

    Ok(Calibration {
        version: CALIBRATION_VERSION,
        encoder: ENCODER_ID.into(),
        reference_length: n,
        header_overhead: header_overhead(n),
        join_overhead: join.max(0) as usize,
        c0: round6(SLACK_MARGIN * a),
        c1: round6(SLACK_MARGIN * b),
        zero_density: round6(klen(&zeros) as f64 / n as f64),
        prng_density: round6(klen(&prng) as f64 / n as f64),
        periodic_density: round6(klen(&per) as f64 / n as f64),
    })
}

impl Calibration {
    /// Chain-rule slack in bits at precision `r`.
    pub fn sigma(&self, r: usize) -> f64 {
        self.c0 + self.c1 * (r as f64).sqrt()
    }

    pub fn to_text(&self) -> String {
        format!(
            "# fdim calibration: coder overheads measured on zeros, PRNG and periodic strings\n\
             version={}\nencoder={}\nreference_length={}\nheader_overhead={}\njoin_overhead={}\n\
             c0={}\nc1={}\nzero_density={}\nprng_density={}\nperiodic_density={}\n",
            self.version,
            self.encoder,
            self.reference_length,
            self.header_overhead,
            self.join_overhead,
            self.c0,
            self.c1,
            self.zero_density,
            self.prng_density,
            self.periodic_density
        )
    }

    /// Parses and checks the version and coder id against this build.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(Error::Parse {
                line: i + 1,
                msg: format!("expected key=value, found {line:?}"),
            })?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| {
            kv.get(k)
                .cloned()
                .ok_or_else(|| Error::Calibration(format!("missing key {k}")))
        };
        let num = |k: &str| -> Result<f64> {
            get(k)?
                .parse()
                .map_err(|_| Error::Calibration(format!("bad value for {k}")))
        };
        let version = num("version")? as u32;
        if version != CALIBRATION_VERSION {
            return Err(Error::Calibration(format!(
                "file version {version}, this build expects {CALIBRATION_VERSION}; run `fdim calibrate`"
            )));
        }
        let encoder = get("encoder")?;
        if encoder != ENCODER_ID {
            return Err(Error::Calibration(format!(
                "file measured coder {encoder}, this build uses {ENCODER_ID}; run `fdim calibrate`"
            )));
        }
        Ok(Self {
            version,
            encoder,
            reference_length: num("reference_length")? as usize,
            header_overhead: num("header_overhead")? as usize,
            join_overhead: num("join_overhead")? as usize,
            c0: num("c0")?,
            c1: num("c1")?,
            zero_density: num("zero_density")?,
            prng_density: num("prng_density")?,
            periodic_density: num("periodic_density")?,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Calibration(format!("cannot read {}: {e}; run `fdim calibrate`", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path.as_ref(), self.to_text().as_bytes())
    }
}
