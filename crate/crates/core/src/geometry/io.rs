//! Point-cloud files.
//!
//! Binary layout: `FDIM1`, u8 dim, u8 precision, u64 count, then `count * dim`
//! little-endian i64 mantissas. An optional trailer `FDIMMETA`, u32 length and UTF-8
//! text carries the provenance header; readers that stop after the mantissas never
//! see it.

use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use super::{check_dim, check_mantissa, to_mantissa, Coords, PointSet, MAX_DIM, MAX_PRECISION};
use crate::error::{Error, Result};
use crate::io::write_atomic;

pub const POINTS_MAGIC: &[u8; 5] = b"FDIM1";
const META_MAGIC: &[u8; 8] = b"FDIMMETA";

pub fn encode_points(set: &PointSet, meta: Option<&str>) -> Vec<u8> {
    let mut out = Vec::with_capacity(15 + set.len() * set.dim() * 8);
    out.extend_from_slice(POINTS_MAGIC);
    out.push(set.dim() as u8);
    out.push(set.precision() as u8);
    out.extend_from_slice(&(set.len() as u64).to_le_bytes());
    for p in set.iter() {
        for &m in p {
            out.extend_from_slice(&m.to_le_bytes());
        }
    }
    if let Some(text) = meta {
        out.extend_from_slice(META_MAGIC);
        out.extend_from_slice(&(text.len() as u32).to_le_bytes());
        out.extend_from_slice(text.as_bytes());
    }
    out
}

/// Parses a binary point file, returning the set and its provenance text if present.
pub fn decode_points(bytes: &[u8], label: &str) -> Result<(PointSet, Option<String>)> {
    let fmt = |m: &str| Error::Format(m.to_string());
    if bytes.len() < 15 || &bytes[..5] != POINTS_MAGIC {
        return Err(fmt("missing FDIM1 header"));
    }
    let dim = bytes[5] as usize;
    let precision = bytes[6] as u32;
    check_dim(dim)?;
    if precision > MAX_PRECISION {
        return Err(fmt("precision out of range"));
    }
    let count = u64::from_le_bytes(bytes[7..15].try_into().unwrap());
    let body = count
        .checked_mul(dim as u64 * 8)
        .filter(|&b| b <= (bytes.len() - 15) as u64)
        .ok_or_else(|| fmt("truncated point data"))? as usize;
    let mut points: Vec<Coords> = Vec::with_capacity(count as usize);
    for chunk in bytes[15..15 + body].chunks_exact(dim * 8) {
        let mut c = [0i64; MAX_DIM];
        for (k, w) in chunk.chunks_exact(8).enumerate() {
            let m = i64::from_le_bytes(w.try_into().unwrap());
            check_mantissa(m)?;
            c[k] = m;
        }
        points.push(c);
    }
    let rest = &bytes[15 + body..];
    let meta = if rest.is_empty() {
        None
    } else {
        if rest.len() < 12 || &rest[..8] != META_MAGIC {
            return Err(fmt("trailing bytes after point data"));
        }
        let len = u32::from_le_bytes(rest[8..12].try_into().unwrap()) as usize;
        if rest.len() != 12 + len {
            return Err(fmt("metadata length mismatch"));
        }
        Some(String::from_utf8(rest[12..].to_vec()).map_err(|_| fmt("metadata is not UTF-8"))?)
    };
    let n = points.len();
    let set = PointSet::from_coords(dim, precision, points, label.to_string());
    if set.len() != n {
        return Err(fmt("duplicate points"));
    }
    Ok((set, meta))
}

pub fn read_points(path: impl AsRef<Path>) -> Result<PointSet> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    Ok(decode_points(&bytes, &file_label(path))?.0)
}

pub fn write_points(path: impl AsRef<Path>, set: &PointSet, meta: Option<&str>) -> Result<()> {
    write_atomic(path.as_ref(), &encode_points(set, meta))
}

/// CSV with header `x1,...,xn`; lines starting with `#` are comments.
pub fn points_to_csv(set: &PointSet, meta: Option<&str>) -> String {
    let mut s = String::new();
    if let Some(text) = meta {
        for line in text.lines() {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
    }
    let header: Vec<String> = (1..=set.dim()).map(|i| format!("x{i}")).collect();
    s.push_str(&header.join(","));
    s.push('\n');
    for p in set.to_f64() {
        let row: Vec<String> = p.iter().map(|v| format!("{v}")).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Values are rounded to `precision` on load.
pub fn points_from_csv(text: &str, precision: u32, label: &str) -> Result<PointSet> {
    parse_csv(text.as_bytes(), precision, label)
}

fn parse_csv(reader: impl Read, precision: u32, label: &str) -> Result<PointSet> {
    let mut dim = None;
    let mut flat = Vec::new();
    let mut rows = 0usize;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        let err = |msg: String| Error::Parse { line: i + 1, msg };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match dim {
            None => {
                for (k, f) in fields.iter().enumerate() {
                    if *f != format!("x{}", k + 1) {
                        return Err(err(format!("expected header x1,...,xn, found {line:?}")));
                    }
                }
                check_dim(fields.len())?;
                dim = Some(fields.len());
            }
            Some(n) => {
                if fields.len() != n {
                    return Err(err(format!("expected {n} fields, found {}", fields.len())));
                }
                for f in fields {
                    let v: f64 = f.parse().map_err(|_| err(format!("bad number {f:?}")))?;
                    flat.push(to_mantissa(v, precision)?);
                }
                rows += 1;
            }
        }
    }
    let n = dim.ok_or_else(|| Error::Format("CSV without header".into()))?;
    let set = PointSet::from_mantissas(n, precision, &flat, label)?;
    if set.len() != rows {
        return Err(Error::Format("duplicate points".into()));
    }
    Ok(set)
}

pub fn read_points_csv(path: impl AsRef<Path>, precision: u32) -> Result<PointSet> {
    let path = path.as_ref();
    parse_csv(std::fs::File::open(path)?, precision, &file_label(path))
}

pub fn write_points_csv(path: impl AsRef<Path>, set: &PointSet, meta: Option<&str>) -> Result<()> {
    write_atomic(path.as_ref(), points_to_csv(set, meta).as_bytes())
}

fn file_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}
