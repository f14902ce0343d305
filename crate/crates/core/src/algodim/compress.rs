//! Bit-level dictionary coder used as the complexity proxy.
//!
//! A stream holds one or more parts. Header: gamma(part count), gamma(len + 1)
//! per part, then a 2-bit mode:
//!
//! * `00` literal: the parts verbatim.
//! * `01` dictionary: 2 bits of stride `k - 1`, then the token stream for the
//!   concatenation of all parts, each part first split into `k` interleaved tracks.
//! * `10` independent: per part, `0` + raw bits or `1` + stride + token stream,
//!   each coded against its own history only.
//!
//! Tokens: `0` gamma(n) + n raw bits, or `1` gamma(distance) gamma(len - MIN_MATCH + 1)
//! copying `len` bits from `distance` back (the source may overlap the output).
//! The encoder tries every mode and stride and keeps the shortest stream.

use std::collections::HashMap;

use super::bits::{gamma_len, BitReader, BitWriter};
use crate::error::{Error, Result};

pub const MIN_MATCH: usize = 24;
pub const MAX_STRIDE: usize = 4;
const MAX_CANDIDATES: usize = 64;
const NONE: usize = usize::MAX;

/// Literal-mode header cost for a single part of `n` bits, so that
/// `klen(s) <= |s| + header_overhead(|s|)`.
pub fn header_overhead(n: usize) -> usize {
    gamma_len(1) + gamma_len(n as u64 + 1) + 2
}

/// Bound on `klen_joint([p, q]) - klen(p) - klen(q)` guaranteed by the
/// independent mode.
pub const JOIN_OVERHEAD: usize = 1;

fn split_tracks(part: &[u8], stride: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(part.len());
    for t in 0..stride {
        out.extend(part.iter().skip(t).step_by(stride));
    }
    out
}

fn merge_tracks(tracks: &[u8], stride: usize) -> Vec<u8> {
    let n = tracks.len();
    let mut out = vec![0u8; n];
    let mut src = tracks.iter();
    for t in 0..stride {
        for i in (t..n).step_by(stride) {
            out[i] = *src.next().unwrap();
        }
    }
    out
}

fn copy_cost(dist: usize, len: usize) -> usize {
    1 + gamma_len(dist as u64) + gamma_len((len - MIN_MATCH + 1) as u64)
}

fn flush_literals(w: &mut BitWriter, run: &[u8]) {
    if !run.is_empty() {
        w.bit(false);
        w.gamma(run.len() as u64);
        w.raw(run);
    }
}

/// Greedy parse: at each position take the longest earlier match if copying
/// it is cheaper than spelling it out.
fn write_tokens(w: &mut BitWriter, bits: &[u8]) {
    let n = bits.len();
    if n < MIN_MATCH {
        flush_literals(w, bits);
        return;
    }
    let mask = (1u32 << MIN_MATCH) - 1;
    let mut keys = Vec::with_capacity(n - MIN_MATCH + 1);
    let mut k = bits[..MIN_MATCH].iter().fold(0u32, |a, &b| (a << 1) | b as u32);
    keys.push(k);
    for i in MIN_MATCH..n {
        k = ((k << 1) | bits[i] as u32) & mask;
        keys.push(k);
    }
    let mut head: HashMap<u32, usize> = HashMap::new();
    let mut prev = vec![NONE; keys.len()];
    let insert = |i: usize, head: &mut HashMap<u32, usize>, prev: &mut [usize]| {
        if i < keys.len() {
            prev[i] = head.insert(keys[i], i).unwrap_or(NONE);
        }
    };
    let (mut i, mut lit_start) = (0, 0);
    while i < n {
        let (mut best_len, mut best_dist) = (0, 0);
        if i < keys.len() {
            let mut j = head.get(&keys[i]).copied().unwrap_or(NONE);
            let mut tried = 0;
            while j != NONE && tried < MAX_CANDIDATES {
                let len = bits[i..].iter().zip(&bits[j..]).take_while(|(a, b)| a == b).count();
                if len > best_len {
                    best_len = len;
                    best_dist = i - j;
                }
                j = prev[j];
                tried += 1;
            }
        }
        if best_len >= MIN_MATCH && copy_cost(best_dist, best_len) < best_len {
            flush_literals(w, &bits[lit_start..i]);
            w.bit(true);
            w.gamma(best_dist as u64);
            w.gamma((best_len - MIN_MATCH + 1) as u64);
            for p in i..i + best_len {
                insert(p, &mut head, &mut prev);
            }
            i += best_len;
            lit_start = i;
        } else {
            insert(i, &mut head, &mut prev);
            i += 1;
        }
    }
    flush_literals(w, &bits[lit_start..]);
}

fn read_tokens(r: &mut BitReader, n: usize) -> Result<Vec<u8>> {
    let mut out: Vec<u8> = Vec::with_capacity(n);
    while out.len() < n {
        if r.bit()? {
            let dist = r.gamma()? as usize;
            let len = r.gamma()? as usize + MIN_MATCH - 1;
            if dist > out.len() || out.len() + len > n {
                return Err(Error::Format("copy token out of range".into()));
            }
            let start = out.len() - dist;
            for k in 0..len {
                out.push(out[start + k]);
            }
        } else {
            let len = r.gamma()? as usize;
            if out.len() + len > n {
                return Err(Error::Format("literal run too long".into()));
            }
            out.extend_from_slice(r.raw(len)?);
        }
    }
    Ok(out)
}

/// Shortest of: raw (`0` + bits) or stride-k tokens (`1` + stride + tokens).
fn best_body(part: &[u8]) -> BitWriter {
    let mut best = BitWriter::new();
    best.bit(false);
    best.raw(part);
    for stride in 1..=MAX_STRIDE {
        let mut w = BitWriter::new();
        w.bit(true);
        w.uint(stride as u64 - 1, 2);
        write_tokens(&mut w, &split_tracks(part, stride));
        if w.len() < best.len() {
            best = w;
        }
    }
    best
}

/// Shortest stream encoding `parts`.
pub fn compress(parts: &[&[u8]]) -> Vec<u8> {
    assert!(!parts.is_empty(), "a stream holds at least one part");
    let mut header = BitWriter::new();
    header.gamma(parts.len() as u64);
    for p in parts {
        header.gamma(p.len() as u64 + 1);
    }
    let mut best = header.clone();
    best.uint(0b00, 2);
    for p in parts {
        best.raw(p);
    }
    for stride in 1..=MAX_STRIDE {
        let joined: Vec<u8> = parts.iter().flat_map(|p| split_tracks(p, stride)).collect();
        let mut w = header.clone();
        w.uint(0b01, 2);
        w.uint(stride as u64 - 1, 2);
        write_tokens(&mut w, &joined);
        if w.len() < best.len() {
            best = w;
        }
    }
    if parts.len() > 1 {
        let mut w = header.clone();
        w.uint(0b10, 2);
        for p in parts {
            w.raw(&best_body(p).finish());
        }
        if w.len() < best.len() {
            best = w;
        }
    }
    best.finish()
}

pub fn decompress(stream: &[u8]) -> Result<Vec<Vec<u8>>> {
    let mut r = BitReader::new(stream);
    let count = r.gamma()? as usize;
    let lens = (0..count)
        .map(|_| Ok(r.gamma()? as usize - 1))
        .collect::<Result<Vec<_>>>()?;
    let parts = match r.uint(2)? {
        0b00 => lens.iter().map(|&n| Ok(r.raw(n)?.to_vec())).collect::<Result<Vec<_>>>()?,
        0b01 => {
            let stride = r.uint(2)? as usize + 1;
            let joined = read_tokens(&mut r, lens.iter().sum())?;
            let mut at = 0;
            lens.iter()
                .map(|&n| {
                    let part = merge_tracks(&joined[at..at + n], stride);
                    at += n;
                    part
                })
                .collect()
        }
        0b10 => lens
            .iter()
            .map(|&n| {
                if r.bit()? {
                    let stride = r.uint(2)? as usize + 1;
                    Ok(merge_tracks(&read_tokens(&mut r, n)?, stride))
                } else {
                    Ok(r.raw(n)?.to_vec())
                }
            })
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::Format("unknown stream mode".into())),
    };
    if !r.at_end() {
        return Err(Error::Format("trailing bits after stream".into()));
    }
    Ok(parts)
}

/// Compressed length in bits: a computable upper bound on the complexity of `bits`,
/// up to the additive cost of the decoder.
pub fn klen(bits: &[u8]) -> usize {
    compress(&[bits]).len()
}

/// Compressed length of the parts as one self-delimiting stream.
pub fn klen_joint(parts: &[&[u8]]) -> usize {
    compress(parts).len()
}

/// `klen_joint([q, p]) - klen_joint([q])`, clamped at 0.
pub fn cond_klen(p: &[u8], q: &[u8]) -> usize {
    klen_joint(&[q, p]).saturating_sub(klen_joint(&[q]))
}

/// `klen(p) - cond_klen(p | q)`, unclamped.
pub fn mutual_info(p: &[u8], q: &[u8]) -> i64 {
    klen(p) as i64 - cond_klen(p, q) as i64
}

pub fn mutual_info_clamped(p: &[u8], q: &[u8]) -> usize {
    mutual_info(p, q).max(0) as usize
}
