//! Bit strings are `u8` slices holding only 0 and 1.

use crate::error::{Error, Result};

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bits: Vec<u8>,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&mut self, b: bool) {
        self.bits.push(b as u8);
    }

    pub fn raw(&mut self, bits: &[u8]) {
        self.bits.extend_from_slice(bits);
    }

    /// `width` low bits of `v`, most significant first.
    pub fn uint(&mut self, v: u64, width: u32) {
        for k in (0..width).rev() {
            self.bits.push(((v >> k) & 1) as u8);
        }
    }

    /// Elias gamma code of `n >= 1`.
    pub fn gamma(&mut self, n: u64) {
        debug_assert!(n >= 1);
        let w = 64 - n.leading_zeros();
        self.bits.extend(std::iter::repeat_n(0, w as usize - 1));
        self.uint(n, w);
    }

    pub fn finish(self) -> Vec<u8> {
        self.bits
    }
}

pub fn gamma_len(n: u64) -> usize {
    debug_assert!(n >= 1);
    2 * (63 - n.leading_zeros() as usize) + 1
}

pub struct BitReader<'a> {
    bits: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a [u8]) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn at_end(&self) -> bool {
        self.pos == self.bits.len()
    }

    pub fn bit(&mut self) -> Result<bool> {
        let b = *self
            .bits
            .get(self.pos)
            .ok_or_else(|| Error::Format("bit stream ended early".into()))?;
        self.pos += 1;
        Ok(b != 0)
    }

    pub fn uint(&mut self, width: u32) -> Result<u64> {
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | self.bit()? as u64;
        }
        Ok(v)
    }

    pub fn gamma(&mut self) -> Result<u64> {
        let mut zeros = 0;
        while !self.bit()? {
            zeros += 1;
            if zeros > 63 {
                return Err(Error::Format("gamma code too long".into()));
            }
        }
        let mut v = 1u64;
        for _ in 0..zeros {
            v = (v << 1) | self.bit()? as u64;
        }
        Ok(v)
    }

    pub fn raw(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bits.len() {
            return Err(Error::Format("bit stream ended early".into()));
        }
        let s = &self.bits[self.pos..end];
        self.pos = end;
        Ok(s)
    }
}

/// Parses a string of `0`/`1` characters.
pub fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::param(format!("not a bit: {c:?}"))),
        })
        .collect()
}

pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_codes() {
        let cases = [(1, "1"), (2, "010"), (3, "011"), (4, "00100"), (9, "0001001")];
        for (n, code) in cases {
            let mut w = BitWriter::new();
            w.gamma(n);
            assert_eq!(bits_to_string(&w.finish()), code);
            assert_eq!(gamma_len(n), code.len());
        }
    }

    #[test]
    fn gamma_round_trip() {
        let mut w = BitWriter::new();
        let vals = [1u64, 2, 5, 1000, 1 << 40, u64::MAX];
        for &v in &vals {
            w.gamma(v);
        }
        let bits = w.finish();
        let mut r = BitReader::new(&bits);
        for &v in &vals {
            assert_eq!(r.gamma().unwrap(), v);
        }
        assert!(r.at_end());
        assert!(r.gamma().is_err());
    }
}
