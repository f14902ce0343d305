use crate::error::{Error, Result};
use crate::geometry::{Point, MAX_DIM};
use crate::rng::ShiftRegister64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Bit `j` of every coordinate before bit `j + 1` of any.
    #[default]
    Interleaved,
    /// One block of `r` bits per coordinate.
    Concatenated,
}

/// Point of `[0, 1)^n` given by the leading bits of each coordinate's binary
/// expansion. When `exact`, every later bit is 0 (a dyadic rational); otherwise
/// only the stored bits are known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryPoint {
    coords: Vec<Vec<u8>>,
    exact: bool,
}

impl BinaryPoint {
    pub fn new(coords: Vec<Vec<u8>>, exact: bool) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&coords.len()) {
            return Err(Error::BadDimension(coords.len()));
        }
        if coords.iter().flatten().any(|&b| b > 1) {
            return Err(Error::param("coordinate bits must be 0 or 1"));
        }
        Ok(Self { coords, exact })
    }

    /// Exact expansion of a point of `[0, 1)^n`.
    pub fn from_point(point: &Point) -> Result<Self> {
        let p = point.precision();
        let coords = point
            .mantissas()
            .iter()
            .map(|&m| {
                if m < 0 || (p < 63 && m >= 1i64 << p) {
                    return Err(Error::NotNormalized);
                }
                Ok((1..=p).map(|j| ((m >> (p - j)) & 1) as u8).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coords, true)
    }

    /// `len` generator bits per coordinate, coordinate after coordinate.
    pub fn random(dim: usize, len: usize, rng: &mut ShiftRegister64) -> Result<Self> {
        Self::new((0..dim).map(|_| rng.bits(len)).collect(), false)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Largest supported precision.
    pub fn precision(&self) -> usize {
        if self.exact {
            usize::MAX
        } else {
            self.coords.iter().map(Vec::len).min().unwrap_or(0)
        }
    }

    pub fn coordinate(&self, k: usize) -> &[u8] {
        &self.coords[k]
    }

    /// Point of `[0,1)^{m+n}` with the coordinates of `self` followed by `other`'s.
    pub fn join(&self, other: &BinaryPoint) -> Result<Self> {
        let exact = self.exact && other.exact;
        // Exact coordinates are padded so they do not cap the joint precision.
        let len = self.precision().min(other.precision());
        let pad = |p: &BinaryPoint| -> Vec<Vec<u8>> {
            p.coords
                .iter()
                .map(|c| {
                    let mut c = c.clone();
                    if p.exact && !exact && c.len() < len {
                        c.resize(len, 0);
                    }
                    c
                })
                .collect()
        };
        let mut coords = pad(self);
        coords.extend(pad(other));
        Self::new(coords, exact)
    }

    fn bit(&self, k: usize, j: usize) -> u8 {
        self.coords[k].get(j).copied().unwrap_or(0)
    }

    pub fn encode(&self, r: usize, scheme: Scheme) -> Result<BitEncoding> {
        if r > self.precision() {
            return Err(Error::ScaleBeyondPrecision {
                scale: r.min(u32::MAX as usize) as u32,
                precision: self.precision().min(u32::MAX as usize) as u32,
            });
        }
        let n = self.dim();
        let bits = match scheme {
            Scheme::Interleaved => (0..r)
                .flat_map(|j| (0..n).map(move |k| (k, j)))
                .map(|(k, j)| self.bit(k, j))
                .collect(),
            Scheme::Concatenated => (0..n)
                .flat_map(|k| (0..r).map(move |j| (k, j)))
                .map(|(k, j)| self.bit(k, j))
                .collect(),
        };
        Ok(BitEncoding {
            bits,
            precision: r,
            dim: n,
            scheme,
        })
    }
}

/// Precision-`r` binary encoding of a point: `n * r` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitEncoding {
    pub bits: Vec<u8>,
    pub precision: usize,
    pub dim: usize,
    pub scheme: Scheme,
}

impl BitEncoding {
    /// First `r` bits of each coordinate.
    pub fn coordinate_bits(&self) -> Vec<Vec<u8>> {
        let (n, r) = (self.dim, self.precision);
        (0..n)
            .map(|k| {
                (0..r)
                    .map(|j| match self.scheme {
                        Scheme::Interleaved => self.bits[j * n + k],
                        Scheme::Concatenated => self.bits[k * r + j],
                    })
                    .collect()
            })
            .collect()
    }

    /// Index of the dyadic cell of side `2^-r` the encoding names.
    pub fn decode_cell(&self) -> Result<Vec<i64>> {
        if self.precision > 62 {
            return Err(Error::param("cell index needs r <= 62"));
        }
        Ok(self
            .coordinate_bits()
            .iter()
            .map(|c| c.iter().fold(0i64, |a, &b| (a << 1) | b as i64))
            .collect())
    }
}

/// Encoding of a stored point; `r` may not exceed its precision.
pub fn encode(point: &Point, r: u32, scheme: Scheme) -> Result<BitEncoding> {
    if r > point.precision() {
        return Err(Error::ScaleBeyondPrecision {
            scale: r,
            precision: point.precision(),
        });
    }
    BinaryPoint::from_point(point)?.encode(r as usize, scheme)
}
