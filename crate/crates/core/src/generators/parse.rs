//! Plain-text IFS descriptions:
//!
//! ```text
//! dim=2
//! label=koch
//! map ratio=0.3333333333 rotate=0 offset=0,0
//! map ratio=0.3333333333 rotate=60 offset=0.3333333333,0
//! ```
//!
//! `rotate` is in degrees and only allowed to be nonzero in the plane (in one
//! dimension 180 means reflection). Blank lines and `#` comments are ignored.

use std::path::Path;

use super::{IteratedFunctionSystem, Similarity};
use crate::error::{Error, Result};

pub fn read_ifs(path: impl AsRef<Path>) -> Result<IteratedFunctionSystem> {
    parse_ifs(&std::fs::read_to_string(path)?)
}

pub fn parse_ifs(text: &str) -> Result<IteratedFunctionSystem> {
    let mut dim: Option<usize> = None;
    let mut label = String::from("ifs");
    let mut maps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: String| Error::Parse { line: i + 1, msg };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("map ") {
            let n = dim.ok_or_else(|| err("`dim=` must come before the first map".into()))?;
            maps.push(parse_map(rest, n).map_err(&err)?);
        } else if let Some(v) = line.strip_prefix("dim=") {
            let n: usize = v.trim().parse().map_err(|_| err(format!("bad dim {v:?}")))?;
            if !(1..=4).contains(&n) {
                return Err(err(format!("dim {n} outside 1..=4")));
            }
            dim = Some(n);
        } else if let Some(v) = line.strip_prefix("label=") {
            label = v.trim().to_string();
        } else {
            return Err(err(format!("unrecognized line {line:?}")));
        }
    }
    if maps.is_empty() {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: "no maps".into(),
        });
    }
    IteratedFunctionSystem::new(maps, label)
}

fn parse_map(rest: &str, n: usize) -> std::result::Result<Similarity, String> {
    let (mut ratio, mut rotate, mut offset) = (None, 0.0f64, None);
    for field in rest.split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, found {field:?}"))?;
        let num = |s: &str| s.parse::<f64>().map_err(|_| format!("bad number {s:?}"));
        match k {
            "ratio" => ratio = Some(num(v)?),
            "rotate" => rotate = num(v)?,
            "offset" => {
                offset = Some(v.split(',').map(num).collect::<std::result::Result<Vec<_>, _>>()?)
            }
            _ => return Err(format!("unknown map key {k:?}")),
        }
    }
    let ratio = ratio.ok_or("map without ratio")?;
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(format!("ratio {ratio} is not contracting"));
    }
    let offset = offset.unwrap_or_else(|| vec![0.0; n]);
    if offset.len() != n {
        return Err(format!("offset has {} entries, dim is {n}", offset.len()));
    }
    let rotation = match n {
        1 if rotate.rem_euclid(360.0) == 0.0 => vec![1.0],
        1 if rotate.rem_euclid(360.0) == 180.0 => vec![-1.0],
        2 => {
            let (s, c) = rotate.to_radians().sin_cos();
            vec![c, -s, s, c]
        }
        _ if rotate == 0.0 => {
            let mut r = vec![0.0; n * n];
            (0..n).for_each(|i| r[i * n + i] = 1.0);
            r
        }
        _ => return Err(format!("rotate={rotate} is not supported in dimension {n}")),
    };
    Similarity::new(ratio, rotation, offset).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{attractor, koch_curve_ifs, moran_dimension};

    #[test]
    fn parses_cantor() {
        let ifs = parse_ifs("dim=1\nlabel=c\n# two maps\nmap ratio=0.25 offset=0\nmap ratio=0.25 offset=0.75\n")
            .unwrap();
        assert_eq!(ifs.label(), "c");
        assert!((moran_dimension(&ifs).dimension - 0.5).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_text() {
        assert!(parse_ifs("dim=1\nmap ratio=1.0 offset=0\n").is_err());
        assert!(parse_ifs("dim=1\nmap ratio=-0.2 offset=0\n").is_err());
        assert!(parse_ifs("map ratio=0.5 offset=0\n").is_err());
        assert!(parse_ifs("dim=2\nmap ratio=0.5 offset=0\n").is_err());
        assert!(parse_ifs("dim=3\nmap ratio=0.5 rotate=10 offset=0,0,0\n").is_err());
        assert!(parse_ifs("dim=1\nfoo=1\n").is_err());
        assert!(parse_ifs("dim=1\n").is_err());
    }

    #[test]
    fn text_round_trip() {
        let k = koch_curve_ifs();
        let back = parse_ifs(&k.to_text()).unwrap();
        let a = attractor(&k, 4).unwrap();
        let b = attractor(&back, 4).unwrap();
        assert_eq!(a.len(), b.len());
        let close = a.iter().zip(b.iter()).all(|(x, y)| {
            x.iter().zip(y).all(|(p, q)| (p - q).abs() <= 4)
        });
        assert!(close);
    }
}
