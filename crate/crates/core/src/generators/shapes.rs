use super::{attractor_f64, attractor_with, AttractorOptions, IteratedFunctionSystem, Similarity};
use crate::error::{Error, Result};
use crate::geometry::{to_mantissa, PointSet, DEFAULT_PRECISION};

/// `x * ratio` and `x * ratio + 1 - ratio`.
pub fn cantor_ifs(ratio: f64) -> Result<IteratedFunctionSystem> {
    if !(ratio > 0.0 && ratio < 0.5) {
        return Err(Error::param(format!("Cantor ratio {ratio} is not in (0, 1/2)")));
    }
    IteratedFunctionSystem::new(
        vec![
            Similarity::scaling(ratio, vec![0.0])?,
            Similarity::scaling(ratio, vec![1.0 - ratio])?,
        ],
        format!("cantor-{ratio}"),
    )
}

/// Left endpoints of the `2^depth` intervals kept at level `depth`.
pub fn cantor_set(ratio: f64, depth: u32) -> Result<PointSet> {
    cantor_set_with(ratio, depth, AttractorOptions::default())
}

pub fn cantor_set_with(ratio: f64, depth: u32, opts: AttractorOptions) -> Result<PointSet> {
    attractor_with(&cantor_ifs(ratio)?, depth, opts)
}

pub fn sierpinski_ifs() -> IteratedFunctionSystem {
    let h = 3f64.sqrt() / 4.0;
    let maps = [[0.0, 0.0], [0.5, 0.0], [0.25, h]]
        .into_iter()
        .map(|o| Similarity::scaling(0.5, o.to_vec()).unwrap())
        .collect();
    IteratedFunctionSystem::new(maps, "sierpinski").unwrap()
}

/// Lower-left corners of the `3^depth` triangles of the Sierpinski gasket on the
/// unit triangle.
pub fn sierpinski(depth: u32) -> Result<PointSet> {
    sierpinski_with(depth, AttractorOptions::default())
}

pub fn sierpinski_with(depth: u32, opts: AttractorOptions) -> Result<PointSet> {
    attractor_with(&sierpinski_ifs(), depth, opts)
}

/// Koch curve on the segment `a -> b`. `left` puts the bump on the left of the
/// direction of travel.
pub fn koch_segment_ifs(a: [f64; 2], b: [f64; 2], left: bool) -> IteratedFunctionSystem {
    let turn = if left { 60.0 } else { -60.0 };
    let u = [(b[0] - a[0]) / 3.0, (b[1] - a[1]) / 3.0];
    let rot = |deg: f64, v: [f64; 2]| {
        let (s, c) = f64::to_radians(deg).sin_cos();
        [c * v[0] - s * v[1], s * v[0] + c * v[1]]
    };
    let add = |p: [f64; 2], v: [f64; 2]| [p[0] + v[0], p[1] + v[1]];
    let p1 = add(a, u);
    let tip = add(p1, rot(turn, u));
    let p3 = add(p1, u);
    // Map i sends a to its start point and b to the next one.
    let piece = |start: [f64; 2], deg: f64| {
        let ra = rot(deg, a);
        Similarity::planar(
            1.0 / 3.0,
            deg,
            [start[0] - ra[0] / 3.0, start[1] - ra[1] / 3.0],
        )
        .unwrap()
    };
    IteratedFunctionSystem::new(
        vec![piece(a, 0.0), piece(p1, turn), piece(tip, -turn), piece(p3, 0.0)],
        "koch-curve",
    )
    .unwrap()
}

/// Koch curve from (0,0) to (1,0), bump upward.
pub fn koch_curve_ifs() -> IteratedFunctionSystem {
    koch_segment_ifs([0.0, 0.0], [1.0, 0.0], true)
}

fn snowflake_corners() -> [[f64; 2]; 3] {
    // Side 1, centroid at the origin, counter-clockwise.
    let r = 1.0 / 3f64.sqrt();
    [210f64, 330.0, 90.0].map(|deg| {
        let (s, c) = deg.to_radians().sin_cos();
        [r * c, r * s]
    })
}

/// Vertices of the order-`order` Koch snowflake on a side-1 triangle centered at
/// the origin: `3 * 4^order` points.
pub fn koch_snowflake(order: u32) -> Result<PointSet> {
    koch_snowflake_with(order, DEFAULT_PRECISION)
}

pub fn koch_snowflake_with(order: u32, precision: u32) -> Result<PointSet> {
    if !(1..=8).contains(&order) {
        return Err(Error::param(format!("snowflake order {order} is not in 1..=8")));
    }
    let c = snowflake_corners();
    let mut flat = Vec::with_capacity(6 * 4usize.pow(order));
    for k in 0..3 {
        // Counter-clockwise traversal: outward is to the right.
        let ifs = koch_segment_ifs(c[k], c[(k + 1) % 3], false);
        for x in attractor_f64(&ifs, order, u64::MAX)? {
            flat.push(to_mantissa(x, precision)?);
        }
    }
    PointSet::from_mantissas(2, precision, &flat, format!("koch-snowflake-{order}"))
}
