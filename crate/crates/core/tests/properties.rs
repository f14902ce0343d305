mod common;

use fdim::algodim::compress::{compress, decompress};
use fdim::algodim::{encode, header_overhead, klen, klen_joint, Scheme, JOIN_OVERHEAD};
use fdim::estimators::{box_count, box_dimension};
use fdim::generators::{attractor, cantor_ifs, moran_dimension, IteratedFunctionSystem, Similarity};
use fdim::geometry::{
    cartesian_product, dyadic_cell, proximal_intersection, translate, Point, PointSet,
};
use proptest::prelude::*;

fn point_set(dim: usize, max_len: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec(prop::collection::vec(-(1i64 << 30)..(1i64 << 30), dim), 1..max_len)
        .prop_map(move |pts| {
            let flat: Vec<i64> = pts.concat();
            PointSet::from_mantissas(dim, 30, &flat, "p").unwrap()
        })
}

fn rows(s: &PointSet) -> Vec<Vec<i64>> {
    s.iter().map(<[i64]>::to_vec).collect()
}

fn bits(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, 0..max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_projects_back_to_factors(e in point_set(1, 30), f in point_set(2, 30)) {
        let ef = cartesian_product(&e, &f, 1 << 20).unwrap();
        prop_assert_eq!(ef.len(), e.len() * f.len());
        prop_assert_eq!(rows(&ef.project(0..1).unwrap()), rows(&e));
        prop_assert_eq!(rows(&ef.project(1..3).unwrap()), rows(&f));
        for r in [0u32, 4, 9, 17, 30] {
            prop_assert_eq!(box_count(&ef, r).unwrap(), box_count(&e, r).unwrap() * box_count(&f, r).unwrap());
        }
    }

    #[test]
    fn construction_deduplicates(pts in prop::collection::vec(0i64..16, 1..40)) {
        let set = PointSet::from_mantissas(1, 30, &pts, "d").unwrap();
        let mut want = pts.clone();
        want.sort_unstable();
        want.dedup();
        prop_assert_eq!(set.iter().map(|c| c[0]).collect::<Vec<_>>(), want);
    }

    #[test]
    fn proximity_commutes_with_common_translation(
        e in point_set(2, 60),
        f in point_set(2, 60),
        z in prop::collection::vec(-(1i64 << 29)..(1i64 << 29), 2),
        delta in 1e-4f64..0.5,
    ) {
        let before = proximal_intersection(&e, &f, delta).unwrap();
        let moved = proximal_intersection(&translate(&e, &z).unwrap(), &translate(&f, &z).unwrap(), delta).unwrap();
        prop_assert_eq!(translate(&before, &z).unwrap(), moved);
    }

    #[test]
    fn lattice_translation_keeps_counts(e in point_set(2, 80), cells in prop::collection::vec(-64i64..64, 2), r in 0u32..12) {
        // Shift of at most 1 per axis keeps the points inside the workspace.
        let z: Vec<i64> = cells.iter().map(|&c| c.clamp(-(1 << r), 1 << r) << (30 - r)).collect();
        let moved = translate(&e, &z).unwrap();
        for q in r..=30 {
            prop_assert_eq!(box_count(&moved, q).unwrap(), box_count(&e, q).unwrap());
        }
    }

    #[test]
    fn box_counts_grow_with_scale(e in point_set(3, 100)) {
        let mut prev = 1;
        for r in 0..=30 {
            let n = box_count(&e, r).unwrap();
            prop_assert!(n >= prev && n <= e.len() as u64);
            prev = n;
        }
        prop_assert_eq!(prev, e.len() as u64);
    }

    #[test]
    fn estimate_brackets_value(e in point_set(2, 200)) {
        let est = box_dimension(&e, 1, 9).unwrap();
        prop_assert!(est.lower_slope <= est.value + 1e-12);
        prop_assert!(est.value <= est.upper_slope + 1e-12);
    }

    #[test]
    fn coder_round_trips(parts in prop::collection::vec(bits(600), 1..4)) {
        let refs: Vec<&[u8]> = parts.iter().map(Vec::as_slice).collect();
        prop_assert_eq!(decompress(&compress(&refs)).unwrap(), parts);
    }

    #[test]
    fn literal_bound(s in bits(3000)) {
        prop_assert!(klen(&s) <= s.len() + header_overhead(s.len()));
    }

    #[test]
    fn joint_is_subadditive(a in bits(1500), b in bits(1500)) {
        prop_assert!(klen_joint(&[&a, &b]) <= klen(&a) + klen(&b) + JOIN_OVERHEAD);
    }

    #[test]
    fn repetitive_strings_compress(unit in bits(40), reps in 30usize..60) {
        prop_assume!(!unit.is_empty());
        let s: Vec<u8> = unit.iter().copied().cycle().take(unit.len() * reps).collect();
        prop_assert!(klen(&s) < s.len() / 2 + 200);
    }

    #[test]
    fn encoding_names_the_dyadic_cell(m in prop::collection::vec(0i64..(1 << 30), 1..=4), r in 0u32..=30) {
        let p = Point::new(m, 30).unwrap();
        let want = dyadic_cell(&p, r).unwrap();
        for scheme in [Scheme::Interleaved, Scheme::Concatenated] {
            prop_assert_eq!(encode(&p, r, scheme).unwrap().decode_cell().unwrap(), want.clone());
        }
    }

    #[test]
    fn moran_ignores_map_order(ratios in prop::collection::vec(0.05f64..0.6, 2..6), seed in any::<u64>()) {
        let maps = |rs: &[f64]| {
            let m = rs.iter().enumerate().map(|(i, &r)| Similarity::scaling(r, vec![i as f64]).unwrap()).collect();
            IteratedFunctionSystem::new(m, "m").unwrap()
        };
        let mut shuffled = ratios.clone();
        let k = (seed % shuffled.len() as u64) as usize;
        shuffled.rotate_left(k);
        shuffled.reverse();
        let a = moran_dimension(&maps(&ratios));
        let b = moran_dimension(&maps(&shuffled));
        prop_assert_eq!(a.overlapping, b.overlapping);
        prop_assert!((a.dimension - b.dimension).abs() < 1e-10);
    }

    #[test]
    fn cantor_levels_are_nested(ratio in 0.05f64..0.45, depth in 1u32..7) {
        let ifs = cantor_ifs(ratio).unwrap();
        let coarse = attractor(&ifs, depth - 1).unwrap();
        let fine = attractor(&ifs, depth).unwrap();
        prop_assert_eq!(fine.len(), 2 * coarse.len());
        for c in coarse.iter() {
            prop_assert!(fine.contains(c));
        }
    }
}
