mod common;

use polyspline_core::bits::BitSet;
use polyspline_core::cube::{bad_count_exhaustive, SubsetOracle};
use polyspline_core::rank::{bilinear_matrix, matrix_rank};
use polyspline_core::{GroupFun, Point, PolyFun, DEFAULT_BUDGET};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spaces() -> Vec<(u32, u32, u32)> {
    vec![(2, 1, 3), (3, 1, 2), (5, 1, 2), (2, 2, 2), (3, 1, 3)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn interpolation_inverts_evaluation(which in 0usize..5, deg in 0u32..6, seed in any::<u64>()) {
        let (p, l, n) = spaces()[which];
        let s = common::space(p, l, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = PolyFun::random(&s, deg, &mut rng);
        let table = poly.table(DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(PolyFun::interpolate(&s, &table, DEFAULT_BUDGET).unwrap(), poly);
    }

    #[test]
    fn derivative_lowers_degree(pi in 0usize..3, n in 1u32..4, deg in 1u32..5, h in any::<u64>(), seed in any::<u64>()) {
        let p = [2u32, 3, 5][pi];
        let s = common::space(p, 1, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = PolyFun::random(&s, deg, &mut rng);
        let f = GroupFun::from_poly(&poly, BitSet::full(s.size()), DEFAULT_BUDGET).unwrap();
        let d = f.additive_derivative(Point(h % s.size())).unwrap().to_poly(DEFAULT_BUDGET).unwrap();
        match poly.degree() {
            Some(k) if k > 0 => prop_assert!(d.degree().map_or(true, |e| e < k)),
            _ => prop_assert!(d.is_zero()),
        }
    }

    #[test]
    fn polarized_form_symmetric_and_base_free(which in 0usize..3, seed in any::<u64>()) {
        let (p, n, d) = [(3u32, 2u32, 2u32), (5, 2, 3), (2, 3, 2)][which];
        let s = common::space(p, 1, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(poly) = PolyFun::random_exact_degree(&s, d, &mut rng) else { return Ok(()) };
        let dirs: Vec<Point> = (0..d).map(|i| Point((seed >> (8 * i)) % s.size())).collect();
        let at0 = poly.multilinear_form(Point(0), &dirs).unwrap();
        for x in s.points() {
            prop_assert_eq!(poly.multilinear_form(x, &dirs).unwrap(), at0);
        }
        let mut rev = dirs.clone();
        rev.reverse();
        prop_assert_eq!(poly.multilinear_form(Point(0), &rev).unwrap(), at0);
    }
}

#[test]
fn classical_characterization_exhaustive() {
    for p in [2u32, 3] {
        for n in 1..=3u32 {
            let s = common::space(p, 1, n);
            let full = SubsetOracle::full(&s);
            let mut rng = ChaCha8Rng::seed_from_u64(u64::from(p * 10 + n));
            for m in 1..=3u32 {
                if (s.size() as u128).pow(m + 1) > 1 << 22 {
                    continue;
                }
                for _ in 0..6 {
                    let poly = PolyFun::random(&s, m + 1, &mut rng);
                    let f = GroupFun::from_poly(&poly, BitSet::full(s.size()), DEFAULT_BUDGET).unwrap();
                    let (_, bad) = bad_count_exhaustive(&f, &full, m, DEFAULT_BUDGET).unwrap();
                    let low = poly.degree().map_or(true, |d| d < m);
                    assert_eq!(bad == 0, low, "p={p} n={n} m={m} deg={:?}", poly.degree());
                }
            }
        }
    }
}

#[test]
fn quadratic_bias_matches_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (p, n) in [(3u32, 2u32), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2)] {
        let s = common::space(p, 1, n);
        for _ in 0..20 {
            let Some(q) = PolyFun::random_exact_degree(&s, 2, &mut rng) else { continue };
            let q = q.homogeneous_part(2);
            let r = matrix_rank(s.field(), bilinear_matrix(&q).unwrap());
            let want = (p as f64).powf(-(r as f64) / 2.0);
            assert!((q.bias(DEFAULT_BUDGET).unwrap() - want).abs() < 1e-9);
        }
    }
}
