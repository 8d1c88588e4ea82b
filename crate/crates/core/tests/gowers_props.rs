mod common;

use num_complex::Complex64;
use polyspline_core::gowers::{gowers_exact, ComplexFun};
use polyspline_core::{PolyFun, DEFAULT_BUDGET};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_complex(s: &polyspline_core::Space, rng: &mut ChaCha8Rng) -> ComplexFun {
    let vals = (0..s.size())
        .map(|_| Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    ComplexFun::new(s, vals).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn pre_root_nonnegative_and_monotone(pi in 0usize..2, seed in any::<u64>()) {
        let (p, n) = [(2u32, 4u32), (3, 2)][pi];
        let s = common::space(p, 1, n);
        let g = random_complex(&s, &mut ChaCha8Rng::seed_from_u64(seed));
        let mut prev = 0.0;
        for m in 1..=3 {
            let r = gowers_exact(&g, m, DEFAULT_BUDGET).unwrap();
            prop_assert!(r.imag_residue.abs() < 1e-9);
            prop_assert!(r.pre_root >= -1e-9);
            prop_assert!(prev <= r.value + 1e-9);
            prev = r.value;
        }
    }

    #[test]
    fn modulation_by_low_degree_phase(pi in 0usize..2, m in 1u32..4, seed in any::<u64>()) {
        let (p, n) = [(2u32, 3u32), (3, 2)][pi];
        let s = common::space(p, 1, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_complex(&s, &mut rng);
        let poly = PolyFun::random(&s, m - 1, &mut rng);
        let phase = ComplexFun::phase(&poly, DEFAULT_BUDGET).unwrap();
        let a = gowers_exact(&g, m, DEFAULT_BUDGET).unwrap().value;
        let b = gowers_exact(&g.mul(&phase).unwrap(), m, DEFAULT_BUDGET).unwrap().value;
        prop_assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn phase_extremality_exhaustive() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for p in [2u32, 3] {
        for n in 1..=3u32 {
            let s = common::space(p, 1, n);
            for m in 1..=3u32 {
                if (s.size() as u128).pow(m + 1) > 1 << 22 {
                    continue;
                }
                for _ in 0..8 {
                    let poly = PolyFun::random(&s, m + 1, &mut rng);
                    let phase = ComplexFun::phase(&poly, DEFAULT_BUDGET).unwrap();
                    let v = gowers_exact(&phase, m, DEFAULT_BUDGET).unwrap().value;
                    let low = poly.degree().map_or(true, |d| d < m);
                    assert_eq!((v - 1.0).abs() < 1e-9, low, "p={p} n={n} m={m} value={v}");
                }
            }
        }
    }
}
