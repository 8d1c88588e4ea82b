use polyspline_core::linforms::{
    cs_complexity, in_affine_span, verify_witness, Complexity, LinForm, LinFormSystem, SpanField, SEARCH_BUDGET,
};
use proptest::prelude::*;

fn distinct_rows(rows: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    for r in rows {
        if r.iter().any(|&c| c != 0) && !out.contains(&r) {
            out.push(r);
        }
    }
    out
}

fn system(rows: &[Vec<i64>]) -> LinFormSystem {
    let k = rows[0].len();
    LinFormSystem::new(k, 0, rows.iter().map(|r| LinForm::new(r.clone(), vec![])).collect()).unwrap()
}

fn rows_strategy(max_forms: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (2usize..4)
        .prop_flat_map(move |k| proptest::collection::vec(proptest::collection::vec(-2i64..=2, k), 2..=max_forms))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn certificates_verify(rows in rows_strategy(8), fp in prop_oneof![Just(SpanField::Rationals), Just(SpanField::Prime(3))]) {
        let rows = distinct_rows(rows);
        prop_assume!(rows.len() >= 2);
        let sys = system(&rows);
        let c = cs_complexity(&sys, fp, SEARCH_BUDGET).unwrap();
        for per in &c.per_form {
            if let Complexity::Finite { certificate, .. } = per {
                prop_assert!(certificate.verify(&sys, fp));
            }
        }
    }

    #[test]
    fn subsystems_are_no_more_complex(rows in rows_strategy(8), mask in any::<u8>()) {
        let rows = distinct_rows(rows);
        prop_assume!(rows.len() >= 2);
        let sys = system(&rows);
        let full = cs_complexity(&sys, SpanField::Rationals, SEARCH_BUDGET).unwrap().value;
        let keep: Vec<usize> = (0..rows.len()).filter(|i| mask >> i & 1 == 1).collect();
        prop_assume!(!keep.is_empty());
        let sub = cs_complexity(&sys.subsystem(&keep).unwrap(), SpanField::Rationals, SEARCH_BUDGET).unwrap().value;
        if let Some(full) = full {
            prop_assert!(sub.unwrap() <= full);
        }
    }

    /// `S`, `w + S` and `w` together have complexity at most one more than `S`.
    #[test]
    fn layer_instances(rows in rows_strategy(5)) {
        let rows = distinct_rows(rows);
        prop_assume!(!rows.is_empty());
        let m = cs_complexity(&system(&rows), SpanField::Rationals, SEARCH_BUDGET).unwrap().value.unwrap();
        let k = rows[0].len();
        let mut layered: Vec<Vec<i64>> = rows.iter().map(|r| [r.as_slice(), &[0]].concat()).collect();
        layered.extend(rows.iter().map(|r| [r.as_slice(), &[1]].concat()));
        let mut w = vec![0; k + 1];
        w[k] = 1;
        layered.push(w);
        let c = cs_complexity(&system(&layered), SpanField::Rationals, SEARCH_BUDGET).unwrap().value.unwrap();
        prop_assert!(c <= m + 1, "{c} > {m} + 1");
    }

    /// Membership is unchanged by an automorphism `A = I + u phi^T` with `phi(v) = 0`, `phi(u) = 0`.
    #[test]
    fn span_invariant_under_automorphisms_fixing_target(
        v in proptest::collection::vec(-3i64..=3, 3),
        set in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 3), 1..5),
        u in proptest::collection::vec(-2i64..=2, 3),
    ) {
        // phi = v x u (cross product) annihilates both v and u
        let phi = [v[1] * u[2] - v[2] * u[1], v[2] * u[0] - v[0] * u[2], v[0] * u[1] - v[1] * u[0]];
        let apply = |x: &[i64]| -> Vec<i64> {
            let t: i64 = phi.iter().zip(x).map(|(a, b)| a * b).sum();
            x.iter().zip(&u).map(|(xi, ui)| xi + ui * t).collect()
        };
        prop_assert_eq!(apply(&v), v.clone());
        let moved: Vec<Vec<i64>> = set.iter().map(|s| apply(s)).collect();
        for field in [SpanField::Rationals, SpanField::Prime(5)] {
            let a: Vec<&[i64]> = set.iter().map(|s| s.as_slice()).collect();
            let b: Vec<&[i64]> = moved.iter().map(|s| s.as_slice()).collect();
            let wa = in_affine_span(&v, &a, field).unwrap();
            let wb = in_affine_span(&v, &b, field).unwrap();
            prop_assert_eq!(wa.is_member(), wb.is_member());
            prop_assert!(verify_witness(&v, &a, field, &wa));
            prop_assert!(verify_witness(&v, &b, field, &wb));
        }
    }
}

#[test]
fn cube_and_almost_cube_systems() {
    for m in 1..=3usize {
        let c = cs_complexity(&LinFormSystem::cube(m), SpanField::Rationals, SEARCH_BUDGET).unwrap();
        assert!(c.value.unwrap() <= m as u32);
        let a = cs_complexity(&LinFormSystem::almost_cube(m), SpanField::Rationals, SEARCH_BUDGET).unwrap();
        assert!(a.value.unwrap() <= m as u32);
    }
}
