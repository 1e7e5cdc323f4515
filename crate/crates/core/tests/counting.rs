mod common;

use common::{spec, specs};
use gfcount::counter::{dispatch, evaluate, naive_count, oracle_count, DispatchOptions};
use gfcount::eqmodel::{classify, derive_params, unit_gcd_value, EquationSpec, Method};
use gfcount::sampling::{random_spec, rng, FieldCache, SampleBounds};
use gfcount::selftest::closed_form_check;
use gfcount::Error;
use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;

#[test]
fn closed_forms_match_oracle_on_random_equations() {
    let cache = FieldCache::new();
    let mut r = rng(2024);
    let mut applied = std::collections::BTreeMap::new();
    for _ in 0..500 {
        let s = random_spec(&mut r, &cache, SampleBounds::default());
        closed_form_check(&s, &evaluate).unwrap_or_else(|e| panic!("{e}"));
        for m in classify(&s, &derive_params(&s).unwrap()).methods() {
            *applied.entry(m).or_insert(0) += 1;
        }
    }
    for m in [Method::CoprimeNonpower, Method::CoprimePower, Method::UnitGcd] {
        assert!(applied.get(&m).copied().unwrap_or(0) > 5, "{m} rarely sampled: {applied:?}");
    }
}

#[test]
fn semiprimitive_forms_match_oracle() {
    // D = 5 | 2^2 + 1 over F_16, D = 3 | 2 + 1 over F_4 and F_16, D = 4 | 3 + 1 over F_9
    let cases = [
        (16, vec![5, 5], vec![3, 3], 3),
        (16, vec![5, 5, 5], vec![1, 1, 1], 2),
        (16, vec![5, 5, 10], vec![2, 2, 4], 6),
        (4, vec![3, 3, 3], vec![1, 1, 1], 1),
        (9, vec![4, 4, 2], vec![2, 2, 2], 4),
        (9, vec![4, 4, 4, 4], vec![1, 1, 1, 1], 2),
        (25, vec![3, 6, 6], vec![4, 4, 4], 8),
        (81, vec![4, 4, 4], vec![1, 3, 2], 2),
    ];
    let mut seen = 0;
    for (q, m, kj, k) in cases {
        let n = m.len();
        let f = common::field(q);
        for b in f.nonzero() {
            let s = spec(q, &vec![1; n], b.code() as u64, &m, &kj, k);
            let dp = derive_params(&s).unwrap();
            assert!(dp.semiprimitive_ell.is_some(), "q={q} m={m:?}");
            seen += classify(&s, &dp).methods().iter()
                .filter(|m| matches!(m, Method::SemiprimitiveNonpower | Method::SemiprimitivePower))
                .count();
            closed_form_check(&s, &evaluate).unwrap_or_else(|e| panic!("{e}"));
        }
    }
    assert!(seen > 20);
}

#[test]
fn dispatch_reports_no_closed_form_when_support_exceeds_power_gcd() {
    let s = spec(16, &[1, 1], 1, &[5, 5], &[5, 5], 5);
    let r = dispatch(&s, DispatchOptions::default()).unwrap();
    assert!(r.closed_forms.is_empty());
    assert_eq!(r.oracle_native, Some(151));
    for b in 2..16 {
        let r = dispatch(&s.with_b(s.field().element(b).unwrap()).unwrap(), DispatchOptions::default()).unwrap();
        assert_eq!(r.oracle_native, Some(1), "b={b}");
    }
}

#[test]
fn unit_support_gcd_alone_does_not_give_the_unit_formula() {
    // (x^2 + y^2)^2 = x y over F_7: support gcd 1, yet 7 solutions, not q + (-1) = 6
    let s = spec(7, &[1, 1], 1, &[2, 2], &[1, 1], 2);
    assert_eq!(derive_params(&s).unwrap().support_gcd, 1);
    assert_eq!(unit_gcd_value(&s), 2);
    assert_eq!(naive_count(&s), 7);
    assert!(matches!(evaluate(Method::UnitGcd, &s, &derive_params(&s).unwrap()), Err(Error::Hypothesis { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn count_depends_only_on_the_class_of_b(s in specs(25, 3, 12)) {
        let dp = derive_params(&s).unwrap();
        let f = s.field();
        let mut seen: [Option<BigUint>; 2] = [None, None];
        for b in f.nonzero() {
            let n = oracle_count(&s.with_b(b).unwrap());
            let in_class = f.is_kth_power(b, dp.power_gcd).unwrap();
            // outside the power class always; inside it once the support gcd is k_0
            if in_class && dp.support_gcd != dp.power_gcd {
                continue;
            }
            let slot = &mut seen[in_class as usize];
            match slot {
                None => *slot = Some(n),
                Some(first) => prop_assert_eq!(&*first, &n, "b={} {:?}", b.code(), s),
            }
        }
    }

    #[test]
    fn oracle_is_invariant_under_coordinate_scaling(s in specs(27, 4, 12), c in 1u64..26, j in 0usize..4) {
        let f = s.field();
        let j = j % s.n();
        let c = f.exp(c % f.group_order());
        let mut a = s.a().to_vec();
        a[j] = f.mul(a[j], f.pow(c, s.m()[j]));
        let b = f.mul(s.b(), f.pow(c, s.kj()[j]));
        let moved = EquationSpec::new(s.field_arc().clone(), a, b, s.m().to_vec(), s.kj().to_vec(), s.k()).unwrap();
        prop_assert_eq!(oracle_count(&moved), oracle_count(&s));
    }

    #[test]
    fn oracle_matches_enumeration(s in specs(16, 3, 10)) {
        prop_assert_eq!(oracle_count(&s), naive_count(&s).into());
    }

    #[test]
    fn applicable_closed_forms_agree(s in specs(27, 4, 12)) {
        let r = dispatch(&s, DispatchOptions { run_oracle: false }).unwrap();
        let values: Vec<&BigInt> = r.closed_forms.iter().map(|c| &c.value.0).collect();
        prop_assert!(values.windows(2).all(|w| w[0] == w[1]));
    }
}
