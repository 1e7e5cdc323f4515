mod common;

use common::{cache, field, prime_powers, spec, specs};
use gfcount::diagonal::{diag_coprime, diag_oracle, diag_semiprimitive, diag_semiprimitive_uniform};
use gfcount::eqmodel::{derive_params, EquationSpec};
use gfcount::selftest::{diagonal_check, diagonal_exhaustive};
use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

#[test]
fn closed_forms_match_oracle_up_to_81() {
    for q in prime_powers(81).into_iter().filter(|&q| q > 2) {
        let report = diagonal_exhaustive(cache(), q, 4, 24, 2, 17);
        assert!(report.passed(), "q={q}: {:?}", report.counterexample);
        assert!(report.cases > 0);
    }
}

#[test]
fn every_regime_is_exercised() {
    // coprime, semiprimitive with distinct degrees, semiprimitive uniform
    let s = spec(13, &[2, 5, 1], 1, &[3, 4, 2], &[1, 1, 1], 1);
    assert_eq!(diagonal_check(&s).unwrap(), 1);
    let s = spec(25, &[1, 1, 1], 1, &[3, 6, 2], &[1, 1, 1], 1);
    assert_eq!(diagonal_check(&s).unwrap(), 1);
    let s = spec(16, &[1, 1, 1, 1], 1, &[5, 5, 5, 5], &[1, 1, 1, 1], 1);
    assert_eq!(diagonal_check(&s).unwrap(), 2);
}

fn base(q: u64, n: usize) -> BigInt {
    let qm1 = BigInt::from(q - 1);
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    (qm1.pow(n as u32) + &qm1 * sign) / BigInt::from(q)
}

proptest! {
    #[test]
    fn nstar0_excess_is_a_multiple_of_q_minus_1(s in specs(49, 4, 16)) {
        let dp = derive_params(&s).unwrap();
        let q = s.field().order();
        for counts in [diag_coprime(&s, &dp), diag_semiprimitive(&s, &dp), diag_semiprimitive_uniform(&s, &dp)]
            .into_iter()
            .flatten()
        {
            let excess = BigInt::from(counts.nstar0) - base(q, s.n());
            prop_assert!(excess.is_multiple_of(&BigInt::from(q - 1)), "{:?}", s);
        }
    }

    #[test]
    fn oracle_is_invariant_under_relabeling_and_scaling(s in specs(32, 4, 12), c in 0u64..31, j in 0usize..4) {
        let f = s.field();
        let base = diag_oracle(&s);
        let reversed = s.permuted(&(0..s.n()).rev().collect::<Vec<_>>());
        prop_assert_eq!(&diag_oracle(&reversed).n0, &base.n0);
        let j = j % s.n();
        let c = f.exp(c % f.group_order());
        let mut a = s.a().to_vec();
        a[j] = f.mul(a[j], f.pow(c, s.m()[j]));
        let scaled = EquationSpec::new(s.field_arc().clone(), a, s.b(), s.m().to_vec(), s.kj().to_vec(), s.k()).unwrap();
        let moved = diag_oracle(&scaled);
        prop_assert_eq!(moved.n0, base.n0);
        prop_assert_eq!(moved.nstar0, base.nstar0);
    }
}

#[test]
fn oracle_matches_enumeration_on_f9() {
    let f = field(9);
    for m in [[1u64, 2, 4], [2, 2, 2], [4, 4, 8]] {
        let s = spec(9, &[1, 3, 5], 1, &m, &[1, 1, 1], 1);
        let mut n0 = 0u64;
        let mut nstar0 = 0u64;
        for x in f.elements() {
            for y in f.elements() {
                for z in f.elements() {
                    let terms = [(x, 1u64), (y, 3), (z, 5)];
                    let sum = terms.iter().zip(m).fold(gfcount::Elem::ZERO, |acc, ((v, a), e)| {
                        f.add(acc, f.mul(f.element(*a).unwrap(), f.pow(*v, e)))
                    });
                    if sum.is_zero() {
                        n0 += 1;
                        if !x.is_zero() && !y.is_zero() && !z.is_zero() {
                            nstar0 += 1;
                        }
                    }
                }
            }
        }
        let d = diag_oracle(&s);
        assert_eq!((d.n0, d.nstar0), (n0.into(), nstar0.into()), "m={m:?}");
    }
}
