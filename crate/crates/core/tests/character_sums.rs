mod common;

use common::{spec, specs, specs_over, prime_powers};
use gfcount::charsum::{assemble, build_w, count_from_w, t_sum, Character};
use gfcount::counter::{count_with, naive_profile};
use gfcount::diagonal::diag_oracle;
use gfcount::eqmodel::derive_params;
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(Config::with_cases(cases), proptest::test_runner::TestRng::deterministic_rng(Default::default()))
}

#[test]
fn characters_outside_support_vanish_for_every_small_field() {
    for q in prime_powers(25).into_iter().filter(|&q| q > 2) {
        runner(50)
            .run(&specs_over(vec![q], 4, 16), |s| {
                let dp = derive_params(&s).unwrap();
                let w = build_w(&s);
                for psi in Character::all(s.field()).filter(|c| !c.power_is_trivial(dp.support_gcd)) {
                    let t = t_sum(&s, &w, psi).unwrap();
                    prop_assert!(t.is_zero(), "q={} psi_{}: {:?} for {:?}", q, psi.index(), t, s);
                }
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn three_routes_agree_for_every_b() {
    runner(120)
        .run(&specs(25, 3, 12), |s| {
            let w = build_w(&s);
            let diag = diag_oracle(&s);
            let profile = naive_profile(&s);
            for b in s.field().nonzero() {
                let sb = s.with_b(b).unwrap();
                let dp = derive_params(&sb).unwrap();
                let direct = count_with(&sb, &w, &diag);
                prop_assert_eq!(&direct, &BigUint::from(profile[b.code() as usize]), "b={} {:?}", b.code(), sb);
                let assembled = assemble(&sb, &dp, &w, &diag).unwrap();
                prop_assert_eq!(assembled, BigInt::from(direct), "b={} {:?}", b.code(), sb);
                if !dp.b_in_power_class {
                    prop_assert!(count_from_w(&sb, &w).0.is_zero());
                }
            }
            Ok(())
        })
        .unwrap();
}

proptest! {
    #[test]
    fn conjugate_character_gives_conjugate_sum(s in specs(27, 3, 12)) {
        let w = build_w(&s);
        for psi in Character::all(s.field()) {
            let t = t_sum(&s, &w, psi).unwrap();
            let tc = t_sum(&s, &w, psi.conj()).unwrap();
            prop_assert_eq!(tc, t.conj());
        }
    }

    #[test]
    fn w_table_mass_and_zero_row(s in specs(27, 3, 12)) {
        let w = build_w(&s);
        let order = s.field().group_order();
        prop_assert_eq!(w.total(), BigUint::from(order).pow(s.n() as u32));
        prop_assert_eq!(count_from_w(&s, &w).1, diag_oracle(&s).nstar0);
    }
}

#[test]
fn trivial_character_sum_counts_nonzero_diagonal_values() {
    // T(ε) = #{x ∈ (F_q*)^n : x + y ≠ 0} / (q − 1) = (36 − 6) / 6
    let s = spec(7, &[1, 1], 1, &[1, 1], &[1, 1], 1);
    let w = build_w(&s);
    let t = t_sum(&s, &w, Character::trivial(s.field())).unwrap();
    assert_eq!(t.as_integer(), Some(BigInt::from(5)));
}
