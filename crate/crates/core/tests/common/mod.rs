#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use gfcount::eqmodel::EquationSpec;
use gfcount::sampling::FieldCache;
use gfcount::{Elem, FieldTable};
use proptest::prelude::*;

pub fn cache() -> &'static FieldCache {
    static CACHE: OnceLock<FieldCache> = OnceLock::new();
    CACHE.get_or_init(FieldCache::new)
}

pub fn field(q: u64) -> Arc<FieldTable> {
    cache().get(q)
}

pub fn prime_powers(max: u64) -> Vec<u64> {
    (2..=max).filter(|&q| gfcount::gf::prime_power(q).is_some()).collect()
}

pub fn spec(q: u64, a: &[u64], b: u64, m: &[u64], kj: &[u64], k: u64) -> EquationSpec {
    let f = field(q);
    let a = a.iter().map(|&c| f.element(c).unwrap()).collect();
    let b = f.element(b).unwrap();
    EquationSpec::new(f, a, b, m.to_vec(), kj.to_vec(), k).unwrap()
}

/// Random equations over the prime powers up to `max_q`; coefficients as powers of the generator.
pub fn specs(max_q: u64, max_n: usize, max_e: u64) -> impl Strategy<Value = EquationSpec> {
    specs_over(prime_powers(max_q).into_iter().filter(|&q| q > 2).collect(), max_n, max_e)
}

pub fn specs_over(qs: Vec<u64>, max_n: usize, max_e: u64) -> impl Strategy<Value = EquationSpec> {
    (prop::sample::select(qs), 2..=max_n).prop_flat_map(move |(q, n)| {
        (
            prop::collection::vec(0..q - 1, n),
            0..q - 1,
            prop::collection::vec(1..=max_e, n),
            prop::collection::vec(1..=max_e, n),
            1..=max_e,
            any::<bool>(),
        )
            .prop_map(move |(a, b, m, kj, k, unit)| {
                let f = field(q);
                let a: Vec<Elem> = if unit { vec![Elem::ONE; n] } else { a.iter().map(|&t| f.exp(t)).collect() };
                EquationSpec::new(f.clone(), a, f.exp(b), m, kj, k).unwrap()
            })
    })
}
