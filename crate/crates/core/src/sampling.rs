//! Seeded random equations over small fields, skewed toward the closed-form hypotheses.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::eqmodel::{unit_gcd_value, EquationSpec};
use crate::gf::{prime_power, Elem, FieldTable};

pub use rand::SeedableRng;

pub type SpecRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SpecRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Prime powers up to 27.
pub const SMALL_FIELDS: [u64; 14] = [3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27];

/// Builds each field once and shares it.
#[derive(Debug, Default)]
pub struct FieldCache {
    fields: Mutex<HashMap<u64, Arc<FieldTable>>>,
}

impl FieldCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// The canonical field of order `q`; panics if `q` is not a supported prime power.
    pub fn get(&self, q: u64) -> Arc<FieldTable> {
        let mut fields = self.fields.lock().expect("field cache poisoned");
        fields
            .entry(q)
            .or_insert_with(|| {
                let (p, s) = prime_power(q).unwrap_or_else(|| panic!("{q} is not a prime power"));
                Arc::new(FieldTable::build(p, s, None).expect("small canonical field"))
            })
            .clone()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SampleBounds {
    pub max_q: u64,
    pub max_n: usize,
    pub max_exponent: u64,
}

impl Default for SampleBounds {
    fn default() -> Self {
        SampleBounds { max_q: 27, max_n: 4, max_exponent: 12 }
    }
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

fn random_nonzero(rng: &mut SpecRng, field: &FieldTable) -> Elem {
    field.exp(rng.gen_range(0..field.group_order()))
}

/// One random equation within `bounds`.
///
/// Half the time the `k` exponents share a random divisor of `q − 1`, which
/// makes the power gcd nontrivial; a third of the time all `a_j = 1`; and the
/// degrees are sometimes drawn from the divisors of `q − 1` or of `p^ℓ + 1`.
pub fn random_spec(rng: &mut SpecRng, cache: &FieldCache, bounds: SampleBounds) -> EquationSpec {
    let fields: Vec<u64> = SMALL_FIELDS.iter().copied().filter(|&q| q <= bounds.max_q).collect();
    let q = *fields.choose(rng).expect("at least one field in bounds");
    let field = cache.get(q);
    let n = rng.gen_range(2..=bounds.max_n.max(2));
    let order = field.group_order();
    let top = bounds.max_exponent.max(1);

    let degree_pool: Vec<u64> = match rng.gen_range(0..3) {
        0 => divisors(order).into_iter().filter(|&d| d <= top).collect(),
        1 => {
            let p = field.characteristic();
            let mut pool: Vec<u64> = (1..=field.degree())
                .flat_map(|l| divisors(p.pow(l) + 1))
                .filter(|&d| d <= top && order.is_multiple_of(d))
                .collect();
            pool.sort_unstable();
            pool.dedup();
            pool
        }
        _ => (1..=top).collect(),
    };
    let m: Vec<u64> = (0..n).map(|_| *degree_pool.choose(rng).unwrap_or(&1)).collect();

    let scale = if rng.gen_bool(0.5) {
        let small: Vec<u64> = divisors(order).into_iter().filter(|&d| d <= top).collect();
        *small.choose(rng).expect("1 divides q - 1")
    } else {
        1
    };
    let bound = (top / scale).max(1);
    let kj: Vec<u64> = (0..n).map(|_| scale * rng.gen_range(1..=bound)).collect();
    let k = scale * rng.gen_range(1..=bound);

    let a: Vec<Elem> = if rng.gen_range(0..3) == 0 {
        vec![Elem::ONE; n]
    } else {
        (0..n).map(|_| random_nonzero(rng, &field)).collect()
    };
    let b = random_nonzero(rng, &field);
    EquationSpec::new(field, a, b, m, kj, k).expect("sampled spec is valid")
}

/// Random equation with `gcd(Σ k_j Π m/m_j − k Π m, q − 1) = 1`, by rejection.
pub fn random_unit_gcd_spec(rng: &mut SpecRng, cache: &FieldCache, bounds: SampleBounds) -> EquationSpec {
    loop {
        let spec = random_spec(rng, cache, bounds);
        if unit_gcd_value(&spec) == 1 {
            return spec;
        }
        // retry the same shape with every admissible k before resampling
        for k in 1..=bounds.max_exponent {
            let nudged = EquationSpec::new(
                spec.field_arc().clone(),
                spec.a().to_vec(),
                spec.b(),
                spec.m().to_vec(),
                spec.kj().to_vec(),
                k,
            )
            .expect("valid exponents");
            if unit_gcd_value(&nudged) == 1 {
                return nudged;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_specs() {
        let cache = FieldCache::new();
        let draw = |seed| {
            let mut r = rng(seed);
            (0..20).map(|_| format!("{:?}", random_spec(&mut r, &cache, SampleBounds::default()))).collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
    }

    #[test]
    fn samples_respect_bounds() {
        let cache = FieldCache::new();
        let mut r = rng(3);
        let bounds = SampleBounds { max_q: 13, max_n: 3, max_exponent: 6 };
        for _ in 0..200 {
            let s = random_spec(&mut r, &cache, bounds);
            assert!(s.field().order() <= 13);
            assert!((2..=3).contains(&s.n()));
            assert!(s.m().iter().chain(s.kj()).all(|&e| (1..=6).contains(&e)));
            assert!(s.k() >= 1 && s.k() <= 6);
        }
    }

    #[test]
    fn unit_gcd_sampler() {
        let cache = FieldCache::new();
        let mut r = rng(11);
        for _ in 0..50 {
            let s = random_unit_gcd_spec(&mut r, &cache, SampleBounds::default());
            assert_eq!(unit_gcd_value(&s), 1);
        }
    }
}
