//! Integer and combinatorial helpers.

mod cyclotomic;

pub use cyclotomic::{cyclotomic_poly, CyclotomicInt};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// gcd of the absolute values; 0 for an empty or all-zero input.
pub fn gcd_all(xs: &[i64]) -> u64 {
    xs.iter().fold(0u64, |g, &x| g.gcd(&x.unsigned_abs()))
}

/// lcm of positive integers; `None` on empty input, a zero entry, or overflow.
pub fn lcm_all(xs: &[u64]) -> Option<u64> {
    if xs.is_empty() {
        return None;
    }
    xs.iter().try_fold(1u64, |l, &x| {
        if x == 0 {
            return None;
        }
        (l / l.gcd(&x)).checked_mul(x)
    })
}

/// Number of tuples `(j_1, …, j_r)` with `1 <= j_t <= v_t - 1` and `Σ j_t / v_t` an integer.
///
/// Evaluated by inclusion–exclusion over subsets:
/// `(-1)^r + Σ_{∅≠S} (-1)^{r-|S|} Π_{S} v / lcm_{S} v`.
/// Debug builds re-derive the value through [`i_count_product`] and, for small
/// products, [`i_count_enumerate`].
pub fn i_count(vs: &[u64]) -> BigInt {
    let value = i_count_subsets(vs);
    #[cfg(debug_assertions)]
    {
        let prod = vs.iter().try_fold(1u64, |a, &v| a.checked_mul(v));
        if matches!(prod, Some(p) if p <= 1_000_000) {
            debug_assert_eq!(value, i_count_product(vs), "I{vs:?}: product form disagrees");
            debug_assert_eq!(value, i_count_enumerate(vs), "I{vs:?}: enumeration disagrees");
        }
    }
    value
}

fn i_count_subsets(vs: &[u64]) -> BigInt {
    assert!(!vs.is_empty() && vs.iter().all(|&v| v >= 1), "I needs positive arguments");
    let r = vs.len();
    let sign = |e: usize| if e.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    let mut total = sign(r);
    for mask in 1u64..(1u64 << r) {
        let mut prod = BigInt::one();
        let mut lcm = BigInt::one();
        for (i, &v) in vs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                prod *= v;
                lcm = lcm.lcm(&BigInt::from(v));
            }
        }
        let size = mask.count_ones() as usize;
        total += sign(r - size) * (prod / lcm);
    }
    total
}

/// Second closed form: `(-1)^r / Π v · Σ_{t < Π v} Π_{v_j | t} (1 - v_j)`. Cost `Π v`.
pub fn i_count_product(vs: &[u64]) -> BigInt {
    let r = vs.len();
    let prod: u64 = vs.iter().product();
    let mut sum = BigInt::zero();
    for t in 0..prod {
        let mut term = BigInt::one();
        for &v in vs {
            if t % v == 0 {
                term *= 1 - v as i64;
            }
        }
        sum += term;
    }
    let (quot, rest) = sum.div_rem(&BigInt::from(prod));
    assert!(rest.is_zero(), "product form of I{vs:?} is not integral");
    if r.is_multiple_of(2) {
        quot
    } else {
        -quot
    }
}

/// Direct enumeration of the tuples counted by [`i_count`]. Cost `Π (v - 1)`.
pub fn i_count_enumerate(vs: &[u64]) -> BigInt {
    let lcm = lcm_all(vs).expect("positive arguments");
    // j / v as an integer multiple of 1 / lcm
    let scale: Vec<u64> = vs.iter().map(|&v| lcm / v).collect();
    if vs.contains(&1) {
        return BigInt::zero();
    }
    let mut js = vec![1u64; vs.len()];
    let mut count = 0u64;
    loop {
        let num: u64 = js.iter().zip(&scale).map(|(j, s)| j * s).sum();
        if num.is_multiple_of(lcm) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == js.len() {
                return BigInt::from(count);
            }
            js[i] += 1;
            if js[i] < vs[i] {
                break;
            }
            js[i] = 1;
            i += 1;
        }
    }
}

/// Elementary symmetric polynomial `σ_j(zs)`; `σ_0 = 1`.
pub fn sym_poly(j: usize, zs: &[i64]) -> Result<BigInt> {
    if j > zs.len() {
        return Err(Error::OutOfRange(format!(
            "sigma_{j} needs at least {j} arguments, got {}",
            zs.len()
        )));
    }
    // e[i] = σ_i of the prefix processed so far
    let mut e = vec![BigInt::zero(); j + 1];
    e[0] = BigInt::one();
    for &z in zs {
        for i in (1..=j).rev() {
            let add = &e[i - 1] * z;
            e[i] += add;
        }
    }
    Ok(e.swap_remove(j))
}

/// `(-1)^e` as an `i64`.
pub(crate) fn neg_one_pow(e: u64) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `x / d` when `d` divides `x` exactly, recorded as an integrality check.
pub(crate) fn exact_div(x: &BigInt, d: &BigInt, what: &str) -> Result<BigInt> {
    let (quot, rest) = x.div_rem(d);
    crate::integrality::check(rest.is_zero(), || format!("{what}: {x} is not divisible by {d}"))?;
    Ok(quot)
}

/// `((v-1)^r + (-1)^r (v-1)) / v`, the value of `I(v, …, v)` with `r` copies.
pub fn i_count_uniform(v: u64, r: u32) -> BigInt {
    let vm1 = BigInt::from(v) - 1u32;
    let num = vm1.pow(r) + BigInt::from(neg_one_pow(r as u64)) * &vm1;
    let (quot, rest) = num.div_rem(&BigInt::from(v));
    debug_assert!(rest.is_zero());
    quot
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_and_lcm() {
        assert_eq!(gcd_all(&[10, 5, 5, 10, 10, 10, 15]), 5);
        assert_eq!(gcd_all(&[-316, 192, 192, 32, 96]), 4);
        assert_eq!(gcd_all(&[0, 0]), 0);
        assert_eq!(gcd_all(&[]), 0);
        assert_eq!(lcm_all(&[2, 4, 6, 8, 10]), Some(120));
        assert_eq!(lcm_all(&[]), None);
        assert_eq!(lcm_all(&[3, 0]), None);
        assert_eq!(lcm_all(&[u64::MAX, u64::MAX - 1]), None);
    }

    #[test]
    fn i_count_examples() {
        assert_eq!(i_count(&[5]), BigInt::zero());
        assert_eq!(i_count(&[4, 4]), BigInt::from(3));
        assert_eq!(i_count(&[2, 3]), BigInt::zero());
        assert_eq!(i_count(&[5, 5]), BigInt::from(4));
        assert_eq!(i_count(&[1, 7, 7]), BigInt::zero());
        assert_eq!(i_count_uniform(4, 2), BigInt::from(3));
        assert_eq!(i_count_uniform(4, 3), BigInt::from(6));
    }

    #[test]
    fn symmetric_polynomials() {
        assert_eq!(sym_poly(0, &[3, -7]).unwrap(), BigInt::one());
        assert_eq!(sym_poly(0, &[]).unwrap(), BigInt::one());
        assert_eq!(sym_poly(2, &[1, -1, -1]).unwrap(), BigInt::from(-1));
        assert_eq!(sym_poly(4, &[1, 1, -1, -1, -1]).unwrap(), BigInt::one());
        assert_eq!(sym_poly(3, &[2, 3, 5]).unwrap(), BigInt::from(30));
        assert!(matches!(sym_poly(3, &[1, 1]), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn sym_poly_matches_subset_expansion() {
        let zs = [1i64, -1, -1, 1, -1, 1];
        for j in 0..=zs.len() {
            let brute: i64 = (0u32..1 << zs.len())
                .filter(|m| m.count_ones() as usize == j)
                .map(|m| (0..zs.len()).filter(|i| m >> i & 1 == 1).map(|i| zs[i]).product::<i64>())
                .sum();
            assert_eq!(sym_poly(j, &zs).unwrap(), BigInt::from(brute), "j={j}");
        }
    }
}
