//! Explicit finite fields `F_{p^s}` backed by discrete-logarithm tables.
//!
//! Elements are encoded as integers `c < q`: the base-`p` digits of `c` are the
//! coefficients (constant term first) of a polynomial reduced modulo a monic
//! irreducible `f` of degree `s`. A fixed primitive element `g` gives
//! `exp[t] = g^t` and its inverse `log`. Multiplication is an index addition;
//! addition goes through the Zech table `zech[u] = log(1 + g^u)`.
//!
//! Without an explicit modulus the field uses the irreducible `f` whose lower
//! coefficients, read as a base-`p` integer, are smallest, and the primitive
//! element with the smallest encoding. Both choices make encodings
//! reproducible.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::integrality;

/// Largest supported field order.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

const NO_LOG: u32 = u32::MAX;

/// An element of a [`FieldTable`], stored as its base-`p` integer encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// A fully materialized finite field with exp/log/Zech tables.
#[derive(Debug, Clone)]
pub struct FieldTable {
    p: u32,
    s: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: Elem,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

impl FieldTable {
    /// Builds `F_{p^s}`, using `modulus` (constant term first, monic, length `s + 1`)
    /// when given and the canonical irreducible otherwise.
    pub fn build(p: u64, s: u32, modulus: Option<&[u32]>) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidSpec("extension degree s must be at least 1".into()));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let q = p
            .checked_pow(s)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or(Error::FieldTooLarge { p, s, bound: MAX_FIELD_ORDER })?;
        let p32 = p as u32;

        let modulus = match modulus {
            Some(f) => {
                if f.len() != s as usize + 1 {
                    return Err(Error::BadModulus(format!(
                        "expected {} coefficients for degree {s}, got {}",
                        s + 1,
                        f.len()
                    )));
                }
                if f[s as usize] != 1 {
                    return Err(Error::BadModulus("leading coefficient must be 1".into()));
                }
                if let Some(c) = f.iter().find(|&&c| c >= p32) {
                    return Err(Error::BadModulus(format!("coefficient {c} is not reduced mod {p}")));
                }
                let f64s: Vec<u64> = f.iter().map(|&c| c as u64).collect();
                if !poly::is_irreducible(&f64s, p) {
                    return Err(Error::ReducibleModulus(f.to_vec()));
                }
                f.to_vec()
            }
            None => canonical_modulus(p, s),
        };

        let f: Vec<u64> = modulus.iter().map(|&c| c as u64).collect();
        let order = q - 1;
        let factors = prime_factors(order);
        let generator = (1..q)
            .find(|&c| {
                let g = digits(c, p, s);
                factors
                    .iter()
                    .all(|&r| poly::pow_mod(&g, order / r, &f, p) != [1])
            })
            .expect("the multiplicative group of a field is cyclic");

        let g = digits(generator, p, s);
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![NO_LOG; q as usize];
        let mut cur = vec![1u64];
        for t in 0..order {
            let c = undigits(&cur, p) as u32;
            debug_assert_eq!(log[c as usize], NO_LOG, "generator order below q-1");
            exp.push(c);
            log[c as usize] = t as u32;
            cur = poly::mul_mod(&cur, &g, &f, p);
        }
        debug_assert_eq!(cur, [1]);

        let mut field = FieldTable {
            p: p32,
            s,
            q: q as u32,
            modulus,
            generator: Elem(generator as u32),
            exp,
            log,
            zech: Vec::new(),
        };
        field.zech = (0..order as usize)
            .map(|u| {
                let v = field.add_digits(Elem::ONE, Elem(field.exp[u]));
                if v.is_zero() {
                    NO_LOG
                } else {
                    field.log[v.0 as usize]
                }
            })
            .collect();
        Ok(field)
    }

    pub fn characteristic(&self) -> u64 {
        self.p as u64
    }

    pub fn degree(&self) -> u32 {
        self.s
    }

    pub fn order(&self) -> u64 {
        self.q as u64
    }

    /// `q - 1`, the order of the multiplicative group.
    pub fn group_order(&self) -> u64 {
        self.q as u64 - 1
    }

    /// Modulus coefficients, constant term first (length `s + 1`).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> Elem {
        self.generator
    }

    /// Interprets `c` in base `p` as polynomial coefficients.
    pub fn element(&self, c: u64) -> Result<Elem> {
        if c >= self.q as u64 {
            return Err(Error::ElementOutOfRange { code: c, q: self.q as u64 });
        }
        Ok(Elem(c as u32))
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(Elem)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Elem> {
        (1..self.q).map(Elem)
    }

    /// `g^t`.
    pub fn exp(&self, t: u64) -> Elem {
        Elem(self.exp[(t % self.group_order()) as usize])
    }

    pub fn dlog(&self, x: Elem) -> Result<u32> {
        if x.is_zero() {
            return Err(Error::ZeroElement("dlog"));
        }
        Ok(self.log[x.0 as usize])
    }

    /// Discrete log of a nonzero element. Callers guarantee `x != 0`.
    pub(crate) fn log_unchecked(&self, x: Elem) -> u32 {
        debug_assert!(!x.is_zero());
        self.log[x.0 as usize]
    }

    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        if x.is_zero() || y.is_zero() {
            return Elem::ZERO;
        }
        let t = self.log[x.0 as usize] as u64 + self.log[y.0 as usize] as u64;
        self.exp(t)
    }

    pub fn inv(&self, x: Elem) -> Result<Elem> {
        let l = self.dlog(x)? as u64;
        Ok(self.exp(self.group_order() - l))
    }

    pub fn pow(&self, x: Elem, e: u64) -> Elem {
        if x.is_zero() {
            return if e == 0 { Elem::ONE } else { Elem::ZERO };
        }
        let order = self.group_order() as u128;
        let t = (self.log[x.0 as usize] as u128 * e as u128) % order;
        Elem(self.exp[t as usize])
    }

    /// Addition through the Zech table.
    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        if x.is_zero() {
            return y;
        }
        if y.is_zero() {
            return x;
        }
        let order = self.q - 1;
        let lx = self.log[x.0 as usize];
        let ly = self.log[y.0 as usize];
        let z = self.zech[((ly + order - lx) % order) as usize];
        if z == NO_LOG {
            Elem::ZERO
        } else {
            Elem(self.exp[((lx as u64 + z as u64) % order as u64) as usize])
        }
    }

    /// Coefficient-wise addition of the encodings.
    pub fn add_digits(&self, x: Elem, y: Elem) -> Elem {
        let p = self.p;
        if self.s == 1 {
            return Elem((x.0 + y.0) % p);
        }
        let (mut a, mut b, mut place, mut out) = (x.0, y.0, 1u32, 0u32);
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        Elem(out)
    }

    pub fn neg(&self, x: Elem) -> Elem {
        let p = self.p;
        let (mut a, mut place, mut out) = (x.0, 1u32, 0u32);
        while a > 0 {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        Elem(out)
    }

    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg(y))
    }

    /// Multiplication by schoolbook polynomial product and reduction, bypassing the tables.
    pub fn mul_poly(&self, x: Elem, y: Elem) -> Elem {
        let p = self.p as u64;
        let f: Vec<u64> = self.modulus.iter().map(|&c| c as u64).collect();
        let prod = poly::mul_mod(
            &digits(x.0 as u64, p, self.s),
            &digits(y.0 as u64, p, self.s),
            &f,
            p,
        );
        Elem(undigits(&prod, p) as u32)
    }

    /// Quadratic character: `+1` on nonzero squares, `-1` on non-squares, `0` at zero.
    pub fn eta(&self, x: Elem) -> Result<i8> {
        if self.p == 2 {
            return Err(Error::EtaCharTwo);
        }
        if x.is_zero() {
            return Ok(0);
        }
        Ok(if self.log[x.0 as usize].is_multiple_of(2) { 1 } else { -1 })
    }

    /// True iff `x` is a `t`-th power in `F_q`.
    ///
    /// For `t | q - 1` this is `dlog(x) ≡ 0 (mod t)`; for other `t` the test uses
    /// `gcd(t, q - 1)`, which describes the same subgroup.
    pub fn is_kth_power(&self, x: Elem, t: u64) -> Result<bool> {
        if t == 0 {
            return Err(Error::OutOfRange("power index must be positive".into()));
        }
        let l = self.dlog(x)? as u64;
        let t = num_integer::gcd(t, self.group_order());
        Ok(l.is_multiple_of(t))
    }

    /// `q^{e/2}` as an exact integer; `q^{1/2} = p^{s/2}` requires `s * e` even.
    pub fn half_power(&self, e: u64) -> Result<BigUint> {
        let half = self.s as u64 * e;
        integrality::check(half.is_multiple_of(2), || {
            format!("q^({e}/2) is irrational for q = {}^{}", self.p, self.s)
        })?;
        Ok(BigUint::from(self.p).pow((half / 2) as u32))
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits `q = p^s` for a prime power `q`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let f = prime_factors(q);
    if f.len() != 1 {
        return None;
    }
    let p = f[0];
    let (mut s, mut r) = (0u32, q);
    while r % p == 0 {
        r /= p;
        s += 1;
    }
    Some((p, s))
}

fn canonical_modulus(p: u64, s: u32) -> Vec<u32> {
    (0..p.pow(s))
        .map(|code| {
            let mut f = digits(code, p, s);
            f.resize(s as usize, 0);
            f.push(1);
            f
        })
        .find(|f| poly::is_irreducible(f, p))
        .map(|f| f.into_iter().map(|c| c as u32).collect())
        .expect("irreducible polynomials exist in every degree")
}

/// Base-`p` digits of `c`, trimmed of leading zeros (zero is the empty vector).
fn digits(mut c: u64, p: u64, s: u32) -> Vec<u64> {
    let mut out = Vec::with_capacity(s as usize);
    while c > 0 {
        out.push(c % p);
        c /= p;
    }
    out
}

fn undigits(coeffs: &[u64], p: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Dense polynomials over `F_p`, constant term first, kept without trailing zeros.
mod poly {
    pub(super) fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn inv_mod(a: u64, p: u64) -> u64 {
        let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc
    }

    /// Remainder of `a` modulo a nonzero `f` (not necessarily monic).
    pub(super) fn rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        let mut r = trim(a.to_vec());
        let df = f.len() - 1;
        let lead_inv = inv_mod(f[df], p);
        while r.len() > df {
            let top = r.len() - 1;
            let c = r[top] * lead_inv % p;
            let shift = top - df;
            for (i, &fc) in f.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * fc % p) % p;
            }
            r = trim(r);
        }
        r
    }

    pub(super) fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        rem(&prod, f, p)
    }

    pub(super) fn pow_mod(a: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut acc = rem(&[1], f, p);
        let mut base = rem(a, f, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &base, f, p);
            }
            base = mul_mod(&base, &base, f, p);
            e >>= 1;
        }
        acc
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Ben-Or: `f` of degree `s` is irreducible iff `gcd(f, x^{p^i} - x) = 1` for `i <= s/2`.
    pub(super) fn is_irreducible(f: &[u64], p: u64) -> bool {
        let s = f.len() - 1;
        if s == 1 {
            return true;
        }
        if f[0] == 0 {
            return false;
        }
        let x = vec![0, 1];
        let mut h = rem(&x, f, p);
        for _ in 0..s / 2 {
            h = pow_mod(&h, p, f, p);
            let mut diff = h.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = (diff[1] + p - 1) % p;
            let g = gcd(f, &trim(diff), p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_of(f: &FieldTable, x: Elem) -> u64 {
        let mut t = 1u64;
        let mut cur = x;
        while cur != Elem::ONE {
            cur = f.mul_poly(cur, x);
            t += 1;
        }
        t
    }

    #[test]
    fn smallest_primitive_roots() {
        assert_eq!(FieldTable::build(7, 1, None).unwrap().generator().code(), 3);
        assert_eq!(FieldTable::build(3, 1, None).unwrap().generator().code(), 2);
        // 2 has order 3 mod 7, 3 has order 6
        let f7 = FieldTable::build(7, 1, None).unwrap();
        assert_eq!(order_of(&f7, Elem(2)), 3);
        assert_eq!(order_of(&f7, Elem(3)), 6);
    }

    #[test]
    fn canonical_moduli() {
        // x^4 + x + 1: x^4 + 1 = (x+1)^4 and x^4 + x = x(x^3 + 1) are reducible
        assert_eq!(FieldTable::build(2, 4, None).unwrap().modulus(), &[1, 1, 0, 0, 1]);
        assert_eq!(FieldTable::build(3, 2, None).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(FieldTable::build(5, 2, None).unwrap().modulus(), &[2, 0, 1]);
        assert_eq!(FieldTable::build(3, 4, None).unwrap().modulus(), &[2, 1, 0, 0, 1]);
        assert_eq!(FieldTable::build(2, 6, None).unwrap().modulus(), &[1, 1, 0, 0, 0, 0, 1]);
        assert_eq!(FieldTable::build(13, 1, None).unwrap().modulus(), &[0, 1]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(FieldTable::build(6, 1, None).unwrap_err(), Error::NotPrime(6));
        assert!(matches!(
            FieldTable::build(2, 21, None),
            Err(Error::FieldTooLarge { .. })
        ));
        assert!(matches!(
            FieldTable::build(2, 2, Some(&[1, 0, 1])),
            Err(Error::ReducibleModulus(_))
        ));
        assert!(matches!(FieldTable::build(2, 2, Some(&[1, 1])), Err(Error::BadModulus(_))));
        assert!(matches!(FieldTable::build(2, 2, Some(&[1, 1, 2])), Err(Error::BadModulus(_))));
        // x^2 + x + 1 is accepted
        let f4 = FieldTable::build(2, 2, Some(&[1, 1, 1])).unwrap();
        assert_eq!(f4.order(), 4);
    }

    #[test]
    fn element_encoding() {
        let f7 = FieldTable::build(7, 1, None).unwrap();
        assert_eq!(f7.element(5).unwrap().code(), 5);
        assert!(f7.element(7).is_err());
        let f16 = FieldTable::build(2, 4, None).unwrap();
        let one = f16.element(1).unwrap();
        for x in f16.elements() {
            assert_eq!(f16.mul(one, x), x);
        }
        // in F_9 = F_3[x]/(x^2+1) the code 3 is x, a root of the modulus
        let f9 = FieldTable::build(3, 2, None).unwrap();
        let x = f9.element(3).unwrap();
        assert_eq!(f9.add(f9.mul(x, x), Elem::ONE), Elem::ZERO);
    }

    #[test]
    fn dlog_values() {
        let f7 = FieldTable::build(7, 1, None).unwrap();
        assert_eq!(f7.dlog(Elem::ONE).unwrap(), 0);
        assert_eq!(f7.dlog(f7.generator()).unwrap(), 1);
        assert_eq!(f7.dlog(Elem(2)).unwrap(), 2);
        assert_eq!(f7.dlog(Elem::ZERO), Err(Error::ZeroElement("dlog")));
    }

    #[test]
    fn quadratic_character() {
        let f7 = FieldTable::build(7, 1, None).unwrap();
        assert_eq!(f7.eta(Elem::ONE).unwrap(), 1);
        assert_eq!(f7.eta(Elem::ZERO).unwrap(), 0);
        assert_eq!(f7.eta(Elem(3)).unwrap(), -1);
        let squares: Vec<u32> =
            f7.nonzero().filter(|&x| f7.eta(x).unwrap() == 1).map(Elem::code).collect();
        assert_eq!(squares, [1, 2, 4]);
        let f8 = FieldTable::build(2, 3, None).unwrap();
        assert_eq!(f8.eta(Elem::ONE), Err(Error::EtaCharTwo));
    }

    #[test]
    fn kth_powers() {
        let f7 = FieldTable::build(7, 1, None).unwrap();
        assert!(f7.is_kth_power(Elem::ONE, 1).unwrap());
        assert!(!f7.is_kth_power(Elem(2), 3).unwrap());
        assert!(f7.is_kth_power(Elem(6), 3).unwrap());
        assert!(f7.is_kth_power(Elem::ZERO, 3).is_err());
    }

    #[test]
    fn kth_power_class_sizes() {
        for (p, s) in [(2, 4), (3, 3), (5, 2), (13, 1), (2, 6), (7, 2)] {
            let f = FieldTable::build(p, s, None).unwrap();
            let order = f.group_order();
            for t in (1..=order).filter(|t| order.is_multiple_of(*t)) {
                let n = f.nonzero().filter(|&x| f.is_kth_power(x, t).unwrap()).count() as u64;
                assert_eq!(n, order / t, "q={} t={t}", f.order());
            }
        }
    }

    #[test]
    fn half_powers() {
        let f9 = FieldTable::build(3, 2, None).unwrap();
        assert_eq!(f9.half_power(1).unwrap(), BigUint::from(3u32));
        assert_eq!(f9.half_power(3).unwrap(), BigUint::from(27u32));
        let f7 = FieldTable::build(7, 1, None).unwrap();
        assert_eq!(f7.half_power(2).unwrap(), BigUint::from(7u32));
        assert!(matches!(f7.half_power(1), Err(Error::NonIntegral(_))));
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(97), Some((97, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
