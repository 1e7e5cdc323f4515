//! Cyclotomic polynomials and exact arithmetic in `Z[ζ_δ]`.

use std::collections::HashMap;
use std::fmt;
use std::ops::AddAssign;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::Result;
use crate::integrality;

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Exact quotient of `num` by the monic `den`; panics if the division leaves a remainder.
fn div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    assert!(rem.iter().all(|&r| r == 0), "non-exact cyclotomic division");
    quot
}

fn phi_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `Φ_n(x)`, constant term first, obtained by dividing `x^n - 1` by `Φ_e` for
/// every proper divisor `e` of `n`.
pub fn cyclotomic_poly(n: u64) -> Arc<Vec<i64>> {
    assert!(n > 0, "cyclotomic_poly: n must be positive");
    if let Some(phi) = phi_cache().lock().unwrap().get(&n) {
        return Arc::clone(phi);
    }
    let phi = if n == 1 {
        vec![-1, 1]
    } else {
        let mut acc = vec![0i64; n as usize + 1];
        acc[0] = -1;
        acc[n as usize] = 1;
        for e in divisors(n).into_iter().filter(|&e| e < n) {
            acc = div_monic(&acc, &cyclotomic_poly(e));
        }
        acc
    };
    let phi = Arc::new(phi);
    phi_cache().lock().unwrap().insert(n, Arc::clone(&phi));
    phi
}

/// An element `Σ c_i ζ_δ^i` of `Z[ζ_δ]`.
///
/// Coefficients are kept as a length-`δ` vector; [`normalize`](Self::normalize)
/// reduces modulo `Φ_δ`, after which only the first `φ(δ)` entries can be
/// nonzero and equality, zero tests and divisibility become exact.
#[derive(Clone)]
pub struct CyclotomicInt {
    order: u64,
    coeffs: Vec<BigInt>,
}

impl CyclotomicInt {
    pub fn zero(order: u64) -> Self {
        assert!(order > 0);
        CyclotomicInt { order, coeffs: vec![BigInt::zero(); order as usize] }
    }

    pub fn from_integer(order: u64, c: BigInt) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = c;
        z
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Adds `count · ζ^root_power`.
    pub fn accumulate(&mut self, root_power: i64, count: &BigInt) {
        let i = root_power.rem_euclid(self.order as i64) as usize;
        self.coeffs[i] += count;
    }

    /// Reduces the representative modulo `Φ_δ`.
    pub fn normalize(&mut self) {
        let phi = cyclotomic_poly(self.order);
        let deg = phi.len() - 1;
        for top in (deg..self.coeffs.len()).rev() {
            if self.coeffs[top].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut self.coeffs[top]);
            let shift = top - deg;
            for (j, &f) in phi[..deg].iter().enumerate() {
                if f != 0 {
                    self.coeffs[shift + j] -= &c * f;
                }
            }
        }
    }

    pub fn normalized(&self) -> Self {
        let mut z = self.clone();
        z.normalize();
        z
    }

    /// Coefficients of the reduced representative in the basis `1, ζ, …, ζ^{φ(δ)-1}`.
    pub fn reduced_coeffs(&self) -> Vec<BigInt> {
        let deg = cyclotomic_poly(self.order).len() - 1;
        let mut z = self.normalized();
        z.coeffs.truncate(deg);
        z.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.normalized().coeffs.iter().all(Zero::is_zero)
    }

    /// Exact divisibility by a rational integer.
    pub fn divisible_by(&self, d: &BigInt) -> bool {
        self.normalized().coeffs.iter().all(|c| c.is_multiple_of(d))
    }

    /// Exact division by a rational integer; fails unless [`divisible_by`](Self::divisible_by).
    pub fn div_exact(&self, d: &BigInt) -> Result<Self> {
        let z = self.normalized();
        integrality::check(z.coeffs.iter().all(|c| c.is_multiple_of(d)), || {
            format!("element of Z[zeta_{}] is not divisible by {d}", self.order)
        })?;
        Ok(CyclotomicInt {
            order: self.order,
            coeffs: z.coeffs.iter().map(|c| c / d).collect(),
        })
    }

    /// Image under `ζ ↦ ζ^{-1}` (complex conjugation).
    pub fn conj(&self) -> Self {
        let n = self.order as usize;
        let mut out = Self::zero(self.order);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[(n - i) % n] += c;
        }
        out.normalize();
        out
    }

    /// Product with `ζ^power`.
    pub fn mul_root(&self, power: i64) -> Self {
        let mut out = Self::zero(self.order);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.accumulate(i as i64 + power, c);
        }
        out
    }

    /// The same number viewed in `Z[ζ_N]` for a multiple `N` of the order.
    pub fn embed(&self, order: u64) -> Self {
        assert_eq!(order % self.order, 0, "cannot embed Z[zeta_{}] in Z[zeta_{order}]", self.order);
        let step = (order / self.order) as usize;
        let mut out = Self::zero(order);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[i * step] += c;
        }
        out
    }

    /// `Some(c)` when the number is the rational integer `c`.
    pub fn as_integer(&self) -> Option<BigInt> {
        let z = self.normalized();
        if z.coeffs[1..].iter().all(Zero::is_zero) {
            Some(z.coeffs[0].clone())
        } else {
            None
        }
    }
}

impl AddAssign<&CyclotomicInt> for CyclotomicInt {
    fn add_assign(&mut self, rhs: &CyclotomicInt) {
        assert_eq!(self.order, rhs.order, "adding elements of different cyclotomic rings");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl PartialEq for CyclotomicInt {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.reduced_coeffs() == other.reduced_coeffs()
    }
}

impl Eq for CyclotomicInt {}

impl fmt::Debug for CyclotomicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[zeta_{}]{:?}", self.order, self.reduced_coeffs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polys() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(2), vec![1, 1]);
        assert_eq!(*cyclotomic_poly(3), vec![1, 1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn phi_105_has_a_coefficient_minus_two() {
        let phi = cyclotomic_poly(105);
        assert_eq!(phi.len() - 1, 48);
        assert_eq!(phi[7], -2);
        assert_eq!(phi[41], -2);
    }

    #[test]
    fn product_of_phi_over_divisors_is_x_n_minus_1() {
        for n in 1..=40u64 {
            let mut prod = vec![1i64];
            for e in divisors(n) {
                let phi = cyclotomic_poly(e);
                let mut next = vec![0i64; prod.len() + phi.len() - 1];
                for (i, a) in prod.iter().enumerate() {
                    for (j, b) in phi.iter().enumerate() {
                        next[i + j] += a * b;
                    }
                }
                prod = next;
            }
            let mut want = vec![0i64; n as usize + 1];
            want[0] = -1;
            want[n as usize] = 1;
            assert_eq!(prod, want, "n={n}");
        }
    }

    #[test]
    fn full_orbit_sums_vanish() {
        let one = BigInt::from(1);
        let mut z = CyclotomicInt::zero(6);
        for i in 0..6 {
            z.accumulate(i, &one);
        }
        assert!(z.is_zero());

        let mut w = CyclotomicInt::zero(4);
        w.accumulate(0, &one);
        w.accumulate(2, &one);
        assert!(w.is_zero());
    }

    #[test]
    fn reduction_mod_phi3() {
        let mut z = CyclotomicInt::zero(3);
        z.accumulate(0, &BigInt::from(1));
        z.accumulate(1, &BigInt::from(1));
        z.accumulate(2, &BigInt::from(2));
        // 1 + ζ + 2ζ² = ζ² = -1 - ζ
        assert_eq!(z.reduced_coeffs(), vec![BigInt::from(-1), BigInt::from(-1)]);
        assert!(!z.is_zero());
    }

    #[test]
    fn exact_division() {
        let mut z = CyclotomicInt::zero(5);
        z.accumulate(1, &BigInt::from(6));
        z.accumulate(7, &BigInt::from(-12));
        assert!(z.divisible_by(&BigInt::from(3)));
        assert!(!z.divisible_by(&BigInt::from(4)));
        let h = z.div_exact(&BigInt::from(6)).unwrap();
        assert_eq!(h.reduced_coeffs()[1..3], [BigInt::from(1), BigInt::from(-2)]);
        assert!(z.div_exact(&BigInt::from(5)).is_err());
    }

    #[test]
    fn conjugation_and_integers() {
        let mut z = CyclotomicInt::zero(8);
        z.accumulate(1, &BigInt::from(1));
        z.accumulate(7, &BigInt::from(1));
        // ζ + ζ^{-1} = sqrt(2) is real but not rational
        assert_eq!(z.conj(), z);
        assert_eq!(z.as_integer(), None);
        let mut i4 = CyclotomicInt::zero(4);
        i4.accumulate(1, &BigInt::from(1));
        i4 = i4.mul_root(1);
        assert_eq!(i4.as_integer(), Some(BigInt::from(-1)));
        let e = CyclotomicInt::from_integer(3, BigInt::from(5)).embed(12);
        assert_eq!(e.as_integer(), Some(BigInt::from(5)));
    }
}
