//! Multiplicative characters and the twisted character sums of the equation.
//!
//! Everything is driven by the W table: the joint distribution, over all
//! `x ∈ (F_q*)^n`, of the diagonal value `s = Σ a_j x_j^{m_j}` and the weighted
//! logarithm `t = Σ k_j log x_j mod (q − 1)`. From it we read off the number
//! of all-nonzero solutions for any `b`, the all-nonzero diagonal count, and
//! every
//!
//! ```text
//! T(ψ) = 1/(q−1) Σ_{x ∈ (F_q*)^n, s ≠ 0} ψ^{k_1}(x_1)⋯ψ^{k_n}(x_n) ψ̄^k(s)
//! ```
//!
//! as an exact element of `Z[ζ_δ]`, `δ` the order of `ψ`. The defining sum
//! skips `s = 0`, so the convention for `ψ(0)` never enters.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::diagonal::DiagonalCounts;
use crate::eqmodel::{DerivedParams, EquationSpec};
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldTable};
use crate::integrality;
use crate::numth::{exact_div, CyclotomicInt};

/// `ψ_r(g^t) = ζ_{q−1}^{r t}` for the field's fixed generator `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Character {
    r: u64,
    group_order: u64,
}

impl Character {
    pub fn new(field: &FieldTable, r: u64) -> Self {
        let group_order = field.group_order();
        Character { r: r % group_order, group_order }
    }

    pub fn trivial(field: &FieldTable) -> Self {
        Self::new(field, 0)
    }

    pub fn index(&self) -> u64 {
        self.r
    }

    pub fn order(&self) -> u64 {
        self.group_order / self.r.gcd(&self.group_order)
    }

    pub fn is_trivial(&self) -> bool {
        self.r == 0
    }

    /// `ψ̄ = ψ^{-1}`.
    pub fn conj(&self) -> Self {
        Character { r: (self.group_order - self.r) % self.group_order, group_order: self.group_order }
    }

    /// Whether `ψ^e` is trivial.
    pub fn power_is_trivial(&self, e: u64) -> bool {
        (self.r as u128 * e as u128).is_multiple_of(self.group_order as u128)
    }

    /// Exponent `r · log x (mod q − 1)` of `ψ(x)` as a power of `ζ_{q−1}`.
    pub fn exponent_at(&self, field: &FieldTable, x: Elem) -> Result<u64> {
        let l = field.dlog(x)? as u128;
        Ok(((self.r as u128 * l) % self.group_order as u128) as u64)
    }

    /// All characters, by index.
    pub fn all(field: &FieldTable) -> impl Iterator<Item = Character> + '_ {
        (0..field.group_order()).map(move |r| Character::new(field, r))
    }

    /// Characters with `ψ^d` trivial, by index.
    pub fn dividing(field: &FieldTable, d: u64) -> Vec<Character> {
        let order = field.group_order();
        let d = d.gcd(&order);
        let step = order / d;
        (0..d).map(|i| Character::new(field, i * step)).collect()
    }
}

/// Joint distribution of `(Σ a_j x_j^{m_j}, Σ k_j log x_j mod (q−1))` over `(F_q*)^n`.
#[derive(Debug, Clone)]
pub struct WTable {
    group_order: usize,
    counts: Vec<BigUint>,
}

impl WTable {
    pub fn get(&self, s: Elem, t: u64) -> &BigUint {
        &self.counts[s.code() as usize * self.group_order + (t as usize % self.group_order)]
    }

    pub fn row(&self, s: Elem) -> &[BigUint] {
        let start = s.code() as usize * self.group_order;
        &self.counts[start..start + self.group_order]
    }

    pub fn row_total(&self, s: Elem) -> BigUint {
        self.row(s).iter().sum()
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }
}

/// Folds in one variable at a time; cost `O(n · q · (q−1)^2)`.
pub fn build_w(spec: &EquationSpec) -> WTable {
    let field = spec.field();
    let q = field.order() as usize;
    let order = field.group_order() as usize;
    let mut counts = vec![BigUint::zero(); q * order];
    counts[0] = BigUint::one();

    for j in 0..spec.n() {
        let (a, m, kj) = (spec.a()[j], spec.m()[j], spec.kj()[j]);
        let mut steps: Vec<(Elem, usize)> = field
            .nonzero()
            .map(|x| {
                let w = (kj as u128 * field.log_unchecked(x) as u128 % order as u128) as usize;
                (field.mul(a, field.pow(x, m)), w)
            })
            .collect();
        steps.sort_unstable();
        let mut grouped: Vec<(Elem, usize, u64)> = Vec::with_capacity(steps.len());
        for (v, w) in steps {
            match grouped.last_mut() {
                Some(last) if last.0 == v && last.1 == w => last.2 += 1,
                _ => grouped.push((v, w, 1)),
            }
        }

        let mut next = vec![BigUint::zero(); q * order];
        for s in field.elements() {
            let base = s.code() as usize * order;
            for t in 0..order {
                let mass = &counts[base + t];
                if mass.is_zero() {
                    continue;
                }
                for &(v, w, c) in &grouped {
                    let idx = field.add(s, v).code() as usize * order + (t + w) % order;
                    if c == 1 {
                        next[idx] += mass;
                    } else {
                        next[idx] += mass * c;
                    }
                }
            }
        }
        counts = next;
    }
    WTable { group_order: order, counts }
}

/// Exact `T(ψ) ∈ Z[ζ_δ]`.
pub fn t_sum(spec: &EquationSpec, w: &WTable, psi: Character) -> Result<CyclotomicInt> {
    let field = spec.field();
    let order = field.group_order();
    let delta = psi.order();
    // ζ_{q−1}^{r e} = ζ_δ^{(r δ / (q−1)) e}
    let mult = psi.index() / (order / delta);
    let k = spec.k() % order;

    let mut buckets = vec![BigUint::zero(); delta as usize];
    for s in field.nonzero() {
        let shift = (k * field.log_unchecked(s) as u64) % order;
        for (t, c) in w.row(s).iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = (t as u64 + order - shift) % order;
            let root = ((mult as u128 * e as u128) % delta as u128) as usize;
            buckets[root] += c;
        }
    }
    let mut acc = CyclotomicInt::zero(delta);
    for (i, c) in buckets.into_iter().enumerate() {
        if !c.is_zero() {
            acc.accumulate(i as i64, &BigInt::from(c));
        }
    }
    acc.div_exact(&BigInt::from(order))
}

/// `(N_q^*, N_q^*(0))`: all-nonzero solutions of the full and of the diagonal equation.
pub fn count_from_w(spec: &EquationSpec, w: &WTable) -> (BigUint, BigUint) {
    let field = spec.field();
    let order = field.group_order();
    let k = spec.k() % order;
    let log_b = field.log_unchecked(spec.b()) as u64;
    let nstar = field
        .nonzero()
        .map(|s| {
            let t = (k * field.log_unchecked(s) as u64 % order + order - log_b) % order;
            w.get(s, t)
        })
        .sum();
    (nstar, w.row_total(Elem::ZERO))
}

/// The characters entering the correction sum: order dividing `support_gcd` but not `power_gcd`.
pub fn correction_characters(field: &FieldTable, dp: &DerivedParams) -> Vec<Character> {
    Character::dividing(field, dp.support_gcd)
        .into_iter()
        .filter(|psi| !psi.power_is_trivial(dp.power_gcd))
        .collect()
}

/// `Σ ψ(b) T(ψ)` over [`correction_characters`], as an exact element of `Z[ζ_d]`.
pub fn correction_sum(spec: &EquationSpec, dp: &DerivedParams, w: &WTable) -> Result<CyclotomicInt> {
    let field = spec.field();
    let order = field.group_order();
    let d = dp.support_gcd.gcd(&order);
    let log_b = field.log_unchecked(spec.b()) as u64;
    let mut acc = CyclotomicInt::zero(d);
    for psi in correction_characters(field, dp) {
        let t = t_sum(spec, w, psi)?.embed(d);
        // ψ(b) = ζ_{q−1}^{r log b} = ζ_d^{(r d/(q−1)) log b}
        let i = psi.index() / (order / d);
        acc += &t.mul_root(((i as u128 * log_b as u128) % d as u128) as i64);
    }
    acc.normalize();
    Ok(acc)
}

/// `N_q` from the diagonal counts and the character sums.
///
/// If `b` is not a `power_gcd`-th power, `N_q = N_q(0) − N_q^*(0)`. Otherwise
/// `N_q = k_0 (q−1)^{n−1} + N_q(0) − (k_0+q−1)/(q−1) · N_q^*(0) + Σ ψ(b) T(ψ)`,
/// the sum over characters of order dividing `support_gcd` but not `k_0`.
pub fn assemble(
    spec: &EquationSpec,
    dp: &DerivedParams,
    w: &WTable,
    diag: &DiagonalCounts,
) -> Result<BigInt> {
    let n0 = BigInt::from(diag.n0.clone());
    let nstar0 = BigInt::from(diag.nstar0.clone());
    if !dp.b_in_power_class {
        return Ok(n0 - nstar0);
    }
    let field = spec.field();
    let qm1 = BigInt::from(field.group_order());
    let k0 = BigInt::from(dp.power_gcd);
    let scaled = exact_div(&((&k0 + &qm1) * &nstar0), &qm1, "(k0 + q - 1) N*(0) / (q - 1)")?;
    let main = &k0 * qm1.pow(spec.n() as u32 - 1) + n0 - scaled;

    let correction = correction_sum(spec, dp, w)?;
    let value = correction.as_integer();
    integrality::check(value.is_some(), || {
        format!("character correction {correction:?} is not a rational integer")
    })?;
    let total = main + value.unwrap_or_default();
    if total < BigInt::zero() {
        return Err(Error::Inconsistent(format!("assembled count {total} is negative")));
    }
    Ok(total)
}
