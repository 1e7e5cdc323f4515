//! Solution counts of the diagonal equation `a_1 x_1^{m_1} + … + a_n x_n^{m_n} = 0`.
//!
//! `n0` counts solutions in `F_q^n`, `nstar0` those with every coordinate
//! nonzero. The closed forms cover two structural regimes: pairwise coprime
//! reduced degrees (arbitrary `a_j`), and the semiprimitive regime where all
//! `a_j = 1` and `D | p^ℓ + 1`. Under the latter `s` is even, so the
//! half-integral powers of `q` are exact powers of `p`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::eqmodel::{coprime_structure, DerivedParams, EquationSpec};
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldTable};
use crate::numth::{exact_div, i_count, i_count_uniform, neg_one_pow, sym_poly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalMethod {
    Coprime,
    Semiprimitive,
    SemiprimitiveUniform,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalCounts {
    pub n0: BigUint,
    pub nstar0: BigUint,
    pub method: DiagonalMethod,
}

impl DiagonalCounts {
    fn from_signed(n0: BigInt, nstar0: BigInt, method: DiagonalMethod) -> Result<Self> {
        let neg = || Error::Inconsistent(format!("{method:?} produced a negative count"));
        Ok(DiagonalCounts {
            n0: n0.to_biguint().ok_or_else(neg)?,
            nstar0: nstar0.to_biguint().ok_or_else(neg)?,
            method,
        })
    }
}

fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

/// `((q−1)^n + (−1)^n (q−1)) / q`, the common leading part of `nstar0`.
pub(crate) fn nstar0_base(q: u64, n: usize) -> Result<BigInt> {
    let qm1 = big(q - 1);
    let num = qm1.pow(n as u32) + neg_one_pow(n as u64) * &qm1;
    exact_div(&num, &big(q), "((q-1)^n + (-1)^n (q-1)) / q")
}

/// `Σ_{j=1}^{upper} η((−1)^j) σ_{2j}(etas) q^{j−1}`.
pub(crate) fn eta_sigma_sum(field: &FieldTable, etas: &[i64], upper: usize) -> Result<BigInt> {
    let mut total = BigInt::zero();
    if upper == 0 {
        return Ok(total);
    }
    let eta_minus_one = field.eta(field.neg(Elem::ONE))? as i64;
    let q = big(field.order());
    for j in 1..=upper {
        let sign = if j % 2 == 0 { 1 } else { eta_minus_one };
        total += sym_poly(2 * j, etas)? * sign * q.pow(j as u32 - 1);
    }
    Ok(total)
}

pub(crate) fn etas_of(field: &FieldTable, xs: impl IntoIterator<Item = Elem>) -> Result<Vec<i64>> {
    xs.into_iter().map(|x| field.eta(x).map(i64::from)).collect()
}

pub(crate) fn require_coprime(dp: &DerivedParams, method: &'static str) -> Result<()> {
    coprime_structure(&dp.sorted_degrees()).map_err(|reason| Error::Hypothesis { method, reason })
}

/// Returns `s / 2ℓ` after checking the semiprimitive hypotheses.
pub(crate) fn require_semiprimitive(
    spec: &EquationSpec,
    dp: &DerivedParams,
    method: &'static str,
) -> Result<u64> {
    let fail = |reason: String| Err(Error::Hypothesis { method, reason });
    if spec.a().iter().any(|&x| x != Elem::ONE) {
        return fail("all a_j must equal 1".into());
    }
    if dp.degree_lcm <= 2 {
        return fail(format!("degree lcm {} must exceed 2", dp.degree_lcm));
    }
    let Some(ell) = dp.semiprimitive_ell else {
        return fail(format!("{} divides no p^l + 1", dp.degree_lcm));
    };
    Ok(spec.field().degree() as u64 / (2 * ell as u64))
}

/// Closed form for pairwise coprime reduced degrees, arbitrary coefficients.
pub fn diag_coprime(spec: &EquationSpec, dp: &DerivedParams) -> Result<DiagonalCounts> {
    require_coprime(dp, "diag_coprime")?;
    let field = spec.field();
    let q = field.order();
    let n = spec.n();
    let t = dp.odd_count;
    let qb = big(q);

    let mut n0 = qb.pow(n as u32 - 1);
    if t == 0 && n.is_multiple_of(2) {
        let prod = spec.a().iter().fold(Elem::ONE, |acc, &x| field.mul(acc, x));
        let sign = field.pow(field.neg(Elem::ONE), n as u64 / 2);
        let eta = field.eta(field.mul(sign, prod))?;
        n0 += qb.pow(n as u32 / 2 - 1) * (q - 1) * eta;
    }

    let mut nstar0 = nstar0_base(q, n)?;
    if t < n {
        let tail = dp.parity_order[t..].iter().map(|&i| spec.a()[i]);
        let etas = etas_of(field, tail)?;
        let sum = eta_sigma_sum(field, &etas, (n - t) / 2)?;
        nstar0 += sum * (q - 1) * neg_one_pow(n as u64);
    }
    DiagonalCounts::from_signed(n0, nstar0, DiagonalMethod::Coprime)
}

/// `Σ_{|S| = r} I(d_S)` over all `r`-subsets of `degrees`.
pub(crate) fn subset_i_sum(degrees: &[u64], r: usize) -> BigInt {
    let n = degrees.len();
    let mut total = BigInt::zero();
    for mask in 0u64..(1u64 << n) {
        if mask.count_ones() as usize != r {
            continue;
        }
        let sub: Vec<u64> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| degrees[i]).collect();
        total += i_count(&sub);
    }
    total
}

pub(crate) fn binomial(n: usize, r: usize) -> BigInt {
    (0..r).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Shared shape of the semiprimitive formulas; `i_of(r)` supplies `Σ_{|S|=r} I(d_S)`.
fn semiprimitive_counts(
    field: &FieldTable,
    n: usize,
    sigma: u64,
    i_of: impl Fn(usize) -> BigInt,
) -> Result<(BigInt, BigInt)> {
    let q = field.order();
    let qb = big(q);
    let n0 = qb.pow(n as u32 - 1)
        + BigInt::from(field.half_power(n as u64 - 2)?)
            * big(q - 1)
            * i_of(n)
            * neg_one_pow((sigma + 1) * n as u64);
    let mut sum = BigInt::zero();
    for r in 2..=n {
        sum += BigInt::from(field.half_power(r as u64 - 2)?) * i_of(r) * neg_one_pow(r as u64 * sigma);
    }
    let nstar0 = nstar0_base(q, n)? + sum * (q - 1) * neg_one_pow(n as u64);
    Ok((n0, nstar0))
}

/// Closed form for the semiprimitive regime, summing `I` over all subsets.
pub fn diag_semiprimitive(spec: &EquationSpec, dp: &DerivedParams) -> Result<DiagonalCounts> {
    let sigma = require_semiprimitive(spec, dp, "diag_semiprimitive")?;
    let (n0, nstar0) =
        semiprimitive_counts(spec.field(), spec.n(), sigma, |r| subset_i_sum(&dp.degrees, r))?;
    DiagonalCounts::from_signed(n0, nstar0, DiagonalMethod::Semiprimitive)
}

/// Semiprimitive regime with every degree equal to `D`: binomial form.
pub fn diag_semiprimitive_uniform(spec: &EquationSpec, dp: &DerivedParams) -> Result<DiagonalCounts> {
    let sigma = require_semiprimitive(spec, dp, "diag_semiprimitive_uniform")?;
    let d = dp.degree_lcm;
    if dp.degrees.iter().any(|&x| x != d) {
        return Err(Error::Hypothesis {
            method: "diag_semiprimitive_uniform",
            reason: format!("degrees {:?} are not all equal", dp.degrees),
        });
    }
    let n = spec.n();
    let (n0, nstar0) = semiprimitive_counts(spec.field(), n, sigma, |r| {
        binomial(n, r) * i_count_uniform(d, r as u32)
    })?;
    DiagonalCounts::from_signed(n0, nstar0, DiagonalMethod::SemiprimitiveUniform)
}

/// Histogram of `a x^m` as `x` runs over `F_q` (or `F_q*`).
fn term_histogram(field: &FieldTable, a: Elem, m: u64, include_zero: bool) -> Vec<(Elem, u64)> {
    let mut hist = vec![0u64; field.order() as usize];
    let xs: Box<dyn Iterator<Item = Elem>> =
        if include_zero { Box::new(field.elements()) } else { Box::new(field.nonzero()) };
    for x in xs {
        hist[field.mul(a, field.pow(x, m)).code() as usize] += 1;
    }
    field
        .elements()
        .zip(hist)
        .filter(|&(_, c)| c > 0)
        .collect()
}

fn zero_sum_count(spec: &EquationSpec, include_zero: bool) -> BigUint {
    let field = spec.field();
    let q = field.order() as usize;
    let mut dist = vec![BigUint::zero(); q];
    dist[0] = BigUint::one();
    for (&a, &m) in spec.a().iter().zip(spec.m()) {
        let hist = term_histogram(field, a, m, include_zero);
        let mut next = vec![BigUint::zero(); q];
        for (u, mass) in field.elements().zip(&dist) {
            if mass.is_zero() {
                continue;
            }
            for &(v, c) in &hist {
                next[field.add(u, v).code() as usize] += mass * c;
            }
        }
        dist = next;
    }
    std::mem::take(&mut dist[0])
}

/// Direct count by dynamic programming over partial sums; no hypotheses.
pub fn diag_oracle(spec: &EquationSpec) -> DiagonalCounts {
    DiagonalCounts {
        n0: zero_sum_count(spec, true),
        nstar0: zero_sum_count(spec, false),
        method: DiagonalMethod::Oracle,
    }
}
