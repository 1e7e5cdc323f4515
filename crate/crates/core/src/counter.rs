//! Closed-form evaluators for `N_q`, the full-equation oracles, and the dispatcher.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::charsum::{assemble, build_w, count_from_w, WTable};
use crate::diagonal::{
    binomial, diag_oracle, eta_sigma_sum, etas_of, nstar0_base, require_coprime,
    require_semiprimitive, subset_i_sum, DiagonalCounts,
};
use crate::eqmodel::{classify, derive_params, unit_gcd_value, ApplicabilityReport, DerivedParams, EquationSpec, Method};
use crate::error::{Error, Result};
use crate::gf::Elem;
use crate::numth::{exact_div, i_count, i_count_uniform, neg_one_pow};

/// Tuple-count ceiling below which [`dispatch`] also runs [`naive_count`].
pub const NAIVE_CROSSCHECK_LIMIT: u64 = 1_000_000;

fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

fn require_b_class(dp: &DerivedParams, power: bool, method: &'static str) -> Result<()> {
    if dp.b_in_power_class != power {
        let what = if power { "must" } else { "must not" };
        return Err(Error::Hypothesis {
            method,
            reason: format!("b {what} be a {}-th power", dp.power_gcd),
        });
    }
    if power && dp.support_gcd != dp.power_gcd {
        return Err(Error::Hypothesis {
            method,
            reason: format!(
                "support gcd {} differs from power gcd {}",
                dp.support_gcd, dp.power_gcd
            ),
        });
    }
    Ok(())
}

/// η-weighted σ-sum over the even-degree tail (or over all coefficients when `all`).
fn coprime_eta_sum(spec: &EquationSpec, dp: &DerivedParams, upper: usize, all: bool) -> Result<BigInt> {
    let field = spec.field();
    let coeffs: Vec<Elem> = if all {
        spec.a().to_vec()
    } else {
        dp.parity_order[dp.odd_count..].iter().map(|&i| spec.a()[i]).collect()
    };
    eta_sigma_sum(field, &etas_of(field, coeffs)?, upper)
}

/// `η((−1)^{n/2} a_1 ⋯ a_n)`.
fn eta_signed_product(spec: &EquationSpec) -> Result<i64> {
    let field = spec.field();
    let prod = spec.a().iter().fold(Elem::ONE, |acc, &x| field.mul(acc, x));
    let sign = field.pow(field.neg(Elem::ONE), spec.n() as u64 / 2);
    Ok(field.eta(field.mul(sign, prod))? as i64)
}

/// Coprime reduced degrees, `b` not a `k_0`-th power.
pub fn count_coprime_nonpower(spec: &EquationSpec, dp: &DerivedParams) -> Result<BigInt> {
    const M: &str = "coprime_nonpower";
    require_coprime(dp, M)?;
    require_b_class(dp, false, M)?;
    let q = spec.field().order();
    let n = spec.n();
    let t = dp.odd_count;
    let head = big(q).pow(n as u32 - 1) - nstar0_base(q, n)?;
    if t == 0 && n.is_multiple_of(2) {
        let sum = coprime_eta_sum(spec, dp, (n - 2) / 2, true)?;
        Ok(head - sum * (q - 1))
    } else if t == n {
        Ok(head)
    } else {
        let sum = coprime_eta_sum(spec, dp, (n - t) / 2, false)?;
        Ok(head - sum * (q - 1) * neg_one_pow(n as u64))
    }
}

/// `q^{n−1} − (−1)^n + (k_0 − 1)((q−1)^n − (−1)^n)/q`.
fn power_head(q: u64, n: usize, k0: u64) -> Result<BigInt> {
    let sign = neg_one_pow(n as u64);
    let frac = exact_div(
        &(big(q - 1).pow(n as u32) - sign),
        &big(q),
        "((q-1)^n - (-1)^n) / q",
    )?;
    Ok(big(q).pow(n as u32 - 1) - sign + frac * (k0 - 1))
}

/// Coprime reduced degrees, `b` a `k_0`-th power, `support_gcd = k_0`.
pub fn count_coprime_power(spec: &EquationSpec, dp: &DerivedParams) -> Result<BigInt> {
    const M: &str = "coprime_power";
    require_coprime(dp, M)?;
    require_b_class(dp, true, M)?;
    let q = spec.field().order();
    let n = spec.n();
    let t = dp.odd_count;
    let k0 = dp.power_gcd;
    let head = power_head(q, n, k0)?;
    if t == 0 && n.is_multiple_of(2) {
        let sum = coprime_eta_sum(spec, dp, (n - 2) / 2, true)?;
        let eta = eta_signed_product(spec)?;
        Ok(head - big(q).pow(n as u32 / 2 - 1) * k0 * eta - sum * (k0 + q - 1))
    } else if t == n {
        Ok(head)
    } else {
        let sum = coprime_eta_sum(spec, dp, (n - t) / 2, false)?;
        Ok(head - sum * (k0 + q - 1) * neg_one_pow(n as u64))
    }
}

/// `Σ_{r=2}^{n−1} (−1)^{rσ} q^{(r−2)/2} i_of(r)` with `σ = s/2ℓ`.
fn semiprimitive_tail(
    spec: &EquationSpec,
    sigma: u64,
    i_of: &dyn Fn(usize) -> BigInt,
) -> Result<BigInt> {
    let field = spec.field();
    let mut sum = BigInt::zero();
    for r in 2..spec.n() {
        sum += BigInt::from(field.half_power(r as u64 - 2)?) * i_of(r) * neg_one_pow(r as u64 * sigma);
    }
    Ok(sum)
}

/// Runs `eval` with the subset-sum `I` values and, when all degrees agree, with the
/// binomial specialization; the two must coincide.
fn with_uniform_crosscheck(
    dp: &DerivedParams,
    n: usize,
    method: &'static str,
    eval: impl Fn(&dyn Fn(usize) -> BigInt) -> Result<BigInt>,
) -> Result<BigInt> {
    let general = eval(&|r| {
        if r == n {
            i_count(&dp.degrees)
        } else {
            subset_i_sum(&dp.degrees, r)
        }
    })?;
    let d = dp.degree_lcm;
    if dp.degrees.iter().all(|&x| x == d) {
        let uniform = eval(&|r| binomial(n, r) * i_count_uniform(d, r as u32))?;
        if uniform != general {
            return Err(Error::Inconsistent(format!(
                "{method}: subset form {general} differs from binomial form {uniform}"
            )));
        }
    }
    Ok(general)
}

/// Semiprimitive regime, `b` not a `k_0`-th power.
pub fn count_semiprimitive_nonpower(spec: &EquationSpec, dp: &DerivedParams) -> Result<BigInt> {
    const M: &str = "semiprimitive_nonpower";
    let sigma = require_semiprimitive(spec, dp, M)?;
    require_b_class(dp, false, M)?;
    let q = spec.field().order();
    let n = spec.n();
    let head = big(q).pow(n as u32 - 1) - nstar0_base(q, n)?;
    with_uniform_crosscheck(dp, n, M, |i_of| {
        let tail = semiprimitive_tail(spec, sigma, i_of)?;
        Ok(&head - tail * (q - 1) * neg_one_pow(n as u64))
    })
}

/// Semiprimitive regime, `b` a `k_0`-th power, `support_gcd = k_0`.
pub fn count_semiprimitive_power(spec: &EquationSpec, dp: &DerivedParams) -> Result<BigInt> {
    const M: &str = "semiprimitive_power";
    let sigma = require_semiprimitive(spec, dp, M)?;
    require_b_class(dp, true, M)?;
    let field = spec.field();
    let q = field.order();
    let n = spec.n();
    let k0 = dp.power_gcd;
    let head = power_head(q, n, k0)?;
    let top_power = BigInt::from(field.half_power(n as u64 - 2)?);
    with_uniform_crosscheck(dp, n, M, |i_of| {
        let top = &top_power * i_of(n) * k0 * neg_one_pow((sigma + 1) * n as u64);
        let tail = semiprimitive_tail(spec, sigma, i_of)?;
        Ok(&head - top - tail * (k0 + q - 1) * neg_one_pow(n as u64))
    })
}

/// `q^{n−1} + (−1)^{n−1}` when `gcd(Σ k_j Π m/m_j − k Π m, q − 1) = 1`.
pub fn count_unit_gcd(spec: &EquationSpec) -> Result<BigInt> {
    let g = unit_gcd_value(spec);
    if g != 1 {
        return Err(Error::Hypothesis {
            method: "unit_gcd",
            reason: format!("exponent gcd with q - 1 is {g}"),
        });
    }
    let q = spec.field().order();
    let n = spec.n();
    Ok(big(q).pow(n as u32 - 1) + neg_one_pow(n as u64 - 1))
}

fn require_carlitz(spec: &EquationSpec, n: usize, method: &'static str) -> Result<()> {
    let ok = spec.n() == n
        && spec.m().iter().all(|&m| m == 1)
        && spec.kj().iter().all(|&k| k == 1)
        && spec.k() == 2
        && spec.field().characteristic() != 2;
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis {
            method,
            reason: format!("needs n = {n}, all m_j = k_j = 1, k = 2 and odd q"),
        })
    }
}

/// `(a_1x_1 + a_2x_2 + a_3x_3)^2 = b x_1x_2x_3`: `q^2 + 1`.
pub fn count_carlitz_ternary(spec: &EquationSpec) -> Result<BigInt> {
    require_carlitz(spec, 3, "carlitz_ternary")?;
    let q = big(spec.field().order());
    Ok(q.pow(2) + 1)
}

/// Four-variable analogue: `q^3 − 1 − η(b a_1 a_2 a_3 a_4) q`.
///
/// The character argument is `b` times the product of the coefficients: the
/// substitution `x_j → x_j / a_j` turns the equation into one with unit
/// coefficients and right-hand constant `b / (a_1 a_2 a_3 a_4)`.
pub fn count_carlitz_quaternary(spec: &EquationSpec) -> Result<BigInt> {
    require_carlitz(spec, 4, "carlitz_quaternary")?;
    let field = spec.field();
    let prod = spec.a().iter().fold(spec.b(), |acc, &x| field.mul(acc, x));
    let q = big(field.order());
    Ok(q.pow(3) - 1 - &q * field.eta(prod)?)
}

pub fn evaluate(method: Method, spec: &EquationSpec, dp: &DerivedParams) -> Result<BigInt> {
    match method {
        Method::CoprimeNonpower => count_coprime_nonpower(spec, dp),
        Method::SemiprimitiveNonpower => count_semiprimitive_nonpower(spec, dp),
        Method::CoprimePower => count_coprime_power(spec, dp),
        Method::SemiprimitivePower => count_semiprimitive_power(spec, dp),
        Method::UnitGcd => count_unit_gcd(spec),
        Method::CarlitzTernary => count_carlitz_ternary(spec),
        Method::CarlitzQuaternary => count_carlitz_quaternary(spec),
    }
}

/// `N_q = N_q^* + N_q(0) − N_q^*(0)` from a prebuilt table and diagonal counts.
pub fn count_with(spec: &EquationSpec, w: &WTable, diag: &DiagonalCounts) -> BigUint {
    let (nstar, nstar0) = count_from_w(spec, w);
    nstar + &diag.n0 - nstar0
}

/// Exact `N_q` for any equation via the W table and the diagonal oracle.
pub fn oracle_count(spec: &EquationSpec) -> BigUint {
    count_with(spec, &build_w(spec), &diag_oracle(spec))
}

/// Number of tuples in `F_q^n`, saturating.
pub fn tuple_count(spec: &EquationSpec) -> u64 {
    spec.field().order().saturating_pow(spec.n() as u32)
}

/// Solution counts for every `b ∈ F_q*` from one pass over `F_q^n`; index `b.code()`.
///
/// Tuples with a zero coordinate solve the equation iff the diagonal sum
/// vanishes, whatever `b` is; all-nonzero tuples with a nonzero sum determine
/// their `b` uniquely.
pub fn naive_profile(spec: &EquationSpec) -> Vec<u64> {
    let field = spec.field();
    let q = field.order() as usize;
    let n = spec.n();
    let terms: Vec<Vec<Elem>> = (0..n)
        .map(|j| field.elements().map(|x| field.mul(spec.a()[j], field.pow(x, spec.m()[j]))).collect())
        .collect();
    let monos: Vec<Vec<Elem>> = (0..n)
        .map(|j| field.elements().map(|x| field.pow(x, spec.kj()[j])).collect())
        .collect();

    let mut profile = vec![0u64; q];
    let mut common = 0u64;
    let mut xs = vec![0usize; n];
    loop {
        let mut sum = Elem::ZERO;
        let mut mono = Elem::ONE;
        let mut has_zero = false;
        for (j, &x) in xs.iter().enumerate() {
            sum = field.add(sum, terms[j][x]);
            mono = field.mul(mono, monos[j][x]);
            has_zero |= x == 0;
        }
        if has_zero {
            if sum.is_zero() {
                common += 1;
            }
        } else if !sum.is_zero() {
            let lhs = field.pow(sum, spec.k());
            let b = field.mul(lhs, field.inv(mono).expect("nonzero monomial"));
            profile[b.code() as usize] += 1;
        }

        let mut j = 0;
        loop {
            if j == n {
                for c in profile.iter_mut().skip(1) {
                    *c += common;
                }
                return profile;
            }
            xs[j] += 1;
            if xs[j] < q {
                break;
            }
            xs[j] = 0;
            j += 1;
        }
    }
}

/// Direct enumeration over `F_q^n` for the equation's own `b`.
pub fn naive_count(spec: &EquationSpec) -> u64 {
    naive_profile(spec)[spec.b().code() as usize]
}

/// Exact count serialized as a decimal string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Count(pub BigInt);

impl Serialize for Count {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.to_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquationEcho {
    pub p: u64,
    pub s: u32,
    pub q: u64,
    pub modulus: Vec<u32>,
    pub generator: u32,
    pub n: usize,
    pub a: Vec<u32>,
    pub b: u32,
    pub m: Vec<u64>,
    pub kj: Vec<u64>,
    pub k: u64,
}

impl EquationEcho {
    pub fn of(spec: &EquationSpec) -> Self {
        let f = spec.field();
        EquationEcho {
            p: f.characteristic(),
            s: f.degree(),
            q: f.order(),
            modulus: f.modulus().to_vec(),
            generator: f.generator().code(),
            n: spec.n(),
            a: spec.a().iter().map(|x| x.code()).collect(),
            b: spec.b().code(),
            m: spec.m().to_vec(),
            kj: spec.kj().to_vec(),
            k: spec.k(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormValue {
    pub method: Method,
    pub value: Count,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub equation: EquationEcho,
    pub derived: DerivedParams,
    pub applicability: ApplicabilityReport,
    pub closed_forms: Vec<ClosedFormValue>,
    pub closed_form_method: Option<Method>,
    pub closed_form_value: Option<Count>,
    pub closed_form_native: Option<i64>,
    pub oracle_value: Option<Count>,
    pub oracle_native: Option<i64>,
    pub agreement: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DispatchOptions {
    pub run_oracle: bool,
}

impl Default for DispatchOptions {
    fn default() -> Self {
        DispatchOptions { run_oracle: true }
    }
}

/// Evaluates every applicable closed form (they must agree) and, optionally, the oracles.
///
/// With the oracle enabled, the table route, the character-sum assembly and,
/// for at most [`NAIVE_CROSSCHECK_LIMIT`] tuples, direct enumeration must all
/// agree; a closed form that disagrees with them is reported through
/// `agreement`, not as an error.
pub fn dispatch(spec: &EquationSpec, opts: DispatchOptions) -> Result<CountReport> {
    let dp = derive_params(spec)?;
    let applicability = classify(spec, &dp);

    let mut closed_forms = Vec::new();
    for method in applicability.methods() {
        closed_forms.push(ClosedFormValue { method, value: Count(evaluate(method, spec, &dp)?) });
    }
    if let Some(first) = closed_forms.first() {
        if let Some(other) = closed_forms.iter().find(|c| c.value != first.value) {
            return Err(Error::Inconsistent(format!(
                "{} gives {} but {} gives {}",
                first.method, first.value.0, other.method, other.value.0
            )));
        }
    }
    let closed_form_method = closed_forms.first().map(|c| c.method);
    let closed_form_value = closed_forms.first().map(|c| c.value.clone());

    let oracle_value = if opts.run_oracle {
        let w = build_w(spec);
        let diag = diag_oracle(spec);
        let direct = BigInt::from(count_with(spec, &w, &diag));
        let assembled = assemble(spec, &dp, &w, &diag)?;
        if assembled != direct {
            return Err(Error::Inconsistent(format!(
                "character-sum assembly gives {assembled}, table count gives {direct}"
            )));
        }
        if tuple_count(spec) <= NAIVE_CROSSCHECK_LIMIT {
            let naive = BigInt::from(naive_count(spec));
            if naive != direct {
                return Err(Error::Inconsistent(format!(
                    "enumeration gives {naive}, table count gives {direct}"
                )));
            }
        }
        Some(Count(direct))
    } else {
        None
    };

    let agreement = match (&closed_form_value, &oracle_value) {
        (Some(c), Some(o)) => Some(c == o),
        _ => None,
    };
    Ok(CountReport {
        equation: EquationEcho::of(spec),
        derived: dp,
        applicability,
        closed_forms,
        closed_form_method,
        closed_form_native: closed_form_value.as_ref().and_then(|c| c.0.to_i64()),
        closed_form_value,
        oracle_native: oracle_value.as_ref().and_then(|c| c.0.to_i64()),
        oracle_value,
        agreement,
    })
}
