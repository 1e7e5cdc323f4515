//! Equation instances, their derived invariants, and closed-form applicability.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldTable};
use crate::numth::lcm_all;

/// `(a_1 x_1^{m_1} + … + a_n x_n^{m_n})^k = b · x_1^{k_1} ⋯ x_n^{k_n}` over a fixed field.
#[derive(Clone)]
pub struct EquationSpec {
    field: Arc<FieldTable>,
    a: Vec<Elem>,
    b: Elem,
    m: Vec<u64>,
    kj: Vec<u64>,
    k: u64,
}

impl EquationSpec {
    pub fn new(
        field: Arc<FieldTable>,
        a: Vec<Elem>,
        b: Elem,
        m: Vec<u64>,
        kj: Vec<u64>,
        k: u64,
    ) -> Result<Self> {
        let n = a.len();
        if n < 2 {
            return Err(Error::InvalidSpec(format!("need at least 2 variables, got {n}")));
        }
        if m.len() != n {
            return Err(Error::InvalidSpec(format!("m has {} entries, expected n = {n}", m.len())));
        }
        if kj.len() != n {
            return Err(Error::InvalidSpec(format!("kj has {} entries, expected n = {n}", kj.len())));
        }
        let q = field.order();
        if let Some(x) = a.iter().find(|x| x.is_zero() || x.code() as u64 >= q) {
            return Err(Error::InvalidSpec(format!("coefficient a = {} is not in F_{q}*", x.code())));
        }
        if b.is_zero() || b.code() as u64 >= q {
            return Err(Error::InvalidSpec(format!("b = {} is not in F_{q}*", b.code())));
        }
        if m.contains(&0) || kj.contains(&0) || k == 0 {
            return Err(Error::InvalidSpec("exponents must be positive".into()));
        }
        if lcm_all(&m).is_none() {
            return Err(Error::InvalidSpec("lcm of the m exponents overflows".into()));
        }
        Ok(EquationSpec { field, a, b, m, kj, k })
    }

    pub fn field(&self) -> &FieldTable {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<FieldTable> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[Elem] {
        &self.a
    }

    pub fn b(&self) -> Elem {
        self.b
    }

    pub fn m(&self) -> &[u64] {
        &self.m
    }

    pub fn kj(&self) -> &[u64] {
        &self.kj
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Same equation with a different right-hand coefficient.
    pub fn with_b(&self, b: Elem) -> Result<Self> {
        Self::new(self.field.clone(), self.a.clone(), b, self.m.clone(), self.kj.clone(), self.k)
    }

    /// Relabels variables: variable `i` of the result is variable `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n());
        EquationSpec {
            field: self.field.clone(),
            a: perm.iter().map(|&i| self.a[i]).collect(),
            b: self.b,
            m: perm.iter().map(|&i| self.m[i]).collect(),
            kj: perm.iter().map(|&i| self.kj[i]).collect(),
            k: self.k,
        }
    }
}

impl fmt::Debug for EquationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EquationSpec")
            .field("q", &self.field.order())
            .field("a", &self.a.iter().map(|x| x.code()).collect::<Vec<_>>())
            .field("b", &self.b.code())
            .field("m", &self.m)
            .field("kj", &self.kj)
            .field("k", &self.k)
            .finish()
    }
}

/// Invariants of an equation that decide which closed forms apply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivedParams {
    /// `gcd(k, k_1, …, k_n, q − 1)`.
    pub power_gcd: u64,
    /// `lcm(m_1, …, m_n)`.
    pub m_lcm: u64,
    /// `gcd(m_j, q − 1)`: the diagonal equation only sees these degrees.
    pub degrees: Vec<u64>,
    /// `lcm` of `degrees`.
    pub degree_lcm: u64,
    /// `gcd(Σ k_j M/m_j − kM, k_1(q−1)/d_1, …, k_n(q−1)/d_n, q − 1)` with `M = m_lcm`.
    /// Characters whose order does not divide this value contribute nothing.
    pub support_gcd: u64,
    /// Number of odd `degrees`.
    pub odd_count: usize,
    /// Stable ordering of the variables with odd degrees first.
    pub parity_order: Vec<usize>,
    /// Least `ℓ >= 1` with `degree_lcm | p^ℓ + 1`, searched only when `degree_lcm > 2`.
    pub semiprimitive_ell: Option<u32>,
    /// Whether `b` is a `power_gcd`-th power.
    pub b_in_power_class: bool,
}

impl DerivedParams {
    /// Degrees reordered by [`parity_order`](Self::parity_order).
    pub fn sorted_degrees(&self) -> Vec<u64> {
        self.parity_order.iter().map(|&i| self.degrees[i]).collect()
    }
}

fn mod_pow(base: u64, mut e: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut acc = 1u128 % m;
    let mut b = base as u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}

/// Residue of `Σ_j k_j · w_j − k · w` modulo `modulus`.
fn weighted_residue(kj: &[u64], weights: &[u64], k: u64, w: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let pos = kj
        .iter()
        .zip(weights)
        .fold(0u128, |acc, (&kj, &wj)| (acc + (kj as u128 % m) * (wj as u128 % m)) % m);
    let neg = (k as u128 % m) * (w as u128 % m) % m;
    ((pos + m - neg) % m) as u64
}

pub fn derive_params(spec: &EquationSpec) -> Result<DerivedParams> {
    let field = spec.field();
    let order = field.group_order();
    let (p, s) = (field.characteristic(), field.degree());

    let power_gcd = spec.kj().iter().fold(spec.k().gcd(&order), |g, &x| g.gcd(&x));
    let m_lcm = lcm_all(spec.m()).expect("validated at construction");
    let degrees: Vec<u64> = spec.m().iter().map(|&m| m.gcd(&order)).collect();
    let degree_lcm = lcm_all(&degrees).expect("degrees divide q - 1");

    // gcd(E, …) = gcd(E mod (q-1), …) since q - 1 is among the arguments
    let weights: Vec<u64> = spec.m().iter().map(|&m| m_lcm / m).collect();
    let e = weighted_residue(spec.kj(), &weights, spec.k(), m_lcm, order);
    let support_gcd = spec
        .kj()
        .iter()
        .zip(&degrees)
        .map(|(&kj, &d)| ((kj as u128 * (order / d) as u128) % order as u128) as u64)
        .fold(e.gcd(&order), |g, x| g.gcd(&x));

    let mut parity_order: Vec<usize> = (0..spec.n()).collect();
    parity_order.sort_by_key(|&i| degrees[i].is_multiple_of(2));
    let odd_count = degrees.iter().filter(|&&d| d % 2 == 1).count();

    let semiprimitive_ell = if degree_lcm > 2 {
        (1..=s).find(|&l| (mod_pow(p, l as u64, degree_lcm) + 1).is_multiple_of(degree_lcm))
    } else {
        None
    };
    if let Some(l) = semiprimitive_ell {
        if s % (2 * l) != 0 {
            return Err(Error::Inconsistent(format!(
                "minimal l = {l} with {degree_lcm} | p^l + 1 but 2l does not divide s = {s}"
            )));
        }
    }

    let b_in_power_class = field.is_kth_power(spec.b(), power_gcd)?;

    Ok(DerivedParams {
        power_gcd,
        m_lcm,
        degrees,
        degree_lcm,
        support_gcd,
        odd_count,
        parity_order,
        semiprimitive_ell,
        b_in_power_class,
    })
}

/// Closed-form evaluators for the full equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Coprime-degree structure, `b` outside the power class.
    CoprimeNonpower,
    /// Semiprimitive structure, `b` outside the power class.
    SemiprimitiveNonpower,
    /// Coprime-degree structure, `b` in the power class, `support_gcd = power_gcd`.
    CoprimePower,
    /// Semiprimitive structure, `b` in the power class, `support_gcd = power_gcd`.
    SemiprimitivePower,
    /// `gcd(Σ k_j Π m / m_j − k Π m, q − 1) = 1` gives `q^{n−1} + (−1)^{n−1}`.
    UnitGcd,
    /// `(x_1 + x_2 + x_3)^2 = b x_1 x_2 x_3`-type equations: `q^2 + 1`.
    CarlitzTernary,
    /// Four-variable analogue: `q^3 − 1 − η(b a_1 a_2 a_3 a_4) q`.
    CarlitzQuaternary,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::CoprimeNonpower,
        Method::SemiprimitiveNonpower,
        Method::CoprimePower,
        Method::SemiprimitivePower,
        Method::UnitGcd,
        Method::CarlitzTernary,
        Method::CarlitzQuaternary,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::CoprimeNonpower => "coprime_nonpower",
            Method::SemiprimitiveNonpower => "semiprimitive_nonpower",
            Method::CoprimePower => "coprime_power",
            Method::SemiprimitivePower => "semiprimitive_power",
            Method::UnitGcd => "unit_gcd",
            Method::CarlitzTernary => "carlitz_ternary",
            Method::CarlitzQuaternary => "carlitz_quaternary",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Which closed forms apply, with a note for every hypothesis that fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApplicabilityReport {
    /// Odd degrees, then halves of even degrees, are pairwise coprime.
    pub coprime_structure: bool,
    /// All `a_j = 1`, `degree_lcm > 2`, and `degree_lcm | p^ℓ + 1` for some `ℓ`.
    pub semiprimitive_structure: bool,
    /// `support_gcd == power_gcd`.
    pub support_is_power_gcd: bool,
    pub coprime_nonpower: bool,
    pub semiprimitive_nonpower: bool,
    pub coprime_power: bool,
    pub semiprimitive_power: bool,
    pub unit_gcd: bool,
    pub carlitz_ternary: bool,
    pub carlitz_quaternary: bool,
    pub reasons: Vec<String>,
}

impl ApplicabilityReport {
    pub fn applies(&self, method: Method) -> bool {
        match method {
            Method::CoprimeNonpower => self.coprime_nonpower,
            Method::SemiprimitiveNonpower => self.semiprimitive_nonpower,
            Method::CoprimePower => self.coprime_power,
            Method::SemiprimitivePower => self.semiprimitive_power,
            Method::UnitGcd => self.unit_gcd,
            Method::CarlitzTernary => self.carlitz_ternary,
            Method::CarlitzQuaternary => self.carlitz_quaternary,
        }
    }

    pub fn methods(&self) -> Vec<Method> {
        Method::ALL.into_iter().filter(|&m| self.applies(m)).collect()
    }
}

/// Checks the coprime-degree structure on `degrees` in the given order.
pub(crate) fn coprime_structure(sorted_degrees: &[u64]) -> std::result::Result<(), String> {
    let t = sorted_degrees.iter().take_while(|&&d| d % 2 == 1).count();
    if sorted_degrees[t..].iter().any(|&d| d % 2 == 1) {
        return Err("degrees are not ordered odd-first".into());
    }
    let reduced: Vec<u64> = sorted_degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| if i < t { d } else { d / 2 })
        .collect();
    for i in 0..reduced.len() {
        for j in i + 1..reduced.len() {
            if reduced[i].gcd(&reduced[j]) != 1 {
                return Err(format!(
                    "reduced degrees {reduced:?} are not pairwise coprime ({} and {})",
                    reduced[i], reduced[j]
                ));
            }
        }
    }
    Ok(())
}

/// `Σ_j k_j Π m / m_j − k Π m` modulo `q − 1`, reduced to its gcd with `q − 1`.
pub fn unit_gcd_value(spec: &EquationSpec) -> u64 {
    let order = spec.field().group_order();
    let m = spec.m();
    let prod_mod = m.iter().fold(1u128, |acc, &x| acc * (x as u128 % order as u128) % order as u128);
    let weights: Vec<u64> = (0..m.len())
        .map(|j| {
            m.iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .fold(1u128, |acc, (_, &x)| acc * (x as u128 % order as u128) % order as u128)
                as u64
        })
        .collect();
    weighted_residue(spec.kj(), &weights, spec.k(), prod_mod as u64, order).gcd(&order)
}

pub fn classify(spec: &EquationSpec, dp: &DerivedParams) -> ApplicabilityReport {
    let mut reasons = Vec::new();
    let field = spec.field();

    let coprime_structure = match coprime_structure(&dp.sorted_degrees()) {
        Ok(()) => true,
        Err(why) => {
            reasons.push(format!("coprime structure: {why}"));
            false
        }
    };

    let all_one = spec.a().iter().all(|&x| x == Elem::ONE);
    if !all_one {
        reasons.push("semiprimitive structure: some a_j differs from 1".into());
    }
    if dp.degree_lcm <= 2 {
        reasons.push(format!("semiprimitive structure: degree lcm {} <= 2", dp.degree_lcm));
    } else if dp.semiprimitive_ell.is_none() {
        reasons.push(format!(
            "semiprimitive structure: {} divides no p^l + 1",
            dp.degree_lcm
        ));
    }
    let semiprimitive_structure = all_one && dp.semiprimitive_ell.is_some();

    let support_is_power_gcd = dp.support_gcd == dp.power_gcd;
    if dp.b_in_power_class {
        if !support_is_power_gcd {
            reasons.push(format!(
                "b is a {}-th power but support gcd {} differs from it; character sums required",
                dp.power_gcd, dp.support_gcd
            ));
        }
    } else {
        reasons.push(format!("b is not a {}-th power", dp.power_gcd));
    }

    let nonpower = !dp.b_in_power_class;
    let power_ok = dp.b_in_power_class && support_is_power_gcd;

    let unit_gcd = unit_gcd_value(spec) == 1;
    if !unit_gcd {
        reasons.push("unit gcd: the product-weighted exponent gcd with q - 1 exceeds 1".into());
    }

    let carlitz_shape = spec.m().iter().all(|&m| m == 1)
        && spec.kj().iter().all(|&k| k == 1)
        && spec.k() == 2
        && field.characteristic() != 2;

    ApplicabilityReport {
        coprime_structure,
        semiprimitive_structure,
        support_is_power_gcd,
        coprime_nonpower: coprime_structure && nonpower,
        semiprimitive_nonpower: semiprimitive_structure && nonpower,
        coprime_power: coprime_structure && power_ok,
        semiprimitive_power: semiprimitive_structure && power_ok,
        unit_gcd,
        carlitz_ternary: carlitz_shape && spec.n() == 3,
        carlitz_quaternary: carlitz_shape && spec.n() == 4,
        reasons,
    }
}
