//! Randomized invariant suites with reproducible seeds.
//!
//! Each suite draws its cases from its own seeded stream, evaluates them in
//! parallel, and reports the number of cases run, the number of failures,
//! and the smallest failing equation (by `q^n`, then exponent mass).

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::charsum::{assemble, build_w, count_from_w, t_sum, Character};
use crate::counter::{count_with, evaluate, naive_profile, oracle_count};
use crate::diagonal::{diag_coprime, diag_oracle, diag_semiprimitive, diag_semiprimitive_uniform, DiagonalCounts};
use crate::eqmodel::{classify, derive_params, DerivedParams, EquationSpec, Method};
use crate::error::{Error, Result};
use crate::gf::Elem;
use crate::numth::{i_count, i_count_enumerate, i_count_product, i_count_uniform};
use crate::sampling::{self, random_spec, random_unit_gcd_spec, FieldCache, SampleBounds};

/// Closed-form evaluator under test; [`evaluate`] in production.
pub type Evaluator = dyn Fn(Method, &EquationSpec, &DerivedParams) -> Result<BigInt> + Sync;

#[derive(Debug, Clone, Copy)]
pub struct SelftestConfig {
    pub seed: u64,
    /// Wall-clock allowance for the whole run, split evenly across suites.
    pub budget: Duration,
    /// Upper bound on random cases per suite.
    pub cases: usize,
    pub bounds: SampleBounds,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            seed: 1,
            budget: Duration::from_secs(60),
            cases: 200,
            bounds: SampleBounds::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }
}

struct Failure {
    size: (u64, u64),
    message: String,
}

fn size_of(spec: &EquationSpec) -> (u64, u64) {
    let mass = spec.m().iter().chain(spec.kj()).sum::<u64>() + spec.k();
    (spec.field().order().saturating_pow(spec.n() as u32), mass)
}

fn failure(spec: &EquationSpec, what: String) -> Failure {
    Failure { size: size_of(spec), message: format!("{spec:?}: {what}") }
}

/// Runs `check` on each spec until the deadline; collects the run count and failures.
fn run_cases(
    name: &'static str,
    specs: Vec<EquationSpec>,
    deadline: Instant,
    check: impl Fn(&EquationSpec) -> Option<Failure> + Sync,
) -> SuiteReport {
    let outcomes: Vec<Option<Option<Failure>>> = specs
        .par_iter()
        .map(|spec| (Instant::now() < deadline).then(|| check(spec)))
        .collect();
    let cases = outcomes.iter().filter(|o| o.is_some()).count();
    let failures: Vec<Failure> = outcomes.into_iter().flatten().flatten().collect();
    let counterexample = failures.iter().min_by_key(|f| f.size).map(|f| f.message.clone());
    SuiteReport { name, cases, failures: failures.len(), counterexample }
}

fn draw(seed: u64, salt: u64, cases: usize, bounds: SampleBounds, cache: &FieldCache) -> Vec<EquationSpec> {
    let mut rng = sampling::rng(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    (0..cases).map(|_| random_spec(&mut rng, cache, bounds)).collect()
}

/// Characters whose order does not divide `support_gcd` give `T(ψ) = 0` exactly.
pub fn vanishing_suite(cfg: &SelftestConfig, cache: &FieldCache, deadline: Instant) -> SuiteReport {
    let bounds = SampleBounds { max_q: cfg.bounds.max_q.min(25), ..cfg.bounds };
    let specs = draw(cfg.seed, 1, cfg.cases, bounds, cache);
    run_cases("vanishing", specs, deadline, |spec| {
        let dp = match derive_params(spec) {
            Ok(dp) => dp,
            Err(e) => return Some(failure(spec, e.to_string())),
        };
        let w = build_w(spec);
        for psi in Character::all(spec.field()).filter(|c| !c.power_is_trivial(dp.support_gcd)) {
            match t_sum(spec, &w, psi) {
                Ok(t) if t.is_zero() => {}
                Ok(t) => return Some(failure(spec, format!("T(psi_{}) = {t:?}", psi.index()))),
                Err(e) => return Some(failure(spec, e.to_string())),
            }
        }
        None
    })
}

fn consistency_check(spec: &EquationSpec) -> std::result::Result<(), String> {
    let w = build_w(spec);
    let diag = diag_oracle(spec);
    let profile = naive_profile(spec);
    for b in spec.field().nonzero() {
        let sb = spec.with_b(b).map_err(|e| e.to_string())?;
        let dp = derive_params(&sb).map_err(|e| e.to_string())?;
        let direct = count_with(&sb, &w, &diag);
        let naive = BigUint::from(profile[b.code() as usize]);
        if direct != naive {
            return Err(format!("b={}: table count {direct}, enumeration {naive}", b.code()));
        }
        if !dp.b_in_power_class {
            let (nstar, _) = count_from_w(&sb, &w);
            if !nstar.is_zero() {
                return Err(format!("b={} outside the power class but {nstar} all-nonzero solutions", b.code()));
            }
        }
        let assembled = assemble(&sb, &dp, &w, &diag).map_err(|e| e.to_string())?;
        if assembled != BigInt::from(direct.clone()) {
            return Err(format!("b={}: assembly {assembled}, table count {direct}", b.code()));
        }
    }
    Ok(())
}

/// For every `b`: enumeration, the table count, and the character-sum assembly agree.
pub fn consistency_suite(cfg: &SelftestConfig, cache: &FieldCache, deadline: Instant) -> SuiteReport {
    let bounds = SampleBounds { max_q: cfg.bounds.max_q.min(25), max_n: cfg.bounds.max_n.min(3), ..cfg.bounds };
    let specs = draw(cfg.seed, 2, cfg.cases, bounds, cache);
    run_cases("consistency", specs, deadline, |spec| consistency_check(spec).err().map(|e| failure(spec, e)))
}

/// Both closed forms of `I` against enumeration for `v_i <= max_v`, `r <= max_r`,
/// and the uniform form for `v <= uniform_v`, `r <= uniform_r`.
pub fn i_count_sweep(max_v: u64, max_r: usize, uniform_v: u64, uniform_r: u32) -> SuiteReport {
    let mut cases = 0;
    let mut failures = Vec::new();
    for r in 1..=max_r {
        let mut vs = vec![1u64; r];
        loop {
            cases += 1;
            let direct = i_count_enumerate(&vs);
            let subsets = i_count(&vs);
            let product = i_count_product(&vs);
            if subsets != direct || product != direct {
                failures.push(format!("I{vs:?}: subsets {subsets}, product {product}, enumeration {direct}"));
            }
            // nondecreasing tuples suffice: I is symmetric
            let Some(i) = (0..r).rev().find(|&i| vs[i] < max_v) else { break };
            vs[i] += 1;
            let v = vs[i];
            vs[i + 1..].iter_mut().for_each(|x| *x = v);
        }
    }
    for v in 1..=uniform_v {
        for r in 1..=uniform_r {
            cases += 1;
            let general = i_count(&vec![v; r as usize]);
            let uniform = i_count_uniform(v, r);
            if general != uniform {
                failures.push(format!("I({v} x{r}): general {general}, uniform {uniform}"));
            }
        }
    }
    SuiteReport { name: "i_count", cases, failures: failures.len(), counterexample: failures.into_iter().next() }
}

type DiagonalForm = fn(&EquationSpec, &DerivedParams) -> Result<DiagonalCounts>;

/// Every applicable diagonal closed form, compared with the diagonal oracle.
pub fn diagonal_check(spec: &EquationSpec) -> std::result::Result<usize, String> {
    let dp = derive_params(spec).map_err(|e| e.to_string())?;
    let oracle = diag_oracle(spec);
    let forms: [(&str, DiagonalForm); 3] = [
        ("coprime", diag_coprime),
        ("semiprimitive", diag_semiprimitive),
        ("semiprimitive_uniform", diag_semiprimitive_uniform),
    ];
    let mut applied = 0;
    for (name, form) in forms {
        match form(spec, &dp) {
            Ok(c) => {
                applied += 1;
                if (&c.n0, &c.nstar0) != (&oracle.n0, &oracle.nstar0) {
                    return Err(format!(
                        "{name}: ({}, {}) but oracle ({}, {})",
                        c.n0, c.nstar0, oracle.n0, oracle.nstar0
                    ));
                }
            }
            Err(Error::Hypothesis { .. }) => {}
            Err(e) => return Err(format!("{name}: {e}")),
        }
    }
    Ok(applied)
}

pub fn diagonal_suite(cfg: &SelftestConfig, cache: &FieldCache, deadline: Instant) -> SuiteReport {
    let specs = draw(cfg.seed, 3, cfg.cases, cfg.bounds, cache);
    run_cases("diagonal", specs, deadline, |spec| diagonal_check(spec).err().map(|e| failure(spec, e)))
}

/// Every applicable closed form, through `evaluator`, against [`oracle_count`].
pub fn closed_form_check(spec: &EquationSpec, evaluator: &Evaluator) -> std::result::Result<usize, String> {
    let dp = derive_params(spec).map_err(|e| e.to_string())?;
    let methods = classify(spec, &dp).methods();
    if methods.is_empty() {
        return Ok(0);
    }
    let oracle = BigInt::from(oracle_count(spec));
    for &method in &methods {
        let value = evaluator(method, spec, &dp).map_err(|e| format!("{method}: {e}"))?;
        if value != oracle {
            return Err(format!("{method} gives {value}, oracle {oracle}"));
        }
    }
    Ok(methods.len())
}

pub fn closed_form_suite(
    cfg: &SelftestConfig,
    cache: &FieldCache,
    deadline: Instant,
    evaluator: &Evaluator,
) -> SuiteReport {
    let mut specs = draw(cfg.seed, 4, cfg.cases - cfg.cases / 4, cfg.bounds, cache);
    let mut rng = sampling::rng(cfg.seed ^ 5);
    specs.extend((0..cfg.cases / 4).map(|_| random_unit_gcd_spec(&mut rng, cache, cfg.bounds)));
    run_cases("closed_form", specs, deadline, |spec| {
        closed_form_check(spec, evaluator).err().map(|e| failure(spec, e))
    })
}

/// All suites with the production evaluator.
pub fn run_selftest(cfg: &SelftestConfig) -> SelftestReport {
    run_selftest_with(cfg, &evaluate)
}

pub fn run_selftest_with(cfg: &SelftestConfig, evaluator: &Evaluator) -> SelftestReport {
    let cache = FieldCache::new();
    let start = Instant::now();
    let slice = cfg.budget / 4;
    let suites = vec![
        i_count_sweep(6, 3, 12, 6),
        vanishing_suite(cfg, &cache, start + slice),
        consistency_suite(cfg, &cache, start + slice * 2),
        diagonal_suite(cfg, &cache, start + slice * 3),
        closed_form_suite(cfg, &cache, start + cfg.budget, evaluator),
    ];
    SelftestReport { seed: cfg.seed, suites }
}

/// Tuples `(d_1 <= … <= d_n)` drawn from `pool`, `n` in `2..=max_n`.
pub fn degree_multisets(pool: &[u64], max_n: usize) -> Vec<Vec<u64>> {
    fn extend(pool: &[u64], from: usize, cur: &mut Vec<u64>, max_n: usize, out: &mut Vec<Vec<u64>>) {
        if cur.len() >= 2 {
            out.push(cur.clone());
        }
        if cur.len() == max_n {
            return;
        }
        for i in from..pool.len() {
            cur.push(pool[i]);
            extend(pool, i, cur, max_n, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    extend(pool, 0, &mut Vec::new(), max_n, &mut out);
    out
}

/// Diagonal closed forms against the oracle for every degree multiset realizable with
/// `m_j <= max_m` over the field of order `q`, each with unit coefficients and with
/// `extra_coeffs` seeded random coefficient vectors.
pub fn diagonal_exhaustive(
    cache: &FieldCache,
    q: u64,
    max_n: usize,
    max_m: u64,
    extra_coeffs: usize,
    seed: u64,
) -> SuiteReport {
    use rand::Rng;

    let field = cache.get(q);
    let order = field.group_order();
    // gcd(m, q - 1) takes exactly the divisors of q - 1 that are <= max_m
    let pool: Vec<u64> = (1..=max_m.min(order)).filter(|d| order.is_multiple_of(*d)).collect();
    let mut rng = sampling::rng(seed ^ q);
    let mut specs = Vec::new();
    for degrees in degree_multisets(&pool, max_n) {
        let n = degrees.len();
        let mut coeffs = vec![vec![Elem::ONE; n]];
        for _ in 0..extra_coeffs {
            coeffs.push((0..n).map(|_| field.exp(rng.gen_range(0..order))).collect());
        }
        for a in coeffs {
            let spec = EquationSpec::new(field.clone(), a, Elem::ONE, degrees.clone(), vec![1; n], 1)
                .expect("valid diagonal spec");
            specs.push(spec);
        }
    }
    let far = Instant::now() + Duration::from_secs(3600);
    run_cases("diagonal_exhaustive", specs, far, |spec| diagonal_check(spec).err().map(|e| failure(spec, e)))
}
