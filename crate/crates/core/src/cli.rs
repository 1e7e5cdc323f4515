//! Command-line front end: spec ingestion, subcommands, and JSON reports.
//!
//! Reports go to standard output as JSON; the human-readable summary goes to
//! standard error. Exit codes: 0 success, 1 bad input, 2 a disagreement
//! between independent computations (or a failing self-test).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charsum::{build_w, t_sum, Character};
use crate::counter::{count_with, dispatch, Count, CountReport, DispatchOptions, EquationEcho};
use crate::diagonal::diag_oracle;
use crate::eqmodel::{classify, derive_params, ApplicabilityReport, DerivedParams, EquationSpec};
use crate::error::{Error, Result};
use crate::gf::FieldTable;
use crate::sampling::SampleBounds;
use crate::selftest::{run_selftest, SelftestConfig};
use crate::tables::{class_members, ROWS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_DISAGREE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gfcount", version, about = "Exact solution counts for twisted diagonal equations over finite fields")]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count solutions of one equation.
    Count {
        #[command(flatten)]
        input: SpecInput,
        /// Skip the oracle; report closed forms only.
        #[arg(long)]
        no_oracle: bool,
        /// Also count every b in F_q* and group the counts by power class.
        #[arg(long)]
        all_b: bool,
    },
    /// Re-derive the fourteen published reference counts.
    VerifyTables,
    /// Run the randomized invariant suites.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Time budget in seconds.
        #[arg(long, default_value_t = 60)]
        budget: u64,
        /// Random cases per suite.
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
    /// Print derived parameters and closed-form applicability.
    Derive {
        #[command(flatten)]
        input: SpecInput,
    },
    /// Print `T(ψ)` for every character with `ψ^d` trivial.
    Tsum {
        #[command(flatten)]
        input: SpecInput,
    },
}

/// An equation given either as a JSON file or through flags.
#[derive(Debug, Args)]
pub struct SpecInput {
    /// JSON spec file.
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub s: u32,
    /// Modulus digits, constant term first.
    #[arg(long, value_delimiter = ',')]
    pub modulus: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    pub a: Option<Vec<u64>>,
    /// Element code, or `power` / `nonpower`.
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',')]
    pub kj: Option<Vec<u64>>,
    #[arg(long)]
    pub k: Option<u64>,
    /// List the characters entering the correction sum.
    #[arg(long)]
    pub list_characters: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum BValue {
    Code(u64),
    Directive(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub p: u64,
    #[serde(default = "default_degree")]
    pub s: u32,
    #[serde(default)]
    pub modulus: Option<Vec<u32>>,
    pub a: Vec<u64>,
    pub b: BValue,
    pub m: Vec<u64>,
    pub kj: Vec<u64>,
    pub k: u64,
    #[serde(default)]
    pub run_oracle: Option<bool>,
    #[serde(default)]
    pub list_characters: bool,
}

fn default_degree() -> u32 {
    1
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(format!("spec file: {e}")))
    }

    /// Builds the field and resolves `b`; directives pick the smallest element of the class.
    pub fn to_spec(&self) -> Result<EquationSpec> {
        let field = Arc::new(FieldTable::build(self.p, self.s, self.modulus.as_deref())?);
        let a = self.a.iter().map(|&c| field.element(c)).collect::<Result<Vec<_>>>()?;
        let b = match &self.b {
            BValue::Code(c) => field.element(*c)?,
            BValue::Directive(d) => {
                let power = match d.as_str() {
                    "power" => true,
                    "nonpower" => false,
                    other => {
                        return Err(Error::InvalidSpec(format!(
                            "b: expected an element code, \"power\" or \"nonpower\", got {other:?}"
                        )))
                    }
                };
                let k0 = self.kj.iter().fold(self.k.gcd(&field.group_order()), |g, &x| g.gcd(&x));
                *class_members(&field, k0.max(1), power)?.first().ok_or_else(|| {
                    Error::InvalidSpec(format!("b: every nonzero element is a {k0}-th power"))
                })?
            }
        };
        EquationSpec::new(field, a, b, self.m.clone(), self.kj.clone(), self.k)
    }
}

impl SpecInput {
    fn load(&self) -> Result<SpecFile> {
        if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display())))?;
            let mut file = SpecFile::from_json(&text)?;
            file.list_characters |= self.list_characters;
            return Ok(file);
        }
        let missing = |name: &str| Error::InvalidSpec(format!("{name}: required without a spec file"));
        let b = self.b.as_deref().ok_or_else(|| missing("b"))?;
        let b = match b.parse::<u64>() {
            Ok(c) => BValue::Code(c),
            Err(_) => BValue::Directive(b.to_string()),
        };
        Ok(SpecFile {
            p: self.p.ok_or_else(|| missing("p"))?,
            s: self.s,
            modulus: self.modulus.clone(),
            a: self.a.clone().ok_or_else(|| missing("a"))?,
            b,
            m: self.m.clone().ok_or_else(|| missing("m"))?,
            kj: self.kj.clone().ok_or_else(|| missing("kj"))?,
            k: self.k.ok_or_else(|| missing("k"))?,
            run_oracle: None,
            list_characters: self.list_characters,
        })
    }
}

/// Exit status for a finished count.
pub fn exit_code(report: &CountReport) -> i32 {
    if report.agreement == Some(false) {
        EXIT_DISAGREE
    } else {
        EXIT_OK
    }
}

fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Inconsistent(_) | Error::NonIntegral(_) => EXIT_DISAGREE,
        _ => EXIT_INPUT,
    }
}

#[derive(Debug, Serialize)]
pub struct CharacterInfo {
    pub index: u64,
    pub order: u64,
    /// Whether `ψ^{k_0}` is nontrivial, so that `ψ` enters the correction sum.
    pub in_correction: bool,
}

fn characters(field: &FieldTable, dp: &DerivedParams) -> Vec<CharacterInfo> {
    Character::dividing(field, dp.support_gcd)
        .into_iter()
        .map(|psi| CharacterInfo {
            index: psi.index(),
            order: psi.order(),
            in_correction: !psi.power_is_trivial(dp.power_gcd),
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct ProfileEntry {
    pub b: u32,
    pub power_class: bool,
    pub count: Count,
}

#[derive(Debug, Serialize)]
pub struct BProfile {
    pub entries: Vec<ProfileEntry>,
    /// Distinct counts among `b` in the power class.
    pub power_counts: Vec<Count>,
    /// Distinct counts among `b` outside the power class.
    pub nonpower_counts: Vec<Count>,
}

fn b_profile(spec: &EquationSpec) -> Result<BProfile> {
    let w = build_w(spec);
    let diag = diag_oracle(spec);
    let mut entries = Vec::new();
    for b in spec.field().nonzero() {
        let sb = spec.with_b(b)?;
        let power_class = derive_params(&sb)?.b_in_power_class;
        entries.push(ProfileEntry { b: b.code(), power_class, count: Count(count_with(&sb, &w, &diag).into()) });
    }
    let distinct = |class: bool| {
        let mut v: Vec<BigInt> =
            entries.iter().filter(|e| e.power_class == class).map(|e| e.count.0.clone()).collect();
        v.sort();
        v.dedup();
        v.into_iter().map(Count).collect()
    };
    Ok(BProfile { power_counts: distinct(true), nonpower_counts: distinct(false), entries })
}

#[derive(Debug, Serialize)]
struct CountOutput {
    #[serde(flatten)]
    report: CountReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    characters: Option<Vec<CharacterInfo>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b_profile: Option<BProfile>,
}

#[derive(Debug, Serialize)]
struct DeriveOutput {
    equation: EquationEcho,
    derived: DerivedParams,
    applicability: ApplicabilityReport,
}

#[derive(Debug, Serialize)]
struct TsumEntry {
    index: u64,
    order: u64,
    /// Coefficients on `1, ζ, ζ^2, …` after reduction modulo the cyclotomic polynomial.
    coefficients: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct TableCheck {
    pub label: String,
    pub b: u32,
    pub expected: u64,
    pub closed_form: Option<String>,
    pub method: Option<String>,
    pub oracle: Option<String>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Dispatches every embedded row with the smallest admissible `b`.
pub fn verify_tables() -> Vec<TableCheck> {
    ROWS.par_iter()
        .map(|row| {
            let mut check = TableCheck {
                label: row.label(),
                b: 0,
                expected: row.expected,
                closed_form: None,
                method: None,
                oracle: None,
                passed: false,
                note: row.note,
                error: None,
            };
            let outcome = (|| -> Result<CountReport> {
                let field = Arc::new(row.field()?);
                let b = *row.representatives(&field, 1)?.first().ok_or_else(|| {
                    Error::InvalidSpec(format!("{}: no admissible b", row.label()))
                })?;
                check.b = b.code();
                dispatch(&row.spec(&field, b)?, DispatchOptions { run_oracle: true })
            })();
            match outcome {
                Ok(r) => {
                    let expected = BigInt::from(row.expected);
                    check.closed_form = r.closed_form_value.as_ref().map(|c| c.0.to_string());
                    check.method = r.closed_form_method.map(|m| m.to_string());
                    check.oracle = r.oracle_value.as_ref().map(|c| c.0.to_string());
                    check.passed = r.closed_form_value.as_ref().map(|c| &c.0) == Some(&expected)
                        && r.oracle_value.as_ref().map(|c| &c.0) == Some(&expected);
                }
                Err(e) => check.error = Some(e.to_string()),
            }
            check
        })
        .collect()
}

fn print_json<T: Serialize>(value: &T) {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn cmd_count(input: &SpecInput, no_oracle: bool, all_b: bool) -> Result<i32> {
    let file = input.load()?;
    let spec = file.to_spec()?;
    let run_oracle = !no_oracle && file.run_oracle.unwrap_or(true);
    let report = dispatch(&spec, DispatchOptions { run_oracle })?;
    let characters = file.list_characters.then(|| characters(spec.field(), &report.derived));
    let b_profile = if all_b { Some(b_profile(&spec)?) } else { None };

    let show = |c: &Option<Count>| c.as_ref().map_or("-".to_string(), |c| c.0.to_string());
    eprintln!(
        "q={} n={} b={}  closed form: {} ({})  oracle: {}  agreement: {}",
        report.equation.q,
        report.equation.n,
        report.equation.b,
        show(&report.closed_form_value),
        report.closed_form_method.map_or("none".to_string(), |m| m.to_string()),
        show(&report.oracle_value),
        report.agreement.map_or("-".to_string(), |a| a.to_string()),
    );
    let code = exit_code(&report);
    print_json(&CountOutput { report, characters, b_profile });
    Ok(code)
}

fn cmd_derive(input: &SpecInput) -> Result<i32> {
    let spec = input.load()?.to_spec()?;
    let derived = derive_params(&spec)?;
    let applicability = classify(&spec, &derived);
    eprintln!("applicable: {:?}", applicability.methods());
    print_json(&DeriveOutput { equation: EquationEcho::of(&spec), derived, applicability });
    Ok(EXIT_OK)
}

fn cmd_tsum(input: &SpecInput) -> Result<i32> {
    let spec = input.load()?.to_spec()?;
    let dp = derive_params(&spec)?;
    let w = build_w(&spec);
    let mut entries = Vec::new();
    for psi in Character::dividing(spec.field(), dp.support_gcd) {
        let t = t_sum(&spec, &w, psi)?;
        entries.push(TsumEntry {
            index: psi.index(),
            order: psi.order(),
            coefficients: t.reduced_coeffs().iter().map(|c| c.to_string()).collect(),
        });
    }
    eprintln!("{} characters with psi^{} trivial", entries.len(), dp.support_gcd);
    print_json(&entries);
    Ok(EXIT_OK)
}

fn cmd_verify_tables() -> i32 {
    let checks = verify_tables();
    {
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{:<20} {:>4} {:>12} {:>12} {:>12}  {:<24} result", "row", "b", "expected", "closed", "oracle", "method");
        for c in &checks {
            let _ = writeln!(
                out,
                "{:<20} {:>4} {:>12} {:>12} {:>12}  {:<24} {}",
                c.label,
                c.b,
                c.expected,
                c.closed_form.as_deref().unwrap_or("-"),
                c.oracle.as_deref().unwrap_or("-"),
                c.method.as_deref().unwrap_or("-"),
                if c.passed { "ok" } else { "FAIL" },
            );
            if let Some(note) = c.note {
                let _ = writeln!(out, "    note: {note}");
            }
            if let Some(err) = &c.error {
                let _ = writeln!(out, "    error: {err}");
            }
        }
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.label.as_str()).collect();
    eprintln!("{}/{} rows reproduced", checks.len() - failed.len(), checks.len());
    if failed.is_empty() {
        EXIT_OK
    } else {
        eprintln!("mismatched rows: {}", failed.join(", "));
        EXIT_DISAGREE
    }
}

fn cmd_selftest(seed: u64, budget: u64, cases: usize) -> i32 {
    let cfg = SelftestConfig {
        seed,
        budget: Duration::from_secs(budget),
        cases: cases.max(1),
        bounds: SampleBounds::default(),
    };
    let report = run_selftest(&cfg);
    for s in &report.suites {
        eprintln!(
            "{:<14} {:>5} cases  {}",
            s.name,
            s.cases,
            if s.passed() { "ok".to_string() } else { format!("{} FAILED", s.failures) }
        );
        if let Some(c) = &s.counterexample {
            eprintln!("    counterexample: {c}");
        }
    }
    print_json(&report);
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_DISAGREE
    }
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: {e}");
        }
    }
    let result = match &cli.command {
        Command::Count { input, no_oracle, all_b } => cmd_count(input, *no_oracle, *all_b),
        Command::VerifyTables => Ok(cmd_verify_tables()),
        Command::Selftest { seed, budget, cases } => Ok(cmd_selftest(*seed, *budget, *cases)),
        Command::Derive { input } => cmd_derive(input),
        Command::Tsum { input } => cmd_tsum(input),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    }
}
