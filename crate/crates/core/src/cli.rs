//! Command-line front end: JSON input formats, suite orchestration and the
//! exit-code contract (0 pass, 1 failed checks, 2 malformed input, 3 a
//! truncation bound was too small).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bialg::{build_double, check_shifted_bialgebra, check_triple, Cobracket, ManinTriple, ShiftedBialgebra};
use crate::exactnum::linalg::Matrix;
use crate::exactnum::{fmt_rational, parse_rational, Rational};
use crate::graded::{GradedBasis, SparseTensor};
use crate::koszul::{koszul_suite, KoszulBounds};
use crate::liealg::{
    canonical_lagrangians, check_antisymmetry, check_degrees, check_jacobi, check_metric, GradedLieAlgebra,
    RawBrackets, ShiftedMetric, Subspace,
};
use crate::loopyang::{yangian_suite, BaseAlgebra, DifferenceRMatrix, FsfModule, LoopError, YangianConfig};
use crate::report::{Check, Report};
use crate::rmat::rmatrix_suite;
use crate::uea::{quantization_suite, UeaError};

pub const ALGEBRA_SCHEMA: &str = "shifted-manin/algebra/v1";
pub const RMATRIX_SCHEMA: &str = "shifted-manin/rmatrix/v1";
pub const MODULE_SCHEMA: &str = "shifted-manin/module/v1";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_OVERFLOW: i32 = 3;

/// Malformed input, with the offending field.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct InputError(pub String);

fn bad(field: impl std::fmt::Display, msg: impl std::fmt::Display) -> InputError {
    InputError(format!("{field}: {msg}"))
}

fn rational(field: impl std::fmt::Display, s: &str) -> Result<Rational, InputError> {
    parse_rational(s).map_err(|e| bad(field, e))
}

fn is_zero_i64(v: &i64) -> bool {
    *v == 0
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub label: String,
    pub degree: i64,
    #[serde(default, skip_serializing_if = "is_zero_i64")]
    pub weight: i64,
}

/// [a, b] = Σ coeff · c, terms as [label, "p/q"].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub a: String,
    pub b: String,
    pub terms: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairEntry {
    pub a: String,
    pub b: String,
    pub value: String,
}

/// δ(x) = Σ coeff · y ⊗ z, terms as [y, z, "p/q"].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CobracketEntry {
    pub x: String,
    pub terms: Vec<(String, String, String)>,
}

/// Spanning vectors of the two Lagrangians; h₋ is listed in the order dual to h₊.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lagrangians {
    pub plus: Vec<Vec<(String, String)>>,
    pub minus: Vec<Vec<(String, String)>>,
}

/// A graded Lie algebra with optional pairing, Lagrangians, cobracket and
/// invariant form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub basis: Vec<BasisEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub brackets: Vec<BracketEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(i64, i64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kappa: Vec<PairEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lagrangians: Option<Lagrangians>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cobracket: Vec<CobracketEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub beta: Vec<PairEntry>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, schema: &str, what: &str) -> Result<T, InputError> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| InputError(format!("{what}: {e}")))?;
    match v.get("schema").and_then(|s| s.as_str()) {
        Some(s) if s == schema => {}
        Some(s) => return Err(bad(format!("{what}.schema"), format!("expected \"{schema}\", found \"{s}\""))),
        None => return Err(bad(format!("{what}.schema"), format!("missing; expected \"{schema}\""))),
    }
    serde_json::from_value(v).map_err(|e| InputError(format!("{what}: {e}")))
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| bad(path.display(), e))
}

fn lookup(basis: &GradedBasis, field: impl std::fmt::Display, label: &str) -> Result<usize, InputError> {
    basis.lookup(label).ok_or_else(|| bad(field, format!("unknown label \"{label}\"")))
}

fn vector(basis: &Arc<GradedBasis>, field: &str, terms: &[(String, String)]) -> Result<SparseTensor, InputError> {
    let mut v = SparseTensor::zero(1, basis.clone());
    for (k, (l, c)) in terms.iter().enumerate() {
        let f = format!("{field}[{k}]");
        v.add_term(vec![lookup(basis, &f, l)?], rational(&f, c)?);
    }
    Ok(v)
}

fn terms_of(basis: &GradedBasis, v: &SparseTensor) -> Vec<(String, String)> {
    v.iter().map(|(i, c)| (basis.label(i[0]).to_string(), fmt_rational(c))).collect()
}

impl AlgebraFile {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        parse_json(text, ALGEBRA_SCHEMA, "algebra")
    }

    pub fn load(path: &Path) -> Result<Self, InputError> {
        Self::parse(&read(path)?).map_err(|e| InputError(format!("{}: {}", path.display(), e.0)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("algebra serializes") + "\n"
    }

    pub fn graded_basis(&self) -> Result<Arc<GradedBasis>, InputError> {
        let entries = self.basis.iter().map(|b| (b.label.clone(), b.degree, b.weight)).collect();
        GradedBasis::with_weights(entries).map(Arc::new).map_err(|e| bad("basis", e))
    }

    pub fn raw_brackets(&self, basis: &GradedBasis) -> Result<RawBrackets, InputError> {
        let mut entries = Vec::new();
        for (k, e) in self.brackets.iter().enumerate() {
            let f = format!("brackets[{k}]");
            let a = lookup(basis, format!("{f}.a"), &e.a)?;
            let b = lookup(basis, format!("{f}.b"), &e.b)?;
            let mut t = Vec::new();
            for (j, (l, c)) in e.terms.iter().enumerate() {
                let ff = format!("{f}.terms[{j}]");
                t.push((lookup(basis, &ff, l)?, rational(&ff, c)?));
            }
            entries.push((a, b, t));
        }
        Ok(RawBrackets { entries })
    }

    pub fn algebra(&self) -> Result<(GradedLieAlgebra, RawBrackets), InputError> {
        let basis = self.graded_basis()?;
        let raw = self.raw_brackets(&basis)?;
        let l = GradedLieAlgebra::from_raw(basis, &raw).map_err(|e| bad("brackets", e))?;
        Ok(match self.window {
            Some((lo, hi)) => (l.with_window(lo, hi), raw),
            None => (l, raw),
        })
    }

    /// κ exactly as listed; antisymmetry is left to the metric checks.
    pub fn metric(&self, basis: &GradedBasis) -> Result<Option<ShiftedMetric>, InputError> {
        if self.kappa.is_empty() {
            return Ok(None);
        }
        let mut entries = Vec::new();
        for (k, e) in self.kappa.iter().enumerate() {
            let f = format!("kappa[{k}]");
            entries.push((
                (lookup(basis, format!("{f}.a"), &e.a)?, lookup(basis, format!("{f}.b"), &e.b)?),
                rational(format!("{f}.value"), &e.value)?,
            ));
        }
        Ok(Some(ShiftedMetric::new(entries)))
    }

    pub fn cobracket(&self, basis: &Arc<GradedBasis>) -> Result<Cobracket, InputError> {
        let mut d = Cobracket::zero(basis.clone());
        for (k, e) in self.cobracket.iter().enumerate() {
            let f = format!("cobracket[{k}]");
            let x = lookup(basis, format!("{f}.x"), &e.x)?;
            for (j, (y, z, c)) in e.terms.iter().enumerate() {
                let ff = format!("{f}.terms[{j}]");
                let idx = vec![lookup(basis, &ff, y)?, lookup(basis, &ff, z)?];
                d.delta[x].add_term(idx, rational(&ff, c)?);
            }
        }
        Ok(d)
    }

    pub fn bialgebra(&self) -> Result<ShiftedBialgebra, InputError> {
        let (algebra, _) = self.algebra()?;
        let cobracket = self.cobracket(algebra.basis())?;
        Ok(ShiftedBialgebra { algebra, cobracket })
    }

    /// Lagrangians from the file, or the degree split when none are given.
    pub fn triple(&self) -> Result<ManinTriple, InputError> {
        let (l, _) = self.algebra()?;
        let k = self.metric(l.basis())?.ok_or_else(|| bad("kappa", "a triple needs the pairing κ"))?;
        let (hp, hm) = match &self.lagrangians {
            Some(lg) => {
                let side = |name: &str, vs: &[Vec<(String, String)>]| -> Result<Subspace, InputError> {
                    let span = vs
                        .iter()
                        .enumerate()
                        .map(|(k, v)| vector(l.basis(), &format!("lagrangians.{name}[{k}]"), v))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(Subspace::new(span))
                };
                (side("plus", &lg.plus)?, side("minus", &lg.minus)?)
            }
            None => canonical_lagrangians(&l).map_err(|e| bad("lagrangians", e))?,
        };
        ManinTriple::from_pair(l, k, hp, hm).map_err(|e| bad("lagrangians", e))
    }

    /// g₀ with its invariant form; β entries are symmetric.
    pub fn base_algebra(&self) -> Result<BaseAlgebra, InputError> {
        let (l, _) = self.algebra()?;
        let n = l.dim();
        let mut beta = Matrix::zeros(n, n);
        let mut seen: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (k, e) in self.beta.iter().enumerate() {
            let f = format!("beta[{k}]");
            let a = lookup(l.basis(), format!("{f}.a"), &e.a)?;
            let b = lookup(l.basis(), format!("{f}.b"), &e.b)?;
            let v = rational(format!("{f}.value"), &e.value)?;
            let key = (a.min(b), a.max(b));
            if let Some(old) = seen.insert(key, v.clone()) {
                if old != v {
                    return Err(bad(f, "conflicts with an earlier entry"));
                }
            }
            beta.set(a, b, v.clone());
            beta.set(b, a, v);
        }
        if self.beta.is_empty() {
            return Err(bad("beta", "the loop construction needs an invariant form β"));
        }
        BaseAlgebra::new(l, beta).map_err(|e| bad("beta", e))
    }

    /// Serializes a triple with its pairing and matched Lagrangians.
    pub fn from_triple(t: &ManinTriple, name: Option<String>) -> Self {
        let b = t.double.basis();
        let basis = b
            .vectors()
            .iter()
            .map(|v| BasisEntry { label: v.label.clone(), degree: v.degree, weight: v.weight })
            .collect();
        let brackets = t
            .double
            .upper_table()
            .iter()
            .map(|(&(a, c), terms)| BracketEntry {
                a: b.label(a).into(),
                b: b.label(c).into(),
                terms: terms.iter().map(|(k, v)| (b.label(*k).to_string(), fmt_rational(v))).collect(),
            })
            .collect();
        let kappa = t
            .metric
            .entries()
            .iter()
            .map(|(&(x, y), v)| PairEntry { a: b.label(x).into(), b: b.label(y).into(), value: fmt_rational(v) })
            .collect();
        let lagrangians = Some(Lagrangians {
            plus: t.h_plus.span.iter().map(|v| terms_of(b, v)).collect(),
            minus: t.h_minus.span.iter().map(|v| terms_of(b, v)).collect(),
        });
        AlgebraFile {
            schema: ALGEBRA_SCHEMA.into(),
            name,
            basis,
            brackets,
            window: t.double.window(),
            kappa,
            lagrangians,
            cobracket: Vec::new(),
            beta: Vec::new(),
        }
    }
}

/// Tail terms [b_i, b_j, "p/q"].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailTerm {
    pub entries: Vec<(String, String, String)>,
    /// Power m of (t₁ − t₂) in a difference tail.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<u32>,
    /// Powers t₁^p t₂^q in a general tail.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
}

/// r = Ω/(t₁ − t₂) + tail; an empty file is Yang's r-matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RMatrixFile {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tail: Vec<TailTerm>,
}

impl RMatrixFile {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        parse_json(text, RMATRIX_SCHEMA, "rmatrix")
    }

    pub fn to_r(&self, base: &BaseAlgebra) -> Result<DifferenceRMatrix, InputError> {
        let d = base.dim();
        let basis = base.lie.basis();
        let mut difference = Vec::new();
        let mut general: BTreeMap<(u32, u32), Matrix> = BTreeMap::new();
        for (k, t) in self.tail.iter().enumerate() {
            let f = format!("tail[{k}]");
            let mut m = Matrix::zeros(d, d);
            for (j, (a, b, c)) in t.entries.iter().enumerate() {
                let ff = format!("{f}.entries[{j}]");
                let (i, jj) = (lookup(basis, &ff, a)?, lookup(basis, &ff, b)?);
                m.add_at(i, jj, &rational(&ff, c)?);
            }
            match (t.power, t.p, t.q) {
                (Some(pw), None, None) => difference.push((pw, m)),
                (None, Some(p), Some(q)) => {
                    let e = general.entry((p, q)).or_insert_with(|| Matrix::zeros(d, d));
                    *e = e.sub(&m.scale(&-Rational::from_integer(1.into())));
                }
                _ => return Err(bad(f, "give either \"power\" or both \"p\" and \"q\"")),
            }
        }
        let diff = DifferenceRMatrix::from_difference(base, &difference);
        for (k, m) in diff.tail {
            let e = general.entry(k).or_insert_with(|| Matrix::zeros(d, d));
            *e = e.sub(&m.scale(&-Rational::from_integer(1.into())));
        }
        Ok(DifferenceRMatrix::with_tail(base, general))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionEntry {
    pub generator: String,
    #[serde(default)]
    pub eps: bool,
    #[serde(default)]
    pub power: usize,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifferentialEntry {
    pub hbar: usize,
    pub matrix: Vec<Vec<String>>,
}

/// A smooth module: degrees of its basis, action matrices, d_M by ħ-power.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleFile {
    pub schema: String,
    pub name: String,
    pub degrees: Vec<i64>,
    pub smooth: usize,
    pub action: Vec<ActionEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub differential: Vec<DifferentialEntry>,
}

fn matrix(field: &str, rows: &[Vec<String>], n: usize) -> Result<Matrix, InputError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(bad(field, format!("expected a {n}×{n} matrix")));
    }
    let mut m = Matrix::zeros(n, n);
    for (i, r) in rows.iter().enumerate() {
        for (j, s) in r.iter().enumerate() {
            m.set(i, j, rational(format!("{field}[{i}][{j}]"), s)?);
        }
    }
    Ok(m)
}

impl ModuleFile {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        parse_json(text, MODULE_SCHEMA, "module")
    }

    pub fn to_module(&self, base: &BaseAlgebra) -> Result<FsfModule, InputError> {
        let n = self.degrees.len();
        let mut action = BTreeMap::new();
        for (k, a) in self.action.iter().enumerate() {
            let f = format!("action[{k}]");
            let i = lookup(base.lie.basis(), format!("{f}.generator"), &a.generator)?;
            if action.insert((i, a.eps, a.power), matrix(&format!("{f}.matrix"), &a.matrix, n)?).is_some() {
                return Err(bad(f, "duplicate generator"));
            }
        }
        let mut differential = BTreeMap::new();
        for (k, d) in self.differential.iter().enumerate() {
            differential.insert(d.hbar, matrix(&format!("differential[{k}].matrix"), &d.matrix, n)?);
        }
        Ok(FsfModule {
            name: self.name.clone(),
            degrees: self.degrees.clone(),
            smooth: self.smooth,
            action,
            differential,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteKind {
    Lie,
    Metric,
    Bialgebra,
    Triple,
}

#[derive(Debug, Parser)]
#[command(
    name = "shifted-manin",
    version,
    about = "Exact checks for shifted Lie bialgebras, Manin triples, their quantizations and loop Yangians"
)]
pub struct Cli {
    /// Print the report as compact JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Print the report as indented JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Worker threads (default: SHIFTED_MANIN_JOBS, else all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one structural suite on an algebra file.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        suite: SuiteKind,
    },
    /// Build the double of a bialgebra and write it as an algebra file.
    Double {
        file: PathBuf,
        /// Write the double here instead of stdout; the report then goes to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Emit the double even when the input fails its checks.
        #[arg(long)]
        force: bool,
    },
    /// r-matrix and enveloping-algebra suites on a triple.
    Quantize {
        file: PathBuf,
        #[arg(short = 'H', long = "hbar-order", default_value_t = 4)]
        hbar_order: usize,
        #[arg(short = 'L', long = "word-len", default_value_t = 6)]
        word_len: usize,
    },
    /// The twisted Koszul complex of a triple.
    Koszul {
        file: PathBuf,
        #[arg(short = 'S', long = "max-weight", default_value_t = 4)]
        max_weight: usize,
        #[arg(short = 'L', long = "word-len", default_value_t = 6)]
        word_len: usize,
        #[arg(short = 'H', long = "hbar-order", default_value_t = 3)]
        hbar_order: usize,
    },
    /// Loop double, r-matrix and meromorphic tensor suite.
    Yangian {
        /// Base algebra with its invariant form β.
        #[arg(long = "g")]
        g: PathBuf,
        #[arg(long = "truncation", visible_alias = "N", default_value_t = 3)]
        truncation: usize,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        level: String,
        #[arg(long, num_args = 1..)]
        modules: Vec<PathBuf>,
        /// Auxiliary variables, one fewer than the modules.
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        /// Tail of the r-matrix; Yang's r-matrix when omitted.
        #[arg(long)]
        rmatrix: Option<PathBuf>,
        #[arg(short = 'H', long = "hbar-order", default_value_t = 4)]
        hbar_order: usize,
        #[arg(short = 'L', long = "word-len", default_value_t = 6)]
        word_len: usize,
        #[arg(long = "gcybe-order", default_value_t = 3)]
        gcybe_order: usize,
    },
}

/// What a command produced: a report, an optional document, and the exit code.
pub struct Outcome {
    pub report: Option<Report>,
    pub document: Option<String>,
    pub code: i32,
}

const OVERFLOW_MARK: &str = "exceeds the word-length bound";

fn overflowed(rep: &Report) -> bool {
    rep.checks.iter().any(|c| !c.passed() && c.witness.as_deref().is_some_and(|w| w.contains(OVERFLOW_MARK)))
}

fn verdict(rep: Report) -> Outcome {
    let code = if overflowed(&rep) {
        EXIT_OVERFLOW
    } else if rep.all_pass() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    };
    Outcome { report: Some(rep), document: None, code }
}

fn input_error(e: InputError) -> Outcome {
    let mut rep = Report::new("input");
    rep.push(Check::fail("parse", e.0));
    Outcome { report: Some(rep), document: None, code: EXIT_INPUT }
}

fn lie_suite(l: &GradedLieAlgebra, raw: &RawBrackets) -> Report {
    let mut rep = Report::new("lie");
    rep.push(check_antisymmetry(l.basis(), raw));
    rep.push(check_degrees(l));
    rep.push(check_jacobi(l));
    rep
}

pub fn cmd_check(file: &Path, suite: SuiteKind) -> Result<Outcome, InputError> {
    check_algebra(&AlgebraFile::load(file)?, suite)
}

pub fn check_algebra(f: &AlgebraFile, suite: SuiteKind) -> Result<Outcome, InputError> {
    let (l, raw) = f.algebra()?;
    let rep = match suite {
        SuiteKind::Lie => lie_suite(&l, &raw),
        SuiteKind::Metric => {
            let k = f.metric(l.basis())?.ok_or_else(|| bad("kappa", "the metric suite needs κ"))?;
            let mut rep = check_metric(&l, &k);
            rep.suite = "metric".into();
            rep
        }
        SuiteKind::Bialgebra => {
            let d = f.cobracket(l.basis())?;
            let mut rep = lie_suite(&l, &raw);
            rep.extend(check_shifted_bialgebra(&l, &d));
            rep.suite = "bialgebra".into();
            rep
        }
        SuiteKind::Triple => {
            let mut rep = lie_suite(&l, &raw);
            rep.extend(check_triple(&f.triple()?));
            rep.suite = "triple".into();
            rep
        }
    };
    Ok(verdict(rep))
}

pub fn cmd_double(file: &Path, force: bool) -> Result<Outcome, InputError> {
    double_algebra(&AlgebraFile::load(file)?, force)
}

/// The double as a document, with the checks on the input and the output.
pub fn double_algebra(f: &AlgebraFile, force: bool) -> Result<Outcome, InputError> {
    let (l, raw) = f.algebra()?;
    let h = f.bialgebra()?;
    let mut rep = lie_suite(&l, &raw);
    rep.extend(check_shifted_bialgebra(&h.algebra, &h.cobracket));
    rep.suite = "double".into();
    if !rep.all_pass() && !force {
        return Ok(verdict(rep));
    }
    let t = build_double(&h);
    rep.extend(check_triple(&t));
    let name = f.name.as_ref().map(|n| format!("double of {n}"));
    let mut out = verdict(rep);
    out.document = Some(AlgebraFile::from_triple(&t, name).to_json());
    Ok(out)
}

pub fn cmd_quantize(file: &Path, hbar_order: usize, word_len: usize) -> Result<Outcome, InputError> {
    quantize_algebra(&AlgebraFile::load(file)?, hbar_order, word_len)
}

pub fn quantize_algebra(f: &AlgebraFile, hbar_order: usize, word_len: usize) -> Result<Outcome, InputError> {
    let t = f.triple()?;
    let (r, u) = rayon::join(|| rmatrix_suite(&t), || quantization_suite(&t, hbar_order, word_len));
    let mut rep = Report::new("quantize");
    rep.extend(r);
    rep.extend(u);
    Ok(verdict(rep))
}

pub fn cmd_koszul(file: &Path, bounds: KoszulBounds) -> Result<Outcome, InputError> {
    koszul_algebra(&AlgebraFile::load(file)?, bounds)
}

pub fn koszul_algebra(f: &AlgebraFile, bounds: KoszulBounds) -> Result<Outcome, InputError> {
    let t = f.triple()?;
    if let Some(i) = (0..t.dim()).find(|&i| t.double.degree(i) == 2) {
        let mut rep = Report::new("koszul");
        rep.push(Check::skipped(
            "koszul",
            format!(
                "{} has degree 2; the comparison assumes the double has no degree-2 part",
                t.double.basis().label(i)
            ),
        ));
        return Ok(verdict(rep));
    }
    Ok(verdict(koszul_suite(&t, bounds)))
}

pub struct YangianArgs<'a> {
    pub g: &'a Path,
    pub modules: &'a [PathBuf],
    pub vars: &'a [String],
    pub rmatrix: Option<&'a Path>,
    pub level: &'a str,
    pub config: YangianConfig,
}

pub fn cmd_yangian(a: YangianArgs<'_>) -> Result<Outcome, InputError> {
    let base = AlgebraFile::load(a.g)?.base_algebra()?;
    let r = match a.rmatrix {
        Some(p) => {
            RMatrixFile::parse(&read(p)?).map_err(|e| InputError(format!("{}: {}", p.display(), e.0)))?.to_r(&base)?
        }
        None => DifferenceRMatrix::yang(&base),
    };
    let mut modules = Vec::new();
    for p in a.modules {
        let m = ModuleFile::parse(&read(p)?).map_err(|e| InputError(format!("{}: {}", p.display(), e.0)))?;
        modules.push(m.to_module(&base).map_err(|e| InputError(format!("{}: {}", p.display(), e.0)))?);
    }
    if !a.vars.is_empty() && a.vars.len() + 1 != modules.len().max(1) {
        return Err(bad("--vars", format!("{} variables for {} modules", a.vars.len(), modules.len())));
    }
    let mut config = a.config;
    config.level = rational("--level", a.level)?;
    let mut out = yangian(&base, &r, &modules, &config)?;
    if let Some(rep) = out.report.as_mut().filter(|_| !a.vars.is_empty()) {
        rep.param("vars", a.vars.join(","));
    }
    Ok(out)
}

/// The loop suite with input-shaped errors (non-skew r at a nonzero level,
/// pole bound, bad module) separated from failed checks.
pub fn yangian(
    base: &BaseAlgebra,
    r: &DifferenceRMatrix,
    modules: &[FsfModule],
    config: &YangianConfig,
) -> Result<Outcome, InputError> {
    if modules.len() > 3 {
        return Err(bad("modules", "at most three modules"));
    }
    match yangian_suite(base, r, modules, config) {
        Ok(rep) => Ok(verdict(rep)),
        Err(LoopError::Uea(e @ UeaError::WordLength(..))) => {
            let mut rep = Report::new("yangian");
            rep.push(Check::fail("yangian", e.to_string()));
            Ok(verdict(rep))
        }
        Err(e @ (LoopError::NotSkew | LoopError::PoleBound { .. } | LoopError::Module(..) | LoopError::Base(_))) => {
            Err(InputError(e.to_string()))
        }
        Err(e) => {
            let mut rep = Report::new("yangian");
            rep.push(Check::fail("yangian", e.to_string()));
            Ok(verdict(rep))
        }
    }
}

fn jobs(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| std::env::var("SHIFTED_MANIN_JOBS").ok().and_then(|v| v.parse().ok())).filter(|&n| n > 0)
}

fn render(rep: &Report, json: bool, pretty: bool) -> String {
    if pretty {
        rep.to_json(true) + "\n"
    } else if json {
        rep.to_json(false) + "\n"
    } else {
        rep.to_text()
    }
}

/// Runs a parsed command line, writing reports to `out` and diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if let Some(n) = jobs(cli.jobs) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let start = Instant::now();
    let mut doc_path = None;
    let result = match &cli.command {
        Command::Check { file, suite } => cmd_check(file, *suite),
        Command::Double { file, output, force } => {
            doc_path = output.clone();
            cmd_double(file, *force)
        }
        Command::Quantize { file, hbar_order, word_len } => cmd_quantize(file, *hbar_order, *word_len),
        Command::Koszul { file, max_weight, word_len, hbar_order } => {
            cmd_koszul(file, KoszulBounds { sym_weight: *max_weight, word_len: *word_len, hbar_order: *hbar_order })
        }
        Command::Yangian { g, truncation, level, modules, vars, rmatrix, hbar_order, word_len, gcybe_order } => {
            let config = YangianConfig {
                truncation: *truncation,
                hbar_order: *hbar_order,
                word_len: *word_len,
                gcybe_order: *gcybe_order,
                ..YangianConfig::default()
            };
            cmd_yangian(YangianArgs { g, modules, vars, rmatrix: rmatrix.as_deref(), level, config })
        }
    };
    let mut outcome = result.unwrap_or_else(input_error);
    if let Some(rep) = outcome.report.as_mut() {
        rep.timing_ms = Some(start.elapsed().as_millis());
    }
    let mut text = String::new();
    if let Some(doc) = &outcome.document {
        match &doc_path {
            Some(p) => {
                if let Err(e) = std::fs::write(p, doc) {
                    let _ = writeln!(err, "cannot write {}: {e}", p.display());
                    return EXIT_INPUT;
                }
            }
            None => text.push_str(doc),
        }
    }
    if let Some(rep) = &outcome.report {
        let rendered = render(rep, cli.json, cli.pretty);
        if outcome.code == EXIT_INPUT {
            let _ = write!(err, "{rendered}");
        } else if outcome.document.is_some() && doc_path.is_none() {
            // the document owns stdout
            let _ = write!(err, "{rendered}");
        } else {
            let _ = write!(text, "{rendered}");
        }
    }
    if outcome.code == EXIT_OVERFLOW {
        let _ = writeln!(err, "a truncation bound was exceeded; rerun with a larger --word-len");
    }
    let _ = out.write_all(text.as_bytes());
    outcome.code
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;
    use num_traits::Zero;

    const E1: &str = r#"{
        "schema": "shifted-manin/algebra/v1",
        "basis": [{"label": "e", "degree": 0}, {"label": "f", "degree": 0}],
        "brackets": [{"a": "e", "b": "f", "terms": [["f", "1"]]}]
    }"#;

    #[test]
    fn parses_e1() {
        let f = AlgebraFile::parse(E1).unwrap();
        let (l, raw) = f.algebra().unwrap();
        assert_eq!(l.bracket_basis(0, 1), vec![(1, int(1))]);
        assert_eq!(l.bracket_basis(1, 0), vec![(1, int(-1))]);
        assert_eq!(raw.entries.len(), 1);
        assert!(f.cobracket(l.basis()).unwrap().is_zero());
    }

    #[test]
    fn diagnostics_name_the_field() {
        let e = AlgebraFile::parse(&E1.replace("[\"f\", \"1\"]", "[\"g\", \"1\"]")).unwrap().algebra().unwrap_err();
        assert!(e.0.contains("brackets[0].terms[0]") && e.0.contains("\"g\""), "{e}");
        let e = AlgebraFile::parse(&E1.replace("\"1\"]", "\"1/0\"]")).unwrap().algebra().unwrap_err();
        assert!(e.0.contains("brackets[0].terms[0]"), "{e}");
        let e = AlgebraFile::parse(&E1.replace("algebra/v1", "algebra/v9")).unwrap_err();
        assert!(e.0.contains("schema"), "{e}");
        let e = AlgebraFile::parse("{\"schema\": ").unwrap_err();
        assert!(e.0.contains("line 1"), "{e}");
        let e = AlgebraFile::parse(&E1.replace("\"degree\": 0}, {", "\"degre\": 0}, {")).unwrap_err();
        assert!(e.0.contains("degre"), "{e}");
    }

    #[test]
    fn double_round_trips() {
        let h = AlgebraFile::parse(E1).unwrap().bialgebra().unwrap();
        let t = build_double(&h);
        let f = AlgebraFile::from_triple(&t, None);
        let back = AlgebraFile::parse(&f.to_json()).unwrap().triple().unwrap();
        assert!(check_triple(&back).all_pass());
        assert_eq!(back.double, t.double);
        assert_eq!(back.metric, t.metric);
    }

    #[test]
    fn beta_must_be_consistent() {
        let mut f = AlgebraFile::parse(E1).unwrap();
        f.beta = vec![
            PairEntry { a: "e".into(), b: "f".into(), value: "1".into() },
            PairEntry { a: "f".into(), b: "e".into(), value: "2".into() },
        ];
        assert!(f.base_algebra().unwrap_err().0.contains("beta[1]"));
        f.beta.clear();
        assert!(f.base_algebra().is_err());
    }

    #[test]
    fn rmatrix_tails() {
        let base = BaseAlgebra::sl2();
        let text = r#"{"schema": "shifted-manin/rmatrix/v1", "tail": [{"power": 1, "entries": [["h", "h", "1"]]}]}"#;
        let r = RMatrixFile::parse(text).unwrap().to_r(&base).unwrap();
        assert!(r.is_difference() && r.skew_flag());
        assert_eq!(r.tail.len(), 2);
        assert_eq!(r.tail[&(0, 1)].get(2, 2), &int(-1));
        let bad = r#"{"schema": "shifted-manin/rmatrix/v1", "tail": [{"p": 1, "entries": []}]}"#;
        assert!(RMatrixFile::parse(bad).unwrap().to_r(&base).is_err());
        let yang = RMatrixFile::parse(r#"{"schema": "shifted-manin/rmatrix/v1"}"#).unwrap().to_r(&base).unwrap();
        assert!(yang.tail.is_empty());
    }

    #[test]
    fn module_files() {
        let base = BaseAlgebra::sl2();
        let text = r#"{"schema": "shifted-manin/module/v1", "name": "ev2", "degrees": [0, 0], "smooth": 1,
            "action": [
                {"generator": "e", "matrix": [["0", "1"], ["0", "0"]]},
                {"generator": "f", "matrix": [["0", "0"], ["1", "0"]]},
                {"generator": "h", "matrix": [["1", "0"], ["0", "-1"]]}
            ]}"#;
        let m = ModuleFile::parse(text).unwrap().to_module(&base).unwrap();
        assert_eq!(m, FsfModule::sl2_fundamental(&base));
        let short = text.replace("[\"1\", \"0\"], [\"0\", \"-1\"]", "[\"1\", \"0\"]");
        assert!(ModuleFile::parse(&short).unwrap().to_module(&base).unwrap_err().0.contains("action[2].matrix"));
    }

    #[test]
    fn overflow_is_recognized() {
        let mut rep = Report::new("x");
        rep.push(Check::fail("quantize", UeaError::WordLength(vec![0, 1, 2], 2).to_string()));
        assert_eq!(verdict(rep).code, EXIT_OVERFLOW);
        let mut rep = Report::new("x");
        rep.push(Check::fail("jacobi", "nonzero"));
        assert_eq!(verdict(rep).code, EXIT_FAIL);
        assert_eq!(verdict(Report::new("x")).code, EXIT_PASS);
    }

    #[test]
    fn rational_strings_round_trip() {
        for s in ["0", "-3/7", "5", "1/2"] {
            assert_eq!(fmt_rational(&rational("x", s).unwrap()), s);
        }
        assert!(Rational::zero().is_zero());
    }
}
