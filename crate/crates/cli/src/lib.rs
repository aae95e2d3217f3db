//! Command-line front end.
//!
//! Every command is a report builder over the engine's operations; the
//! binary only parses arguments, prints [`Report::render`] and writes the
//! JSON document.  Tests drive the same builders through [`execute`].

pub mod config;
pub mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use magsym::catalog::{
    bundled, instantiate_reading, load_catalog, select, substitution, verify_all, worked_example_suite, CatalogError,
    EntryStatus, TableEntry, VerificationReport, MAX_DIM,
};
use magsym::determining::{decide, raw_determining_residuals};
use magsym::diffop::{check_symmetry, parse_operator, DiffOperator, MultiIndex, OperatorSpecError, Potential};
use magsym::equiv::{parse_transformation, EquivError, PointTransformation};
use magsym::expr::{parse_expr, Decision, Expr, ParseError, Substitution, SymbolTable};
use magsym::liealg::labels::Verdict;
use magsym::liealg::{close_algebra, fingerprint, match_label, span_express, ClosureError};
use magsym::numoracle::{oracle_entry, EntryOracle, OracleVerdict, TestWavefunction};

pub use config::{Config, Overrides};
pub use report::{Item, Outcome, Report, SCHEMA};

/// Errors that abort a command before a report exists (exit status 2).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot parse {what} `{src}`: {msg}")]
    Parse { what: &'static str, src: String, msg: String },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("{0}: {1}")]
    Io(String, String),
    #[error("config: {0}")]
    Config(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "magsym",
    version,
    about = "Verify Lie point symmetries of Schrödinger equations with external fields"
)]
pub struct Cli {
    /// Catalog file (defaults to the bundled catalog).
    #[arg(long, env = "MAGSYM_CATALOG", global = true)]
    pub catalog: Option<PathBuf>,
    /// TOML file with [grid], [oracle] and [run] tables.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the structured report to this path (`-` for standard output).
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Bind a parameter or declared function: `kappa=0`, `F=_1*_2`.
    #[arg(long = "param", global = true, value_parser = parse_binding)]
    pub params: Vec<(String, String)>,
    /// Declare an arbitrary function, `F/2` (bare name: arity 1).
    #[arg(long = "function", global = true)]
    pub functions: Vec<String>,
    /// Suppress the human summary.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Verify catalog entries: a table (`3`), an item (`1.8`) or `all`.
    VerifyTable {
        selector: Option<String>,
        /// Cross-check each symmetry with the finite-difference oracle.
        #[arg(long)]
        oracle: bool,
        /// Oracle step (overrides the config file).
        #[arg(long)]
        h: Option<f64>,
        /// Stencil order, 2 or 4.
        #[arg(long)]
        order: Option<u32>,
        /// Oracle confirmation tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Check operators against a potential: `free`, `V=...` or
    /// `A1=...;A2=...;A0=...`.
    Check {
        potential: String,
        #[arg(required = true)]
        symmetries: Vec<String>,
    },
    /// Close a set of operators under commutation and fingerprint the span.
    Algebra {
        #[arg(required = true)]
        generators: Vec<String>,
        /// Compare with a named algebra, e.g. `s_{4,6}`.
        #[arg(long)]
        label: Option<String>,
        #[arg(long, default_value_t = MAX_DIM)]
        max_dim: usize,
    },
    /// Apply `gauge:χ`, `mobius:ν,μ,λ`, `oscillator:ω` or `freefall:κ1,κ2,κ3`
    /// to `L`/`L_free`, `catalog:<id>`, a potential spec or an operator.
    Transform {
        transformation: String,
        target: String,
        /// Express a transformed operator in these operators (repeatable).
        #[arg(long)]
        basis: Vec<String>,
    },
    /// Re-derive the worked examples of derived potentials.
    WorkedExamples,
}

fn parse_binding(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=EXPR, got `{s}`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

/// Everything a command needs besides its own arguments.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: Config,
    pub bindings: BTreeMap<String, String>,
    pub table: SymbolTable,
}

impl Default for Context {
    fn default() -> Self {
        Context { config: Config::default(), bindings: BTreeMap::new(), table: SymbolTable::standard() }
    }
}

impl Context {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let base = match &cli.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        let mut ov = Overrides { jobs: cli.jobs, catalog: cli.catalog.clone(), ..Overrides::default() };
        if let Command::VerifyTable { h, order, tolerance, .. } = &cli.command {
            ov.h = *h;
            ov.order = *order;
            ov.tolerance = *tolerance;
        }
        let mut table = SymbolTable::standard();
        for f in &cli.functions {
            table.declare(f).map_err(|e| CliError::Parse {
                what: "function signature",
                src: f.clone(),
                msg: e.to_string(),
            })?;
        }
        Ok(Context { config: base.apply(&ov)?, bindings: cli.params.iter().cloned().collect(), table })
    }

    pub fn entries(&self) -> Result<Vec<TableEntry>, CliError> {
        match &self.config.run.catalog {
            None => Ok(bundled()),
            Some(p) => {
                let src =
                    std::fs::read_to_string(p).map_err(|e| CliError::Io(p.display().to_string(), e.to_string()))?;
                Ok(load_catalog(&src)?)
            }
        }
    }

    /// Bindings restricted to the names `e` declares.
    fn entry_bindings(&self, e: &TableEntry) -> Result<BTreeMap<String, String>, CliError> {
        let t = e.symbol_table()?;
        Ok(self
            .bindings
            .iter()
            .filter(|(k, _)| t.is_param(k) || t.arity(k).is_some())
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect())
    }
}

/// Parse and run a command line.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let ctx = Context::from_cli(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.config.run.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| run(&cli.command, &ctx))
}

pub fn run(cmd: &Command, ctx: &Context) -> Result<Report, CliError> {
    match cmd {
        Command::VerifyTable { selector, oracle, .. } => {
            verify_table(ctx, selector.as_deref().unwrap_or("all"), *oracle)
        }
        Command::Check { potential, symmetries } => check(ctx, potential, symmetries),
        Command::Algebra { generators, label, max_dim } => algebra(ctx, generators, label.as_deref(), *max_dim),
        Command::Transform { transformation, target, basis } => transform(ctx, transformation, target, basis),
        Command::WorkedExamples => Ok(worked_examples()),
    }
}

// ---------------------------------------------------------------- parsing

/// Symbols the user introduced implicitly: bare unknown identifiers are
/// declared as parameters and reported.
#[derive(Debug, Clone)]
struct Symbols {
    table: SymbolTable,
    declared: Vec<String>,
}

impl Symbols {
    fn new(ctx: &Context) -> Self {
        Symbols { table: ctx.table.clone(), declared: Vec::new() }
    }

    fn with_auto<T, E>(
        &mut self,
        mut f: impl FnMut(&SymbolTable) -> Result<T, E>,
        unknown: impl Fn(&E) -> Option<String>,
    ) -> Result<T, E> {
        loop {
            match f(&self.table) {
                Err(e) => match unknown(&e) {
                    Some(name) if !self.declared.contains(&name) => {
                        self.table = self.table.clone().with_param(&name);
                        self.declared.push(name);
                    }
                    _ => return Err(e),
                },
                ok => return ok,
            }
        }
    }

    fn expr(&mut self, src: &str) -> Result<Expr, CliError> {
        self.with_auto(|t| parse_expr(src, t), |e| unknown_ident(e)).map_err(|e| CliError::Parse {
            what: "expression",
            src: src.into(),
            msg: e.to_string(),
        })
    }

    fn operator(&mut self, src: &str) -> Result<DiffOperator, CliError> {
        self.with_auto(
            |t| parse_operator(src, t),
            |e| match e {
                OperatorSpecError::Parse(p) => unknown_ident(p),
                _ => None,
            },
        )
        .map_err(|e| CliError::Parse { what: "operator", src: src.into(), msg: e.to_string() })
    }

    fn transformation(&mut self, src: &str) -> Result<PointTransformation, CliError> {
        self.with_auto(
            |t| parse_transformation(src, t),
            |e| match e {
                EquivError::Parse(p) => unknown_ident(p),
                _ => None,
            },
        )
        .map_err(|e| CliError::Parse { what: "transformation", src: src.into(), msg: e.to_string() })
    }

    fn substitution(&self, ctx: &Context) -> Result<Substitution, CliError> {
        Ok(substitution(&self.table, &ctx.bindings)?)
    }

    fn annotations(&self) -> Vec<String> {
        if self.declared.is_empty() {
            Vec::new()
        } else {
            vec![format!("declared parameters: {}", self.declared.join(", "))]
        }
    }
}

fn unknown_ident(e: &ParseError) -> Option<String> {
    match e {
        ParseError::UnknownIdentifier { name, .. } => Some(name.clone()),
        _ => None,
    }
}

/// `free`, `V=<expr>`, or `;`-separated `A1=`, `A2=`, `A0=`/`V=` fields.
fn parse_potential(src: &str, sym: &mut Symbols) -> Result<Potential, CliError> {
    let bad = |msg: &str| CliError::Parse { what: "potential", src: src.into(), msg: msg.into() };
    if src.trim() == "free" {
        return Ok(Potential::free());
    }
    let mut fields: BTreeMap<&str, Expr> = BTreeMap::new();
    for part in src.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| bad("expected KEY=EXPR fields"))?;
        let k = k.trim();
        if !["A1", "A2", "A0", "V"].contains(&k) {
            return Err(bad(&format!("unknown field `{k}` (expected A1, A2, A0 or V)")));
        }
        if fields.insert(k, sym.expr(v)?).is_some() {
            return Err(bad(&format!("field `{k}` given twice")));
        }
    }
    let a = |k: &str| fields.get(k).cloned().unwrap_or_else(Expr::zero);
    let p = match (fields.get("A0"), fields.get("V")) {
        (Some(_), Some(_)) => return Err(bad("give either A0 or V, not both")),
        (_, Some(v)) => Potential::from_v(a("A1"), a("A2"), v.clone()),
        _ => Potential::from_a0(a("A1"), a("A2"), a("A0")),
    };
    p.map_err(|e| bad(&e.to_string()))
}

// ---------------------------------------------------------------- printing

fn decision_word(d: Decision) -> &'static str {
    match d {
        Decision::Zero => "satisfied",
        Decision::NonZero => "not satisfied",
        Decision::Unknown => "undecided",
    }
}

fn outcome_of(d: Decision) -> Outcome {
    match d {
        Decision::Zero => Outcome::Pass,
        Decision::NonZero => Outcome::Fail,
        Decision::Unknown => Outcome::Undecided,
    }
}

fn derivative_name(m: &MultiIndex) -> String {
    let names = ["t", "x1", "x2", "x3"];
    let parts: Vec<String> =
        m.0.iter()
            .zip(names)
            .filter(|(k, _)| **k > 0)
            .map(|(k, n)| if *k == 1 { format!("∂{n}") } else { format!("∂{n}^{k}") })
            .collect();
    parts.join("")
}

/// `c₁·∂t + c₂·∂x1 + c₀`, one coefficient per derivative.
pub fn format_operator(q: &DiffOperator) -> String {
    if q.is_zero() {
        return "0".into();
    }
    let mut terms: Vec<(MultiIndex, String)> = q.terms().map(|(m, c)| (*m, c.to_string())).collect();
    terms.sort_by_key(|(m, _)| std::cmp::Reverse(m.order()));
    terms
        .into_iter()
        .map(|(m, c)| if m.order() == 0 { format!("({c})") } else { format!("({c})·{}", derivative_name(&m)) })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn linear_combination(terms: &[(String, Expr)]) -> String {
    let parts: Vec<String> = terms
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(l, c)| {
            if c.is_one() {
                l.clone()
            } else if (-c).is_one() {
                format!("-{l}")
            } else {
                format!("({c})·{l}")
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn potential_lines(p: &Potential) -> Vec<String> {
    let mut out = vec![format!("A1 = {}", p.a1), format!("A2 = {}", p.a2)];
    if let Some(a0) = &p.a0 {
        out.push(format!("A0 = {a0}"));
    }
    out.push(format!("V = {}", p.v));
    out
}

fn potential_json(p: &Potential) -> serde_json::Value {
    json!({
        "A1": p.a1.to_string(),
        "A2": p.a2.to_string(),
        "A0": p.a0.as_ref().map(|e| e.to_string()),
        "V": p.v.to_string(),
        "time_independent": p.is_time_independent(),
    })
}

// ---------------------------------------------------------------- commands

/// `verify-table`: symbolic verification of each selected entry, plus the
/// finite-difference cross-check when `oracle` is set.
pub fn verify_table(ctx: &Context, selector: &str, oracle: bool) -> Result<Report, CliError> {
    let entries = ctx.entries()?;
    let chosen = select(&entries, selector)?;
    let verified = verify_all(&chosen);
    let cfg = ctx.config.oracle_config();
    let psi = TestWavefunction::default();
    let numeric: Vec<Option<Result<EntryOracle, String>>> = chosen
        .par_iter()
        .map(|e| {
            oracle.then(|| {
                let b = ctx.entry_bindings(e).map_err(|err| err.to_string())?;
                oracle_entry(e, &b, &cfg, &psi).map_err(|err| err.to_string())
            })
        })
        .collect();
    let items = chosen
        .iter()
        .zip(verified)
        .zip(numeric)
        .map(|((e, v), n)| match v {
            Ok(r) => entry_item(&r, n),
            Err(err) => {
                let mut it = Item::new(
                    e.id.clone(),
                    Outcome::Fail,
                    format!("error: {err}"),
                    json!({ "error": err.to_string() }),
                );
                it.quarantined = e.label_conflict.is_some();
                it
            }
        })
        .collect();
    let mut args = vec![selector.to_string()];
    if oracle {
        args.push("--oracle".into());
    }
    Ok(Report::new("verify-table", args, items))
}

fn entry_item(r: &VerificationReport, oracle: Option<Result<EntryOracle, String>>) -> Item {
    let status = match r.status {
        EntryStatus::Verified => "verified",
        EntryStatus::Quarantined => "verified in corrected reading",
        EntryStatus::Failed => "symmetry fails",
        EntryStatus::Unknown => "undecided",
    };
    let dim = r.closure.dim.map(|d| format!("dim {d}")).unwrap_or_else(|| "not closed".into());
    let labels: Vec<String> = r
        .branches
        .iter()
        .map(|b| {
            let v = match b.verdict.verdict {
                Verdict::Match => "match",
                Verdict::Mismatch => "mismatch",
                Verdict::Indeterminate => "indeterminate",
            };
            if b.condition.is_empty() || b.condition == "generic" {
                format!("{}: {v}", b.verdict.label)
            } else {
                format!("{} [{}]: {v}", b.verdict.label, b.condition)
            }
        })
        .collect();
    let summary = format!("{status}, {dim}, {}", labels.join("; "));

    let mut details = Vec::new();
    let reading = r.corrected.as_ref().filter(|_| r.status == EntryStatus::Quarantined).unwrap_or(&r.printed);
    for s in &reading.symmetries {
        let mut line = format!("{} — {}, α = {}", s.spec, decision_word(s.decision), s.alpha);
        if !s.failures.is_empty() {
            let idx: Vec<String> = s.failures.iter().map(|m| derivative_name(&MultiIndex(*m))).collect();
            line.push_str(&format!(", residual in {}", idx.join(" ")));
        }
        details.push(line);
    }
    if let Some(fp) = &r.fingerprint {
        details.push(format!("candidates: {}", fp.generic.names.join(", ")));
    }
    for f in &r.flags {
        details.push(format!("flag {}: {} ({})", f.flag, decision_word(f.decision), f.detail));
    }

    let mut outcome = match r.status {
        EntryStatus::Unknown => Outcome::Undecided,
        _ if r.passes() => Outcome::Pass,
        _ => Outcome::Fail,
    };
    let mut oracle_json = serde_json::Value::Null;
    match oracle {
        Some(Ok(o)) => {
            for s in &o.symmetries {
                let res = s.residual.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".into());
                let verdict = match s.verdict {
                    Some(OracleVerdict::Confirmed) => "confirmed",
                    Some(OracleVerdict::Refuted) => "refuted",
                    Some(OracleVerdict::Inconclusive) => "inconclusive",
                    None => "not evaluated",
                };
                let mut line = format!("oracle {}: residual {res}, {verdict}", s.spec);
                if let Some(err) = &s.error {
                    line.push_str(&format!(" ({err})"));
                }
                details.push(line);
            }
            if let Some(p) = o.perturbed {
                details.push(format!("oracle control (V×1.01): residual {p:.3e}"));
            }
            if o.contradicts() {
                outcome = Outcome::Fail;
            }
            oracle_json = serde_json::to_value(&o).expect("oracle report serializes");
        }
        Some(Err(err)) => {
            details.push(format!("oracle: not run ({err})"));
            oracle_json = json!({ "error": err });
        }
        None => {}
    }
    let mut it = Item::new(r.id.clone(), outcome, summary, json!({ "verification": r, "oracle": oracle_json }));
    it.quarantined = r.quarantined();
    it.details = details;
    it.annotations = r.annotations.clone();
    if let Some(c) = &r.label_conflict {
        it.annotations.push(format!("label conflict: {c}"));
    }
    it
}

/// `check`: the symmetry criterion for each operator, with α and the
/// determining equations that fail.
pub fn check(ctx: &Context, potential: &str, symmetries: &[String]) -> Result<Report, CliError> {
    let mut sym = Symbols::new(ctx);
    let p0 = parse_potential(potential, &mut sym)?;
    let ops: Vec<(String, DiffOperator)> =
        symmetries.iter().map(|s| Ok((s.clone(), sym.operator(s)?))).collect::<Result<_, CliError>>()?;
    let subst = sym.substitution(ctx)?;
    let p = p0.map(|e| e.substitute(&subst));
    let items = ops
        .into_iter()
        .map(|(spec, q)| {
            let q = q.map_coeffs(|c| c.substitute(&subst));
            let mut it = symmetry_item(&p, &spec, &q);
            it.annotations.extend(sym.annotations());
            it
        })
        .collect();
    let mut args = vec![potential.to_string()];
    args.extend(symmetries.iter().cloned());
    Ok(Report::new("check", args, items))
}

fn symmetry_item(p: &Potential, spec: &str, q: &DiffOperator) -> Item {
    match check_symmetry(p, q) {
        Err(err) => Item::new(spec, Outcome::Fail, format!("error: {err}"), json!({ "error": err.to_string() })),
        Ok(sc) => {
            let (_, tags) = decide(&raw_determining_residuals(p, q));
            let mut summary = format!("{}, α = {}", decision_word(sc.satisfied), sc.alpha);
            if !tags.is_empty() {
                let t: Vec<&str> = tags.iter().map(|(t, _)| t.as_str()).collect();
                summary.push_str(&format!("; failing equations: {}", t.join(", ")));
            }
            let residual: Vec<(String, String)> = sc
                .failures
                .iter()
                .map(|f| {
                    let m = MultiIndex(f.index);
                    let d = derivative_name(&m);
                    (if d.is_empty() { "1".into() } else { d }, sc.residual.coeff(&m).to_string())
                })
                .collect();
            let mut it = Item::new(
                spec,
                outcome_of(sc.satisfied),
                summary,
                json!({
                    "operator": format_operator(q),
                    "decision": sc.satisfied,
                    "alpha": sc.alpha.to_string(),
                    "failing_equations": tags.iter().map(|(t, d)| json!({ "tag": t, "decision": d })).collect::<Vec<_>>(),
                    "residual": residual.iter().map(|(d, c)| json!({ "derivative": d, "coefficient": c })).collect::<Vec<_>>(),
                }),
            );
            it.details = residual.into_iter().map(|(d, c)| format!("[Q,L] − αL has {d} coefficient {c}")).collect();
            it
        }
    }
}

/// `algebra`: closure, structure constants, fingerprint and candidate names.
pub fn algebra(ctx: &Context, specs: &[String], label: Option<&str>, max_dim: usize) -> Result<Report, CliError> {
    let mut sym = Symbols::new(ctx);
    let ops: Vec<(String, DiffOperator)> =
        specs.iter().map(|s| Ok((s.clone(), sym.operator(s)?))).collect::<Result<_, CliError>>()?;
    let subst = sym.substitution(ctx)?;
    let gens: Vec<(String, DiffOperator)> =
        ops.into_iter().map(|(s, q)| (s, q.map_coeffs(|c| c.substitute(&subst)))).collect();
    let mut args = specs.to_vec();
    if let Some(l) = label {
        args.extend(["--label".to_string(), l.to_string()]);
    }
    let item = match close_algebra(&gens, max_dim) {
        Err(err) => {
            let witness = match &err {
                ClosureError::NotClosed { a, b, .. } => json!([a, b]),
                ClosureError::Jacobi(a, b, c) => json!([a, b, c]),
                ClosureError::Operator(_) => serde_json::Value::Null,
            };
            Item::new(
                "algebra",
                Outcome::Fail,
                format!("not closed: {err}"),
                json!({ "error": err.to_string(), "witness": witness }),
            )
        }
        Ok(cl) => {
            let sc = &cl.algebra;
            let fp = fingerprint(sc);
            let brackets: Vec<(String, String, String)> = sc
                .nonzero_brackets()
                .into_iter()
                .map(|(i, j, terms)| {
                    let named: Vec<(String, Expr)> =
                        terms.into_iter().map(|(k, c)| (sc.labels[k].clone(), c)).collect();
                    (sc.labels[i].clone(), sc.labels[j].clone(), linear_combination(&named))
                })
                .collect();
            let verdict = match label {
                None => None,
                Some(l) => Some(match_label(l, &fp.generic.invariants).map_err(|e| CliError::Parse {
                    what: "label",
                    src: l.into(),
                    msg: e.to_string(),
                })?),
            };
            let outcome = match verdict.as_ref().map(|v| v.verdict) {
                None | Some(Verdict::Match) => Outcome::Pass,
                Some(Verdict::Mismatch) => Outcome::Fail,
                Some(Verdict::Indeterminate) => Outcome::Undecided,
            };
            let mut summary = format!("dimension {}, candidates: {}", sc.dim(), fp.generic.names.join(", "));
            if let Some(v) = &verdict {
                summary.push_str(&format!("; {}: {:?} ({})", v.label, v.verdict, v.reason));
            }
            let mut it = Item::new(
                "algebra",
                outcome,
                summary,
                json!({
                    "dimension": sc.dim(),
                    "basis": sc.labels,
                    "operators": sc.basis.iter().map(format_operator).collect::<Vec<_>>(),
                    "dropped": cl.dropped,
                    "brackets": brackets.iter().map(|(a, b, r)| json!({ "a": a, "b": b, "result": r })).collect::<Vec<_>>(),
                    "fingerprint": fp,
                    "label": verdict,
                }),
            );
            it.details.push(format!("basis: {}", sc.labels.join(", ")));
            if !cl.dropped.is_empty() {
                it.details.push(format!("dependent, dropped: {}", cl.dropped.join(", ")));
            }
            it.details.extend(brackets.iter().map(|(a, b, r)| format!("[{a}, {b}] = {r}")));
            for s in &fp.strata {
                it.details.push(format!("stratum {}: candidates {}", s.condition, s.names.join(", ")));
            }
            it.annotations.push(fp.note.to_string());
            it
        }
    };
    let mut item = item;
    item.annotations.extend(sym.annotations());
    Ok(Report::new("algebra", args, vec![item]))
}

/// `transform`: pull back an equation or an operator.
pub fn transform(ctx: &Context, spec: &str, target: &str, basis: &[String]) -> Result<Report, CliError> {
    let mut sym = Symbols::new(ctx);
    let tr = sym.transformation(spec)?;
    let mut args = vec![spec.to_string(), target.to_string()];
    for b in basis {
        args.extend(["--basis".to_string(), b.clone()]);
    }
    let equation = |p: &Potential, ops: &[(String, DiffOperator)], id: &str| -> Vec<Item> {
        let mut items = Vec::new();
        match tr.transform_potential(p) {
            Err(err) => {
                items.push(Item::new(id, Outcome::Fail, format!("error: {err}"), json!({ "error": err.to_string() })))
            }
            Ok(te) => {
                let lines = potential_lines(&te.potential);
                let mut it = Item::new(
                    id,
                    Outcome::Pass,
                    format!("L̃ = ({})·L[{}]", te.factor, lines.join("; ")),
                    json!({ "factor": te.factor.to_string(), "potential": potential_json(&te.potential), "source": potential_json(p) }),
                );
                it.details.push(format!("from {}", potential_lines(p).join("; ")));
                items.push(it);
                for (s, q) in ops {
                    let name = format!("{id}: {s}");
                    match tr.conjugate_operator(q) {
                        Err(err) => items.push(Item::new(
                            name,
                            Outcome::Fail,
                            format!("error: {err}"),
                            json!({ "error": err.to_string() }),
                        )),
                        Ok(qt) => {
                            let mut it = symmetry_item(&te.potential, &name, &qt);
                            it.summary = format!("transformed symmetry {}", it.summary);
                            it.details.insert(0, format!("Q̃ = {}", format_operator(&qt)));
                            items.push(it);
                        }
                    }
                }
            }
        }
        items
    };

    let t = target.trim();
    let mut items = if t == "L" || t == "L_free" || t == "free" {
        equation(&Potential::free(), &[], "L_free")
    } else if let Some(id) = t.strip_prefix("catalog:") {
        let entries = ctx.entries()?;
        let e = select(&entries, id)?
            .into_iter()
            .next()
            .ok_or_else(|| CliError::Usage(format!("`{id}` selects no entry")))?;
        if e.id != id {
            return Err(CliError::Usage(format!("`catalog:{id}` must name a single entry")));
        }
        let (p, ops) = instantiate_reading(e, &ctx.entry_bindings(e)?)?;
        let mut items = equation(&p, &ops, &format!("catalog:{id}"));
        if let Some(first) = items.first_mut() {
            let before = ops.iter().map(|(_, q)| check_symmetry(&p, q).map(|c| c.satisfied).ok());
            let held = before.filter(|d| *d == Some(Decision::Zero)).count();
            first.annotations.push(format!("{held} of {} symmetries hold before the transformation", ops.len()));
        }
        items
    } else if t.contains('=') {
        let p = parse_potential(t, &mut sym)?;
        equation(&p, &[], "potential")
    } else {
        let q = sym.operator(t)?;
        let named: Vec<(String, DiffOperator)> =
            basis.iter().map(|b| Ok((b.clone(), sym.operator(b)?))).collect::<Result<_, CliError>>()?;
        let item = match tr.conjugate_operator(&q) {
            Err(err) => Item::new(t, Outcome::Fail, format!("error: {err}"), json!({ "error": err.to_string() })),
            Ok(qt) if named.is_empty() => Item::new(
                t,
                Outcome::Pass,
                format!("→ {}", format_operator(&qt)),
                json!({ "operator": format_operator(&qt) }),
            ),
            Ok(qt) => {
                let ops: Vec<DiffOperator> = named.iter().map(|(_, q)| q.clone()).collect();
                match span_express(&qt, &ops) {
                    Ok(c) => {
                        let terms: Vec<(String, Expr)> =
                            named.iter().map(|(n, _)| n.clone()).zip(c.iter().cloned()).collect();
                        let mut it = Item::new(
                            t,
                            Outcome::Pass,
                            format!("→ {}", linear_combination(&terms)),
                            json!({
                                "operator": format_operator(&qt),
                                "coefficients": terms.iter().map(|(n, c)| json!({ "basis": n, "coefficient": c.to_string() })).collect::<Vec<_>>(),
                            }),
                        );
                        it.details.push(format!("= {}", format_operator(&qt)));
                        it
                    }
                    Err(err) => {
                        let mut it = Item::new(
                            t,
                            Outcome::Fail,
                            format!("not in the span of {}: {err}", basis.join(", ")),
                            json!({ "operator": format_operator(&qt), "error": err.to_string() }),
                        );
                        it.details.push(format!("= {}", format_operator(&qt)));
                        it
                    }
                }
            }
        };
        vec![item]
    };
    for it in &mut items {
        it.annotations.extend(sym.annotations());
    }
    Ok(Report::new("transform", args, items))
}

/// `worked-examples`: each derived potential against its claimed symmetry.
pub fn worked_examples() -> Report {
    let items = worked_example_suite()
        .into_iter()
        .map(|w| {
            let reading = w.corrected.as_ref().unwrap_or(&w.printed);
            let parts: Vec<String> = reading
                .symmetries
                .iter()
                .map(|s| format!("{} {} (α = {})", s.spec, decision_word(s.decision), s.alpha))
                .collect();
            let mut it = Item::new(
                w.name,
                if w.holds() { Outcome::Pass } else { Outcome::Fail },
                parts.join("; "),
                serde_json::to_value(&w).expect("worked report serializes"),
            );
            it.quarantined = w.quarantined();
            if w.quarantined() {
                it.details.push(format!("printed reading: {}", decision_word(w.printed.decision)));
            }
            if let Some(n) = w.note {
                it.annotations.push(n.to_string());
            }
            it
        })
        .collect();
    Report::new("worked-examples", Vec::new(), items)
}
