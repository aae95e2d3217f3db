//! Acceptance suite: one pass/fail line per criterion.
//!
//! Runs without the libtest harness so that every criterion reports even
//! when an earlier one fails; the process exits non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use magsym::catalog::{bundled, verify_all, EntryStatus, VerificationReport};
use magsym::diffop::{check_symmetry, generator, parse_operator, DiffOperator, Generator, Potential, FREE_ALGEBRA};
use magsym::equiv::{oscillator_transitions, PointTransformation};
use magsym::expr::{is_zero, named, Decision, Expr, SymbolTable};
use magsym::liealg::labels::Verdict;
use magsym::liealg::{close_algebra, span_express};
use magsym::numoracle::{
    convergence_study, default_params, oracle_entry, Env, GridSpec, OracleConfig, OracleSettings, OracleVerdict,
    StencilOrder, TestWavefunction, GENERIC,
};

use common::*;

/// Wall-clock budgets.
const FREE_ALGEBRA_BUDGET: Duration = Duration::from_secs(10);
const CATALOG_BUDGET: Duration = Duration::from_secs(120);
/// Oracle: confirmation threshold, perturbation floor, grid.
const ORACLE_TOLERANCE: f64 = 1e-8;
const PERTURBED_FLOOR: f64 = 1e-4;
const ORACLE_H: f64 = 1.0 / 64.0;
/// Allowed distance of a log-log slope from the stencil order.
const SLOPE_TOLERANCE: f64 = 0.5;
const CONVERGENCE_HS: [f64; 3] = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0];
/// Instantiated entries for the oracle concordance check.
const ORACLE_ENTRIES: [&str; 10] = ["2.9", "3.1", "3.3", "3.4", "3.5", "3.7", "3.8", "4.1", "4.4", "4.5"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn zero(e: &Expr) -> bool {
    is_zero(e) == Decision::Zero
}

fn g(name: &str) -> DiffOperator {
    generator(name).unwrap_or_else(|| panic!("generator {name}"))
}

// ---------------------------------------------------------------- 1

/// `[X, Y] = c·Z` as printed, in the engine's generator names.
fn printed_brackets() -> Vec<(String, String, Vec<(Expr, String)>)> {
    let i = Expr::i();
    let eps = |a: usize, b: usize| -> Option<(i64, usize)> {
        match (a, b) {
            (1, 2) => Some((1, 3)),
            (2, 3) => Some((1, 1)),
            (3, 1) => Some((1, 2)),
            (2, 1) => Some((-1, 3)),
            (3, 2) => Some((-1, 1)),
            (1, 3) => Some((-1, 2)),
            _ => None,
        }
    };
    let mut out = Vec::new();
    for a in 1..=3 {
        for b in 1..=3 {
            let rhs = |x: &str| match eps(a, b) {
                Some((s, c)) => vec![(Expr::int(s) * &i, format!("{x}{c}"))],
                None => vec![],
            };
            out.push((format!("P{a}"), format!("L{b}"), rhs("P")));
            out.push((format!("L{a}"), format!("L{b}"), rhs("L")));
            let delta = if a == b { vec![(i.clone(), "I".to_string())] } else { vec![] };
            out.push((format!("P{a}"), format!("G{b}"), delta));
        }
        out.push(("P0".into(), format!("G{a}"), vec![(i.clone(), format!("P{a}"))]));
        out.push(("D".into(), format!("P{a}"), vec![(i.clone(), format!("P{a}"))]));
        out.push(("D".into(), format!("G{a}"), vec![(-i.clone(), format!("G{a}"))]));
    }
    out.push(("D".into(), "P0".into(), vec![(Expr::int(2) * &i, "P0".into())]));
    out.push(("D".into(), "A".into(), vec![(i.clone(), "A".into())]));
    out.push(("P0".into(), "A".into(), vec![(i, "D".into())]));
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let free = Potential::free();
    let failing: Vec<&str> = FREE_ALGEBRA
        .iter()
        .copied()
        .filter(|n| check_symmetry(&free, &g(n)).map(|c| !c.is_satisfied()).unwrap_or(true))
        .collect();
    let gens: Vec<(String, DiffOperator)> = FREE_ALGEBRA.iter().map(|n| (n.to_string(), g(n))).collect();
    let dim = close_algebra(&gens, 20).map(|c| c.algebra.dim()).ok();
    let basis: Vec<DiffOperator> = FREE_ALGEBRA.iter().map(|n| g(n)).collect();
    let mut mismatched = Vec::new();
    let brackets = printed_brackets();
    for (x, y, rhs) in &brackets {
        let computed = g(x).commutator(&g(y)).expect("first order");
        let coeffs = span_express(&computed, &basis).expect("in schr(1,3)");
        let ok = FREE_ALGEBRA.iter().zip(&coeffs).all(|(name, c)| {
            let want: Expr = rhs.iter().filter(|(_, n)| n == name).map(|(k, _)| k.clone()).sum();
            zero(&(c - &want))
        });
        if !ok {
            let got: Vec<String> = FREE_ALGEBRA
                .iter()
                .zip(&coeffs)
                .filter(|(_, c)| !c.is_zero())
                .map(|(n, c)| format!("({c}){n}"))
                .collect();
            mismatched.push(format!("[{x},{y}] = {}", if got.is_empty() { "0".into() } else { got.join(" + ") }));
        }
    }
    let elapsed = start.elapsed();
    let pass = failing.is_empty() && dim == Some(13) && mismatched.is_empty() && elapsed < FREE_ALGEBRA_BUDGET;
    let mut detail = format!(
        "13/13 generators symmetric: {}, closure dim {:?}, {}/{} printed brackets match, {:.1?}",
        failing.is_empty(),
        dim,
        brackets.len() - mismatched.len(),
        brackets.len(),
        elapsed
    );
    if !mismatched.is_empty() {
        detail.push_str(&format!("; engine gives {}", mismatched.join(", ")));
    }
    outcome(pass, detail)
}

// ---------------------------------------------------------------- 2

fn criterion_2(reports: &[VerificationReport], errors: usize, elapsed: Duration) -> Outcome {
    let count = |s: EntryStatus| reports.iter().filter(|r| r.status == s).count();
    let (verified, quarantined, failed, unknown) = (
        count(EntryStatus::Verified),
        count(EntryStatus::Quarantined),
        count(EntryStatus::Failed),
        count(EntryStatus::Unknown),
    );
    let corrected_hold = reports
        .iter()
        .filter(|r| r.status == EntryStatus::Quarantined)
        .all(|r| r.corrected.as_ref().map_or(false, |c| c.decision == Decision::Zero));
    let flags_ok = reports.iter().all(|r| !r.flag_failure());
    let pass = reports.len() == 40
        && errors == 0
        && failed == 0
        && unknown == 0
        && corrected_hold
        && flags_ok
        && elapsed < CATALOG_BUDGET;
    outcome(
        pass,
        format!(
            "{} reports: {verified} verified as printed, {quarantined} verified under corrected reading, {failed} failed, {unknown} unknown; flags hold: {flags_ok}; {elapsed:.1?}",
            reports.len()
        ),
    )
}

// ---------------------------------------------------------------- 3

fn criterion_3(reports: &[VerificationReport]) -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for id in ["2.1", "2.2", "2.5", "2.6"] {
        let Some(r) = reports.iter().find(|r| r.id == id) else {
            pass = false;
            lines.push(format!("{id}: no report"));
            continue;
        };
        if r.branches.len() < 2 {
            pass = false;
        }
        for b in &r.branches {
            let ok = b.verdict.verdict == Verdict::Match;
            pass &= ok;
            if !ok || id == "2.1" {
                lines.push(format!("{id} [{}] {}: {:?}", b.condition, b.verdict.label, b.verdict.verdict));
            }
        }
    }
    let r21 = reports.iter().find(|r| r.id == "2.1");
    let expected_21 = r21.map_or(false, |r| {
        r.branches.iter().any(|b| b.condition == "kappa != 0" && b.verdict.label == "n_{3,1}")
            && r.branches.iter().any(|b| b.condition == "kappa = 0" && b.verdict.label == "3n_{1,1}")
    });
    outcome(pass && expected_21, lines.join("; "))
}

// ---------------------------------------------------------------- 4

fn criterion_4() -> Outcome {
    let w = Expr::param("omega");
    let alpha = Expr::param("alpha");
    let two_i = Expr::int(2) * Expr::i();
    let mut ok = Vec::new();
    for a in 1..=3 {
        let c = Generator::b(-1, a, &w).commutator(&Generator::b(1, a, &w)).unwrap();
        ok.push(op_is_zero(&c.sub(&DiffOperator::scalar(&two_i * &w))));
    }
    let t = SymbolTable::standard();
    let p1 = parse_operator("P1 - alpha*x2", &t).unwrap();
    let p2 = parse_operator("P2 + alpha*x1", &t).unwrap();
    let c = p2.commutator(&p1).unwrap();
    ok.push(op_is_zero(&c.sub(&DiffOperator::scalar(&two_i * &alpha))));
    outcome(
        ok.iter().all(|b| *b),
        format!("[B⁻a(ω), B⁺a(ω)] = 2iω·I for a = 1, 2, 3: {:?}; [P̂2, P̂1] = 2iα·I: {}", &ok[..3], ok[3]),
    )
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Outcome {
    let w = Expr::param("omega");
    let tr = PointTransformation::oscillator(&w).unwrap();
    let eq = tr.transform_potential(&Potential::free()).unwrap();
    let target = -(w.powi(2) * named::r2() * Expr::ratio(1, 2));
    let factor_ok = is_zero(&eq.factor) == Decision::NonZero;
    let pot_ok = zero(&eq.potential.a1) && zero(&eq.potential.a2) && zero(&(&eq.potential.v - &target));
    let rows = oscillator_transitions(&w).unwrap();
    let kinds: BTreeMap<String, bool> = rows
        .iter()
        .map(|r| {
            let ok = r.constant.as_ref().map_or(false, |c| c.is_coordinate_free() && !zero(c));
            (format!("{}→{}", r.source, r.target), ok)
        })
        .collect();
    let all = kinds.values().all(|b| *b);
    let sample: Vec<String> = rows
        .iter()
        .filter(|r| ["P0", "D", "A", "P1", "G1", "L1"].contains(&r.source.as_str()))
        .map(|r| format!("{}→{}·{}", r.source, r.multiplier.clone().unwrap_or_else(|| "?".into()), r.target))
        .collect();
    outcome(
        factor_ok && pot_ok && all && rows.len() == 12,
        format!(
            "factor {} non-vanishing: {factor_ok}; V = −ω²r²/2: {pot_ok}; {}/{} transitions constant: {}",
            eq.factor,
            kinds.values().filter(|b| **b).count(),
            rows.len(),
            sample.join(", ")
        ),
    )
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    let cfg = OracleConfig {
        grid: GridSpec { h: ORACLE_H, tau: ORACLE_H, order: StencilOrder::Fourth, ..GridSpec::default() },
        oracle: OracleSettings { tolerance: ORACLE_TOLERANCE, refinements: 0, ..OracleSettings::default() },
    };
    let psi = TestWavefunction::default();
    let entries = bundled();
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    let mut weakest = f64::INFINITY;
    for id in ORACLE_ENTRIES {
        let e = entries.iter().find(|e| e.id == id).unwrap();
        match oracle_entry(e, &BTreeMap::new(), &cfg, &psi) {
            Err(err) => bad.push(format!("{id}: {err}")),
            Ok(o) => {
                for s in &o.symmetries {
                    let ok = s.symbolic == Decision::Zero
                        && s.verdict == Some(OracleVerdict::Confirmed)
                        && s.residual.map_or(false, |r| r < ORACLE_TOLERANCE);
                    worst = worst.max(s.residual.unwrap_or(f64::INFINITY));
                    if !ok {
                        bad.push(format!("{id} {}: {:?}", s.spec, s.residual));
                    }
                }
                let p = o.perturbed.unwrap_or(0.0);
                weakest = weakest.min(p);
                if p <= PERTURBED_FLOOR {
                    bad.push(format!("{id} perturbed residual {p:.2e}"));
                }
            }
        }
    }
    // convergence on the Landau-type translation
    let e = entries.iter().find(|e| e.id == "2.9").unwrap();
    let (p, ops) = magsym::catalog::instantiate_reading(e, &BTreeMap::new()).unwrap();
    let q = ops.into_iter().find(|(s, _)| s == "P1 - alpha*x2").unwrap().1;
    let alpha = check_symmetry(&p, &q).unwrap().alpha;
    let mut exprs = vec![p.a1.clone(), p.a2.clone(), p.v.clone()];
    exprs.extend(q.terms().map(|(_, c)| c.clone()));
    let params = default_params(&exprs, &BTreeMap::new());
    let env = Env { params: &params, functions: &GENERIC };
    let mut slopes = Vec::new();
    for order in [StencilOrder::Second, StencilOrder::Fourth] {
        let g = GridSpec::default().with_order(order);
        match convergence_study(&p, &q, &alpha, &g, &psi, &CONVERGENCE_HS, env) {
            Ok(s) => {
                if !s.consistent(SLOPE_TOLERANCE) {
                    bad.push(format!("order {} slope {:.2}", s.order, s.slope));
                }
                slopes.push(format!("order {}: slope {:.2}", s.order, s.slope));
            }
            Err(err) => bad.push(format!("convergence: {err}")),
        }
    }
    let mut detail = format!(
        "{} entries, max residual {worst:.2e} (< {ORACLE_TOLERANCE:.0e}), min perturbed {weakest:.2e} (> {PERTURBED_FLOOR:.0e}); {}",
        ORACLE_ENTRIES.len(),
        slopes.join(", ")
    );
    if !bad.is_empty() {
        detail.push_str(&format!("; failures: {}", bad.join(", ")));
    }
    outcome(bad.is_empty(), detail)
}

// ---------------------------------------------------------------- 7

fn criterion_7() -> Outcome {
    let mut results: Vec<(&str, u32, Result<(), String>)> = Vec::new();
    results.push((
        "commutator bilinearity",
        COMMUTATOR_CASES,
        run_property(
            COMMUTATOR_CASES,
            (first_order_operator(), first_order_operator(), first_order_operator(), constant()),
            |(a, b, c, s)| commutator_bilinear(&a, &b, &c, &s),
        ),
    ));
    results.push((
        "antisymmetry",
        COMMUTATOR_CASES,
        run_property(COMMUTATOR_CASES, (first_order_operator(), first_order_operator()), |(a, b)| {
            commutator_antisymmetric(&a, &b)
        }),
    ));
    results.push((
        "Jacobi",
        COMMUTATOR_CASES,
        run_property(
            COMMUTATOR_CASES,
            (first_order_operator(), first_order_operator(), first_order_operator()),
            |(a, b, c)| commutator_jacobi(&a, &b, &c),
        ),
    ));
    results.push((
        "derivative linearity",
        DERIVATIVE_CASES,
        run_property(
            DERIVATIVE_CASES,
            (expression(), expression(), constant(), constant(), 0usize..4),
            |(f, h, a, b, v)| derivative_linear(&f, &h, &a, &b, v),
        ),
    ));
    results.push((
        "Clairaut",
        DERIVATIVE_CASES,
        run_property(DERIVATIVE_CASES, (expression(), 0usize..4, 0usize..4), |(f, u, v)| derivative_clairaut(&f, u, v)),
    ));
    results.push((
        "kinematic determining identities",
        ANSATZ_CASES,
        run_property(ANSATZ_CASES, (ansatz(), planar_polynomial(), polynomial()), |(a, a1, v)| {
            let v = v.subs_coord(magsym::expr::Coord::T, &Expr::zero());
            let p = Potential::from_v(a1, Expr::zero(), v).unwrap();
            ansatz_identities(&a, &p)
        }),
    ));
    results.push((
        "gauge covariance",
        GAUGE_CASES,
        run_property(GAUGE_CASES, gauge_case(), |(k, s, broken, chi)| {
            let (p, q) = gauge_target(k, s, broken);
            gauge_covariance(&p, &q, &chi)
        }),
    ));
    results.push((
        "fingerprint basis invariance",
        BASIS_CASES,
        run_property(BASIS_CASES, basis_case(), |(k, p)| basis_invariance(&reference_algebra(BASIS_LABELS[k]), &p)),
    ));
    let failed: Vec<String> =
        results.iter().filter_map(|(n, _, r)| r.as_ref().err().map(|e| format!("{n}: {e}"))).collect();
    let summary: Vec<String> =
        results.iter().map(|(n, c, r)| format!("{n} ×{c} {}", if r.is_ok() { "ok" } else { "FAILED" })).collect();
    let mut detail = summary.join(", ");
    if !failed.is_empty() {
        detail.push_str(&format!("; {}", failed.join("; ")));
    }
    outcome(failed.is_empty(), detail)
}

fn main() {
    let start = Instant::now();
    let entries = bundled();
    let refs: Vec<_> = entries.iter().collect();
    let catalog_start = Instant::now();
    let results = verify_all(&refs);
    let catalog_time = catalog_start.elapsed();
    let errors = results.iter().filter(|r| r.is_err()).count();
    let reports: Vec<VerificationReport> = results.into_iter().filter_map(Result::ok).collect();

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("free-equation algebra", Box::new(criterion_1)),
        ("table verification", Box::new(|| criterion_2(&reports, errors, catalog_time))),
        ("branch fingerprints", Box::new(|| criterion_3(&reports))),
        ("Heisenberg relations", Box::new(criterion_4)),
        ("oscillator map", Box::new(criterion_5)),
        ("oracle concordance", Box::new(criterion_6)),
        ("property suites", Box::new(criterion_7)),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failures += 1;
        }
        println!("criterion {} {} {}: {}", k + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
    }
    println!("acceptance: {}/{} criteria pass ({:.1?})", criteria.len() - failures, criteria.len(), start.elapsed());
    if failures > 0 {
        std::process::exit(1);
    }
}
