//! Strategies and algebraic properties shared by the property suite and the
//! acceptance harness.

#![allow(dead_code)]

use magsym::catalog::{bundled, instantiate_reading, TableEntry};
use magsym::determining::{build_generator, decide, raw_determining_residuals, GeneratorAnsatz};
use magsym::diffop::{check_symmetry, DiffOperator, MultiIndex, Potential};
use magsym::equiv::{gauge_apply, gauge_operator};
use magsym::expr::{is_zero, Coeff, Coord, Decision, Expr};
use magsym::liealg::labels::{reference, Reference};
use magsym::liealg::NumAlgebra;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const COMMUTATOR_CASES: u32 = 200;
pub const DERIVATIVE_CASES: u32 = 200;
pub const ANSATZ_CASES: u32 = 100;
pub const GAUGE_CASES: u32 = 20;
pub const BASIS_CASES: u32 = 50;

const COORDS: [Coord; 4] = [Coord::T, Coord::X1, Coord::X2, Coord::X3];

fn small_rational() -> impl Strategy<Value = Expr> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| Expr::ratio(n, d))
}

/// Coordinate-free coefficient: a rational, possibly times a parameter.
pub fn constant() -> impl Strategy<Value = Expr> {
    (small_rational(), any::<bool>()).prop_map(|(c, p)| if p { c * Expr::param("omega") } else { c })
}

/// Monomial `c·t^a x1^b x2^c x3^d` with small exponents.
fn monomial() -> impl Strategy<Value = Expr> {
    (small_rational(), prop::array::uniform4(0i64..=2))
        .prop_map(|(c, k)| COORDS.iter().zip(k).fold(c, |acc, (v, e)| acc * Expr::coord(*v).powi(e)))
}

pub fn polynomial() -> impl Strategy<Value = Expr> {
    prop::collection::vec(monomial(), 1..=3).prop_map(|v| v.into_iter().sum())
}

/// Polynomial in `x1, x2` only (admissible gauge functions).
pub fn planar_polynomial() -> impl Strategy<Value = Expr> {
    prop::collection::vec((small_rational(), 0i64..=3, 0i64..=3), 1..=3)
        .prop_map(|v| v.into_iter().map(|(c, a, b)| c * Expr::x(1).powi(a) * Expr::x(2).powi(b)).sum())
}

/// Expressions mixing polynomials, `exp`, `sin`, `cos`, integer powers and an
/// arbitrary function `F(·,·)`.
pub fn expression() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![polynomial(), (0usize..4).prop_map(|k| Expr::coord(COORDS[k])), Just(Expr::param("omega")),];
    leaf.prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), 2i64..=3).prop_map(|(a, k)| a.powi(k)),
            inner.clone().prop_map(|a| a.exp()),
            inner.clone().prop_map(|a| a.sin()),
            inner.clone().prop_map(|a| a.cos()),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::app("F", vec![a, b])),
        ]
    })
}

/// First-order operator with polynomial coefficients.
pub fn first_order_operator() -> impl Strategy<Value = DiffOperator> {
    prop::array::uniform5(prop::option::weighted(0.7, polynomial())).prop_map(|cs| {
        let mut q = DiffOperator::zero();
        for (k, c) in cs.into_iter().enumerate() {
            if let Some(c) = c {
                let m = if k == 4 { MultiIndex::ID } else { MultiIndex::of(COORDS[k]) };
                q.add_term(m, c);
            }
        }
        q
    })
}

fn zero(e: &Expr) -> bool {
    is_zero(e) == Decision::Zero
}

pub fn op_is_zero(q: &DiffOperator) -> bool {
    q.terms().all(|(_, c)| zero(c))
}

fn ensure(ok: bool, what: impl Into<String>) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.into()))
    }
}

fn bracket(a: &DiffOperator, b: &DiffOperator) -> Result<DiffOperator, TestCaseError> {
    a.commutator(b).map_err(|e| TestCaseError::fail(e.to_string()))
}

// ---------------------------------------------------------------- commutators

pub fn commutator_bilinear(
    a: &DiffOperator,
    b: &DiffOperator,
    c: &DiffOperator,
    s: &Expr,
) -> Result<(), TestCaseError> {
    let lhs = bracket(&a.add(&c.scale(s)), b)?;
    let rhs = bracket(a, b)?.add(&bracket(c, b)?.scale(s));
    ensure(op_is_zero(&lhs.sub(&rhs)), "[a + s c, b] != [a,b] + s[c,b]")?;
    let lhs = bracket(a, &b.add(&c.scale(s)))?;
    let rhs = bracket(a, b)?.add(&bracket(a, c)?.scale(s));
    ensure(op_is_zero(&lhs.sub(&rhs)), "[a, b + s c] != [a,b] + s[a,c]")
}

pub fn commutator_antisymmetric(a: &DiffOperator, b: &DiffOperator) -> Result<(), TestCaseError> {
    ensure(op_is_zero(&bracket(a, b)?.add(&bracket(b, a)?)), "[a,b] + [b,a] != 0")?;
    ensure(op_is_zero(&bracket(a, a)?), "[a,a] != 0")
}

pub fn commutator_jacobi(a: &DiffOperator, b: &DiffOperator, c: &DiffOperator) -> Result<(), TestCaseError> {
    let j = bracket(a, &bracket(b, c)?)?.add(&bracket(b, &bracket(c, a)?)?).add(&bracket(c, &bracket(a, b)?)?);
    ensure(op_is_zero(&j), "Jacobi sum != 0")
}

// ---------------------------------------------------------------- derivatives

pub fn derivative_linear(f: &Expr, g: &Expr, a: &Expr, b: &Expr, v: usize) -> Result<(), TestCaseError> {
    let c = COORDS[v];
    let lhs = (a * f + b * g).d(c);
    let rhs = a * &f.d(c) + b * &g.d(c);
    ensure(zero(&(lhs - rhs)), format!("d/d{} not linear on {f}, {g}", c.name()))
}

pub fn derivative_clairaut(f: &Expr, u: usize, v: usize) -> Result<(), TestCaseError> {
    let (cu, cv) = (COORDS[u], COORDS[v]);
    ensure(zero(&(f.d(cu).d(cv) - f.d(cv).d(cu))), format!("mixed partials of {f} differ"))
}

// ---------------------------------------------------------------- ansatz

/// `(ξ⁰, θ, ν, K)` with `α·ν = 0`: either `ξ⁰` quadratic in `t` and `ν = 0`,
/// or `ξ⁰` constant and `ν` quadratic.
pub fn ansatz() -> impl Strategy<Value = GeneratorAnsatz> {
    let quad = || {
        prop::array::uniform3(small_rational())
            .prop_map(|c| c[0].clone() + &c[1] * Expr::t() + &c[2] * Expr::t().powi(2))
    };
    (
        any::<bool>(),
        quad(),
        prop::array::uniform3(small_rational()),
        prop::array::uniform3(quad()),
        polynomial(),
        small_rational(),
    )
        .prop_map(|(conformal, xi0, theta, nu, k, c0)| {
            if conformal {
                GeneratorAnsatz { xi0, theta, nu: [Expr::zero(), Expr::zero(), Expr::zero()], k }
            } else {
                GeneratorAnsatz { xi0: c0, theta, nu, k }
            }
        })
}

/// The conformal-Killing (`de2.*`), `de1.b` and `de6` residuals vanish
/// identically for every generator built from the ansatz, whatever the field.
pub fn ansatz_identities(a: &GeneratorAnsatz, p: &Potential) -> Result<(), TestCaseError> {
    let q = build_generator(a).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let rs: Vec<_> = raw_determining_residuals(p, &q)
        .into_iter()
        .filter(|r| r.tag.starts_with("de2") || r.tag.starts_with("de1.") || r.tag == "de6")
        .collect();
    ensure(rs.len() == 10, format!("expected 10 kinematic residuals, got {}", rs.len()))?;
    let (d, bad) = decide(&rs);
    ensure(d == Decision::Zero, format!("residuals {bad:?} for {a:?}"))
}

// ---------------------------------------------------------------- gauge

/// Entries with time-independent fields whose symmetries all hold.
pub const GAUGE_ENTRIES: [&str; 6] = ["1.8", "2.1", "2.9", "3.1", "3.5", "4.4"];

pub fn entry(id: &str) -> TableEntry {
    bundled().into_iter().find(|e| e.id == id).expect("entry present")
}

/// The decision of `[Q, L] = αL` is unchanged by `A → A + ∇χ`,
/// `Q → e^{-iχ} Q e^{iχ}`; checked on a symmetry and on a non-symmetry.
pub fn gauge_covariance(p: &Potential, q: &DiffOperator, chi: &Expr) -> Result<(), TestCaseError> {
    let before = check_symmetry(p, q).map_err(|e| TestCaseError::fail(e.to_string()))?.satisfied;
    let pg = gauge_apply(p, chi).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let qg = gauge_operator(q, chi, &p.e);
    let after = check_symmetry(&pg, &qg).map_err(|e| TestCaseError::fail(e.to_string()))?.satisfied;
    ensure(before == after, format!("gauge by {chi} changed {before:?} to {after:?}"))
}

pub fn gauge_case() -> impl Strategy<Value = (usize, usize, bool, Expr)> {
    (0..GAUGE_ENTRIES.len(), 0usize..8, any::<bool>(), planar_polynomial())
}

/// Instantiated `(p, q)` for a gauge case; `broken` swaps the symmetry for
/// the multiplication operator `x3`.
pub fn gauge_target(k: usize, s: usize, broken: bool) -> (Potential, DiffOperator) {
    let (p, ops) = instantiate_reading(&entry(GAUGE_ENTRIES[k]), &Default::default()).expect("instantiates");
    let q = if broken { DiffOperator::scalar(Expr::x(3)) } else { ops[s % ops.len()].1.clone() };
    (p, q)
}

// ---------------------------------------------------------------- fingerprints

pub const BASIS_LABELS: [&str; 5] = ["schr(1,3)", "s_{4,6}", "n_{3,1}", "so(3) + 2n_{1,1}", "s_{7,1}"];

/// Unit lower-triangular times unit upper-triangular: always invertible.
pub fn basis_change(n: usize) -> impl Strategy<Value = Vec<Vec<Coeff>>> {
    (prop::collection::vec(-2i64..=2, n * n), prop::collection::vec(-2i64..=2, n * n)).prop_map(move |(l, u)| {
        let lo = |i: usize, j: usize| {
            if i == j {
                1
            } else if j < i {
                l[i * n + j]
            } else {
                0
            }
        };
        let up = |i: usize, j: usize| {
            if i == j {
                1
            } else if j > i {
                u[i * n + j]
            } else {
                0
            }
        };
        (0..n).map(|i| (0..n).map(|j| Coeff::int((0..n).map(|k| lo(i, k) * up(k, j)).sum())).collect()).collect()
    })
}

/// A reference algebra together with a random change of basis.
pub fn basis_case() -> impl Strategy<Value = (usize, Vec<Vec<Coeff>>)> {
    (0..BASIS_LABELS.len()).prop_flat_map(|k| (Just(k), basis_change(reference_algebra(BASIS_LABELS[k]).dim())))
}

pub fn reference_algebra(label: &str) -> NumAlgebra<Coeff> {
    match reference(label).expect("known label") {
        Reference::Full(a) => a,
        Reference::Partial { .. } => panic!("{label} has no explicit brackets"),
    }
}

pub fn basis_invariance(a: &NumAlgebra<Coeff>, p: &[Vec<Coeff>]) -> Result<(), TestCaseError> {
    let b = a.change_basis(p).ok_or_else(|| TestCaseError::fail("basis change not invertible"))?;
    ensure(b.satisfies_jacobi(), "Jacobi lost under basis change")?;
    ensure(b.invariants() == a.invariants(), "invariants changed under basis change")
}

// ---------------------------------------------------------------- runner

/// Run a property for `cases` cases with a fixed seed, for the harness.
pub fn run_property<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut runner =
        TestRunner::new_with_rng(config, proptest::test_runner::TestRng::deterministic_rng(Default::default()));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}
