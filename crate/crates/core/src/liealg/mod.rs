//! Lie algebras spanned by symmetry operators.
//!
//! [`span_express`] solves `op = Σ c_k b_k` for constant `c_k` by splitting
//! every coefficient into (constant factor) × (coordinate monomial) and
//! eliminating over the constants symbolically; [`close_algebra`] adjoins
//! commutators until the span closes.  Invariants are computed on numeric
//! specializations of the structure constants (see [`numeric`]) and matched
//! against reference algebras in [`labels`].

pub mod labels;
pub mod numeric;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::diffop::{DiffOperator, MultiIndex, OperatorError};
use crate::expr::zero::zero_test;
use crate::expr::{Coeff, Decision, Expr};

pub use labels::{match_label, parse_label, LabelError, LabelVerdict, Reference, KNOWN_LABELS};
pub use numeric::{Invariants, NumAlgebra, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpanError {
    #[error("not in span: {0}")]
    NotInSpan(String),
}

/// Decision used for pivots: only a certified `NonZero` may be divided by.
fn decide(e: &Expr) -> Decision {
    if e.is_zero() {
        return Decision::Zero;
    }
    if let Some(c) = e.as_number() {
        return if c.is_zero() { Decision::Zero } else { Decision::NonZero };
    }
    zero_test(e).decision
}

type Key = (MultiIndex, crate::expr::Monomial);

fn decompose(op: &DiffOperator) -> BTreeMap<Key, Expr> {
    let mut out = BTreeMap::new();
    for (m, c) in op.terms() {
        for (mono, k) in c.split_constant_factors() {
            if !k.is_zero() {
                out.insert((*m, mono), k);
            }
        }
    }
    out
}

/// Constant coefficients `c` with `op = Σ c_k basis_k`, verified by an exact
/// zero test of the remainder.
///
/// Coefficients are matched monomial by monomial; when that fails for
/// parameter-free input (rational coefficients need not share a normal
/// form), the constants are solved at sample points, rationalized and
/// verified exactly.
pub fn span_express(op: &DiffOperator, basis: &[DiffOperator]) -> Result<Vec<Expr>, SpanError> {
    match span_structural(op, basis) {
        Ok(c) => Ok(c),
        Err(e) => span_sampled(op, basis).ok_or(e),
    }
}

fn verify_span(op: &DiffOperator, basis: &[DiffOperator], c: &[Expr]) -> Result<(), SpanError> {
    let mut rem = op.clone();
    for (k, b) in basis.iter().enumerate() {
        if !c[k].is_zero() {
            rem = rem.sub(&b.scale(&c[k]));
        }
    }
    for (m, coeff) in rem.terms() {
        if zero_test(coeff).decision != Decision::Zero {
            return Err(SpanError::NotInSpan(format!("remainder at {}", m)));
        }
    }
    Ok(())
}

/// Best rational approximation with denominator at most `max_den`.
fn rationalize(x: f64, max_den: i64) -> Option<Coeff> {
    if !x.is_finite() || x.abs() > 1e9 {
        return None;
    }
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut v = x;
    for _ in 0..40 {
        let a = v.floor();
        let (h2, k2) = (a as i64 * h1 + h0, a as i64 * k1 + k0);
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = v - a;
        if (h1 as f64 / k1 as f64 - x).abs() < 1e-10 || frac.abs() < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    ((h1 as f64 / k1 as f64 - x).abs() < 1e-8).then(|| Coeff::ratio(h1, k1))
}

fn span_sampled(op: &DiffOperator, basis: &[DiffOperator]) -> Option<Vec<Expr>> {
    use crate::expr::eval::GenericFunctions;
    use numeric::Approx;
    let all = std::iter::once(op).chain(basis.iter());
    let mut keys = BTreeSet::new();
    for o in all.clone() {
        for (m, c) in o.terms() {
            if !c.params().is_empty() {
                return None;
            }
            keys.insert(*m);
        }
    }
    let n = basis.len();
    let fns = GenericFunctions::default();
    let mut rows: Vec<Vec<Approx>> = Vec::new();
    for p in crate::expr::zero::sample_points(&Expr::zero(), 8) {
        for m in &keys {
            let row: Option<Vec<Approx>> = all
                .clone()
                .skip(1)
                .chain(std::iter::once(op))
                .map(|o| o.coeff(m).eval(&p, &fns).ok().map(Approx))
                .collect();
            if let Some(r) = row {
                rows.push(r);
            }
        }
    }
    let red = numeric::row_reduce(rows);
    let mut c = vec![Expr::zero(); n];
    for row in &red {
        let piv = row.iter().position(|x| !x.is_zero())?;
        if piv == n {
            return None;
        }
        let v = row[n].0;
        let re = rationalize(v.re, 100_000)?;
        let im = rationalize(v.im, 100_000)?;
        c[piv] = Expr::constant(&re + &(&im * &Coeff::i()));
    }
    verify_span(op, basis, &c).ok()?;
    Some(c)
}

fn span_structural(op: &DiffOperator, basis: &[DiffOperator]) -> Result<Vec<Expr>, SpanError> {
    let n = basis.len();
    let target = decompose(op);
    let cols: Vec<BTreeMap<Key, Expr>> = basis.iter().map(decompose).collect();
    let keys: BTreeSet<Key> = target.keys().chain(cols.iter().flat_map(|c| c.keys())).cloned().collect();
    let mut rows: Vec<(Vec<Expr>, Expr)> = keys
        .iter()
        .map(|k| {
            let row = cols.iter().map(|c| c.get(k).cloned().unwrap_or_else(Expr::zero)).collect();
            (row, target.get(k).cloned().unwrap_or_else(Expr::zero))
        })
        .collect();

    // Reduced row echelon form over constant expressions.
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let pick = (rank..rows.len())
            .filter(|&r| decide(&rows[r].0[col]) == Decision::NonZero)
            .min_by_key(|&r| (rows[r].0[col].as_number().is_none(), rows[r].0[col].terms().count()));
        let Some(r) = pick else { continue };
        rows.swap(rank, r);
        let inv = rows[rank].0[col].recip();
        let (prow, prhs) = {
            let (row, rhs) = &rows[rank];
            (row.iter().map(|x| x * &inv).collect::<Vec<_>>(), rhs * &inv)
        };
        rows[rank] = (prow.clone(), prhs.clone());
        for (k, (row, rhs)) in rows.iter_mut().enumerate() {
            if k == rank || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for j in 0..n {
                row[j] = &row[j] - &(&f * &prow[j]);
            }
            *rhs = &*rhs - &(&f * &prhs);
        }
        pivots.push((rank, col));
        rank += 1;
    }
    for (_, rhs) in rows.iter().skip(rank) {
        match decide(rhs) {
            Decision::Zero => {}
            d => return Err(SpanError::NotInSpan(format!("inconsistent component ({:?})", d))),
        }
    }
    let mut c = vec![Expr::zero(); n];
    for (r, col) in pivots {
        c[col] = rows[r].1.clone();
    }
    verify_span(op, basis, &c)?;
    Ok(c)
}

/// `[e_i, e_j] = Σ_k c[i][j][k] e_k` for a closed operator basis.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    pub labels: Vec<String>,
    pub basis: Vec<DiffOperator>,
    pub c: Vec<Vec<Vec<Expr>>>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosureError {
    #[error("closure exceeds dimension {max_dim}: [{a}, {b}] is not in the span")]
    NotClosed { max_dim: usize, a: String, b: String },
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("Jacobi identity fails for ({0}, {1}, {2})")]
    Jacobi(String, String, String),
}

/// Adjoin commutators of `gens` until the span closes.  Linearly dependent
/// generators are dropped (their labels are reported in `dropped`).
pub fn close_algebra(gens: &[(String, DiffOperator)], max_dim: usize) -> Result<Closure, ClosureError> {
    let mut labels: Vec<String> = Vec::new();
    let mut basis: Vec<DiffOperator> = Vec::new();
    let mut dropped = Vec::new();
    for (name, g) in gens {
        if g.is_zero() || span_express(g, &basis).is_ok() {
            dropped.push(name.clone());
            continue;
        }
        if basis.len() == max_dim {
            return Err(ClosureError::NotClosed { max_dim, a: name.clone(), b: String::new() });
        }
        labels.push(name.clone());
        basis.push(g.clone());
    }
    let mut table: BTreeMap<(usize, usize), Vec<Expr>> = BTreeMap::new();
    let mut j = 1;
    while j < basis.len() {
        for i in 0..j {
            let br = basis[i].commutator(&basis[j])?;
            match span_express(&br, &basis) {
                Ok(c) => {
                    table.insert((i, j), c);
                }
                Err(_) => {
                    if basis.len() == max_dim {
                        return Err(ClosureError::NotClosed { max_dim, a: labels[i].clone(), b: labels[j].clone() });
                    }
                    let k = basis.len();
                    let mut c = vec![Expr::zero(); k + 1];
                    c[k] = Expr::one();
                    labels.push(format!("[{},{}]", labels[i], labels[j]));
                    basis.push(br);
                    table.insert((i, j), c);
                }
            }
        }
        j += 1;
    }
    let n = basis.len();
    let mut c = vec![vec![vec![Expr::zero(); n]; n]; n];
    for ((i, j), mut v) in table {
        v.resize(n, Expr::zero());
        c[j][i] = v.iter().map(|x| -x).collect();
        c[i][j] = v;
    }
    let sc = StructureConstants { labels, basis, c };
    if let Some((a, b, d)) = sc.jacobi_violation() {
        return Err(ClosureError::Jacobi(sc.labels[a].clone(), sc.labels[b].clone(), sc.labels[d].clone()));
    }
    Ok(Closure { algebra: sc, dropped })
}

#[derive(Debug, Clone)]
pub struct Closure {
    pub algebra: StructureConstants,
    pub dropped: Vec<String>,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn bracket(&self, i: usize, j: usize) -> &[Expr] {
        &self.c[i][j]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// First triple violating Jacobi (exact zero test of every component).
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim();
        for a in 0..n {
            for b in a + 1..n {
                for d in b + 1..n {
                    for m in 0..n {
                        let mut s = Expr::zero();
                        for l in 0..n {
                            for (x, y, z) in [(a, b, d), (b, d, a), (d, a, b)] {
                                let (p, q) = (&self.c[x][y][l], &self.c[l][z][m]);
                                if !p.is_zero() && !q.is_zero() {
                                    s = s + p * q;
                                }
                            }
                        }
                        if decide(&s) != Decision::Zero {
                            return Some((a, b, d));
                        }
                    }
                }
            }
        }
        None
    }

    /// Parameters occurring in the constants.
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for row in &self.c {
            for v in row {
                for x in v {
                    out.extend(x.params().iter().map(|p| p.to_string()));
                }
            }
        }
        out
    }

    /// Nonzero brackets as `(i, j, [(k, c)])` with `i < j`.
    pub fn nonzero_brackets(&self) -> Vec<(usize, usize, Vec<(usize, Expr)>)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let v: Vec<(usize, Expr)> = self.c[i][j]
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(k, x)| (k, x.clone()))
                    .collect();
                if !v.is_empty() {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    /// Substitute parameter values and evaluate the constants exactly.
    pub fn specialize(&self, values: &BTreeMap<String, Coeff>) -> Option<NumAlgebra<Coeff>> {
        let n = self.dim();
        let mut c = vec![vec![vec![Coeff::zero(); n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut e = self.c[i][j][k].clone();
                    for (p, v) in values {
                        e = e.subs_param(p, &Expr::constant(v.clone()));
                    }
                    c[i][j][k] = e.as_number()?;
                }
            }
        }
        Some(NumAlgebra::new(c))
    }

    /// Same as [`Self::specialize`] in floating point, for constants that
    /// keep radicals after substitution.
    pub fn specialize_approx(&self, values: &BTreeMap<String, Coeff>) -> Option<NumAlgebra<numeric::Approx>> {
        use crate::expr::eval::NoFunctions;
        use crate::expr::NumericPoint;
        let n = self.dim();
        let point = NumericPoint::new(0.0, [0.0; 3]);
        let mut c = vec![vec![vec![numeric::Approx::zero(); n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut e = self.c[i][j][k].clone();
                    for (p, v) in values {
                        e = e.subs_param(p, &Expr::constant(v.clone()));
                    }
                    c[i][j][k] = numeric::Approx(e.eval(&point, &NoFunctions).ok()?);
                }
            }
        }
        Some(NumAlgebra::new(c))
    }
}

impl fmt::Display for StructureConstants {
    /// One `[a, b] = c·e` line per nonzero bracket.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, j, v) in self.nonzero_brackets() {
            let rhs: Vec<String> = v.iter().map(|(k, c)| format!("({})*{}", c, self.labels[*k])).collect();
            writeln!(f, "[{}, {}] = {}", self.labels[i], self.labels[j], rhs.join(" + "))?;
        }
        Ok(())
    }
}

/// Generic value for the `k`-th parameter: distinct rationals with no small
/// integer relations among them.
pub fn generic_value(k: usize) -> Coeff {
    const NUM: [i64; 8] = [13, 29, 41, 59, 71, 89, 103, 127];
    const DEN: [i64; 8] = [7, 11, 17, 19, 23, 31, 37, 43];
    Coeff::ratio(NUM[k % 8] + 131 * (k / 8) as i64, DEN[k % 8])
}

/// Fingerprint of one parameter stratum.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraFingerprint {
    pub condition: String,
    pub invariants: Invariants,
    /// Labels whose reference invariants agree (possibly several).
    pub names: Vec<String>,
    /// `false` when the constants had to be evaluated in floating point.
    pub exact: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FingerprintReport {
    pub generic: AlgebraFingerprint,
    /// Strata `p = 0` whose invariants differ from the generic ones.
    pub strata: Vec<AlgebraFingerprint>,
    pub note: &'static str,
}

pub const MATCH_NOTE: &str = "names are matched by invariants (dimension, derived and lower central series, center); agreement does not prove isomorphism";

fn invariants_at(sc: &StructureConstants, values: &BTreeMap<String, Coeff>) -> Option<(Invariants, bool)> {
    if let Some(a) = sc.specialize(values) {
        return Some((a.invariants(), true));
    }
    sc.specialize_approx(values).map(|a| (a.invariants(), false))
}

fn stamp(condition: String, inv: Invariants, exact: bool) -> AlgebraFingerprint {
    let names = labels::candidates(&inv);
    AlgebraFingerprint { condition, invariants: inv, names, exact }
}

/// Invariants at generic parameter values plus every `p = 0` stratum that
/// changes them.  Strata where a constant becomes singular are skipped.
pub fn fingerprint(sc: &StructureConstants) -> FingerprintReport {
    let params: Vec<String> = sc.params().into_iter().collect();
    let generic_vals: BTreeMap<String, Coeff> =
        params.iter().enumerate().map(|(k, p)| (p.clone(), generic_value(k))).collect();
    let (inv, exact) = invariants_at(sc, &generic_vals).expect("generic values avoid singularities");
    let generic = stamp("generic".into(), inv, exact);
    let mut strata = Vec::new();
    for p in &params {
        let mut vals = generic_vals.clone();
        vals.insert(p.clone(), Coeff::zero());
        if let Some((inv, exact)) = invariants_at(sc, &vals) {
            if inv != generic.invariants {
                strata.push(stamp(format!("{} = 0", p), inv, exact));
            }
        }
    }
    FingerprintReport { generic, strata, note: MATCH_NOTE }
}

/// Fingerprint at explicit parameter values (remaining parameters generic).
pub fn fingerprint_at(
    sc: &StructureConstants,
    values: &BTreeMap<String, Coeff>,
    condition: &str,
) -> Option<AlgebraFingerprint> {
    let mut vals: BTreeMap<String, Coeff> =
        sc.params().into_iter().enumerate().map(|(k, p)| (p, generic_value(k))).collect();
    vals.extend(values.iter().map(|(k, v)| (k.clone(), v.clone())));
    invariants_at(sc, &vals).map(|(inv, exact)| stamp(condition.to_string(), inv, exact))
}
