//! Linear differential operators with [`Expr`] coefficients.
//!
//! Operators are kept in "derivatives on the right" normal form
//! `Σ c_m(t,x) ∂^m`, so composing a coefficient past a derivative goes
//! through the Leibniz rule and comparing two operators is a map lookup.

mod generators;
mod schrodinger;
mod spec;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::expr::{Coeff, Coord, Expr, ParseError, SymbolTable};

pub use generators::{
    family_arity, generator, generator_family, Generator, FREE_ALGEBRA, GENERATOR_FAMILIES, GENERATOR_NAMES,
};
pub use schrodinger::{
    check_symmetry, schrodinger_operator, CoefficientDecision, Potential, PotentialError, SymmetryCheck, SymmetryError,
};
pub use spec::{parse_operator, OperatorSpecError};

/// Largest total order an operator may reach; `[Q, L]` passes through order 3.
pub const DEFAULT_ORDER_CAP: u32 = 4;

/// Derivative orders in `(t, x1, x2, x3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(pub [u8; 4]);

impl MultiIndex {
    pub const ID: MultiIndex = MultiIndex([0; 4]);

    pub fn of(c: Coord) -> Self {
        let mut m = [0; 4];
        m[c.index()] = 1;
        MultiIndex(m)
    }

    pub fn order(&self) -> u32 {
        self.0.iter().map(|&k| k as u32).sum()
    }

    pub fn add(&self, o: &MultiIndex) -> MultiIndex {
        let mut m = self.0;
        for i in 0..4 {
            m[i] += o.0[i];
        }
        MultiIndex(m)
    }

    /// All `γ ≤ self` with the multinomial weight `Π C(self_i, γ_i)`.
    fn below(&self) -> Vec<(MultiIndex, i64)> {
        let mut out = vec![(MultiIndex::ID, 1i64)];
        for i in 0..4 {
            let n = self.0[i];
            let mut next = Vec::new();
            for (g, w) in &out {
                for k in 0..=n {
                    let mut m = g.0;
                    m[i] = k;
                    next.push((MultiIndex(m), w * binom(n as i64, k as i64)));
                }
            }
            out = next;
        }
        out
    }

    fn sub(&self, o: &MultiIndex) -> MultiIndex {
        let mut m = self.0;
        for i in 0..4 {
            m[i] -= o.0[i];
        }
        MultiIndex(m)
    }
}

fn binom(n: i64, k: i64) -> i64 {
    (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.0;
        write!(f, "d[{},{},{},{}]", m[0], m[1], m[2], m[3])
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("composition reaches order {order}, above the cap {cap}")]
    OrderCap { order: u32, cap: u32 },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Coefficient { line: usize, source: ParseError },
}

/// `Σ c_m ∂^m`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Default)]
pub struct DiffOperator {
    terms: BTreeMap<MultiIndex, Expr>,
}

impl fmt::Debug for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOperator{{{}}}", self.to_text().trim_end().replace('\n', "; "))
    }
}

impl DiffOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Multiplication by `c`.
    pub fn scalar(c: Expr) -> Self {
        Self::monomial(MultiIndex::ID, c)
    }

    pub fn identity() -> Self {
        Self::scalar(Expr::one())
    }

    /// `∂_c`.
    pub fn partial(c: Coord) -> Self {
        Self::monomial(MultiIndex::of(c), Expr::one())
    }

    pub fn monomial(m: MultiIndex, c: Expr) -> Self {
        let mut op = Self::zero();
        op.add_term(m, c);
        op
    }

    pub fn from_terms(it: impl IntoIterator<Item = (MultiIndex, Expr)>) -> Self {
        let mut op = Self::zero();
        for (m, c) in it {
            op.add_term(m, c);
        }
        op
    }

    pub fn add_term(&mut self, m: MultiIndex, c: Expr) {
        if c.is_zero() {
            return;
        }
        let s = match self.terms.remove(&m) {
            Some(old) => &old + &c,
            None => c,
        };
        if !s.is_zero() {
            self.terms.insert(m, s);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Expr)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &MultiIndex) -> Expr {
        self.terms.get(m).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn coeff_of(&self, c: Coord) -> Expr {
        self.coeff(&MultiIndex::of(c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(|m| m.order()).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Apply `f` to every coefficient.
    pub fn map_coeffs(&self, mut f: impl FnMut(&Expr) -> Expr) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    /// Left multiplication `c · self`.
    pub fn scale(&self, c: &Expr) -> Self {
        self.map_coeffs(|x| c * x)
    }

    pub fn scale_const(&self, c: &Coeff) -> Self {
        self.map_coeffs(|x| x.scale(c))
    }

    pub fn add(&self, o: &DiffOperator) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &DiffOperator) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, -c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    /// `self ψ`.
    pub fn apply(&self, psi: &Expr) -> Expr {
        self.terms.iter().map(|(m, c)| c * &psi.d_multi(m.0)).sum()
    }

    pub fn compose(&self, o: &DiffOperator) -> Result<Self, OperatorError> {
        self.compose_capped(o, DEFAULT_ORDER_CAP)
    }

    /// `self ∘ o` by the Leibniz rule:
    /// `a ∂^α ∘ b ∂^β = Σ_{γ≤α} C(α,γ) a (∂^γ b) ∂^{α−γ+β}`.
    pub fn compose_capped(&self, o: &DiffOperator, cap: u32) -> Result<Self, OperatorError> {
        let mut out = DiffOperator::zero();
        let mut cache: HashMap<(MultiIndex, MultiIndex), Expr> = HashMap::new();
        for (alpha, a) in &self.terms {
            for (gamma, w) in alpha.below() {
                let rest = alpha.sub(&gamma);
                for (beta, b) in &o.terms {
                    let db = cache.entry((*beta, gamma)).or_insert_with(|| b.d_multi(gamma.0)).clone();
                    if db.is_zero() {
                        continue;
                    }
                    let m = rest.add(beta);
                    if m.order() > cap {
                        return Err(OperatorError::OrderCap { order: m.order(), cap });
                    }
                    out.add_term(m, (a * &db).scale(&Coeff::int(w)));
                }
            }
        }
        Ok(out)
    }

    /// `[self, o] = self∘o − o∘self`.
    pub fn commutator(&self, o: &DiffOperator) -> Result<Self, OperatorError> {
        Ok(self.compose(o)?.sub(&o.compose(self)?))
    }

    /// Right multiplication `self ∘ c`.
    pub fn then_scalar(&self, c: &Expr) -> Self {
        self.compose_capped(&DiffOperator::scalar(c.clone()), u32::MAX).expect("scalar composition keeps the order")
    }

    /// `e^{-s} ∘ self ∘ e^{s}` for a multiplier written as `M = exp(s)` or any
    /// invertible `M`.
    pub fn conjugate_by(&self, m: &Expr) -> Self {
        self.then_scalar(m).scale(&m.recip())
    }

    /// One `d[a,b,c,d]: coefficient` line per term.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (m, c) in &self.terms {
            s.push_str(&format!("{}: {}\n", m, c));
        }
        s
    }

    pub fn from_text(src: &str, table: &SymbolTable) -> Result<Self, OperatorError> {
        let mut op = DiffOperator::zero();
        for (k, raw) in src.lines().enumerate() {
            let line = k + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let syntax = |msg: &str| OperatorError::Syntax { line, msg: msg.to_string() };
            let (head, body) = text.split_once(':').ok_or_else(|| syntax("expected `d[..]: coefficient`"))?;
            let inner = head
                .trim()
                .strip_prefix("d[")
                .and_then(|h| h.strip_suffix(']'))
                .ok_or_else(|| syntax("expected `d[a,b,c,d]`"))?;
            let orders: Vec<u8> = inner
                .split(',')
                .map(|p| p.trim().parse::<u8>())
                .collect::<Result<_, _>>()
                .map_err(|_| syntax("derivative orders must be small integers"))?;
            if orders.len() != 4 {
                return Err(syntax("expected four derivative orders"));
            }
            let c = crate::expr::parse_expr(body.trim(), table)
                .map_err(|source| OperatorError::Coefficient { line, source })?;
            op.add_term(MultiIndex([orders[0], orders[1], orders[2], orders[3]]), c);
        }
        Ok(op)
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let d: String = Coord::ALL
                .iter()
                .flat_map(|c| std::iter::repeat(c.name()).take(m.0[c.index()] as usize))
                .map(|n| format!("∂{}", n))
                .collect();
            if d.is_empty() {
                write!(f, "({})", c)?;
            } else {
                write!(f, "({}){}", c, d)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
