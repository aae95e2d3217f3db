//! Canonical symbolic expressions over the coordinates `t, x1, x2, x3`.
//!
//! An [`Expr`] is a finite sum of `coefficient × monomial`, where
//! coefficients are Gaussian rationals and a monomial is a sorted product of
//! [`Atom`]s raised to rational exponents.  Every constructor normalizes, so
//! structural equality is a (sound, incomplete) equality test; the decision
//! procedure for zero lives in [`zero`].
//!
//! Normalization rules, applied on every product:
//! * equal atoms merge by adding exponents; zero exponents vanish;
//! * all `exp` atoms of a monomial fuse into one, and `exp(c·ln X)` becomes `X^c`;
//! * numeric radicals keep an exponent in `(0,1)`; the integral part moves
//!   into the coefficient;
//! * a multi-term base (a primitive sum with leading coefficient 1) keeps an
//!   exponent `< 1`; integral parts `≥ 1` are multiplied out.

mod canon;
mod coeff;
mod diff;
pub mod eval;
pub mod parse;
mod print;
mod subst;
pub mod zero;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Zero};

pub use coeff::Coeff;
pub use eval::{CompiledExpr, EvalError, FunctionProvider, GenericFunctions, NumericPoint};
pub use parse::{parse_expr, ParseError, SymbolTable};
pub use subst::{FunctionBinding, Substitution};
pub use zero::{is_zero, Decision};

/// Rational exponent of an atom.
pub type Exponent = Rational64;

pub fn ex(n: i64, d: i64) -> Exponent {
    Rational64::new(n, d)
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Coord {
    T,
    X1,
    X2,
    X3,
}

impl Coord {
    pub const ALL: [Coord; 4] = [Coord::T, Coord::X1, Coord::X2, Coord::X3];
    pub const SPACE: [Coord; 3] = [Coord::X1, Coord::X2, Coord::X3];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Coord {
        Coord::ALL[i]
    }

    /// Spatial coordinate `x_a` for `a ∈ {1,2,3}`.
    pub fn x(a: usize) -> Coord {
        Coord::ALL[a]
    }

    pub fn name(self) -> &'static str {
        match self {
            Coord::T => "t",
            Coord::X1 => "x1",
            Coord::X2 => "x2",
            Coord::X3 => "x3",
        }
    }

    pub fn from_name(s: &str) -> Option<Coord> {
        match s {
            "t" => Some(Coord::T),
            "x1" => Some(Coord::X1),
            "x2" => Some(Coord::X2),
            "x3" => Some(Coord::X3),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Elem {
    Sin,
    Cos,
    Tan,
    Tanh,
    Arctan,
}

impl Elem {
    pub fn name(self) -> &'static str {
        match self {
            Elem::Sin => "sin",
            Elem::Cos => "cos",
            Elem::Tan => "tan",
            Elem::Tanh => "tanh",
            Elem::Arctan => "arctan",
        }
    }

    pub fn from_name(s: &str) -> Option<Elem> {
        Some(match s {
            "sin" => Elem::Sin,
            "cos" => Elem::Cos,
            "tan" => Elem::Tan,
            "tanh" => Elem::Tanh,
            "arctan" => Elem::Arctan,
            _ => return None,
        })
    }

    fn is_odd(self) -> bool {
        !matches!(self, Elem::Cos)
    }
}

/// Application of an arbitrary (declared) function, possibly differentiated.
/// `deriv[k]` counts derivatives with respect to slot `k`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FnApp {
    pub name: Arc<str>,
    pub args: Vec<Expr>,
    pub deriv: Vec<u32>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    Coord(Coord),
    Param(Arc<str>),
    /// Positive integer (prime when factorable) under a fractional power.
    Radical(BigInt),
    /// Primitive multi-term sum (content removed, leading coefficient 1).
    Base(Expr),
    Exp(Expr),
    Ln(Expr),
    Elem(Elem, Expr),
    App(Arc<FnApp>),
}

/// Differentiation variable: a coordinate or a (slot) parameter.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    Coord(Coord),
    Param(Arc<str>),
}

impl From<Coord> for Var {
    fn from(c: Coord) -> Var {
        Var::Coord(c)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(pub(crate) Vec<(Atom, Exponent)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn factors(&self) -> &[(Atom, Exponent)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<BTreeMap<Monomial, Coeff>>);

impl std::fmt::Debug for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Expr({})", self)
    }
}

/// Accumulator for sums; drops cancelled terms.
#[derive(Default)]
pub(crate) struct SumBuilder(BTreeMap<Monomial, Coeff>);

impl SumBuilder {
    pub(crate) fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.0.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub(crate) fn add_expr(&mut self, e: &Expr) {
        for (m, c) in e.terms() {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub(crate) fn build(self) -> Expr {
        Expr(Arc::new(self.0))
    }
}

impl Expr {
    pub fn zero() -> Expr {
        Expr(Arc::new(BTreeMap::new()))
    }

    pub fn one() -> Expr {
        Expr::constant(Coeff::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Coeff::int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Expr {
        Expr::constant(Coeff::ratio(n, d))
    }

    /// The imaginary unit.
    pub fn i() -> Expr {
        Expr::constant(Coeff::i())
    }

    pub fn constant(c: Coeff) -> Expr {
        Expr::from_term(Monomial::one(), c)
    }

    pub(crate) fn from_term(m: Monomial, c: Coeff) -> Expr {
        let mut map = BTreeMap::new();
        if !c.is_zero() {
            map.insert(m, c);
        }
        Expr(Arc::new(map))
    }

    pub fn coord(c: Coord) -> Expr {
        Expr::from_term(Monomial(vec![(Atom::Coord(c), Exponent::one())]), Coeff::one())
    }

    pub fn t() -> Expr {
        Expr::coord(Coord::T)
    }

    /// Spatial coordinate `x_a`, `a ∈ {1,2,3}`.
    pub fn x(a: usize) -> Expr {
        Expr::coord(Coord::x(a))
    }

    pub fn param(name: &str) -> Expr {
        Expr::from_term(Monomial(vec![(Atom::Param(Arc::from(name)), Exponent::one())]), Coeff::one())
    }

    pub fn var(v: &Var) -> Expr {
        match v {
            Var::Coord(c) => Expr::coord(*c),
            Var::Param(p) => Expr::param(p),
        }
    }

    /// Single atom to the first power, normalized.
    pub fn from_atom(a: Atom) -> Expr {
        canon::normalize(Coeff::one(), vec![(a, Exponent::one())])
    }

    pub fn app(name: &str, args: Vec<Expr>) -> Expr {
        let n = args.len();
        Expr::app_deriv(name, args, vec![0; n])
    }

    pub fn app_deriv(name: &str, args: Vec<Expr>, deriv: Vec<u32>) -> Expr {
        assert_eq!(args.len(), deriv.len());
        Expr::from_atom(Atom::App(Arc::new(FnApp { name: Arc::from(name), args, deriv })))
    }

    pub fn exp(&self) -> Expr {
        canon::make_exp(self)
    }

    /// Natural logarithm. Panics on an exact zero argument.
    pub fn ln(&self) -> Expr {
        canon::make_ln(self)
    }

    pub fn sqrt(&self) -> Expr {
        self.pow(ex(1, 2))
    }

    pub fn elem(&self, f: Elem) -> Expr {
        canon::make_elem(f, self)
    }

    pub fn sin(&self) -> Expr {
        self.elem(Elem::Sin)
    }

    pub fn cos(&self) -> Expr {
        self.elem(Elem::Cos)
    }

    pub fn tan(&self) -> Expr {
        self.elem(Elem::Tan)
    }

    pub fn tanh(&self) -> Expr {
        self.elem(Elem::Tanh)
    }

    pub fn arctan(&self) -> Expr {
        self.elem(Elem::Arctan)
    }

    /// Rational power. Panics on `0^q` with `q ≤ 0`; see [`Expr::try_pow`].
    pub fn pow(&self, q: Exponent) -> Expr {
        canon::pow(self, q)
    }

    pub fn powi(&self, k: i64) -> Expr {
        self.pow(Exponent::from_integer(k))
    }

    pub fn try_pow(&self, q: Exponent) -> Option<Expr> {
        if self.is_zero() && q <= Exponent::zero() {
            None
        } else {
            Some(self.pow(q))
        }
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn try_div(&self, d: &Expr) -> Option<Expr> {
        d.try_pow(-Exponent::one()).map(|r| self * &r)
    }

    pub fn scale(&self, c: &Coeff) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        let map = self.terms().map(|(m, k)| (m.clone(), k * c)).collect();
        Expr(Arc::new(map))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.0.iter()
    }

    pub fn term_count(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_number().is_some_and(|c| c.is_one())
    }

    /// `Some(c)` when the expression is a pure Gaussian rational.
    pub fn as_number(&self) -> Option<Coeff> {
        match self.0.len() {
            0 => Some(Coeff::zero()),
            1 => {
                let (m, c) = self.0.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// `Some((c, m))` for a single-term expression.
    pub fn as_single_term(&self) -> Option<(&Monomial, &Coeff)> {
        if self.0.len() == 1 {
            self.0.iter().next()
        } else {
            None
        }
    }

    pub fn as_coord(&self) -> Option<Coord> {
        let (m, c) = self.as_single_term()?;
        match m.0.as_slice() {
            [(Atom::Coord(x), e)] if e.is_one() && c.is_one() => Some(*x),
            _ => None,
        }
    }

    pub fn as_param(&self) -> Option<&str> {
        let (m, c) = self.as_single_term()?;
        match m.0.as_slice() {
            [(Atom::Param(p), e)] if e.is_one() && c.is_one() => Some(p),
            _ => None,
        }
    }

    /// Leading (first in canonical order) coefficient; zero for the zero expression.
    pub fn leading_coeff(&self) -> Coeff {
        self.0.values().next().cloned().unwrap_or_else(Coeff::zero)
    }

    /// Whether `v` occurs anywhere, including inside function arguments.
    pub fn depends_on(&self, v: &Var) -> bool {
        self.terms().any(|(m, _)| m.0.iter().any(|(a, _)| a.depends_on(v)))
    }

    pub fn depends_on_coord(&self, c: Coord) -> bool {
        self.depends_on(&Var::Coord(c))
    }

    /// Free of all coordinates (may still contain parameters).
    pub fn is_coordinate_free(&self) -> bool {
        Coord::ALL.iter().all(|c| !self.depends_on_coord(*c))
    }

    /// Parameters occurring anywhere in the expression.
    pub fn params(&self) -> std::collections::BTreeSet<Arc<str>> {
        let mut out = std::collections::BTreeSet::new();
        self.visit_atoms(&mut |a| {
            if let Atom::Param(p) = a {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Names of applied arbitrary functions.
    pub fn functions(&self) -> std::collections::BTreeSet<Arc<str>> {
        let mut out = std::collections::BTreeSet::new();
        self.visit_atoms(&mut |a| {
            if let Atom::App(f) = a {
                out.insert(f.name.clone());
            }
        });
        out
    }

    /// Pre-order traversal of every atom, recursing into nested expressions.
    pub fn visit_atoms(&self, f: &mut dyn FnMut(&Atom)) {
        for (m, _) in self.terms() {
            for (a, _) in &m.0 {
                f(a);
                match a {
                    Atom::Base(e) | Atom::Exp(e) | Atom::Ln(e) | Atom::Elem(_, e) => e.visit_atoms(f),
                    Atom::App(app) => app.args.iter().for_each(|e| e.visit_atoms(f)),
                    _ => {}
                }
            }
        }
    }

    /// Rebuild bottom-up, replacing every atom by `f(atom with rebuilt
    /// children)`. Normalization is re-applied throughout.
    pub fn map_atoms(&self, f: &mut dyn FnMut(&Atom) -> Option<Expr>) -> Expr {
        let mut acc = SumBuilder::default();
        for (m, c) in self.terms() {
            let mut term = Expr::constant(c.clone());
            for (a, e) in &m.0 {
                let rebuilt = a.map_children(f);
                let base = f(&rebuilt).unwrap_or_else(|| rebuilt.to_expr());
                term = &term * &base.pow(*e);
            }
            acc.add_expr(&term);
        }
        acc.build()
    }

    /// Full re-normalization from the leaves up.
    pub fn canonicalize(&self) -> Expr {
        self.map_atoms(&mut |_| None)
    }

    /// Split every term into (coordinate-free factor, coordinate-dependent
    /// monomial); used to read off constant coefficients.
    pub fn split_constant_factors(&self) -> Vec<(Monomial, Expr)> {
        let mut groups: BTreeMap<Monomial, SumBuilder> = BTreeMap::new();
        for (m, c) in self.terms() {
            let (mut konst, mut var) = (Vec::new(), Vec::new());
            for (a, e) in &m.0 {
                if Coord::ALL.iter().any(|x| a.depends_on(&Var::Coord(*x))) {
                    var.push((a.clone(), *e));
                } else {
                    konst.push((a.clone(), *e));
                }
            }
            groups.entry(Monomial(var)).or_default().add_term(Monomial(konst), c.clone());
        }
        groups.into_iter().map(|(m, s)| (m, s.build())).collect()
    }
}

impl Atom {
    pub fn depends_on(&self, v: &Var) -> bool {
        match (self, v) {
            (Atom::Coord(c), Var::Coord(w)) => c == w,
            (Atom::Param(p), Var::Param(q)) => p == q,
            (Atom::Coord(_), _) | (Atom::Param(_), _) | (Atom::Radical(_), _) => false,
            (Atom::Base(e), _) | (Atom::Exp(e), _) | (Atom::Ln(e), _) | (Atom::Elem(_, e), _) => e.depends_on(v),
            (Atom::App(f), _) => f.args.iter().any(|a| a.depends_on(v)),
        }
    }

    fn map_children(&self, f: &mut dyn FnMut(&Atom) -> Option<Expr>) -> Atom {
        match self {
            Atom::Base(e) => Atom::Base(e.map_atoms(f)),
            Atom::Exp(e) => Atom::Exp(e.map_atoms(f)),
            Atom::Ln(e) => Atom::Ln(e.map_atoms(f)),
            Atom::Elem(k, e) => Atom::Elem(*k, e.map_atoms(f)),
            Atom::App(app) => Atom::App(Arc::new(FnApp {
                name: app.name.clone(),
                args: app.args.iter().map(|a| a.map_atoms(f)).collect(),
                deriv: app.deriv.clone(),
            })),
            other => other.clone(),
        }
    }

    /// Value of the atom as an expression, re-normalized (children of
    /// `Base`, `Exp`, `Ln`, `Elem` may need re-canonicalization after edits).
    pub fn to_expr(&self) -> Expr {
        match self {
            Atom::Base(e) => e.clone(),
            Atom::Exp(e) => e.exp(),
            Atom::Ln(e) => e.ln(),
            Atom::Elem(k, e) => e.elem(*k),
            other => Expr::from_atom(other.clone()),
        }
    }
}

mod ops {
    use super::*;
    use std::ops::{Add, Div, Mul, Neg, Sub};

    impl<'a> Add<&'a Expr> for &'a Expr {
        type Output = Expr;
        fn add(self, o: &Expr) -> Expr {
            if self.is_zero() {
                return o.clone();
            }
            if o.is_zero() {
                return self.clone();
            }
            let mut acc = SumBuilder((*self.0).clone());
            acc.add_expr(o);
            acc.build()
        }
    }

    impl<'a> Sub<&'a Expr> for &'a Expr {
        type Output = Expr;
        fn sub(self, o: &Expr) -> Expr {
            self + &(-o)
        }
    }

    impl Neg for &Expr {
        type Output = Expr;
        fn neg(self) -> Expr {
            self.scale(&Coeff::int(-1))
        }
    }

    impl Neg for Expr {
        type Output = Expr;
        fn neg(self) -> Expr {
            -&self
        }
    }

    impl<'a> Mul<&'a Expr> for &'a Expr {
        type Output = Expr;
        fn mul(self, o: &Expr) -> Expr {
            canon::mul(self, o)
        }
    }

    impl<'a> Div<&'a Expr> for &'a Expr {
        type Output = Expr;
        /// Panics on an exactly-zero divisor.
        fn div(self, o: &Expr) -> Expr {
            self * &o.recip()
        }
    }

    macro_rules! owned {
        ($tr:ident, $m:ident) => {
            impl $tr<Expr> for Expr {
                type Output = Expr;
                fn $m(self, o: Expr) -> Expr {
                    (&self).$m(&o)
                }
            }
            impl<'a> $tr<&'a Expr> for Expr {
                type Output = Expr;
                fn $m(self, o: &Expr) -> Expr {
                    (&self).$m(o)
                }
            }
            impl<'a> $tr<Expr> for &'a Expr {
                type Output = Expr;
                fn $m(self, o: Expr) -> Expr {
                    self.$m(&o)
                }
            }
        };
    }
    owned!(Add, add);
    owned!(Sub, sub);
    owned!(Mul, mul);
    owned!(Div, div);

    impl std::iter::Sum for Expr {
        fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
            let mut acc = SumBuilder::default();
            for e in iter {
                acc.add_expr(&e);
            }
            acc.build()
        }
    }

    impl std::iter::Product for Expr {
        fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
            iter.fold(Expr::one(), |a, b| a * b)
        }
    }

    impl From<i64> for Expr {
        fn from(n: i64) -> Expr {
            Expr::int(n)
        }
    }

    impl From<Coeff> for Expr {
        fn from(c: Coeff) -> Expr {
            Expr::constant(c)
        }
    }
}

/// Frequently used composite expressions.
pub mod named {
    use super::*;

    /// `x1² + x2² + x3²`.
    pub fn r2() -> Expr {
        (1..=3).map(|a| Expr::x(a).powi(2)).sum()
    }

    /// `x1² + x2²`.
    pub fn rt2() -> Expr {
        (1..=2).map(|a| Expr::x(a).powi(2)).sum()
    }

    pub fn r() -> Expr {
        r2().sqrt()
    }

    pub fn rt() -> Expr {
        rt2().sqrt()
    }

    /// Logarithmic cylindrical radius `ln r̃`.
    pub fn rho() -> Expr {
        rt().ln()
    }

    pub fn phi() -> Expr {
        (Expr::x(2) / Expr::x(1)).arctan()
    }

    pub fn theta() -> Expr {
        (rt() / Expr::x(3)).arctan()
    }
}

#[cfg(test)]
mod tests;
