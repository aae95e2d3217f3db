//! Simultaneous substitution of coordinates, parameters and arbitrary
//! functions.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::parse::{parse_expr, ParseError, SymbolTable};
use super::{Atom, Coord, Expr, Var};

/// Concrete body for an arbitrary function; slot `k` is the parameter `_k`
/// (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionBinding {
    pub arity: usize,
    pub body: Expr,
}

impl FunctionBinding {
    pub fn slot_name(k: usize) -> String {
        format!("_{}", k)
    }

    /// Parse a body such as `sin(_1) + _2^2/3`.
    pub fn parse(body: &str, arity: usize, table: &SymbolTable) -> Result<Self, ParseError> {
        let mut t = table.clone();
        for k in 1..=arity {
            t = t.with_param(&Self::slot_name(k));
        }
        Ok(FunctionBinding { arity, body: parse_expr(body, &t)? })
    }

    /// `∂^deriv body` evaluated at `args`.
    pub fn instantiate(&self, args: &[Expr], deriv: &[u32]) -> Expr {
        let mut b = self.body.clone();
        for (k, n) in deriv.iter().enumerate() {
            let v = Var::Param(Arc::from(Self::slot_name(k + 1).as_str()));
            for _ in 0..*n {
                b = b.diff(&v);
            }
        }
        let mut s = Substitution::default();
        for (k, a) in args.iter().enumerate() {
            s.params.insert(Self::slot_name(k + 1), a.clone());
        }
        b.substitute(&s)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Substitution {
    pub coords: BTreeMap<Coord, Expr>,
    pub params: BTreeMap<String, Expr>,
    pub functions: BTreeMap<String, FunctionBinding>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn coord(mut self, c: Coord, e: Expr) -> Self {
        self.coords.insert(c, e);
        self
    }

    pub fn param(mut self, p: &str, e: Expr) -> Self {
        self.params.insert(p.to_string(), e);
        self
    }

    pub fn function(mut self, name: &str, b: FunctionBinding) -> Self {
        self.functions.insert(name.to_string(), b);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty() && self.params.is_empty() && self.functions.is_empty()
    }
}

impl Expr {
    /// Simultaneous substitution; the result is re-canonicalized.
    pub fn substitute(&self, s: &Substitution) -> Expr {
        if s.is_empty() {
            return self.clone();
        }
        self.map_atoms(&mut |a| match a {
            Atom::Coord(c) => s.coords.get(c).cloned(),
            Atom::Param(p) => s.params.get(&**p).cloned(),
            Atom::App(app) => s.functions.get(&*app.name).map(|b| b.instantiate(&app.args, &app.deriv)),
            _ => None,
        })
    }

    pub fn subs_coord(&self, c: Coord, v: &Expr) -> Expr {
        self.substitute(&Substitution::new().coord(c, v.clone()))
    }

    pub fn subs_param(&self, p: &str, v: &Expr) -> Expr {
        self.substitute(&Substitution::new().param(p, v.clone()))
    }
}
