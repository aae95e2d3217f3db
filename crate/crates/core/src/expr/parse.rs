//! Text grammar for expressions.
//!
//! ```text
//! sum     := ['+'|'-'] product (('+'|'-') product)*
//! product := unary (('*'|'/') unary)*
//! unary   := '-' unary | power
//! power   := atom ['^' exponent]
//! exponent:= ['-'] INT | '(' ['-'] INT ['/' INT] ')'
//! atom    := NUMBER | IDENT | IDENT '(' args ')' | 'D' DIGITS '[' IDENT ']' '(' args ')'
//!          | '(' sum ')'
//! ```
//!
//! `D112[F](u, v)` is `∂_u∂_u∂_v F` evaluated at `(u, v)`.  Identifiers must
//! be coordinates (`t x1 x2 x3`), the imaginary unit `i`, a built-in macro
//! (`r rt rho phi theta`), or a declared parameter; function names must be
//! elementary (`exp ln sqrt sin cos tan tanh arctan`), the derivative
//! helper `diff(expr, x_k)`, or declared with an arity.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use super::{named, Coeff, Coord, Elem, Exponent, Expr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character {ch:?} at offset {pos}")]
    UnexpectedChar { pos: usize, ch: char },
    #[error("expected {expected} at offset {pos}, found {found}")]
    Unexpected { pos: usize, expected: String, found: String },
    #[error("unexpected end of input, expected {expected}")]
    UnexpectedEnd { expected: String },
    #[error("unknown identifier `{name}` at offset {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("unknown function `{name}` at offset {pos}")]
    UnknownFunction { pos: usize, name: String },
    #[error("function `{name}` takes {expected} argument(s), {found} given (offset {pos})")]
    Arity { pos: usize, name: String, expected: usize, found: usize },
    #[error("derivative slot {slot} out of range for `{name}` (offset {pos})")]
    BadSlot { pos: usize, name: String, slot: usize },
    #[error("division by zero at offset {pos}")]
    DivisionByZero { pos: usize },
    #[error("logarithm of zero at offset {pos}")]
    LogOfZero { pos: usize },
    #[error("exponent must be rational, at offset {pos}")]
    BadExponent { pos: usize },
    #[error("`{name}` at offset {pos} is {what}")]
    Misplaced { pos: usize, name: String, what: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Deriv(Vec<usize>),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == '.') {
                i += 1;
            }
            let text: String = bytes[start..i].iter().collect();
            out.push((Tok::Num(decimal(&text).ok_or(ParseError::UnexpectedChar { pos: start, ch: '.' })?), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                i += 1;
            }
            let text: String = bytes[start..i].iter().collect();
            let is_deriv = text.len() > 1
                && text.starts_with('D')
                && text[1..].chars().all(|d| d.is_ascii_digit() && d != '0')
                && bytes.get(i) == Some(&'[');
            if is_deriv {
                let slots = text[1..].chars().map(|d| d.to_digit(10).unwrap() as usize).collect();
                out.push((Tok::Deriv(slots), start));
            } else {
                out.push((Tok::Ident(text), start));
            }
        } else if "+-*/^()[],".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(ParseError::UnexpectedChar { pos: i, ch: c });
        }
    }
    Ok(out)
}

fn decimal(text: &str) -> Option<BigRational> {
    match text.split_once('.') {
        None => BigInt::from_str(text).ok().map(BigRational::from_integer),
        Some((a, b)) => {
            if b.contains('.') {
                return None;
            }
            let digits = format!("{}{}", a, b);
            let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
            let d = num_traits::pow(BigInt::from(10), b.len());
            Some(BigRational::new(n, d))
        }
    }
}

/// Untyped syntax tree shared by the expression and operator front ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Ast {
    pub pos: usize,
    pub kind: AstKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AstKind {
    Num(BigRational),
    Ident(String),
    Call(String, Vec<Ast>),
    Deriv(Vec<usize>, String, Vec<Ast>),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, Exponent),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.1).unwrap_or(self.len)
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.is_sym(c) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{}`", c)))
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        match self.toks.get(self.at) {
            None => ParseError::UnexpectedEnd { expected: expected.into() },
            Some((t, pos)) => ParseError::Unexpected {
                pos: *pos,
                expected: expected.into(),
                found: match t {
                    Tok::Num(n) => n.to_string(),
                    Tok::Ident(s) => format!("`{}`", s),
                    Tok::Deriv(_) => "derivative marker".into(),
                    Tok::Sym(c) => format!("`{}`", c),
                },
            },
        }
    }

    fn sum(&mut self) -> Result<Ast, ParseError> {
        let pos = self.pos();
        let mut lhs = if self.is_sym('-') {
            self.at += 1;
            let p = self.product()?;
            Ast { pos, kind: AstKind::Neg(Box::new(p)) }
        } else {
            if self.is_sym('+') {
                self.at += 1;
            }
            self.product()?
        };
        loop {
            let pos = self.pos();
            if self.is_sym('+') {
                self.at += 1;
                let r = self.product()?;
                lhs = Ast { pos, kind: AstKind::Add(Box::new(lhs), Box::new(r)) };
            } else if self.is_sym('-') {
                self.at += 1;
                let r = self.product()?;
                lhs = Ast { pos, kind: AstKind::Sub(Box::new(lhs), Box::new(r)) };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.pos();
            if self.is_sym('*') {
                self.at += 1;
                let r = self.unary()?;
                lhs = Ast { pos, kind: AstKind::Mul(Box::new(lhs), Box::new(r)) };
            } else if self.is_sym('/') {
                self.at += 1;
                let r = self.unary()?;
                lhs = Ast { pos, kind: AstKind::Div(Box::new(lhs), Box::new(r)) };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        let pos = self.pos();
        if self.is_sym('-') {
            self.at += 1;
            let u = self.unary()?;
            return Ok(Ast { pos, kind: AstKind::Neg(Box::new(u)) });
        }
        let base = self.atom()?;
        if self.is_sym('^') {
            self.at += 1;
            let q = self.exponent()?;
            return Ok(Ast { pos, kind: AstKind::Pow(Box::new(base), q) });
        }
        Ok(base)
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Num(n)) if n.is_integer() => {
                let v = n.to_integer().to_i64().ok_or(ParseError::BadExponent { pos })?;
                self.at += 1;
                Ok(v)
            }
            Some(Tok::Num(_)) => Err(ParseError::BadExponent { pos }),
            _ => Err(self.unexpected("integer exponent")),
        }
    }

    fn exponent(&mut self) -> Result<Exponent, ParseError> {
        let pos = self.pos();
        if self.is_sym('(') {
            self.at += 1;
            let neg = self.is_sym('-');
            if neg {
                self.at += 1;
            }
            let n = self.int()?;
            let d = if self.is_sym('/') {
                self.at += 1;
                self.int()?
            } else {
                1
            };
            self.expect_sym(')')?;
            if d == 0 {
                return Err(ParseError::BadExponent { pos });
            }
            let q = Exponent::new(n, d);
            Ok(if neg { -q } else { q })
        } else {
            let neg = self.is_sym('-');
            if neg {
                self.at += 1;
            }
            let n = self.int()?;
            Ok(Exponent::from_integer(if neg { -n } else { n }))
        }
    }

    fn args(&mut self) -> Result<Vec<Ast>, ParseError> {
        self.expect_sym('(')?;
        let mut out = Vec::new();
        if self.is_sym(')') {
            self.at += 1;
            return Ok(out);
        }
        loop {
            out.push(self.sum()?);
            if self.is_sym(',') {
                self.at += 1;
            } else {
                self.expect_sym(')')?;
                return Ok(out);
            }
        }
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.at += 1;
                Ok(Ast { pos, kind: AstKind::Num(n) })
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if self.is_sym('(') {
                    let args = self.args()?;
                    Ok(Ast { pos, kind: AstKind::Call(name, args) })
                } else {
                    Ok(Ast { pos, kind: AstKind::Ident(name) })
                }
            }
            Some(Tok::Deriv(slots)) => {
                self.at += 1;
                self.expect_sym('[')?;
                let name = match self.peek().cloned() {
                    Some(Tok::Ident(n)) => {
                        self.at += 1;
                        n
                    }
                    _ => return Err(self.unexpected("function name")),
                };
                self.expect_sym(']')?;
                let args = self.args()?;
                Ok(Ast { pos, kind: AstKind::Deriv(slots, name, args) })
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let inner = self.sum()?;
                self.expect_sym(')')?;
                Ok(inner)
            }
            _ => Err(self.unexpected("operand")),
        }
    }
}

/// Parse text into a syntax tree without resolving names.
pub fn parse_ast(src: &str) -> Result<Ast, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0, len: src.chars().count() };
    let ast = p.sum()?;
    if p.at < p.toks.len() {
        return Err(p.unexpected("end of input"));
    }
    Ok(ast)
}

/// Declared parameters and functions (with arity).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    params: BTreeSet<String>,
    functions: BTreeMap<String, usize>,
}

pub const STANDARD_PARAMS: &[&str] = &[
    "e", "g", "omega", "omega1", "omega2", "omega3", "kappa", "kappa1", "kappa2", "kappa3", "mu", "nu", "alpha",
    "lambda", "pi",
];

pub const MACROS: &[&str] = &["r", "rt", "rho", "phi", "theta"];

impl SymbolTable {
    pub fn empty() -> Self {
        SymbolTable::default()
    }

    /// The standard parameter names, no functions.
    pub fn standard() -> Self {
        let mut t = SymbolTable::default();
        for p in STANDARD_PARAMS {
            t.params.insert((*p).to_string());
        }
        t
    }

    pub fn with_param(mut self, name: &str) -> Self {
        self.params.insert(name.to_string());
        self
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Self {
        self.functions.insert(name.to_string(), arity);
        self
    }

    /// Declare from a signature like `F/2`; a bare name means arity 1.
    pub fn declare(&mut self, signature: &str) -> Result<(), ParseError> {
        let (name, arity) = match signature.split_once('/') {
            Some((n, a)) => (n.trim(), a.trim().parse().map_err(|_| ParseError::BadExponent { pos: 0 })?),
            None => (signature.trim(), 1usize),
        };
        self.functions.insert(name.to_string(), arity);
        Ok(())
    }

    pub fn is_param(&self, name: &str) -> bool {
        self.params.contains(name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).copied()
    }

    pub fn params(&self) -> impl Iterator<Item = &str> {
        self.params.iter().map(|s| s.as_str())
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, usize)> {
        self.functions.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

pub fn macro_value(name: &str) -> Option<Expr> {
    Some(match name {
        "r" => named::r(),
        "rt" => named::rt(),
        "rho" => named::rho(),
        "phi" => named::phi(),
        "theta" => named::theta(),
        _ => return None,
    })
}

/// Resolve a bare identifier in expression context.
pub fn resolve_ident(name: &str, pos: usize, table: &SymbolTable) -> Result<Expr, ParseError> {
    if let Some(c) = Coord::from_name(name) {
        return Ok(Expr::coord(c));
    }
    if name == "i" {
        return Ok(Expr::i());
    }
    if table.is_param(name) {
        return Ok(Expr::param(name));
    }
    if let Some(m) = macro_value(name) {
        return Ok(m);
    }
    Err(ParseError::UnknownIdentifier { pos, name: name.to_string() })
}

/// Resolve a call whose arguments are already lowered.
pub fn resolve_call(
    name: &str,
    pos: usize,
    args: Vec<Expr>,
    raw: &[Ast],
    table: &SymbolTable,
) -> Result<Expr, ParseError> {
    let unary = |args: &Vec<Expr>| -> Result<Expr, ParseError> {
        if args.len() != 1 {
            return Err(ParseError::Arity { pos, name: name.to_string(), expected: 1, found: args.len() });
        }
        Ok(args[0].clone())
    };
    if let Some(arity) = table.arity(name) {
        if args.len() != arity {
            return Err(ParseError::Arity { pos, name: name.to_string(), expected: arity, found: args.len() });
        }
        return Ok(Expr::app(name, args));
    }
    match name {
        "exp" => Ok(unary(&args)?.exp()),
        "ln" | "log" => {
            let a = unary(&args)?;
            if a.is_zero() {
                return Err(ParseError::LogOfZero { pos });
            }
            Ok(a.ln())
        }
        "sqrt" => Ok(unary(&args)?.sqrt()),
        "diff" => {
            if args.len() != 2 {
                return Err(ParseError::Arity { pos, name: name.into(), expected: 2, found: args.len() });
            }
            let c = match &raw[1].kind {
                AstKind::Ident(v) => Coord::from_name(v),
                _ => None,
            }
            .ok_or_else(|| ParseError::Misplaced {
                pos: raw[1].pos,
                name: "diff".into(),
                what: "expecting a coordinate as second argument".into(),
            })?;
            Ok(args[0].d(c))
        }
        other => match Elem::from_name(other) {
            Some(f) => Ok(unary(&args)?.elem(f)),
            None => Err(ParseError::UnknownFunction { pos, name: name.to_string() }),
        },
    }
}

pub fn resolve_deriv(
    slots: &[usize],
    name: &str,
    pos: usize,
    args: Vec<Expr>,
    table: &SymbolTable,
) -> Result<Expr, ParseError> {
    let arity = table.arity(name).ok_or_else(|| ParseError::UnknownFunction { pos, name: name.to_string() })?;
    if args.len() != arity {
        return Err(ParseError::Arity { pos, name: name.to_string(), expected: arity, found: args.len() });
    }
    let mut deriv = vec![0u32; arity];
    for s in slots {
        if *s == 0 || *s > arity {
            return Err(ParseError::BadSlot { pos, name: name.to_string(), slot: *s });
        }
        deriv[s - 1] += 1;
    }
    Ok(Expr::app_deriv(name, args, deriv))
}

pub fn lower_expr(ast: &Ast, table: &SymbolTable) -> Result<Expr, ParseError> {
    let pos = ast.pos;
    Ok(match &ast.kind {
        AstKind::Num(n) => Expr::constant(Coeff::real(n.clone())),
        AstKind::Ident(name) => resolve_ident(name, pos, table)?,
        AstKind::Call(name, raw) => {
            let args = raw.iter().map(|a| lower_expr(a, table)).collect::<Result<Vec<_>, _>>()?;
            resolve_call(name, pos, args, raw, table)?
        }
        AstKind::Deriv(slots, name, raw) => {
            let args = raw.iter().map(|a| lower_expr(a, table)).collect::<Result<Vec<_>, _>>()?;
            resolve_deriv(slots, name, pos, args, table)?
        }
        AstKind::Neg(a) => -lower_expr(a, table)?,
        AstKind::Add(a, b) => lower_expr(a, table)? + lower_expr(b, table)?,
        AstKind::Sub(a, b) => lower_expr(a, table)? - lower_expr(b, table)?,
        AstKind::Mul(a, b) => lower_expr(a, table)? * lower_expr(b, table)?,
        AstKind::Div(a, b) => {
            let d = lower_expr(b, table)?;
            if d.is_zero() {
                return Err(ParseError::DivisionByZero { pos });
            }
            lower_expr(a, table)? / d
        }
        AstKind::Pow(a, q) => {
            let base = lower_expr(a, table)?;
            if base.is_zero() && *q <= Exponent::zero() {
                return Err(ParseError::DivisionByZero { pos });
            }
            base.pow(*q)
        }
    })
}

/// Parse and canonicalize an expression.
pub fn parse_expr(src: &str, table: &SymbolTable) -> Result<Expr, ParseError> {
    lower_expr(&parse_ast(src)?, table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> SymbolTable {
        SymbolTable::standard().with_function("F", 2)
    }

    #[test]
    fn precedence_and_unary_minus() {
        let e = parse_expr("-x1^2 + 2*x1*x2/x2", &t()).unwrap();
        let want = -Expr::x(1).powi(2) + Expr::int(2) * Expr::x(1);
        assert_eq!(e, want);
    }

    #[test]
    fn derivative_marker() {
        let e = parse_expr("D112[F](x1, t)", &t()).unwrap();
        assert_eq!(e, Expr::app_deriv("F", vec![Expr::x(1), Expr::t()], vec![2, 1]));
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(parse_expr("x1 + y", &t()), Err(ParseError::UnknownIdentifier { pos: 5, .. })));
        assert!(matches!(parse_expr("F(x1)", &t()), Err(ParseError::Arity { expected: 2, found: 1, .. })));
        assert!(matches!(parse_expr("x1/(x2-x2)", &t()), Err(ParseError::DivisionByZero { .. })));
        assert!(matches!(parse_expr("D3[F](x1,x2)", &t()), Err(ParseError::BadSlot { slot: 3, .. })));
        assert!(matches!(parse_expr("(x1", &t()), Err(ParseError::UnexpectedEnd { .. })));
        assert!(matches!(parse_expr("x1 $", &t()), Err(ParseError::UnexpectedChar { ch: '$', .. })));
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_expr("0.25", &t()).unwrap(), Expr::ratio(1, 4));
    }
}
