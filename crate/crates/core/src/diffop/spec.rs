//! Operator expressions such as `Bp3(omega) - exp(omega*t)*F(x1,x2)` or
//! `D + alpha*L3`.
//!
//! The expression grammar is reused; every subterm lowers either to a scalar
//! (multiplication operator) or to a differential operator.  Scalar·op is
//! left multiplication, op·scalar and op·op are compositions, and op + scalar
//! adds a multiple of the identity.  Declared parameters and functions shadow
//! generator names.

use thiserror::Error;

use crate::expr::parse::{lower_expr, parse_ast, resolve_call, resolve_ident, Ast, AstKind};
use crate::expr::{Coord, Exponent, Expr, ParseError, SymbolTable};

use super::generators::{family_arity, generator, generator_family};
use super::{DiffOperator, OperatorError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorSpecError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("at {pos}: {msg}")]
    Invalid { pos: usize, msg: String },
}

enum Value {
    Scalar(Expr),
    Op(DiffOperator),
}

impl Value {
    fn into_op(self) -> DiffOperator {
        match self {
            Value::Scalar(e) => DiffOperator::scalar(e),
            Value::Op(o) => o,
        }
    }
}

/// Parse an operator expression.
pub fn parse_operator(src: &str, table: &SymbolTable) -> Result<DiffOperator, OperatorSpecError> {
    Ok(lower(&parse_ast(src)?, table)?.into_op())
}

fn invalid(pos: usize, msg: impl Into<String>) -> OperatorSpecError {
    OperatorSpecError::Invalid { pos, msg: msg.into() }
}

fn scalar_of(v: Value, pos: usize, what: &str) -> Result<Expr, OperatorSpecError> {
    match v {
        Value::Scalar(e) => Ok(e),
        Value::Op(_) => Err(invalid(pos, format!("{} needs a scalar, found an operator", what))),
    }
}

fn lower(ast: &Ast, table: &SymbolTable) -> Result<Value, OperatorSpecError> {
    let pos = ast.pos;
    Ok(match &ast.kind {
        AstKind::Num(_) | AstKind::Deriv(..) => Value::Scalar(lower_expr(ast, table)?),
        AstKind::Ident(name) => {
            let shadowed = table.is_param(name) || Coord::from_name(name).is_some() || name == "i";
            match generator(name).filter(|_| !shadowed) {
                Some(op) => Value::Op(op),
                None => Value::Scalar(resolve_ident(name, pos, table)?),
            }
        }
        AstKind::Call(name, raw) => {
            if name == "comm" {
                if raw.len() != 2 {
                    return Err(ParseError::Arity { pos, name: name.clone(), expected: 2, found: raw.len() }.into());
                }
                let a = lower(&raw[0], table)?.into_op();
                let b = lower(&raw[1], table)?.into_op();
                return Ok(Value::Op(a.commutator(&b)?));
            }
            let args = raw
                .iter()
                .map(|a| scalar_of(lower(a, table)?, a.pos, "a function argument"))
                .collect::<Result<Vec<_>, _>>()?;
            if table.arity(name).is_none() {
                if let Some(arity) = family_arity(name) {
                    if args.len() != arity {
                        return Err(
                            ParseError::Arity { pos, name: name.clone(), expected: arity, found: args.len() }.into()
                        );
                    }
                    let op = generator_family(name, &args)
                        .ok_or_else(|| invalid(pos, format!("bad generator `{}`", name)))?;
                    return Ok(Value::Op(op));
                }
            }
            Value::Scalar(resolve_call(name, pos, args, raw, table)?)
        }
        AstKind::Neg(a) => match lower(a, table)? {
            Value::Scalar(e) => Value::Scalar(-e),
            Value::Op(o) => Value::Op(o.neg()),
        },
        AstKind::Add(a, b) | AstKind::Sub(a, b) => {
            let (x, y) = (lower(a, table)?, lower(b, table)?);
            let minus = matches!(ast.kind, AstKind::Sub(..));
            match (x, y) {
                (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(if minus { x - y } else { x + y }),
                (x, y) => {
                    let (x, y) = (x.into_op(), y.into_op());
                    Value::Op(if minus { x.sub(&y) } else { x.add(&y) })
                }
            }
        }
        AstKind::Mul(a, b) => match (lower(a, table)?, lower(b, table)?) {
            (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(x * y),
            (Value::Scalar(x), Value::Op(y)) => Value::Op(y.scale(&x)),
            (Value::Op(x), Value::Scalar(y)) => Value::Op(x.then_scalar(&y)),
            (Value::Op(x), Value::Op(y)) => Value::Op(x.compose(&y)?),
        },
        AstKind::Div(a, b) => {
            let d = scalar_of(lower(b, table)?, b.pos, "a divisor")?;
            if d.is_zero() {
                return Err(ParseError::DivisionByZero { pos }.into());
            }
            match lower(a, table)? {
                Value::Scalar(x) => Value::Scalar(x / d),
                Value::Op(x) => Value::Op(x.then_scalar(&d.recip())),
            }
        }
        AstKind::Pow(a, q) => match lower(a, table)? {
            Value::Scalar(_) => Value::Scalar(lower_expr(ast, table)?),
            Value::Op(o) => {
                if !q.is_integer() || *q < Exponent::from_integer(0) {
                    return Err(invalid(pos, "operators take non-negative integer powers only"));
                }
                let mut acc = DiffOperator::identity();
                for _ in 0..q.to_integer() {
                    acc = acc.compose(&o)?;
                }
                Value::Op(acc)
            }
        },
    })
}
