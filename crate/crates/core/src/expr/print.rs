//! Parseable text rendering; `parse(print(e)) == e` for every canonical `e`.

use std::fmt;

use num_traits::One;

use super::{Atom, Exponent, Expr, FnApp};

fn write_exponent(f: &mut fmt::Formatter<'_>, e: Exponent) -> fmt::Result {
    if e.is_one() {
        Ok(())
    } else if e.is_integer() {
        write!(f, "^{}", e.numer())
    } else {
        write!(f, "^({}/{})", e.numer(), e.denom())
    }
}

impl fmt::Display for FnApp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.deriv.iter().any(|d| *d > 0) {
            write!(f, "D")?;
            for (slot, k) in self.deriv.iter().enumerate() {
                for _ in 0..*k {
                    write!(f, "{}", slot + 1)?;
                }
            }
            write!(f, "[{}]", self.name)?;
        } else {
            write!(f, "{}", self.name)?;
        }
        write!(f, "(")?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", a)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Coord(c) => write!(f, "{}", c.name()),
            Atom::Param(p) => write!(f, "{}", p),
            Atom::Radical(n) => write!(f, "{}", n),
            Atom::Base(s) => write!(f, "({})", s),
            Atom::Exp(u) => write!(f, "exp({})", u),
            Atom::Ln(u) => write!(f, "ln({})", u),
            Atom::Elem(k, u) => write!(f, "{}({})", k.name(), u),
            Atom::App(app) => write!(f, "{}", app),
        }
    }
}

fn term_string(m: &super::Monomial, c: &super::Coeff) -> String {
    let factors: Vec<String> = m
        .factors()
        .iter()
        .map(|(a, e)| {
            let s = a.to_string();
            let needs_parens = matches!(a, Atom::Base(_)) || !e.is_one() && s.starts_with('-');
            let mut out = if needs_parens && !s.starts_with('(') { format!("({})", s) } else { s };
            if !e.is_one() {
                out.push_str(&ExponentDisplay(*e).to_string());
            }
            out
        })
        .collect();
    let body = factors.join("*");
    if m.is_one() {
        return c.to_string();
    }
    if c.is_one() {
        body
    } else if (-c.clone()).is_one() {
        format!("-{}", body)
    } else {
        format!("{}*{}", c, body)
    }
}

struct ExponentDisplay(Exponent);

impl fmt::Display for ExponentDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_exponent(f, self.0)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            let s = term_string(m, c);
            if i == 0 {
                write!(f, "{}", s)?;
            } else if let Some(rest) = s.strip_prefix('-') {
                write!(f, " - {}", rest)?;
            } else {
                write!(f, " + {}", s)?;
            }
        }
        Ok(())
    }
}
