//! Exact partial differentiation.

use std::sync::Arc;

use num_traits::One;

use super::canon::normalize;
use super::{Atom, Coeff, Coord, Elem, Exponent, Expr, FnApp, SumBuilder, Var};

impl Expr {
    /// `∂/∂v`. Arbitrary-function applications differentiate by the chain
    /// rule into slot derivatives.
    pub fn diff(&self, v: &Var) -> Expr {
        let mut acc = SumBuilder::default();
        for (m, c) in self.terms() {
            for (k, (a, e)) in m.0.iter().enumerate() {
                if !a.depends_on(v) {
                    continue;
                }
                let da = a.diff(v);
                if da.is_zero() {
                    continue;
                }
                let mut factors = m.0.clone();
                factors[k].1 = *e - Exponent::one();
                let rest = normalize(c * &Coeff::ratio(*e.numer(), *e.denom()), factors);
                acc.add_expr(&(&rest * &da));
            }
        }
        acc.build()
    }

    pub fn d(&self, c: Coord) -> Expr {
        self.diff(&Var::Coord(c))
    }

    /// Mixed partial `∂_t^{m0} ∂_1^{m1} ∂_2^{m2} ∂_3^{m3}`.
    pub fn d_multi(&self, m: [u8; 4]) -> Expr {
        let mut e = self.clone();
        for (i, k) in m.iter().enumerate() {
            for _ in 0..*k {
                if e.is_zero() {
                    return e;
                }
                e = e.d(Coord::from_index(i));
            }
        }
        e
    }
}

impl Atom {
    /// Derivative of the atom itself (exponent 1).
    pub fn diff(&self, v: &Var) -> Expr {
        match self {
            Atom::Coord(c) => match v {
                Var::Coord(w) if w == c => Expr::one(),
                _ => Expr::zero(),
            },
            Atom::Param(p) => match v {
                Var::Param(q) if q == p => Expr::one(),
                _ => Expr::zero(),
            },
            Atom::Radical(_) => Expr::zero(),
            Atom::Base(s) => s.diff(v),
            Atom::Exp(u) => {
                let du = u.diff(v);
                if du.is_zero() {
                    return du;
                }
                let e = Expr::from_term(super::Monomial(vec![(self.clone(), Exponent::one())]), Coeff::one());
                &e * &du
            }
            Atom::Ln(u) => &u.diff(v) * &u.recip(),
            Atom::Elem(f, u) => {
                let du = u.diff(v);
                if du.is_zero() {
                    return du;
                }
                let outer = match f {
                    Elem::Sin => u.cos(),
                    Elem::Cos => -u.sin(),
                    Elem::Tan => &Expr::one() + &u.tan().powi(2),
                    Elem::Tanh => &Expr::one() - &u.tanh().powi(2),
                    Elem::Arctan => (&Expr::one() + &u.powi(2)).recip(),
                };
                &outer * &du
            }
            Atom::App(app) => {
                let mut acc = SumBuilder::default();
                for (k, arg) in app.args.iter().enumerate() {
                    let da = arg.diff(v);
                    if da.is_zero() {
                        continue;
                    }
                    let mut deriv = app.deriv.clone();
                    deriv[k] += 1;
                    let f = Expr::from_atom(Atom::App(Arc::new(FnApp {
                        name: app.name.clone(),
                        args: app.args.clone(),
                        deriv,
                    })));
                    acc.add_expr(&(&f * &da));
                }
                acc.build()
            }
        }
    }
}
