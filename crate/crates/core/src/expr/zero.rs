//! Zero decision: exact normal form first, numeric witness second.
//!
//! The symbolic phase rewrites circular and hyperbolic functions as
//! exponentials, clears every denominator atom and tests the resulting
//! numerator for syntactic emptiness. Only that phase can answer `Zero`.
//! Failing it, the expression is sampled at fixed generic points; a value
//! clearly away from zero (relative to the magnitude of its terms) answers
//! `NonZero` with a witness, anything else `Unknown`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use super::canon::normalize;
use super::eval::{CompiledExpr, GenericFunctions, NumericPoint};
use super::{Atom, Coeff, Elem, Exponent, Expr};

/// Relative magnitude above which a sampled value witnesses non-vanishing.
pub const NONZERO_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Zero,
    NonZero,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct ZeroTest {
    pub decision: Decision,
    /// Sample point and value establishing `NonZero`.
    pub witness: Option<(NumericPoint, Complex64)>,
}

pub fn is_zero(e: &Expr) -> Decision {
    zero_test(e).decision
}

/// Rewrite `sin cos tan tanh` through exponentials.
pub fn trig_to_exp(e: &Expr) -> Expr {
    let i = Expr::i();
    e.map_atoms(&mut |a| match a {
        Atom::Elem(k, u) => {
            let (p, m) = match k {
                Elem::Tanh => (u.exp(), (-u).exp()),
                Elem::Arctan => return None,
                _ => ((&i * u).exp(), (-(&i * u)).exp()),
            };
            Some(match k {
                Elem::Sin => (&p - &m) * Expr::constant(Coeff::i().recip() * Coeff::ratio(1, 2)),
                Elem::Cos => (&p + &m) * Expr::ratio(1, 2),
                Elem::Tan => -&i * (&p - &m) / (&p + &m),
                Elem::Tanh => (&p - &m) / (&p + &m),
                Elem::Arctan => unreachable!(),
            })
        }
        _ => None,
    })
}

/// Multiply by the least common denominator of all negative-power atoms.
pub fn clear_denominators(e: &Expr) -> Expr {
    let mut mins: BTreeMap<Atom, Exponent> = BTreeMap::new();
    for (m, _) in e.terms() {
        for (a, x) in m.factors() {
            if *x < Exponent::zero() && !matches!(a, Atom::Exp(_)) {
                let entry = mins.entry(a.clone()).or_insert(*x);
                if *x < *entry {
                    *entry = *x;
                }
            }
        }
    }
    if mins.is_empty() {
        return e.clone();
    }
    let lcd: Vec<(Atom, Exponent)> = mins.into_iter().map(|(a, x)| (a, -x)).collect();
    // Multiply monomial-wise so that `S^-1 · S` cancels before any expansion.
    let mut acc = super::SumBuilder::default();
    for (m, c) in e.terms() {
        let mut f = m.factors().to_vec();
        f.extend(lcd.iter().cloned());
        acc.add_expr(&normalize(c.clone(), f));
    }
    acc.build()
}

/// Exact numerator normal form; empty iff the symbolic phase proves zero.
pub fn numerator(e: &Expr) -> Expr {
    clear_denominators(&trig_to_exp(e))
}

/// Deterministic generic sample points (coordinates away from the usual
/// singular loci, parameters at name-hashed values).
pub fn sample_points(e: &Expr, n: usize) -> Vec<NumericPoint> {
    const BASE: [[f64; 4]; 8] = [
        [0.3125, 0.71875, 1.171875, 0.578125],
        [0.84375, -0.453125, 0.640625, 1.296875],
        [1.40625, 1.109375, -0.828125, 0.921875],
        [0.546875, 0.390625, 0.953125, -0.703125],
        [1.15625, -1.234375, -0.515625, 0.484375],
        [0.6875, 0.828125, 0.296875, 1.453125],
        [1.71875, 0.609375, 1.390625, 0.765625],
        [0.21875, -0.890625, 0.734375, -1.140625],
    ];
    let params: Vec<String> = e.params().iter().map(|p| p.to_string()).collect();
    BASE.iter()
        .take(n)
        .enumerate()
        .map(|(k, c)| {
            let mut p = NumericPoint::new(c[0], [c[1], c[2], c[3]]);
            for name in &params {
                let h = name.bytes().fold(7u64 + k as u64 * 31, |h, b| h.wrapping_mul(131).wrapping_add(b as u64));
                let v = if name == "pi" { std::f64::consts::PI } else { 0.55 + (h % 997) as f64 / 997.0 };
                p.params.insert(name.clone(), Complex64::new(v, 0.0));
            }
            p
        })
        .collect()
}

pub fn zero_test(e: &Expr) -> ZeroTest {
    if e.is_zero() || numerator(e).is_zero() {
        return ZeroTest { decision: Decision::Zero, witness: None };
    }
    let compiled = CompiledExpr::new(e);
    let fns = GenericFunctions::default();
    let mut evaluated = 0;
    for p in sample_points(e, 8) {
        if evaluated == 3 {
            break;
        }
        let Ok((v, scale)) = compiled.eval_with_scale(&p, &fns) else {
            continue;
        };
        evaluated += 1;
        if v.norm() > NONZERO_THRESHOLD * scale.max(1.0) {
            return ZeroTest { decision: Decision::NonZero, witness: Some((p, v)) };
        }
    }
    ZeroTest { decision: Decision::Unknown, witness: None }
}

impl Decision {
    pub fn and(self, other: Decision) -> Decision {
        match (self, other) {
            (Decision::NonZero, _) | (_, Decision::NonZero) => Decision::NonZero,
            (Decision::Zero, Decision::Zero) => Decision::Zero,
            _ => Decision::Unknown,
        }
    }
}
