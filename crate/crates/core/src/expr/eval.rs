//! Floating-point evaluation.
//!
//! Expressions are compiled once into an `f64` tree and then evaluated many
//! times; the numeric oracle and the numeric phase of the zero test both sit
//! on top of this.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use thiserror::Error;

use super::{Atom, Coord, Elem, Expr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("singular evaluation: {0}")]
    Singular(String),
    #[error("parameter `{0}` has no numeric value")]
    UnboundParam(String),
    #[error("function `{0}` has no numeric realization")]
    UnboundFunction(String),
}

/// Numeric values for coordinates and parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericPoint {
    pub coords: [Complex64; 4],
    pub params: BTreeMap<String, Complex64>,
}

impl NumericPoint {
    pub fn new(t: f64, x: [f64; 3]) -> Self {
        NumericPoint { coords: [t.into(), x[0].into(), x[1].into(), x[2].into()], params: BTreeMap::new() }
    }

    pub fn with_param(mut self, name: &str, v: f64) -> Self {
        self.params.insert(name.to_string(), v.into());
        self
    }

    pub fn shifted(&self, c: Coord, h: f64) -> Self {
        let mut p = self.clone();
        p.coords[c.index()] += h;
        p
    }

    pub fn real_coords(&self) -> [f64; 4] {
        [self.coords[0].re, self.coords[1].re, self.coords[2].re, self.coords[3].re]
    }
}

/// Numeric realization of arbitrary functions and their slot derivatives.
pub trait FunctionProvider: Sync {
    fn call(&self, name: &str, deriv: &[u32], args: &[Complex64]) -> Result<Complex64, EvalError>;
}

/// Refuses every function; for expressions known to be function-free.
pub struct NoFunctions;

impl FunctionProvider for NoFunctions {
    fn call(&self, name: &str, _: &[u32], _: &[Complex64]) -> Result<Complex64, EvalError> {
        Err(EvalError::UnboundFunction(name.to_string()))
    }
}

/// Deterministic generic stand-ins: each named function is a sum of three
/// exponentials of linear forms in its arguments, with name-derived
/// coefficients. Every derivative is available in closed form.
#[derive(Debug, Clone, Default)]
pub struct GenericFunctions {
    pub seed: u64,
}

fn fnv(name: &str, seed: u64) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325 ^ seed.wrapping_mul(0x9e3779b97f4a7c15);
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

struct SplitMix(u64);

impl SplitMix {
    fn next_unit(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64
    }
}

impl FunctionProvider for GenericFunctions {
    fn call(&self, name: &str, deriv: &[u32], args: &[Complex64]) -> Result<Complex64, EvalError> {
        let mut rng = SplitMix(fnv(name, self.seed));
        let mut total = Complex64::new(0.0, 0.0);
        for _ in 0..3 {
            let a = Complex64::new(0.4 + rng.next_unit(), 0.6 * rng.next_unit() - 0.3);
            let mut expo = Complex64::new(0.0, 0.0);
            let mut pre = a;
            for (k, u) in args.iter().enumerate() {
                let b = 0.9 * rng.next_unit() - 0.45;
                let b = if b.abs() < 0.05 { b + 0.1 } else { b };
                expo += b * u;
                pre *= b.powi(deriv.get(k).copied().unwrap_or(0) as i32);
            }
            total += pre * expo.exp();
        }
        Ok(total)
    }
}

#[derive(Debug, Clone)]
enum Pow {
    Int(i32),
    Real(f64),
}

#[derive(Debug, Clone)]
enum CAtom {
    Coord(usize),
    Param(Arc<str>),
    Const(Complex64),
    Base(Box<CNode>),
    Exp(Box<CNode>),
    Ln(Box<CNode>),
    Elem(Elem, Box<CNode>),
    App { name: Arc<str>, deriv: Vec<u32>, args: Vec<CNode> },
}

#[derive(Debug, Clone)]
struct CNode {
    terms: Vec<(Complex64, Vec<(CAtom, Pow)>)>,
}

/// An expression lowered to `f64` arithmetic.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    root: CNode,
}

fn compile(e: &Expr) -> CNode {
    let terms = e
        .terms()
        .map(|(m, c)| {
            let factors = m
                .factors()
                .iter()
                .map(|(a, q)| {
                    let pow =
                        if q.is_integer() { Pow::Int(q.to_integer() as i32) } else { Pow::Real(q.to_f64().unwrap()) };
                    let atom = match a {
                        Atom::Coord(c) => CAtom::Coord(c.index()),
                        Atom::Param(p) => CAtom::Param(p.clone()),
                        Atom::Radical(n) => CAtom::Const(Complex64::new(n.to_f64().unwrap_or(f64::NAN), 0.0)),
                        Atom::Base(s) => CAtom::Base(Box::new(compile(s))),
                        Atom::Exp(u) => CAtom::Exp(Box::new(compile(u))),
                        Atom::Ln(u) => CAtom::Ln(Box::new(compile(u))),
                        Atom::Elem(k, u) => CAtom::Elem(*k, Box::new(compile(u))),
                        Atom::App(app) => CAtom::App {
                            name: app.name.clone(),
                            deriv: app.deriv.clone(),
                            args: app.args.iter().map(compile).collect(),
                        },
                    };
                    (atom, pow)
                })
                .collect();
            (c.to_c64(), factors)
        })
        .collect();
    CNode { terms }
}

fn singular(what: &str) -> EvalError {
    EvalError::Singular(what.to_string())
}

fn powc(z: Complex64, p: &Pow) -> Result<Complex64, EvalError> {
    let tiny = z.norm() < 1e-300;
    match p {
        Pow::Int(k) => {
            if tiny && *k < 0 {
                return Err(singular("division by zero"));
            }
            Ok(z.powi(*k))
        }
        Pow::Real(q) => {
            if tiny {
                return if *q > 0.0 { Ok(Complex64::new(0.0, 0.0)) } else { Err(singular("division by zero")) };
            }
            if z.im == 0.0 && z.re > 0.0 {
                Ok(Complex64::new(z.re.powf(*q), 0.0))
            } else {
                Ok(z.powf(*q))
            }
        }
    }
}

impl CNode {
    fn eval(&self, p: &NumericPoint, f: &dyn FunctionProvider, scale: &mut f64) -> Result<Complex64, EvalError> {
        let mut total = Complex64::new(0.0, 0.0);
        for (c, factors) in &self.terms {
            let mut v = *c;
            for (a, pw) in factors {
                let z = match a {
                    CAtom::Coord(i) => p.coords[*i],
                    CAtom::Param(name) => {
                        *p.params.get(&**name).ok_or_else(|| EvalError::UnboundParam(name.to_string()))?
                    }
                    CAtom::Const(z) => *z,
                    CAtom::Base(s) => s.eval(p, f, &mut 0.0)?,
                    CAtom::Exp(u) => u.eval(p, f, &mut 0.0)?.exp(),
                    CAtom::Ln(u) => {
                        let z = u.eval(p, f, &mut 0.0)?;
                        if z.norm() < 1e-300 {
                            return Err(singular("logarithm of zero"));
                        }
                        z.ln()
                    }
                    CAtom::Elem(k, u) => {
                        let z = u.eval(p, f, &mut 0.0)?;
                        match k {
                            Elem::Sin => z.sin(),
                            Elem::Cos => z.cos(),
                            Elem::Tan => z.tan(),
                            Elem::Tanh => z.tanh(),
                            Elem::Arctan => z.atan(),
                        }
                    }
                    CAtom::App { name, deriv, args } => {
                        let vals = args.iter().map(|a| a.eval(p, f, &mut 0.0)).collect::<Result<Vec<_>, _>>()?;
                        f.call(name, deriv, &vals)?
                    }
                };
                v *= powc(z, pw)?;
            }
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(singular("non-finite value"));
            }
            *scale += v.norm();
            total += v;
        }
        Ok(total)
    }
}

impl CompiledExpr {
    pub fn new(e: &Expr) -> Self {
        CompiledExpr { root: compile(e) }
    }

    pub fn eval(&self, p: &NumericPoint, f: &dyn FunctionProvider) -> Result<Complex64, EvalError> {
        self.root.eval(p, f, &mut 0.0)
    }

    /// Value together with `Σ|term|`, the natural scale for cancellation.
    pub fn eval_with_scale(&self, p: &NumericPoint, f: &dyn FunctionProvider) -> Result<(Complex64, f64), EvalError> {
        let mut s = 0.0;
        let v = self.root.eval(p, f, &mut s)?;
        Ok((v, s))
    }
}

impl Expr {
    pub fn eval(&self, p: &NumericPoint, f: &dyn FunctionProvider) -> Result<Complex64, EvalError> {
        CompiledExpr::new(self).eval(p, f)
    }

    /// Convenience for function- and parameter-free real points.
    pub fn eval_at(&self, t: f64, x: [f64; 3]) -> Result<Complex64, EvalError> {
        self.eval(&NumericPoint::new(t, x), &NoFunctions)
    }
}
