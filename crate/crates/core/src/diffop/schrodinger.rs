//! The Schrödinger operator with vector and scalar potentials, and the
//! symmetry criterion `[Q, L] = αL`.
//!
//! `L = i∂t − H`, `H = ½p_ap_a − (e/2)({A¹,p1} + {A²,p2}) + V`, which in
//! derivatives-on-the-right form reads
//! `L = i∂t + ½Δ − ieA^a∂_a − (ie/2)∂_aA^a − V`.

use serde::Serialize;
use thiserror::Error;

use crate::expr::zero::zero_test;
use crate::expr::{Coord, Decision, Expr};

use super::{DiffOperator, MultiIndex, OperatorError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("potential component {0} depends on t")]
    TimeDependent(&'static str),
}

/// External field: `A³ ≡ 0`; `V = gA⁰ + (e²/2)((A¹)² + (A²)²)` when `A⁰`
/// is given.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub a1: Expr,
    pub a2: Expr,
    /// `A⁰`, when the scalar part was given through it.
    pub a0: Option<Expr>,
    pub v: Expr,
    pub e: Expr,
    pub g: Expr,
}

impl Potential {
    /// Free particle.
    pub fn free() -> Self {
        Potential::from_a0(Expr::zero(), Expr::zero(), Expr::zero()).unwrap()
    }

    /// From `(A¹, A², A⁰)` with `e = g = 1`.
    pub fn from_a0(a1: Expr, a2: Expr, a0: Expr) -> Result<Self, PotentialError> {
        Self::with_couplings(a1, a2, a0, Expr::one(), Expr::one())
    }

    pub fn with_couplings(a1: Expr, a2: Expr, a0: Expr, e: Expr, g: Expr) -> Result<Self, PotentialError> {
        let p = Self::build(a1, a2, a0, e, g);
        p.validate()?;
        Ok(p)
    }

    /// Direct scalar term `V`, with `e = 1`.
    pub fn from_v(a1: Expr, a2: Expr, v: Expr) -> Result<Self, PotentialError> {
        let p = Potential { a1, a2, a0: None, v, e: Expr::one(), g: Expr::one() };
        p.validate()?;
        Ok(p)
    }

    /// Unvalidated constructor for the time-dependent fields produced by
    /// equivalence transformations.
    pub fn time_dependent(a1: Expr, a2: Expr, v: Expr, e: Expr) -> Self {
        Potential { a1, a2, a0: None, v, e, g: Expr::one() }
    }

    /// `A¹ = ∂1F + ∂2G`, `A² = ∂2F − ∂1G`.
    pub fn from_generators(f: &Expr, g: &Expr, a0: Expr) -> Result<Self, PotentialError> {
        let a1 = f.d(Coord::X1) + g.d(Coord::X2);
        let a2 = f.d(Coord::X2) - g.d(Coord::X1);
        Self::from_a0(a1, a2, a0)
    }

    fn build(a1: Expr, a2: Expr, a0: Expr, e: Expr, g: Expr) -> Self {
        let v = &g * &a0 + e.powi(2) * Expr::ratio(1, 2) * (a1.powi(2) + a2.powi(2));
        Potential { a1, a2, a0: Some(a0), v, e, g }
    }

    fn validate(&self) -> Result<(), PotentialError> {
        let parts = [("A1", &self.a1), ("A2", &self.a2), ("V", &self.v)];
        for (name, p) in parts {
            if p.depends_on_coord(Coord::T) {
                return Err(PotentialError::TimeDependent(name));
            }
        }
        if let Some(a0) = &self.a0 {
            if a0.depends_on_coord(Coord::T) {
                return Err(PotentialError::TimeDependent("A0"));
            }
        }
        Ok(())
    }

    pub fn is_time_independent(&self) -> bool {
        self.validate().is_ok()
    }

    /// `A^a` for `a = 1, 2, 3`.
    pub fn a(&self, a: usize) -> Expr {
        match a {
            1 => self.a1.clone(),
            2 => self.a2.clone(),
            _ => Expr::zero(),
        }
    }

    /// Apply `f` to every field, recomputing `V` from `A⁰` when present.
    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> Self {
        let (a1, a2, e, g) = (f(&self.a1), f(&self.a2), f(&self.e), f(&self.g));
        match &self.a0 {
            Some(a0) => Self::build(a1, a2, f(a0), e, g),
            None => Potential { a1, a2, a0: None, v: f(&self.v), e, g },
        }
    }
}

/// `L = i∂t + ½Δ − ieA^a∂_a − (ie/2)div A − V`.
pub fn schrodinger_operator(p: &Potential) -> DiffOperator {
    let i = Expr::i();
    let mut l = DiffOperator::partial(Coord::T).scale(&i);
    for a in 1..=3 {
        let mut m = [0u8; 4];
        m[a] = 2;
        l.add_term(MultiIndex(m), Expr::ratio(1, 2));
    }
    let ie = &i * &p.e;
    let mut div = Expr::zero();
    for a in 1..=2 {
        let aa = p.a(a);
        l.add_term(MultiIndex::of(Coord::x(a)), -(&ie * &aa));
        div = div + aa.d(Coord::x(a));
    }
    l.add_term(MultiIndex::ID, -(&ie * &div * Expr::ratio(1, 2)) - &p.v);
    l
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientDecision {
    pub index: [u8; 4],
    pub decision: Decision,
}

/// Outcome of the symmetry criterion for one operator.
#[derive(Debug, Clone)]
pub struct SymmetryCheck {
    /// `Zero` iff every coefficient of `[Q,L] − αL` vanishes identically.
    pub satisfied: Decision,
    pub alpha: Expr,
    pub residual: DiffOperator,
    /// Non-`Zero` residual coefficients with their decisions.
    pub failures: Vec<CoefficientDecision>,
}

impl SymmetryCheck {
    pub fn is_satisfied(&self) -> bool {
        self.satisfied == Decision::Zero
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error("symmetry candidates must be first order, got order {0}")]
    NotFirstOrder(u32),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// `[Q, L] = αL` with `α = (∂t-coefficient of [Q,L]) / i`.
pub fn check_symmetry(p: &Potential, q: &DiffOperator) -> Result<SymmetryCheck, SymmetryError> {
    if q.order() > 1 {
        return Err(SymmetryError::NotFirstOrder(q.order()));
    }
    let l = schrodinger_operator(p);
    let c = q.commutator(&l)?;
    let alpha = -(Expr::i() * c.coeff_of(Coord::T));
    let residual = c.sub(&l.scale(&alpha));
    let mut satisfied = Decision::Zero;
    let mut failures = Vec::new();
    for (m, coeff) in residual.terms() {
        let d = zero_test(coeff).decision;
        satisfied = satisfied.and(d);
        if d != Decision::Zero {
            failures.push(CoefficientDecision { index: m.0, decision: d });
        }
    }
    Ok(SymmetryCheck { satisfied, alpha, residual, failures })
}
