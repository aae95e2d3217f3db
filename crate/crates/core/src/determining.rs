//! Determining equations for first-order symmetries.
//!
//! A symmetry is written `Q = i(ξ⁰∂t + ξ^a∂_a + η̃)` with
//! `η̃ = ½ξ^a_a + iη`, so that `P0 = i∂t` has `ξ⁰ = 1`.  The generic
//! solution of the potential-free part of the system is
//! `ξ^a = −(α/2)x_a + θ^{ab}x_b + ν^a`, `α = −ξ̇⁰`, and
//! `η = (α̇/4)r² − ν̇^a x_a + K`.  In these conventions `ν^a` enters `Q` as
//! `−ν^aP_a`.
//!
//! The raw system (tags `de1`…`de8`) is evaluated from the coefficients of
//! an arbitrary first-order operator; the reduced system (`eqA`, `con10b`)
//! and its contractions (`con12`, `con13`) from an ansatz.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::diffop::{DiffOperator, MultiIndex, Potential};
use crate::expr::zero::zero_test;
use crate::expr::{named, parse_expr, Atom, Coord, Decision, Elem, Expr, ParseError, SymbolTable, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnsatzError {
    #[error("alpha*nu{0} must vanish (alpha = {1})")]
    AlphaNu(usize, String),
    #[error("{0} must depend on t only")]
    NotTimeOnly(&'static str),
    #[error("theta{0} must be constant")]
    ThetaNotConstant(&'static str),
    #[error("unknown ansatz field `{0}`")]
    UnknownField(String),
    #[error("field {field}: {source}")]
    Parse { field: String, source: ParseError },
    #[error("operator is not first order of the generator shape")]
    NotGeneratorShape,
}

/// `ξ⁰(t)`, constant antisymmetric `θ`, `ν(t)` and the integration function
/// `K(t, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorAnsatz {
    pub xi0: Expr,
    /// `θ^{12}, θ^{13}, θ^{23}`.
    pub theta: [Expr; 3],
    pub nu: [Expr; 3],
    pub k: Expr,
}

/// Admissible time dependence of `ξ⁰` and `ν`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum TimeProfile {
    Polynomial,
    Exponential,
    Trigonometric,
}

pub const ANSATZ_FIELDS: [&str; 8] = ["xi0", "theta12", "theta13", "theta23", "nu1", "nu2", "nu3", "K"];

impl Default for GeneratorAnsatz {
    fn default() -> Self {
        GeneratorAnsatz {
            xi0: Expr::zero(),
            theta: [Expr::zero(), Expr::zero(), Expr::zero()],
            nu: [Expr::zero(), Expr::zero(), Expr::zero()],
            k: Expr::zero(),
        }
    }
}

fn x(a: usize) -> Expr {
    Expr::x(a)
}

fn dt(e: &Expr) -> Expr {
    e.d(Coord::T)
}

fn d(e: &Expr, a: usize) -> Expr {
    e.d(Coord::x(a))
}

fn eps(n: usize, a: usize, b: usize) -> i64 {
    match (n, a, b) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1,
        (1, 3, 2) | (2, 1, 3) | (3, 2, 1) => -1,
        _ => 0,
    }
}

impl GeneratorAnsatz {
    /// Build from `field = expression` pairs; absent fields are zero.
    pub fn parse(fields: &BTreeMap<String, String>, table: &SymbolTable) -> Result<Self, AnsatzError> {
        let mut a = GeneratorAnsatz::default();
        for (name, src) in fields {
            let e = parse_expr(src, table).map_err(|source| AnsatzError::Parse { field: name.clone(), source })?;
            match name.as_str() {
                "xi0" => a.xi0 = e,
                "theta12" => a.theta[0] = e,
                "theta13" => a.theta[1] = e,
                "theta23" => a.theta[2] = e,
                "nu1" => a.nu[0] = e,
                "nu2" => a.nu[1] = e,
                "nu3" => a.nu[2] = e,
                "K" => a.k = e,
                other => return Err(AnsatzError::UnknownField(other.to_string())),
            }
        }
        a.validate()?;
        Ok(a)
    }

    /// `θ^{ab}`, antisymmetric.
    pub fn theta(&self, a: usize, b: usize) -> Expr {
        match (a, b) {
            (1, 2) => self.theta[0].clone(),
            (1, 3) => self.theta[1].clone(),
            (2, 3) => self.theta[2].clone(),
            (2, 1) | (3, 1) | (3, 2) => -self.theta(b, a),
            _ => Expr::zero(),
        }
    }

    pub fn nu(&self, a: usize) -> Expr {
        self.nu[a - 1].clone()
    }

    /// `α = −ξ̇⁰`.
    pub fn alpha(&self) -> Expr {
        -dt(&self.xi0)
    }

    /// `ξ^a = −(α/2)x_a + θ^{ab}x_b + ν^a`.
    pub fn xi(&self, a: usize) -> Expr {
        let alpha = self.alpha();
        let rot: Expr = (1..=3).map(|b| self.theta(a, b) * x(b)).sum();
        -(alpha * x(a)) * Expr::ratio(1, 2) + rot + self.nu(a)
    }

    /// `η = (α̇/4)r² − ν̇^a x_a + K`.
    pub fn eta(&self) -> Expr {
        let nu_dot: Expr = (1..=3).map(|a| dt(&self.nu(a)) * x(a)).sum();
        dt(&self.alpha()) * named::r2() * Expr::ratio(1, 4) - nu_dot + &self.k
    }

    pub fn validate(&self) -> Result<(), AnsatzError> {
        let space_free = |e: &Expr| Coord::SPACE.iter().all(|c| !e.depends_on_coord(*c));
        if !space_free(&self.xi0) {
            return Err(AnsatzError::NotTimeOnly("xi0"));
        }
        for (k, n) in ["nu1", "nu2", "nu3"].iter().enumerate() {
            if !space_free(&self.nu[k]) {
                return Err(AnsatzError::NotTimeOnly(n));
            }
        }
        for (k, n) in ["12", "13", "23"].iter().enumerate() {
            if !self.theta[k].is_coordinate_free() {
                return Err(AnsatzError::ThetaNotConstant(n));
            }
        }
        let alpha = self.alpha();
        for a in 1..=3 {
            if zero_test(&(&alpha * &self.nu(a))).decision != Decision::Zero {
                return Err(AnsatzError::AlphaNu(a, alpha.to_string()));
            }
        }
        Ok(())
    }

    /// Recover the ansatz from an operator of generator shape.
    pub fn from_operator(q: &DiffOperator) -> Result<Self, AnsatzError> {
        let mi = Expr::i().recip();
        let xi0 = q.coeff_of(Coord::T) * &mi;
        let xi: Vec<Expr> = (1..=3).map(|a| q.coeff_of(Coord::x(a)) * &mi).collect();
        let origin = |e: &Expr| Coord::SPACE.iter().fold(e.clone(), |acc, c| acc.subs_coord(*c, &Expr::zero()));
        let mut a = GeneratorAnsatz {
            xi0,
            theta: [d(&xi[0], 2), d(&xi[0], 3), d(&xi[1], 3)],
            nu: [origin(&xi[0]), origin(&xi[1]), origin(&xi[2])],
            k: Expr::zero(),
        };
        if a.validate().is_err() {
            return Err(AnsatzError::NotGeneratorShape);
        }
        // Q = i(ξ⁰∂t + ξ∂ + ½ξ^a_a) − η
        let eta_tilde = q.coeff(&MultiIndex::ID) * &mi;
        let div: Expr = (1..=3).map(|b| d(&a.xi(b), b)).sum();
        let eta = (eta_tilde - div * Expr::ratio(1, 2)) * &mi;
        a.k = &eta - &a.eta();
        if build_generator(&a).map(|b| b == *q) != Ok(true) {
            return Err(AnsatzError::NotGeneratorShape);
        }
        Ok(a)
    }
}

/// `Q = i(ξ⁰∂t + ξ^a∂_a + ½ξ^a_a) − η`.
pub fn build_generator(a: &GeneratorAnsatz) -> Result<DiffOperator, AnsatzError> {
    a.validate()?;
    let i = Expr::i();
    let mut q = DiffOperator::monomial(MultiIndex::of(Coord::T), &i * &a.xi0);
    let mut div = Expr::zero();
    for b in 1..=3 {
        let xi = a.xi(b);
        div = div + d(&xi, b);
        q.add_term(MultiIndex::of(Coord::x(b)), &i * &xi);
    }
    q.add_term(MultiIndex::ID, &i * &div * Expr::ratio(1, 2) - a.eta());
    Ok(q)
}

/// Tagged residual; the equation holds iff the expression vanishes.
#[derive(Debug, Clone)]
pub struct Residual {
    pub tag: String,
    pub expr: Expr,
}

fn tagged(tag: impl Into<String>, expr: Expr) -> Residual {
    Residual { tag: tag.into(), expr }
}

/// `A⁰` for the reduced system; when only `V` is known,
/// `A⁰ = (V − (e²/2)((A¹)² + (A²)²))/g`.
fn scalar_a0(p: &Potential) -> Expr {
    match &p.a0 {
        Some(a0) => a0.clone(),
        None => (&p.v - p.e.powi(2) * Expr::ratio(1, 2) * (p.a1.powi(2) + p.a2.powi(2))) / &p.g,
    }
}

/// Equations (de1)–(de8) for an arbitrary first-order operator.
pub fn raw_determining_residuals(p: &Potential, q: &DiffOperator) -> Vec<Residual> {
    let mi = Expr::i().recip();
    let xi0 = q.coeff_of(Coord::T) * &mi;
    let xi: Vec<Expr> = (1..=3).map(|a| q.coeff_of(Coord::x(a)) * &mi).collect();
    let xi = |a: usize| xi[a - 1].clone();
    let eta_tilde = q.coeff(&MultiIndex::ID) * &mi;
    let div: Expr = (1..=3).map(|b| d(&xi(b), b)).sum();
    let eta = (&eta_tilde - &div * Expr::ratio(1, 2)) * &mi;
    let e = &p.e;

    // α from the ∂t coefficient of [X, L], X = Q/i, L = i∂t + ½Δ − ieA∂ + …
    let lap0: Expr = (1..=3).map(|b| d(&d(&xi0, b), b)).sum();
    let a_grad0: Expr = (1..=3).map(|b| p.a(b) * d(&xi0, b)).sum();
    let dt_coeff = -(Expr::i() * dt(&xi0)) - lap0 * Expr::ratio(1, 2) + Expr::i() * e * a_grad0;
    let alpha = dt_coeff * &mi;

    let mut out = vec![tagged("de1", dt(&xi0) + &alpha)];
    for b in 1..=3 {
        out.push(tagged(format!("de1.{}", b), d(&xi0, b)));
    }
    for a in 1..=3 {
        for b in a..=3 {
            let mut r = d(&xi(a), b) + d(&xi(b), a);
            if a == b {
                r = r - &div * Expr::ratio(2, 3);
            }
            out.push(tagged(format!("de2.{}{}", a, b), r));
        }
    }
    out.push(tagged("de6", &div + &alpha * Expr::ratio(3, 2)));
    for a in 1..=3 {
        let coupling: Expr =
            (1..=3).map(|b| p.a(b) * d(&xi(a), b) - xi(b) * d(&p.a(a), b)).sum::<Expr>() + &alpha * p.a(a);
        out.push(tagged(format!("de7.{}", a), d(&eta, a) - e * coupling + dt(&xi(a))));
    }
    let xv: Expr = (1..=3).map(|a| xi(a) * d(&p.v, a)).sum();
    let aeta: Expr = (1..=3).map(|a| p.a(a) * d(&eta, a)).sum();
    out.push(tagged("de8", xv - &alpha * &p.v - dt(&eta) + e * aeta));
    out
}

/// Right-hand side of (eqA) without the factor `e`:
/// `(α/2)(A^a_b x_b + A^a) + θ^{ab}A^b − θ^{bc}x_c A^a_b − ν^b A^a_b`.
fn eqa_rhs(p: &Potential, a: &GeneratorAnsatz, n: usize) -> Expr {
    let alpha = a.alpha();
    let an = p.a(n);
    let radial: Expr = (1..=3).map(|b| d(&an, b) * x(b)).sum();
    let rot: Expr = (1..=3).map(|b| a.theta(n, b) * p.a(b)).sum();
    let drift: Expr =
        (1..=3).flat_map(|b| (1..=3).map(move |c| (b, c))).map(|(b, c)| a.theta(b, c) * x(c) * d(&an, b)).sum();
    let trans: Expr = (1..=3).map(|b| a.nu(b) * d(&an, b)).sum();
    &alpha * Expr::ratio(1, 2) * (radial + an) + rot - drift - trans
}

/// (eqA) components and (con10b).
pub fn reduced_residuals(p: &Potential, a: &GeneratorAnsatz) -> Vec<Residual> {
    let e = &p.e;
    let mut out = Vec::new();
    for n in 1..=3 {
        out.push(tagged(format!("eqA.{}", n), d(&a.k, n) - e * eqa_rhs(p, a, n)));
    }
    out.push(tagged("con10b", con10b_lhs_minus_rhs(p, a, Expr::ratio(1, 4))));
    out
}

/// `g(ξ·∇A⁰ − αA⁰) + e((α̇/2)x·A − ν̇·A) − (c·α̈ r² − ν̈·x + K̇)`, where the
/// derivation gives `c = 1/4`.
fn con10b_lhs_minus_rhs(p: &Potential, a: &GeneratorAnsatz, c: Expr) -> Expr {
    let a0 = scalar_a0(p);
    let alpha = a.alpha();
    let transport: Expr = (1..=3).map(|b| a.xi(b) * d(&a0, b)).sum();
    let x_dot_a: Expr = (1..=3).map(|b| x(b) * p.a(b)).sum();
    let nudot_a: Expr = (1..=3).map(|b| dt(&a.nu(b)) * p.a(b)).sum();
    let nuddot_x: Expr = (1..=3).map(|b| dt(&dt(&a.nu(b))) * x(b)).sum();
    let lhs = &p.g * (transport - &alpha * &a0) + &p.e * (dt(&alpha) * Expr::ratio(1, 2) * x_dot_a - nudot_a);
    let rhs = c * dt(&dt(&alpha)) * named::r2() - nuddot_x + dt(&a.k);
    lhs - rhs
}

/// (con10b) with the `α̈/2` coefficient as printed; used to annotate the
/// discrepancy with the derived `α̈/4`.
pub fn con10b_printed(p: &Potential, a: &GeneratorAnsatz) -> Expr {
    con10b_lhs_minus_rhs(p, a, Expr::ratio(1, 2))
}

/// The scalar contraction (con12) and the vector contraction (con13) of
/// (eqA) with `x`.
///
/// The vector contraction carries the term `ε^{nab}x_aθ^{bc}A^c +
/// ε^{ndb}θ^{dc}x_cA^b` that vanishes only along the rotation axis; it is
/// included so that the contraction is exactly `x × (eqA)`.
pub fn algebraic_consequences(p: &Potential, a: &GeneratorAnsatz) -> Vec<Residual> {
    let e = &p.e;
    let alpha = a.alpha();
    let half_alpha = &alpha * Expr::ratio(1, 2);
    // (x·A)
    let xa: Expr = (1..=3).map(|b| x(b) * p.a(b)).sum();
    let transport = |f: &Expr| -> Expr {
        let radial: Expr = (1..=3).map(|b| x(b) * d(f, b)).sum();
        let drift: Expr =
            (1..=3).flat_map(|dd| (1..=3).map(move |c| (dd, c))).map(|(dd, c)| a.theta(dd, c) * x(c) * d(f, dd)).sum();
        let trans: Expr = (1..=3).map(|b| a.nu(b) * d(f, b)).sum();
        &half_alpha * radial - drift - trans
    };
    let nu_a: Expr = (1..=3).map(|b| a.nu(b) * p.a(b)).sum();
    let xk: Expr = (1..=3).map(|b| x(b) * d(&a.k, b)).sum();
    let mut out = vec![tagged("con12", e * (transport(&xa) + nu_a) - xk)];
    for n in 1..=3 {
        let cross = |u: &dyn Fn(usize) -> Expr, v: &dyn Fn(usize) -> Expr| -> Expr {
            let mut s = Expr::zero();
            for i in 1..=3 {
                for j in 1..=3 {
                    let k = eps(n, i, j);
                    if k != 0 {
                        s = s + Expr::int(k) * u(i) * v(j);
                    }
                }
            }
            s
        };
        let xa_cross = cross(&x, &|b| p.a(b));
        let nu_cross = cross(&|b| a.nu(b), &|b| p.a(b));
        let theta_a = |b: usize| (1..=3).map(|c| a.theta(b, c) * p.a(c)).sum::<Expr>();
        let theta_x = |b: usize| (1..=3).map(|c| a.theta(b, c) * x(c)).sum::<Expr>();
        let rotation = cross(&x, &theta_a) + cross(&theta_x, &|b| p.a(b));
        let curl_k = cross(&x, &|b| d(&a.k, b));
        out.push(tagged(format!("con13.{}", n), e * (transport(&xa_cross) + nu_cross + rotation) - curl_k));
    }
    out
}

/// Decision for a list of residuals, with the tags that are not `Zero`.
pub fn decide(rs: &[Residual]) -> (Decision, Vec<(String, Decision)>) {
    let mut all = Decision::Zero;
    let mut bad = Vec::new();
    for r in rs {
        let dcs = zero_test(&r.expr).decision;
        all = all.and(dcs);
        if dcs != Decision::Zero {
            bad.push((r.tag.clone(), dcs));
        }
    }
    (all, bad)
}

fn profile_term(m: &crate::expr::Monomial) -> Result<Option<TimeProfile>, ()> {
    let t = Var::Coord(Coord::T);
    let linear_in_t = |u: &Expr| {
        let c = u.d(Coord::T);
        !c.depends_on(&t) && (u - &c * Expr::t()).is_zero()
    };
    let dep: Vec<_> = m.factors().iter().filter(|(a, _)| a.depends_on(&t)).collect();
    Ok(match dep.as_slice() {
        [] => None,
        [(Atom::Coord(Coord::T), k)] if k.is_integer() && *k.numer() > 0 && *k.numer() <= 2 => {
            Some(TimeProfile::Polynomial)
        }
        [(Atom::Exp(u), _)] if linear_in_t(u) => Some(TimeProfile::Exponential),
        [(Atom::Elem(Elem::Sin | Elem::Cos, u), k)] if *k == crate::expr::ex(1, 1) && linear_in_t(u) => {
            Some(TimeProfile::Trigonometric)
        }
        _ => return Err(()),
    })
}

/// The common time profile of `ξ⁰` and `ν`, if it is one of the admissible
/// classes: polynomials of degree ≤ 2, exponentials `e^{λt}`, or sines and
/// cosines of `λt` (constants belong to every class).
pub fn time_profile(a: &GeneratorAnsatz) -> Option<TimeProfile> {
    let mut found: Option<TimeProfile> = None;
    for e in std::iter::once(&a.xi0).chain(a.nu.iter()) {
        for (m, _) in e.terms() {
            match profile_term(m).ok()? {
                None => {}
                Some(p) if found.map_or(true, |f| f == p) => found = Some(p),
                Some(_) => return None,
            }
        }
    }
    Some(found.unwrap_or(TimeProfile::Polynomial))
}

pub fn time_profile_check(a: &GeneratorAnsatz) -> bool {
    time_profile(a).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::{check_symmetry, generator, parse_operator};

    fn table() -> SymbolTable {
        SymbolTable::standard().with_function("F", 3).with_function("G", 3).with_function("Ft", 2)
    }

    fn ansatz(fields: &[(&str, &str)]) -> GeneratorAnsatz {
        let m = fields.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        GeneratorAnsatz::parse(&m, &table()).unwrap()
    }

    fn op(s: &str) -> DiffOperator {
        parse_operator(s, &table()).unwrap()
    }

    #[test]
    fn builds_named_generators() {
        assert_eq!(build_generator(&ansatz(&[("xi0", "1")])).unwrap(), generator("P0").unwrap());
        assert_eq!(build_generator(&ansatz(&[("theta12", "1")])).unwrap(), generator("L3").unwrap());
        assert_eq!(build_generator(&ansatz(&[("xi0", "2*t")])).unwrap(), generator("D").unwrap());
        assert_eq!(build_generator(&ansatz(&[("xi0", "t^2")])).unwrap(), generator("A").unwrap());
        assert_eq!(build_generator(&ansatz(&[("nu2", "-t")])).unwrap(), generator("G2").unwrap());
        // ν enters as −ν·P: the translation ansatz gives −(P3 − F̃).
        let q = build_generator(&ansatz(&[("nu3", "1"), ("K", "-Ft(x1,x2)")])).unwrap();
        assert_eq!(q, op("-(P3 - Ft(x1,x2))"));
    }

    #[test]
    fn alpha_nu_constraint_rejected() {
        let m = [("xi0".to_string(), "2*t".to_string()), ("nu1".to_string(), "1".to_string())].into();
        assert!(matches!(GeneratorAnsatz::parse(&m, &table()), Err(AnsatzError::AlphaNu(1, _))));
    }

    #[test]
    fn raw_residuals_free_generators() {
        let free = Potential::free();
        for name in ["L3", "D", "A", "G1", "P0"] {
            let (d, bad) = decide(&raw_determining_residuals(&free, &generator(name).unwrap()));
            assert_eq!(d, Decision::Zero, "{} {:?}", name, bad);
        }
        let (d, bad) = decide(&raw_determining_residuals(&free, &generator("A_printed").unwrap()));
        assert_eq!(d, Decision::NonZero);
        assert!(bad.iter().all(|(t, _)| t.starts_with("de7")), "{:?}", bad);
    }

    #[test]
    fn translation_reduces_to_gradient_conditions() {
        let p = Potential::from_a0(
            Expr::app("F", vec![x(1), x(2), x(3)]),
            Expr::app("G", vec![x(1), x(2), x(3)]),
            Expr::zero(),
        )
        .unwrap();
        let a = ansatz(&[("nu3", "1")]);
        let r = reduced_residuals(&p, &a);
        let want = [p.a1.d(Coord::X3), p.a2.d(Coord::X3), Expr::zero()];
        for n in 0..3 {
            assert_eq!(r[n].expr, want[n].clone(), "{}", r[n].tag);
        }
    }

    #[test]
    fn rotation_reduces_to_angular_derivatives() {
        let p = Potential::from_a0(
            Expr::app("F", vec![x(1), x(2), x(3)]),
            Expr::app("G", vec![x(1), x(2), x(3)]),
            Expr::zero(),
        )
        .unwrap();
        let a = ansatz(&[("theta12", "1"), ("K", "F(x1,x2,x3)*G(x1,x2,x3)")]);
        let r = reduced_residuals(&p, &a);
        let dphi = |f: &Expr| x(1) * f.d(Coord::X2) - x(2) * f.d(Coord::X1);
        assert_eq!(r[0].expr, a.k.d(Coord::X1) - dphi(&p.a1) - &p.a2);
        assert_eq!(r[1].expr, a.k.d(Coord::X2) - dphi(&p.a2) + &p.a1);
    }

    #[test]
    fn dilatation_with_rotation_matches_scaling_form() {
        let p = Potential::from_a0(
            Expr::app("F", vec![x(1), x(2), x(3)]),
            Expr::app("G", vec![x(1), x(2), x(3)]),
            Expr::zero(),
        )
        .unwrap();
        let a = ansatz(&[("xi0", "-2*t"), ("theta12", "mu")]);
        let mu = Expr::param("mu");
        let dnu = |f: &Expr| {
            (1..=3).map(|b| x(b) * f.d(Coord::x(b))).sum::<Expr>()
                + &mu * (x(1) * f.d(Coord::X2) - x(2) * f.d(Coord::X1))
        };
        let r = reduced_residuals(&p, &a);
        assert_eq!(r[0].expr, -(&p.a1 + &mu * &p.a2 + dnu(&p.a1)));
        assert_eq!(r[1].expr, -(&p.a2 - &mu * &p.a1 + dnu(&p.a2)));
    }

    #[test]
    fn raw_and_reduced_agree_on_inverse_square() {
        let p = Potential::from_a0(Expr::zero(), Expr::zero(), Expr::param("kappa") / named::r2()).unwrap();
        for fields in [vec![("xi0", "t^2")], vec![("xi0", "2*t")], vec![("nu1", "1")]] {
            let a = ansatz(&fields);
            let q = build_generator(&a).unwrap();
            let raw = decide(&raw_determining_residuals(&p, &q)).0;
            let red = decide(&reduced_residuals(&p, &a)).0;
            let chk = check_symmetry(&p, &q).unwrap().satisfied;
            assert_eq!(raw, red, "{:?}", fields);
            assert_eq!(raw, chk, "{:?}", fields);
        }
    }

    #[test]
    fn printed_con10b_coefficient_fails_for_conformal_generator() {
        let w = Expr::param("omega");
        let p = Potential::from_a0(Expr::zero(), Expr::zero(), -(w.powi(2) * named::r2()) * Expr::ratio(1, 2)).unwrap();
        let a = GeneratorAnsatz::from_operator(&op("Ap(omega)")).unwrap();
        assert_eq!(decide(&reduced_residuals(&p, &a)).0, Decision::Zero);
        assert_eq!(zero_test(&con10b_printed(&p, &a)).decision, Decision::NonZero);
    }

    #[test]
    fn from_operator_round_trip() {
        for s in ["D + mu*L3", "Bp3(omega) - exp(omega*t)*Ft(x1,x2)", "A", "L3 + kappa*t"] {
            let q = op(s);
            let a = GeneratorAnsatz::from_operator(&q).unwrap();
            assert_eq!(build_generator(&a).unwrap(), q, "{}", s);
        }
        assert!(GeneratorAnsatz::from_operator(&op("x1*dt")).is_err());
    }

    #[test]
    fn time_profiles() {
        assert!(time_profile_check(&ansatz(&[("xi0", "t^2")])));
        assert!(time_profile_check(&ansatz(&[("nu3", "exp(omega*t)")])));
        assert!(!time_profile_check(&ansatz(&[("xi0", "t^3")])));
        assert_eq!(
            time_profile(&ansatz(&[("nu1", "cos(omega*t)"), ("nu2", "sin(omega*t)")])),
            Some(TimeProfile::Trigonometric)
        );
        assert!(!time_profile_check(&ansatz(&[("nu1", "t*exp(t)")])));
    }
}
