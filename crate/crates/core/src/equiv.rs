//! Equivalence transformations: point changes of `(t, x)` together with a
//! wave-function multiplier, `t = T(t̃)`, `x = X(t̃, x̃)`, `ψ = M ψ̃`.
//!
//! Operators are pulled back by explicit conjugation: every old derivative
//! is rewritten by the chain rule in the new variables, coefficients are
//! substituted, and the result is conjugated by the multiplier,
//! `q̃ = M⁻¹ ∘ q(ỹ) ∘ M`.  Potentials are read off from the pulled-back
//! Schrödinger operator after dividing out the factor in front of `i∂t̃`.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::diffop::{generator, schrodinger_operator, DiffOperator, Generator, MultiIndex, OperatorError, Potential};
use crate::expr::zero::zero_test;
use crate::expr::{parse_expr, Coord, Decision, Expr, ParseError, Substitution, SymbolTable};
use crate::liealg::span_express;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquivError {
    #[error("degenerate transformation parameters: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("transformed operator is not of Schrödinger form: {0}")]
    NotSchrodinger(String),
    #[error("gauge function must not depend on {0}")]
    Gauge(&'static str),
    #[error("bad transformation `{0}`: {1}")]
    Spec(String, String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// `t = forward[0](t̃, x̃)`, `x_a = forward[a]`, `ψ = multiplier · ψ̃`; the
/// inverse maps give the new coordinates in terms of the old ones.  All
/// expressions use the atoms `t, x1, x2, x3` for whichever side they live on.
#[derive(Debug, Clone)]
pub struct PointTransformation {
    pub name: String,
    pub forward: [Expr; 4],
    pub inverse: [Expr; 4],
    /// `M(t̃, x̃)`.
    pub multiplier: Expr,
}

fn coords() -> [Expr; 4] {
    [Expr::t(), Expr::x(1), Expr::x(2), Expr::x(3)]
}

fn subst_all(map: &[Expr; 4]) -> Substitution {
    Coord::ALL.iter().zip(map).fold(Substitution::new(), |s, (c, e)| s.coord(*c, e.clone()))
}

impl PointTransformation {
    pub fn identity() -> Self {
        PointTransformation { name: "identity".into(), forward: coords(), inverse: coords(), multiplier: Expr::one() }
    }

    /// Phase `ψ = e^{−ieχ} ψ̃`, which shifts `A` by `∇χ`.
    pub fn gauge(chi: &Expr, e: &Expr) -> Self {
        PointTransformation {
            name: format!("gauge:{}", chi),
            forward: coords(),
            inverse: coords(),
            multiplier: (-(Expr::i() * e * chi)).exp(),
        }
    }

    /// `t̃ = (at + b)/(ct + d)`, `x̃ = √Δ x/(ct + d)` with `Δ = ad − bc`, and
    /// `ψ = (a − ct̃)^{3/2} exp(ic x̃²/(2(a − ct̃))) ψ̃` (constant factors
    /// dropped).
    pub fn mobius_general(a: &Expr, b: &Expr, c: &Expr, d: &Expr) -> Result<Self, EquivError> {
        let delta = a * d - b * c;
        if zero_test(&delta).decision != Decision::NonZero {
            return Err(EquivError::Degenerate(format!("ad − bc = {}", delta)));
        }
        let (t, x) = (Expr::t(), |k| Expr::x(k));
        let den_new = a - c * &t;
        let root = delta.sqrt();
        let tt = (d * &t - b) / den_new.clone();
        let fwd_scale = &root / &den_new;
        let forward = [tt, x(1) * &fwd_scale, x(2) * &fwd_scale, x(3) * &fwd_scale];
        let den_old = c * &t + d;
        let inv_scale = &root / &den_old;
        let inverse = [(a * &t + b) / den_old.clone(), x(1) * &inv_scale, x(2) * &inv_scale, x(3) * &inv_scale];
        let r2 = crate::expr::named::r2();
        let multiplier =
            den_new.pow(crate::expr::ex(3, 2)) * (Expr::i() * c * r2 * Expr::ratio(1, 2) / den_new.clone()).exp();
        Ok(PointTransformation { name: format!("mobius:{},{},{},{}", a, b, c, d), forward, inverse, multiplier })
    }

    /// `t̃ = (νt + μ)/(t + λ)`.
    pub fn mobius(nu: &Expr, mu: &Expr, lambda: &Expr) -> Result<Self, EquivError> {
        let mut tr = Self::mobius_general(nu, mu, &Expr::one(), lambda)?;
        tr.name = format!("mobius:{},{},{}", nu, mu, lambda);
        Ok(tr)
    }

    /// `t = e^{2ωt̃}`, `x = √(2ω) e^{ωt̃} x̃`, `ψ = exp(iωx̃²/2 − 3ωt̃/2) ψ̃`:
    /// free particle ↔ repulsive oscillator `V = −ω²x̃²/2`.
    pub fn oscillator(w: &Expr) -> Result<Self, EquivError> {
        if zero_test(w).decision != Decision::NonZero {
            return Err(EquivError::Degenerate("ω = 0".into()));
        }
        let t = Expr::t();
        let two_w = Expr::int(2) * w;
        let s = two_w.sqrt() * (w * &t).exp();
        let forward = [(&two_w * &t).exp(), Expr::x(1) * &s, Expr::x(2) * &s, Expr::x(3) * &s];
        let inv_s = (&two_w * &t).pow(crate::expr::ex(-1, 2));
        let inverse = [t.ln() / two_w.clone(), Expr::x(1) * &inv_s, Expr::x(2) * &inv_s, Expr::x(3) * &inv_s];
        let multiplier =
            (Expr::i() * w * crate::expr::named::r2() * Expr::ratio(1, 2) - Expr::ratio(3, 2) * w * &t).exp();
        Ok(PointTransformation { name: format!("oscillator:{}", w), forward, inverse, multiplier })
    }

    /// `x = x̃ + ½κt̃²`, `ψ = exp(it̃κ·x̃ + iκ²t̃³/6) ψ̃`: free particle ↔
    /// linear potential `V = κ·x̃`.
    pub fn free_fall(k: &[Expr; 3]) -> Self {
        let t = Expr::t();
        let half_t2 = t.powi(2) * Expr::ratio(1, 2);
        let forward =
            [t.clone(), Expr::x(1) + &k[0] * &half_t2, Expr::x(2) + &k[1] * &half_t2, Expr::x(3) + &k[2] * &half_t2];
        let inverse =
            [t.clone(), Expr::x(1) - &k[0] * &half_t2, Expr::x(2) - &k[1] * &half_t2, Expr::x(3) - &k[2] * &half_t2];
        let kx: Expr = (1..=3).map(|a| &k[a - 1] * Expr::x(a)).sum();
        let k2: Expr = k.iter().map(|c| c.powi(2)).sum();
        let multiplier = (Expr::i() * (&t * kx + k2 * t.powi(3) * Expr::ratio(1, 6))).exp();
        PointTransformation { name: format!("freefall:{},{},{}", k[0], k[1], k[2]), forward, inverse, multiplier }
    }

    /// Rewrite an expression in the old variables in terms of the new ones.
    pub fn to_new(&self, e: &Expr) -> Expr {
        e.substitute(&subst_all(&self.forward))
    }

    /// Rewrite an expression in the new variables in terms of the old ones.
    pub fn to_old(&self, e: &Expr) -> Expr {
        e.substitute(&subst_all(&self.inverse))
    }

    /// Both compositions of the stored maps reduce to the identity.
    pub fn check_inverse(&self) -> Decision {
        let c = coords();
        let mut d = Decision::Zero;
        for k in 0..4 {
            d = d.and(zero_test(&(self.to_new(&self.inverse[k]) - &c[k])).decision);
            d = d.and(zero_test(&(self.to_old(&self.forward[k]) - &c[k])).decision);
        }
        d
    }

    /// `∂x_a/∂x̃_b` is a multiple of an orthogonal matrix and `t` depends on
    /// `t̃` only.
    pub fn check_conformal(&self) -> Decision {
        let mut d = Decision::Zero;
        for c in Coord::SPACE {
            d = d.and(zero_test(&self.forward[0].d(c)).decision);
        }
        let j = |a: usize, b: usize| self.forward[a].d(Coord::x(b));
        let g = |a: usize, b: usize| (1..=3).map(|k| j(a, k) * j(b, k)).sum::<Expr>();
        for a in 1..=3 {
            for b in 1..=3 {
                let e = if a == b { g(a, a) - g(1, 1) } else { g(a, b) };
                d = d.and(zero_test(&e).decision);
            }
        }
        d
    }

    /// Old `∂_i` as first-order operators in the new variables.
    fn chain_rule(&self) -> [DiffOperator; 4] {
        std::array::from_fn(|i| {
            let ci = Coord::from_index(i);
            DiffOperator::from_terms(
                Coord::ALL.iter().map(|cj| (MultiIndex::of(*cj), self.to_new(&self.inverse[cj.index()].d(ci)))),
            )
        })
    }

    /// `q̃ = M⁻¹ ∘ q ∘ M` in the new variables.
    pub fn conjugate_operator(&self, q: &DiffOperator) -> Result<DiffOperator, EquivError> {
        let d = self.chain_rule();
        let mut powers: HashMap<MultiIndex, DiffOperator> = HashMap::new();
        let mut out = DiffOperator::zero();
        for (m, c) in q.terms() {
            let dm = match powers.get(m) {
                Some(p) => p.clone(),
                None => {
                    let mut acc = DiffOperator::identity();
                    for (i, &k) in m.0.iter().enumerate() {
                        for _ in 0..k {
                            acc = acc.compose(&d[i])?;
                        }
                    }
                    powers.insert(*m, acc.clone());
                    acc
                }
            };
            out = out.add(&dm.scale(&self.to_new(c)));
        }
        Ok(out.conjugate_by(&self.multiplier))
    }

    /// Pull back `L(p)` and read off `L̃ = factor · L(p̃)`.
    pub fn transform_potential(&self, p: &Potential) -> Result<TransformedEquation, EquivError> {
        let lt = self.conjugate_operator(&schrodinger_operator(p))?;
        read_schrodinger(&lt, &p.e)
    }
}

/// A pulled-back Schrödinger operator `factor · L(potential)`.
#[derive(Debug, Clone)]
pub struct TransformedEquation {
    pub factor: Expr,
    pub potential: Potential,
    pub operator: DiffOperator,
}

fn is_zero_expr(e: &Expr) -> bool {
    zero_test(e).decision == Decision::Zero
}

/// Recognize `f·(i∂t + ½Δ − ieA^a∂_a − (ie/2)div A − V)` with `A³ = 0`.
pub fn read_schrodinger(op: &DiffOperator, e: &Expr) -> Result<TransformedEquation, EquivError> {
    let factor = -(Expr::i() * op.coeff_of(Coord::T));
    if zero_test(&factor).decision != Decision::NonZero {
        return Err(EquivError::NotSchrodinger("no ∂t term".into()));
    }
    let l = op.scale(&factor.recip());
    for (m, c) in l.terms() {
        let ord = m.order();
        let ok = match (ord, m.0) {
            (1, [1, 0, 0, 0]) | (0, _) => true,
            (1, [0, 0, 0, 1]) => is_zero_expr(c),
            (1, _) => true,
            (2, [0, a, b, cc]) if a == 2 || b == 2 || cc == 2 => is_zero_expr(&(c - Expr::ratio(1, 2))),
            _ => is_zero_expr(c),
        };
        if !ok {
            return Err(EquivError::NotSchrodinger(format!("unexpected coefficient at {}: {}", m, c)));
        }
    }
    for a in 1..=3 {
        let mut m = [0u8; 4];
        m[a] = 2;
        if l.coeff(&MultiIndex(m)).is_zero() {
            return Err(EquivError::NotSchrodinger("missing Laplacian".into()));
        }
    }
    let a1 = Expr::i() * l.coeff_of(Coord::X1) / e.clone();
    let a2 = Expr::i() * l.coeff_of(Coord::X2) / e.clone();
    let div = a1.d(Coord::X1) + a2.d(Coord::X2);
    let v = -(l.coeff(&MultiIndex::ID)) - Expr::i() * e * div * Expr::ratio(1, 2);
    let potential = Potential::time_dependent(a1, a2, v, e.clone());
    Ok(TransformedEquation { factor, potential, operator: l })
}

/// Shift `(A¹, A²)` by `(∂1χ, ∂2χ)` keeping `A⁰`; `χ` may depend on `x1, x2`
/// only so that `A³ = 0` survives.
pub fn gauge_apply(p: &Potential, chi: &Expr) -> Result<Potential, EquivError> {
    if chi.depends_on_coord(Coord::T) {
        return Err(EquivError::Gauge("t"));
    }
    if !is_zero_expr(&chi.d(Coord::X3)) {
        return Err(EquivError::Gauge("x3"));
    }
    let a1 = &p.a1 + &chi.d(Coord::X1);
    let a2 = &p.a2 + &chi.d(Coord::X2);
    Ok(match &p.a0 {
        Some(a0) => Potential::with_couplings(a1, a2, a0.clone(), p.e.clone(), p.g.clone())
            .map_err(|e| EquivError::Spec("gauge".into(), e.to_string()))?,
        None => {
            let half_e2 = p.e.powi(2) * Expr::ratio(1, 2);
            let v = &p.v + half_e2 * (a1.powi(2) + a2.powi(2) - p.a1.powi(2) - p.a2.powi(2));
            Potential { a1, a2, a0: None, v, e: p.e.clone(), g: p.g.clone() }
        }
    })
}

/// Operator companion of [`gauge_apply`].
pub fn gauge_operator(q: &DiffOperator, chi: &Expr, e: &Expr) -> DiffOperator {
    q.conjugate_by(&(-(Expr::i() * e * chi)).exp())
}

/// One row of the free → repulsive-oscillator correspondence.
#[derive(Debug, Clone, Serialize)]
pub struct Transition {
    pub source: String,
    pub target: String,
    /// `c` with `q̃ = c · target`, when found.
    pub multiplier: Option<String>,
    #[serde(skip)]
    pub constant: Option<Expr>,
}

/// Conjugate the free generators by [`PointTransformation::oscillator`] and
/// express each in its named target.
pub fn oscillator_transitions(w: &Expr) -> Result<Vec<Transition>, EquivError> {
    let tr = PointTransformation::oscillator(w)?;
    let mut rows: Vec<(String, DiffOperator, String, DiffOperator)> = vec![
        ("P0".into(), Generator::p0(), "Am".into(), Generator::a_exp(-1, w)),
        ("D".into(), Generator::d(), "P0".into(), Generator::p0()),
        ("A".into(), Generator::a(), "Ap".into(), Generator::a_exp(1, w)),
    ];
    for a in 1..=3 {
        rows.push((format!("P{}", a), Generator::p(a), format!("Bm{}", a), Generator::b(-1, a, w)));
        rows.push((format!("G{}", a), Generator::g(a), format!("Bp{}", a), Generator::b(1, a, w)));
        rows.push((format!("L{}", a), Generator::l(a), format!("L{}", a), Generator::l(a)));
    }
    let mut out = Vec::new();
    for (src, q, tgt, target) in rows {
        let qt = tr.conjugate_operator(&q)?;
        let c = span_express(&qt, &[target]).ok().map(|v| v[0].clone());
        out.push(Transition { source: src, target: tgt, multiplier: c.as_ref().map(|x| x.to_string()), constant: c });
    }
    Ok(out)
}

/// Express a pulled-back operator in a basis of named generators.
pub fn express_in(q: &DiffOperator, names: &[&str]) -> Option<Vec<Expr>> {
    let basis: Vec<DiffOperator> = names.iter().map(|n| generator(n)).collect::<Option<_>>()?;
    span_express(q, &basis).ok()
}

/// Built-in families: `gauge:<χ>`, `mobius:ν,μ,λ`, `oscillator:ω`,
/// `freefall:κ1,κ2,κ3`.
pub fn parse_transformation(spec: &str, table: &SymbolTable) -> Result<PointTransformation, EquivError> {
    let (kind, args) =
        spec.split_once(':').ok_or_else(|| EquivError::Spec(spec.into(), "expected `kind:args`".into()))?;
    let list = || -> Result<Vec<Expr>, EquivError> {
        args.split(',').map(|a| parse_expr(a.trim(), table).map_err(EquivError::from)).collect()
    };
    let want = |v: Vec<Expr>, n: usize| -> Result<Vec<Expr>, EquivError> {
        if v.len() == n {
            Ok(v)
        } else {
            Err(EquivError::Spec(spec.into(), format!("expected {} arguments, found {}", n, v.len())))
        }
    };
    match kind.trim() {
        "gauge" => Ok(PointTransformation::gauge(&parse_expr(args, table)?, &Expr::one())),
        "mobius" => {
            let v = want(list()?, 3)?;
            PointTransformation::mobius(&v[0], &v[1], &v[2])
        }
        "oscillator" => {
            let v = want(list()?, 1)?;
            PointTransformation::oscillator(&v[0])
        }
        "freefall" => {
            let v = want(list()?, 3)?;
            Ok(PointTransformation::free_fall(&[v[0].clone(), v[1].clone(), v[2].clone()]))
        }
        other => Err(EquivError::Spec(spec.into(), format!("unknown family `{}`", other))),
    }
}
