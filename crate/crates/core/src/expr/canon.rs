//! Normal-form construction: products, powers, `exp`/`ln` fusion and
//! content extraction of multi-term bases.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Atom, Coeff, Elem, Exponent, Expr, Monomial, SumBuilder};

/// Normalize `coeff · Π atom^e` into an expression.
pub(crate) fn normalize(coeff: Coeff, mut factors: Vec<(Atom, Exponent)>) -> Expr {
    if coeff.is_zero() {
        return Expr::zero();
    }
    factors.sort_by(|a, b| a.0.cmp(&b.0));
    let mut merged: Vec<(Atom, Exponent)> = Vec::with_capacity(factors.len());
    for (a, e) in factors {
        if let Some(last) = merged.last_mut() {
            if last.0 == a {
                last.1 += e;
                continue;
            }
        }
        merged.push((a, e));
    }

    let mut coeff = coeff;
    let mut kept: Vec<(Atom, Exponent)> = Vec::with_capacity(merged.len());
    let mut exps: Vec<(Expr, Exponent)> = Vec::new();
    let mut expansions: Vec<Expr> = Vec::new();
    let mut reorder = false;
    for (a, e) in merged {
        if e.is_zero() {
            continue;
        }
        match a {
            Atom::Exp(u) => exps.push((u, e)),
            Atom::Radical(n) => {
                let k = e.floor();
                let f = e - k;
                if !k.is_zero() {
                    let base = BigRational::from_integer(n.clone());
                    coeff = &coeff * &Coeff::real(rat_pow(&base, *k.numer()));
                }
                if !f.is_zero() {
                    kept.push((Atom::Radical(n), f));
                }
            }
            Atom::Base(s) if e >= Exponent::one() => {
                let k = e.floor();
                let f = e - k;
                expansions.push(pow_int(&s, *k.numer() as u64));
                if !f.is_zero() {
                    kept.push((Atom::Base(s), f));
                }
            }
            Atom::Base(s) if s.as_number().is_some() && e.is_integer() => {
                let c = s.as_number().unwrap();
                coeff = &coeff * &c.pow_i64(*e.numer());
            }
            other => kept.push((other, e)),
        }
    }

    let mut exp_factor = None;
    if exps.len() == 1 && exps[0].1.is_one() {
        let (u, _) = exps.pop().unwrap();
        kept.push((Atom::Exp(u), Exponent::one()));
        reorder = true;
    } else if !exps.is_empty() {
        let mut arg = SumBuilder::default();
        for (u, e) in &exps {
            arg.add_expr(&u.scale(&exp_coeff(*e)));
        }
        exp_factor = Some(make_exp(&arg.build()));
    }
    if reorder {
        kept.sort_by(|a, b| a.0.cmp(&b.0));
    }

    let mut out = Expr::from_term(Monomial(kept), coeff);
    for x in expansions {
        out = mul(&out, &x);
    }
    if let Some(x) = exp_factor {
        out = mul(&out, &x);
    }
    out
}

fn exp_coeff(e: Exponent) -> Coeff {
    Coeff::ratio(*e.numer(), *e.denom())
}

fn rat_pow(b: &BigRational, k: i64) -> BigRational {
    if k >= 0 {
        num_traits::pow(b.clone(), k as usize)
    } else {
        num_traits::pow(b.recip(), (-k) as usize)
    }
}

fn merge_sorted(a: &Monomial, b: &Monomial) -> (Vec<(Atom, Exponent)>, bool) {
    // Returns merged factors and whether the trivial product is already canonical.
    let (x, y) = (&a.0, &b.0);
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    let mut simple = true;
    let mut seen_exp = false;
    while i < x.len() || j < y.len() {
        let take_left = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_right = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        let (atom, e) = if take_left {
            i += 1;
            (x[i - 1].0.clone(), x[i - 1].1)
        } else if take_right {
            j += 1;
            (y[j - 1].0.clone(), y[j - 1].1)
        } else {
            i += 1;
            j += 1;
            let e = x[i - 1].1 + y[j - 1].1;
            if matches!(x[i - 1].0, Atom::Radical(_) | Atom::Base(_) | Atom::Exp(_)) || e.is_zero() {
                simple = false;
            }
            (x[i - 1].0.clone(), e)
        };
        if let Atom::Exp(_) = atom {
            if seen_exp {
                simple = false;
            }
            seen_exp = true;
        }
        out.push((atom, e));
    }
    (out, simple)
}

pub(crate) fn mul(a: &Expr, b: &Expr) -> Expr {
    if a.is_zero() || b.is_zero() {
        return Expr::zero();
    }
    if let Some(c) = a.as_number() {
        return b.scale(&c);
    }
    if let Some(c) = b.as_number() {
        return a.scale(&c);
    }
    let mut acc = SumBuilder::default();
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let c = ca * cb;
            let (factors, simple) = merge_sorted(ma, mb);
            if simple {
                acc.add_term(Monomial(factors), c);
            } else {
                acc.add_expr(&normalize(c, factors));
            }
        }
    }
    acc.build()
}

pub(crate) fn pow_int(e: &Expr, k: u64) -> Expr {
    let mut base = e.clone();
    let mut acc = Expr::one();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc = mul(&acc, &base);
        }
        k >>= 1;
        if k > 0 {
            base = mul(&base, &base);
        }
    }
    acc
}

pub(crate) fn pow(e: &Expr, q: Exponent) -> Expr {
    if q.is_zero() {
        return Expr::one();
    }
    if e.is_zero() {
        assert!(q > Exponent::zero(), "zero raised to a non-positive power");
        return Expr::zero();
    }
    if q.is_one() {
        return e.clone();
    }
    if let Some((m, c)) = e.as_single_term() {
        let cpart = coeff_pow(c, q);
        let factors = m.0.iter().map(|(a, x)| (a.clone(), *x * q)).collect();
        return mul(&cpart, &normalize(Coeff::one(), factors));
    }
    if q.is_integer() && q > Exponent::zero() {
        return pow_int(e, *q.numer() as u64);
    }
    let (c, g, s) = content(e);
    let mut out = coeff_pow(&c, q);
    let gf = g.into_iter().map(|(a, x)| (a, x * q)).collect();
    out = mul(&out, &normalize(Coeff::one(), gf));
    mul(&out, &normalize(Coeff::one(), vec![(Atom::Base(s), q)]))
}

/// Power of a numeric coefficient, exact where possible: integral powers,
/// radicals of positive rationals, half-integral powers of negative reals.
pub(crate) fn coeff_pow(c: &Coeff, q: Exponent) -> Expr {
    if q.is_integer() {
        return Expr::constant(c.pow_i64(*q.numer()));
    }
    if c.is_real() && c.re().is_positive() {
        let mut factors = Vec::new();
        for (p, k) in factor(c.re().numer()) {
            factors.push((Atom::Radical(p), q * Exponent::from_integer(k as i64)));
        }
        for (p, k) in factor(c.re().denom()) {
            factors.push((Atom::Radical(p), -q * Exponent::from_integer(k as i64)));
        }
        return normalize(Coeff::one(), factors);
    }
    if c.is_real() && c.re().is_negative() && *q.denom() == 2 {
        let phase = Coeff::i().pow_i64(*q.numer());
        let mag = coeff_pow(&Coeff::real(-c.re().clone()), q);
        return mag.scale(&phase);
    }
    normalize(Coeff::one(), vec![(Atom::Base(Expr::constant(c.clone())), q)])
}

/// Trial-division factorization; a large cofactor is kept as one "prime".
fn factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_one() || n.is_zero() {
        return out;
    }
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(1_000_000u32);
    while &p * &p <= n && p <= limit {
        let mut k = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            k += 1;
        }
        if k > 0 {
            out.push((p.clone(), k));
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if !n.is_one() {
        out.push((n, 1));
    }
    out
}

/// Split a multi-term expression as `c · g · S` with `g` the monomial gcd
/// and `S` a sum whose leading coefficient is 1.
pub(crate) fn content(e: &Expr) -> (Coeff, Vec<(Atom, Exponent)>, Expr) {
    let n = e.term_count();
    let mut counts: BTreeMap<&Atom, (usize, Exponent)> = BTreeMap::new();
    for (m, _) in e.terms() {
        for (a, x) in &m.0 {
            let entry = counts.entry(a).or_insert((0, *x));
            entry.0 += 1;
            if *x < entry.1 {
                entry.1 = *x;
            }
        }
    }
    let g: Vec<(Atom, Exponent)> = counts
        .into_iter()
        .filter_map(|(a, (cnt, min))| {
            let min = if cnt < n { min.min(Exponent::zero()) } else { min };
            (!min.is_zero()).then(|| (a.clone(), min))
        })
        .collect();
    let divided = if g.is_empty() {
        e.clone()
    } else {
        let mut acc = SumBuilder::default();
        for (m, c) in e.terms() {
            let mut f = m.0.clone();
            f.extend(g.iter().map(|(a, x)| (a.clone(), -*x)));
            acc.add_expr(&normalize(c.clone(), f));
        }
        acc.build()
    };
    let lead = divided.leading_coeff();
    let s = divided.scale(&lead.recip());
    (lead, g, s)
}

pub(crate) fn make_exp(u: &Expr) -> Expr {
    if u.is_zero() {
        return Expr::one();
    }
    let mut rest = SumBuilder::default();
    let mut out = Expr::one();
    for (m, c) in u.terms() {
        if let [(Atom::Ln(x), e)] = m.0.as_slice() {
            if e.is_one() && c.is_real() {
                if let (Some(n), Some(d)) = (c.re().numer().to_i64(), c.re().denom().to_i64()) {
                    out = mul(&out, &pow(x, Exponent::new(n, d)));
                    continue;
                }
            }
        }
        rest.add_term(m.clone(), c.clone());
    }
    let rest = rest.build();
    if !rest.is_zero() {
        let ef = Expr::from_term(Monomial(vec![(Atom::Exp(rest), Exponent::one())]), Coeff::one());
        out = mul(&out, &ef);
    }
    out
}

fn ln_coeff(c: &Coeff) -> Expr {
    if c.is_one() {
        return Expr::zero();
    }
    if c.is_real() && c.re().is_positive() {
        let mut acc = SumBuilder::default();
        for (p, k) in factor(c.re().numer()) {
            acc.add_expr(
                &ln_leaf(Expr::constant(Coeff::real(BigRational::from_integer(p)))).scale(&Coeff::int(k as i64)),
            );
        }
        for (p, k) in factor(c.re().denom()) {
            acc.add_expr(
                &ln_leaf(Expr::constant(Coeff::real(BigRational::from_integer(p)))).scale(&Coeff::int(-(k as i64))),
            );
        }
        return acc.build();
    }
    ln_leaf(Expr::constant(c.clone()))
}

fn ln_leaf(arg: Expr) -> Expr {
    Expr::from_term(Monomial(vec![(Atom::Ln(arg), Exponent::one())]), Coeff::one())
}

fn ln_atom(a: &Atom) -> Expr {
    match a {
        Atom::Exp(v) => v.clone(),
        Atom::Base(s) => ln_leaf(s.clone()),
        Atom::Radical(n) => ln_coeff(&Coeff::real(BigRational::from_integer(n.clone()))),
        other => ln_leaf(Expr::from_term(Monomial(vec![(other.clone(), Exponent::one())]), Coeff::one())),
    }
}

pub(crate) fn make_ln(u: &Expr) -> Expr {
    assert!(!u.is_zero(), "logarithm of zero");
    let mut acc = SumBuilder::default();
    let (c, factors, s) = if let Some((m, c)) = u.as_single_term() {
        (c.clone(), m.0.clone(), None)
    } else {
        let (c, g, s) = content(u);
        (c, g, Some(s))
    };
    acc.add_expr(&ln_coeff(&c));
    for (a, e) in &factors {
        acc.add_expr(&ln_atom(a).scale(&exp_coeff(*e)));
    }
    if let Some(s) = s {
        acc.add_expr(&ln_leaf(s));
    }
    acc.build()
}

pub(crate) fn make_elem(f: Elem, u: &Expr) -> Expr {
    if u.is_zero() {
        return if f == Elem::Cos { Expr::one() } else { Expr::zero() };
    }
    let negative = u.leading_coeff().is_negative();
    let (arg, sign) = if negative { (-u, if f.is_odd() { -1 } else { 1 }) } else { (u.clone(), 1) };
    let e = Expr::from_term(Monomial(vec![(Atom::Elem(f, arg), Exponent::one())]), Coeff::one());
    e.scale(&Coeff::int(sign))
}
