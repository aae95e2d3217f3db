//! Named symmetry generators of the free equation and their exponential and
//! magnetic relatives.
//!
//! `P0 = i∂t`, `P_a = −i∂_a`, `G_a = tP_a − x_a`, `M_ab = x_aP_b − x_bP_a`,
//! `L1 = M23, L2 = M31, L3 = M12`, `D = 2tP0 − x_aP_a + 3i/2`,
//! `A = tD − t²P0 + r²/2`.  The sign of `r²/2` in `A` is the one that makes
//! `A` a symmetry of the free equation; `A_printed` keeps the opposite sign
//! for comparison.

use crate::expr::{named, Coord, Expr};

use super::DiffOperator;

/// Basis of the free-equation algebra, unit operator last.
pub const FREE_ALGEBRA: [&str; 13] = ["P0", "P1", "P2", "P3", "G1", "G2", "G3", "L1", "L2", "L3", "D", "A", "I"];

/// Parameter-free generator names accepted by [`generator`].
pub const GENERATOR_NAMES: &[&str] = &[
    "P0",
    "P1",
    "P2",
    "P3",
    "G1",
    "G2",
    "G3",
    "L1",
    "L2",
    "L3",
    "M12",
    "M13",
    "M21",
    "M23",
    "M31",
    "M32",
    "D",
    "A",
    "A_printed",
    "I",
    "Id",
    "dt",
    "d1",
    "d2",
    "d3",
];

/// Parameterized families accepted by [`generator_family`]: name and arity.
pub const GENERATOR_FAMILIES: &[(&str, usize)] = &[
    ("Bp1", 1),
    ("Bp2", 1),
    ("Bp3", 1),
    ("Bm1", 1),
    ("Bm2", 1),
    ("Bm3", 1),
    ("Ap", 1),
    ("Am", 1),
    ("Ph1", 1),
    ("Ph2", 1),
];

/// Generator constructors.
pub struct Generator;

impl Generator {
    pub fn p0() -> DiffOperator {
        DiffOperator::partial(Coord::T).scale(&Expr::i())
    }

    pub fn p(a: usize) -> DiffOperator {
        DiffOperator::partial(Coord::x(a)).scale(&-Expr::i())
    }

    pub fn g(a: usize) -> DiffOperator {
        Self::p(a).scale(&Expr::t()).sub(&DiffOperator::scalar(Expr::x(a)))
    }

    pub fn m(a: usize, b: usize) -> DiffOperator {
        Self::p(b).scale(&Expr::x(a)).sub(&Self::p(a).scale(&Expr::x(b)))
    }

    pub fn l(a: usize) -> DiffOperator {
        match a {
            1 => Self::m(2, 3),
            2 => Self::m(3, 1),
            3 => Self::m(1, 2),
            _ => panic!("L index {} out of range", a),
        }
    }

    /// `Σ_a x_a P_a`.
    fn x_dot_p() -> DiffOperator {
        (1..=3).fold(DiffOperator::zero(), |acc, a| acc.add(&Self::p(a).scale(&Expr::x(a))))
    }

    pub fn d() -> DiffOperator {
        Self::p0()
            .scale(&(Expr::int(2) * Expr::t()))
            .sub(&Self::x_dot_p())
            .add(&DiffOperator::scalar(Expr::ratio(3, 2) * Expr::i()))
    }

    fn a_with(sign: i64) -> DiffOperator {
        let t = Expr::t();
        Self::d()
            .scale(&t)
            .sub(&Self::p0().scale(&t.powi(2)))
            .add(&DiffOperator::scalar(named::r2() * Expr::ratio(sign, 2)))
    }

    pub fn a() -> DiffOperator {
        Self::a_with(1)
    }

    pub fn a_printed() -> DiffOperator {
        Self::a_with(-1)
    }

    pub fn id() -> DiffOperator {
        DiffOperator::identity()
    }

    /// `B^±_a(ω) = e^{±ωt}(P_a ∓ ωx_a)`.
    pub fn b(sign: i64, a: usize, w: &Expr) -> DiffOperator {
        let s = Expr::int(sign);
        let inner = Self::p(a).sub(&DiffOperator::scalar(&s * w * Expr::x(a)));
        inner.scale(&(&s * w * Expr::t()).exp())
    }

    /// `A^±(ω) = e^{±2ωt}(P0 + ω²r² ∓ (ω/2)(x_aP_a + P_ax_a))`, with
    /// `x_aP_a + P_ax_a = 2x_aP_a − 3i`.
    pub fn a_exp(sign: i64, w: &Expr) -> DiffOperator {
        let s = Expr::int(sign);
        let sym = Self::x_dot_p().scale(&Expr::int(2)).sub(&DiffOperator::scalar(Expr::int(3) * Expr::i()));
        let inner = Self::p0()
            .add(&DiffOperator::scalar(w.powi(2) * named::r2()))
            .sub(&sym.scale(&(&s * w * Expr::ratio(1, 2))));
        inner.scale(&(Expr::int(2) * &s * w * Expr::t()).exp())
    }

    /// `P̂1 = P1 − αx2`.
    pub fn ph1(alpha: &Expr) -> DiffOperator {
        Self::p(1).sub(&DiffOperator::scalar(alpha * Expr::x(2)))
    }

    /// `P̂2 = P2 + αx1`.
    pub fn ph2(alpha: &Expr) -> DiffOperator {
        Self::p(2).add(&DiffOperator::scalar(alpha * Expr::x(1)))
    }
}

/// Parameter-free generator by name.
pub fn generator(name: &str) -> Option<DiffOperator> {
    let digit = |k: usize| name[k..].parse::<usize>().ok().filter(|a| (1..=3).contains(a));
    Some(match name {
        "P0" => Generator::p0(),
        "D" => Generator::d(),
        "A" => Generator::a(),
        "A_printed" => Generator::a_printed(),
        "I" | "Id" => Generator::id(),
        "dt" => DiffOperator::partial(Coord::T),
        "d1" | "d2" | "d3" => DiffOperator::partial(Coord::x(digit(1)?)),
        _ if name.len() == 2 && name.starts_with('P') => Generator::p(digit(1)?),
        _ if name.len() == 2 && name.starts_with('G') => Generator::g(digit(1)?),
        _ if name.len() == 2 && name.starts_with('L') => Generator::l(digit(1)?),
        _ if name.len() == 3 && name.starts_with('M') => {
            let a = name[1..2].parse::<usize>().ok()?;
            let b = digit(2)?;
            if a == b || !(1..=3).contains(&a) {
                return None;
            }
            Generator::m(a, b)
        }
        _ => return None,
    })
}

/// Parameterized generator (`Bp3(omega)`, `Ap(omega)`, `Ph1(alpha)`, …).
pub fn generator_family(name: &str, args: &[Expr]) -> Option<DiffOperator> {
    let arity = GENERATOR_FAMILIES.iter().find(|(n, _)| *n == name)?.1;
    if args.len() != arity {
        return None;
    }
    let w = &args[0];
    let axis = || name[2..].parse::<usize>().ok();
    Some(match name {
        "Ap" => Generator::a_exp(1, w),
        "Am" => Generator::a_exp(-1, w),
        "Ph1" => Generator::ph1(w),
        "Ph2" => Generator::ph2(w),
        _ if name.starts_with("Bp") => Generator::b(1, axis()?, w),
        _ if name.starts_with("Bm") => Generator::b(-1, axis()?, w),
        _ => return None,
    })
}

pub fn family_arity(name: &str) -> Option<usize> {
    GENERATOR_FAMILIES.iter().find(|(n, _)| *n == name).map(|(_, a)| *a)
}
