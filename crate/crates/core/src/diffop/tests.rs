use super::*;
use crate::expr::{named, Decision, Expr, SymbolTable};

fn op(s: &str) -> DiffOperator {
    parse_operator(s, &SymbolTable::standard().with_function("F", 2)).unwrap()
}

#[test]
fn canonical_commutation() {
    let d1 = DiffOperator::partial(Coord::X1);
    let x1 = DiffOperator::scalar(Expr::x(1));
    assert_eq!(d1.commutator(&x1).unwrap(), DiffOperator::identity());
    assert!(op("P1").commutator(&op("P2")).unwrap().is_zero());
}

#[test]
fn apply_examples() {
    assert_eq!(DiffOperator::partial(Coord::X1).apply(&Expr::x(1).powi(2)), Expr::int(2) * Expr::x(1));
    let k = [Expr::int(1), Expr::int(2), Expr::int(-1)];
    let phase = Expr::i() * ((0..3).map(|a| &k[a] * Expr::x(a + 1)).sum::<Expr>() - Expr::int(3) * Expr::t());
    let l = schrodinger_operator(&Potential::free());
    assert!(l.apply(&phase.exp()).is_zero());
    assert!(op("P3").apply(&Expr::app("F", vec![Expr::x(1), Expr::x(2)])).is_zero());
}

#[test]
fn printed_brackets() {
    let c = |a: &str, b: &str| op(a).commutator(&op(b)).unwrap();
    assert_eq!(c("P1", "G1"), DiffOperator::identity().scale(&Expr::i()));
    assert!(c("P1", "G2").is_zero());
    assert_eq!(c("P0", "G2"), op("i*P2"));
    assert_eq!(c("L1", "L2"), op("i*L3"));
    assert_eq!(c("P1", "L2"), op("i*P3"));
    assert_eq!(c("P0", "A"), op("i*D"));
    assert_eq!(c("Bm3(omega)", "Bp3(omega)"), op("2*i*omega"));
    assert_eq!(c("Ph2(alpha)", "Ph1(alpha)"), op("2*i*alpha"));
}

#[test]
fn dilatation_brackets_have_opposite_sign() {
    let c = |a: &str, b: &str| op(a).commutator(&op(b)).unwrap();
    assert_eq!(c("D", "P0"), op("-2*i*P0"));
    assert_eq!(c("D", "P1"), op("-i*P1"));
    assert_eq!(c("D", "G1"), op("i*G1"));
    assert_eq!(c("D", "A"), op("2*i*A"));
}

#[test]
fn free_generators_are_symmetries() {
    let free = Potential::free();
    for name in FREE_ALGEBRA {
        let chk = check_symmetry(&free, &generator(name).unwrap()).unwrap();
        assert_eq!(chk.satisfied, Decision::Zero, "{}", name);
    }
    let d = check_symmetry(&free, &op("D")).unwrap();
    assert_eq!(d.alpha, Expr::int(-2) * Expr::i());
    assert!(check_symmetry(&free, &op("L3")).unwrap().alpha.is_zero());
    let bad = check_symmetry(&free, &op("A_printed")).unwrap();
    assert_eq!(bad.satisfied, Decision::NonZero);
    let x1 = check_symmetry(&free, &op("x1")).unwrap();
    assert_eq!(x1.satisfied, Decision::NonZero);
}

#[test]
fn second_order_candidates_rejected() {
    let l = schrodinger_operator(&Potential::free());
    assert!(matches!(check_symmetry(&Potential::free(), &l), Err(SymmetryError::NotFirstOrder(2))));
}

#[test]
fn inverse_square_admits_conformal_algebra() {
    let kappa = Expr::param("kappa");
    let p = Potential::from_a0(Expr::zero(), Expr::zero(), &kappa / named::r2()).unwrap();
    for name in ["A", "D", "L1", "L2", "L3", "P0"] {
        assert!(check_symmetry(&p, &op(name)).unwrap().is_satisfied(), "{}", name);
    }
    assert_eq!(check_symmetry(&p, &op("P1")).unwrap().satisfied, Decision::NonZero);
}

#[test]
fn anisotropic_oscillator_exponential_generators() {
    let w = |k: usize| Expr::param(&format!("omega{}", k));
    let a0 = -(1..=3).map(|k| w(k).powi(2) * Expr::x(k).powi(2)).sum::<Expr>() * Expr::ratio(1, 2);
    let p = Potential::from_a0(Expr::zero(), Expr::zero(), a0).unwrap();
    for s in ["Bp1(omega1)", "Bm1(omega1)", "Bp2(omega2)", "Bm3(omega3)", "Bp3(omega3)"] {
        assert!(check_symmetry(&p, &op(s)).unwrap().is_satisfied(), "{}", s);
    }
}

#[test]
fn repulsive_oscillator_admits_exponential_conformal_pair() {
    let p = Potential::from_a0(Expr::zero(), Expr::zero(), -op_r2_half()).unwrap();
    for s in ["Ap(omega)", "Am(omega)", "Bp1(omega)", "Bm2(omega)"] {
        assert!(check_symmetry(&p, &op(s)).unwrap().is_satisfied(), "{}", s);
    }
}

fn op_r2_half() -> Expr {
    Expr::param("omega").powi(2) * named::r2() * Expr::ratio(1, 2)
}

#[test]
fn text_round_trip() {
    let q = op("Bp3(omega) - exp(omega*t)*F(x1,x2)");
    let table = SymbolTable::standard().with_function("F", 2);
    assert_eq!(DiffOperator::from_text(&q.to_text(), &table).unwrap(), q);
    assert!(DiffOperator::from_text("d[1,0]: x1", &table).is_err());
}

#[test]
fn order_cap_enforced() {
    let l = schrodinger_operator(&Potential::free());
    assert!(matches!(l.compose_capped(&l, 3), Err(OperatorError::OrderCap { order: 4, cap: 3 })));
}

#[test]
fn spec_shadowing_and_errors() {
    let t = SymbolTable::standard().with_param("D");
    assert_eq!(parse_operator("D", &t).unwrap(), DiffOperator::scalar(Expr::param("D")));
    assert!(parse_operator("exp(P1)", &SymbolTable::standard()).is_err());
    assert!(parse_operator("P1^(1/2)", &SymbolTable::standard()).is_err());
    assert_eq!(op("P1^2"), op("P1*P1"));
    assert_eq!(op("comm(P1, G1)"), op("i"));
}

#[test]
fn time_translation_scales_exponential_generators() {
    let c = op("P0").commutator(&op("Bm2(omega)")).unwrap();
    assert_eq!(c, op("-i*omega*Bm2(omega)"));
    let c = op("P0").commutator(&op("Ap(omega)")).unwrap();
    assert_eq!(c, op("2*i*omega*Ap(omega)"));
}
