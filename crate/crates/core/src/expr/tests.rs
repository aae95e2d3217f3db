use super::*;
use crate::expr::eval::NoFunctions;
use crate::expr::zero::zero_test;

fn p(s: &str) -> Expr {
    let t = SymbolTable::standard().with_function("F", 2).with_function("G", 1);
    parse_expr(s, &t).unwrap_or_else(|e| panic!("{s}: {e}"))
}

#[test]
fn like_terms_merge_and_cancel() {
    assert_eq!(p("x1 + x1 - 2*x1"), Expr::zero());
    assert_eq!(p("x1*x2/x1"), Expr::x(2));
    assert_eq!(p("(x1+x2)^2 - x1^2 - 2*x1*x2 - x2^2"), Expr::zero());
}

#[test]
fn exponentials_fuse_and_absorb_logs() {
    assert_eq!(p("exp(x1)*exp(-x1)"), Expr::one());
    assert_eq!(p("exp(2*ln(x1))"), p("x1^2"));
    assert_eq!(p("exp(ln(t)/2)^2"), Expr::t());
    assert_eq!(p("exp(omega*t)^2"), p("exp(2*omega*t)"));
    assert_eq!(p("ln(x1*x2)"), p("ln(x1) + ln(x2)"));
    assert_eq!(p("ln(exp(x3))"), Expr::x(3));
}

#[test]
fn radicals_normalize() {
    assert_eq!(p("sqrt(2)^2"), Expr::int(2));
    assert_eq!(p("sqrt(8)"), p("2*sqrt(2)"));
    assert_eq!(p("sqrt(-4)"), p("2*i"));
    assert_eq!(p("sqrt(x1^2+x2^2)^2"), p("x1^2+x2^2"));
    assert_eq!(p("rt^3"), p("(x1^2+x2^2)*rt"));
    assert_eq!(p("(2*x1^2 + 2*x2^2)^(1/2)"), p("sqrt(2)*rt"));
}

#[test]
fn base_content_is_extracted() {
    // x3^-2 (x1^2 + x2^2 + x3^2) has content x3^-2.
    let a = p("(1 + rt^2/x3^2)^-1");
    assert_eq!(a, p("x3^2/r^2"));
}

#[test]
fn odd_functions_normalize_sign() {
    assert_eq!(p("sin(-x1)"), p("-sin(x1)"));
    assert_eq!(p("cos(-x1)"), p("cos(x1)"));
    assert_eq!(p("arctan(-x1)"), p("-arctan(x1)"));
}

#[test]
fn derivative_of_arctan_phi() {
    let phi = named::phi();
    let d = phi.d(Coord::X1);
    assert_eq!(d, p("-x2/(x1^2+x2^2)"));
    let dtheta = named::theta().d(Coord::X1);
    assert_eq!(dtheta, p("x1*x3/(r^2*rt)"));
}

#[test]
fn derivative_chain_rule_for_functions() {
    let e = p("F(phi, x3)");
    let d = e.d(Coord::X3);
    assert_eq!(d, p("D2[F](phi, x3)"));
    let d1 = e.d(Coord::X1);
    assert_eq!(d1, p("-x2/rt^2 * D1[F](phi, x3)"));
}

#[test]
fn derivative_matches_finite_difference() {
    let e = p("arctan(x2/x1)");
    let d = e.d(Coord::X1).eval_at(0.0, [1.0, 2.0, 0.0]).unwrap().re;
    let h = 1e-5;
    let f = |x: f64| e.eval_at(0.0, [x, 2.0, 0.0]).unwrap().re;
    let fd = (f(1.0 + h) - f(1.0 - h)) / (2.0 * h);
    assert!((d - fd).abs() < 1e-8, "{d} vs {fd}");
    assert!((d + 0.4).abs() < 1e-14);
}

#[test]
fn zero_test_trig_identity() {
    let e = p("tan(phi) - sin(phi)/cos(phi)");
    assert_eq!(is_zero(&e), Decision::Zero);
    let e = p("sin(x1)^2 + cos(x1)^2 - 1");
    assert_eq!(is_zero(&e), Decision::Zero);
    let e = p("tanh(t) - 1");
    let z = zero_test(&e);
    assert_eq!(z.decision, Decision::NonZero);
    assert!(z.witness.is_some());
}

#[test]
fn zero_test_rational_identity() {
    let e = p("x1^2/rt^2 + x2^2/rt^2 - 1");
    assert_eq!(is_zero(&e), Decision::Zero);
    let e = p("1/(x1-x2) - 1/(x2-x1) - 2/(x1-x2)");
    assert_eq!(is_zero(&e), Decision::Zero);
}

#[test]
fn tan_phi_is_ratio() {
    // tan(arctan(u)) evaluates to u numerically even though the atom stays.
    let v = p("tan(phi)").eval_at(0.0, [0.7, 0.3, 0.0]).unwrap();
    assert!((v.re - 0.3 / 0.7).abs() < 1e-14);
}

#[test]
fn substitution_of_time() {
    let e = p("x1^2 + x2^2 + x3^2");
    let s = Substitution::new()
        .coord(Coord::X1, p("sqrt(2*omega)*exp(omega*t)*x1"))
        .coord(Coord::X2, p("sqrt(2*omega)*exp(omega*t)*x2"))
        .coord(Coord::X3, p("sqrt(2*omega)*exp(omega*t)*x3"));
    assert_eq!(e.substitute(&s), p("2*omega*exp(2*omega*t)*r^2"));
    let back = p("exp(2*omega*t)").subs_coord(Coord::T, &p("ln(t)/(2*omega)"));
    assert_eq!(back, Expr::t());
}

#[test]
fn function_binding_instantiates_derivatives() {
    let t = SymbolTable::standard();
    let b = FunctionBinding::parse("_1^2*sin(_2)", 2, &t).unwrap();
    let s = Substitution::new().function("F", b);
    assert_eq!(p("D12[F](x1, x2)").substitute(&s), p("2*x1*cos(x2)"));
}

#[test]
fn printing_round_trips() {
    let table = SymbolTable::standard().with_function("F", 2).with_function("G", 1);
    for src in [
        "x1^2 - 3/2*i*x2 + (1/2 + 2*i)*t",
        "exp(i*omega*t)*D12[F](phi, x3)/r^3",
        "ln(rt) + sqrt(3)*G(theta)^-2",
        "(x1 + x2)^(1/3) - tanh(2*t)^2 + arctan(x3/x1)",
        "sqrt(-2)*kappa^(-3/2)",
    ] {
        let e = parse_expr(src, &table).unwrap();
        let back = parse_expr(&e.to_string(), &table).unwrap();
        assert_eq!(e, back, "{src} -> {e}");
    }
}

#[test]
fn evaluation_reports_singularities() {
    let e = p("1/x1");
    assert!(e.eval(&eval::NumericPoint::new(0.0, [0.0, 1.0, 1.0]), &NoFunctions).is_err());
    assert!(p("ln(x1)").eval_at(0.0, [0.0, 1.0, 1.0]).is_err());
}
