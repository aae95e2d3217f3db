use super::*;
use crate::catalog::bundled;
use crate::diffop::generator;

fn entry(id: &str) -> TableEntry {
    bundled().into_iter().find(|e| e.id == id).unwrap()
}

/// Instantiated potential, the named symmetry, its `α` and parameter values.
fn setup(id: &str, spec: &str, bindings: &[(&str, &str)]) -> (Potential, DiffOperator, Expr, BTreeMap<String, f64>) {
    let b = bindings.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    let (p, ops) = instantiate_reading(&entry(id), &b).unwrap();
    let q = ops.into_iter().find(|(s, _)| s == spec).unwrap().1;
    let sc = check_symmetry(&p, &q).unwrap();
    assert_eq!(sc.satisfied, Decision::Zero);
    let mut exprs = vec![p.a1.clone(), p.a2.clone(), p.v.clone(), sc.alpha.clone()];
    exprs.extend(q.terms().map(|(_, c)| c.clone()));
    let params = default_params(&exprs, &BTreeMap::new());
    (p, q, sc.alpha, params)
}

fn env(params: &BTreeMap<String, f64>) -> Env<'_> {
    Env { params, functions: &GENERIC }
}

#[test]
fn free_translation_is_exact() {
    let none = BTreeMap::new();
    let q = generator("P1").unwrap();
    let r = residual_norm(
        &Potential::free(),
        &q,
        &Expr::zero(),
        &GridSpec::default(),
        &TestWavefunction::gaussian(1.0),
        env(&none),
    )
    .unwrap();
    assert!(r < 1e-10, "{r}");
}

#[test]
fn multiplication_is_not_a_symmetry() {
    let none = BTreeMap::new();
    let q = DiffOperator::scalar(Expr::x(1));
    let r = residual_norm(
        &Potential::free(),
        &q,
        &Expr::zero(),
        &GridSpec::default(),
        &TestWavefunction::default(),
        env(&none),
    )
    .unwrap();
    assert!(r > 1e-2, "{r}");
}

#[test]
fn oscillator_translation_below_tolerance() {
    let (p, q, alpha, params) = setup("3.10", "Bp3(omega3)", &[("omega3", "1")]);
    let r = residual_norm(&p, &q, &alpha, &GridSpec::default(), &TestWavefunction::default(), env(&params)).unwrap();
    assert!(r < 1e-8, "{r}");
}

#[test]
fn landau_convergence_orders() {
    let (p, q, alpha, params) = setup("2.9", "P1 - alpha*x2", &[]);
    let psi = TestWavefunction::default();
    let hs = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0];
    for order in [StencilOrder::Second, StencilOrder::Fourth] {
        let g = GridSpec::default().with_order(order);
        let study = convergence_study(&p, &q, &alpha, &g, &psi, &hs, env(&params)).unwrap();
        assert!(study.consistent(0.5), "{study:?}");
    }
    let g = GridSpec::default();
    let a = residual_norm(&p, &q, &alpha, &g.with_h(1.0 / 16.0), &psi, env(&params)).unwrap();
    let b = residual_norm(&p, &q, &alpha, &g.with_h(1.0 / 32.0), &psi, env(&params)).unwrap();
    let ratio = a / b;
    assert!((11.0..23.0).contains(&ratio), "{ratio}");
}

#[test]
fn perturbed_scalar_potential_is_detected() {
    let (p, q, alpha, params) = setup("3.1", "Bp3(omega)", &[]);
    let g = GridSpec::default();
    let psi = TestWavefunction::default();
    let exact = residual_norm(&p, &q, &alpha, &g, &psi, env(&params)).unwrap();
    let bent = Potential { v: &p.v * &Expr::ratio(101, 100), a0: None, ..p.clone() };
    let r = residual_norm(&bent, &q, &alpha, &g, &psi, env(&params)).unwrap();
    assert!(exact < 1e-8 && r > 1e-4, "{exact} {r}");
}

#[test]
fn refuses_near_singularity() {
    let (p, q, alpha, params) = setup("1.8", "D", &[]);
    let g = GridSpec { origin: [0.1, 0.0, 0.0, 0.0], ..GridSpec::default() };
    let err = residual_norm(&p, &q, &alpha, &g, &TestWavefunction::default(), env(&params)).unwrap_err();
    assert!(matches!(err, OracleError::NearSingularity { .. }), "{err}");
    // the same operator away from the origin is fine
    assert!(
        residual_norm(&p, &q, &alpha, &GridSpec::default(), &TestWavefunction::default(), env(&params)).unwrap() < 1e-8
    );
}

#[test]
fn verdict_survives_grid_shift() {
    let cfg = OracleConfig::default();
    let psi = TestWavefunction::default();
    let g = &cfg.grid;
    for (id, spec) in [("3.1", "Bm3(omega)"), ("2.9", "L3"), ("1.8", "A")] {
        let (p, q, alpha, params) = setup(id, spec, &[]);
        let a = residual_norm(&p, &q, &alpha, g, &psi, env(&params)).unwrap();
        let b = residual_norm(&p, &q, &alpha, &g.shifted(g.h / 3.0), &psi, env(&params)).unwrap();
        assert_eq!(cfg.oracle.verdict(a), cfg.oracle.verdict(b), "{id}");
        assert_eq!(cfg.oracle.verdict(a), OracleVerdict::Confirmed, "{id}");
    }
    let none = BTreeMap::new();
    let q = DiffOperator::scalar(Expr::x(2));
    let a = residual_norm(&Potential::free(), &q, &Expr::zero(), g, &psi, env(&none)).unwrap();
    let b = residual_norm(&Potential::free(), &q, &Expr::zero(), &g.shifted(g.h / 3.0), &psi, env(&none)).unwrap();
    assert_eq!(cfg.oracle.verdict(a), OracleVerdict::Refuted);
    assert_eq!(cfg.oracle.verdict(b), OracleVerdict::Refuted);
}

#[test]
fn analytic_path_matches_stencils() {
    let (p, q, alpha, params) = setup("4.4", "Bp1(omega) - alpha*exp(omega*t)*x2", &[]);
    let rep = cross_check(&p, &q, &alpha, &GridSpec::default(), &TestWavefunction::default(), env(&params)).unwrap();
    assert!(rep.analytic < 1e-12, "{rep:?}");
    assert!(rep.residual < 1e-8 && rep.discrepancy < 1e-8, "{rep:?}");
    // a refuted operator: both paths see the same non-zero residual
    let none = BTreeMap::new();
    let q = generator("P1").unwrap().add(&DiffOperator::scalar(Expr::t() * Expr::x(1)));
    let rep = cross_check(
        &Potential::free(),
        &q,
        &Expr::zero(),
        &GridSpec::default(),
        &TestWavefunction::default(),
        env(&none),
    )
    .unwrap();
    assert!(rep.analytic > 1e-2 && rep.discrepancy < 1e-8 * rep.analytic.max(1.0), "{rep:?}");
}

#[test]
fn entry_oracle_agrees_with_symbolic_verdicts() {
    let cfg = OracleConfig::default();
    for id in ["2.9", "3.5", "4.1"] {
        let r = oracle_entry(&entry(id), &BTreeMap::new(), &cfg, &TestWavefunction::default()).unwrap();
        assert!(r.agrees(), "{r:?}");
        assert!(r.perturbed.unwrap() > 1e-4, "{r:?}");
    }
}

#[test]
fn singular_factors_found() {
    let t = crate::expr::SymbolTable::standard();
    let e = crate::expr::parse_expr("kappa/r^2 + phi + ln(x3) + x1^2", &t).unwrap();
    let f = singular_factors(&e);
    assert!(f.len() >= 3, "{f:?}");
    assert!(singular_factors(&crate::expr::parse_expr("x1^2*exp(t)", &t).unwrap()).is_empty());
}

#[test]
fn config_keys() {
    let c =
        OracleConfig::from_toml("[grid]\nh = 0.03125\norder = 2\nextent = 0.25\n[oracle]\ntolerance = 1e-6\n").unwrap();
    assert_eq!(c.grid.h, 0.03125);
    assert_eq!(c.grid.order, StencilOrder::Second);
    assert_eq!(c.grid.extent, 0.25);
    assert_eq!(c.oracle.tolerance, 1e-6);
    assert_eq!(OracleConfig::default().oracle.tolerance, 1e-8);
    assert_eq!(OracleConfig::default().grid.h, 1.0 / 64.0);
    assert!(OracleConfig::from_toml("[grid]\norder = 3\n").is_err());
    assert!(OracleConfig::from_toml("[grid]\nh = -1.0\n").is_err());
    assert!(OracleConfig::from_toml("[grid]\nspacing = 1.0\n").is_err());
}
