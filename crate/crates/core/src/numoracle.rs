//! Finite-difference oracle for the symmetry criterion.
//!
//! `([Q,L] − αL)ψ` is evaluated on a lattice of sample centres in two
//! independent ways: by applying the numeric coefficients of `L` and `Q` to
//! a closed-form test function through nested central-difference stencils,
//! and by applying the operators to the test function symbolically (plain
//! differentiation, no commutator algebra) and evaluating the result. The
//! first is the oracle residual; the second isolates discretization error.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{instantiate_reading, TableEntry};
use crate::diffop::{check_symmetry, schrodinger_operator, DiffOperator, Potential};
use crate::expr::eval::CompiledExpr;
use crate::expr::{Atom, Coeff, Coord, Decision, EvalError, Expr, FunctionProvider, GenericFunctions, NumericPoint};

/// Stand-ins for unbound function symbols.
pub static GENERIC: GenericFunctions = GenericFunctions { seed: 0 };

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("sample point {point:?} is within {margin} of the singular locus {factor} = 0 (|value| = {value:.3e})")]
    NearSingularity { point: [f64; 4], factor: String, value: f64, margin: f64 },
    #[error("test function nearly vanishes at {0:?}")]
    Vanishing([f64; 4]),
    #[error("operator of order {0} per axis is not supported by the stencils")]
    Order(u32),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("setup: {0}")]
    Setup(String),
}

/// Central-difference accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum StencilOrder {
    Second,
    Fourth,
}

impl StencilOrder {
    pub fn as_u32(self) -> u32 {
        match self {
            StencilOrder::Second => 2,
            StencilOrder::Fourth => 4,
        }
    }
}

impl TryFrom<u32> for StencilOrder {
    type Error = String;
    fn try_from(n: u32) -> Result<Self, String> {
        match n {
            2 => Ok(StencilOrder::Second),
            4 => Ok(StencilOrder::Fourth),
            _ => Err(format!("stencil order must be 2 or 4, got {n}")),
        }
    }
}

impl From<StencilOrder> for u32 {
    fn from(s: StencilOrder) -> u32 {
        s.as_u32()
    }
}

/// Sample centres and stencil spacing.
///
/// Centres form a `points³ × t_points` lattice on `origin + [−extent, extent]³`
/// in space and `origin_t + [0, t_extent]` in time; each centre is
/// differentiated with spacing `h` (space) and `tau` (time).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub h: f64,
    pub tau: f64,
    pub order: StencilOrder,
    pub extent: f64,
    pub t_extent: f64,
    pub points: usize,
    pub t_points: usize,
    /// Lattice offset `(t, x1, x2, x3)`.
    pub origin: [f64; 4],
    /// Minimum `|f|` for every singular factor `f` of the coefficients.
    pub margin: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            h: 1.0 / 64.0,
            tau: 1.0 / 64.0,
            order: StencilOrder::Fourth,
            extent: 0.5,
            t_extent: 0.5,
            points: 3,
            t_points: 2,
            origin: [0.125, 2.5, 2.0, 1.5],
            margin: 0.05,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), OracleError> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.h) || !pos(self.tau) {
            return Err(OracleError::Grid("h and tau must be positive".into()));
        }
        if !(self.extent.is_finite() && self.extent >= 0.0) || !(self.t_extent.is_finite() && self.t_extent >= 0.0) {
            return Err(OracleError::Grid("extents must be non-negative".into()));
        }
        if self.points == 0 || self.t_points == 0 {
            return Err(OracleError::Grid("at least one point per axis".into()));
        }
        if !(self.margin.is_finite() && self.margin >= 0.0) {
            return Err(OracleError::Grid("margin must be non-negative".into()));
        }
        Ok(())
    }

    pub fn with_h(&self, h: f64) -> Self {
        GridSpec { h, tau: h, ..self.clone() }
    }

    pub fn with_order(&self, order: StencilOrder) -> Self {
        GridSpec { order, ..self.clone() }
    }

    /// Same lattice moved by `d` in every coordinate.
    pub fn shifted(&self, d: f64) -> Self {
        let mut g = self.clone();
        for o in &mut g.origin {
            *o += d;
        }
        g
    }

    pub fn centres(&self) -> Vec<[f64; 4]> {
        let axis = |n: usize, lo: f64, hi: f64| -> Vec<f64> {
            if n == 1 {
                return vec![(lo + hi) / 2.0];
            }
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        };
        let ts = axis(self.t_points, self.origin[0], self.origin[0] + self.t_extent);
        let xs: Vec<Vec<f64>> =
            (1..4).map(|a| axis(self.points, self.origin[a] - self.extent, self.origin[a] + self.extent)).collect();
        let mut out = Vec::new();
        for &t in &ts {
            for &x1 in &xs[0] {
                for &x2 in &xs[1] {
                    for &x3 in &xs[2] {
                        out.push([t, x1, x2, x3]);
                    }
                }
            }
        }
        out
    }
}

/// `(1 + Σ c·t^a x1^b x2^c x3^d) · exp(−|x − c|²/(2σ²) + i(k·x − E t))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestWavefunction {
    pub centre: [f64; 3],
    pub width: f64,
    pub k: [f64; 3],
    pub energy: f64,
    /// Polynomial terms `(coefficient, [a, b, c, d])` added to 1.
    pub poly: Vec<(f64, [u8; 4])>,
}

impl Default for TestWavefunction {
    fn default() -> Self {
        TestWavefunction {
            centre: [2.5, 2.0, 1.5],
            width: 3.0,
            k: [0.25, -0.125, 0.1875],
            energy: 0.125,
            poly: vec![(0.125, [0, 1, 0, 0]), (-0.0625, [0, 0, 1, 1]), (0.03125, [1, 0, 0, 1])],
        }
    }
}

impl TestWavefunction {
    /// Pure Gaussian without plane wave or polynomial.
    pub fn gaussian(width: f64) -> Self {
        TestWavefunction { centre: [0.0; 3], width, k: [0.0; 3], energy: 0.0, poly: vec![] }
    }

    pub fn to_expr(&self) -> Expr {
        let c = |v: f64| Expr::constant(Coeff::from_f64(v).expect("finite"));
        let mut gauss = Expr::zero();
        let mut phase = Expr::zero();
        for a in 0..3 {
            let d = Expr::x(a + 1) - c(self.centre[a]);
            gauss = gauss + &d * &d;
            phase = phase + c(self.k[a]) * Expr::x(a + 1);
        }
        phase = phase - c(self.energy) * Expr::t();
        let exponent = -(gauss * c(1.0 / (2.0 * self.width * self.width))) + Expr::i() * phase;
        let mut poly = Expr::one();
        for (coef, m) in &self.poly {
            let mut term = c(*coef);
            for (i, &k) in m.iter().enumerate() {
                term = term * Expr::coord(Coord::from_index(i)).powi(k as i64);
            }
            poly = poly + term;
        }
        poly * exponent.exp()
    }
}

/// Parameter values and function stand-ins for numeric evaluation.
#[derive(Clone, Copy)]
pub struct Env<'a> {
    pub params: &'a BTreeMap<String, f64>,
    pub functions: &'a dyn FunctionProvider,
}

/// Deterministic values in `[0.25, 0.75)` for every parameter of `exprs`,
/// overridden by `given`; `pi` is π.
pub fn default_params<'e>(
    exprs: impl IntoIterator<Item = &'e Expr>,
    given: &BTreeMap<String, f64>,
) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for e in exprs {
        for p in e.params() {
            let name = p.to_string();
            let v = if name == "pi" {
                std::f64::consts::PI
            } else {
                let h = name.bytes().fold(17u64, |h, b| h.wrapping_mul(131).wrapping_add(b as u64));
                0.25 + (h % 1000) as f64 / 2000.0
            };
            out.insert(name, v);
        }
    }
    out.extend(given.iter().map(|(k, v)| (k.clone(), *v)));
    out
}

/// Operator with compiled coefficients.
struct NumericOperator {
    terms: Vec<([u8; 4], CompiledExpr)>,
}

impl NumericOperator {
    fn new(op: &DiffOperator) -> Result<Self, OracleError> {
        let mut terms = Vec::new();
        for (m, c) in op.terms() {
            if let Some(&k) = m.0.iter().find(|&&k| k > 2) {
                return Err(OracleError::Order(k as u32));
            }
            terms.push((m.0, CompiledExpr::new(c)));
        }
        Ok(NumericOperator { terms })
    }

    fn apply<F>(&self, f: &F, p: &[f64; 4], g: &GridSpec, env: Env) -> Result<Complex64, OracleError>
    where
        F: Fn(&[f64; 4]) -> Result<Complex64, OracleError>,
    {
        let np = point(p, env);
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let coef = c.eval(&np, env.functions)?;
            acc += coef * derivative(f, p, *m, g)?;
        }
        Ok(acc)
    }
}

fn point(p: &[f64; 4], env: Env) -> NumericPoint {
    let mut np = NumericPoint::new(p[0], [p[1], p[2], p[3]]);
    for (k, v) in env.params {
        np.params.insert(k.clone(), Complex64::new(*v, 0.0));
    }
    np
}

/// `∂^m f(p)` by tensor-product central differences.
fn derivative<F>(f: &F, p: &[f64; 4], m: [u8; 4], g: &GridSpec) -> Result<Complex64, OracleError>
where
    F: Fn(&[f64; 4]) -> Result<Complex64, OracleError>,
{
    let Some(axis) = m.iter().position(|&k| k > 0) else {
        return f(p);
    };
    let mut rest = m;
    rest[axis] = 0;
    let step = if axis == 0 { g.tau } else { g.h };
    let (weights, denom): (&[(i32, f64)], f64) = match (m[axis], g.order) {
        (1, StencilOrder::Second) => (&[(-1, -1.0), (1, 1.0)], 2.0 * step),
        (1, StencilOrder::Fourth) => (&[(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)], 12.0 * step),
        (2, StencilOrder::Second) => (&[(-1, 1.0), (0, -2.0), (1, 1.0)], step * step),
        (2, StencilOrder::Fourth) => (&[(-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)], 12.0 * step * step),
        (k, _) => return Err(OracleError::Order(k as u32)),
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for &(off, w) in weights {
        let mut q = *p;
        q[axis] += off as f64 * step;
        acc += w * derivative(f, &q, rest, g)?;
    }
    Ok(acc / denom)
}

/// Factors whose zero set makes a coefficient singular: negative or
/// fractional powers of coordinates and sums, and logarithm arguments.
pub fn singular_factors(e: &Expr) -> Vec<Expr> {
    let mut out: Vec<Expr> = Vec::new();
    collect_singular(e, &mut out);
    out
}

fn collect_singular(e: &Expr, out: &mut Vec<Expr>) {
    let push = |x: Expr, out: &mut Vec<Expr>| {
        if !x.is_coordinate_free() && !out.contains(&x) {
            out.push(x);
        }
    };
    for (m, _) in e.terms() {
        for (a, k) in m.factors() {
            let smooth = *k.denom() == 1 && *k.numer() > 0;
            match a {
                Atom::Coord(_) | Atom::Base(_) if !smooth => push(a.to_expr(), out),
                Atom::Ln(x) => {
                    push(x.clone(), out);
                    collect_singular(x, out);
                }
                Atom::Base(x) | Atom::Exp(x) | Atom::Elem(_, x) => collect_singular(x, out),
                Atom::App(app) => app.args.iter().for_each(|x| collect_singular(x, out)),
                _ => {}
            }
        }
    }
}

/// Both evaluation paths at every centre.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    /// Finite-difference residual `max |([Q,L] − αL)ψ| / (1 + |Lψ|)`.
    pub residual: f64,
    /// Same norm with exact derivatives of `ψ`.
    pub analytic: f64,
    /// `max |fd − analytic| / (1 + |Lψ|)`.
    pub discrepancy: f64,
    pub points: usize,
    pub h: f64,
    pub order: u32,
}

struct Prepared {
    l: NumericOperator,
    q: NumericOperator,
    alpha: CompiledExpr,
    psi: CompiledExpr,
    singular: Vec<(String, CompiledExpr)>,
}

fn prepare(
    p: &Potential,
    q: &DiffOperator,
    alpha: &Expr,
    psi: &TestWavefunction,
) -> Result<(Prepared, DiffOperator), OracleError> {
    let l = schrodinger_operator(p);
    let mut singular = Vec::new();
    let mut seen = Vec::new();
    for (_, c) in l.terms().chain(q.terms()) {
        for f in singular_factors(c) {
            if !seen.contains(&f) {
                singular.push((f.to_string(), CompiledExpr::new(&f)));
                seen.push(f);
            }
        }
    }
    for f in singular_factors(alpha) {
        if !seen.contains(&f) {
            singular.push((f.to_string(), CompiledExpr::new(&f)));
            seen.push(f);
        }
    }
    let prepared = Prepared {
        l: NumericOperator::new(&l)?,
        q: NumericOperator::new(q)?,
        alpha: CompiledExpr::new(alpha),
        psi: CompiledExpr::new(&psi.to_expr()),
        singular,
    };
    Ok((prepared, l))
}

fn guard(pr: &Prepared, c: &[f64; 4], g: &GridSpec, env: Env) -> Result<(), OracleError> {
    let np = point(c, env);
    for (name, f) in &pr.singular {
        let v = f.eval(&np, env.functions)?.norm();
        if v < g.margin {
            return Err(OracleError::NearSingularity { point: *c, factor: name.clone(), value: v, margin: g.margin });
        }
    }
    if pr.psi.eval(&np, env.functions)?.norm() < 1e-8 {
        return Err(OracleError::Vanishing(*c));
    }
    Ok(())
}

/// Finite-difference residual and `|Lψ|` at one centre.
fn fd_at(pr: &Prepared, c: &[f64; 4], g: &GridSpec, env: Env) -> Result<(Complex64, Complex64), OracleError> {
    let psi = |p: &[f64; 4]| -> Result<Complex64, OracleError> { Ok(pr.psi.eval(&point(p, env), env.functions)?) };
    let l_psi = |p: &[f64; 4]| pr.l.apply(&psi, p, g, env);
    let q_psi = |p: &[f64; 4]| pr.q.apply(&psi, p, g, env);
    let ql = pr.q.apply(&l_psi, c, g, env)?;
    let lq = pr.l.apply(&q_psi, c, g, env)?;
    let lp = l_psi(c)?;
    let a = pr.alpha.eval(&point(c, env), env.functions)?;
    Ok((ql - lq - a * lp, lp))
}

/// `max` over the lattice of `|([Q,L] − αL)ψ| / (1 + |Lψ|)` by nested stencils.
pub fn residual_norm(
    p: &Potential,
    q: &DiffOperator,
    alpha: &Expr,
    g: &GridSpec,
    psi: &TestWavefunction,
    env: Env,
) -> Result<f64, OracleError> {
    g.validate()?;
    let (pr, _) = prepare(p, q, alpha, psi)?;
    let centres = g.centres();
    let vals = centres
        .par_iter()
        .map(|c| {
            guard(&pr, c, g, env)?;
            let (r, lp) = fd_at(&pr, c, g, env)?;
            Ok(r.norm() / (1.0 + lp.norm()))
        })
        .collect::<Result<Vec<f64>, OracleError>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Finite-difference residual together with the exact-derivative path.
pub fn cross_check(
    p: &Potential,
    q: &DiffOperator,
    alpha: &Expr,
    g: &GridSpec,
    psi: &TestWavefunction,
    env: Env,
) -> Result<OracleReport, OracleError> {
    g.validate()?;
    let (pr, l) = prepare(p, q, alpha, psi)?;
    let psi_e = psi.to_expr();
    let l_psi = l.apply(&psi_e);
    let exact = q.apply(&l_psi) - l.apply(&q.apply(&psi_e)) - alpha * &l_psi;
    let exact = CompiledExpr::new(&exact);
    let l_psi = CompiledExpr::new(&l_psi);
    let centres = g.centres();
    let rows = centres
        .par_iter()
        .map(|c| {
            guard(&pr, c, g, env)?;
            let (r, _) = fd_at(&pr, c, g, env)?;
            let np = point(c, env);
            let ex = exact.eval(&np, env.functions)?;
            let scale = 1.0 + l_psi.eval(&np, env.functions)?.norm();
            Ok([r.norm() / scale, ex.norm() / scale, (r - ex).norm() / scale])
        })
        .collect::<Result<Vec<[f64; 3]>, OracleError>>()?;
    let mut m = [0.0f64; 3];
    for row in rows {
        for i in 0..3 {
            m[i] = m[i].max(row[i]);
        }
    }
    Ok(OracleReport {
        residual: m[0],
        analytic: m[1],
        discrepancy: m[2],
        points: centres.len(),
        h: g.h,
        order: g.order.as_u32(),
    })
}

/// Residuals for a sequence of spacings and the least-squares slope of
/// `log residual` against `log h`.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub order: u32,
    pub rows: Vec<(f64, f64)>,
    pub slope: f64,
}

impl ConvergenceStudy {
    /// Slope within `tol` of the stencil order.
    pub fn consistent(&self, tol: f64) -> bool {
        (self.slope - self.order as f64).abs() <= tol
    }
}

pub fn convergence_study(
    p: &Potential,
    q: &DiffOperator,
    alpha: &Expr,
    g: &GridSpec,
    psi: &TestWavefunction,
    hs: &[f64],
    env: Env,
) -> Result<ConvergenceStudy, OracleError> {
    let rows = hs
        .iter()
        .map(|&h| residual_norm(p, q, alpha, &g.with_h(h), psi, env).map(|r| (h, r)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConvergenceStudy { order: g.order.as_u32(), slope: loglog_slope(&rows), rows })
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn loglog_slope(rows: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().filter(|(_, y)| *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Grid and tolerance settings, read from the `[grid]` and `[oracle]` tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub grid: GridSpec,
    pub oracle: OracleSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSettings {
    /// Residual below which a symmetry counts as numerically confirmed.
    pub tolerance: f64,
    /// A refuted symmetry must exceed `tolerance × separation`.
    pub separation: f64,
    /// Halvings of `h` tried while a residual stays above `tolerance`.
    pub refinements: u32,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings { tolerance: 1e-8, separation: 10.0, refinements: 2 }
    }
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { grid: GridSpec::default(), oracle: OracleSettings::default() }
    }
}

impl OracleConfig {
    pub fn from_toml(src: &str) -> Result<Self, String> {
        let c: OracleConfig = toml::from_str(src).map_err(|e| e.to_string())?;
        c.grid.validate().map_err(|e| e.to_string())?;
        Ok(c)
    }
}

/// Numeric verdict against the configured tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleVerdict {
    Confirmed,
    Refuted,
    /// Between the tolerance and the separation threshold.
    Inconclusive,
}

impl OracleSettings {
    pub fn verdict(&self, residual: f64) -> OracleVerdict {
        if residual < self.tolerance {
            OracleVerdict::Confirmed
        } else if residual > self.tolerance * self.separation {
            OracleVerdict::Refuted
        } else {
            OracleVerdict::Inconclusive
        }
    }

    /// Verdict from residuals at successively halved `h`.  A residual above
    /// tolerance that still shrinks at (at least half) the stencil order is
    /// truncation error, not a broken symmetry: it is never refuted.
    pub fn refined_verdict(&self, rows: &[(f64, f64)], order: StencilOrder) -> OracleVerdict {
        let Some(&(_, last)) = rows.last() else {
            return OracleVerdict::Inconclusive;
        };
        let v = self.verdict(last);
        if v != OracleVerdict::Refuted || rows.len() < 2 {
            return v;
        }
        let prev = rows[rows.len() - 2].1;
        let converging = prev / last >= 2f64.powi(order.as_u32() as i32 / 2);
        if converging {
            OracleVerdict::Inconclusive
        } else {
            v
        }
    }
}

/// Residuals at `g.h, g.h/2, …` until one is below tolerance or
/// `settings.refinements` halvings are spent.
pub fn refine(
    p: &Potential,
    q: &DiffOperator,
    alpha: &Expr,
    g: &GridSpec,
    settings: &OracleSettings,
    psi: &TestWavefunction,
    env: Env,
) -> Result<Vec<(f64, f64)>, OracleError> {
    let mut rows = vec![(g.h, residual_norm(p, q, alpha, g, psi, env)?)];
    let mut h = g.h;
    while rows.last().map_or(false, |r| r.1 >= settings.tolerance) && rows.len() <= settings.refinements as usize {
        h /= 2.0;
        rows.push((h, residual_norm(p, q, alpha, &g.with_h(h), psi, env)?));
    }
    Ok(rows)
}

/// Oracle outcome for one symmetry of an instantiated entry.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryOracle {
    pub spec: String,
    pub symbolic: Decision,
    /// Residual at the finest spacing tried.
    pub residual: Option<f64>,
    /// `(h, residual)` for every spacing tried.
    pub refinement: Vec<(f64, f64)>,
    pub verdict: Option<OracleVerdict>,
    /// Symbolic `Zero` is confirmed, symbolic `NonZero` is refuted.
    pub agrees: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryOracle {
    pub id: String,
    pub symmetries: Vec<SymmetryOracle>,
    /// Largest residual after multiplying `V` by `1.01`.
    pub perturbed: Option<f64>,
}

impl EntryOracle {
    pub fn agrees(&self) -> bool {
        self.symmetries.iter().all(|s| s.agrees)
    }

    /// A numeric verdict opposite to the symbolic one (inconclusive
    /// residuals and evaluation errors do not count).
    pub fn contradicts(&self) -> bool {
        self.symmetries.iter().any(|s| {
            matches!(
                (s.symbolic, s.verdict),
                (Decision::Zero, Some(OracleVerdict::Refuted)) | (Decision::NonZero, Some(OracleVerdict::Confirmed))
            )
        })
    }
}

/// Cross-check every symmetry of the effective reading of `e`, with
/// function symbols bound by `bindings` (unbound ones use [`GENERIC`]).
pub fn oracle_entry(
    e: &TableEntry,
    bindings: &BTreeMap<String, String>,
    cfg: &OracleConfig,
    psi: &TestWavefunction,
) -> Result<EntryOracle, OracleError> {
    let (p, ops) = instantiate_reading(e, bindings).map_err(|err| OracleError::Setup(err.to_string()))?;
    let mut exprs: Vec<Expr> = vec![p.a1.clone(), p.a2.clone(), p.v.clone()];
    for (_, q) in &ops {
        exprs.extend(q.terms().map(|(_, c)| c.clone()));
    }
    let params = default_params(&exprs, &BTreeMap::new());
    let env = Env { params: &params, functions: &GENERIC };
    let perturbed_p = Potential { v: &p.v * &Expr::ratio(101, 100), a0: None, ..p.clone() };
    let mut perturbed: Option<f64> = None;
    let mut symmetries = Vec::new();
    for (spec, q) in &ops {
        let sc = match check_symmetry(&p, q) {
            Ok(sc) => sc,
            Err(err) => {
                symmetries.push(SymmetryOracle {
                    spec: spec.clone(),
                    symbolic: Decision::Unknown,
                    residual: None,
                    refinement: Vec::new(),
                    verdict: None,
                    agrees: false,
                    error: Some(err.to_string()),
                });
                continue;
            }
        };
        match refine(&p, q, &sc.alpha, &cfg.grid, &cfg.oracle, psi, env) {
            Ok(rows) => {
                let r = rows.last().map_or(f64::NAN, |x| x.1);
                let v = cfg.oracle.refined_verdict(&rows, cfg.grid.order);
                let agrees = match sc.satisfied {
                    Decision::Zero => v == OracleVerdict::Confirmed,
                    Decision::NonZero => v == OracleVerdict::Refuted,
                    Decision::Unknown => false,
                };
                symmetries.push(SymmetryOracle {
                    spec: spec.clone(),
                    symbolic: sc.satisfied,
                    residual: Some(r),
                    refinement: rows,
                    verdict: Some(v),
                    agrees,
                    error: None,
                });
            }
            Err(err) => symmetries.push(SymmetryOracle {
                spec: spec.clone(),
                symbolic: sc.satisfied,
                residual: None,
                refinement: Vec::new(),
                verdict: None,
                agrees: false,
                error: Some(err.to_string()),
            }),
        }
        if let Ok(r) = residual_norm(&perturbed_p, q, &sc.alpha, &cfg.grid, psi, env) {
            perturbed = Some(perturbed.map_or(r, |m: f64| m.max(r)));
        }
    }
    Ok(EntryOracle { id: e.id.clone(), symmetries, perturbed })
}

#[cfg(test)]
mod tests;
