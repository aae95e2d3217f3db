//! Structure constants with numeric entries and their basis-independent
//! invariants, by row reduction over a field.

use num_complex::Complex64;
use serde::Serialize;

use crate::expr::Coeff;

/// Field operations needed for row reduction.
pub trait Scalar: Clone + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    /// Pivot preference; larger is better.
    fn weight(&self) -> f64;
}

impl Scalar for Coeff {
    fn zero() -> Self {
        Coeff::zero()
    }
    fn one() -> Self {
        Coeff::one()
    }
    fn is_zero(&self) -> bool {
        Coeff::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn weight(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }
}

/// Floating-point fallback; entries below `1e-9` count as zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Approx(pub Complex64);

impl Scalar for Approx {
    fn zero() -> Self {
        Approx(Complex64::new(0.0, 0.0))
    }
    fn one() -> Self {
        Approx(Complex64::new(1.0, 0.0))
    }
    fn is_zero(&self) -> bool {
        self.0.norm() < 1e-9
    }
    fn add(&self, o: &Self) -> Self {
        Approx(self.0 + o.0)
    }
    fn sub(&self, o: &Self) -> Self {
        Approx(self.0 - o.0)
    }
    fn mul(&self, o: &Self) -> Self {
        Approx(self.0 * o.0)
    }
    fn div(&self, o: &Self) -> Self {
        Approx(self.0 / o.0)
    }
    fn weight(&self) -> f64 {
        self.0.norm()
    }
}

/// Row-reduced basis of the span of `rows`.
pub fn row_reduce<F: Scalar>(mut rows: Vec<Vec<F>>) -> Vec<Vec<F>> {
    let width = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..width {
        let best = (rank..rows.len())
            .filter(|&r| !rows[r][col].is_zero())
            .max_by(|&a, &b| rows[a][col].weight().total_cmp(&rows[b][col].weight()));
        let Some(r) = best else { continue };
        rows.swap(rank, r);
        let p = rows[rank][col].clone();
        let prow: Vec<F> = rows[rank].iter().map(|x| x.div(&p)).collect();
        for (k, row) in rows.iter_mut().enumerate() {
            if k == rank {
                *row = prow.clone();
                continue;
            }
            let f = row[col].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..width {
                row[j] = row[j].sub(&f.mul(&prow[j]));
            }
            row[col] = F::zero();
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rows
}

pub fn rank<F: Scalar>(rows: Vec<Vec<F>>) -> usize {
    row_reduce(rows).len()
}

/// Basis-independent data of a Lie algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Invariants {
    pub dim: usize,
    pub solvable: bool,
    pub nilpotent: bool,
    /// `dim g, dim g', dim g'', …` until the sequence stabilizes.
    pub derived: Vec<usize>,
    /// `dim g, dim [g,g], dim [g,[g,g]], …` until it stabilizes.
    pub lower_central: Vec<usize>,
    pub center: usize,
}

/// `[e_i, e_j] = Σ_k c[i][j][k] e_k` with field entries.
#[derive(Debug, Clone)]
pub struct NumAlgebra<F> {
    pub c: Vec<Vec<Vec<F>>>,
}

impl<F: Scalar> NumAlgebra<F> {
    pub fn new(c: Vec<Vec<Vec<F>>>) -> Self {
        NumAlgebra { c }
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    /// Abelian algebra of dimension `n`.
    pub fn abelian(n: usize) -> Self {
        NumAlgebra { c: vec![vec![vec![F::zero(); n]; n]; n] }
    }

    /// Set `[e_i, e_j] = v` and `[e_j, e_i] = −v`.
    pub fn set(&mut self, i: usize, j: usize, v: Vec<F>) {
        self.c[j][i] = v.iter().map(|x| F::zero().sub(x)).collect();
        self.c[i][j] = v;
    }

    pub fn bracket(&self, u: &[F], v: &[F]) -> Vec<F> {
        let n = self.dim();
        let mut out = vec![F::zero(); n];
        for i in 0..n {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if v[j].is_zero() {
                    continue;
                }
                let w = u[i].mul(&v[j]);
                for k in 0..n {
                    if !self.c[i][j][k].is_zero() {
                        out[k] = out[k].add(&w.mul(&self.c[i][j][k]));
                    }
                }
            }
        }
        out
    }

    fn unit(&self, i: usize) -> Vec<F> {
        let mut v = vec![F::zero(); self.dim()];
        v[i] = F::one();
        v
    }

    fn full(&self) -> Vec<Vec<F>> {
        (0..self.dim()).map(|i| self.unit(i)).collect()
    }

    /// `[a, b]` for subspaces given by spanning rows.
    fn bracket_spaces(&self, a: &[Vec<F>], b: &[Vec<F>]) -> Vec<Vec<F>> {
        let mut rows = Vec::new();
        for u in a {
            for v in b {
                rows.push(self.bracket(u, v));
            }
        }
        if rows.is_empty() {
            return rows;
        }
        row_reduce(rows)
    }

    fn series(&self, derived: bool) -> Vec<usize> {
        let full = self.full();
        let mut cur = full.clone();
        let mut dims = vec![cur.len()];
        loop {
            if cur.is_empty() {
                break;
            }
            let next = if derived { self.bracket_spaces(&cur, &cur) } else { self.bracket_spaces(&full, &cur) };
            if next.len() == cur.len() {
                break;
            }
            dims.push(next.len());
            cur = next;
        }
        dims
    }

    pub fn center_dim(&self) -> usize {
        let n = self.dim();
        // z is central iff Σ_i z_i c[i][j][k] = 0 for all j, k.
        let mut rows = Vec::new();
        for j in 0..n {
            for k in 0..n {
                rows.push((0..n).map(|i| self.c[i][j][k].clone()).collect::<Vec<F>>());
            }
        }
        if rows.is_empty() {
            return 0;
        }
        n - rank(rows)
    }

    pub fn invariants(&self) -> Invariants {
        let derived = self.series(true);
        let lower_central = self.series(false);
        Invariants {
            dim: self.dim(),
            solvable: *derived.last().unwrap() == 0,
            nilpotent: *lower_central.last().unwrap() == 0,
            derived,
            lower_central,
            center: self.center_dim(),
        }
    }

    /// Largest violation-free check of the Jacobi identity.
    pub fn satisfies_jacobi(&self) -> bool {
        let n = self.dim();
        for a in 0..n {
            for b in a + 1..n {
                for d in b + 1..n {
                    let (ea, eb, ed) = (self.unit(a), self.unit(b), self.unit(d));
                    let s1 = self.bracket(&self.bracket(&ea, &eb), &ed);
                    let s2 = self.bracket(&self.bracket(&eb, &ed), &ea);
                    let s3 = self.bracket(&self.bracket(&ed, &ea), &eb);
                    if (0..n).any(|k| !s1[k].add(&s2[k]).add(&s3[k]).is_zero()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Constants in the basis `e'_i = Σ_k p[i][k] e_k`; `None` if `p` is
    /// singular.
    pub fn change_basis(&self, p: &[Vec<F>]) -> Option<Self> {
        let n = self.dim();
        let inv = invert(p)?;
        let mut out = Self::abelian(n);
        for i in 0..n {
            for j in 0..n {
                let b = self.bracket(&p[i], &p[j]);
                // coordinates of b in the new basis: b = Σ_r y_r e'_r, y = b·P⁻¹
                let y: Vec<F> =
                    (0..n).map(|r| (0..n).fold(F::zero(), |acc, m| acc.add(&b[m].mul(&inv[m][r])))).collect();
                out.c[i][j] = y;
            }
        }
        Some(out)
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, o: &Self) -> Self {
        let (n, m) = (self.dim(), o.dim());
        let mut out = Self::abelian(n + m);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.c[i][j][k] = self.c[i][j][k].clone();
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    out.c[n + i][n + j][n + k] = o.c[i][j][k].clone();
                }
            }
        }
        out
    }
}

/// Inverse of a square matrix by Gauss–Jordan elimination.
pub fn invert<F: Scalar>(p: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let n = p.len();
    let aug: Vec<Vec<F>> = p
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    let red = row_reduce(aug);
    if red.len() < n || (0..n).any(|i| red[i][i].is_zero()) {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}
