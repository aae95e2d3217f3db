//! Reference algebras for the labels used in the classification tables and
//! invariant-based label matching.
//!
//! Labels are direct sums written with `+` (or `⊕`), each summand optionally
//! prefixed by a multiplicity: `sl(2,R) + so(3) + n_{1,1}`, `3n_{1,1}`.
//! Most references are given by explicit brackets.  For `s_{5,14}`,
//! `s_{5,17}`, `s_{5,38}`, `s_{6,160}`, `s_{6,162}` and `s_{6,242}` only the
//! dimension and the solvable/non-nilpotent character are known here, so a
//! match against them is reported as indeterminate.  The conventional
//! `s_{7,*}`, `s_{8,*}`, `s_{9,*}` are fixed by the brackets of the
//! exponential and Landau-type generators.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::expr::Coeff;

use super::numeric::{Invariants, NumAlgebra};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabelError {
    #[error("unknown algebra `{0}`")]
    Unknown(String),
    #[error("malformed label `{0}`")]
    Malformed(String),
}

#[derive(Debug, Clone)]
pub enum Reference {
    Full(NumAlgebra<Coeff>),
    /// Only dimension and solvable/nilpotent flags are known.
    Partial {
        dim: usize,
        solvable: bool,
        nilpotent: bool,
    },
}

impl Reference {
    pub fn dim(&self) -> usize {
        match self {
            Reference::Full(a) => a.dim(),
            Reference::Partial { dim, .. } => *dim,
        }
    }

    fn flags(&self) -> (usize, bool, bool) {
        match self {
            Reference::Full(a) => {
                let inv = a.invariants();
                (inv.dim, inv.solvable, inv.nilpotent)
            }
            Reference::Partial { dim, solvable, nilpotent } => (*dim, *solvable, *nilpotent),
        }
    }

    fn direct_sum(&self, o: &Reference) -> Reference {
        match (self, o) {
            (Reference::Full(a), Reference::Full(b)) => Reference::Full(a.direct_sum(b)),
            _ => {
                let ((d1, s1, n1), (d2, s2, n2)) = (self.flags(), o.flags());
                Reference::Partial { dim: d1 + d2, solvable: s1 && s2, nilpotent: n1 && n2 }
            }
        }
    }
}

/// Every label used in the tables, plus the simple summands.
pub const KNOWN_LABELS: &[&str] = &[
    "n_{1,1}",
    "n_{3,1}",
    "n_{4,1}",
    "s_{2,1}",
    "s_{3,1}",
    "s_{4,6}",
    "s_{4,7}",
    "sl(2,R)",
    "so(3)",
    "schr(1,1)",
    "schr(1,2)",
    "schr(1,3)",
    "s_{5,14}",
    "s_{5,17}",
    "s_{5,38}",
    "s_{6,160}",
    "s_{6,162}",
    "s_{6,242}",
    "s_{7,1}",
    "s_{7,2}",
    "s_{8,1}",
    "s_{8,2}",
    "s_{9,1}",
    "s_{9,2}",
    "s_{9,3}",
    "2n_{1,1}",
    "3n_{1,1}",
    "4n_{1,1}",
    "n_{3,1} + n_{1,1}",
    "n_{4,1} + n_{1,1}",
    "s_{2,1} + n_{1,1}",
    "s_{2,1} + 2n_{1,1}",
    "s_{3,1} + n_{1,1}",
    "s_{4,6} + n_{1,1}",
    "s_{4,7} + n_{1,1}",
    "s_{5,17} + n_{1,1}",
    "s_{6,242} + n_{1,1}",
    "sl(2,R) + n_{1,1}",
    "sl(2,R) + 2n_{1,1}",
    "so(3) + 2n_{1,1}",
    "sl(2,R) + so(3) + n_{1,1}",
];

/// Brackets in the form `"A B: c C, c D; …"` over the listed basis, with
/// coefficients such as `2i`, `-i`, `1/2`.
fn from_relations(basis: &str, rels: &str) -> NumAlgebra<Coeff> {
    let names: Vec<&str> = basis.split_whitespace().collect();
    let idx = |s: &str| names.iter().position(|n| *n == s).unwrap_or_else(|| panic!("unknown basis element {}", s));
    let mut a = NumAlgebra::<Coeff>::abelian(names.len());
    for rel in rels.split(';').map(str::trim).filter(|r| !r.is_empty()) {
        let (lhs, rhs) = rel.split_once(':').expect("relation needs `:`");
        let lhs: Vec<&str> = lhs.split_whitespace().collect();
        let mut v = vec![Coeff::zero(); names.len()];
        for term in rhs.split(',') {
            let mut it = term.split_whitespace();
            let (c, e) = (it.next().unwrap(), it.next().unwrap());
            v[idx(e)] = &v[idx(e)] + &parse_coeff(c);
        }
        a.set(idx(lhs[0]), idx(lhs[1]), v);
    }
    debug_assert!(a.satisfies_jacobi());
    a
}

fn parse_coeff(s: &str) -> Coeff {
    let (neg, s) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let (imag, s) = match s.strip_suffix('i') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let mag = if s.is_empty() {
        Coeff::one()
    } else if let Some((p, q)) = s.split_once('/') {
        Coeff::ratio(p.parse().unwrap(), q.parse().unwrap())
    } else {
        Coeff::int(s.parse().unwrap())
    };
    let mag = if imag { &mag * &Coeff::i() } else { mag };
    if neg {
        -mag
    } else {
        mag
    }
}

/// Schrödinger algebra in `n` space dimensions, brackets in the engine's
/// normalization.
fn schr(n: usize) -> NumAlgebra<Coeff> {
    let mut basis = vec!["P0".to_string(), "D".into(), "A".into(), "I".into()];
    for a in 1..=n {
        basis.push(format!("P{}", a));
        basis.push(format!("G{}", a));
    }
    let rots: Vec<(usize, usize)> = match n {
        2 => vec![(1, 2)],
        3 => vec![(2, 3), (3, 1), (1, 2)],
        _ => vec![],
    };
    let lname = |a: usize, b: usize| format!("M{}{}", a, b);
    for &(a, b) in &rots {
        basis.push(lname(a, b));
    }
    let mut rels = vec!["D P0: -2i P0".to_string(), "D A: 2i A".into(), "P0 A: i D".into()];
    for a in 1..=n {
        rels.push(format!("D P{a}: -i P{a}"));
        rels.push(format!("D G{a}: i G{a}"));
        rels.push(format!("P0 G{a}: i P{a}"));
        rels.push(format!("A P{a}: -i G{a}"));
        rels.push(format!("P{a} G{a}: i I"));
    }
    // M_ab = x_a p_b − x_b p_a: [M_ab, P_c] = i(δ_ac P_b − δ_bc P_a), same for G.
    for &(a, b) in &rots {
        for v in ["P", "G"] {
            rels.push(format!("{m} {v}{a}: i {v}{b}", m = lname(a, b)));
            rels.push(format!("{m} {v}{b}: -i {v}{a}", m = lname(a, b)));
        }
    }
    if n == 3 {
        // [M23, M31] = i M12 and cyclic.
        rels.push("M23 M31: i M12".into());
        rels.push("M31 M12: i M23".into());
        rels.push("M12 M23: i M31".into());
    }
    from_relations(&basis.join(" "), &rels.join(";"))
}

fn base(name: &str) -> Option<Reference> {
    let full = |b: &str, r: &str| Some(Reference::Full(from_relations(b, r)));
    let partial = |dim| Some(Reference::Partial { dim, solvable: true, nilpotent: false });
    match name {
        "n1,1" => full("e1", ""),
        "n3,1" => full("e1 e2 e3", "e2 e3: 1 e1"),
        "n4,1" => full("e1 e2 e3 e4", "e2 e4: 1 e1; e3 e4: 1 e2"),
        "s2,1" => full("e1 e2", "e2 e1: 1 e1"),
        "s3,1" => full("e1 e2 e3", "e3 e1: 1 e1; e3 e2: 1/2 e2"),
        "s4,6" => full("e1 e2 e3 e4", "e2 e3: 1 e1; e2 e4: 1 e2; e3 e4: -1 e3"),
        "s4,7" => full("e1 e2 e3 e4", "e2 e3: 1 e1; e2 e4: -1 e3; e3 e4: 1 e2"),
        "sl(2,r)" => full("h e f", "h e: 2 e; h f: -2 f; e f: 1 h"),
        "so(3)" => full("e1 e2 e3", "e1 e2: 1 e3; e2 e3: 1 e1; e3 e1: 1 e2"),
        "schr(1,1)" => Some(Reference::Full(schr(1))),
        "schr(1,2)" => Some(Reference::Full(schr(2))),
        "schr(1,3)" => Some(Reference::Full(schr(3))),
        "s5,14" | "s5,17" | "s5,38" => partial(5),
        "s6,160" | "s6,162" | "s6,242" => partial(6),
        // Landau generators, z-translation and boost.
        "s7,1" => full("H1 H2 P3 G3 L3 P0 I", "H2 H1: 2i I; L3 H1: i H2; L3 H2: -i H1; P3 G3: i I; P0 G3: i P3"),
        // Two isotropic exponential pairs with a rotation (ω = 1).
        "s7,2" => full(
            "Bp1 Bm1 Bp2 Bm2 L3 P0 I",
            "Bm1 Bp1: 2i I; Bm2 Bp2: 2i I; L3 Bp1: i Bp2; L3 Bp2: -i Bp1; L3 Bm1: i Bm2; L3 Bm2: -i Bm1; \
             P0 Bp1: i Bp1; P0 Bm1: -i Bm1; P0 Bp2: i Bp2; P0 Bm2: -i Bm2",
        ),
        // Two anisotropic pairs (ω1 = 1, ω2 = 2) with z-translation and boost.
        "s8,1" => full(
            "Bp1 Bm1 Bp2 Bm2 P3 G3 P0 I",
            "Bm1 Bp1: 2i I; Bm2 Bp2: 4i I; P0 Bp1: i Bp1; P0 Bm1: -i Bm1; P0 Bp2: 2i Bp2; P0 Bm2: -2i Bm2; \
             P3 G3: i I; P0 G3: i P3",
        ),
        // Three anisotropic pairs (ω = 1, 2, 3).
        "s8,2" => full(
            "Bp1 Bm1 Bp2 Bm2 Bp3 Bm3 P0 I",
            "Bm1 Bp1: 2i I; Bm2 Bp2: 4i I; Bm3 Bp3: 6i I; P0 Bp1: i Bp1; P0 Bm1: -i Bm1; \
             P0 Bp2: 2i Bp2; P0 Bm2: -2i Bm2; P0 Bp3: 3i Bp3; P0 Bm3: -3i Bm3",
        ),
        // Free motion in the plane, exponential pair along x3.
        "s9,1" => full(
            "P1 P2 G1 G2 Bp3 Bm3 L3 P0 I",
            "P1 G1: i I; P2 G2: i I; P0 G1: i P1; P0 G2: i P2; L3 P1: i P2; L3 P2: -i P1; \
             L3 G1: i G2; L3 G2: -i G1; Bm3 Bp3: 2i I; P0 Bp3: i Bp3; P0 Bm3: -i Bm3",
        ),
        // Isotropic planar pairs with rotation, free motion along x3.
        "s9,2" => full(
            "Bp1 Bm1 Bp2 Bm2 L3 P3 G3 P0 I",
            "Bm1 Bp1: 2i I; Bm2 Bp2: 2i I; L3 Bp1: i Bp2; L3 Bp2: -i Bp1; L3 Bm1: i Bm2; L3 Bm2: -i Bm1; \
             P0 Bp1: i Bp1; P0 Bm1: -i Bm1; P0 Bp2: i Bp2; P0 Bm2: -i Bm2; P3 G3: i I; P0 G3: i P3",
        ),
        // Isotropic planar pairs with rotation, third pair with ω3 = 2.
        "s9,3" => full(
            "Bp1 Bm1 Bp2 Bm2 Bp3 Bm3 L3 P0 I",
            "Bm1 Bp1: 2i I; Bm2 Bp2: 2i I; L3 Bp1: i Bp2; L3 Bp2: -i Bp1; L3 Bm1: i Bm2; L3 Bm2: -i Bm1; \
             P0 Bp1: i Bp1; P0 Bm1: -i Bm1; P0 Bp2: i Bp2; P0 Bm2: -i Bm2; \
             Bm3 Bp3: 4i I; P0 Bp3: 2i Bp3; P0 Bm3: -2i Bm3",
        ),
        _ => None,
    }
}

fn normalize(s: &str) -> String {
    s.replace("\\textsf", "")
        .replace("\\oplus", "+")
        .replace('⊕', "+")
        .chars()
        .filter(|c| !matches!(c, ' ' | '_' | '{' | '}' | '$'))
        .collect::<String>()
        .to_lowercase()
        .replace("sch(", "schr(")
}

/// Summands `(multiplicity, normalized name)`.
pub fn parse_label(label: &str) -> Result<Vec<(usize, String)>, LabelError> {
    let norm = normalize(label);
    if norm.is_empty() {
        return Err(LabelError::Malformed(label.to_string()));
    }
    let mut out = Vec::new();
    for part in norm.split('+') {
        let digits: String = part.chars().take_while(|c| c.is_ascii_digit()).collect();
        let name = &part[digits.len()..];
        let mult =
            if digits.is_empty() { 1 } else { digits.parse().map_err(|_| LabelError::Malformed(label.to_string()))? };
        if name.is_empty() || mult == 0 {
            return Err(LabelError::Malformed(label.to_string()));
        }
        if base(name).is_none() {
            return Err(LabelError::Unknown(name.to_string()));
        }
        out.push((mult, name.to_string()));
    }
    Ok(out)
}

/// Reference algebra for a label.
pub fn reference(label: &str) -> Result<Reference, LabelError> {
    let mut acc: Option<Reference> = None;
    for (mult, name) in parse_label(label)? {
        let r = base(&name).expect("checked by parse_label");
        for _ in 0..mult {
            acc = Some(match acc {
                None => r.clone(),
                Some(a) => a.direct_sum(&r),
            });
        }
    }
    Ok(acc.expect("non-empty label"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Match,
    Mismatch,
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct LabelVerdict {
    pub label: String,
    pub verdict: Verdict,
    /// Reference invariants, when the reference is fully known.
    pub expected: Option<Invariants>,
    pub reason: String,
}

fn references() -> &'static BTreeMap<&'static str, (Reference, Option<Invariants>)> {
    static CELL: OnceLock<BTreeMap<&'static str, (Reference, Option<Invariants>)>> = OnceLock::new();
    CELL.get_or_init(|| {
        KNOWN_LABELS
            .iter()
            .map(|l| {
                let r = reference(l).expect("known label");
                let inv = match &r {
                    Reference::Full(a) => Some(a.invariants()),
                    Reference::Partial { .. } => None,
                };
                (*l, (r, inv))
            })
            .collect()
    })
}

/// Compare computed invariants with the reference of `label`.
pub fn match_label(label: &str, inv: &Invariants) -> Result<LabelVerdict, LabelError> {
    let r = reference(label)?;
    let (verdict, expected, reason) = match &r {
        Reference::Full(a) => {
            let exp = a.invariants();
            if &exp == inv {
                (Verdict::Match, Some(exp), "invariants agree".to_string())
            } else {
                let reason = describe_difference(&exp, inv);
                (Verdict::Mismatch, Some(exp), reason)
            }
        }
        Reference::Partial { dim, solvable, nilpotent } => {
            if (*dim, *solvable, *nilpotent) == (inv.dim, inv.solvable, inv.nilpotent) {
                (
                    Verdict::Indeterminate,
                    None,
                    "only dimension and solvability are known for this label; they agree".to_string(),
                )
            } else {
                let reason = format!(
                    "label implies dim {}, solvable {}, nilpotent {}; computed dim {}, solvable {}, nilpotent {}",
                    dim, solvable, nilpotent, inv.dim, inv.solvable, inv.nilpotent
                );
                (Verdict::Mismatch, None, reason)
            }
        }
    };
    Ok(LabelVerdict { label: label.to_string(), verdict, expected, reason })
}

fn describe_difference(exp: &Invariants, got: &Invariants) -> String {
    let mut parts = Vec::new();
    if exp.dim != got.dim {
        parts.push(format!("dim {} vs {}", exp.dim, got.dim));
    }
    if exp.derived != got.derived {
        parts.push(format!("derived series {:?} vs {:?}", exp.derived, got.derived));
    }
    if exp.lower_central != got.lower_central {
        parts.push(format!("lower central series {:?} vs {:?}", exp.lower_central, got.lower_central));
    }
    if exp.center != got.center {
        parts.push(format!("center {} vs {}", exp.center, got.center));
    }
    format!("expected vs computed: {}", parts.join("; "))
}

/// Known labels whose reference invariants agree with `inv`; labels with
/// partial references carry a `?` suffix.
pub fn candidates(inv: &Invariants) -> Vec<String> {
    references()
        .iter()
        .filter_map(|(l, (r, exp))| match (r, exp) {
            (_, Some(e)) if e == inv => Some(l.to_string()),
            (Reference::Partial { dim, solvable, nilpotent }, None)
                if (*dim, *solvable, *nilpotent) == (inv.dim, inv.solvable, inv.nilpotent) =>
            {
                Some(format!("{}?", l))
            }
            _ => None,
        })
        .collect()
}
