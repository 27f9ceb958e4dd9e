//! Named lattices and the classification of unimodular ones.

use std::fmt;

use num_traits::{One, Signed};
use serde::Serialize;

use super::Lattice;
use crate::error::{LatticeError, Result};
use crate::exactlin::{Rat, RatMatrix};

/// Gram matrix of E8 used everywhere in the crate: the Cartan matrix in
/// Bourbaki numbering (chain 1-3-4-5-6-7-8, node 2 attached to node 4).
/// These are the inner products of the simple roots of the D8-plus-glue
/// model `α₁ = ½(e₁+e₈) − ½(e₂+…+e₇)`, `α₂ = e₁+e₂`, `αᵢ = eᵢ₋₁ − eᵢ₋₂`.
pub fn e8_gram() -> RatMatrix {
    let edges = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];
    let mut g = RatMatrix::zeros(8, 8);
    for i in 0..8 {
        g.set(i, i, Rat::from_integer(2.into()));
    }
    for &(a, b) in &edges {
        g.set(a, b, Rat::from_integer((-1).into()));
        g.set(b, a, Rat::from_integer((-1).into()));
    }
    g
}

/// Building blocks accepted by [`parse_standard`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardLattice {
    /// `U(n)`; `n = 1` is the hyperbolic plane.
    U(Rat),
    E8(Rat),
    /// `I(p,m)(n)`
    OddI {
        p: usize,
        m: usize,
        scale: Rat,
    },
    /// `II(p,m)(n)`
    EvenII {
        p: usize,
        m: usize,
        scale: Rat,
    },
}

impl StandardLattice {
    pub fn build(&self) -> Result<Lattice> {
        match self {
            StandardLattice::U(n) => {
                let g = RatMatrix::from_i64(2, 2, &[0, 1, 1, 0]);
                Lattice::from_gram(g)?.rescale(n)
            }
            StandardLattice::E8(n) => Lattice::from_gram(e8_gram())?.rescale(n),
            StandardLattice::OddI { p, m, scale } => {
                if p + m == 0 {
                    return Err(LatticeError::Infeasible("I(0,0) has rank zero".into()));
                }
                let mut diag = vec![Rat::one(); *p];
                diag.extend(std::iter::repeat_n(-Rat::one(), *m));
                Lattice::from_gram(RatMatrix::diagonal(&diag))?.rescale(scale)
            }
            StandardLattice::EvenII { p, m, scale } => even_unimodular(*p, *m)?.rescale(scale),
        }
    }
}

/// `II(p,m)` as `E8(±1)^k ⊕ U^min(p,m)`, E8 blocks first.
fn even_unimodular(p: usize, m: usize) -> Result<Lattice> {
    let diff = p as i64 - m as i64;
    if diff % 8 != 0 || p + m == 0 {
        return Err(LatticeError::Infeasible(format!(
            "II({p},{m}) needs p ≡ m (mod 8) and positive rank"
        )));
    }
    let copies = (diff.unsigned_abs() / 8) as usize;
    let sign = if diff >= 0 { Rat::one() } else { -Rat::one() };
    let e8 = e8_gram().scale(&sign);
    let u = RatMatrix::from_i64(2, 2, &[0, 1, 1, 0]);
    let mut blocks: Vec<&RatMatrix> = Vec::new();
    for _ in 0..copies {
        blocks.push(&e8);
    }
    for _ in 0..p.min(m) {
        blocks.push(&u);
    }
    Lattice::from_gram(RatMatrix::block_diag(&blocks))
}

/// Parses a lattice literal such as `E8(-2)+U(2)+U` or `II(1,9)(2)+I(1,1)`
/// and builds the direct sum. `⊕` is accepted in place of `+`.
pub fn parse_standard(spec: &str) -> Result<Lattice> {
    let cleaned: String = spec
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .replace('⊕', "+");
    if cleaned.is_empty() {
        return Err(LatticeError::Parse("empty lattice literal".into()));
    }
    let mut acc: Option<Lattice> = None;
    for term in cleaned.split('+') {
        let piece = parse_term(term)?.build()?;
        acc = Some(match acc {
            None => piece,
            Some(a) => a.direct_sum(&piece)?,
        });
    }
    Ok(acc.expect("at least one term"))
}

fn parse_term(term: &str) -> Result<StandardLattice> {
    let bad = || LatticeError::Parse(format!("unrecognised lattice term '{term}'"));
    let groups = paren_groups(term).ok_or_else(bad)?;
    let (head, args) = groups;
    let scalar = |s: &str| super::parse_rational(s).map_err(|_| bad());
    match head.as_str() {
        "U" => match args.as_slice() {
            [] => Ok(StandardLattice::U(Rat::one())),
            [n] => Ok(StandardLattice::U(scalar(n)?)),
            _ => Err(bad()),
        },
        "E8" => match args.as_slice() {
            [] => Ok(StandardLattice::E8(Rat::one())),
            [n] => Ok(StandardLattice::E8(scalar(n)?)),
            _ => Err(bad()),
        },
        "I" | "II" => {
            let (pm, scale) = match args.as_slice() {
                [pm] => (pm, Rat::one()),
                [pm, n] => (pm, scalar(n)?),
                _ => return Err(bad()),
            };
            let mut parts = pm.split(',');
            let p: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let m: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            if parts.next().is_some() {
                return Err(bad());
            }
            if head == "I" {
                Ok(StandardLattice::OddI { p, m, scale })
            } else {
                Ok(StandardLattice::EvenII { p, m, scale })
            }
        }
        _ => Err(bad()),
    }
}

/// Splits `NAME(a)(b)` into `("NAME", ["a", "b"])`.
fn paren_groups(term: &str) -> Option<(String, Vec<String>)> {
    let open = term.find('(').unwrap_or(term.len());
    let head = term[..open].to_string();
    let mut rest = &term[open..];
    let mut args = Vec::new();
    while !rest.is_empty() {
        if !rest.starts_with('(') {
            return None;
        }
        let close = rest.find(')')?;
        args.push(rest[1..close].to_string());
        rest = &rest[close + 1..];
    }
    Some((head, args))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum StandardForm {
    OddI { p: usize, m: usize },
    EvenII { p: usize, m: usize },
    DefiniteEvenE8Power { sign: i8, copies: usize },
    Unrecognized,
}

impl fmt::Display for StandardForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StandardForm::OddI { p, m } => write!(f, "I({p},{m})"),
            StandardForm::EvenII { p, m } => write!(f, "II({p},{m})"),
            StandardForm::DefiniteEvenE8Power { sign, copies } => {
                let s = if *sign > 0 { "" } else { "(-1)" };
                if *copies == 1 {
                    write!(f, "E8{s}")
                } else {
                    write!(f, "E8{s}^{copies}")
                }
            }
            StandardForm::Unrecognized => write!(f, "unrecognized"),
        }
    }
}

/// Standard name of a unimodular lattice. Indefinite lattices are
/// determined by rank, signature and parity. Definite lattices are only
/// named where that data suffices: odd of rank ≤ 8, and even of rank 8.
pub fn classify_unimodular(l: &Lattice) -> Result<StandardForm> {
    let g = l.gram();
    if !g.is_integral() {
        return Err(LatticeError::NotIntegral(
            "classification needs an integral lattice".into(),
        ));
    }
    let det = g.det();
    if !det.abs().is_one() {
        return Err(LatticeError::NotUnimodular(super::format_rational(&det)));
    }
    let (p, m, z) = g.signature();
    debug_assert!(z == 0);
    let even = l.is_even();
    if p > 0 && m > 0 {
        return Ok(if even {
            StandardForm::EvenII { p, m }
        } else {
            StandardForm::OddI { p, m }
        });
    }
    let rank = p + m;
    if !even {
        return Ok(if rank <= 8 {
            StandardForm::OddI { p, m }
        } else {
            StandardForm::Unrecognized
        });
    }
    if rank == 8 {
        let sign = if p > 0 { 1 } else { -1 };
        return Ok(StandardForm::DefiniteEvenE8Power { sign, copies: 1 });
    }
    Ok(StandardForm::Unrecognized)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{dot, frac, rat};

    #[test]
    fn e8_gram_matches_d8_glue_roots() {
        let h = frac(1, 2);
        let mut roots: Vec<Vec<Rat>> = Vec::new();
        let mut a1 = vec![-h.clone(); 8];
        a1[0] = h.clone();
        a1[7] = h.clone();
        roots.push(a1);
        let mut a2 = vec![rat(0); 8];
        a2[0] = rat(1);
        a2[1] = rat(1);
        roots.push(a2);
        for i in 0..6 {
            let mut a = vec![rat(0); 8];
            a[i + 1] = rat(1);
            a[i] = rat(-1);
            roots.push(a);
        }
        let g = e8_gram();
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(dot(&roots[i], &roots[j]), *g.get(i, j), "entry ({i},{j})");
            }
        }
        let e8 = Lattice::from_gram(g).unwrap();
        assert!(e8.is_even() && e8.is_unimodular());
        assert_eq!(e8.signature(), (8, 0, 0));
    }

    #[test]
    fn standard_constructors() {
        let i = parse_standard("I(2,10)").unwrap();
        assert_eq!(i.rank(), 12);
        assert!(i.is_odd() && i.is_unimodular());
        assert_eq!(i.signature(), (2, 10, 0));
        let ii = parse_standard("II(3,19)").unwrap();
        assert_eq!(ii.signature(), (3, 19, 0));
        assert!(ii.is_even() && ii.is_unimodular());
        let k = parse_standard("E8(-2) ⊕ U(2) ⊕ U").unwrap();
        assert!(k.is_even());
        assert_eq!(k.det().abs(), rat(1024));
        assert_eq!(k.signature(), (2, 10, 0));
        let same = parse_standard("II(1,9)(2)+II(1,1)").unwrap();
        assert_eq!(same.gram(), k.gram());
    }

    #[test]
    fn infeasible_and_malformed() {
        assert!(matches!(
            parse_standard("II(1,2)"),
            Err(LatticeError::Infeasible(_))
        ));
        assert!(matches!(
            parse_standard("X(3)"),
            Err(LatticeError::Parse(_))
        ));
        assert!(matches!(
            parse_standard("I(2)"),
            Err(LatticeError::Parse(_))
        ));
        assert!(matches!(parse_standard(""), Err(LatticeError::Parse(_))));
        assert!(matches!(
            parse_standard("U(0)"),
            Err(LatticeError::Precondition(_))
        ));
    }

    #[test]
    fn classify_examples() {
        let c = |s: &str| classify_unimodular(&parse_standard(s).unwrap()).unwrap();
        assert_eq!(c("E8(-1)+U"), StandardForm::EvenII { p: 1, m: 9 });
        assert_eq!(c("I(0,8)"), StandardForm::OddI { p: 0, m: 8 });
        assert_eq!(
            c("E8(-1)"),
            StandardForm::DefiniteEvenE8Power {
                sign: -1,
                copies: 1
            }
        );
        assert_eq!(
            c("E8"),
            StandardForm::DefiniteEvenE8Power { sign: 1, copies: 1 }
        );
        assert_eq!(c("I(12,0)"), StandardForm::Unrecognized);
        assert_eq!(c("II(16,0)"), StandardForm::Unrecognized);
        assert!(matches!(
            classify_unimodular(&parse_standard("U(2)").unwrap()),
            Err(LatticeError::NotUnimodular(_))
        ));
    }

    #[test]
    fn classify_round_trips_constructible_signatures() {
        for p in 0..=26usize {
            for m in 0..=(26 - p) {
                if p + m == 0 {
                    continue;
                }
                let definite = p == 0 || m == 0;
                if !definite || p + m <= 8 {
                    let l = StandardLattice::OddI {
                        p,
                        m,
                        scale: Rat::one(),
                    }
                    .build()
                    .unwrap();
                    assert_eq!(
                        classify_unimodular(&l).unwrap(),
                        StandardForm::OddI { p, m }
                    );
                }
                if (p as i64 - m as i64) % 8 == 0 && (!definite || p + m == 8) {
                    let l = StandardLattice::EvenII {
                        p,
                        m,
                        scale: Rat::one(),
                    }
                    .build()
                    .unwrap();
                    let expected = if definite {
                        StandardForm::DefiniteEvenE8Power {
                            sign: if p > 0 { 1 } else { -1 },
                            copies: 1,
                        }
                    } else {
                        StandardForm::EvenII { p, m }
                    };
                    assert_eq!(classify_unimodular(&l).unwrap(), expected);
                }
            }
        }
    }

    #[test]
    fn display_names() {
        assert_eq!(StandardForm::OddI { p: 2, m: 10 }.to_string(), "I(2,10)");
        assert_eq!(
            StandardForm::DefiniteEvenE8Power {
                sign: -1,
                copies: 1
            }
            .to_string(),
            "E8(-1)"
        );
    }
}
