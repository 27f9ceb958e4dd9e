//! The halving correspondence between an even lattice `A ⊇ 2A*` and the
//! unique odd unimodular lattice `Â` containing `(2^{-1/2}A)*`.
//!
//! The factor `2^{-1/2}` is never written down. `Â` lives in the ambient
//! space of `A` with the scale halved, so an ambient point of `A`-norm `k`
//! has `Â`-norm `k/2`. In that space the point set `2A*` carries the Gram
//! matrix `2G⁻¹` of `(2^{-1/2}A)*`, and `unhat` returns `A` as a point set.

use std::collections::HashSet;

use serde::Serialize;

use crate::discriminant::{unimodular_overlattices, Budget, GlueSubgroup, Parity};
use crate::error::{ensure, LatticeError, Result};
use crate::exactlin::{frac, Int, Rat, RatMatrix};
use crate::isometry::{is_isometry_of, preserves_form};
use crate::lattice::{enumerate_vectors, gcd_is_one, Lattice};

#[derive(Clone, Debug)]
pub struct HatPair {
    pub a: Lattice,
    pub a_hat: Lattice,
    /// The point set `2A*` at half scale, with Gram matrix `2G⁻¹`.
    pub intermediate: Lattice,
    pub glue: GlueSubgroup,
    /// Unimodular overlattices of the intermediate lattice, by parity.
    pub even_overlattices: usize,
    pub odd_overlattices: usize,
}

/// `2A*` in the ambient of `A` with the scale halved.
pub fn intermediate(a: &Lattice) -> Result<Lattice> {
    if !a.is_even() {
        return Err(LatticeError::Precondition(
            "halving needs an even integral lattice".into(),
        ));
    }
    let dual = a.dual()?;
    let space = a.space().rescaled(&frac(1, 2))?;
    let two = Rat::from_integer(Int::from(2));
    let m = Lattice::new(space, dual.basis().scale(&two))?;
    if !m.is_integral() {
        return Err(LatticeError::Precondition(
            "2·G⁻¹ is not integral, so A does not contain 2A*".into(),
        ));
    }
    Ok(m)
}

pub fn hat(a: &Lattice) -> Result<HatPair> {
    hat_with_budget(a, &Budget::default())
}

pub fn hat_with_budget(a: &Lattice, budget: &Budget) -> Result<HatPair> {
    let mid = intermediate(a)?;
    let all = unimodular_overlattices(&mid, Parity::Any, budget)?;
    let (odd, even): (Vec<_>, Vec<_>) = all.into_iter().partition(|g| g.lattice.is_odd());
    if odd.len() != 1 {
        return Err(LatticeError::Infeasible(format!(
            "expected one odd unimodular overlattice, found {}",
            odd.len()
        )));
    }
    let glued = odd.into_iter().next().expect("one overlattice");
    Ok(HatPair {
        a: a.clone(),
        a_hat: glued.lattice,
        intermediate: mid,
        glue: glued.subgroup,
        even_overlattices: even.len(),
        odd_overlattices: 1,
    })
}

/// `(Â^e)*` with the scale doubled.
pub fn unhat(a_hat: &Lattice) -> Result<Lattice> {
    if !a_hat.is_odd() {
        return Err(LatticeError::Precondition(
            "unhat needs an odd integral lattice".into(),
        ));
    }
    let dual = a_hat.even_sublattice()?.dual()?;
    Ok(dual.rescale(&Rat::from_integer(Int::from(2)))?.normalized())
}

impl HatPair {
    /// Checks the structural identities of the pair.
    pub fn verify(&self) -> Result<()> {
        let g = self.a.gram();
        let predicted = g.inverse()?.scale(&Rat::from_integer(Int::from(2)));
        ensure(self.intermediate.gram() == predicted, || {
            "intermediate Gram is not 2·G⁻¹".into()
        })?;
        ensure(self.intermediate.is_even(), || {
            "intermediate lattice is odd".into()
        })?;
        ensure(self.a_hat.is_odd() && self.a_hat.is_unimodular(), || {
            "Â is not odd unimodular".into()
        })?;
        ensure(self.a_hat.signature() == self.a.signature(), || {
            "Â and A differ in signature".into()
        })?;
        ensure(self.a_hat.contains_lattice(&self.intermediate)?, || {
            "Â does not contain 2A*".into()
        })?;
        let back = unhat(&self.a_hat)?;
        ensure(back.space() == self.a.space(), || {
            "unhat did not restore the ambient scale".into()
        })?;
        ensure(back.lattice_equal(&self.a)?, || {
            "unhat(hat(A)) differs from A".into()
        })?;
        Ok(())
    }
}

/// The same ambient matrix, checked to preserve `Â`. Errors with a
/// precondition failure if `f` is not an isometry of `A`, and with a
/// falsification if it preserves `A` but not `Â`.
pub fn transport_isometry(p: &HatPair, f: &RatMatrix) -> Result<RatMatrix> {
    if !is_isometry_of(&p.a, f) {
        return Err(LatticeError::Precondition(
            "map is not an isometry of A".into(),
        ));
    }
    ensure(
        preserves_form(p.a_hat.space(), f) && is_isometry_of(&p.a_hat, f),
        || "an isometry of A does not preserve Â".into(),
    )?;
    Ok(f.clone())
}

/// Outcome of matching primitive vectors of `A` of norm `k` with primitive
/// vectors of `Â` of norm `k/2` inside a coordinate box.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CorrespondenceReport {
    pub k: i64,
    pub k_hat: i64,
    pub height: u32,
    pub a_vectors: usize,
    pub a_hat_vectors: usize,
    /// `A`-vectors whose point is a listed `Â`-vector.
    pub matched: usize,
    /// `A`-vectors lying in `Â` whose `Â`-coordinates leave the box.
    pub a_outside_box: usize,
    /// `Â`-vectors lying in `A` whose `A`-coordinates leave the box.
    pub a_hat_outside_box: usize,
    /// `A`-vectors not in `Â` (odd type when `k = −4`).
    pub a_not_in_a_hat: usize,
    /// Of those, how many double to a primitive `Â`-vector of norm `2k`.
    pub doubled_in_a_hat: usize,
    /// `Â`-vectors that are not primitive vectors of `A`.
    pub a_hat_not_in_a: usize,
    /// Vectors inside both boxes that failed to find a partner.
    pub mismatches: usize,
    /// Whether the pair is one where a bijection is claimed.
    pub asserted: bool,
}

impl CorrespondenceReport {
    pub fn holds(&self) -> bool {
        if !self.asserted {
            return true;
        }
        let odd_ok = match self.k {
            -2 => self.a_not_in_a_hat == 0,
            _ => self.doubled_in_a_hat == self.a_not_in_a_hat,
        };
        self.mismatches == 0 && self.a_hat_not_in_a == 0 && odd_ok
    }
}

/// Change of basis `c ↦ c·T` between two lattices in one ambient space,
/// kept as an integer numerator and a common denominator.
struct Transition {
    num: Vec<Vec<i64>>,
    den: i64,
}

impl Transition {
    fn new(from: &Lattice, to: &Lattice) -> Result<Self> {
        let t = from.basis().mul(&to.basis().inverse()?);
        let (num, den) = t.clear_denominators();
        let conv = |x: &Int| {
            i64::try_from(x)
                .map_err(|_| LatticeError::Precondition("basis change exceeds i64".into()))
        };
        let rows = num
            .iter_rows()
            .map(|r| r.iter().map(conv).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Transition {
            num: rows,
            den: conv(&den)?,
        })
    }

    /// Integer image of `scale·c`, if there is one.
    fn apply(&self, c: &[i64], scale: i64) -> Option<Vec<i64>> {
        let n = self.num.first().map_or(0, Vec::len);
        let mut out = vec![0i64; n];
        for (ci, row) in c.iter().zip(&self.num) {
            if *ci == 0 {
                continue;
            }
            for (o, t) in out.iter_mut().zip(row) {
                *o += ci * scale * t;
            }
        }
        out.iter()
            .all(|x| x % self.den == 0)
            .then(|| out.iter().map(|x| x / self.den).collect())
    }
}

fn height(c: &[i64]) -> i64 {
    c.iter().map(|x| x.abs()).max().unwrap_or(0)
}

/// Matches primitive `A`-vectors of norm `k` with primitive `Â`-vectors of
/// norm `k_hat = k/2` by ambient identity; heights are taken in the basis
/// of each lattice. Only `(−2,−1)` and `(−4,−2)` are asserted.
pub fn vector_correspondence(
    p: &HatPair,
    k: i64,
    k_hat: i64,
    h: u32,
) -> Result<CorrespondenceReport> {
    if k != 2 * k_hat {
        return Err(LatticeError::Precondition(format!(
            "norm pair ({k},{k_hat}) violates k = 2·k̂"
        )));
    }
    let a_vecs = enumerate_vectors(&p.a, k, h, true)?;
    let hat_vecs = enumerate_vectors(&p.a_hat, k_hat, h, true)?;
    let to_hat = Transition::new(&p.a, &p.a_hat)?;
    let to_a = Transition::new(&p.a_hat, &p.a)?;
    let bound = h as i64;
    let hat_set: HashSet<&[i64]> = hat_vecs.iter().map(Vec::as_slice).collect();
    let a_set: HashSet<&[i64]> = a_vecs.iter().map(Vec::as_slice).collect();
    let mut r = CorrespondenceReport {
        k,
        k_hat,
        height: h,
        a_vectors: a_vecs.len(),
        a_hat_vectors: hat_vecs.len(),
        asserted: matches!((k, k_hat), (-2, -1) | (-4, -2)),
        ..Default::default()
    };
    for c in &a_vecs {
        match to_hat.apply(c, 1) {
            Some(d) if height(&d) > bound => r.a_outside_box += 1,
            Some(d) if hat_set.contains(d.as_slice()) => r.matched += 1,
            Some(_) => r.mismatches += 1,
            None => {
                // the doubled point has norm 4·k̂ = 2k in Â
                r.a_not_in_a_hat += 1;
                if to_hat.apply(c, 2).is_some_and(|d| gcd_is_one(&d)) {
                    r.doubled_in_a_hat += 1;
                }
            }
        }
    }
    for c in &hat_vecs {
        match to_a.apply(c, 1) {
            Some(d) if !gcd_is_one(&d) => r.a_hat_not_in_a += 1,
            Some(d) if height(&d) > bound => r.a_hat_outside_box += 1,
            Some(d) if !a_set.contains(d.as_slice()) => r.mismatches += 1,
            Some(_) => {}
            None => r.a_hat_not_in_a += 1,
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat;
    use crate::isometry::{block_permutation, reflection};
    use crate::lattice::{classify_unimodular, parse_standard, StandardForm};

    fn pair(name: &str) -> HatPair {
        hat(&parse_standard(name).unwrap()).unwrap()
    }

    #[test]
    fn hat_classifies_as_expected() {
        for (name, p, m) in [
            ("E8(-2)+U(2)+U", 2, 10),
            ("E8(-2)+U", 1, 9),
            ("U(2)+U", 2, 2),
            ("II(1,9)(2)+U", 2, 10),
        ] {
            let hp = pair(name);
            hp.verify().unwrap();
            assert_eq!(
                classify_unimodular(&hp.a_hat).unwrap(),
                StandardForm::OddI { p, m },
                "{name}"
            );
            assert_eq!(hp.even_overlattices, 2, "{name}");
        }
    }

    #[test]
    fn hat_rejects_bad_inputs() {
        assert!(hat(&parse_standard("I(1,1)").unwrap()).is_err());
        // the intermediate lattice of U⊕U has several odd unimodular overlattices
        assert!(matches!(
            hat(&parse_standard("U+U").unwrap()),
            Err(LatticeError::Infeasible(_))
        ));
        assert!(hat(&parse_standard("U(4)").unwrap()).is_err());
    }

    #[test]
    fn unhat_of_i11_is_u() {
        let u = unhat(&parse_standard("I(1,1)").unwrap()).unwrap();
        assert_eq!(
            classify_unimodular(&u).unwrap(),
            StandardForm::EvenII { p: 1, m: 1 }
        );
    }

    #[test]
    fn hat_of_unhat_round_trip() {
        let k_hat = parse_standard("I(2,10)").unwrap();
        let k = unhat(&k_hat).unwrap();
        let hp = hat(&k).unwrap();
        assert!(hp.a_hat.lattice_equal(&k_hat).unwrap());
    }

    #[test]
    fn isometries_of_a_preserve_a_hat() {
        let hp = pair("E8(-2)+U(2)+U");
        let n = hp.a.ambient_dim();
        let minus = RatMatrix::identity(n).scale(&rat(-1));
        transport_isometry(&hp, &minus).unwrap();
        // a norm 2 vector of the U summand
        let mut r = vec![rat(0); n];
        r[10] = rat(1);
        r[11] = rat(1);
        let refl = reflection(hp.a.space(), &r).unwrap();
        transport_isometry(&hp, &refl).unwrap();
        // swapping the two U(2) coordinates
        let swap = block_permutation(n, &[8, 9], 1, &[1, 0]);
        transport_isometry(&hp, &swap).unwrap();
        // an isometry of the ambient that does not preserve A
        let mut r = vec![rat(0); n];
        r[8] = rat(1);
        r[9] = rat(2);
        let bad = reflection(hp.a.space(), &r).unwrap();
        assert!(matches!(
            transport_isometry(&hp, &bad),
            Err(LatticeError::Precondition(_))
        ));
    }

    #[test]
    fn small_correspondence() {
        let hp = pair("U(2)+U");
        let r = vector_correspondence(&hp, -2, -1, 3).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!(r.matched > 0);
        let r = vector_correspondence(&hp, -4, -2, 3).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!(r.a_not_in_a_hat > 0);
        assert!(vector_correspondence(&hp, -4, -1, 1).is_err());
        let r = vector_correspondence(&hp, 0, 0, 2).unwrap();
        assert!(!r.asserted && r.holds());
    }
}
