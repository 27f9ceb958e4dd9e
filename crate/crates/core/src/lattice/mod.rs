//! Lattices inside rational quadratic spaces.
//!
//! A [`Lattice`] is a full-row-rank rational basis inside a [`QSpace`]. All
//! set-level questions (containment, equality, complements, saturation) are
//! answered exactly in ambient coordinates; isometry-class questions go
//! through invariants.

mod enumerate;
mod io;
mod standard;

pub use enumerate::{enumerate_vectors, gcd_is_one, IntGram};
pub use io::{format_rational, parse_rational, LatticeFile};
pub use standard::{classify_unimodular, e8_gram, parse_standard, StandardForm, StandardLattice};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{LatticeError, Result};
use crate::exactlin::{dot, Int, IntMatrix, Rat, RatMatrix};

/// Ambient rational quadratic space. The inner product of ambient vectors
/// `x, y` is `scale · x·form·yᵀ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSpace {
    form: RatMatrix,
    scale: Rat,
}

impl QSpace {
    pub fn new(form: RatMatrix, scale: Rat) -> Result<Self> {
        if !form.is_symmetric() {
            return Err(LatticeError::Precondition(
                "ambient form must be symmetric".into(),
            ));
        }
        if form.rows() > 0 && form.det().is_zero() {
            return Err(LatticeError::Degenerate("ambient form is singular".into()));
        }
        if !scale.is_positive() {
            return Err(LatticeError::Precondition(
                "ambient scale must be positive".into(),
            ));
        }
        Ok(QSpace { form, scale })
    }

    pub fn dim(&self) -> usize {
        self.form.rows()
    }

    pub fn form(&self) -> &RatMatrix {
        &self.form
    }

    pub fn scale(&self) -> &Rat {
        &self.scale
    }

    pub fn inner(&self, x: &[Rat], y: &[Rat]) -> Rat {
        dot(&self.form.apply(x), y) * &self.scale
    }

    pub fn norm(&self, x: &[Rat]) -> Rat {
        self.inner(x, x)
    }

    /// The same points with all inner products multiplied by `n`. The scale
    /// stays positive; the sign of `n` moves into the form.
    pub fn rescaled(&self, n: &Rat) -> Result<Self> {
        if n.is_zero() {
            return Err(LatticeError::Precondition(
                "rescale factor must be nonzero".into(),
            ));
        }
        let form = if n.is_negative() {
            self.form.scale(&-Rat::one())
        } else {
            self.form.clone()
        };
        Ok(QSpace {
            form,
            scale: &self.scale * n.abs(),
        })
    }

    /// `scale · X·form·Yᵀ` for row-vector matrices `X`, `Y`.
    pub fn pairing(&self, x: &RatMatrix, y: &RatMatrix) -> RatMatrix {
        x.mul(&self.form).mul(&y.transpose()).scale(&self.scale)
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Invariants {
    pub rank: usize,
    pub det: String,
    pub signature: (usize, usize, usize),
    pub integral: bool,
    /// `None` for non-integral lattices.
    pub even: Option<bool>,
    pub unimodular: bool,
}

#[derive(Clone, Debug)]
pub struct Lattice {
    space: QSpace,
    basis: RatMatrix,
}

impl Lattice {
    pub fn new(space: QSpace, basis: RatMatrix) -> Result<Self> {
        if basis.cols() != space.dim() {
            return Err(LatticeError::DimensionMismatch(format!(
                "basis has {} columns, ambient dimension is {}",
                basis.cols(),
                space.dim()
            )));
        }
        if basis.rank() != basis.rows() {
            return Err(LatticeError::Precondition(
                "basis rows are linearly dependent".into(),
            ));
        }
        Ok(Lattice { space, basis })
    }

    /// The lattice `Zⁿ` with the given Gram matrix.
    pub fn from_gram(gram: RatMatrix) -> Result<Self> {
        let n = gram.rows();
        let space = QSpace::new(gram, Rat::one())?;
        Lattice::new(space, RatMatrix::identity(n))
    }

    /// The lattice generated by the rows of `gens` (any number, possibly
    /// dependent), with an HNF basis.
    pub fn generated_by(space: QSpace, gens: &RatMatrix) -> Result<Self> {
        let basis = hnf_rows(gens);
        Lattice::new(space, basis)
    }

    pub fn space(&self) -> &QSpace {
        &self.space
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.space.dim()
    }

    pub fn gram(&self) -> RatMatrix {
        self.space.pairing(&self.basis, &self.basis)
    }

    /// Integer Gram matrix; errors on non-integral lattices.
    pub fn int_gram(&self) -> Result<IntMatrix> {
        self.gram()
            .to_int()
            .ok_or_else(|| LatticeError::NotIntegral("gram has fractional entries".into()))
    }

    pub fn det(&self) -> Rat {
        self.gram().det()
    }

    pub fn signature(&self) -> (usize, usize, usize) {
        self.gram().signature()
    }

    pub fn is_integral(&self) -> bool {
        self.gram().is_integral()
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.det().is_zero()
    }

    /// Even iff every diagonal Gram entry is even (cross terms carry a 2).
    pub fn is_even(&self) -> bool {
        let g = self.gram();
        g.is_integral() && (0..self.rank()).all(|i| g.get(i, i).to_integer().is_even())
    }

    pub fn is_odd(&self) -> bool {
        self.is_integral() && !self.is_even()
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_integral() && self.det().abs().is_one()
    }

    pub fn invariants(&self) -> Invariants {
        let g = self.gram();
        let integral = g.is_integral();
        let det = g.det();
        Invariants {
            rank: self.rank(),
            det: format_rational(&det),
            signature: g.signature(),
            integral,
            even: integral.then(|| self.is_even()),
            unimodular: integral && det.abs().is_one(),
        }
    }

    pub fn same_space(&self, other: &Lattice) -> bool {
        self.space == other.space
    }

    fn require_same_space(&self, other: &Lattice) -> Result<()> {
        if self.same_space(other) {
            Ok(())
        } else {
            Err(LatticeError::AmbientMismatch)
        }
    }

    /// Ambient point of the vector with basis coordinates `c`.
    pub fn to_ambient(&self, c: &[Rat]) -> Vec<Rat> {
        self.basis.apply(c)
    }

    pub fn to_ambient_int(&self, c: &[Int]) -> Vec<Rat> {
        let c: Vec<Rat> = c.iter().map(|x| Rat::from_integer(x.clone())).collect();
        self.to_ambient(&c)
    }

    /// Rational basis coordinates of an ambient point, if it lies in the
    /// rational span of the lattice.
    pub fn coords(&self, x: &[Rat]) -> Option<Vec<Rat>> {
        self.basis.solve_left(x)
    }

    /// Integer coordinates when `x` is a lattice point.
    pub fn int_coords(&self, x: &[Rat]) -> Option<Vec<Int>> {
        let c = self.coords(x)?;
        c.iter()
            .all(|v| v.is_integer())
            .then(|| c.iter().map(|v| v.to_integer()).collect())
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.int_coords(x).is_some()
    }

    /// Basis coordinates of every row of `m`, as an integer matrix, when
    /// every row is a lattice point.
    pub fn int_coords_matrix(&self, m: &RatMatrix) -> Option<IntMatrix> {
        let rows: Option<Vec<Vec<Int>>> = m.iter_rows().map(|r| self.int_coords(r)).collect();
        rows.map(|r| IntMatrix::from_rows(r, self.rank()))
    }

    pub fn contains_lattice(&self, other: &Lattice) -> Result<bool> {
        self.require_same_space(other)?;
        Ok(self.int_coords_matrix(&other.basis).is_some())
    }

    /// Identical point sets in the same ambient space.
    pub fn lattice_equal(&self, other: &Lattice) -> Result<bool> {
        self.require_same_space(other)?;
        Ok(self.rank() == other.rank()
            && self.contains_lattice(other)?
            && other.contains_lattice(self)?)
    }

    /// `[self : sub]` for a full-rank sublattice `sub`.
    pub fn index_of(&self, sub: &Lattice) -> Result<Int> {
        self.require_same_space(sub)?;
        if sub.rank() != self.rank() {
            return Err(LatticeError::Precondition("index needs equal ranks".into()));
        }
        let c = self
            .int_coords_matrix(&sub.basis)
            .ok_or_else(|| LatticeError::Precondition("not a sublattice".into()))?;
        Ok(c.det().abs())
    }

    /// Same basis rewritten in Hermite normal form.
    pub fn normalized(&self) -> Lattice {
        Lattice {
            space: self.space.clone(),
            basis: hnf_rows(&self.basis),
        }
    }

    /// `A(n)`: the same point set with inner products multiplied by `n`.
    pub fn rescale(&self, n: &Rat) -> Result<Lattice> {
        Ok(Lattice {
            space: self.space.rescaled(n)?,
            basis: self.basis.clone(),
        })
    }

    /// Dual lattice in the same ambient space, basis `G⁻¹·B`.
    pub fn dual(&self) -> Result<Lattice> {
        let g = self.gram();
        let ginv = g
            .inverse()
            .map_err(|_| LatticeError::Degenerate("dual of a degenerate lattice".into()))?;
        Ok(Lattice {
            space: self.space.clone(),
            basis: ginv.mul(&self.basis),
        })
    }

    /// Orthogonal direct sum. Ambient spaces are concatenated; when the
    /// scales differ they are folded into the forms.
    pub fn direct_sum(&self, other: &Lattice) -> Result<Lattice> {
        let (fa, fb, scale) = if self.space.scale == other.space.scale {
            (
                self.space.form.clone(),
                other.space.form.clone(),
                self.space.scale.clone(),
            )
        } else {
            (
                self.space.form.scale(&self.space.scale),
                other.space.form.scale(&other.space.scale),
                Rat::one(),
            )
        };
        let form = RatMatrix::block_diag(&[&fa, &fb]);
        let basis = RatMatrix::block_diag(&[&self.basis, &other.basis]);
        Lattice::new(QSpace::new(form, scale)?, basis)
    }

    /// `{x : ⟨x,x⟩ even}`; index 1 or 2, HNF basis.
    pub fn even_sublattice(&self) -> Result<Lattice> {
        let g = self.int_gram()?;
        let n = self.rank();
        let odd: Vec<usize> = (0..n).filter(|&i| g.get(i, i).is_odd()).collect();
        let Some(&k) = odd.first() else {
            return Ok(self.normalized());
        };
        let two = Rat::from_integer(Int::from(2));
        let mut gens = Vec::with_capacity(n);
        for i in 0..n {
            let bi = self.basis.row(i).to_vec();
            if i == k {
                gens.push(bi.iter().map(|x| x * &two).collect());
            } else if odd.contains(&i) {
                let bk = self.basis.row(k);
                gens.push(bi.iter().zip(bk).map(|(a, b)| a + b).collect());
            } else {
                gens.push(bi);
            }
        }
        Lattice::generated_by(
            self.space.clone(),
            &RatMatrix::from_rows(gens, self.ambient_dim()),
        )
    }

    /// `{x ∈ L : ⟨x,s⟩ = 0 for every row s}`; a primitive sublattice.
    pub fn orthogonal_complement(&self, vectors: &RatMatrix) -> Result<Lattice> {
        if vectors.cols() != self.ambient_dim() {
            return Err(LatticeError::AmbientMismatch);
        }
        if vectors.rows() == 0 {
            return Ok(self.normalized());
        }
        let pairing = self.space.pairing(&self.basis, vectors);
        let (p, _) = pairing.clear_denominators();
        let kernel = p.left_kernel();
        if kernel.rows() == 0 {
            return Err(LatticeError::Degenerate(
                "orthogonal complement is zero".into(),
            ));
        }
        let basis = kernel.to_rat().mul(&self.basis);
        Lattice::generated_by(self.space.clone(), &basis)
    }

    pub fn orthogonal_complement_of(&self, sub: &Lattice) -> Result<Lattice> {
        self.require_same_space(sub)?;
        self.orthogonal_complement(&sub.basis)
    }

    /// `(S ⊗ Q) ∩ L`.
    pub fn saturation(&self, sub: &Lattice) -> Result<Lattice> {
        self.require_same_space(sub)?;
        let c = self
            .int_coords_matrix(&sub.basis)
            .ok_or_else(|| LatticeError::Precondition("saturation needs a sublattice".into()))?;
        let right_kernel = c.transpose().left_kernel();
        let coords = if right_kernel.rows() == 0 {
            IntMatrix::identity(self.rank())
        } else {
            right_kernel.transpose().left_kernel()
        };
        Lattice::generated_by(self.space.clone(), &coords.to_rat().mul(&self.basis))
    }

    pub fn is_primitive(&self, sub: &Lattice) -> Result<bool> {
        let sat = self.saturation(sub)?;
        sat.lattice_equal(sub)
    }

    /// Sublattice spanned by the given ambient rows, which must lie in `self`.
    pub fn sublattice(&self, rows: &RatMatrix) -> Result<Lattice> {
        if self.int_coords_matrix(rows).is_none() {
            return Err(LatticeError::Precondition(
                "generators are not lattice points".into(),
            ));
        }
        Lattice::generated_by(self.space.clone(), rows)
    }

    /// Gram matrix of `V⊥/V` for a primitive isotropic sublattice `V` of a
    /// unimodular lattice, returned as an abstract lattice.
    pub fn quotient_by_isotropic(&self, v: &RatMatrix) -> Result<Lattice> {
        if !self.is_unimodular() {
            return Err(LatticeError::NotUnimodular(format_rational(&self.det())));
        }
        if v.rows() == 0 {
            return Ok(self.clone());
        }
        let sub = self.sublattice(v)?;
        if !sub.gram().is_zero_matrix() {
            return Err(LatticeError::NotIsotropic(
                "V has nonzero Gram matrix".into(),
            ));
        }
        if !self.is_primitive(&sub)? {
            return Err(LatticeError::NotPrimitive("V is not saturated in L".into()));
        }
        let perp = self.orthogonal_complement(sub.basis())?;
        let c = perp.int_coords_matrix(sub.basis()).ok_or_else(|| {
            LatticeError::Falsified("isotropic V is not inside its own complement".into())
        })?;
        let k = c.rows();
        let d = c.cols();
        // Column-reduce C so that its row space is the span of the first k
        // basis vectors of a new basis Q of Zᵈ; the remaining rows of Q
        // represent V⊥/V.
        let (_, u) = c.transpose().hnf();
        let q = u.transpose().to_rat().inverse()?;
        let rest: Vec<usize> = (k..d).collect();
        let reps = q.select_rows(&rest).mul(perp.basis());
        let gram = self.space.pairing(&reps, &reps);
        Lattice::from_gram(gram)
    }

    /// Norm of the lattice vector with basis coordinates `c`.
    pub fn norm_of_coords(&self, c: &[Int]) -> Rat {
        let x = self.to_ambient_int(c);
        self.space.norm(&x)
    }
}

/// Canonical HNF basis of the Z-span of rational rows.
pub fn hnf_rows(rows: &RatMatrix) -> RatMatrix {
    let (n, d) = rows.clear_denominators();
    let h = n.row_lattice_basis();
    let dr = Rat::from_integer(d);
    h.map(|x| Rat::from_integer(x.clone()) / &dr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{frac, int, rat};

    fn lat(name: &str) -> Lattice {
        parse_standard(name).unwrap()
    }

    #[test]
    fn u_invariants() {
        let u = lat("U");
        let inv = u.invariants();
        assert_eq!(inv.signature, (1, 1, 0));
        assert_eq!(inv.even, Some(true));
        assert!(inv.unimodular);
        let u2 = lat("U(2)");
        assert_eq!(u2.det(), rat(-4));
        assert!(u2.is_even());
    }

    #[test]
    fn rescale_round_trip() {
        let u = lat("U");
        let u2 = u.rescale(&rat(2)).unwrap();
        assert_eq!(u2.gram(), RatMatrix::from_i64(2, 2, &[0, 2, 2, 0]));
        let back = u2.rescale(&frac(1, 2)).unwrap();
        assert_eq!(back.gram(), u.gram());
        assert!(back.lattice_equal(&u).unwrap());
        assert!(u.rescale(&rat(1)).unwrap().lattice_equal(&u).unwrap());
        let neg = u.rescale(&rat(-3)).unwrap();
        assert_eq!(neg.gram(), RatMatrix::from_i64(2, 2, &[0, -3, -3, 0]));
    }

    #[test]
    fn dual_examples() {
        let i = lat("I(2,10)");
        assert!(i.dual().unwrap().lattice_equal(&i).unwrap());
        let u2 = lat("U(2)");
        let d = u2.dual().unwrap();
        assert_eq!(
            d.gram(),
            RatMatrix::from_vec(2, 2, vec![rat(0), frac(1, 2), frac(1, 2), rat(0)])
        );
        assert!(d.dual().unwrap().lattice_equal(&u2).unwrap());
        let k = lat("E8(-2)+U(2)+U");
        let kd = k.dual().unwrap();
        assert_eq!(kd.index_of(&k).unwrap(), int(1024));
        assert_eq!(kd.det(), Rat::one() / k.det());
    }

    #[test]
    fn u_and_u2_are_different_point_sets() {
        let u = lat("U");
        let mut doubled = u.clone();
        doubled.basis = u.basis.scale(&rat(2));
        assert!(!u.lattice_equal(&doubled).unwrap());
        let other_space = lat("U(2)");
        assert!(matches!(
            u.lattice_equal(&other_space),
            Err(LatticeError::AmbientMismatch)
        ));
    }

    #[test]
    fn even_sublattice_examples() {
        let u = lat("U");
        assert!(u.even_sublattice().unwrap().lattice_equal(&u).unwrap());
        let i11 = lat("I(1,1)");
        let e = i11.even_sublattice().unwrap();
        assert_eq!(e.det().abs(), rat(4));
        assert!(e.is_even());
        assert_eq!(i11.index_of(&e).unwrap(), int(2));
        let expected = Lattice::new(
            i11.space().clone(),
            RatMatrix::from_i64(2, 2, &[1, 1, 1, -1]),
        )
        .unwrap();
        assert!(e.lattice_equal(&expected).unwrap());
        let i = lat("I(2,10)");
        let ie = i.even_sublattice().unwrap();
        assert_eq!(i.index_of(&ie).unwrap(), int(2));
        assert_eq!(ie.det().abs(), rat(4));
        assert!(matches!(
            lat("U(2)").dual().unwrap().even_sublattice(),
            Err(LatticeError::NotIntegral(_))
        ));
    }

    #[test]
    fn complement_of_negative_vector_in_i_2_10() {
        let i = lat("I(2,10)");
        let mut e = vec![rat(0); 12];
        e[11] = rat(1);
        let c = i
            .orthogonal_complement(&RatMatrix::from_rows(vec![e], 12))
            .unwrap();
        assert_eq!(
            classify_unimodular(&c).unwrap(),
            StandardForm::OddI { p: 2, m: 9 }
        );
        assert!(i.is_primitive(&c).unwrap());

        let i11 = lat("I(1,1)");
        let c = i11
            .orthogonal_complement(&RatMatrix::from_i64(1, 2, &[1, 0]))
            .unwrap();
        assert_eq!(
            classify_unimodular(&c).unwrap(),
            StandardForm::OddI { p: 0, m: 1 }
        );
    }

    #[test]
    fn saturation_examples() {
        let i11 = lat("I(1,1)");
        let twice = Lattice::new(
            i11.space().clone(),
            RatMatrix::from_i64(2, 2, &[2, 0, 0, 2]),
        )
        .unwrap();
        assert!(i11.saturation(&twice).unwrap().lattice_equal(&i11).unwrap());
        assert!(!i11.is_primitive(&twice).unwrap());

        let i20 = lat("I(2,0)");
        let s = Lattice::new(
            i20.space().clone(),
            RatMatrix::from_i64(2, 2, &[1, 1, 1, -1]),
        )
        .unwrap();
        let sat = i20.saturation(&s).unwrap();
        assert_eq!(sat.index_of(&s).unwrap(), int(2));

        let line = Lattice::new(i20.space().clone(), RatMatrix::from_i64(1, 2, &[2, 4])).unwrap();
        let sat = i20.saturation(&line).unwrap();
        assert!(sat.contains(&[rat(1), rat(2)]));
        assert_eq!(sat.rank(), 1);
    }

    #[test]
    fn quotient_by_isotropic_examples() {
        let i = lat("I(2,10)");
        let mut v = vec![rat(0); 12];
        v[0] = rat(1);
        v[2] = rat(1);
        let q = i
            .quotient_by_isotropic(&RatMatrix::from_rows(vec![v], 12))
            .unwrap();
        assert_eq!(
            classify_unimodular(&q).unwrap(),
            StandardForm::OddI { p: 1, m: 9 }
        );

        let empty = RatMatrix::zeros(0, 12);
        assert!(i
            .quotient_by_isotropic(&empty)
            .unwrap()
            .lattice_equal(&i)
            .unwrap());

        // even isotropic vector in II(1,9) + I(1,1): the I(1,1) diagonal
        let model = lat("II(1,9)+I(1,1)");
        let mut w = vec![rat(0); 12];
        w[10] = rat(1);
        w[11] = rat(1);
        let q = model
            .quotient_by_isotropic(&RatMatrix::from_rows(vec![w], 12))
            .unwrap();
        assert_eq!(
            classify_unimodular(&q).unwrap(),
            StandardForm::EvenII { p: 1, m: 9 }
        );

        let mut bad = vec![rat(0); 12];
        bad[0] = rat(1);
        assert!(matches!(
            i.quotient_by_isotropic(&RatMatrix::from_rows(vec![bad], 12)),
            Err(LatticeError::NotIsotropic(_))
        ));
        let mut nonprim = vec![rat(0); 12];
        nonprim[0] = rat(2);
        nonprim[2] = rat(2);
        assert!(matches!(
            i.quotient_by_isotropic(&RatMatrix::from_rows(vec![nonprim], 12)),
            Err(LatticeError::NotPrimitive(_))
        ));
    }

    #[test]
    fn direct_sum_blocks() {
        let s = lat("U").direct_sum(&lat("U")).unwrap();
        assert_eq!(s.signature(), (2, 2, 0));
        assert!(s.is_even());
        let a = lat("E8(-2)");
        let b = lat("U(2)");
        let ab = a.direct_sum(&b).unwrap();
        assert_eq!(ab.gram(), RatMatrix::block_diag(&[&a.gram(), &b.gram()]));
        let odd = lat("I(1,1)").direct_sum(&lat("I(1,9)")).unwrap();
        assert_eq!(
            classify_unimodular(&odd).unwrap(),
            StandardForm::OddI { p: 2, m: 10 }
        );
    }

    #[test]
    fn mixed_scale_direct_sum() {
        let a = lat("U").rescale(&rat(3)).unwrap();
        let b = lat("U");
        let s = a.direct_sum(&b).unwrap();
        assert_eq!(s.gram(), RatMatrix::block_diag(&[&a.gram(), &b.gram()]));
    }
}
