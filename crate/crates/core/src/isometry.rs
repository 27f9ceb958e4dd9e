//! Ambient isometries as rational matrices acting on row vectors.

use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{LatticeError, Result};
use crate::exactlin::{IntMatrix, Rat, RatMatrix};
use crate::lattice::{Lattice, QSpace};

/// `x ↦ x − 2⟨x,r⟩/⟨r,r⟩·r`.
pub fn reflection(space: &QSpace, r: &[Rat]) -> Result<RatMatrix> {
    let n = space.norm(r);
    if n.is_zero() {
        return Err(LatticeError::Precondition(
            "cannot reflect in an isotropic vector".into(),
        ));
    }
    let pr = space.form().apply(r);
    let c = Rat::from_integer(2.into()) * space.scale() / n;
    let d = space.dim();
    let mut m = RatMatrix::identity(d);
    for i in 0..d {
        for j in 0..d {
            let v = m.get(i, j) - &c * &pr[i] * &r[j];
            m.set(i, j, v);
        }
    }
    Ok(m)
}

/// Eichler transvection `x ↦ x + ⟨x,e⟩a − ⟨x,a⟩e − ½⟨a,a⟩⟨x,e⟩e` for an
/// isotropic `e` and `a ⊥ e`.
pub fn eichler(space: &QSpace, e: &[Rat], a: &[Rat]) -> Result<RatMatrix> {
    if !space.norm(e).is_zero() {
        return Err(LatticeError::Precondition(
            "Eichler transvection needs an isotropic e".into(),
        ));
    }
    if !space.inner(e, a).is_zero() {
        return Err(LatticeError::Precondition(
            "Eichler transvection needs a ⊥ e".into(),
        ));
    }
    let half_aa = space.norm(a) / Rat::from_integer(2.into());
    let fe: Vec<Rat> = space
        .form()
        .apply(e)
        .iter()
        .map(|x| x * space.scale())
        .collect();
    let fa: Vec<Rat> = space
        .form()
        .apply(a)
        .iter()
        .map(|x| x * space.scale())
        .collect();
    let d = space.dim();
    let mut m = RatMatrix::identity(d);
    for i in 0..d {
        for j in 0..d {
            let v = m.get(i, j) + &fe[i] * &a[j] - &fa[i] * &e[j] - &half_aa * &fe[i] * &e[j];
            m.set(i, j, v);
        }
    }
    Ok(m)
}

/// `M·F·Mᵀ = F`.
pub fn preserves_form(space: &QSpace, m: &RatMatrix) -> bool {
    m.rows() == space.dim()
        && m.cols() == space.dim()
        && &m.mul(space.form()).mul(&m.transpose()) == space.form()
}

/// The matrix of `m` in the basis of `l` (`B·M = X·B`), if `m` maps `l`
/// onto itself.
pub fn lattice_matrix(l: &Lattice, m: &RatMatrix) -> Option<IntMatrix> {
    let x = l.int_coords_matrix(&l.basis().mul(m))?;
    x.det().abs().is_one().then_some(x)
}

pub fn preserves_lattice(l: &Lattice, m: &RatMatrix) -> bool {
    lattice_matrix(l, m).is_some()
}

/// Whether `m` is an isometry of the ambient space carrying `l` onto itself.
pub fn is_isometry_of(l: &Lattice, m: &RatMatrix) -> bool {
    preserves_form(l.space(), m) && preserves_lattice(l, m)
}

/// Ambient matrix of the map with basis matrix `x`, i.e. `B⁻¹·X·B` for a
/// full-rank lattice.
pub fn ambient_matrix(l: &Lattice, x: &IntMatrix) -> Result<RatMatrix> {
    let b = l.basis();
    if !b.is_square() {
        return Err(LatticeError::Precondition(
            "ambient matrix needs a full-rank lattice".into(),
        ));
    }
    Ok(b.inverse()?.mul(&x.to_rat()).mul(b))
}

/// Product `g₀·g₁⋯` of a random word of the given length; each letter acts
/// after the previous one.
pub fn random_word<R: Rng>(gens: &[RatMatrix], len: usize, rng: &mut R) -> Vec<usize> {
    (0..len).map(|_| rng.gen_range(0..gens.len())).collect()
}

pub fn word_matrix(gens: &[RatMatrix], word: &[usize], dim: usize) -> RatMatrix {
    word.iter()
        .fold(RatMatrix::identity(dim), |acc, &i| acc.mul(&gens[i]))
}

/// Reflections in every vector of the given norms among the supplied
/// candidates, keeping only those that map `l` onto itself.
pub fn integral_reflections(l: &Lattice, candidates: &[Vec<Rat>]) -> Result<Vec<RatMatrix>> {
    let mut out = Vec::new();
    for r in candidates {
        let m = reflection(l.space(), r)?;
        if preserves_lattice(l, &m) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Permutation of ambient coordinate blocks: block `i` (starting at
/// `starts[i]`, of length `len`) goes to block `perm[i]`.
pub fn block_permutation(dim: usize, starts: &[usize], len: usize, perm: &[usize]) -> RatMatrix {
    let mut m = RatMatrix::zeros(dim, dim);
    let mut moved = vec![false; dim];
    for (i, &s) in starts.iter().enumerate() {
        let t = starts[perm[i]];
        for k in 0..len {
            m.set(s + k, t + k, Rat::one());
            moved[s + k] = true;
        }
    }
    for (i, &done) in moved.iter().enumerate() {
        if !done {
            m.set(i, i, Rat::one());
        }
    }
    m
}

pub fn is_negative_identity(m: &RatMatrix) -> bool {
    m.is_square()
        && (0..m.rows()).all(|i| {
            (0..m.cols()).all(|j| *m.get(i, j) == if i == j { -Rat::one() } else { Rat::zero() })
        })
}
