//! Witt extension, orthogonal generators and singular subspaces.

use rand::Rng;

use super::bits::{self, BitMatrix};
use super::F2QuadSpace;
use crate::error::{ensure, LatticeError, Result};

/// `x ↦ x + b(x,v)·v`, an isometry when `q(v) = 1`.
pub fn transvection(space: &F2QuadSpace, v: u64) -> Result<BitMatrix> {
    if space.q(v) != 1 {
        return Err(LatticeError::Precondition(
            "transvection vector must have q = 1".into(),
        ));
    }
    let n = space.dim();
    let rows = (0..n)
        .map(|i| (1u64 << i) ^ if space.b(1 << i, v) == 1 { v } else { 0 })
        .collect();
    Ok(BitMatrix::from_rows(rows, n))
}

/// Extends the partial isometry `src[i] ↦ dst[i]` to an isometry of the
/// whole space.
///
/// Basis vectors are processed in order: the lowest standard basis vector
/// `x` outside the current domain is sent to the first `y` (in the order of
/// the affine solution set) with the right pairings against the current
/// image, the same `q`-value, and lying outside the current image. Witt's
/// theorem guarantees such a `y` exists at every step.
pub fn witt_extend(space: &F2QuadSpace, src: &[u64], dst: &[u64]) -> Result<BitMatrix> {
    let n = space.dim();
    if !space.is_nondegenerate() {
        return Err(LatticeError::Degenerate(
            "Witt extension needs a nondegenerate space".into(),
        ));
    }
    if src.len() != dst.len() {
        return Err(LatticeError::DimensionMismatch(
            "source and target bases differ in length".into(),
        ));
    }
    if bits::rref(src).len() != src.len() || bits::rref(dst).len() != dst.len() {
        return Err(LatticeError::Precondition(
            "partial map must be injective on independent vectors".into(),
        ));
    }
    for i in 0..src.len() {
        if space.q(src[i]) != space.q(dst[i]) {
            return Err(LatticeError::Precondition(format!(
                "q differs on basis vector {i}"
            )));
        }
        for j in i + 1..src.len() {
            if space.b(src[i], src[j]) != space.b(dst[i], dst[j]) {
                return Err(LatticeError::Precondition(format!(
                    "b differs on basis pair ({i},{j})"
                )));
            }
        }
    }
    let mut dom: Vec<u64> = src.to_vec();
    let mut img: Vec<u64> = dst.to_vec();
    let mut dom_span = bits::rref(src);
    let mut img_span = bits::rref(dst);
    while dom.len() < n {
        let x = (0..n)
            .map(|k| 1u64 << k)
            .find(|&e| !bits::in_span(&dom_span, e))
            .expect("domain is not full");
        let eqs: Vec<(u64, u8)> = dom
            .iter()
            .zip(&img)
            .map(|(&w, &fw)| (space.polar_of(fw), space.b(x, w)))
            .collect();
        let (p, kernel) = bits::solve_affine(&eqs, n).ok_or_else(|| {
            LatticeError::Falsified("pairing conditions of a Witt step are inconsistent".into())
        })?;
        let qx = space.q(x);
        let y = (0u64..1 << kernel.len())
            .map(|m| {
                let mut y = p;
                for (i, &k) in kernel.iter().enumerate() {
                    if m >> i & 1 == 1 {
                        y ^= k;
                    }
                }
                y
            })
            .find(|&y| space.q(y) == qx && !bits::in_span(&img_span, y))
            .ok_or_else(|| {
                LatticeError::Falsified("no admissible image in a Witt extension step".into())
            })?;
        dom.push(x);
        img.push(y);
        bits::insert(&mut dom_span, x);
        bits::insert(&mut img_span, y);
    }
    let d = BitMatrix::from_rows(dom, n);
    let g = d
        .inverse()
        .expect("domain basis is invertible")
        .mul(&BitMatrix::from_rows(img, n));
    ensure(space.is_isometry(&g), || {
        "Witt extension does not preserve q".into()
    })?;
    for (i, &s) in src.iter().enumerate() {
        ensure(g.apply(s) == dst[i], || {
            "Witt extension does not extend the partial map".into()
        })?;
    }
    Ok(g)
}

/// Hyperbolic pairs `(e, f)` with `q(e) = q(f) = 0`, `b(e,f) = 1`, mutually
/// orthogonal, as many as the Witt index allows by greedy choice.
fn hyperbolic_pairs(space: &F2QuadSpace) -> Vec<(u64, u64)> {
    let n = space.dim();
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    loop {
        let ok = |v: u64| {
            pairs
                .iter()
                .all(|&(e, f)| space.b(v, e) == 0 && space.b(v, f) == 0)
        };
        let Some(e) = (1u64..1 << n).find(|&v| space.q(v) == 0 && ok(v)) else {
            return pairs;
        };
        let Some(f) = (1u64..1 << n).find(|&v| ok(v) && space.b(e, v) == 1) else {
            return pairs;
        };
        let f = if space.q(f) == 1 { f ^ e } else { f };
        pairs.push((e, f));
    }
}

/// Transvections in every `v` with `q(v) = 1`, followed by the swap of the
/// first two hyperbolic pairs when there are two. Transvections alone miss
/// half of `O⁺(4,2)`.
pub fn orthogonal_generators(space: &F2QuadSpace) -> Result<Vec<BitMatrix>> {
    if !space.is_nondegenerate() {
        return Err(LatticeError::Degenerate(
            "orthogonal generators need a nondegenerate space".into(),
        ));
    }
    let n = space.dim();
    let mut gens = Vec::new();
    for v in 1u64..1 << n {
        if space.q(v) == 1 {
            gens.push(transvection(space, v)?);
        }
    }
    let pairs = hyperbolic_pairs(space);
    if pairs.len() >= 2 {
        let (e1, f1) = pairs[0];
        let (e2, f2) = pairs[1];
        gens.push(witt_extend(space, &[e1, f1, e2, f2], &[e2, f2, e1, f1])?);
    }
    Ok(gens)
}

fn admissible(space: &F2QuadSpace, basis: &[u64], span: &[u64], x: u64) -> bool {
    space.q(x) == 0 && !bits::in_span(span, x) && basis.iter().all(|&w| space.b(w, x) == 0)
}

/// Totally singular subspace of the given dimension built from the lowest
/// admissible vectors.
pub fn greedy_singular_subspace(space: &F2QuadSpace, dim: usize) -> Result<Vec<u64>> {
    let n = space.dim();
    let mut basis = Vec::new();
    let mut span = Vec::new();
    while basis.len() < dim {
        let x = (1u64..1 << n)
            .find(|&x| admissible(space, &basis, &span, x))
            .ok_or_else(|| {
                LatticeError::Infeasible(format!("no totally singular subspace of dimension {dim}"))
            })?;
        basis.push(x);
        bits::insert(&mut span, x);
    }
    Ok(basis)
}

/// A random totally singular subspace, built as a random isotropic flag.
/// The caller must ask for at most the Witt index.
pub fn random_singular_subspace<R: Rng>(
    space: &F2QuadSpace,
    dim: usize,
    rng: &mut R,
) -> Result<Vec<u64>> {
    let n = space.dim();
    let mut basis = Vec::new();
    let mut span = Vec::new();
    while basis.len() < dim {
        if !(1u64..1 << n).any(|x| admissible(space, &basis, &span, x)) {
            return Err(LatticeError::Infeasible(format!(
                "flag cannot reach dimension {dim}"
            )));
        }
        let x = loop {
            let x = rng.gen_range(1u64..1 << n);
            if admissible(space, &basis, &span, x) {
                break x;
            }
        };
        basis.push(x);
        bits::insert(&mut span, x);
    }
    Ok(basis)
}
