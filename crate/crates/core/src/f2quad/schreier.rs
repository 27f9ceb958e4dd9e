//! Stabilizer chains for matrix groups over F₂.
//!
//! The group acts on row vectors of F₂ⁿ and the base is `e₀, …, eₙ₋₁`, so
//! the pointwise stabilizer of the whole base is trivial and the order is
//! the product of the basic orbit lengths. Orbits are Schreier trees; a
//! generator may carry a payload (for instance an integral matrix it was
//! induced from) which is multiplied alongside.

use std::collections::{HashMap, VecDeque};

use crate::error::{LatticeError, Result};
use crate::exactlin::IntMatrix;

use super::bits::BitMatrix;

/// Payload multiplied in step with the F₂ matrices. `then` composes in
/// action order: `a.then(b)` acts as `a` first.
pub trait Lift: Clone {
    fn then(&self, other: &Self) -> Self;
    fn invert(&self) -> Self;
}

impl Lift for () {
    fn then(&self, _: &Self) -> Self {}
    fn invert(&self) -> Self {}
}

/// An integral matrix with its inverse, in the row convention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedElement {
    pub matrix: IntMatrix,
    pub inverse: IntMatrix,
}

impl Lift for LiftedElement {
    fn then(&self, other: &Self) -> Self {
        LiftedElement {
            matrix: self.matrix.mul(&other.matrix),
            inverse: other.inverse.mul(&self.inverse),
        }
    }

    fn invert(&self) -> Self {
        LiftedElement {
            matrix: self.inverse.clone(),
            inverse: self.matrix.clone(),
        }
    }
}

#[derive(Clone, Debug)]
struct Gen<P> {
    m: BitMatrix,
    inv: BitMatrix,
    lift: P,
}

#[derive(Clone, Debug)]
struct Level<P> {
    strong: Vec<usize>,
    /// Orbit point → (parent point, generator index); the base point maps
    /// to itself with index `usize::MAX`.
    tree: HashMap<u64, (u64, usize)>,
    points: Vec<u64>,
    /// Transversal element `σ_β` (with `e_l·σ_β = β`) and its inverse.
    trans: HashMap<u64, (BitMatrix, BitMatrix)>,
    lifts: HashMap<u64, P>,
}

/// Stabilizer chain of a subgroup of `GL(n, 2)`.
#[derive(Clone, Debug)]
pub struct Chain<P: Lift> {
    n: usize,
    gens: Vec<Gen<P>>,
    levels: Vec<Level<P>>,
    identity: P,
}

const MAX_DEGREE: usize = 14;

impl<P: Lift> Chain<P> {
    pub fn new(n: usize, identity: P) -> Result<Self> {
        if n > MAX_DEGREE {
            return Err(LatticeError::BudgetExceeded {
                what: "stabilizer chain degree".into(),
                needed: format!("2^{n}"),
                limit: format!("2^{MAX_DEGREE}"),
            });
        }
        let levels = (0..n)
            .map(|l| {
                let base = 1u64 << l;
                let mut tree = HashMap::new();
                tree.insert(base, (base, usize::MAX));
                let mut trans = HashMap::new();
                trans.insert(base, (BitMatrix::identity(n), BitMatrix::identity(n)));
                let mut lifts = HashMap::new();
                lifts.insert(base, identity.clone());
                Level {
                    strong: Vec::new(),
                    tree,
                    points: vec![base],
                    trans,
                    lifts,
                }
            })
            .collect();
        Ok(Chain {
            n,
            gens: Vec::new(),
            levels,
            identity,
        })
    }

    /// Builds the chain of the group generated by `gens`.
    pub fn from_generators(n: usize, gens: Vec<(BitMatrix, P)>, identity: P) -> Result<Self> {
        let mut chain = Self::new(n, identity)?;
        for (m, p) in gens {
            chain.add_generator(m, p)?;
        }
        Ok(chain)
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Adds a generator unless it already lies in the group. Returns whether
    /// the group grew.
    pub fn add_generator(&mut self, m: BitMatrix, lift: P) -> Result<bool> {
        if m.nrows() != self.n || m.ncols() != self.n {
            return Err(LatticeError::DimensionMismatch(format!(
                "generator is not {0}×{0}",
                self.n
            )));
        }
        let inv = m
            .inverse()
            .ok_or_else(|| LatticeError::Precondition("generator is singular".into()))?;
        if self.contains(&m) {
            return Ok(false);
        }
        let idx = self.push_gen(Gen { m, inv, lift });
        let mut work = VecDeque::new();
        self.add_strong(idx, &mut work);
        while let Some((l, beta, s)) = work.pop_front() {
            self.process(l, beta, s, &mut work);
        }
        Ok(true)
    }

    fn push_gen(&mut self, g: Gen<P>) -> usize {
        self.gens.push(g);
        self.gens.len() - 1
    }

    fn fixed_prefix(&self, m: &BitMatrix) -> usize {
        (0..self.n).take_while(|&i| m.row(i) == 1 << i).count()
    }

    /// Registers a strong generator on levels `0..=top` and closes each
    /// basic orbit under it at once; Schreier generators are queued.
    fn add_strong(&mut self, idx: usize, work: &mut VecDeque<(usize, u64, usize)>) {
        let top = self.fixed_prefix(&self.gens[idx].m);
        debug_assert!(top < self.n, "identity added as a strong generator");
        for l in 0..=top {
            self.levels[l].strong.push(idx);
            let old = self.levels[l].points.len();
            for i in 0..old {
                let beta = self.levels[l].points[i];
                self.extend_orbit(l, beta, idx);
                work.push_back((l, beta, idx));
            }
            let mut i = old;
            while i < self.levels[l].points.len() {
                let beta = self.levels[l].points[i];
                for k in 0..self.levels[l].strong.len() {
                    let t = self.levels[l].strong[k];
                    self.extend_orbit(l, beta, t);
                    work.push_back((l, beta, t));
                }
                i += 1;
            }
        }
    }

    fn extend_orbit(&mut self, l: usize, beta: u64, s: usize) {
        let gamma = self.gens[s].m.apply(beta);
        if self.levels[l].tree.contains_key(&gamma) {
            return;
        }
        let (sb, sbi) = &self.levels[l].trans[&beta];
        let g = &self.gens[s];
        let entry = (sb.mul(&g.m), g.inv.mul(sbi));
        let level = &mut self.levels[l];
        level.tree.insert(gamma, (beta, s));
        level.trans.insert(gamma, entry);
        level.points.push(gamma);
    }

    /// Sifts the Schreier generator `σ_β·s·σ_γ⁻¹` and adds its residue as a
    /// new strong generator when it is not the identity.
    fn process(&mut self, l: usize, beta: u64, s: usize, work: &mut VecDeque<(usize, u64, usize)>) {
        let gamma = self.gens[s].m.apply(beta);
        let (sb, _) = &self.levels[l].trans[&beta];
        let (_, sgi) = &self.levels[l].trans[&gamma];
        let schreier = sb.mul(&self.gens[s].m).mul(sgi);
        let (residue, _, path) = self.sift_from(schreier, l + 1);
        if residue.is_identity() {
            return;
        }
        let mut lift = self
            .trans_lift(l, beta)
            .then(&self.gens[s].lift)
            .then(&self.trans_lift(l, gamma).invert());
        for &(pl, pt) in &path {
            lift = lift.then(&self.trans_lift(pl, pt).invert());
        }
        let inv = residue.inverse().expect("group elements are invertible");
        let idx = self.push_gen(Gen {
            m: residue,
            inv,
            lift,
        });
        self.add_strong(idx, work);
    }

    /// Strips `g` through levels `start..n`; returns the residue, the level
    /// where stripping stopped, and the transversal points used.
    fn sift_from(&self, g: BitMatrix, start: usize) -> (BitMatrix, usize, Vec<(usize, u64)>) {
        let mut g = g;
        let mut path = Vec::new();
        for l in start..self.n {
            let beta = g.row(l);
            let Some((_, inv)) = self.levels[l].trans.get(&beta) else {
                return (g, l, path);
            };
            g = g.mul(inv);
            path.push((l, beta));
        }
        (g, self.n, path)
    }

    pub fn contains(&self, g: &BitMatrix) -> bool {
        self.sift_from(g.clone(), 0).0.is_identity()
    }

    fn trans_lift(&mut self, l: usize, point: u64) -> P {
        if let Some(p) = self.levels[l].lifts.get(&point) {
            return p.clone();
        }
        let mut chain = Vec::new();
        let mut cur = point;
        while !self.levels[l].lifts.contains_key(&cur) {
            let (parent, g) = self.levels[l].tree[&cur];
            chain.push((cur, g));
            cur = parent;
        }
        let mut acc = self.levels[l].lifts[&cur].clone();
        for &(pt, g) in chain.iter().rev() {
            acc = acc.then(&self.gens[g].lift);
            self.levels[l].lifts.insert(pt, acc.clone());
        }
        acc
    }

    /// The payload of an element `g` of the group, assembled from the
    /// transversals met while sifting; `None` if `g` is not in the group.
    pub fn lift_of(&mut self, g: &BitMatrix) -> Option<P> {
        let (residue, _, path) = self.sift_from(g.clone(), 0);
        if !residue.is_identity() {
            return None;
        }
        // g = σ_k ⋯ σ_1 σ_0 in action order σ_k first
        let mut acc = self.identity.clone();
        for &(l, pt) in path.iter().rev() {
            acc = acc.then(&self.trans_lift(l, pt));
        }
        Some(acc)
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.points.len()).collect()
    }

    pub fn order(&self) -> u128 {
        self.orbit_lengths()
            .iter()
            .fold(1u128, |acc, &k| acc * k as u128)
    }

    pub fn strong_generator_count(&self) -> usize {
        self.gens.len()
    }
}

/// Order of the subgroup of `GL(n, 2)` generated by `gens`.
pub fn group_order(n: usize, gens: &[BitMatrix]) -> Result<u128> {
    let chain = Chain::from_generators(n, gens.iter().map(|g| (g.clone(), ())).collect(), ())?;
    Ok(chain.order())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2quad::bits;

    fn brute_closure(n: usize, gens: &[BitMatrix]) -> usize {
        let mut seen = std::collections::HashSet::new();
        let id = BitMatrix::identity(n);
        seen.insert(id.clone());
        let mut frontier = vec![id];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = x.mul(g);
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn trivial_group() {
        assert_eq!(group_order(4, &[BitMatrix::identity(4)]).unwrap(), 1);
        assert_eq!(group_order(3, &[]).unwrap(), 1);
    }

    #[test]
    fn gl3_and_gl4() {
        // elementary transvections generate GL(n,2)
        for (n, expected) in [(3usize, 168u128), (4, 20160)] {
            let mut gens = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let mut m = BitMatrix::identity(n);
                        m.set(i, j, 1);
                        gens.push(m);
                    }
                }
            }
            assert_eq!(group_order(n, &gens).unwrap(), expected);
        }
    }

    #[test]
    fn random_subgroups_match_closure() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let n = rng.gen_range(2..=4);
            let mut gens = Vec::new();
            while gens.len() < rng.gen_range(1..=3) {
                let rows: Vec<u64> = (0..n).map(|_| rng.gen_range(0..1u64 << n)).collect();
                let m = BitMatrix::from_rows(rows, n);
                if m.inverse().is_some() {
                    gens.push(m);
                }
            }
            assert_eq!(
                group_order(n, &gens).unwrap(),
                brute_closure(n, &gens) as u128
            );
        }
    }

    #[test]
    fn lifts_follow_sifting() {
        // payload: the same matrix over the integers mod nothing, tracked as
        // the F₂ matrix itself; lift_of must reproduce the element
        #[derive(Clone, Debug, PartialEq)]
        struct Same(BitMatrix);
        impl Lift for Same {
            fn then(&self, o: &Self) -> Self {
                Same(self.0.mul(&o.0))
            }
            fn invert(&self) -> Self {
                Same(self.0.inverse().unwrap())
            }
        }
        let n = 4;
        let a = BitMatrix::from_rows(vec![0b0010, 0b0100, 0b1000, 0b0001], n);
        let b = BitMatrix::from_rows(vec![0b0011, 0b0010, 0b0100, 0b1000], n);
        let mut chain = Chain::from_generators(
            n,
            vec![(a.clone(), Same(a.clone())), (b.clone(), Same(b.clone()))],
            Same(BitMatrix::identity(n)),
        )
        .unwrap();
        let word = a.mul(&b).mul(&b).mul(&a).mul(&a).mul(&b);
        assert_eq!(chain.lift_of(&word).unwrap().0, word);
        let outside = BitMatrix::from_rows(vec![0b0001, 0b0010, 0b0100, 0b1100], n);
        if !chain.contains(&outside) {
            assert!(chain.lift_of(&outside).is_none());
        }
        assert_eq!(bits::mask(4), 15);
    }
}
