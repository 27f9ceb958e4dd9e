//! Quadratic spaces over F₂.
//!
//! `q(x) = x·Q·xᵀ` for an upper-triangular bit matrix `Q`; the polar form
//! `b(x,y) = q(x+y) + q(x) + q(y)` has matrix `Q + Qᵀ`. Vectors are bit
//! rows as in [`bits`].

pub mod bits;
mod schreier;
mod witt;

pub use schreier::{group_order, Chain, Lift, LiftedElement};
pub use witt::{
    greedy_singular_subspace, orthogonal_generators, random_singular_subspace, transvection,
    witt_extend,
};

use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::discriminant::DiscriminantForm;
use crate::error::{LatticeError, Result};
use crate::exactlin::{Int, Rat};
use crate::lattice::Lattice;
use bits::BitMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WittType {
    Plus,
    Minus,
}

impl WittType {
    pub fn sign(self) -> i32 {
        match self {
            WittType::Plus => 1,
            WittType::Minus => -1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2QuadSpace {
    n: usize,
    /// Row `i` holds `Q_ij` for `j ≥ i`.
    upper: Vec<u64>,
    polar: Vec<u64>,
}

impl F2QuadSpace {
    /// From the values `q(eᵢ)` and the polar matrix `b(eᵢ,eⱼ)`.
    pub fn from_values(diag: &[u8], polar: &BitMatrix) -> Result<Self> {
        let n = diag.len();
        if n > 63 || polar.nrows() != n || polar.ncols() != n {
            return Err(LatticeError::DimensionMismatch(
                "polar matrix must be n×n with n < 64".into(),
            ));
        }
        if polar.transpose() != *polar || (0..n).any(|i| polar.get(i, i) == 1) {
            return Err(LatticeError::Precondition(
                "polar form must be alternating".into(),
            ));
        }
        let upper = (0..n)
            .map(|i| {
                let above = polar.row(i) & !bits::mask(i + 1);
                above | ((diag[i] as u64 & 1) << i)
            })
            .collect();
        Ok(F2QuadSpace {
            n,
            upper,
            polar: polar.rows().to_vec(),
        })
    }

    /// `C/2C` with `q(x) = ⟨x,x⟩/2 mod 2`.
    pub fn from_even_lattice(c: &Lattice) -> Result<Self> {
        if !c.is_even() {
            return Err(LatticeError::Precondition(
                "F₂ reduction needs an even lattice".into(),
            ));
        }
        let g = c.int_gram()?;
        let n = c.rank();
        let two = Int::from(2);
        let diag: Vec<u8> = (0..n)
            .map(|i| u8::from((g.get(i, i) / &two).is_odd()))
            .collect();
        let mut polar = BitMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j && g.get(i, j).is_odd() {
                    polar.set(i, j, 1);
                }
            }
        }
        Self::from_values(&diag, &polar)
    }

    /// The discriminant form of a 2-elementary group whose quadratic values
    /// are integers, read modulo 2.
    pub fn from_disc_form(d: &DiscriminantForm) -> Result<Self> {
        if !d.is_two_elementary() {
            return Err(LatticeError::Precondition(
                "discriminant group is not 2-elementary".into(),
            ));
        }
        let n = d.rank();
        let two = Rat::from_integer(Int::from(2));
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            let q = d.quadratic(&d.unit(i))?;
            if !q.is_integer() {
                return Err(LatticeError::Precondition(format!(
                    "q(g{i}) = {q} is not an integer"
                )));
            }
            diag.push(u8::from(q.to_integer().is_odd()));
        }
        let mut polar = BitMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = d.bilinear(&d.unit(i), &d.unit(j)) * &two;
                if i != j && !v.is_zero() {
                    polar.set(i, j, 1);
                }
            }
        }
        Self::from_values(&diag, &polar)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn q(&self, x: u64) -> u8 {
        let mut acc = 0u8;
        let mut bx = x;
        while bx != 0 {
            let i = bx.trailing_zeros() as usize;
            acc ^= bits::parity(self.upper[i] & x);
            bx &= bx - 1;
        }
        acc
    }

    pub fn b(&self, x: u64, y: u64) -> u8 {
        let mut acc = 0u8;
        let mut bx = x;
        while bx != 0 {
            let i = bx.trailing_zeros() as usize;
            acc ^= bits::parity(self.polar[i] & y);
            bx &= bx - 1;
        }
        acc
    }

    /// The linear functional `y ↦ b(x, y)` as a bit mask.
    pub fn polar_of(&self, x: u64) -> u64 {
        BitMatrix::from_rows(self.polar.clone(), self.n).apply(x)
    }

    pub fn polar_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(self.polar.clone(), self.n)
    }

    pub fn radical(&self) -> Vec<u64> {
        bits::common_kernel(&self.polar, self.n)
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.radical().is_empty()
    }

    fn require_nondegenerate(&self) -> Result<()> {
        if self.n % 2 == 1 || !self.is_nondegenerate() {
            return Err(LatticeError::Degenerate(
                "needs a nondegenerate even-dimensional space".into(),
            ));
        }
        Ok(())
    }

    pub fn count_zeros(&self) -> u64 {
        (0..1u64 << self.n).filter(|&x| self.q(x) == 0).count() as u64
    }

    /// Arf invariant by counting zeros of `q`: plus type has
    /// `2^{n−1} + 2^{n/2−1}` zeros.
    pub fn arf(&self) -> Result<u8> {
        self.require_nondegenerate()?;
        if self.n > 26 {
            return Err(LatticeError::BudgetExceeded {
                what: "Arf zero count".into(),
                needed: format!("2^{}", self.n),
                limit: "2^26".into(),
            });
        }
        if self.n == 0 {
            return Ok(0);
        }
        let zeros = self.count_zeros();
        let plus = (1u64 << (self.n - 1)) + (1u64 << (self.n / 2 - 1));
        let minus = (1u64 << (self.n - 1)) - (1u64 << (self.n / 2 - 1));
        if zeros == plus {
            Ok(0)
        } else if zeros == minus {
            Ok(1)
        } else {
            Err(LatticeError::Falsified(format!(
                "{zeros} zeros fits neither Witt type"
            )))
        }
    }

    /// Arf invariant through a symplectic basis: `Σ q(eᵢ)q(fᵢ)`.
    pub fn arf_symplectic(&self) -> Result<u8> {
        self.require_nondegenerate()?;
        let pairs = self.symplectic_basis();
        Ok(pairs
            .iter()
            .fold(0u8, |acc, &(e, f)| acc ^ (self.q(e) & self.q(f))))
    }

    /// Hyperbolic pairs `(eᵢ, fᵢ)` with `b(eᵢ,fᵢ) = 1` and all other pairings
    /// zero. Requires a nondegenerate polar form.
    pub fn symplectic_basis(&self) -> Vec<(u64, u64)> {
        let mut rest: Vec<u64> = (0..self.n).map(|i| 1u64 << i).collect();
        let mut pairs = Vec::new();
        while let Some(e) = rest.first().copied() {
            let Some(fpos) = rest.iter().position(|&f| self.b(e, f) == 1) else {
                break;
            };
            let f = rest[fpos];
            let mut next = Vec::new();
            for (k, &v) in rest.iter().enumerate() {
                if k == 0 || k == fpos {
                    continue;
                }
                // project onto ⟨e,f⟩⊥
                let w = v
                    ^ if self.b(v, f) == 1 { e } else { 0 }
                    ^ if self.b(v, e) == 1 { f } else { 0 };
                next.push(w);
            }
            pairs.push((e, f));
            rest = next;
        }
        pairs
    }

    pub fn witt_type(&self) -> Result<WittType> {
        Ok(if self.arf()? == 0 {
            WittType::Plus
        } else {
            WittType::Minus
        })
    }

    /// Dimension of a maximal totally singular subspace.
    pub fn witt_index(&self) -> Result<usize> {
        Ok(self.n / 2 - self.arf()? as usize)
    }

    pub fn is_totally_singular(&self, basis: &[u64]) -> bool {
        basis.iter().all(|&x| self.q(x) == 0)
            && basis
                .iter()
                .enumerate()
                .all(|(i, &x)| basis[i + 1..].iter().all(|&y| self.b(x, y) == 0))
    }

    /// `g` is invertible and preserves `q` (checked on basis vectors and
    /// their polar pairings, which determines `q` everywhere).
    pub fn is_isometry(&self, g: &BitMatrix) -> bool {
        if g.nrows() != self.n || g.ncols() != self.n || g.inverse().is_none() {
            return false;
        }
        (0..self.n).all(|i| {
            let gi = g.row(i);
            self.q(gi) == self.q(1 << i)
                && (i + 1..self.n).all(|j| self.b(gi, g.row(j)) == self.b(1 << i, 1 << j))
        })
    }

    /// Order of the full orthogonal group.
    pub fn orthogonal_group_order(&self) -> Result<u128> {
        Ok(orthogonal_group_order_formula(self.n, self.witt_type()?))
    }
}

/// `|O^ε(2m, 2)| = 2·2^{m(m−1)}·(2^m − ε)·∏_{i=1}^{m−1}(2^{2i} − 1)`.
pub fn orthogonal_group_order_formula(n: usize, t: WittType) -> u128 {
    assert!(
        n % 2 == 0,
        "orthogonal groups over F₂ here are even-dimensional"
    );
    let m = (n / 2) as u32;
    if m == 0 {
        return 1;
    }
    let eps = t.sign() as i128;
    let mut order: u128 = 2 * (1u128 << (m * (m - 1)));
    order *= ((1i128 << m) - eps) as u128;
    for i in 1..m {
        order *= (1u128 << (2 * i)) - 1;
    }
    order
}

/// `|O(q)|` by testing every square bit matrix against `q` on every vector;
/// only for `n ≤ 4`.
pub fn exhaustive_orthogonal_order(s: &F2QuadSpace) -> Result<u128> {
    let n = s.dim();
    if n > 4 {
        return Err(LatticeError::BudgetExceeded {
            what: "exhaustive orthogonal group".into(),
            needed: format!("2^{}", n * n),
            limit: "2^16".into(),
        });
    }
    let mut count = 0u128;
    for code in 0..1u64 << (n * n) {
        let g = BitMatrix::from_rows(
            (0..n).map(|i| (code >> (i * n)) & bits::mask(n)).collect(),
            n,
        );
        if g.inverse().is_some() && (0..1u64 << n).all(|x| s.q(g.apply(x)) == s.q(x)) {
            count += 1;
        }
    }
    Ok(count)
}
