//! Linear algebra over F₂ on bit-packed rows.
//!
//! Bit `i` of a `u64` is coordinate `i`. Matrices act on row vectors:
//! `x·M` is the XOR of the rows of `M` selected by the bits of `x`.

use std::fmt;

pub fn parity(x: u64) -> u8 {
    (x.count_ones() & 1) as u8
}

pub fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<u64>,
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let s: String = (0..self.cols)
                .map(|j| if r >> j & 1 == 1 { '1' } else { '0' })
                .collect();
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

impl BitMatrix {
    pub fn from_rows(rows: Vec<u64>, cols: usize) -> Self {
        assert!(cols <= 64);
        debug_assert!(rows.iter().all(|r| r & !mask(cols) == 0));
        BitMatrix { cols, rows }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix {
            cols: n,
            rows: (0..n).map(|i| 1u64 << i).collect(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![0; rows],
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        (self.rows[i] >> j & 1) as u8
    }

    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        if v & 1 == 1 {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn apply(&self, x: u64) -> u64 {
        let mut out = 0;
        let mut bits = x;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            out ^= self.rows[i];
            bits &= bits - 1;
        }
        out
    }

    /// `self · other`
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.nrows());
        BitMatrix {
            cols: other.cols,
            rows: self.rows.iter().map(|&r| other.apply(r)).collect(),
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut rows = vec![0u64; self.cols];
        for (i, &r) in self.rows.iter().enumerate() {
            for (j, t) in rows.iter_mut().enumerate() {
                *t |= (r >> j & 1) << i;
            }
        }
        BitMatrix {
            cols: self.rows.len(),
            rows,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows.len() == self.cols && self.rows.iter().enumerate().all(|(i, &r)| r == 1 << i)
    }

    pub fn rank(&self) -> usize {
        rref(&self.rows).len()
    }

    pub fn inverse(&self) -> Option<BitMatrix> {
        let n = self.rows.len();
        if n != self.cols {
            return None;
        }
        let mut a = self.rows.clone();
        let mut inv: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        for c in 0..n {
            let p = (c..n).find(|&r| a[r] >> c & 1 == 1)?;
            a.swap(c, p);
            inv.swap(c, p);
            for r in 0..n {
                if r != c && a[r] >> c & 1 == 1 {
                    a[r] ^= a[c];
                    inv[r] ^= inv[c];
                }
            }
        }
        Some(BitMatrix { cols: n, rows: inv })
    }
}

/// Reduced row echelon basis of the span of `rows`: pivots are lowest set
/// bits, rows sorted by pivot, each pivot bit cleared from every other row.
pub fn rref(rows: &[u64]) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        insert(&mut basis, r);
    }
    basis
}

/// Adds `x` to a reduced basis in place; returns false if `x` was already
/// in the span.
pub fn insert(basis: &mut Vec<u64>, x: u64) -> bool {
    let x = reduce(basis, x);
    if x == 0 {
        return false;
    }
    let p = x.trailing_zeros();
    for b in basis.iter_mut() {
        if *b >> p & 1 == 1 {
            *b ^= x;
        }
    }
    let pos = basis.partition_point(|b| b.trailing_zeros() < p);
    basis.insert(pos, x);
    true
}

/// Canonical representative of `x` modulo the span of a reduced basis.
pub fn reduce(basis: &[u64], x: u64) -> u64 {
    let mut x = x;
    for &b in basis {
        if x >> b.trailing_zeros() & 1 == 1 {
            x ^= b;
        }
    }
    x
}

pub fn in_span(basis: &[u64], x: u64) -> bool {
    reduce(basis, x) == 0
}

/// All `2^k` elements of the span, in Gray-code order starting at zero.
pub fn span_elements(basis: &[u64]) -> Vec<u64> {
    let k = basis.len();
    let mut out = Vec::with_capacity(1 << k);
    let mut cur = 0u64;
    out.push(cur);
    for i in 1u64..(1 << k) {
        cur ^= basis[i.trailing_zeros() as usize];
        out.push(cur);
    }
    out
}

/// Basis of `{y : parity(y & f) = 0 for every f in forms}` inside F₂ⁿ.
pub fn common_kernel(forms: &[u64], n: usize) -> Vec<u64> {
    // Solve the homogeneous system with the forms as equations.
    let eqs = rref(forms);
    let pivots: Vec<u32> = eqs.iter().map(|e| e.trailing_zeros()).collect();
    let mut out = Vec::new();
    for j in 0..n as u32 {
        if pivots.contains(&j) {
            continue;
        }
        let mut v = 1u64 << j;
        for (e, &p) in eqs.iter().zip(&pivots) {
            if e >> j & 1 == 1 {
                v |= 1 << p;
            }
        }
        out.push(v);
    }
    rref(&out)
}

/// Solutions of `parity(y & fᵢ) = cᵢ` for all equations `(fᵢ, cᵢ)`, as a
/// particular solution and a reduced basis of the homogeneous solutions.
pub fn solve_affine(eqs: &[(u64, u8)], n: usize) -> Option<(u64, Vec<u64>)> {
    let mut rows: Vec<(u64, u8)> = Vec::new();
    for &(f, c) in eqs {
        let (mut f, mut c) = (f, c & 1);
        for &(g, d) in &rows {
            if f >> g.trailing_zeros() & 1 == 1 {
                f ^= g;
                c ^= d;
            }
        }
        if f == 0 {
            if c == 1 {
                return None;
            }
            continue;
        }
        let p = f.trailing_zeros();
        for r in rows.iter_mut() {
            if r.0 >> p & 1 == 1 {
                r.0 ^= f;
                r.1 ^= c;
            }
        }
        rows.push((f, c));
    }
    // free variables at zero: each pivot variable equals its right-hand side
    let particular = rows
        .iter()
        .fold(0u64, |acc, &(f, c)| acc | (c as u64) << f.trailing_zeros());
    let forms: Vec<u64> = eqs.iter().map(|e| e.0).collect();
    Some((particular, common_kernel(&forms, n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = BitMatrix::from_rows(vec![0b011, 0b110, 0b001], 3);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
        assert!(BitMatrix::from_rows(vec![0b11, 0b11], 2)
            .inverse()
            .is_none());
    }

    #[test]
    fn rref_is_canonical() {
        let a = rref(&[0b1100, 0b0110, 0b1010]);
        let b = rref(&[0b0110, 0b1010]);
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        for &x in &a {
            for &y in &a {
                if x != y {
                    assert_eq!(y >> x.trailing_zeros() & 1, 0);
                }
            }
        }
    }

    #[test]
    fn kernel_matches_brute_force() {
        let forms = [0b10110u64, 0b01101, 0b11011];
        let k = common_kernel(&forms, 5);
        let brute: Vec<u64> = (0..32u64)
            .filter(|&y| forms.iter().all(|&f| parity(y & f) == 0))
            .collect();
        let mut span = span_elements(&k);
        span.sort();
        assert_eq!(span, brute);
    }

    #[test]
    fn affine_solutions_match_brute_force() {
        let eqs = [(0b1011u64, 1u8), (0b0110, 0), (0b1101, 1)];
        let (p, k) = solve_affine(&eqs, 4).unwrap();
        let sat = |y: u64| eqs.iter().all(|&(f, c)| parity(y & f) == c);
        assert!(sat(p));
        let mut got: Vec<u64> = span_elements(&k).into_iter().map(|v| v ^ p).collect();
        got.sort();
        let brute: Vec<u64> = (0..16).filter(|&y| sat(y)).collect();
        assert_eq!(got, brute);
        assert!(solve_affine(&[(0b11, 1), (0b11, 0)], 2).is_none());
    }

    #[test]
    fn transpose_and_apply() {
        let m = BitMatrix::from_rows(vec![0b01, 0b11, 0b10], 2);
        let t = m.transpose();
        assert_eq!(t.rows(), &[0b011, 0b110]);
        assert_eq!(m.apply(0b101), 0b11);
    }
}
