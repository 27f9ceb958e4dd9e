//! Exact integer and rational matrix algebra.
//!
//! Everything here works over `BigInt` / `BigRational`. Matrices are dense,
//! row-major, and act on row vectors from the right (`x ↦ x·M`), which is
//! the convention used throughout the crate for lattice bases and isometries.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{LatticeError, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(v: i64) -> Rat {
    Rat::from_integer(Int::from(v))
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<Int>;
pub type RatMatrix = Matrix<Rat>;

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T> Matrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        let c = self.cols;
        &mut self.data[r * c..(r + 1) * c]
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from row vectors. All rows must share a length; an
    /// empty list gives a `0 x cols` matrix.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        Matrix {
            rows: n,
            cols,
            data,
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.iter_rows().map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let rows = idx.iter().map(|&i| self.row(i).to_vec()).collect();
        Matrix::from_rows(rows, self.cols)
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T> Matrix<T>
where
    T: Clone
        + PartialEq
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>,
{
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn block_diag(blocks: &[&Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    m.set(r0 + r, c0 + c, b.get(r, c).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).clone() + a.clone() * b.clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.rows, "vector length mismatch");
        let mut out = vec![T::zero(); self.cols];
        for (k, xk) in x.iter().enumerate() {
            if xk.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let m = self.get(k, j);
                if !m.is_zero() {
                    *o = o.clone() + xk.clone() * m.clone();
                }
            }
        }
        out
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    fn add_row_multiple(&mut self, target: usize, source: usize, factor: &T) {
        if factor.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let s = self.get(source, c).clone();
            if s.is_zero() {
                continue;
            }
            let v = self.get(target, c).clone() + factor.clone() * s;
            self.set(target, c, v);
        }
    }

    fn add_col_multiple(&mut self, target: usize, source: usize, factor: &T) {
        if factor.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let s = self.get(r, source).clone();
            if s.is_zero() {
                continue;
            }
            let v = self.get(r, target).clone() + factor.clone() * s;
            self.set(r, target, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for x in self.row_mut(r) {
            *x = -x.clone();
        }
    }
}

/// Dot product of two vectors.
pub fn dot<T>(a: &[T], b: &[T]) -> T
where
    T: Clone + Zero + Mul<Output = T>,
{
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

impl IntMatrix {
    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Self {
        Matrix::from_vec(rows, cols, data.iter().map(|&v| Int::from(v)).collect())
    }

    pub fn to_rat(&self) -> RatMatrix {
        self.map(|x| Rat::from_integer(x.clone()))
    }

    pub fn to_i64(&self) -> Option<Matrix<i64>> {
        let data: Option<Vec<i64>> = self.data.iter().map(|x| x.to_i64()).collect();
        data.map(|d| Matrix {
            rows: self.rows,
            cols: self.cols,
            data: d,
        })
    }

    pub fn det(&self) -> Int {
        self.to_rat().det().to_integer()
    }

    /// Row Hermite normal form: returns `(H, U)` with `U` unimodular and
    /// `U·M = H`. Pivots are positive, entries above a pivot lie in
    /// `[0, pivot)`, zero rows are at the bottom.
    pub fn hnf(&self) -> (IntMatrix, IntMatrix) {
        let mut h = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut pr = 0;
        for c in 0..self.cols {
            if pr == self.rows {
                break;
            }
            loop {
                let piv = (pr..self.rows)
                    .filter(|&r| !h.get(r, c).is_zero())
                    .min_by(|&a, &b| h.get(a, c).abs().cmp(&h.get(b, c).abs()));
                let Some(piv) = piv else { break };
                h.swap_rows(pr, piv);
                u.swap_rows(pr, piv);
                let mut clean = true;
                for r in pr + 1..self.rows {
                    if h.get(r, c).is_zero() {
                        continue;
                    }
                    let q = h.get(r, c).div_floor(h.get(pr, c));
                    h.add_row_multiple(r, pr, &-q.clone());
                    u.add_row_multiple(r, pr, &-q);
                    if !h.get(r, c).is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    break;
                }
            }
            if h.get(pr, c).is_zero() {
                continue;
            }
            if h.get(pr, c).is_negative() {
                h.negate_row(pr);
                u.negate_row(pr);
            }
            for r in 0..pr {
                let q = h.get(r, c).div_floor(h.get(pr, c));
                if !q.is_zero() {
                    h.add_row_multiple(r, pr, &-q.clone());
                    u.add_row_multiple(r, pr, &-q);
                }
            }
            pr += 1;
        }
        (h, u)
    }

    /// Rank over Q, read off the Hermite form.
    pub fn rank(&self) -> usize {
        let (h, _) = self.hnf();
        h.iter_rows()
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .count()
    }

    /// Nonzero rows of the Hermite normal form: a canonical basis of the row
    /// lattice.
    pub fn row_lattice_basis(&self) -> IntMatrix {
        let (h, _) = self.hnf();
        let rows: Vec<Vec<Int>> = h
            .iter_rows()
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .map(|r| r.to_vec())
            .collect();
        IntMatrix::from_rows(rows, self.cols)
    }

    /// Basis (as rows) of the integer left kernel `{c ∈ Zⁿ : c·M = 0}`.
    pub fn left_kernel(&self) -> IntMatrix {
        let (h, u) = self.hnf();
        let rows: Vec<Vec<Int>> = (0..self.rows)
            .filter(|&r| h.row(r).iter().all(|x| x.is_zero()))
            .map(|r| u.row(r).to_vec())
            .collect();
        IntMatrix::from_rows(rows, self.rows)
    }

    /// Smith normal form: returns `(D, U, V)` with `D = U·M·V` diagonal,
    /// nonnegative, `d₁ | d₂ | …`, and `U`, `V` unimodular.
    pub fn snf(&self) -> (IntMatrix, IntMatrix, IntMatrix) {
        let mut d = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut v = IntMatrix::identity(self.cols);
        let n = self.rows.min(self.cols);
        for t in 0..n {
            loop {
                let mut best: Option<(usize, usize)> = None;
                for i in t..self.rows {
                    for j in t..self.cols {
                        let x = d.get(i, j);
                        if x.is_zero() {
                            continue;
                        }
                        match best {
                            Some((bi, bj)) if d.get(bi, bj).abs() <= x.abs() => {}
                            _ => best = Some((i, j)),
                        }
                    }
                }
                let Some((bi, bj)) = best else {
                    return (d, u, v);
                };
                d.swap_rows(t, bi);
                u.swap_rows(t, bi);
                d.swap_cols(t, bj);
                v.swap_cols(t, bj);

                let mut clean = true;
                for i in t + 1..self.rows {
                    if d.get(i, t).is_zero() {
                        continue;
                    }
                    let q = d.get(i, t).div_floor(d.get(t, t));
                    d.add_row_multiple(i, t, &-q.clone());
                    u.add_row_multiple(i, t, &-q);
                    if !d.get(i, t).is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..self.cols {
                    if d.get(t, j).is_zero() {
                        continue;
                    }
                    let q = d.get(t, j).div_floor(d.get(t, t));
                    d.add_col_multiple(j, t, &-q.clone());
                    v.add_col_multiple(j, t, &-q);
                    if !d.get(t, j).is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    continue;
                }
                let pivot = d.get(t, t).clone();
                let offender = (t + 1..self.rows)
                    .find(|&i| (t + 1..self.cols).any(|j| !d.get(i, j).is_multiple_of(&pivot)));
                match offender {
                    Some(i) => {
                        d.add_row_multiple(t, i, &Int::one());
                        u.add_row_multiple(t, i, &Int::one());
                    }
                    None => break,
                }
            }
            if d.get(t, t).is_negative() {
                d.negate_row(t);
                u.negate_row(t);
            }
        }
        (d, u, v)
    }

    /// Invariant factors (the SNF diagonal), including ones and zeros.
    pub fn invariant_factors(&self) -> Vec<Int> {
        let (d, _, _) = self.snf();
        (0..self.rows.min(self.cols))
            .map(|i| d.get(i, i).clone())
            .collect()
    }

    /// Basis of the left null space over F₂: rows `x ∈ {0,1}ⁿ` with
    /// `x·M ≡ 0 (mod 2)`, independent over F₂.
    pub fn kernel_mod2(&self) -> IntMatrix {
        let two = Int::from(2);
        let width = self.cols + self.rows;
        let mut aug: Vec<Vec<bool>> = (0..self.rows)
            .map(|r| {
                let mut row: Vec<bool> = self
                    .row(r)
                    .iter()
                    .map(|x| !x.mod_floor(&two).is_zero())
                    .collect();
                row.extend((0..self.rows).map(|k| k == r));
                row
            })
            .collect();
        let mut pr = 0;
        for c in 0..self.cols {
            let Some(p) = (pr..self.rows).find(|&r| aug[r][c]) else {
                continue;
            };
            aug.swap(pr, p);
            for r in 0..self.rows {
                if r != pr && aug[r][c] {
                    for k in 0..width {
                        let b = aug[pr][k];
                        aug[r][k] ^= b;
                    }
                }
            }
            pr += 1;
        }
        let rows: Vec<Vec<Int>> = aug[pr..]
            .iter()
            .map(|row| {
                row[self.cols..]
                    .iter()
                    .map(|&b| Int::from(b as u8))
                    .collect()
            })
            .collect();
        IntMatrix::from_rows(rows, self.rows)
    }

    /// True iff square with determinant ±1.
    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.det().abs().is_one()
    }
}

impl RatMatrix {
    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Self {
        IntMatrix::from_i64(rows, cols, data).to_rat()
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn to_int(&self) -> Option<IntMatrix> {
        if !self.is_integral() {
            return None;
        }
        Some(self.map(|x| x.to_integer()))
    }

    /// Least common multiple of all entry denominators.
    pub fn denominator_lcm(&self) -> Int {
        self.data
            .iter()
            .fold(Int::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// Splits `M = N / d` with `N` integral and `d` the denominator lcm.
    pub fn clear_denominators(&self) -> (IntMatrix, Int) {
        let d = self.denominator_lcm();
        let dr = Rat::from_integer(d.clone());
        let n = self.map(|x| (x * &dr).to_integer());
        (n, d)
    }

    pub fn det(&self) -> Rat {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m.get(r, c).is_zero()) else {
                return Rat::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det *= &piv;
            for r in c + 1..n {
                if m.get(r, c).is_zero() {
                    continue;
                }
                let f = -(m.get(r, c) / &piv);
                m.add_row_multiple(r, c, &f);
            }
        }
        det
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut pr = 0;
        for c in 0..self.cols {
            let Some(p) = (pr..self.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            m.swap_rows(pr, p);
            let piv = m.get(pr, c).clone();
            for r in pr + 1..self.rows {
                if m.get(r, c).is_zero() {
                    continue;
                }
                let f = -(m.get(r, c) / &piv);
                m.add_row_multiple(r, pr, &f);
            }
            pr += 1;
            if pr == self.rows {
                break;
            }
        }
        pr
    }

    /// Exact inverse by Gauss–Jordan elimination.
    pub fn inverse(&self) -> Result<RatMatrix> {
        if !self.is_square() {
            return Err(LatticeError::DimensionMismatch(
                "inverse of non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = RatMatrix::identity(n);
        for c in 0..n {
            let p = (c..n)
                .find(|&r| !m.get(r, c).is_zero())
                .ok_or(LatticeError::SingularMatrix)?;
            m.swap_rows(p, c);
            inv.swap_rows(p, c);
            let piv_inv = m.get(c, c).recip();
            for x in m.row_mut(c) {
                *x = &*x * &piv_inv;
            }
            for x in inv.row_mut(c) {
                *x = &*x * &piv_inv;
            }
            for r in 0..n {
                if r == c || m.get(r, c).is_zero() {
                    continue;
                }
                let f = -m.get(r, c).clone();
                m.add_row_multiple(r, c, &f);
                inv.add_row_multiple(r, c, &f);
            }
        }
        Ok(inv)
    }

    /// Solves `x·M = b` for a row vector `x` when `M` has full row rank and
    /// `b` lies in its row space. Returns `None` otherwise.
    pub fn solve_left(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.cols, "vector length mismatch");
        // Normal equations: x·(M Mᵀ) = b Mᵀ, then verify.
        let mt = self.transpose();
        let g = self.mul(&mt);
        let rhs = mt.apply(b);
        let x = g.inverse().ok()?.apply(&rhs);
        (self.apply(&x) == b).then_some(x)
    }

    /// Signature `(n₊, n₋, n₀)` of a symmetric matrix via exact congruence
    /// diagonalisation. A zero pivot with a nonzero off-diagonal entry is
    /// fixed by replacing `x` with `x + y`.
    pub fn signature(&self) -> (usize, usize, usize) {
        assert!(self.is_symmetric(), "signature of non-symmetric matrix");
        let n = self.rows;
        let mut g = self.clone();
        let (mut pos, mut neg, mut zero) = (0, 0, 0);
        for k in 0..n {
            if g.get(k, k).is_zero() {
                if let Some(j) = (k + 1..n).find(|&j| !g.get(j, j).is_zero()) {
                    g.swap_rows(k, j);
                    g.swap_cols(k, j);
                } else if let Some(j) = (k + 1..n).find(|&j| !g.get(k, j).is_zero()) {
                    g.add_row_multiple(k, j, &Rat::one());
                    g.add_col_multiple(k, j, &Rat::one());
                }
            }
            let piv = g.get(k, k).clone();
            if piv.is_zero() {
                // the whole remaining row/column is zero
                zero += 1;
                continue;
            }
            if piv.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            for r in k + 1..n {
                if g.get(r, k).is_zero() {
                    continue;
                }
                let f = -(g.get(r, k) / &piv);
                g.add_row_multiple(r, k, &f);
                g.add_col_multiple(r, k, &f);
            }
        }
        (pos, neg, zero)
    }
}
