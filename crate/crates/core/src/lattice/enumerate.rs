//! Box enumeration of lattice vectors of a fixed norm.
//!
//! Indefinite lattices have infinitely many vectors of a given norm, so the
//! search is truncated to `|cᵢ| ≤ height` in basis coordinates. The search
//! is a depth-first walk over coordinates with an interval bound on what the
//! unfixed coordinates can still contribute. Arithmetic is exact `i64`; the
//! Gram matrix is range-checked up front so no intermediate can overflow.

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::Lattice;
use crate::error::{LatticeError, Result};

/// Integer Gram matrix in machine words, for hot loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntGram {
    n: usize,
    g: Vec<i64>,
}

impl IntGram {
    pub fn from_lattice(l: &Lattice) -> Result<Self> {
        let g = l.int_gram()?;
        let n = g.rows();
        let mut data = Vec::with_capacity(n * n);
        for r in g.iter_rows() {
            for x in r {
                data.push(
                    x.to_i64().ok_or_else(|| {
                        LatticeError::Precondition("gram entry exceeds i64".into())
                    })?,
                );
            }
        }
        Ok(IntGram { n, g: data })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        let g = rows.iter().flat_map(|r| {
            assert_eq!(r.len(), n, "gram must be square");
            r.iter().copied()
        });
        IntGram { n, g: g.collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.g[i * self.n + j]
    }

    pub fn inner(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s = 0;
        for i in 0..self.n {
            if a[i] == 0 {
                continue;
            }
            let row = &self.g[i * self.n..(i + 1) * self.n];
            let t: i64 = row.iter().zip(b).map(|(g, y)| g * y).sum();
            s += a[i] * t;
        }
        s
    }

    pub fn norm(&self, a: &[i64]) -> i64 {
        self.inner(a, a)
    }

    /// `G·x` as a column, i.e. the pairing vector of `x` with the basis.
    pub fn pairing_vector(&self, x: &[i64]) -> Vec<i64> {
        (0..self.n)
            .map(|i| {
                self.g[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(x)
                    .map(|(g, y)| g * y)
                    .sum()
            })
            .collect()
    }

    fn check_range(&self, height: i64) -> Result<()> {
        let max = self.g.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as u128;
        let n = self.n as u128;
        let h = height as u128;
        if 4 * n * n * max * h * h >= (1u128 << 62) {
            return Err(LatticeError::BudgetExceeded {
                what: "enumeration arithmetic".into(),
                needed: format!("n={} height={} max|g|={}", self.n, height, max),
                limit: "2^62".into(),
            });
        }
        Ok(())
    }

    /// All `c` with `|cᵢ| ≤ height` and `cGcᵀ = norm`, in lexicographic
    /// order, optionally only those with `gcd(c) = 1`.
    pub fn enumerate(&self, norm: i64, height: u32, primitive_only: bool) -> Result<Vec<Vec<i64>>> {
        let h = height as i64;
        self.check_range(h)?;
        if self.n == 0 {
            return Ok(if norm == 0 && !primitive_only {
                vec![Vec::new()]
            } else {
                Vec::new()
            });
        }
        // cross[k] bounds |2 Σ_{k≤j<l} g_jl c_j c_l| over the box
        let mut cross = vec![0i64; self.n + 1];
        for k in (0..self.n).rev() {
            let add: i64 = (k + 1..self.n)
                .map(|l| 2 * self.entry(k, l).abs() * h * h)
                .sum();
            cross[k] = cross[k + 1] + add;
        }
        let search = Search {
            gram: self,
            target: norm,
            h,
            primitive_only,
            cross,
        };
        let chunks: Vec<Vec<Vec<i64>>> = (-h..=h)
            .into_par_iter()
            .map(|first| {
                let mut out = Vec::new();
                let mut c = vec![0i64; self.n];
                let mut lins = vec![vec![0i64; self.n]; self.n + 1];
                c[0] = first;
                let p = self.entry(0, 0) * first * first;
                for j in 1..self.n {
                    lins[1][j] = self.entry(0, j) * first;
                }
                search.walk(1, &mut c, p, &mut lins, &mut out);
                out
            })
            .collect();
        Ok(chunks.concat())
    }
}

struct Search<'a> {
    gram: &'a IntGram,
    target: i64,
    h: i64,
    primitive_only: bool,
    cross: Vec<i64>,
}

impl Search<'_> {
    fn walk(
        &self,
        k: usize,
        c: &mut [i64],
        partial: i64,
        lins: &mut [Vec<i64>],
        out: &mut Vec<Vec<i64>>,
    ) {
        let n = self.gram.n;
        if k == n {
            if partial == self.target && (!self.primitive_only || gcd_is_one(c)) {
                out.push(c.to_vec());
            }
            return;
        }
        let (mut lo, mut hi) = (partial - self.cross[k], partial + self.cross[k]);
        for j in k..n {
            let (a, b) = self.term_range(j, lins[k][j]);
            lo += a;
            hi += b;
        }
        if self.target < lo || self.target > hi {
            return;
        }
        let gkk = self.gram.entry(k, k);
        let lin_k = lins[k][k];
        for v in -self.h..=self.h {
            c[k] = v;
            let p = partial + 2 * lin_k * v + gkk * v * v;
            if k + 1 < n {
                let (head, tail) = lins.split_at_mut(k + 1);
                let (cur, next) = (&head[k], &mut tail[0]);
                for j in k + 1..n {
                    next[j] = cur[j] + self.gram.entry(k, j) * v;
                }
            }
            self.walk(k + 1, c, p, lins, out);
        }
        c[k] = 0;
    }

    /// Range of `2·lin·x + g_jj·x²` over `|x| ≤ h`.
    fn term_range(&self, j: usize, lin: i64) -> (i64, i64) {
        let g = self.gram.entry(j, j);
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for x in -self.h..=self.h {
            let v = 2 * lin * x + g * x * x;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

pub fn gcd_is_one(c: &[i64]) -> bool {
    c.iter().fold(0i64, |acc, &x| acc.gcd(&x)) == 1
}

/// Vectors of `l` with basis coordinates bounded by `height` and the given
/// norm, in lexicographic order of coordinates.
pub fn enumerate_vectors(
    l: &Lattice,
    norm: i64,
    height: u32,
    primitive_only: bool,
) -> Result<Vec<Vec<i64>>> {
    IntGram::from_lattice(l)?.enumerate(norm, height, primitive_only)
}
