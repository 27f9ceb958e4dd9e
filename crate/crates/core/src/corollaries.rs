//! Constructive checks on `I(2,10)`: reduction of norm −1 vectors, the two
//! classes of primitive isotropic vectors and planes, the orthogonality of
//! meeting mirrors, and the two types of norm −4 vectors.
//!
//! `I(2,10)` is `Z¹²` with Gram matrix `diag(1, 1, −1, …, −1)`. Coordinates
//! `0, 1` are positive and `2..12` negative; the standard norm −1 vector
//! `e₋` is the last basis vector.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure, LatticeError, Result};
use crate::exactlin::{Int, IntMatrix, Rat, RatMatrix};
use crate::halving::HatPair;
use crate::lattice::{
    classify_unimodular, enumerate_vectors, gcd_is_one, parse_standard, IntGram, Lattice,
    StandardForm,
};

pub const DIM: usize = 12;
pub const POSITIVE: usize = 2;
/// Index of `e₋`.
pub const E_MINUS: usize = DIM - 1;

pub type Vector = Vec<i64>;

pub fn standard_lattice() -> Lattice {
    let mut diag = vec![Rat::from_integer(Int::from(1)); POSITIVE];
    diag.extend(std::iter::repeat_n(
        Rat::from_integer(Int::from(-1)),
        DIM - POSITIVE,
    ));
    Lattice::from_gram(RatMatrix::diagonal(&diag)).expect("diagonal form is nondegenerate")
}

fn sign(i: usize) -> i64 {
    if i < POSITIVE {
        1
    } else {
        -1
    }
}

pub fn inner(x: &[i64], y: &[i64]) -> i64 {
    x.iter()
        .zip(y)
        .enumerate()
        .map(|(i, (a, b))| sign(i) * a * b)
        .sum()
}

pub fn norm(x: &[i64]) -> i64 {
    inner(x, x)
}

pub fn height(x: &[i64]) -> i64 {
    x.iter().map(|v| v.abs()).max().unwrap_or(0)
}

fn unit(i: usize) -> Vector {
    let mut v = vec![0; DIM];
    v[i] = 1;
    v
}

/// `x − 2⟨x,r⟩/⟨r,r⟩·r` for `⟨r,r⟩ ∈ {±1, ±2}`.
pub fn reflect(r: &[i64], x: &[i64]) -> Vector {
    let n = norm(r);
    debug_assert!(matches!(n, -2 | -1 | 1 | 2));
    let c = 2 * inner(x, r) / n;
    x.iter().zip(r).map(|(a, b)| a - c * b).collect()
}

/// Reflection word carrying a norm −1 vector to `e₋`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub start: Vector,
    /// Mirror vectors, applied left to right.
    pub word: Vec<Vector>,
    pub target: Vector,
}

/// Signs and coordinate order: every coordinate nonnegative, each block
/// sorted descending. Returns the mirrors used.
fn normalize(x: &mut Vector, word: &mut Vec<Vector>) {
    for i in 0..DIM {
        if x[i] < 0 {
            let r = unit(i);
            *x = reflect(&r, x);
            word.push(r);
        }
    }
    for (lo, hi) in [(0, POSITIVE), (POSITIVE, DIM)] {
        for i in lo..hi {
            let j = (i..hi)
                .max_by_key(|&j| (x[j], std::cmp::Reverse(j)))
                .expect("nonempty block");
            if x[j] > x[i] {
                let mut r = vec![0; DIM];
                r[i] = 1;
                r[j] = -1;
                *x = reflect(&r, x);
                word.push(r);
            }
        }
    }
}

fn positive_weight(x: &[i64]) -> i64 {
    x[..POSITIVE].iter().map(|a| a * a).sum()
}

/// Mirrors `Σ_{i∈P} eᵢ + Σ_{j<k} f_j` with `|P| − k ∈ {±1, ±2}`, on a
/// normalized vector. Listed in a fixed order for tie-breaking.
fn descent_candidates() -> Vec<Vector> {
    let mut out = Vec::new();
    for p in [vec![0], vec![1], vec![0, 1]] {
        for k in 0..=p.len() + 2 {
            let n = p.len() as i64 - k as i64;
            if !matches!(n, -2 | -1 | 1 | 2) {
                continue;
            }
            let mut r = vec![0; DIM];
            for &i in &p {
                r[i] = 1;
            }
            for j in 0..k {
                r[POSITIVE + j] = 1;
            }
            out.push(r);
        }
    }
    out
}

/// Reduces `v` to `e₋` by reflections in vectors of norm ±1 and ±2.
///
/// After normalizing signs and order, the mirror that most decreases
/// `a₁² + a₂²` (the squared positive part) is applied, with ties broken
/// by candidate order; when the positive part vanishes `v = ±f_j` and a
/// sign change and a swap finish the word.
pub fn reduce_norm_minus_one(v: &[i64]) -> Result<Reduction> {
    if v.len() != DIM || norm(v) != -1 {
        return Err(LatticeError::Precondition(
            "reduction needs a norm −1 vector of I(2,10)".into(),
        ));
    }
    let candidates = descent_candidates();
    let mut x = v.to_vec();
    let mut word = Vec::new();
    while x != unit(E_MINUS) {
        normalize(&mut x, &mut word);
        let mu = positive_weight(&x);
        if mu == 0 {
            break;
        }
        let best = candidates
            .iter()
            .map(|r| (positive_weight(&reflect(r, &x)), r))
            .filter(|(m, _)| *m < mu)
            .min_by_key(|(m, _)| *m);
        let Some((_, r)) = best else {
            return Err(LatticeError::ReductionStalled(x));
        };
        x = reflect(r, &x);
        word.push(r.clone());
    }
    // x = f_j with j the first negative coordinate after normalization
    let j = (POSITIVE..DIM)
        .find(|&j| x[j] != 0)
        .expect("norm −1 vector is nonzero");
    if j != E_MINUS || x[j] < 0 {
        let mut r = vec![0; DIM];
        r[j] = 1;
        r[E_MINUS] = -1;
        x = reflect(&r, &x);
        word.push(r);
    }
    ensure(x == unit(E_MINUS), || format!("reduction ended at {x:?}"))?;
    Ok(Reduction {
        start: v.to_vec(),
        word,
        target: x,
    })
}

/// Composite matrix of a reflection word (row convention), with exact
/// overflow-checked arithmetic.
pub fn word_matrix(word: &[Vector]) -> Result<Vec<Vec<i128>>> {
    let mut m: Vec<Vec<i128>> = (0..DIM)
        .map(|i| (0..DIM).map(|j| i128::from(i == j)).collect())
        .collect();
    let overflow = || LatticeError::BudgetExceeded {
        what: "reflection word entries".into(),
        needed: "more than 127 bits".into(),
        limit: "i128".into(),
    };
    for r in word {
        let n = norm(r) as i128;
        // M ↦ M − (2/n)·(M·G·rᵀ)·r
        let gr: Vec<i128> = r
            .iter()
            .enumerate()
            .map(|(i, &v)| (sign(i) * v) as i128)
            .collect();
        for row in m.iter_mut() {
            let t: i128 = row.iter().zip(&gr).map(|(a, b)| a * b).sum();
            let c = (2 * t)
                .checked_div(n)
                .filter(|_| (2 * t) % n == 0)
                .ok_or_else(|| LatticeError::Falsified("non-integral reflection".into()))?;
            for (e, &rv) in row.iter_mut().zip(r) {
                *e = e
                    .checked_sub(c.checked_mul(rv as i128).ok_or_else(overflow)?)
                    .ok_or_else(overflow)?;
            }
        }
    }
    Ok(m)
}

fn is_isometry_matrix(m: &[Vec<i128>]) -> bool {
    (0..DIM).all(|i| {
        (0..DIM).all(|j| {
            let s: i128 = (0..DIM).map(|k| sign(k) as i128 * m[i][k] * m[j][k]).sum();
            s == if i == j { sign(i) as i128 } else { 0 }
        })
    })
}

/// Composes the word, checks it is an integral isometry, and checks that it
/// carries the start vector to `e₋`.
pub fn verify_reduction(red: &Reduction) -> Result<()> {
    for r in &red.word {
        ensure(matches!(norm(r), -2 | -1 | 1 | 2), || {
            format!("mirror {r:?} has norm outside ±1, ±2")
        })?;
    }
    let m = word_matrix(&red.word)?;
    ensure(is_isometry_matrix(&m), || {
        "reflection word does not preserve the form".into()
    })?;
    let image: Vec<i128> = (0..DIM)
        .map(|j| (0..DIM).map(|i| red.start[i] as i128 * m[i][j]).sum())
        .collect();
    let target: Vec<i128> = unit(E_MINUS).into_iter().map(i128::from).collect();
    ensure(image == target, || {
        format!("word sends {:?} to {image:?}", red.start)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

fn parity_of(l: &Lattice) -> Parity {
    if l.is_even() {
        Parity::Even
    } else {
        Parity::Odd
    }
}

fn rat_rows(rows: &[Vector]) -> RatMatrix {
    RatMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| Rat::from_integer(Int::from(x))).collect())
            .collect(),
        rows.first().map_or(0, Vec::len),
    )
}

/// Class of `v⊥/⟨v⟩` for a primitive isotropic `v` of a unimodular
/// lattice, with the classified quotient.
pub fn classify_isotropic_vector(l: &Lattice, v: &[i64]) -> Result<(Parity, StandardForm)> {
    if v.iter().all(|&x| x == 0) || !gcd_is_one(v) {
        return Err(LatticeError::NotPrimitive(
            "isotropic vector must be primitive".into(),
        ));
    }
    let x = l.to_ambient_int(&v.iter().map(|&c| Int::from(c)).collect::<Vec<_>>());
    let q = l.quotient_by_isotropic(&RatMatrix::from_rows(vec![x], l.ambient_dim()))?;
    Ok((parity_of(&q), classify_unimodular(&q)?))
}

/// Class of `V⊥/V` for a primitive isotropic plane `V` given by two rows
/// of basis coordinates.
pub fn classify_isotropic_plane(l: &Lattice, plane: &[Vector]) -> Result<(Parity, StandardForm)> {
    if plane.len() != 2 {
        return Err(LatticeError::Precondition(
            "an isotropic plane needs two generators".into(),
        ));
    }
    let rows = rat_rows(plane).mul(l.basis());
    if rows.rank() != 2 {
        return Err(LatticeError::Degenerate(
            "plane generators are dependent".into(),
        ));
    }
    let q = l.quotient_by_isotropic(&rows)?;
    Ok((parity_of(&q), classify_unimodular(&q)?))
}

/// The first primitive `w ∈ V` whose quotient `w⊥/⟨w⟩` is odd, searching
/// coefficient pairs by height, then by `|a| + |b|`, then descending.
pub fn odd_vector_in_plane(l: &Lattice, plane: &[Vector], max_height: i64) -> Result<Vector> {
    classify_isotropic_plane(l, plane)?;
    for h in 1..=max_height {
        let mut coeffs: Vec<(i64, i64)> = (-h..=h)
            .flat_map(|a| (-h..=h).map(move |b| (a, b)))
            .filter(|&(a, b)| a.abs().max(b.abs()) == h && gcd_is_one(&[a, b]))
            .collect();
        coeffs.sort_by_key(|&(a, b)| (a.abs() + b.abs(), -a, -b));
        for (a, b) in coeffs {
            let w: Vector = plane[0]
                .iter()
                .zip(&plane[1])
                .map(|(x, y)| a * x + b * y)
                .collect();
            if classify_isotropic_vector(l, &w)?.0 == Parity::Odd {
                return Ok(w);
            }
        }
    }
    Err(LatticeError::Falsified(format!(
        "no odd vector of height ≤ {max_height} in the plane"
    )))
}

/// For a primitive isotropic `v` of an odd unimodular lattice, `v⊥/⟨v⟩` is
/// even exactly when `v` is characteristic (`⟨v,x⟩ ≡ ⟨x,x⟩ mod 2`). Used
/// to cross-check the quotient computation.
pub fn isotropic_parity_by_characteristic(gram: &IntGram, v: &[i64]) -> Parity {
    let y = gram.pairing_vector(v);
    if (0..gram.dim()).all(|i| (y[i] - gram.entry(i, i)).rem_euclid(2) == 0) {
        Parity::Even
    } else {
        Parity::Odd
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Meeting {
    Disjoint,
    MeetOrthogonally,
}

/// Whether the norm −1 vectors `r, s` span a negative-definite plane, in
/// which case their inner product must vanish.
pub fn orthogonal_meeting_check(r: &[i64], s: &[i64]) -> Result<Meeting> {
    if norm(r) != -1 || norm(s) != -1 {
        return Err(LatticeError::Precondition(
            "both vectors must have norm −1".into(),
        ));
    }
    if r == s || r.iter().zip(s).all(|(a, b)| *a == -b) {
        return Err(LatticeError::Precondition(
            "vectors must not be ±equal".into(),
        ));
    }
    let t = inner(r, s);
    // [[−1, t], [t, −1]] is negative definite iff 1 − t² > 0
    if 1 - t * t > 0 {
        ensure(t == 0, || {
            format!("negative-definite pair with ⟨r,s⟩ = {t}")
        })?;
        Ok(Meeting::MeetOrthogonally)
    } else {
        Ok(Meeting::Disjoint)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm4Type {
    Even,
    Odd,
}

fn coords_i64(p: &HatPair, c: &[i64]) -> Result<Vec<Rat>> {
    if c.len() != p.a.rank() {
        return Err(LatticeError::DimensionMismatch(
            "coordinates do not match the rank of K".into(),
        ));
    }
    Ok(p.a.to_ambient_int(&c.iter().map(|&x| Int::from(x)).collect::<Vec<_>>()))
}

/// Even iff the point of `v` lies in `K̂`.
pub fn norm_minus4_type(p: &HatPair, c: &[i64]) -> Result<Norm4Type> {
    let x = coords_i64(p, c)?;
    if p.a.space().norm(&x) != Rat::from_integer(Int::from(-4)) || !gcd_is_one(c) {
        return Err(LatticeError::Precondition(
            "need a primitive norm −4 vector of K".into(),
        ));
    }
    Ok(if p.a_hat.contains(&x) {
        Norm4Type::Even
    } else {
        Norm4Type::Odd
    })
}

/// Nontrivial invariant factors of `v⊥` in `K`.
pub fn complement_invariant_factors(p: &HatPair, c: &[i64]) -> Result<Vec<Int>> {
    let x = coords_i64(p, c)?;
    let perp =
        p.a.orthogonal_complement(&RatMatrix::from_rows(vec![x], p.a.ambient_dim()))?;
    let mut f: Vec<Int> = perp
        .int_gram()?
        .invariant_factors()
        .into_iter()
        .map(|d| num_traits::Signed::abs(&d))
        .filter(|d| *d != Int::from(1))
        .collect();
    f.sort();
    Ok(f)
}

/// Type from the complement: `E8(−2)⊕U⊕⟨4⟩` has invariant factors
/// `2⁸·4`, `E8(−2)⊕U(2)⊕⟨4⟩` has `2¹⁰·4`.
pub fn norm_minus4_type_by_complement(p: &HatPair, c: &[i64]) -> Result<Norm4Type> {
    let f = complement_invariant_factors(p, c)?;
    let twos = f.iter().filter(|d| **d == Int::from(2)).count();
    let fours = f.iter().filter(|d| **d == Int::from(4)).count();
    match (twos, fours, f.len()) {
        (8, 1, 9) => Ok(Norm4Type::Even),
        (10, 1, 11) => Ok(Norm4Type::Odd),
        _ => Err(LatticeError::Falsified(format!(
            "unexpected complement invariant factors {f:?}"
        ))),
    }
}

/// Canonical representative under signed permutations of each block.
pub fn shape(x: &[i64]) -> Vector {
    let mut pos: Vec<i64> = x[..POSITIVE].iter().map(|v| v.abs()).collect();
    let mut neg: Vec<i64> = x[POSITIVE..].iter().map(|v| v.abs()).collect();
    pos.sort_unstable_by(|a, b| b.cmp(a));
    neg.sort_unstable_by(|a, b| b.cmp(a));
    pos.extend(neg);
    pos
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cor3Report {
    pub height: u32,
    pub vectors: usize,
    pub reduced: usize,
    pub verified: usize,
    pub max_word_length: usize,
    pub total_reflections: usize,
    /// Vectors whose reduction stalled or failed verification.
    pub failures: Vec<Vector>,
}

impl Cor3Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.verified == self.vectors && self.vectors > 0
    }
}

pub fn cor3_sweep(height: u32) -> Result<Cor3Report> {
    let vectors = enumerate_vectors(&standard_lattice(), -1, height, true)?;
    let results: Vec<(Vector, Result<usize>)> = vectors
        .par_iter()
        .map(|v| {
            let r = reduce_norm_minus_one(v)
                .and_then(|red| verify_reduction(&red).map(|_| red.word.len()));
            (v.clone(), r)
        })
        .collect();
    let mut report = Cor3Report {
        height,
        vectors: vectors.len(),
        reduced: 0,
        verified: 0,
        max_word_length: 0,
        total_reflections: 0,
        failures: Vec::new(),
    };
    for (v, r) in results {
        match r {
            Ok(len) => {
                report.reduced += 1;
                report.verified += 1;
                report.max_word_length = report.max_word_length.max(len);
                report.total_reflections += len;
            }
            Err(e) if e.is_falsification() => report.failures.push(v),
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlaneOutcome {
    pub lattice: String,
    pub generators: Vec<Vector>,
    pub parity: Parity,
    pub quotient: String,
    pub odd_vector: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cor4Report {
    /// Basis in which heights are measured.
    pub model: String,
    pub height: u32,
    pub isotropic_vectors: usize,
    /// Quotient class → number of vectors, classes assigned by the
    /// characteristic-vector criterion.
    pub classes: BTreeMap<String, usize>,
    /// Quotient class → number of sampled vectors whose quotient was
    /// computed and classified directly.
    pub quotient_classes: BTreeMap<String, usize>,
    pub parity_disagreements: usize,
    pub planes: Vec<PlaneOutcome>,
    pub sampled_planes: usize,
    pub sampled_planes_with_odd_vector: usize,
    pub sampled_plane_classes: BTreeMap<String, usize>,
    pub seed: u64,
}

const ISOTROPIC_CLASSES: [&str; 2] = ["I(1,9)", "II(1,9)"];

impl Cor4Report {
    pub fn passed(&self) -> bool {
        let keys = |m: &BTreeMap<String, usize>| m.keys().cloned().collect::<Vec<_>>();
        let expected: Vec<String> = ISOTROPIC_CLASSES.iter().map(|s| s.to_string()).collect();
        let plane_parities: Vec<Parity> = self.planes.iter().map(|p| p.parity).collect();
        keys(&self.classes) == expected
            && keys(&self.quotient_classes) == expected
            && self.classes.values().all(|&n| n > 0)
            && self.parity_disagreements == 0
            && plane_parities.contains(&Parity::Odd)
            && plane_parities.contains(&Parity::Even)
            && self.sampled_planes == self.sampled_planes_with_odd_vector
    }
}

/// `I(2,10)` presented as `II(1,9) ⊕ I(1,1) = E8(−1) ⊕ U ⊕ I(1,1)`. In the
/// standard basis every height-≤2 isotropic vector has an even coordinate
/// and hence an odd quotient, so the sweep uses this basis instead.
pub const COR4_MODEL: &str = "II(1,9)+I(1,1)";

/// The plane spanned by `e₁ + f₁` and `e₂ + f₂`, with odd quotient `I(0,8)`.
pub fn odd_plane() -> Vec<Vector> {
    let mut a = vec![0; DIM];
    a[0] = 1;
    a[POSITIVE] = 1;
    let mut b = vec![0; DIM];
    b[1] = 1;
    b[POSITIVE + 1] = 1;
    vec![a, b]
}

/// Inside `I(1,9) ⊕ I(1,1)`: the characteristic isotropic vector
/// `3e₁ + f₁ + … + f₉` of `I(1,9)`, whose quotient is `E8(−1)`, and
/// `e₂ + f₁₀`. The plane quotient is `E8(−1)`.
pub fn even_plane() -> Vec<Vector> {
    let mut a = vec![0; DIM];
    a[0] = 3;
    for x in a.iter_mut().take(DIM - 1).skip(POSITIVE) {
        *x = 1;
    }
    let mut b = vec![0; DIM];
    b[1] = 1;
    b[E_MINUS] = 1;
    vec![a, b]
}

/// In the model basis: the isotropic `e` of `U` and the characteristic
/// isotropic `(1,1)` of `I(1,1)`; the quotient is `E8(−1)`.
pub fn even_plane_in_model() -> Vec<Vector> {
    let mut a = vec![0; DIM];
    a[8] = 1;
    let mut b = vec![0; DIM];
    b[10] = 1;
    b[11] = 1;
    vec![a, b]
}

fn class_name(p: Parity) -> String {
    match p {
        Parity::Odd => ISOTROPIC_CLASSES[0].to_string(),
        Parity::Even => ISOTROPIC_CLASSES[1].to_string(),
    }
}

fn plane_outcome(l: &Lattice, name: &str, gens: Vec<Vector>) -> Result<PlaneOutcome> {
    let (parity, form) = classify_isotropic_plane(l, &gens)?;
    let odd_vector = odd_vector_in_plane(l, &gens, 4)?;
    Ok(PlaneOutcome {
        lattice: name.to_string(),
        generators: gens,
        parity,
        quotient: form.to_string(),
        odd_vector,
    })
}

pub fn cor4_sweep(height: u32, samples: usize, seed: u64) -> Result<Cor4Report> {
    let model = parse_standard(COR4_MODEL)?;
    let gram = IntGram::from_lattice(&model)?;
    let vectors = gram.enumerate(0, height, true)?;
    let (even, odd): (Vec<&Vector>, Vec<&Vector>) = vectors
        .iter()
        .partition(|v| isotropic_parity_by_characteristic(&gram, v) == Parity::Even);
    let mut classes = BTreeMap::new();
    for (set, p) in [(&odd, Parity::Odd), (&even, Parity::Even)] {
        if !set.is_empty() {
            classes.insert(class_name(p), set.len());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample: Vec<(&Vector, Parity)> = Vec::new();
    for (set, p) in [(&odd, Parity::Odd), (&even, Parity::Even)] {
        sample.extend(set.choose_multiple(&mut rng, samples).map(|v| (*v, p)));
    }
    let checked: Vec<(StandardForm, bool)> = sample
        .par_iter()
        .map(|(v, p)| {
            let (parity, form) = classify_isotropic_vector(&model, v)?;
            Ok((form, parity == *p))
        })
        .collect::<Result<_>>()?;
    let mut quotient_classes = BTreeMap::new();
    let mut disagreements = 0;
    for (form, agree) in &checked {
        *quotient_classes.entry(form.to_string()).or_default() += 1;
        disagreements += usize::from(!agree);
    }
    let standard = standard_lattice();
    let planes = vec![
        plane_outcome(&standard, "I(2,10)", odd_plane())?,
        plane_outcome(&standard, "I(2,10)", even_plane())?,
        plane_outcome(&model, COR4_MODEL, even_plane_in_model())?,
    ];
    // planes spanned by two orthogonal height-1 isotropic vectors of the model
    let small: Vec<&Vector> = vectors.iter().filter(|v| height_of(v) <= 1).collect();
    let mut sampled = 0;
    let mut with_odd = 0;
    let mut sampled_classes = BTreeMap::new();
    let mut attempts = 0;
    while sampled < samples && !small.is_empty() && attempts < 1000 * samples.max(1) {
        attempts += 1;
        let v = *small.choose(&mut rng).expect("nonempty");
        let w = *small.choose(&mut rng).expect("nonempty");
        if gram.inner(v, w) != 0 {
            continue;
        }
        let gens = vec![v.clone(), w.clone()];
        let rows = rat_rows(&gens).mul(model.basis());
        if rows.rank() != 2 || !model.is_primitive(&model.sublattice(&rows)?)? {
            continue;
        }
        let (_, form) = classify_isotropic_plane(&model, &gens)?;
        *sampled_classes.entry(form.to_string()).or_default() += 1;
        sampled += 1;
        if odd_vector_in_plane(&model, &gens, 4).is_ok() {
            with_odd += 1;
        }
    }
    Ok(Cor4Report {
        model: COR4_MODEL.to_string(),
        height,
        isotropic_vectors: vectors.len(),
        classes,
        quotient_classes,
        parity_disagreements: disagreements,
        planes,
        sampled_planes: sampled,
        sampled_planes_with_odd_vector: with_odd,
        sampled_plane_classes: sampled_classes,
        seed,
    })
}

fn height_of(v: &[i64]) -> i64 {
    height(v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cor5Report {
    pub height: u32,
    pub vectors: usize,
    /// Orbit representatives used for the first vector of each pair.
    pub representatives: usize,
    /// Pairs `(r, s)` examined with `r` a representative and `s ≠ ±r`.
    pub pairs: u64,
    pub negative_definite: u64,
    pub disjoint: u64,
    pub violations: u64,
}

impl Cor5Report {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.pairs > 0
    }
}

/// Every pair is equivalent under signed block permutations, which
/// preserve height and inner products, to one whose first vector is an
/// orbit representative; so representatives against all vectors cover all
/// pairs.
pub fn cor5_sweep(height: u32) -> Result<Cor5Report> {
    let vectors = enumerate_vectors(&standard_lattice(), -1, height, true)?;
    let mut reps: Vec<Vector> = vectors.iter().map(|v| shape(v)).collect();
    reps.sort();
    reps.dedup();
    let counts: Vec<(u64, u64, u64, u64)> = reps
        .par_iter()
        .map(|r| {
            let mut c = (0u64, 0u64, 0u64, 0u64);
            for s in &vectors {
                match orthogonal_meeting_check(r, s) {
                    Ok(Meeting::MeetOrthogonally) => {
                        c.0 += 1;
                        c.1 += 1;
                    }
                    Ok(Meeting::Disjoint) => {
                        c.0 += 1;
                        c.2 += 1;
                    }
                    Err(LatticeError::Precondition(_)) => {}
                    Err(_) => {
                        c.0 += 1;
                        c.3 += 1;
                    }
                }
            }
            c
        })
        .collect();
    let total = counts.iter().fold((0, 0, 0, 0), |a, c| {
        (a.0 + c.0, a.1 + c.1, a.2 + c.2, a.3 + c.3)
    });
    Ok(Cor5Report {
        height,
        vectors: vectors.len(),
        representatives: reps.len(),
        pairs: total.0,
        negative_definite: total.1,
        disjoint: total.2,
        violations: total.3,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Norm4Report {
    pub height: u32,
    pub vectors: usize,
    pub even: usize,
    pub odd: usize,
    pub cross_checked: usize,
    pub cross_check_disagreements: usize,
    pub seed: u64,
}

impl Norm4Report {
    pub fn passed(&self) -> bool {
        self.even > 0
            && self.odd > 0
            && self.cross_check_disagreements == 0
            && self.cross_checked > 0
    }
}

/// Types of all primitive norm −4 vectors of `K` in the box, with the
/// complement criterion checked on a seeded sample of each type.
pub fn norm4_sweep(p: &HatPair, height: u32, samples: usize, seed: u64) -> Result<Norm4Report> {
    let vectors = enumerate_vectors(&p.a, -4, height, true)?;
    let transition = {
        let t = p.a.basis().mul(&p.a_hat.basis().inverse()?);
        t.clear_denominators()
    };
    let (num, den) = transition;
    let den = i64::try_from(&den)
        .map_err(|_| LatticeError::Precondition("basis change exceeds i64".into()))?;
    let num: IntMatrix = num;
    let num: Vec<Vec<i64>> = num
        .iter_rows()
        .map(|r| {
            r.iter()
                .map(|x| {
                    i64::try_from(x)
                        .map_err(|_| LatticeError::Precondition("basis change exceeds i64".into()))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let in_hat = |c: &[i64]| -> bool {
        (0..num[0].len())
            .all(|j| c.iter().zip(&num).map(|(ci, row)| ci * row[j]).sum::<i64>() % den == 0)
    };
    let (even, odd): (Vec<&Vector>, Vec<&Vector>) = vectors.iter().partition(|c| in_hat(c));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample: Vec<(&Vector, Norm4Type)> = Vec::new();
    for (set, t) in [(&even, Norm4Type::Even), (&odd, Norm4Type::Odd)] {
        sample.extend(set.choose_multiple(&mut rng, samples).map(|c| (*c, t)));
    }
    let disagreements: usize = sample
        .par_iter()
        .map(|(c, t)| {
            let by_membership = norm_minus4_type(p, c)?;
            let by_complement = norm_minus4_type_by_complement(p, c)?;
            Ok(usize::from(by_membership != *t || by_complement != *t))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(Norm4Report {
        height,
        vectors: vectors.len(),
        even: even.len(),
        odd: odd.len(),
        cross_checked: sample.len(),
        cross_check_disagreements: disagreements,
        seed,
    })
}
