//! Discriminant groups `A*/A`, their torsion forms, isotropic glue
//! subgroups, overlattices and glue maps.
//!
//! Elements are written in Smith coordinates. If `U·G·V = D` is the Smith
//! form of the Gram matrix and `y` is the pairing vector `(⟨x,bⱼ⟩)ⱼ` of a
//! dual vector `x`, then `t = y·V` reduced modulo the invariant factors
//! `dᵢ > 1` are its coordinates, and generator `i` lifts to
//! `(1/dᵢ)·Uᵢ·B`.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{ensure, LatticeError, Result};
use crate::exactlin::{Int, IntMatrix, Rat, RatMatrix};
use crate::f2quad::bits;
use crate::lattice::{format_rational, Lattice};

/// Element coordinates: `t[i] ∈ [0, dᵢ)`.
pub type Element = Vec<i64>;

/// Reduces `x` into `[0, m)`.
pub fn rat_mod(x: &Rat, m: i64) -> Rat {
    let m = Rat::from_integer(Int::from(m));
    let q = (x / &m).floor();
    x - q * m
}

#[derive(Clone, Debug)]
pub struct DiscriminantForm {
    source: Lattice,
    factors: Vec<i64>,
    /// Columns of `V` belonging to nontrivial factors (`n × r`).
    to_coords: IntMatrix,
    gens: RatMatrix,
    /// `⟨gᵢ, gⱼ⟩` as exact rationals.
    gen_gram: RatMatrix,
    even: bool,
}

impl DiscriminantForm {
    pub fn new(a: &Lattice) -> Result<Self> {
        let g = a.int_gram()?;
        if !a.is_nondegenerate() {
            return Err(LatticeError::Degenerate(
                "discriminant of a degenerate lattice".into(),
            ));
        }
        let (d, u, v) = g.snf();
        let n = a.rank();
        let mut factors = Vec::new();
        let mut kept = Vec::new();
        for i in 0..n {
            let di = d.get(i, i);
            if !di.is_one() {
                let di = di.to_i64().ok_or_else(|| {
                    LatticeError::Precondition("invariant factor exceeds i64".into())
                })?;
                factors.push(di);
                kept.push(i);
            }
        }
        let r = kept.len();
        let mut to_coords = IntMatrix::zeros(n, r);
        let mut lifts = Vec::with_capacity(r);
        for (c, &i) in kept.iter().enumerate() {
            for j in 0..n {
                to_coords.set(j, c, v.get(j, i).clone());
            }
            let di = Rat::from_integer(Int::from(factors[c]));
            let coeff: Vec<Rat> = u
                .row(i)
                .iter()
                .map(|x| Rat::from_integer(x.clone()) / &di)
                .collect();
            lifts.push(a.to_ambient(&coeff));
        }
        let gens = RatMatrix::from_rows(lifts, a.ambient_dim());
        let gen_gram = a.space().pairing(&gens, &gens);
        Ok(DiscriminantForm {
            source: a.clone(),
            factors,
            to_coords,
            gens,
            gen_gram,
            even: a.is_even(),
        })
    }

    pub fn source(&self) -> &Lattice {
        &self.source
    }

    /// Nontrivial invariant factors `d₁ | d₂ | …`.
    pub fn invariant_factors(&self) -> &[i64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> Int {
        self.factors.iter().fold(Int::one(), |acc, &d| acc * d)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_two_elementary(&self) -> bool {
        self.factors.iter().all(|&d| d == 2)
    }

    pub fn has_quadratic_form(&self) -> bool {
        self.even
    }

    /// Ambient lifts of the generators; rows lie in `A*`.
    pub fn generators(&self) -> &RatMatrix {
        &self.gens
    }

    pub fn generator_gram(&self) -> &RatMatrix {
        &self.gen_gram
    }

    pub fn zero(&self) -> Element {
        vec![0; self.rank()]
    }

    pub fn add(&self, s: &[i64], t: &[i64]) -> Element {
        s.iter()
            .zip(t)
            .zip(&self.factors)
            .map(|((a, b), d)| (a + b).rem_euclid(*d))
            .collect()
    }

    pub fn scalar(&self, k: i64, s: &[i64]) -> Element {
        s.iter()
            .zip(&self.factors)
            .map(|(a, d)| (k * a).rem_euclid(*d))
            .collect()
    }

    pub fn unit(&self, i: usize) -> Element {
        let mut e = self.zero();
        e[i] = 1;
        e
    }

    /// Coordinates from the pairing vector `(⟨x,bⱼ⟩)ⱼ` of a dual vector.
    pub fn coords_from_pairing(&self, y: &[Int]) -> Element {
        let t = self.to_coords.apply(y);
        t.iter()
            .zip(&self.factors)
            .map(|(x, &d)| {
                x.mod_floor(&Int::from(d))
                    .to_i64()
                    .expect("reduced coordinate fits")
            })
            .collect()
    }

    /// Coordinates of an ambient point of `A*` (which must lie in `A⊗Q`).
    pub fn coords(&self, x: &[Rat]) -> Result<Element> {
        let a = &self.source;
        if a.coords(x).is_none() {
            return Err(LatticeError::Precondition(
                "point is outside the rational span".into(),
            ));
        }
        let row = RatMatrix::from_rows(vec![x.to_vec()], a.ambient_dim());
        let y = a.space().pairing(&row, a.basis());
        let y: Option<Vec<Int>> = y
            .row(0)
            .iter()
            .map(|v| v.is_integer().then(|| v.to_integer()))
            .collect();
        let y =
            y.ok_or_else(|| LatticeError::Precondition("point is not in the dual lattice".into()))?;
        Ok(self.coords_from_pairing(&y))
    }

    /// Ambient lift `Σ tᵢ gᵢ`.
    pub fn lift(&self, t: &[i64]) -> Vec<Rat> {
        let c: Vec<Rat> = t.iter().map(|&x| Rat::from_integer(Int::from(x))).collect();
        self.gens.apply(&c)
    }

    /// `b(s,t) ∈ [0,1)`.
    pub fn bilinear(&self, s: &[i64], t: &[i64]) -> Rat {
        let mut acc = Rat::zero();
        for (i, &si) in s.iter().enumerate() {
            if si == 0 {
                continue;
            }
            for (j, &tj) in t.iter().enumerate() {
                if tj != 0 {
                    acc += self.gen_gram.get(i, j) * Rat::from_integer(Int::from(si * tj));
                }
            }
        }
        rat_mod(&acc, 1)
    }

    /// `q(t) ∈ [0,2)`; defined for even sources only.
    pub fn quadratic(&self, t: &[i64]) -> Result<Rat> {
        if !self.even {
            return Err(LatticeError::Precondition(
                "quadratic form needs an even lattice".into(),
            ));
        }
        let mut acc = Rat::zero();
        for (i, &ti) in t.iter().enumerate() {
            if ti == 0 {
                continue;
            }
            acc += self.gen_gram.get(i, i) * Rat::from_integer(Int::from(ti * ti));
            for (j, &tj) in t.iter().enumerate().skip(i + 1) {
                if tj != 0 {
                    acc += self.gen_gram.get(i, j) * Rat::from_integer(Int::from(2 * ti * tj));
                }
            }
        }
        Ok(rat_mod(&acc, 2))
    }

    /// All elements in mixed-radix lexicographic order.
    pub fn elements(&self, budget: &Budget) -> Result<Vec<Element>> {
        let order = self.order();
        if order > Int::from(budget.max_group_order) {
            return Err(LatticeError::BudgetExceeded {
                what: "discriminant group".into(),
                needed: order.to_string(),
                limit: budget.max_group_order.to_string(),
            });
        }
        let mut out = vec![self.zero()];
        for (i, &d) in self.factors.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for e in &out {
                for k in 0..d {
                    let mut x = e.clone();
                    x[i] = k;
                    next.push(x);
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Action on the discriminant group of an ambient matrix mapping `A` to
    /// itself: row `i` holds the coordinates of `gᵢ·F`.
    pub fn induced_action(&self, f: &RatMatrix) -> Result<Vec<Element>> {
        (0..self.rank())
            .map(|i| self.coords(&f.apply(self.gens.row(i))))
            .collect()
    }

    /// Applies a homomorphism given by images of the generators.
    pub fn apply_hom(&self, images: &[Element], target: &DiscriminantForm, t: &[i64]) -> Element {
        let mut out = target.zero();
        for (i, &ti) in t.iter().enumerate() {
            if ti != 0 {
                out = target.add(&out, &target.scalar(ti, &images[i]));
            }
        }
        out
    }

    /// Stable text table: invariant factors, then the generator form values.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let factors: Vec<String> = self.factors.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(s, "order {}", self.order());
        let _ = writeln!(s, "invariant factors [{}]", factors.join(", "));
        for i in 0..self.rank() {
            let row: Vec<String> = (0..self.rank())
                .map(|j| format_rational(&self.bilinear(&self.unit(i), &self.unit(j))))
                .collect();
            let q = match self.quadratic(&self.unit(i)) {
                Ok(q) => format_rational(&q),
                Err(_) => "-".into(),
            };
            let _ = writeln!(s, "g{i}: q = {q}; b = [{}]", row.join(", "));
        }
        s
    }

    pub fn report(&self) -> DiscReport {
        DiscReport {
            order: self.order().to_string(),
            invariant_factors: self.factors.clone(),
            quadratic: (0..self.rank())
                .map(|i| {
                    self.quadratic(&self.unit(i))
                        .ok()
                        .map(|q| format_rational(&q))
                })
                .collect(),
            bilinear: (0..self.rank())
                .map(|i| {
                    (0..self.rank())
                        .map(|j| format_rational(&self.bilinear(&self.unit(i), &self.unit(j))))
                        .collect()
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscReport {
    pub order: String,
    pub invariant_factors: Vec<i64>,
    pub quadratic: Vec<Option<String>>,
    pub bilinear: Vec<Vec<String>>,
}

#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_group_order: u64,
    pub max_subgroups: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_group_order: 1 << 16,
            max_subgroups: 200_000,
        }
    }
}

/// A subgroup on which the discriminant bilinear form vanishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlueSubgroup {
    pub generators: Vec<Element>,
    pub order: u64,
    /// Whether `q` vanishes too (even glue); `None` for odd sources.
    pub quadratic_vanishes: Option<bool>,
}

impl GlueSubgroup {
    pub fn elements(&self, d: &DiscriminantForm) -> Vec<Element> {
        let mut set: Vec<Element> = vec![d.zero()];
        for g in &self.generators {
            let mut seen: HashSet<Element> = set.iter().cloned().collect();
            let mut frontier = set.clone();
            while let Some(x) = frontier.pop() {
                let y = d.add(&x, g);
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
            set = seen.into_iter().collect();
        }
        set.sort();
        set
    }
}

fn subgroup_flag(d: &DiscriminantForm, gens: &[Element]) -> Option<bool> {
    d.has_quadratic_form().then(|| {
        gens.iter()
            .all(|g| d.quadratic(g).map(|q| q.is_zero()).unwrap_or(false))
    })
}

fn too_many(n: usize, budget: &Budget) -> LatticeError {
    LatticeError::BudgetExceeded {
        what: "isotropic subgroups".into(),
        needed: format!("more than {n}"),
        limit: budget.max_subgroups.to_string(),
    }
}

/// Every subgroup on which the bilinear form vanishes identically,
/// including the trivial one, ordered by size and then by element list.
pub fn isotropic_subgroups(d: &DiscriminantForm, budget: &Budget) -> Result<Vec<GlueSubgroup>> {
    if d.is_two_elementary() && d.rank() <= 16 {
        isotropic_subspaces_f2(d, budget)
    } else {
        isotropic_subgroups_general(d, budget)
    }
}

/// Direct enumeration over element sets; works for any finite group.
pub fn isotropic_subgroups_general(
    d: &DiscriminantForm,
    budget: &Budget,
) -> Result<Vec<GlueSubgroup>> {
    let elems = d.elements(budget)?;
    let index = |x: &Element| -> usize {
        let mut i = 0usize;
        for (k, &f) in d.factors.iter().enumerate() {
            i = i * f as usize + x[k] as usize;
        }
        i
    };
    let iso: Vec<bool> = elems.iter().map(|x| d.bilinear(x, x).is_zero()).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut found: Vec<(Vec<usize>, Vec<Element>)> = Vec::new();
    let mut queue: Vec<(Vec<usize>, Vec<Element>)> = vec![(vec![0], Vec::new())];
    seen.insert(vec![0]);
    while let Some((members, gens)) = queue.pop() {
        let member_set: HashSet<usize> = members.iter().copied().collect();
        for (xi, x) in elems.iter().enumerate() {
            if !iso[xi] || member_set.contains(&xi) {
                continue;
            }
            if !gens.iter().all(|g| d.bilinear(g, x).is_zero()) {
                continue;
            }
            // close ⟨S, x⟩
            let mut closed: HashSet<usize> = member_set.clone();
            let mut multiple = x.clone();
            let mut coset_reps = Vec::new();
            while !member_set.contains(&index(&multiple)) {
                coset_reps.push(multiple.clone());
                multiple = d.add(&multiple, x);
            }
            for rep in &coset_reps {
                for &m in &members {
                    closed.insert(index(&d.add(rep, &elems[m])));
                }
            }
            let mut key: Vec<usize> = closed.into_iter().collect();
            key.sort_unstable();
            if seen.insert(key.clone()) {
                if seen.len() > budget.max_subgroups {
                    return Err(too_many(budget.max_subgroups, budget));
                }
                let mut g2 = gens.clone();
                g2.push(x.clone());
                queue.push((key, g2));
            }
        }
        found.push((members, gens));
    }
    found.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    Ok(found
        .into_iter()
        .map(|(members, gens)| GlueSubgroup {
            quadratic_vanishes: subgroup_flag(d, &gens),
            order: members.len() as u64,
            generators: gens,
        })
        .collect())
}

fn from_bits(x: u64, n: usize) -> Element {
    (0..n).map(|i| (x >> i & 1) as i64).collect()
}

/// Fast path for 2-elementary groups: subspaces as reduced F₂ bases.
pub fn isotropic_subspaces_f2(d: &DiscriminantForm, budget: &Budget) -> Result<Vec<GlueSubgroup>> {
    let n = d.rank();
    ensure(d.is_two_elementary(), || {
        "F₂ path needs a 2-elementary group".into()
    })?;
    let half = Rat::new(Int::one(), Int::from(2));
    // b(gᵢ,gⱼ) ∈ {0, 1/2}
    let mut bb = vec![0u64; n];
    for (i, row) in bb.iter_mut().enumerate() {
        for j in 0..n {
            let v = d.bilinear(&d.unit(i), &d.unit(j));
            if v == half {
                *row |= 1 << j;
            } else if !v.is_zero() {
                return Err(LatticeError::Falsified(
                    "2-elementary form takes a value outside {0,1/2}".into(),
                ));
            }
        }
    }
    let b = |x: u64, y: u64| -> u8 {
        let mut acc = 0u8;
        let mut bits_x = x;
        while bits_x != 0 {
            let i = bits_x.trailing_zeros() as usize;
            acc ^= bits::parity(bb[i] & y);
            bits_x &= bits_x - 1;
        }
        acc
    };
    let diag: u64 = (0..n)
        .filter(|&i| bb[i] >> i & 1 == 1)
        .fold(0, |acc, i| acc | 1 << i);
    let iso = |x: u64| bits::parity(x & diag) == 0;

    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    seen.insert(Vec::new());
    let mut queue: Vec<Vec<u64>> = vec![Vec::new()];
    let mut found: Vec<Vec<u64>> = Vec::new();
    while let Some(basis) = queue.pop() {
        for x in 1u64..(1u64 << n) {
            if bits::reduce(&basis, x) != x || !iso(x) || basis.iter().any(|&g| b(g, x) == 1) {
                continue;
            }
            let mut nb = basis.clone();
            bits::insert(&mut nb, x);
            if seen.insert(nb.clone()) {
                if seen.len() > budget.max_subgroups {
                    return Err(too_many(budget.max_subgroups, budget));
                }
                queue.push(nb);
            }
        }
        found.push(basis);
    }
    let mut out: Vec<(Vec<Element>, GlueSubgroup)> = found
        .into_iter()
        .map(|basis| {
            let gens: Vec<Element> = basis.iter().map(|&x| from_bits(x, n)).collect();
            let mut elems: Vec<Element> = bits::span_elements(&basis)
                .into_iter()
                .map(|x| from_bits(x, n))
                .collect();
            elems.sort();
            let sg = GlueSubgroup {
                quadratic_vanishes: subgroup_flag(d, &gens),
                order: 1 << basis.len(),
                generators: gens,
            };
            (elems, sg)
        })
        .collect();
    out.sort_by(|a, b| a.1.order.cmp(&b.1.order).then_with(|| a.0.cmp(&b.0)));
    Ok(out.into_iter().map(|(_, s)| s).collect())
}

/// `A` together with lifts of the subgroup generators.
pub fn overlattice(d: &DiscriminantForm, s: &GlueSubgroup) -> Result<Lattice> {
    for (i, g) in s.generators.iter().enumerate() {
        for h in &s.generators[i..] {
            if !d.bilinear(g, h).is_zero() {
                return Err(LatticeError::NotIsotropic(
                    "glue subgroup pairs nontrivially".into(),
                ));
            }
        }
    }
    let a = d.source();
    let mut gens = a.basis().clone();
    for g in &s.generators {
        gens = gens.vstack(&RatMatrix::from_rows(vec![d.lift(g)], a.ambient_dim()));
    }
    Lattice::generated_by(a.space().clone(), &gens)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
    Any,
}

/// A unimodular overlattice and the glue subgroup that produced it.
#[derive(Clone, Debug)]
pub struct GluedLattice {
    pub subgroup: GlueSubgroup,
    pub lattice: Lattice,
}

/// Every unimodular overlattice of `a` of the requested parity.
pub fn unimodular_overlattices(
    a: &Lattice,
    parity: Parity,
    budget: &Budget,
) -> Result<Vec<GluedLattice>> {
    let d = DiscriminantForm::new(a)?;
    let order = d.order();
    let root = order.sqrt();
    if &root * &root != order {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for s in isotropic_subgroups(&d, budget)? {
        if Int::from(s.order) != root {
            continue;
        }
        let even = a.is_even() && s.quadratic_vanishes == Some(true);
        let keep = match parity {
            Parity::Any => true,
            Parity::Even => even,
            Parity::Odd => !even,
        };
        if keep {
            let lattice = overlattice(&d, &s)?;
            ensure(lattice.is_unimodular(), || {
                "maximal isotropic glue gave a non-unimodular lattice".into()
            })?;
            ensure(lattice.is_even() == even, || {
                "overlattice parity disagrees with the glue flag".into()
            })?;
            out.push(GluedLattice {
                subgroup: s,
                lattice,
            });
        }
    }
    Ok(out)
}

/// The isomorphism `A*/A → B*/B` induced by projecting a unimodular `L`
/// containing `A ⊕ B` with `B = A⊥`.
#[derive(Clone, Debug)]
pub struct GlueMap {
    pub domain: DiscriminantForm,
    pub codomain: DiscriminantForm,
    /// Image of each domain generator.
    pub images: Vec<Element>,
}

fn pairing_rows(l: &Lattice, sub: &Lattice) -> Result<IntMatrix> {
    l.space()
        .pairing(l.basis(), sub.basis())
        .to_int()
        .ok_or_else(|| LatticeError::NotIntegral("sublattice pairs fractionally with L".into()))
}

/// Integer combination of the rows of `s` (modulo the relations `dᵢeᵢ`)
/// giving each unit vector; `None` if the rows do not generate.
fn unit_combinations(s: &[Element], factors: &[i64]) -> Option<Vec<Vec<Int>>> {
    let r = factors.len();
    let n = s.len();
    let mut rows: Vec<Vec<Int>> = s
        .iter()
        .map(|x| x.iter().map(|&v| Int::from(v)).collect())
        .collect();
    for (i, &d) in factors.iter().enumerate() {
        let mut e = vec![Int::zero(); r];
        e[i] = Int::from(d);
        rows.push(e);
    }
    let m = IntMatrix::from_rows(rows, r);
    let (h, u) = m.hnf();
    for i in 0..r {
        for j in 0..r {
            let want = if i == j { Int::one() } else { Int::zero() };
            if *h.get(i, j) != want {
                return None;
            }
        }
    }
    Some((0..r).map(|i| u.row(i)[..n].to_vec()).collect())
}

impl GlueMap {
    pub fn new(l: &Lattice, a: &Lattice, b: &Lattice) -> Result<Self> {
        if !l.is_unimodular() {
            return Err(LatticeError::NotUnimodular(format_rational(&l.det())));
        }
        if !l.is_primitive(a)? {
            return Err(LatticeError::NotPrimitive(
                "glue needs a primitive sublattice".into(),
            ));
        }
        if a.rank() + b.rank() != l.rank()
            || !a.space().pairing(a.basis(), b.basis()).is_zero_matrix()
        {
            return Err(LatticeError::Precondition(
                "B must be the orthogonal complement of A".into(),
            ));
        }
        let da = DiscriminantForm::new(a)?;
        let db = DiscriminantForm::new(b)?;
        let ya = pairing_rows(l, a)?;
        let yb = pairing_rows(l, b)?;
        let s: Vec<Element> = ya.iter_rows().map(|y| da.coords_from_pairing(y)).collect();
        let t: Vec<Element> = yb.iter_rows().map(|y| db.coords_from_pairing(y)).collect();
        let combos = unit_combinations(&s, da.invariant_factors())
            .ok_or_else(|| LatticeError::Falsified("projection of L does not cover A*/A".into()))?;
        let mut images = Vec::with_capacity(da.rank());
        for c in &combos {
            let mut img = db.zero();
            for (k, ck) in c.iter().enumerate() {
                let ck = ck.mod_floor(&Int::from(
                    2 * db.invariant_factors().iter().product::<i64>().max(1),
                ));
                let ck = ck.to_i64().expect("reduced coefficient fits");
                img = db.add(&img, &db.scalar(ck, &t[k]));
            }
            images.push(img);
        }
        let map = GlueMap {
            domain: da,
            codomain: db,
            images,
        };
        for (k, sk) in s.iter().enumerate() {
            ensure(map.apply(sk) == t[k], || {
                format!("glue map inconsistent on basis vector {k} of L")
            })?;
        }
        for (i, &d) in map.domain.invariant_factors().iter().enumerate() {
            ensure(
                map.codomain
                    .scalar(d, &map.images[i])
                    .iter()
                    .all(|&x| x == 0),
                || "glue map violates a relation".into(),
            )?;
        }
        ensure(map.domain.order() == map.codomain.order(), || {
            "discriminant orders differ".into()
        })?;
        ensure(
            unit_combinations(&map.images, map.codomain.invariant_factors()).is_some(),
            || "glue map is not onto".into(),
        )?;
        Ok(map)
    }

    pub fn apply(&self, x: &[i64]) -> Element {
        self.domain.apply_hom(&self.images, &self.codomain, x)
    }

    /// `b_B(γx, γy) = −b_A(x, y)` on all generator pairs.
    pub fn negates_bilinear(&self) -> bool {
        let r = self.domain.rank();
        (0..r).all(|i| {
            (0..r).all(|j| {
                let lhs = self.codomain.bilinear(&self.images[i], &self.images[j]);
                let rhs = rat_mod(
                    &-self
                        .domain
                        .bilinear(&self.domain.unit(i), &self.domain.unit(j)),
                    1,
                );
                lhs == rhs
            })
        })
    }

    /// Exhaustive comparison of quadratic values over the whole group.
    pub fn quadratic_check(&self, budget: &Budget) -> Result<QuadraticCheck> {
        let elems = self.domain.elements(budget)?;
        let mut equal = 0u64;
        let mut negated = 0u64;
        for x in &elems {
            let qa = self.domain.quadratic(x)?;
            let qb = self.codomain.quadratic(&self.apply(x))?;
            if qa == qb {
                equal += 1;
            }
            if qb == rat_mod(&-qa, 2) {
                negated += 1;
            }
        }
        Ok(QuadraticCheck {
            elements: elems.len() as u64,
            equal,
            negated,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticCheck {
    pub elements: u64,
    /// Elements with `q_B(γx) = q_A(x)`.
    pub equal: u64,
    /// Elements with `q_B(γx) = −q_A(x)`.
    pub negated: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::frac;
    use crate::lattice::{classify_unimodular, parse_standard, StandardForm};

    fn disc(name: &str) -> DiscriminantForm {
        DiscriminantForm::new(&parse_standard(name).unwrap()).unwrap()
    }

    #[test]
    fn unimodular_has_trivial_group() {
        let d = disc("U");
        assert!(d.is_trivial());
        assert_eq!(d.order(), Int::one());
    }

    #[test]
    fn u2_form_table() {
        let d = disc("U(2)");
        assert_eq!(d.invariant_factors(), &[2, 2]);
        // oracle: half-vectors e/2, f/2, (e+f)/2 of U(2) have norms 0, 0, 1
        let l = parse_standard("U(2)").unwrap();
        let mut qs: Vec<Rat> = d
            .elements(&Budget::default())
            .unwrap()
            .iter()
            .map(|x| d.quadratic(x).unwrap())
            .collect();
        qs.sort();
        assert_eq!(qs, vec![frac(0, 1), frac(0, 1), frac(0, 1), frac(1, 1)]);
        for x in d.elements(&Budget::default()).unwrap() {
            let p = d.lift(&x);
            assert_eq!(rat_mod(&l.space().norm(&p), 2), d.quadratic(&x).unwrap());
        }
    }

    #[test]
    fn order_equals_abs_det() {
        for name in [
            "E8(-2)+U(2)+U",
            "U(2)",
            "I(1,1)(3)",
            "U(6)+E8(-1)",
            "I(2,0)(2)+U(3)",
        ] {
            let l = parse_standard(name).unwrap();
            let d = DiscriminantForm::new(&l).unwrap();
            assert_eq!(
                Rat::from_integer(d.order()),
                num_traits::Signed::abs(&l.det()),
                "{name}"
            );
        }
        assert_eq!(disc("E8(-2)+U(2)+U").invariant_factors(), &[2; 10]);
    }

    #[test]
    fn quadratic_polar_identity() {
        let d = disc("U(6)+E8(-2)");
        let b = Budget::default();
        let elems = d.elements(&b).unwrap();
        for x in elems.iter().step_by(97) {
            for y in elems.iter().step_by(89) {
                let lhs = d.quadratic(&d.add(x, y)).unwrap();
                let rhs = rat_mod(
                    &(d.quadratic(x).unwrap()
                        + d.quadratic(y).unwrap()
                        + d.bilinear(x, y) * Rat::from_integer(2.into())),
                    2,
                );
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn u2_isotropic_subgroups() {
        let d = disc("U(2)");
        let subs = isotropic_subgroups(&d, &Budget::default()).unwrap();
        assert_eq!(subs.len(), 4);
        assert_eq!(subs[0].order, 1);
        let order2: Vec<_> = subs.iter().filter(|s| s.order == 2).collect();
        assert_eq!(order2.len(), 3);
        assert_eq!(
            order2
                .iter()
                .filter(|s| s.quadratic_vanishes == Some(true))
                .count(),
            2
        );
        let general = isotropic_subgroups_general(&d, &Budget::default()).unwrap();
        assert_eq!(general.len(), 4);
    }

    #[test]
    fn fast_and_general_paths_agree() {
        for name in ["U(2)+U(2)", "U(2)+U(2)+I(1,0)(2)", "U(2)+I(1,0)(2)"] {
            let d = disc(name);
            let b = Budget::default();
            let mut fast: Vec<Vec<Element>> = isotropic_subspaces_f2(&d, &b)
                .unwrap()
                .iter()
                .map(|s| s.elements(&d))
                .collect();
            let mut slow: Vec<Vec<Element>> = isotropic_subgroups_general(&d, &b)
                .unwrap()
                .iter()
                .map(|s| s.elements(&d))
                .collect();
            fast.sort();
            slow.sort();
            assert_eq!(fast, slow, "{name}");
        }
    }

    #[test]
    fn trivial_group_has_only_trivial_subgroup() {
        let d = disc("E8(-1)+U");
        let subs = isotropic_subgroups(&d, &Budget::default()).unwrap();
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].order, 1);
    }

    #[test]
    fn odd_glue_of_u2_gives_i11() {
        let d = disc("U(2)");
        let subs = isotropic_subgroups(&d, &Budget::default()).unwrap();
        let odd = subs
            .iter()
            .find(|s| s.quadratic_vanishes == Some(false))
            .unwrap();
        let l = overlattice(&d, odd).unwrap();
        assert!(l.is_unimodular() && l.is_odd());
        assert_eq!(
            classify_unimodular(&l).unwrap(),
            StandardForm::OddI { p: 1, m: 1 }
        );
        let triv = overlattice(&d, &subs[0]).unwrap();
        assert!(triv.lattice_equal(d.source()).unwrap());
    }

    #[test]
    fn overlattice_rejects_non_isotropic() {
        let d = disc("I(1,0)(2)+I(1,0)(2)");
        let s = GlueSubgroup {
            generators: vec![vec![1, 0]],
            order: 2,
            quadratic_vanishes: None,
        };
        assert!(matches!(
            overlattice(&d, &s),
            Err(LatticeError::NotIsotropic(_))
        ));
    }

    #[test]
    fn u2_unimodular_overlattices() {
        let a = parse_standard("U(2)").unwrap();
        let b = Budget::default();
        assert_eq!(
            unimodular_overlattices(&a, Parity::Any, &b).unwrap().len(),
            3
        );
        assert_eq!(
            unimodular_overlattices(&a, Parity::Even, &b).unwrap().len(),
            2
        );
        let odd = unimodular_overlattices(&a, Parity::Odd, &b).unwrap();
        assert_eq!(odd.len(), 1);
        let i11 = parse_standard("I(1,1)").unwrap();
        let only = unimodular_overlattices(&i11, Parity::Any, &b).unwrap();
        assert_eq!(only.len(), 1);
        assert!(only[0].lattice.lattice_equal(&i11).unwrap());
    }

    #[test]
    fn overlattice_discriminant_shrinks() {
        let a = parse_standard("U(2)+U(2)").unwrap();
        let d = DiscriminantForm::new(&a).unwrap();
        for s in isotropic_subgroups(&d, &Budget::default()).unwrap() {
            let o = overlattice(&d, &s).unwrap();
            let d2 = DiscriminantForm::new(&o).unwrap();
            assert_eq!(d2.order() * Int::from(s.order * s.order), d.order());
        }
    }

    #[test]
    fn glue_in_i20() {
        // L = I(2,0), A = ⟨(1,1)⟩, B = ⟨(1,−1)⟩: both of norm 2, disc Z/2 each.
        let l = parse_standard("I(2,0)").unwrap();
        let a = l.sublattice(&RatMatrix::from_i64(1, 2, &[1, 1])).unwrap();
        let b = l.orthogonal_complement_of(&a).unwrap();
        let g = GlueMap::new(&l, &a, &b).unwrap();
        assert_eq!(g.images, vec![vec![1]]);
        assert!(g.negates_bilinear());
    }

    #[test]
    fn glue_of_unimodular_summand_is_trivial() {
        let l = parse_standard("U+U").unwrap();
        let a = l
            .sublattice(&RatMatrix::from_i64(2, 4, &[1, 0, 0, 0, 0, 1, 0, 0]))
            .unwrap();
        let b = l.orthogonal_complement_of(&a).unwrap();
        let g = GlueMap::new(&l, &a, &b).unwrap();
        assert!(g.images.is_empty());
    }

    #[test]
    fn induced_action_of_minus_one_is_trivial_on_2_elementary() {
        let l = parse_standard("E8(-2)+U(2)").unwrap();
        let d = DiscriminantForm::new(&l).unwrap();
        let minus = RatMatrix::identity(10).scale(&-Rat::one());
        let act = d.induced_action(&minus).unwrap();
        for (i, row) in act.iter().enumerate() {
            assert_eq!(row, &d.unit(i));
        }
    }
}
