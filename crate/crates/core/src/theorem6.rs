//! The diagonal embedding of `E8(−2)⊕U(2)` in `E8(−1)²⊕U³`, its complement
//! and the uniqueness argument for such embeddings, checked on an explicit
//! model.
//!
//! Coordinates of `L`: the two `E8(−1)` summands occupy `0..8` and `8..16`,
//! the three copies of `U` occupy `16..18`, `18..20` and `20..22`. The
//! standalone lattice `A₀ = E8(−2)⊕U(2)` has coordinates `0..8` and `8..10`.

use num_integer::Integer;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::discriminant::{overlattice, Budget, DiscriminantForm, Element, GlueMap, GlueSubgroup};
use crate::error::{ensure, LatticeError, Result};
use crate::exactlin::{Int, IntMatrix, Rat, RatMatrix};
use crate::f2quad::bits::{self, BitMatrix};
use crate::f2quad::{
    greedy_singular_subspace, orthogonal_group_order_formula, random_singular_subspace,
    witt_extend, Chain, F2QuadSpace, LiftedElement,
};
use crate::isometry::{self, is_isometry_of, lattice_matrix, preserves_form};
use crate::lattice::{classify_unimodular, parse_standard, Lattice, StandardForm};

pub const L_DIM: usize = 22;
pub const A_RANK: usize = 10;
pub const B_RANK: usize = 12;
pub const DEFAULT_SEED: u64 = 7;

/// `L`, the diagonal `A`, its complement `B`, an even unimodular
/// overlattice `C` of `B` and the bookkeeping relating them.
#[derive(Clone, Debug)]
pub struct EmbeddingScene {
    pub l: Lattice,
    pub a: Lattice,
    pub b: Lattice,
    pub c: Lattice,
    pub a0: Lattice,
    pub glue: GlueMap,
    /// `B*/B` as a quadratic space over F₂.
    pub disc_b_space: F2QuadSpace,
    /// The totally singular subspace of `B*/B` glued to form `C`.
    pub glue_subspace: Vec<u64>,
    /// `C/2C` with the halved norm mod 2.
    pub c_space: F2QuadSpace,
    /// Image of `2B*` in `C/2C`.
    pub s5: Vec<u64>,
    /// Rows of `A` then of `B`, a basis of `(A⊕B)⊗Q`.
    pub p: RatMatrix,
    pub p_inv: RatMatrix,
}

fn ints(xs: &[i64]) -> Vec<Rat> {
    xs.iter()
        .map(|&x| Rat::from_integer(Int::from(x)))
        .collect()
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// `x ↦ (x, εx, u, εu, 0)` for a coordinate vector of `A₀`.
fn diagonal(x: &[i64], sign: i64) -> Vec<i64> {
    let mut v = vec![0; L_DIM];
    for i in 0..8 {
        v[i] = x[i];
        v[8 + i] = sign * x[i];
    }
    for j in 0..2 {
        v[16 + j] = x[8 + j];
        v[18 + j] = sign * x[8 + j];
    }
    v
}

pub fn element_bits(e: &[i64]) -> u64 {
    e.iter()
        .enumerate()
        .fold(0, |acc, (i, &x)| acc | (((x & 1) as u64) << i))
}

pub fn bits_element(x: u64, n: usize) -> Element {
    (0..n).map(|i| (x >> i & 1) as i64).collect()
}

fn action_bits(images: &[Element]) -> BitMatrix {
    BitMatrix::from_rows(
        images.iter().map(|e| element_bits(e)).collect(),
        images.len(),
    )
}

fn invariant_line(l: &Lattice) -> String {
    let (p, m, _) = l.signature();
    format!(
        "{}, signature ({p},{m}), det {}",
        if l.is_even() { "even" } else { "odd" },
        l.det()
    )
}

/// Bits of `x ∈ C` in `C/2C`.
fn mod2_bits(c: &Lattice, x: &[Rat]) -> Result<u64> {
    let k = c
        .int_coords(x)
        .ok_or_else(|| LatticeError::Falsified("vector does not lie in C".into()))?;
    Ok(k.iter()
        .enumerate()
        .fold(0, |acc, (i, v)| acc | (u64::from(v.is_odd()) << i)))
}

pub fn build_scene() -> Result<EmbeddingScene> {
    let l = parse_standard("E8(-1)+E8(-1)+U+U+U")?;
    let a0 = parse_standard("E8(-2)+U(2)")?;
    let a_rows: Vec<Vec<Rat>> = (0..A_RANK)
        .map(|i| ints(&diagonal(&unit(A_RANK, i), 1)))
        .collect();
    let mut b_rows: Vec<Vec<Rat>> = (0..A_RANK)
        .map(|i| ints(&diagonal(&unit(A_RANK, i), -1)))
        .collect();
    b_rows.push(ints(&unit(L_DIM, 20)));
    b_rows.push(ints(&unit(L_DIM, 21)));
    let a = Lattice::new(l.space().clone(), RatMatrix::from_rows(a_rows, L_DIM))?;
    let b = Lattice::new(l.space().clone(), RatMatrix::from_rows(b_rows, L_DIM))?;

    ensure(l.is_even() && l.is_unimodular(), || {
        "L is not even unimodular".into()
    })?;
    ensure(l.is_primitive(&a)?, || "A is not primitive in L".into())?;
    ensure(a.gram() == a0.gram(), || {
        "gram(A) differs from gram(E8(-2)+U(2))".into()
    })?;
    let doubled = parse_standard("E8(-1)+U")?
        .gram()
        .scale(&Rat::from_integer(Int::from(2)));
    ensure(a.gram() == doubled, || {
        "gram(A) is not twice gram(E8(-1)+U)".into()
    })?;
    ensure(l.orthogonal_complement_of(&a)?.lattice_equal(&b)?, || {
        "B is not the orthogonal complement of A".into()
    })?;
    ensure(b.is_even() && b.signature() == (2, 10, 0), || {
        "B is not even of signature (2,10)".into()
    })?;
    ensure(b.det().abs() == Rat::from_integer(Int::from(1024)), || {
        "|det B| is not 2^10".into()
    })?;

    let glue = GlueMap::new(&l, &a, &b)?;
    let disc_b = &glue.codomain;
    let disc_b_space = F2QuadSpace::from_disc_form(disc_b)?;
    let glue_subspace = greedy_singular_subspace(&disc_b_space, 5)?;
    let subgroup = GlueSubgroup {
        generators: glue_subspace
            .iter()
            .map(|&x| bits_element(x, disc_b.rank()))
            .collect(),
        order: 32,
        quadratic_vanishes: Some(true),
    };
    let c = overlattice(disc_b, &subgroup)?;
    ensure(c.is_even() && c.is_unimodular(), || {
        "C is not even unimodular".into()
    })?;
    ensure(
        classify_unimodular(&c)? == StandardForm::EvenII { p: 2, m: 10 },
        || "C is not II(2,10)".into(),
    )?;

    let c_space = F2QuadSpace::from_even_lattice(&c)?;
    let two = Rat::from_integer(Int::from(2));
    let b_dual = b.dual()?;
    let mut s5 = Vec::new();
    for row in b_dual.basis().iter_rows() {
        let x: Vec<Rat> = row.iter().map(|v| v * &two).collect();
        bits::insert(&mut s5, mod2_bits(&c, &x)?);
    }
    let p = a.basis().vstack(b.basis());
    let p_inv = p.inverse()?;
    Ok(EmbeddingScene {
        l,
        a,
        b,
        c,
        a0,
        glue,
        disc_b_space,
        glue_subspace,
        c_space,
        s5,
        p,
        p_inv,
    })
}

impl EmbeddingScene {
    /// `P⁻¹·diag(F, G)·P`: the map acting by `F` on `A` and `G` on `B`, both
    /// in the scene bases.
    pub fn block_map(&self, f: &IntMatrix, g: &IntMatrix) -> RatMatrix {
        let d = RatMatrix::block_diag(&[&f.to_rat(), &g.to_rat()]);
        self.p_inv.mul(&d).mul(&self.p)
    }

    /// Action of an isometry of `A` (basis matrix `f`) on `A*/A`.
    pub fn action_on_disc_a(&self, f: &IntMatrix) -> Result<BitMatrix> {
        let m = self.block_map(f, &IntMatrix::identity(B_RANK));
        Ok(action_bits(&self.glue.domain.induced_action(&m)?))
    }

    pub fn action_on_disc_b(&self, g: &IntMatrix) -> Result<BitMatrix> {
        let m = self.block_map(&IntMatrix::identity(A_RANK), g);
        Ok(action_bits(&self.glue.codomain.induced_action(&m)?))
    }

    /// The glue map as an F₂ matrix, row `i` the image of generator `i`.
    pub fn glue_bits(&self) -> BitMatrix {
        action_bits(&self.glue.images)
    }

    pub fn summary(&self) -> Result<SceneSummary> {
        Ok(SceneSummary {
            l: invariant_line(&self.l),
            a: invariant_line(&self.a),
            b: invariant_line(&self.b),
            c: classify_unimodular(&self.c)?.to_string(),
            glue_subspace_dim: self.glue_subspace.len(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SceneSummary {
    pub l: String,
    pub a: String,
    pub b: String,
    pub c: String,
    pub glue_subspace_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountsReport {
    pub two_b_dual_over_two_c: String,
    pub b_over_two_c: String,
    pub c_over_b: String,
    pub s5_dim: usize,
    pub s5_totally_singular: bool,
    pub b_image_dim: usize,
    pub b_image_is_s5_perp: bool,
    pub b_contains_two_c: bool,
    pub glue_elements: u64,
    pub glue_equal: u64,
    pub glue_negated: u64,
    pub glue_negates_bilinear: bool,
}

impl CountsReport {
    pub fn passed(&self) -> bool {
        self.two_b_dual_over_two_c == "32"
            && self.b_over_two_c == "128"
            && self.c_over_b == "32"
            && self.s5_dim == 5
            && self.s5_totally_singular
            && self.b_image_dim == 7
            && self.b_image_is_s5_perp
            && self.b_contains_two_c
            && self.glue_elements == 1024
            && self.glue_equal == 1024
            && self.glue_negated == 1024
            && self.glue_negates_bilinear
    }
}

fn scaled(l: &Lattice, k: i64) -> Result<Lattice> {
    let k = Rat::from_integer(Int::from(k));
    Lattice::new(l.space().clone(), l.basis().scale(&k))
}

pub fn verify_counts(scene: &EmbeddingScene) -> Result<CountsReport> {
    let two_b_dual = scaled(&scene.b.dual()?, 2)?;
    let two_c = scaled(&scene.c, 2)?;
    let n = scene.c_space.dim();
    let mut b_image = Vec::new();
    for row in scene.b.basis().iter_rows() {
        bits::insert(&mut b_image, mod2_bits(&scene.c, row)?);
    }
    let forms: Vec<u64> = scene
        .s5
        .iter()
        .map(|&s| scene.c_space.polar_of(s))
        .collect();
    let perp = bits::common_kernel(&forms, n);
    let q = scene.glue.quadratic_check(&Budget::default())?;
    Ok(CountsReport {
        two_b_dual_over_two_c: two_b_dual.index_of(&two_c)?.to_string(),
        b_over_two_c: scene.b.index_of(&two_c)?.to_string(),
        c_over_b: scene.c.index_of(&scene.b)?.to_string(),
        s5_dim: scene.s5.len(),
        s5_totally_singular: scene.c_space.is_totally_singular(&scene.s5),
        b_image_dim: b_image.len(),
        b_image_is_s5_perp: bits::rref(&b_image) == bits::rref(&perp),
        b_contains_two_c: scene.b.contains_lattice(&two_c)?,
        glue_elements: q.elements,
        glue_equal: q.equal,
        glue_negated: q.negated,
        glue_negates_bilinear: scene.glue.negates_bilinear(),
    })
}

fn digest_bits(h: &mut Sha256, m: &BitMatrix) {
    for &r in m.rows() {
        h.update(r.to_le_bytes());
    }
}

fn digest_int(h: &mut Sha256, m: &IntMatrix) {
    for row in m.iter_rows() {
        for x in row {
            h.update(x.to_string().as_bytes());
            h.update(b",");
        }
        h.update(b";");
    }
}

fn hex(h: Sha256) -> String {
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniquenessReport {
    pub samples: usize,
    pub successes: usize,
    pub failures: Vec<String>,
    pub space_dim: usize,
    pub witt_index: usize,
    pub witt_type: String,
    /// Whether the glued subspace has the maximal dimension allowed.
    pub s5_is_maximal: bool,
    pub seed: u64,
    pub checksum: String,
}

impl UniquenessReport {
    pub fn passed(&self) -> bool {
        self.successes == self.samples
    }
}

/// Random totally singular 5-spaces of `C/2C`, each carried onto `S₅` by a
/// constructed Witt extension.
pub fn verify_isotropic_uniqueness(
    scene: &EmbeddingScene,
    samples: usize,
    seed: u64,
) -> Result<UniquenessReport> {
    let space = &scene.c_space;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subspaces: Vec<Vec<u64>> = (0..samples)
        .map(|_| random_singular_subspace(space, 5, &mut rng))
        .collect::<Result<_>>()?;
    let target = bits::rref(&scene.s5);
    let outcomes: Vec<std::result::Result<BitMatrix, String>> = subspaces
        .par_iter()
        .map(|sub| {
            if !space.is_totally_singular(sub) {
                return Err("sampled subspace is not totally singular".into());
            }
            let g = witt_extend(space, sub, &scene.s5).map_err(|e| e.to_string())?;
            if !space.is_isometry(&g) {
                return Err("extension does not preserve q".into());
            }
            let image: Vec<u64> = sub.iter().map(|&x| g.apply(x)).collect();
            if bits::rref(&image) != target {
                return Err("extension does not carry the subspace onto S5".into());
            }
            Ok(g)
        })
        .collect();
    let mut h = Sha256::new();
    let mut failures = Vec::new();
    for (i, o) in outcomes.iter().enumerate() {
        match o {
            Ok(g) => digest_bits(&mut h, g),
            Err(e) => failures.push(format!("sample {i}: {e}")),
        }
    }
    let witt_index = space.witt_index()?;
    Ok(UniquenessReport {
        samples,
        successes: samples - failures.len(),
        failures,
        space_dim: space.dim(),
        witt_index,
        witt_type: format!("{:?}", space.witt_type()?),
        s5_is_maximal: witt_index == 5,
        seed,
        checksum: hex(h),
    })
}

/// A named isometry of `A₀ = E8(−2)⊕U(2)` as a matrix in its standard basis.
#[derive(Clone, Debug)]
pub struct NamedIsometry {
    pub name: String,
    pub matrix: IntMatrix,
}

/// Weyl reflections of the `E8(−2)` summand, the swap and negation of
/// `U(2)`, `−1`, and Eichler transvections `E(e, αᵢ/2)` for the two
/// isotropic basis vectors `e` of `U(2)`, each kept only when integral.
pub fn a0_generators(a0: &Lattice) -> Result<Vec<NamedIsometry>> {
    let space = a0.space();
    let mut out = Vec::new();
    let mut push = |name: String, m: RatMatrix| -> Result<()> {
        if let Some(x) = lattice_matrix(a0, &m) {
            ensure(preserves_form(space, &m), || {
                format!("{name} does not preserve the form")
            })?;
            out.push(NamedIsometry { name, matrix: x });
        }
        Ok(())
    };
    for i in 0..8 {
        push(
            format!("reflection alpha{}", i + 1),
            isometry::reflection(space, &ints(&unit(A_RANK, i)))?,
        )?;
    }
    push(
        "U(2) swap".into(),
        isometry::block_permutation(A_RANK, &[8, 9], 1, &[1, 0]),
    )?;
    let mut neg_u = RatMatrix::identity(A_RANK);
    neg_u.set(8, 8, -Rat::one());
    neg_u.set(9, 9, -Rat::one());
    push("U(2) negation".into(), neg_u)?;
    push("-1".into(), RatMatrix::identity(A_RANK).scale(&-Rat::one()))?;
    let half = Rat::new(Int::one(), Int::from(2));
    for (e_idx, e_name) in [(8, "e"), (9, "f")] {
        let e = ints(&unit(A_RANK, e_idx));
        for i in 0..8 {
            let a: Vec<Rat> = ints(&unit(A_RANK, i)).iter().map(|x| x * &half).collect();
            push(
                format!("Eichler({e_name}, alpha{}/2)", i + 1),
                isometry::eichler(space, &e, &a)?,
            )?;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurjectivityReport {
    pub generators: Vec<String>,
    pub generators_preserving_gram: usize,
    pub negative_identity_acts_trivially: bool,
    pub space_dim: usize,
    pub witt_type: String,
    pub achieved_order: u128,
    pub expected_order: u128,
    pub orbit_lengths: Vec<usize>,
    pub strong_generators: usize,
}

impl SurjectivityReport {
    pub fn passed(&self) -> bool {
        self.achieved_order == self.expected_order
            && self.generators_preserving_gram == self.generators.len()
            && self.negative_identity_acts_trivially
    }
}

/// The group generated by the induced actions of [`a0_generators`] on
/// `A₀*/A₀`, compared with the full orthogonal group of that F₂ space.
pub fn verify_disc_isometry_surjectivity() -> Result<SurjectivityReport> {
    let a0 = parse_standard("E8(-2)+U(2)")?;
    let gens = a0_generators(&a0)?;
    let disc = DiscriminantForm::new(&a0)?;
    let space = F2QuadSpace::from_disc_form(&disc)?;
    let gram = a0.int_gram()?;
    let mut preserving = 0;
    let mut neg_trivial = false;
    let mut chain = Chain::new(space.dim(), ())?;
    for g in &gens {
        if g.matrix.mul(&gram).mul(&g.matrix.transpose()) == gram {
            preserving += 1;
        }
        let action = action_bits(&disc.induced_action(&g.matrix.to_rat())?);
        ensure(space.is_isometry(&action), || {
            format!("{} induces a non-isometry", g.name)
        })?;
        if g.name == "-1" {
            neg_trivial = action.is_identity();
        }
        chain.add_generator(action, ())?;
    }
    let t = space.witt_type()?;
    Ok(SurjectivityReport {
        generators: gens.iter().map(|g| g.name.clone()).collect(),
        generators_preserving_gram: preserving,
        negative_identity_acts_trivially: neg_trivial,
        space_dim: space.dim(),
        witt_type: format!("{t:?}"),
        achieved_order: chain.order(),
        expected_order: orthogonal_group_order_formula(space.dim(), t),
        orbit_lengths: chain.orbit_lengths(),
        strong_generators: chain.strong_generator_count(),
    })
}

fn int_inverse(m: &IntMatrix) -> Result<IntMatrix> {
    m.to_rat()
        .inverse()?
        .to_int()
        .ok_or_else(|| LatticeError::Falsified("inverse is not integral".into()))
}

/// Stabilizer chain of the induced actions on `B*/B` of the `A₀`
/// generators transported to `B` (acting trivially on the last `U`), each
/// carrying its integral matrix in the basis of `B`.
pub fn b_side_chain(scene: &EmbeddingScene) -> Result<Chain<LiftedElement>> {
    let identity = LiftedElement {
        matrix: IntMatrix::identity(B_RANK),
        inverse: IntMatrix::identity(B_RANK),
    };
    let mut chain = Chain::new(scene.disc_b_space.dim(), identity)?;
    for g in a0_generators(&scene.a0)? {
        let m = IntMatrix::block_diag(&[&g.matrix, &IntMatrix::identity(2)]);
        let action = scene.action_on_disc_b(&m)?;
        let inverse = int_inverse(&m)?;
        chain.add_generator(action, LiftedElement { matrix: m, inverse })?;
    }
    Ok(chain)
}

/// Outcome of extending one isometry `f` of `A` to `L`.
#[derive(Clone, Debug)]
pub struct Extension {
    pub f: IntMatrix,
    pub g: IntMatrix,
    /// The extension as an ambient matrix of `L`.
    pub m: RatMatrix,
}

/// Finds `g` on `B` matching `f` through the glue map and checks that
/// `f ⊕ g` is an isometry of `L`.
pub fn extend_isometry(
    scene: &EmbeddingScene,
    chain: &mut Chain<LiftedElement>,
    f: &IntMatrix,
) -> Result<Extension> {
    let fa = scene.action_on_disc_a(f)?;
    let gamma = scene.glue_bits();
    let gamma_inv = gamma
        .inverse()
        .ok_or_else(|| LatticeError::Falsified("glue map is not invertible".into()))?;
    let target = gamma_inv.mul(&fa).mul(&gamma);
    let lift = chain
        .lift_of(&target)
        .ok_or_else(|| LatticeError::Falsified("required action on B*/B is not induced".into()))?;
    ensure(scene.action_on_disc_b(&lift.matrix)? == target, || {
        "lift induces the wrong action on B*/B".into()
    })?;
    let m = scene.block_map(f, &lift.matrix);
    ensure(m.is_integral(), || "f + g is not integral on L".into())?;
    ensure(is_isometry_of(&scene.l, &m), || {
        "f + g is not an isometry of L".into()
    })?;
    Ok(Extension {
        f: f.clone(),
        g: lift.matrix,
        m,
    })
}

/// Roots of `L` of norm ±2 whose reflections mix the summands.
pub fn l_roots() -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for i in 0..16 {
        out.push(unit(L_DIM, i));
        let k = 16 + 2 * (i % 3);
        let mut r = unit(L_DIM, i);
        r[k] = 1;
        out.push(r);
    }
    for j in 0..3 {
        let (e, f) = (16 + 2 * j, 17 + 2 * j);
        let mut r = unit(L_DIM, e);
        r[f] = -1;
        out.push(r);
        let mut r = unit(L_DIM, e);
        r[f] = 1;
        out.push(r);
        for k in 0..3 {
            if k != j {
                let mut r = unit(L_DIM, e);
                r[16 + 2 * k] = 1;
                r[f] = -1;
                out.push(r);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionReport {
    pub samples: usize,
    pub extended: usize,
    pub failures: Vec<String>,
    pub identity_extends_to_identity: bool,
    pub reflection_extends: bool,
    pub b_side_order: u128,
    pub equivalence_samples: usize,
    pub equivalence_ok: usize,
    pub word_length: usize,
    pub seed: u64,
    pub checksum: String,
}

impl ExtensionReport {
    pub fn passed(&self) -> bool {
        self.extended == self.samples
            && self.equivalence_ok == self.equivalence_samples
            && self.identity_extends_to_identity
            && self.reflection_extends
    }
}

pub const WORD_LENGTH: usize = 8;

/// Checks for `A' = h(A)`: an isometric primitive sublattice whose
/// complement is `h(B)`, carried back to `A` by `h⁻¹`, and on which the
/// conjugate `h⁻¹·m·h` of an extended isometry `m` acts.
fn equivalence_check(scene: &EmbeddingScene, h: &RatMatrix, m: &RatMatrix) -> Result<bool> {
    let l = &scene.l;
    if !is_isometry_of(l, h) {
        return Ok(false);
    }
    let a2 = Lattice::new(l.space().clone(), scene.a.basis().mul(h))?;
    let b2 = Lattice::new(l.space().clone(), scene.b.basis().mul(h))?;
    let h_inv = h.inverse()?;
    let back = Lattice::new(l.space().clone(), a2.basis().mul(&h_inv))?;
    let conj = h_inv.mul(m).mul(h);
    Ok(l.is_primitive(&a2)?
        && a2.gram() == scene.a.gram()
        && l.orthogonal_complement_of(&a2)?.lattice_equal(&b2)?
        && back.lattice_equal(&scene.a)?
        && is_isometry_of(l, &conj)
        && lattice_matrix(&a2, &conj).is_some())
}

/// Random words `f` in the generators of `A` extended to `L`, followed by
/// closed-loop checks for random isometries `h` of `L`.
pub fn verify_extension_and_equivalence(
    scene: &EmbeddingScene,
    samples: usize,
    seed: u64,
) -> Result<ExtensionReport> {
    let mut chain = b_side_chain(scene)?;
    let gens = a0_generators(&scene.a0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let id = extend_isometry(scene, &mut chain, &IntMatrix::identity(A_RANK))?;
    let identity_extends_to_identity = id.g == IntMatrix::identity(B_RANK);
    let reflection_extends = extend_isometry(scene, &mut chain, &gens[0].matrix).is_ok();

    let mut h = Sha256::new();
    let mut failures = Vec::new();
    let mut extensions = Vec::new();
    for i in 0..samples {
        let word: Vec<usize> = (0..WORD_LENGTH)
            .map(|_| rng.gen_range(0..gens.len()))
            .collect();
        let f = word.iter().fold(IntMatrix::identity(A_RANK), |acc, &k| {
            acc.mul(&gens[k].matrix)
        });
        match extend_isometry(scene, &mut chain, &f) {
            Ok(e) => {
                digest_int(&mut h, &e.g);
                extensions.push(e);
            }
            Err(e) => failures.push(format!("sample {i}: {e}")),
        }
    }

    let roots = l_roots();
    let reflections: Vec<RatMatrix> = roots
        .iter()
        .map(|r| isometry::reflection(scene.l.space(), &ints(r)))
        .collect::<Result<_>>()?;
    let words: Vec<Vec<usize>> = (0..samples)
        .map(|_| {
            (0..WORD_LENGTH)
                .map(|_| rng.gen_range(0..reflections.len()))
                .collect()
        })
        .collect();
    let identity = RatMatrix::identity(L_DIM);
    let oks: Vec<bool> = words
        .par_iter()
        .enumerate()
        .map(|(i, w)| {
            let hm = isometry::word_matrix(&reflections, w, L_DIM);
            let m = extensions
                .get(i % extensions.len().max(1))
                .map(|e| &e.m)
                .unwrap_or(&identity);
            equivalence_check(scene, &hm, m).unwrap_or(false)
        })
        .collect();

    Ok(ExtensionReport {
        samples,
        extended: extensions.len(),
        failures,
        identity_extends_to_identity,
        reflection_extends,
        b_side_order: chain.order(),
        equivalence_samples: samples,
        equivalence_ok: oks.iter().filter(|&&b| b).count(),
        word_length: WORD_LENGTH,
        seed,
        checksum: hex(h),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Theorem6Report {
    pub scene: SceneSummary,
    pub counts: CountsReport,
    pub uniqueness: UniquenessReport,
    pub surjectivity: SurjectivityReport,
    pub extension: ExtensionReport,
}

impl Theorem6Report {
    pub fn passed(&self) -> bool {
        self.counts.passed()
            && self.uniqueness.passed()
            && self.surjectivity.passed()
            && self.extension.passed()
    }
}

pub fn verify(witt_samples: usize, extension_samples: usize, seed: u64) -> Result<Theorem6Report> {
    let scene = build_scene()?;
    Ok(Theorem6Report {
        scene: scene.summary()?,
        counts: verify_counts(&scene)?,
        uniqueness: verify_isotropic_uniqueness(&scene, witt_samples, seed)?,
        surjectivity: verify_disc_isometry_surjectivity()?,
        extension: verify_extension_and_equivalence(&scene, extension_samples, seed)?,
    })
}
