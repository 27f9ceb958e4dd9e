//! Verification reports: the halving pipeline on its four model inputs, the
//! vector correspondence for `K = E8(−2)⊕U(2)⊕U`, and stable rendering of
//! any report as text or as JSON with sorted keys.

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;
use crate::exactlin::{Int, Rat};
use crate::f2quad::bits::BitMatrix;
use crate::f2quad::{exhaustive_orthogonal_order, group_order, orthogonal_generators, F2QuadSpace};
use crate::halving::{hat, unhat, vector_correspondence, CorrespondenceReport, HatPair};
use crate::lattice::{classify_unimodular, parse_standard};
use crate::theorem6::{verify_disc_isometry_surjectivity, SurjectivityReport};

/// Inputs of the halving pipeline with the expected class of `Â`.
pub const LEMMA1_CASES: [(&str, &str); 4] = [
    ("E8(-2)+U(2)+U", "I(2,10)"),
    ("E8(-2)+U", "I(1,9)"),
    ("U(2)+U", "I(2,2)"),
    ("II(1,9)(2)+II(1,1)", "I(2,10)"),
];

pub const K_MODEL: &str = "E8(-2)+U(2)+U";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma1Case {
    pub input: String,
    pub intermediate_gram_is_2g_inverse: bool,
    pub intermediate_even: bool,
    pub odd_overlattices: usize,
    pub even_overlattices: usize,
    pub classification: String,
    pub expected: String,
    pub roundtrip: bool,
}

impl Lemma1Case {
    pub fn passed(&self) -> bool {
        self.intermediate_gram_is_2g_inverse
            && self.intermediate_even
            && self.odd_overlattices == 1
            && self.even_overlattices == 2
            && self.classification == self.expected
            && self.roundtrip
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma1Report {
    pub cases: Vec<Lemma1Case>,
}

impl Lemma1Report {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(Lemma1Case::passed)
    }
}

pub fn lemma1_case(input: &str, expected: &str) -> Result<Lemma1Case> {
    let a = parse_standard(input)?;
    let p = hat(&a)?;
    let predicted = a.gram().inverse()?.scale(&Rat::from_integer(Int::from(2)));
    let back = unhat(&p.a_hat)?;
    Ok(Lemma1Case {
        input: input.to_string(),
        intermediate_gram_is_2g_inverse: p.intermediate.gram() == predicted,
        intermediate_even: p.intermediate.is_even(),
        odd_overlattices: p.odd_overlattices,
        even_overlattices: p.even_overlattices,
        classification: classify_unimodular(&p.a_hat)?.to_string(),
        expected: expected.to_string(),
        roundtrip: back.space() == a.space() && back.lattice_equal(&a)? && p.verify().is_ok(),
    })
}

pub fn lemma1() -> Result<Lemma1Report> {
    let cases = LEMMA1_CASES
        .iter()
        .map(|(i, e)| lemma1_case(i, e))
        .collect::<Result<_>>()?;
    Ok(Lemma1Report { cases })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrespondenceSuite {
    pub lattice: String,
    pub height: u32,
    pub roots: CorrespondenceReport,
    pub norm_minus_four: CorrespondenceReport,
}

impl CorrespondenceSuite {
    pub fn passed(&self) -> bool {
        self.roots.holds()
            && self.norm_minus_four.holds()
            && self.roots.matched > 0
            && self.norm_minus_four.matched > 0
    }
}

pub fn k_pair() -> Result<HatPair> {
    hat(&parse_standard(K_MODEL)?)
}

/// Norm `−2 ↔ −1` and `−4 ↔ −2` matching on `K` and `K̂` at the given
/// height.
pub fn correspondence_suite(height: u32) -> Result<CorrespondenceSuite> {
    let p = k_pair()?;
    Ok(CorrespondenceSuite {
        lattice: K_MODEL.to_string(),
        height,
        roots: vector_correspondence(&p, -2, -1, height)?,
        norm_minus_four: vector_correspondence(&p, -4, -2, height)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmallOrthogonalCase {
    pub name: String,
    pub dim: usize,
    pub witt_type: String,
    pub generated_order: u128,
    pub exhaustive_order: u128,
    pub formula_order: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct F2EngineReport {
    pub small: Vec<SmallOrthogonalCase>,
    pub discriminant_of_a: SurjectivityReport,
}

impl F2EngineReport {
    pub fn passed(&self) -> bool {
        self.small.iter().all(|c| {
            c.generated_order == c.exhaustive_order && c.exhaustive_order == c.formula_order
        }) && self.discriminant_of_a.passed()
    }
}

/// Orthogonal sums of hyperbolic (`h`) and anisotropic (`a`) planes.
fn planes(kinds: &str) -> Result<F2QuadSpace> {
    let n = 2 * kinds.len();
    let mut diag = vec![0u8; n];
    let mut polar = BitMatrix::zeros(n, n);
    for (i, k) in kinds.chars().enumerate() {
        if k == 'a' {
            diag[2 * i] = 1;
            diag[2 * i + 1] = 1;
        }
        polar.set(2 * i, 2 * i + 1, 1);
        polar.set(2 * i + 1, 2 * i, 1);
    }
    F2QuadSpace::from_values(&diag, &polar)
}

/// Schreier–Sims orders of the generated orthogonal groups against
/// exhaustive counts in dimension at most 4, then the induced image for
/// `E8(−2)⊕U(2)`.
pub fn f2_engine() -> Result<F2EngineReport> {
    let mut small = Vec::new();
    for kinds in ["h", "a", "hh", "ha"] {
        let s = planes(kinds)?;
        let t = s.witt_type()?;
        small.push(SmallOrthogonalCase {
            name: kinds.to_string(),
            dim: s.dim(),
            witt_type: format!("{t:?}"),
            generated_order: group_order(s.dim(), &orthogonal_generators(&s)?)?,
            exhaustive_order: exhaustive_orthogonal_order(&s)?,
            formula_order: s.orthogonal_group_order()?,
        });
    }
    Ok(F2EngineReport {
        small,
        discriminant_of_a: verify_disc_isometry_surjectivity()?,
    })
}

/// A report as a JSON value; `serde_json` maps keep keys sorted.
pub fn to_value<T: Serialize>(r: &T) -> Value {
    serde_json::to_value(r).expect("reports serialize")
}

pub fn to_json<T: Serialize>(r: &T) -> String {
    serde_json::to_string_pretty(&to_value(r)).expect("values serialize")
}

/// Indented `key: value` lines; arrays of scalars stay on one line.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    write_text(v, 0, &mut out);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(xs) if xs.iter().all(|x| !x.is_array() && !x.is_object()) => Some(format!(
            "[{}]",
            xs.iter()
                .map(|x| scalar(x).unwrap_or_default())
                .collect::<Vec<_>>()
                .join(", ")
        )),
        _ => None,
    }
}

fn write_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write_text(x, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}[{i}]\n"));
                        write_text(x, indent + 1, out);
                    }
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", scalar(v).unwrap_or_default())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma1_small_case() {
        let c = lemma1_case("U(2)+U", "I(2,2)").unwrap();
        assert!(c.passed(), "{c:?}");
    }

    #[test]
    fn text_rendering_is_sorted_and_indented() {
        let v = serde_json::json!({"b": 1, "a": {"y": [1, 2], "x": true}});
        assert_eq!(to_text(&v), "a:\n  x: true\n  y: [1, 2]\nb: 1\n");
        assert!(to_json(&v).find("\"a\"").unwrap() < to_json(&v).find("\"b\"").unwrap());
    }
}
