//! Lattice file format.
//!
//! A JSON document with `ambient_dim`, `form` (rows of rational strings),
//! `scale` and an optional `basis` (identity when absent). Rationals are
//! written as `"a/b"` in lowest terms, or `"a"` when integral.

use std::path::Path;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{Lattice, QSpace};
use crate::error::{LatticeError, Result};
use crate::exactlin::{Int, Rat, RatMatrix};

pub fn format_rational(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || LatticeError::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = Int::from_str(n).map_err(|_| bad())?;
    let d = Int::from_str(d).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeFile {
    pub ambient_dim: usize,
    pub form: Vec<Vec<String>>,
    pub scale: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<String>>>,
}

fn matrix_strings(m: &RatMatrix) -> Vec<Vec<String>> {
    m.iter_rows()
        .map(|r| r.iter().map(format_rational).collect())
        .collect()
}

fn parse_matrix(rows: &[Vec<String>], cols: usize, what: &str) -> Result<RatMatrix> {
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        if r.len() != cols {
            return Err(LatticeError::Parse(format!(
                "{what}: row of length {} where {cols} expected",
                r.len()
            )));
        }
        out.push(
            r.iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(RatMatrix::from_rows(out, cols))
}

impl LatticeFile {
    pub fn from_lattice(l: &Lattice) -> Self {
        LatticeFile {
            ambient_dim: l.ambient_dim(),
            form: matrix_strings(l.space().form()),
            scale: format_rational(l.space().scale()),
            basis: Some(matrix_strings(l.basis())),
        }
    }

    pub fn to_lattice(&self) -> Result<Lattice> {
        let n = self.ambient_dim;
        if self.form.len() != n {
            return Err(LatticeError::Parse(format!(
                "form has {} rows, ambient_dim is {n}",
                self.form.len()
            )));
        }
        let form = parse_matrix(&self.form, n, "form")?;
        let scale = parse_rational(&self.scale)?;
        let space = QSpace::new(form, scale)?;
        let basis = match &self.basis {
            Some(b) => parse_matrix(b, n, "basis")?,
            None => RatMatrix::identity(n),
        };
        Lattice::new(space, basis)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("lattice file serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| LatticeError::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Lattice> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)?.to_lattice()
    }

    pub fn write(l: &Lattice, path: &Path) -> Result<()> {
        std::fs::write(path, Self::from_lattice(l).to_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::frac;
    use crate::lattice::parse_standard;

    #[test]
    fn rational_strings() {
        assert_eq!(format_rational(&frac(-6, 4)), "-3/2");
        assert_eq!(format_rational(&frac(4, 2)), "2");
        assert_eq!(parse_rational(" -3/2 ").unwrap(), frac(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), frac(7, 1));
        assert_eq!(parse_rational("2/4").unwrap(), frac(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        for name in ["U(2)", "E8(-2)+U(2)+U", "I(2,10)"] {
            let l = parse_standard(name)
                .unwrap()
                .dual()
                .unwrap()
                .rescale(&frac(3, 7))
                .unwrap();
            let f = LatticeFile::from_lattice(&l);
            let text = f.to_json();
            let back = LatticeFile::from_json(&text).unwrap();
            assert_eq!(back, f);
            let l2 = back.to_lattice().unwrap();
            assert_eq!(l2.space(), l.space());
            assert_eq!(l2.basis(), l.basis());
            assert_eq!(LatticeFile::from_lattice(&l2).to_json(), text);
        }
    }

    #[test]
    fn basis_defaults_to_identity() {
        let text = r#"{"ambient_dim": 2, "form": [["0","1"],["1","0"]], "scale": "2"}"#;
        let l = LatticeFile::from_json(text).unwrap().to_lattice().unwrap();
        assert_eq!(l.gram(), RatMatrix::from_i64(2, 2, &[0, 2, 2, 0]));
    }

    #[test]
    fn malformed_files_rejected() {
        assert!(LatticeFile::from_json("{").is_err());
        let ragged = r#"{"ambient_dim": 2, "form": [["1","0"],["0"]], "scale": "1"}"#;
        assert!(LatticeFile::from_json(ragged)
            .unwrap()
            .to_lattice()
            .is_err());
        let singular = r#"{"ambient_dim": 1, "form": [["0"]], "scale": "1"}"#;
        assert!(LatticeFile::from_json(singular)
            .unwrap()
            .to_lattice()
            .is_err());
    }
}
