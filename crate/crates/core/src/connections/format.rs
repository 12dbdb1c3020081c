//! JSON connection files.
//!
//! ```json
//! {
//!   "betti": [[0, 1], [2, 1]],
//!   "convention": "q-ddq",
//!   "degrees": [0, 2],
//!   "dim_c": 1,
//!   "matrices": [{"entries": ["0", "0", "2", "0"], "power": 0}, ...],
//!   "name": "cp1",
//!   "rank": 2
//! }
//! ```
//!
//! Under `"ddq"` the matrices are those of `∂_q` and may have power −1; they are
//! multiplied by `q` on ingestion. Serialization always writes `"q-ddq"` with
//! keys in alphabetical order and fractions in lowest terms.

use super::{Connection, ConnectionDecomposition};
use crate::error::{Error, Result};
use crate::matrix::RationalMatrix;
use crate::poly::{GammaPolynomial, Monomial};
use crate::ring::{format_rational, parse_rational};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    betti: Vec<(u32, u32)>,
    convention: Convention,
    degrees: Vec<u32>,
    dim_c: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma_decomposition: Option<Vec<DecompositionEntry>>,
    matrices: Vec<MatrixEntry>,
    name: String,
    rank: usize,
}

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq)]
enum Convention {
    #[serde(rename = "q-ddq")]
    QDdq,
    #[serde(rename = "ddq")]
    Ddq,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixEntry {
    entries: Vec<String>,
    power: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecompositionEntry {
    matrix: Vec<String>,
    poly: Vec<PolyTerm>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyTerm {
    coeff: String,
    exponents: BTreeMap<u32, u32>,
}

/// Line and column (1-based) of the first occurrence of `needle` in `text`.
fn locate(text: &str, needle: &str) -> (usize, usize) {
    match text.find(needle) {
        Some(offset) => {
            let before = &text[..offset];
            let line = before.matches('\n').count() + 1;
            let column = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            (line, column)
        }
        None => (0, 0),
    }
}

struct Reader<'a> {
    text: &'a str,
}

impl Reader<'_> {
    fn error(&self, needle: &str, message: String) -> Error {
        let (line, column) = locate(self.text, needle);
        Error::Parse { line, column, message }
    }

    fn rational(&self, s: &str) -> Result<BigRational> {
        parse_rational(s).ok_or_else(|| {
            self.error(&format!("\"{s}\""), format!("`{s}` is not a rational number"))
        })
    }

    fn matrix(&self, entries: &[String], rank: usize, what: &str) -> Result<RationalMatrix> {
        if entries.len() != rank * rank {
            return Err(Error::DimensionMismatch(format!(
                "{what} has {} entries, expected {}",
                entries.len(),
                rank * rank
            )));
        }
        let data = entries.iter().map(|s| self.rational(s)).collect::<Result<Vec<_>>>()?;
        Ok(RationalMatrix::from_vec(rank, rank, data))
    }
}

pub fn parse_connection(text: &str) -> Result<Connection> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let reader = Reader { text };
    let rank = doc.rank;
    if rank == 0 {
        return Err(Error::DimensionMismatch("rank must be positive".to_string()));
    }
    let shift = match doc.convention {
        Convention::QDdq => 0,
        Convention::Ddq => 1,
    };
    let mut coeffs: BTreeMap<usize, RationalMatrix> = BTreeMap::new();
    for entry in &doc.matrices {
        let power = entry.power + shift;
        if power < 0 {
            return Err(reader.error(
                "\"power\"",
                format!("power {} is not allowed under this convention", entry.power),
            ));
        }
        let m = reader.matrix(&entry.entries, rank, &format!("matrix of power {}", entry.power))?;
        if coeffs.insert(power as usize, m).is_some() {
            return Err(reader.error(
                "\"power\"",
                format!("power {} appears twice", entry.power),
            ));
        }
    }
    let top = coeffs.keys().next_back().copied().unwrap_or(0);
    let dense: Vec<RationalMatrix> = (0..=top)
        .map(|m| coeffs.remove(&m).unwrap_or_else(|| RationalMatrix::zero(rank, rank)))
        .collect();
    let decomposition = match &doc.gamma_decomposition {
        None => None,
        Some(entries) => {
            let mut terms = Vec::with_capacity(entries.len());
            for (idx, entry) in entries.iter().enumerate() {
                let mut poly = GammaPolynomial::zero();
                for term in &entry.poly {
                    if let Some(&even) = term.exponents.keys().find(|&&k| k % 2 == 0) {
                        return Err(reader.error(
                            "\"exponents\"",
                            format!("gamma_decomposition[{idx}] uses G{even}; only odd orders are independent"),
                        ));
                    }
                    let mono: Monomial = term
                        .exponents
                        .iter()
                        .filter(|(_, &e)| e > 0)
                        .map(|(&k, &e)| (k, e))
                        .collect();
                    poly.add_term(mono, reader.rational(&term.coeff)?);
                }
                let matrix = reader.matrix(&entry.matrix, rank, &format!("gamma_decomposition[{idx}]"))?;
                terms.push((poly, matrix));
            }
            Some(ConnectionDecomposition::new(terms))
        }
    };
    Connection::new(doc.name, dense, doc.degrees, doc.dim_c, doc.betti, decomposition)
}

fn flatten(m: &RationalMatrix) -> Vec<String> {
    m.entries().iter().map(format_rational).collect()
}

/// Canonical JSON: every nonzero coefficient plus the constant term.
pub fn serialize_connection(conn: &Connection) -> String {
    let matrices = conn
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(m, a)| *m == 0 || !a.is_exact_zero())
        .map(|(m, a)| MatrixEntry { entries: flatten(a), power: m as i64 })
        .collect();
    let gamma_decomposition = conn.decomposition().map(|dec| {
        dec.terms()
            .iter()
            .map(|(poly, matrix)| DecompositionEntry {
                matrix: flatten(matrix),
                poly: poly
                    .terms()
                    .iter()
                    .map(|(mono, c)| PolyTerm { coeff: format_rational(c), exponents: mono.clone() })
                    .collect(),
            })
            .collect()
    });
    let doc = Document {
        betti: conn.betti().to_vec(),
        convention: Convention::QDdq,
        degrees: conn.degrees().to_vec(),
        dim_c: conn.dim_c(),
        gamma_decomposition,
        matrices,
        name: conn.name().to_string(),
        rank: conn.rank(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("connection documents serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connections::{builtin, builtin_names};

    #[test]
    fn round_trips_every_builtin() {
        for name in builtin_names() {
            let conn = builtin(&name).unwrap();
            let text = serialize_connection(&conn);
            let back = parse_connection(&text).unwrap();
            assert_eq!(back, conn, "{name}");
            assert_eq!(serialize_connection(&back), text);
        }
    }

    #[test]
    fn keys_are_sorted() {
        let text = serialize_connection(&builtin("cp1").unwrap());
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<&String> = value.as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        let order: Vec<usize> = ["\"betti\"", "\"convention\"", "\"degrees\"", "\"dim_c\"", "\"gamma_decomposition\"", "\"matrices\"", "\"name\"", "\"rank\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ddq_convention_multiplies_by_q() {
        let text = r#"{
  "betti": [[0, 1], [2, 1], [4, 1]],
  "convention": "ddq",
  "degrees": [0, 2, 4],
  "dim_c": 2,
  "matrices": [
    {"entries": ["0", "0", "0", "1", "0", "0", "0", "3", "0"], "power": -1},
    {"entries": ["0", "0", "0", "0", "9", "0", "0", "0", "0"], "power": 0},
    {"entries": ["0", "108", "0", "0", "0", "36", "0", "0", "0"], "power": 1},
    {"entries": ["0", "0", "252", "0", "0", "0", "0", "0", "0"], "power": 2}
  ],
  "name": "cubic-surface",
  "rank": 3
}"#;
        let conn = parse_connection(text).unwrap();
        assert_eq!(conn.coeffs(), builtin("cubic-surface").unwrap().coeffs());
    }

    #[test]
    fn diagnostics() {
        let base = |matrices: &str| {
            format!(
                "{{\"betti\": [[0, 1], [2, 1]], \"convention\": \"q-ddq\", \"degrees\": [0, 2], \"dim_c\": 1,\n\"matrices\": {matrices}, \"name\": \"x\", \"rank\": 2}}"
            )
        };
        let id = base(r#"[{"entries": ["1", "0", "0", "1"], "power": 0}]"#);
        assert!(matches!(parse_connection(&id), Err(Error::NotNilpotent(_))));
        let bad = base(r#"[{"entries": ["0", "0", "2/x", "0"], "power": 0}]"#);
        match parse_connection(&bad) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 37)),
            other => panic!("{other:?}"),
        }
        let short = base(r#"[{"entries": ["0", "0", "2"], "power": 0}]"#);
        assert!(matches!(parse_connection(&short), Err(Error::DimensionMismatch(_))));
        let neg = base(r#"[{"entries": ["0", "0", "2", "0"], "power": -1}]"#);
        assert!(matches!(parse_connection(&neg), Err(Error::Parse { .. })));
        match parse_connection("{\"betti\": [,]}") {
            Err(Error::Parse { line: 1, column, .. }) => assert!(column > 0),
            other => panic!("{other:?}"),
        }
    }
}
