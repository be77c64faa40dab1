//! JSON, CSV and plain-text encodings.
//!
//! Polynomials are arrays of decimal coefficient strings in ascending degree,
//! rational functions are `{"num", "den"}`, rationals are `"a/b"` strings.

use std::fmt::Display;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matched::MatchedTree;
use crate::matrix::{Matrix, QMat, Scalar, Vector};
use crate::poly::Poly;
use crate::ratfun::{format_rational, RatFun};
use crate::tree::Tree;

/// Scalars with a JSON encoding.
pub trait ToJson {
    fn to_json(&self) -> Value;
}

impl ToJson for Poly {
    fn to_json(&self) -> Value {
        if self.is_zero() {
            return json!(["0"]);
        }
        Value::Array(
            self.coeffs()
                .iter()
                .map(|c| Value::String(c.to_string()))
                .collect(),
        )
    }
}

impl ToJson for RatFun {
    fn to_json(&self) -> Value {
        json!({ "num": self.num().to_json(), "den": self.den().to_json() })
    }
}

impl ToJson for BigRational {
    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }
}

impl ToJson for BigInt {
    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
}

pub fn poly_from_json(v: &Value) -> Result<Poly> {
    let bad = || Error::Parse(format!("not a polynomial: {v}"));
    let coeffs = v
        .as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|c| {
            c.as_str()
                .and_then(|s| s.parse::<BigInt>().ok())
                .ok_or_else(bad)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::new(coeffs))
}

pub fn ratfun_from_json(v: &Value) -> Result<RatFun> {
    let part = |k: &str| {
        v.get(k)
            .ok_or_else(|| Error::Parse(format!("rational function without {k:?}: {v}")))
            .and_then(poly_from_json)
    };
    RatFun::new(part("num")?, part("den")?)
}

pub fn matrix_to_json<T: Scalar + ToJson>(m: &Matrix<T>) -> Value {
    let entries: Vec<Value> = m
        .to_rows()
        .iter()
        .map(|row| Value::Array(row.iter().map(ToJson::to_json).collect()))
        .collect();
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "row_kind": m.row_kind().to_string(),
        "col_kind": m.col_kind().to_string(),
        "entries": entries,
    })
}

pub fn vector_to_json<T: Scalar + ToJson>(v: &Vector<T>) -> Value {
    json!({
        "kind": v.kind().to_string(),
        "entries": v.entries().iter().map(ToJson::to_json).collect::<Vec<_>>(),
    })
}

/// Comma-separated rows of `a/b` values.
pub fn matrix_to_csv(m: &QMat) -> String {
    let mut out = String::new();
    for row in m.to_rows() {
        let cells: Vec<String> = row.iter().map(format_rational).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn vector_to_csv(v: &Vector<BigRational>) -> String {
    let cells: Vec<String> = v.entries().iter().map(format_rational).collect();
    format!("{}\n", cells.join(","))
}

/// Aligned columns of `Display` entries.
pub fn matrix_to_pretty<T: Scalar + Display>(m: &Matrix<T>) -> String {
    let cells: Vec<Vec<String>> = m
        .to_rows()
        .iter()
        .map(|row| row.iter().map(ToString::to_string).collect())
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(0);
    let mut out = format!(
        "{}x{} ({} x {})\n",
        m.rows(),
        m.cols(),
        m.row_kind(),
        m.col_kind()
    );
    for row in cells {
        let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(&format!("[ {} ]\n", padded.join("  ")));
    }
    out
}

pub fn vector_to_pretty<T: Scalar + Display>(v: &Vector<T>) -> String {
    let cells: Vec<String> = v.entries().iter().map(ToString::to_string).collect();
    format!("{} ({})\n[ {} ]\n", v.len(), v.kind(), cells.join(", "))
}

#[derive(Debug, Serialize, Deserialize)]
struct LabelsDoc {
    #[serde(rename = "L")]
    left: Vec<usize>,
    #[serde(rename = "R")]
    right: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TreeDoc {
    edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matching: Option<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<LabelsDoc>,
}

fn parse_doc(s: &str) -> Result<TreeDoc> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

fn doc_tree(doc: &TreeDoc) -> Result<Tree> {
    if doc.edges.is_empty() {
        return Ok(Tree::single_vertex());
    }
    Tree::from_edges(&doc.edges)
}

/// Read `{"edges": [[u, v], ...]}`; matching and labels are ignored.
pub fn read_tree(s: &str) -> Result<Tree> {
    doc_tree(&parse_doc(s)?)
}

/// Read a matched tree: explicit labels if present, else the standard
/// labeling. A given `matching` must agree with the result.
pub fn read_matched(s: &str) -> Result<MatchedTree> {
    let doc = parse_doc(s)?;
    let tree = doc_tree(&doc)?;
    let mt = match &doc.labels {
        Some(labels) => MatchedTree::with_labels(tree, labels.left.clone(), labels.right.clone())?,
        None => MatchedTree::new(tree)?,
    };
    if let Some(given) = &doc.matching {
        let mut a: Vec<_> = given.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        let mut b: Vec<_> = mt
            .matching()
            .iter()
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(Error::InvalidLabels(
                "matching is not the perfect matching of the labeled tree".into(),
            ));
        }
    }
    Ok(mt)
}

pub fn tree_to_json(t: &Tree) -> Value {
    json!({ "edges": t.edges() })
}

pub fn matched_to_json(mt: &MatchedTree) -> Value {
    let doc = TreeDoc {
        edges: mt.tree().edges().to_vec(),
        matching: Some(mt.matching()),
        labels: Some(LabelsDoc {
            left: mt.left().to_vec(),
            right: mt.right().to_vec(),
        }),
    };
    serde_json::to_value(doc).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::IndexKind;
    use crate::qmatrices::build_ql;

    #[test]
    fn poly_round_trip() {
        let p = Poly::from_i64s(&[1, 0, 1]);
        assert_eq!(p.to_json(), json!(["1", "0", "1"]));
        assert_eq!(poly_from_json(&p.to_json()).unwrap(), p);
        assert_eq!(Poly::zero().to_json(), json!(["0"]));
        assert_eq!(poly_from_json(&json!(["0"])).unwrap(), Poly::zero());
        assert!(poly_from_json(&json!([1])).is_err());
    }

    #[test]
    fn ratfun_round_trip() {
        let r = RatFun::new(Poly::one(), Poly::q()).unwrap();
        assert_eq!(r.to_json(), json!({"num": ["1"], "den": ["0", "1"]}));
        assert_eq!(ratfun_from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn ql_of_p4_encoding() {
        let mt = read_matched(r#"{"edges": [[0,1],[0,2],[2,3]]}"#).unwrap();
        let v = matrix_to_json(&build_ql(&mt));
        assert_eq!(
            v["entries"],
            json!([[["1"], ["-1"]], [["0", "0", "-1"], ["1"]]])
        );
        assert_eq!(v["row_kind"], json!("R"));
        assert_eq!(v["col_kind"], json!("L"));
    }

    #[test]
    fn tree_documents() {
        let mt = read_matched(r#"{"edges": [[2,3],[0,1],[1,2]]}"#).unwrap();
        let back = read_matched(&matched_to_json(&mt).to_string()).unwrap();
        assert_eq!(back, mt);
        assert_eq!(
            tree_to_json(mt.tree()),
            json!({"edges": [[0,1],[1,2],[2,3]]})
        );
        let star = r#"{"edges": [[0,1],[0,2],[0,3]]}"#;
        assert_eq!(read_matched(star), Err(Error::NotNonsingular));
        assert!(read_tree(star).is_ok());
        assert!(read_matched(r#"{"edges": [[0,1],[1,2],[2,3]], "matching": [[1,2]]}"#).is_err());
        assert!(read_matched("[").is_err());
    }

    #[test]
    fn csv_output() {
        let m = QMat::from_fn(1, 2, IndexKind::L, IndexKind::R, |_, j| {
            BigRational::new(BigInt::from(1), BigInt::from(j as i64 + 1))
        });
        assert_eq!(matrix_to_csv(&m), "1,1/2\n");
    }
}
