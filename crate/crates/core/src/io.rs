//! Matrix documents.
//!
//! ```json
//! {"rows": 2, "cols": 2, "backend": "exact",
//!  "data": [[["1/2", "0"], ["1", "-1"]], [["0", "0"], ["3", "0"]]]}
//! ```
//!
//! `data` is a list of rows; each entry is a `[re, im]` pair. Exact entries
//! are rational strings, float entries JSON numbers printed with the
//! shortest representation that reads back to the same `f64`. On input an
//! entry may also be a bare number or a string literal such as `"1-2i"`.

use std::any::Any;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Backend, GaussianRational, Scalar};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    #[serde(default)]
    pub backend: Option<String>,
    pub data: Vec<Vec<Value>>,
}

fn part_to_string(v: &Value) -> Result<String> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.trim().to_string()),
        other => Err(Error::Parse(format!("expected a number or string, got {other}"))),
    }
}

fn parse_entry<T: Scalar>(v: &Value) -> Result<T> {
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            let re = part_to_string(&pair[0])?;
            let im = part_to_string(&pair[1])?;
            let im = if im.starts_with('-') { im } else { format!("+{im}") };
            T::parse(&format!("{re}{im}i"))
        }
        Value::Array(other) => Err(Error::Parse(format!("entry pair must have 2 parts, got {}", other.len()))),
        Value::Null => Err(Error::NonFinite),
        other => T::parse(&part_to_string(other)?),
    }
}

fn entry_json<T: Scalar>(x: &T) -> Result<Value> {
    if let Some(q) = (x as &dyn Any).downcast_ref::<GaussianRational>() {
        let (re, im) = q.to_pair_strings();
        return Ok(json!([re, im]));
    }
    let z = x.to_c64();
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(json!([z.re, z.im]))
}

impl MatrixDoc {
    pub fn from_matrix<T: Scalar>(a: &Matrix<T>) -> Result<Self> {
        let data = (0..a.rows())
            .map(|i| a.row(i).iter().map(entry_json).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixDoc {
            rows: a.rows(),
            cols: a.cols(),
            backend: Some(T::BACKEND.to_string()),
            data,
        })
    }

    pub fn to_matrix<T: Scalar>(&self) -> Result<Matrix<T>> {
        if self.data.len() != self.rows {
            return Err(Error::Parse(format!("declared {} rows, found {}", self.rows, self.data.len())));
        }
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for (i, row) in self.data.iter().enumerate() {
            if row.len() != self.cols {
                return Err(Error::Parse(format!("row {i} has {} entries, expected {}", row.len(), self.cols)));
            }
            for v in row {
                let x: T = parse_entry(v)?;
                if !x.to_c64().re.is_finite() || !x.to_c64().im.is_finite() {
                    return Err(Error::NonFinite);
                }
                entries.push(x);
            }
        }
        Matrix::new(self.rows, self.cols, entries)
    }

    /// The backend named in the document, if any.
    pub fn declared_backend(&self) -> Result<Option<Backend>> {
        self.backend.as_deref().map(str::parse).transpose()
    }
}

pub fn matrix_to_value<T: Scalar>(a: &Matrix<T>) -> Result<Value> {
    Ok(serde_json::to_value(MatrixDoc::from_matrix(a)?)?)
}

pub fn matrix_from_value<T: Scalar>(v: &Value) -> Result<Matrix<T>> {
    let doc: MatrixDoc = serde_json::from_value(v.clone())?;
    doc.to_matrix()
}

pub fn matrix_to_string<T: Scalar>(a: &Matrix<T>) -> Result<String> {
    Ok(serde_json::to_string(&MatrixDoc::from_matrix(a)?)?)
}

pub fn matrix_from_str<T: Scalar>(s: &str) -> Result<Matrix<T>> {
    let doc: MatrixDoc = serde_json::from_str(s)?;
    doc.to_matrix()
}

pub fn read_matrix<T: Scalar>(path: &Path) -> Result<Matrix<T>> {
    matrix_from_str(&fs::read_to_string(path)?)
}

pub fn write_matrix<T: Scalar>(path: &Path, a: &Matrix<T>) -> Result<()> {
    let mut s = serde_json::to_string_pretty(&MatrixDoc::from_matrix(a)?)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

/// Read a JSON document holding several named matrices, e.g.
/// `{"x1": {...}, "x2": {...}}`.
pub fn read_named<T: Scalar>(path: &Path, names: &[&str]) -> Result<Vec<Matrix<T>>> {
    let v: Value = serde_json::from_str(&fs::read_to_string(path)?)?;
    names
        .iter()
        .map(|name| {
            let m = v.get(name).ok_or_else(|| Error::Parse(format!("missing field `{name}` in {}", path.display())))?;
            matrix_from_value(m)
        })
        .collect()
}

/// Shortest round-trip text of a float; used for reports.
pub fn float_text(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| "null".into())
}
