//! JSON wire formats.
//!
//! Exact scalars are strings `"num/den"` (`"num"` when the denominator is 1),
//! floats are numbers. Matrices are arrays of rows.

use serde_json::{json, Number, Value};
use thiserror::Error;

use crate::decomp::JennrichOutput;
use crate::linalg::Matrix;
use crate::minrank::{Certificate, MinrankResult};
use crate::scalar::{parse_rational, Field, Mode, Rational};
use crate::tensor::{MatrixVectorDecomposition, MatrixVectorTerm, RankOneDecomposition, Tensor3, TensorError};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Syntax(#[from] serde_json::Error),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

fn format_err(msg: impl Into<String>) -> JsonError {
    JsonError::Format(msg.into())
}

pub fn scalar_to_value<F: Field>(x: &F) -> Value {
    match x.to_rational() {
        Some(q) => Value::String(q.to_string()),
        None => Number::from_f64(x.to_f64()).map_or(Value::Null, Value::Number),
    }
}

/// Accepts rational strings and JSON numbers in either mode. A float read
/// into exact mode is converted exactly.
pub fn scalar_from_value<F: Field>(v: &Value) -> Result<F, JsonError> {
    match v {
        Value::String(s) => parse_rational(s)
            .map(|q| F::from_rational(&q))
            .ok_or_else(|| format_err(format!("invalid rational `{s}`"))),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(F::from_i64(i))
            } else {
                let f = n.as_f64().ok_or_else(|| format_err(format!("invalid number {n}")))?;
                if F::is_exact() {
                    Rational::from_float(f)
                        .map(|q| F::from_rational(&q))
                        .ok_or_else(|| format_err(format!("non-finite number {n}")))
                } else {
                    Ok(F::from_f64(f))
                }
            }
        }
        other => Err(format_err(format!("expected a scalar, found {other}"))),
    }
}

pub fn vector_to_value<F: Field>(v: &[F]) -> Value {
    Value::Array(v.iter().map(scalar_to_value).collect())
}

pub fn vector_from_value<F: Field>(v: &Value) -> Result<Vec<F>, JsonError> {
    v.as_array()
        .ok_or_else(|| format_err("expected an array of scalars"))?
        .iter()
        .map(scalar_from_value)
        .collect()
}

pub fn matrix_to_value<F: Field>(m: &Matrix<F>) -> Value {
    Value::Array((0..m.rows()).map(|i| vector_to_value(m.row(i))).collect())
}

/// A matrix with no rows has to be given its column count.
pub fn matrix_from_value<F: Field>(v: &Value, cols_if_empty: usize) -> Result<Matrix<F>, JsonError> {
    let rows = v
        .as_array()
        .ok_or_else(|| format_err("expected a matrix (array of rows)"))?
        .iter()
        .map(vector_from_value)
        .collect::<Result<Vec<Vec<F>>, _>>()?;
    let cols = rows.first().map_or(cols_if_empty, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
        return Err(format_err(format!(
            "ragged matrix: row of length {} in a matrix with {cols} columns",
            bad.len()
        )));
    }
    let n_rows = rows.len();
    Matrix::from_vec(n_rows, cols, rows.into_iter().flatten().collect())
        .map_err(|e| format_err(e.to_string()))
}

/// The `"mode"` field of a tensor or basis document, if present.
pub fn mode_of(v: &Value) -> Result<Option<Mode>, JsonError> {
    match v.get("mode") {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => s.parse().map(Some).map_err(format_err),
        Some(other) => Err(format_err(format!("invalid mode {other}"))),
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, JsonError> {
    v.get(key).ok_or_else(|| format_err(format!("missing field `{key}`")))
}

fn count(v: &Value, key: &str) -> Result<usize, JsonError> {
    field(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| format_err(format!("field `{key}` must be a nonnegative integer")))
}

pub fn tensor_to_value<F: Field>(t: &Tensor3<F>) -> Value {
    let (m, n, p) = t.dims();
    json!({
        "m": m,
        "n": n,
        "p": p,
        "mode": F::MODE,
        "slices": t.slices().iter().map(matrix_to_value).collect::<Vec<_>>(),
    })
}

pub fn tensor_from_value<F: Field>(v: &Value) -> Result<Tensor3<F>, JsonError> {
    let (m, n, p) = (count(v, "m")?, count(v, "n")?, count(v, "p")?);
    let slices = field(v, "slices")?
        .as_array()
        .ok_or_else(|| format_err("`slices` must be an array"))?
        .iter()
        .map(|s| matrix_from_value::<F>(s, n))
        .collect::<Result<Vec<_>, _>>()?;
    if slices.len() != p {
        return Err(format_err(format!("p = {p} but {} slices given", slices.len())));
    }
    if let Some(bad) = slices.iter().find(|s| s.shape() != (m, n)) {
        return Err(format_err(format!(
            "slice of shape {:?} in a tensor with m = {m}, n = {n}",
            bad.shape()
        )));
    }
    if p == 0 {
        return Ok(Tensor3::zeros(m, n, 0));
    }
    Ok(Tensor3::from_slices(slices)?)
}

fn terms_to_value<F: Field>(terms: &[MatrixVectorTerm<F>]) -> Value {
    let terms: Vec<Value> = terms
        .iter()
        .map(|t| json!({ "M": matrix_to_value(&t.matrix), "w": vector_to_value(&t.w) }))
        .collect();
    json!({ "terms": terms })
}

pub fn decomposition_to_value<F: Field>(d: &MatrixVectorDecomposition<F>) -> Value {
    terms_to_value(d.terms())
}

/// The terms of a decomposition document, without validating them.
pub fn terms_from_value<F: Field>(v: &Value) -> Result<Vec<MatrixVectorTerm<F>>, JsonError> {
    field(v, "terms")?
        .as_array()
        .ok_or_else(|| format_err("`terms` must be an array"))?
        .iter()
        .map(|t| {
            let w = vector_from_value(field(t, "w")?)?;
            let matrix = matrix_from_value(field(t, "M")?, 0)?;
            Ok(MatrixVectorTerm::new(matrix, w))
        })
        .collect()
}

pub fn basis_to_value<F: Field>(matrices: &[Matrix<F>]) -> Value {
    json!({
        "matrices": matrices.iter().map(matrix_to_value).collect::<Vec<_>>(),
        "mode": F::MODE,
    })
}

pub fn basis_from_value<F: Field>(v: &Value) -> Result<Vec<Matrix<F>>, JsonError> {
    let matrices = field(v, "matrices")?
        .as_array()
        .ok_or_else(|| format_err("`matrices` must be an array"))?
        .iter()
        .map(|m| matrix_from_value::<F>(m, 0))
        .collect::<Result<Vec<_>, _>>()?;
    if matrices.is_empty() {
        return Err(TensorError::EmptyInput.into());
    }
    Ok(matrices)
}

pub fn certificate_to_value(c: &Certificate) -> Value {
    let mut v = serde_json::to_value(c).expect("plain struct");
    if let Value::Object(map) = &mut v {
        map.insert("valid".into(), Value::Bool(c.valid()));
    }
    v
}

pub fn minrank_to_value<F: Field>(r: &MinrankResult<F>) -> Value {
    json!({
        "rho": r.rho,
        "minimizers": r.minimizers.iter().map(matrix_to_value).collect::<Vec<_>>(),
        "hidden_basis": r.hidden_basis.iter().map(matrix_to_value).collect::<Vec<_>>(),
        "certificate": certificate_to_value(&r.certificate),
        "mode": F::MODE,
    })
}

pub fn rank_one_to_value<F: Field>(d: &RankOneDecomposition<F>) -> Value {
    json!({
        "U": matrix_to_value(&d.u),
        "V": matrix_to_value(&d.v),
        "W": matrix_to_value(&d.w),
    })
}

pub fn jennrich_to_value<F: Field>(out: &JennrichOutput<F>) -> Value {
    let mut v = rank_one_to_value(&out.decomposition);
    if let Value::Object(map) = &mut v {
        map.insert("residual".into(), float(out.residual));
        map.insert("pairing_residual".into(), float(out.pairing_residual));
    }
    v
}

fn float(x: f64) -> Value {
    Number::from_f64(x).map_or(Value::Null, Value::Number)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Matrix<Rational>;

    #[test]
    fn exact_scalars_are_strings() {
        let q = Rational::new(3.into(), (-6).into());
        assert_eq!(scalar_to_value(&q), json!("-1/2"));
        assert_eq!(scalar_to_value(&Rational::from_i64(7)), json!("7"));
        assert_eq!(scalar_from_value::<Rational>(&json!("-1/2")).unwrap(), q);
        assert_eq!(scalar_from_value::<Rational>(&json!(0.25)).unwrap(), Rational::new(1.into(), 4.into()));
        assert_eq!(scalar_from_value::<f64>(&json!("1/4")).unwrap(), 0.25);
        assert_eq!(scalar_to_value(&1.5f64), json!(1.5));
        assert!(scalar_from_value::<Rational>(&json!("1/0")).is_err());
        assert!(scalar_from_value::<Rational>(&json!([1])).is_err());
    }

    #[test]
    fn tensor_round_trip() {
        let t = Tensor3::<Rational>::from_fn(2, 3, 2, |i, j, k| {
            Rational::new(((i + 2 * j) as i64 - k as i64).into(), (k as i64 + 1).into())
        });
        let v = tensor_to_value(&t);
        assert_eq!(v["mode"], json!("exact"));
        assert_eq!(mode_of(&v).unwrap(), Some(Mode::Exact));
        assert_eq!(tensor_from_value::<Rational>(&v).unwrap(), t);
        let text = serde_json::to_string(&v).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(tensor_from_value::<Rational>(&back).unwrap(), t);
    }

    #[test]
    fn malformed_tensors() {
        let bad_p = json!({"m": 1, "n": 1, "p": 2, "slices": [[["1"]]]});
        assert!(tensor_from_value::<Rational>(&bad_p).is_err());
        let bad_shape = json!({"m": 1, "n": 2, "p": 1, "slices": [[["1"]]]});
        assert!(tensor_from_value::<Rational>(&bad_shape).is_err());
        let ragged = json!({"m": 2, "n": 2, "p": 1, "slices": [[["1", "2"], ["3"]]]});
        assert!(tensor_from_value::<Rational>(&ragged).is_err());
        assert!(mode_of(&json!({"mode": "complex"})).is_err());
    }

    #[test]
    fn decomposition_and_basis_round_trip() {
        let m = Q::from_i64_rows(&[&[1, 0], &[2, 0]]);
        let d = MatrixVectorDecomposition::new(vec![MatrixVectorTerm::new(
            m.clone(),
            vec![Rational::from_i64(1), Rational::new(1.into(), 3.into())],
        )])
        .unwrap();
        let v = decomposition_to_value(&d);
        assert_eq!(v["terms"][0]["w"], json!(["1", "1/3"]));
        assert_eq!(terms_from_value::<Rational>(&v).unwrap(), d.terms());
        let b = basis_to_value(std::slice::from_ref(&m));
        assert_eq!(basis_from_value::<Rational>(&b).unwrap(), vec![m]);
        assert!(basis_from_value::<Rational>(&json!({"matrices": []})).is_err());
    }
}
