//! JSON readers and writers for the on-disk formats: Gram matrices, finite
//! quadratic modules, block lists, modular data, and isomorphism witnesses.
//! Integers round-trip exactly (arbitrary precision) and form values use the
//! "num/den" fraction syntax.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use serde_json::{json, Map, Number, Value};

use crate::blocks::BlockDescriptor;
use crate::error::{Error, Result};
use crate::exact::FracMod1;
use crate::fqm::{FiniteQuadraticModule, GroupElement};
use crate::lattice::GramMatrix;
use crate::modular::ModularData;

fn bigint_to_json(n: &BigInt) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("integer is a valid JSON number"))
}

fn biguint_to_json(n: &BigUint) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("integer is a valid JSON number"))
}

fn json_to_bigint(v: &Value) -> Result<BigInt> {
    let Value::Number(n) = v else {
        return Err(Error::Parse(format!("expected an integer, found {v}")));
    };
    BigInt::from_str(&n.to_string())
        .map_err(|_| Error::Parse(format!("not an exact integer: {n}")))
}

fn json_to_biguint(v: &Value) -> Result<BigUint> {
    let n = json_to_bigint(v)?;
    n.to_biguint()
        .ok_or_else(|| Error::Parse(format!("expected a nonnegative integer, found {n}")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("expected an array for {what}")))
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::Parse(format!("expected an object for {what}")))
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::Parse(format!("missing field \"{name}\"")))
}

fn json_to_frac(v: &Value) -> Result<FracMod1> {
    let s = v
        .as_str()
        .ok_or_else(|| Error::Parse(format!("expected a \"num/den\" string, found {v}")))?;
    s.parse()
}

pub fn int_rows_to_json(rows: &[Vec<BigInt>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| Value::Array(r.iter().map(bigint_to_json).collect()))
            .collect(),
    )
}

pub fn json_to_int_rows(v: &Value) -> Result<Vec<Vec<BigInt>>> {
    as_array(v, "matrix rows")?
        .iter()
        .map(|row| as_array(row, "matrix row")?.iter().map(json_to_bigint).collect())
        .collect()
}

/// {"rank": n, "entries": [[row], …]}
pub fn gram_to_json(k: &GramMatrix) -> Value {
    json!({
        "rank": k.rank(),
        "entries": int_rows_to_json(&k.to_rows()),
    })
}

pub fn gram_from_json(v: &Value) -> Result<GramMatrix> {
    let obj = as_object(v, "a Gram matrix")?;
    let rank = json_to_biguint(field(obj, "rank")?)?;
    let rows = json_to_int_rows(field(obj, "entries")?)?;
    if BigUint::from(rows.len()) != rank {
        return Err(Error::Parse(format!(
            "rank {rank} does not match {} entry rows",
            rows.len()
        )));
    }
    GramMatrix::new(rows)
}

/// {"orders": […], "q": ["num/den", …], "b": [["num/den", …], …]} with b as
/// the strictly upper triangle in row-major order.
pub fn fqm_to_json(m: &FiniteQuadraticModule) -> Value {
    json!({
        "orders": m.orders().iter().map(biguint_to_json).collect::<Vec<_>>(),
        "q": m.q_gen().iter().map(|q| Value::String(q.to_string())).collect::<Vec<_>>(),
        "b": m.b_upper()
            .iter()
            .map(|row| Value::Array(row.iter().map(|x| Value::String(x.to_string())).collect()))
            .collect::<Vec<_>>(),
    })
}

pub fn fqm_from_json(v: &Value) -> Result<FiniteQuadraticModule> {
    let obj = as_object(v, "a finite quadratic module")?;
    let orders = as_array(field(obj, "orders")?, "orders")?
        .iter()
        .map(json_to_biguint)
        .collect::<Result<Vec<_>>>()?;
    let q = as_array(field(obj, "q")?, "q")?
        .iter()
        .map(json_to_frac)
        .collect::<Result<Vec<_>>>()?;
    let b = as_array(field(obj, "b")?, "b")?
        .iter()
        .map(|row| as_array(row, "b row")?.iter().map(json_to_frac).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    FiniteQuadraticModule::new(orders, q, b)
}

/// [{"kind": "AOdd", "p": 3, "r": 1, "a": 1}, …]
pub fn blocks_to_json(blocks: &[BlockDescriptor]) -> Value {
    serde_json::to_value(blocks).expect("block descriptors serialize")
}

pub fn blocks_from_json(v: &Value) -> Result<Vec<BlockDescriptor>> {
    let blocks: Vec<BlockDescriptor> =
        serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("bad block list: {e}")))?;
    for b in &blocks {
        b.validate()?;
    }
    Ok(blocks)
}

fn element_to_json(x: &GroupElement) -> Value {
    Value::Array(x.coeffs.iter().map(bigint_to_json).collect())
}

/// Generator images of an isomorphism, one coefficient vector per generator
/// of the source module.
pub fn witness_to_json(images: &[GroupElement]) -> Value {
    json!({ "generator_images": images.iter().map(element_to_json).collect::<Vec<_>>() })
}

/// Discriminant output: the module plus integer lifts of its generators.
pub fn disc_to_json(m: &FiniteQuadraticModule, lifts: &[Vec<BigInt>]) -> Value {
    json!({
        "fqm": fqm_to_json(m),
        "generator_lifts": int_rows_to_json(lifts),
    })
}

/// Exact modular data: S and T as exponent tables over the common scale.
pub fn modular_to_json_exact(md: &ModularData) -> Value {
    json!({
        "scale_sq": biguint_to_json(&md.order),
        "s_exponents": md.s_exponents
            .iter()
            .map(|row| Value::Array(row.iter().map(|x| Value::String(x.to_string())).collect()))
            .collect::<Vec<_>>(),
        "t_exponents": md.t_exponents
            .iter()
            .map(|x| Value::String(x.to_string()))
            .collect::<Vec<_>>(),
        "c": md.central_charge,
        "labels": md.labels.iter().map(element_to_json).collect::<Vec<_>>(),
    })
}

/// Floating-point modular data: S and T entries as [re, im] pairs.
pub fn modular_to_json_float(md: &ModularData) -> Value {
    let n = md.labels.len();
    let scale = 1.0 / (n as f64).sqrt();
    let pair = |x: &FracMod1, s: f64| -> Value {
        let p = x.as_phase();
        json!([s * p.re, s * p.im])
    };
    json!({
        "s": md.s_exponents
            .iter()
            .map(|row| Value::Array(row.iter().map(|x| pair(x, scale)).collect()))
            .collect::<Vec<_>>(),
        "t": md.t_exponents.iter().map(|x| pair(x, 1.0)).collect::<Vec<_>>(),
        "c": md.central_charge,
        "labels": md.labels.iter().map(element_to_json).collect::<Vec<_>>(),
    })
}

pub fn read_json_file(path: &std::path::Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {path:?}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad JSON in {path:?}: {e}")))
}

pub fn write_json_file(path: &std::path::Path, v: &Value) -> Result<()> {
    std::fs::write(path, format!("{:#}\n", v))
        .map_err(|e| Error::Internal(format!("cannot write {path:?}: {e}")))
}
