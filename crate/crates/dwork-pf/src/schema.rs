//! JSON conventions shared by the CLI and file formats.
//!
//! Rationals serialize as `"num/den"` strings (denominator omitted when 1),
//! series as coefficient arrays, rational functions as
//! `{"num": [...], "den": [...]}`. All maps are emitted with sorted keys,
//! so identical inputs produce byte-identical JSON.

use serde_json::{json, Map, Value};

use crate::deformation::{BasisChange, FrobeniusResult, PadicSeriesView, SeriesMatrix};
use crate::family::{CharVector, FamilyData};
use crate::operators::{CompanionMatrix, DiffOperator, HypParams};
use crate::poly::Poly;
use crate::ratfun::RationalFunction;
use crate::rational::{rational_from_str, rational_to_string, Rational};
use crate::series::TruncSeries;

pub fn rational_value(r: &Rational) -> Value {
    Value::String(rational_to_string(r))
}

pub fn series_value(s: &TruncSeries) -> Value {
    Value::Array(s.coeffs().iter().map(rational_value).collect())
}

pub fn poly_value(p: &Poly) -> Value {
    Value::Array(p.coeffs().iter().map(rational_value).collect())
}

pub fn ratfun_value(f: &RationalFunction) -> Value {
    json!({
        "num": poly_value(f.num()),
        "den": poly_value(f.den()),
    })
}

pub fn family_value(f: &FamilyData) -> Value {
    json!({
        "n": f.n(),
        "d": f.d(),
        "w": f.weights(),
        "b": f.bezout(),
        "dW": f.d_w(),
    })
}

/// Comma-separated residues, the wire form of a character vector.
pub fn char_vector_string(v: &CharVector) -> String {
    v.lifts()
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn operator_value(op: &DiffOperator) -> Value {
    let terms: Vec<Value> = op
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| {
            json!({
                "dpow": j,
                "coeffs": poly_value(c),
            })
        })
        .collect();
    json!({
        "variable": op.var().name(),
        "terms": terms,
    })
}

pub fn hyp_value(h: &HypParams) -> Value {
    json!({
        "alphas": h.alphas().iter().map(rational_value).collect::<Vec<_>>(),
        "betas": h.betas().iter().map(rational_value).collect::<Vec<_>>(),
    })
}

pub fn series_matrix_value(m: &SeriesMatrix) -> Value {
    Value::Array(
        (0..m.size())
            .map(|i| {
                Value::Array(
                    (0..m.size()).map(|j| series_value(m.entry(i, j))).collect(),
                )
            })
            .collect(),
    )
}

pub fn companion_value(c: &CompanionMatrix) -> Value {
    Value::Array(
        c.rows()
            .iter()
            .map(|row| Value::Array(row.iter().map(ratfun_value).collect()))
            .collect(),
    )
}

pub fn basis_change_value(b: &BasisChange) -> Value {
    let mat = |rows: &Vec<Vec<RationalFunction>>| {
        Value::Array(
            rows.iter()
                .map(|row| Value::Array(row.iter().map(ratfun_value).collect()))
                .collect(),
        )
    };
    json!({
        "matrix": mat(&b.matrix),
        "connection": mat(&b.connection),
        "residue": Value::Array(
            b.residue
                .iter()
                .map(|row| Value::Array(row.iter().map(rational_value).collect()))
                .collect()
        ),
    })
}

pub fn qmat_value(m: &[Vec<Rational>]) -> Value {
    Value::Array(
        m.iter()
            .map(|row| Value::Array(row.iter().map(rational_value).collect()))
            .collect(),
    )
}

pub fn padic_view_value(v: &PadicSeriesView) -> Value {
    json!({
        "p": v.p,
        "N": v.precision,
        "denominator_valuation": v.denominator_valuation,
        "coeffs": v
            .coeffs
            .iter()
            .map(|m| {
                Value::Array(
                    (0..m.size)
                        .map(|i| {
                            Value::Array(
                                (0..m.size)
                                    .map(|j| Value::String(m.entry(i, j).to_string()))
                                    .collect(),
                            )
                        })
                        .collect(),
                )
            })
            .collect::<Vec<_>>(),
    })
}

pub fn frobenius_value(res: &FrobeniusResult, residual_zero: bool) -> Value {
    json!({
        "p": res.p,
        "f0": qmat_value(&res.f0),
        "f": series_matrix_value(&res.f),
        "order": res.f.order(),
        "residual_zero": residual_zero,
    })
}

/// Parse an `r×r` matrix of `"num/den"` strings (the F(0) input format).
pub fn parse_rational_matrix(v: &Value) -> Result<Vec<Vec<Rational>>, String> {
    let rows = v.as_array().ok_or("expected a JSON array of rows")?;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let cells = row.as_array().ok_or("expected each row to be an array")?;
        let mut r = Vec::with_capacity(cells.len());
        for cell in cells {
            let s = cell.as_str().ok_or("expected rational strings")?;
            r.push(rational_from_str(s)?);
        }
        out.push(r);
    }
    if out.is_empty() || out.iter().any(|r| r.len() != out.len()) {
        return Err("F(0) must be a nonempty square matrix".into());
    }
    Ok(out)
}

/// Insert a key into a JSON object (helper for building sorted maps).
pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    for (k, v) in pairs {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}
