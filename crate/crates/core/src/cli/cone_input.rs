//! Text format for cone queries.
//!
//! One directive per line; `#` starts a comment.
//!
//! ```text
//! k 2                 # index for the following queries (default 1)
//! tolerance 1e-9      # classification tolerance (default 1e-9)
//! spectrum 1 2 3
//! matrix 2 1 0; 1 2 0; 0 0 1
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symfun::{cone_status, ConeKind, Spectrum, SymEndo, DEFAULT_CONE_TOLERANCE};

/// Largest accepted spectrum length or matrix dimension.
pub const MAX_QUERY_DIM: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ConeInput {
    Spectrum(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeQuery {
    pub line: usize,
    pub k: usize,
    pub tolerance: f64,
    pub input: ConeInput,
}

fn err<T>(line: usize, msg: impl std::fmt::Display) -> Result<T> {
    Err(Error::Argument(format!("line {line}: {msg}")))
}

fn numbers(line: usize, text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|t| match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => err(line, format!("'{t}' is not a finite number")),
        })
        .collect()
}

pub fn parse_cone_queries(text: &str) -> Result<Vec<ConeQuery>> {
    let mut k = 1usize;
    let mut tolerance = DEFAULT_CONE_TOLERANCE;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (word, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        match word {
            "k" => {
                k = match rest.trim().parse::<usize>() {
                    Ok(v) if v >= 1 => v,
                    _ => return err(line, "k must be a positive integer"),
                }
            }
            "tolerance" => {
                tolerance = match rest.trim().parse::<f64>() {
                    Ok(v) if v > 0.0 && v.is_finite() => v,
                    _ => return err(line, "tolerance must be a positive number"),
                }
            }
            "spectrum" => {
                let v = numbers(line, rest)?;
                if v.len() < 2 || v.len() > MAX_QUERY_DIM {
                    return err(line, format!("spectrum needs 2..={MAX_QUERY_DIM} values"));
                }
                out.push(ConeQuery { line, k, tolerance, input: ConeInput::Spectrum(v) });
            }
            "matrix" => {
                let rows: Vec<Vec<f64>> = rest.split(';').map(|r| numbers(line, r)).collect::<Result<_>>()?;
                let n = rows.len();
                if !(2..=MAX_QUERY_DIM).contains(&n) || rows.iter().any(|r| r.len() != n) {
                    return err(line, format!("matrix must be square with dimension 2..={MAX_QUERY_DIM}"));
                }
                out.push(ConeQuery { line, k, tolerance, input: ConeInput::Matrix(rows) });
            }
            other => return err(line, format!("unknown directive '{other}'")),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeAnswer {
    pub line: usize,
    pub k: usize,
    pub eigenvalues: Vec<f64>,
    /// σ_1..σ_k of the eigenvalues.
    pub sigmas: Vec<f64>,
    pub positive: ConeKind,
    /// Placement of the negated spectrum.
    pub negative: ConeKind,
}

pub fn answer_cone_query(q: &ConeQuery) -> Result<ConeAnswer> {
    let spectrum = match &q.input {
        ConeInput::Spectrum(v) => Spectrum::new(v.clone())?,
        ConeInput::Matrix(rows) => SymEndo::from_rows(rows)?.eigenvalues(),
    };
    let pos = cone_status(&spectrum, q.k, q.tolerance)?;
    let neg = cone_status(&spectrum.negated(), q.k, q.tolerance)?;
    if !pos.sigmas.iter().chain(&neg.sigmas).all(|v| v.is_finite()) {
        return err(q.line, "elementary symmetric functions overflow");
    }
    Ok(ConeAnswer {
        line: q.line,
        k: q.k,
        eigenvalues: spectrum.values().to_vec(),
        sigmas: pos.sigmas,
        positive: pos.kind,
        negative: neg.kind,
    })
}
