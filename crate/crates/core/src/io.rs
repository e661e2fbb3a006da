//! Text and JSON formats for codes and divisors.
//!
//! Code files: a header line `q n count kind` with `kind` either `list` or
//! `linear`, then `count` lines of `n` space-separated field encodings
//! (codewords or generator rows). Blank lines and `#` comments are ignored.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{Code, CodeBody, CodeError, Word};
use crate::curves::{Curve, CurveError, CurveKind, Divisor, Point};
use crate::gf::{prime_power, FieldError, Gf};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, msg: msg.into() }
}

/// The field of order `q`.
pub fn field_of_order(q: u32) -> Result<Gf, FormatError> {
    let (p, k) = prime_power(q).ok_or(FormatError::NotPrimePower(q))?;
    Ok(Gf::new(p, k)?)
}

pub fn write_code(code: &Code) -> String {
    let (kind, rows): (&str, Vec<Word>) = match code.body() {
        CodeBody::Listed(w) => ("list", w.clone()),
        CodeBody::Linear(g) => ("linear", g.row_vecs()),
    };
    let mut out = format!("{} {} {} {}\n", code.field().q(), code.len(), rows.len(), kind);
    for r in rows {
        let line: Vec<String> = r.iter().map(|s| s.encoding().to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_code(text: &str) -> Result<Code, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| syntax(1, "missing header `q n count kind`"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(syntax(hl, "header must be `q n count kind`"));
    }
    let num = |s: &str, what: &str| s.parse::<usize>().map_err(|_| syntax(hl, format!("bad {what} `{s}`")));
    let q = num(fields[0], "q")?;
    let n = num(fields[1], "n")?;
    let count = num(fields[2], "count")?;
    let linear = match fields[3] {
        "list" => false,
        "linear" => true,
        other => return Err(syntax(hl, format!("kind must be list or linear, got `{other}`"))),
    };
    let q = u32::try_from(q).map_err(|_| syntax(hl, "q too large"))?;
    let gf = field_of_order(q)?;
    let mut rows = Vec::with_capacity(count);
    for (ln, l) in lines {
        if rows.len() == count {
            return Err(syntax(ln, format!("more than {count} rows")));
        }
        let row: Word = l
            .split_whitespace()
            .map(|t| {
                let v: u64 = t.parse().map_err(|_| syntax(ln, format!("bad symbol `{t}`")))?;
                gf.elem(v).map_err(|_| syntax(ln, format!("symbol {v} out of range for GF({q})")))
            })
            .collect::<Result<_, _>>()?;
        if row.len() != n {
            return Err(syntax(ln, format!("expected {n} symbols, found {}", row.len())));
        }
        rows.push(row);
    }
    if rows.len() != count {
        return Err(syntax(text.lines().count().max(1), format!("expected {count} rows, found {}", rows.len())));
    }
    Ok(if linear { Code::linear(gf, n, rows)? } else { Code::listed(gf, n, rows)? })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveJson {
    /// `p1` or `hermitian`.
    pub kind: String,
    pub p: u32,
    pub k: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q0: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointJson {
    /// Always the string `inf`.
    Infinity(String),
    /// `[x]` on the line, `[x, y]` on the Hermitian curve.
    Affine(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportJson {
    pub point: PointJson,
    pub mult: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorJson {
    pub curve: CurveJson,
    pub support: Vec<SupportJson>,
}

pub fn curve_json(curve: &Curve) -> CurveJson {
    let gf = curve.field();
    match curve.kind() {
        CurveKind::ProjectiveLine => CurveJson { kind: "p1".into(), p: gf.p(), k: gf.k(), q0: None },
        CurveKind::Hermitian { q0 } => CurveJson { kind: "hermitian".into(), p: gf.p(), k: gf.k(), q0: Some(q0) },
    }
}

pub fn curve_from_json(c: &CurveJson) -> Result<Curve, FormatError> {
    let gf = Gf::new(c.p, c.k)?;
    match c.kind.as_str() {
        "p1" | "line" => Ok(Curve::projective_line(gf)),
        "hermitian" => {
            let curve = Curve::hermitian(gf)?;
            match (c.q0, curve.kind()) {
                (Some(given), CurveKind::Hermitian { q0 }) if given != q0 => {
                    Err(syntax(0, format!("q0 = {given} does not match GF({}^{})", c.p, c.k)))
                }
                _ => Ok(curve),
            }
        }
        other => Err(syntax(0, format!("unknown curve kind `{other}`"))),
    }
}

pub fn point_json(curve: &Curve, p: usize) -> Result<PointJson, CurveError> {
    Ok(match (curve.point(p)?, curve.kind()) {
        (Point::Infinity, _) => PointJson::Infinity("inf".into()),
        (Point::Affine { x, .. }, CurveKind::ProjectiveLine) => PointJson::Affine(vec![x.encoding()]),
        (Point::Affine { x, y }, CurveKind::Hermitian { .. }) => PointJson::Affine(vec![x.encoding(), y.encoding()]),
    })
}

pub fn point_from_json(curve: &Curve, p: &PointJson) -> Result<usize, FormatError> {
    let gf = curve.field();
    let pt = match (p, curve.kind()) {
        (PointJson::Infinity(s), _) if s == "inf" => Point::Infinity,
        (PointJson::Infinity(s), _) => return Err(syntax(0, format!("point must be `inf` or coordinates, got `{s}`"))),
        (PointJson::Affine(c), CurveKind::ProjectiveLine) if c.len() == 1 || (c.len() == 2 && c[1] == 0) => {
            Point::Affine { x: gf.elem(c[0] as u64)?, y: crate::gf::Fe::ZERO }
        }
        (PointJson::Affine(c), CurveKind::Hermitian { .. }) if c.len() == 2 => {
            Point::Affine { x: gf.elem(c[0] as u64)?, y: gf.elem(c[1] as u64)? }
        }
        (PointJson::Affine(c), _) => return Err(syntax(0, format!("wrong number of coordinates in {c:?}"))),
    };
    Ok(curve.index_of(&pt)?)
}

pub fn divisor_json(curve: &Curve, d: &Divisor) -> Result<DivisorJson, CurveError> {
    let support = d
        .support()
        .map(|(p, mult)| Ok(SupportJson { point: point_json(curve, p)?, mult }))
        .collect::<Result<_, CurveError>>()?;
    Ok(DivisorJson { curve: curve_json(curve), support })
}

pub fn write_divisor(curve: &Curve, d: &Divisor) -> Result<String, CurveError> {
    Ok(serde_json::to_string_pretty(&divisor_json(curve, d)?).expect("serializable") + "\n")
}

/// A divisor together with the curve it lives on.
pub fn parse_divisor(text: &str) -> Result<(Curve, Divisor), FormatError> {
    let dj: DivisorJson = serde_json::from_str(text)?;
    let curve = curve_from_json(&dj.curve)?;
    let mut d = Divisor::zero();
    for s in &dj.support {
        d.add_point(point_from_json(&curve, &s.point)?, s.mult);
    }
    Ok((curve, d))
}
