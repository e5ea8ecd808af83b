//! Line-oriented text formats for problems and bases.
//!
//! Problem file:
//!
//! ```text
//! VI1 <n> <cone-spec>
//! <n rows of n decimals: M>
//! <n decimals: q>
//! ```
//!
//! Basis file:
//!
//! ```text
//! BASIS1 <n> <k>
//! <n rows of k decimals>
//! ```
//!
//! `#` starts a comment; blank lines are ignored. Writers print 17
//! significant digits, so values survive a write/parse round trip exactly.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::cones::SeparableCone;
use crate::error::{Error, Result};
use crate::operators::AffineOperator;

pub const PROBLEM_MAGIC: &str = "VI1";
pub const BASIS_MAGIC: &str = "BASIS1";

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_row(line_no: usize, line: &str, expected: usize) -> Result<Vec<f64>> {
    let row = line
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line_no, format!("`{tok}` is not a finite number")))
        })
        .collect::<Result<Vec<f64>>>()?;
    if row.len() != expected {
        return Err(parse_err(
            line_no,
            format!("expected {expected} numbers, found {}", row.len()),
        ));
    }
    Ok(row)
}

fn parse_count(line_no: usize, tok: Option<&str>, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(line_no, format!("header is missing {what}")))?;
    match tok.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(parse_err(line_no, format!("bad {what} `{tok}`"))),
    }
}

pub fn parse_problem(text: &str) -> Result<(AffineOperator, SeparableCone)> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty problem file"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some(PROBLEM_MAGIC) {
        return Err(parse_err(
            hline,
            format!("header must start with `{PROBLEM_MAGIC}`"),
        ));
    }
    let n = parse_count(hline, toks.next(), "dimension")?;
    let spec: String = toks.collect::<Vec<_>>().join("");
    if spec.is_empty() {
        return Err(parse_err(hline, "header is missing the cone spec"));
    }
    let cone: SeparableCone = spec
        .parse()
        .map_err(|e: Error| parse_err(hline, e.to_string()))?;
    if cone.dim() != n {
        return Err(parse_err(
            hline,
            format!(
                "cone `{spec}` has dimension {}, header says {n}",
                cone.dim()
            ),
        ));
    }

    let mut values = Vec::with_capacity(n * n);
    let mut last_line = hline;
    for row in 0..=n {
        let (ln, line) = lines.next().ok_or_else(|| {
            let what = if row < n {
                format!("matrix row {} of {n}", row + 1)
            } else {
                "the q vector".to_string()
            };
            parse_err(
                last_line + 1,
                format!("unexpected end of file, expected {what}"),
            )
        })?;
        values.extend(parse_row(ln, line, n)?);
        last_line = ln;
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(
            ln,
            format!("unexpected extra line; header declares n = {n}"),
        ));
    }
    let q = DVector::from_row_slice(&values[n * n..]);
    let m = DMatrix::from_row_slice(n, n, &values[..n * n]);
    let op = AffineOperator::new(m, q).map_err(|e| parse_err(hline, e.to_string()))?;
    Ok((op, cone))
}

fn write_row<'a>(out: &mut String, row: impl Iterator<Item = &'a f64>) {
    let mut first = true;
    for v in row {
        if !first {
            out.push(' ');
        }
        first = false;
        let _ = write!(out, "{v:.16e}");
    }
    out.push('\n');
}

pub fn write_problem(op: &AffineOperator, cone: &SeparableCone) -> String {
    let m = op.matrix();
    let mut out = format!("{PROBLEM_MAGIC} {} {cone}\n", m.nrows());
    for row in m.row_iter() {
        write_row(&mut out, row.iter());
    }
    write_row(&mut out, op.offset().iter());
    out
}

/// Parses a basis file into the raw `n×k` matrix.
pub fn parse_basis(text: &str) -> Result<DMatrix<f64>> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty basis file"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some(BASIS_MAGIC) {
        return Err(parse_err(
            hline,
            format!("header must start with `{BASIS_MAGIC}`"),
        ));
    }
    let n = parse_count(hline, toks.next(), "row count")?;
    let k = parse_count(hline, toks.next(), "column count")?;
    if let Some(tok) = toks.next() {
        return Err(parse_err(hline, format!("unexpected header token `{tok}`")));
    }
    let mut values = Vec::with_capacity(n * k);
    let mut last_line = hline;
    for row in 0..n {
        let (ln, line) = lines.next().ok_or_else(|| {
            parse_err(
                last_line + 1,
                format!(
                    "unexpected end of file, expected basis row {} of {n}",
                    row + 1
                ),
            )
        })?;
        values.extend(parse_row(ln, line, k)?);
        last_line = ln;
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(
            ln,
            format!("unexpected extra line; header declares {n} rows"),
        ));
    }
    Ok(DMatrix::from_row_slice(n, k, &values))
}

pub fn write_basis(raw: &DMatrix<f64>) -> String {
    let mut out = format!("{BASIS_MAGIC} {} {}\n", raw.nrows(), raw.ncols());
    for row in raw.row_iter() {
        write_row(&mut out, row.iter());
    }
    out
}

/// One value per line, 17 significant digits.
pub fn write_vector(v: &DVector<f64>) -> String {
    let mut out = String::new();
    for x in v.iter() {
        let _ = writeln!(out, "{x:.16e}");
    }
    out
}
