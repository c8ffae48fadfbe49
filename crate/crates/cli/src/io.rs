//! Plain-text matrix files: one row per line, whitespace-separated decimal
//! literals; blank lines and lines starting with `#` are ignored. Values are
//! written with 17 significant digits, so parse(serialize(M)) is bit-exact
//! for 64-bit floats.

use std::fmt::Write as _;

use symplectica::PhaseMatrix;

#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

pub fn parse_matrix(text: &str) -> Result<PhaseMatrix, ParseError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut row_lines: Vec<usize> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| ParseError {
                line: line_no,
                message: format!("cannot parse '{tok}' as a number"),
            })?;
            row.push(v);
        }
        rows.push(row);
        row_lines.push(line_no);
    }
    if rows.is_empty() {
        return Err(ParseError { line: 0, message: "no matrix rows found".into() });
    }
    let dim = rows.len();
    for (row, &line_no) in rows.iter().zip(&row_lines) {
        if row.len() != dim {
            return Err(ParseError {
                line: line_no,
                message: format!("row has {} entries, expected {dim}", row.len()),
            });
        }
    }
    if !dim.is_multiple_of(2) {
        return Err(ParseError {
            line: row_lines[dim - 1],
            message: format!("dimension {dim} is odd; phase-space matrices have even dimension"),
        });
    }
    PhaseMatrix::from_rows(&rows)
        .map_err(|e| ParseError { line: row_lines[0], message: e.to_string() })
}

/// 17-significant-digit serialization (bit-exact round trip).
pub fn serialize_matrix(m: &PhaseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:.16e}", m.get(i, j));
        }
        out.push('\n');
    }
    out
}

/// Rows of phase-space points in the same format, one point per line.
pub fn serialize_points(points: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for p in points {
        for (j, v) in p.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v:.16e}");
        }
        out.push('\n');
    }
    out
}
