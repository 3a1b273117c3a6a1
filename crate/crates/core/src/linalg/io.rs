//! MatrixMarket coordinate files for sparse matrices and plain CSV for dense ones.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::dense::{log2_exact, DenseMatrix};
use super::sparse::SparseMatrix;
use crate::error::{FableError, Result};

pub const MATRIX_MARKET_HEADER: &str = "%%MatrixMarket matrix coordinate real general";

/// Shortest round-trip decimal form of `x` (at most 17 significant digits),
/// always carrying a decimal point so QASM-style grammars accept it.
pub fn format_real(x: f64) -> String {
    let s = format!("{x:?}");
    match s.find('e') {
        Some(pos) if !s[..pos].contains('.') => format!("{}.0{}", &s[..pos], &s[pos..]),
        _ => s,
    }
}

pub fn write_matrix_market_string(m: &SparseMatrix, comments: &[String]) -> String {
    let mut out = String::new();
    out.push_str(MATRIX_MARKET_HEADER);
    out.push('\n');
    for c in comments {
        for line in c.lines() {
            let _ = writeln!(out, "% {line}");
        }
    }
    let _ = writeln!(out, "{} {} {}", m.dim(), m.dim(), m.nnz());
    for &(r, c, v) in m.entries() {
        let _ = writeln!(out, "{} {} {}", r + 1, c + 1, format_real(v));
    }
    out
}

pub fn write_matrix_market(path: &Path, m: &SparseMatrix, comments: &[String]) -> Result<()> {
    fs::write(path, write_matrix_market_string(m, comments)).map_err(|e| FableError::io(path, e))
}

/// Parses a MatrixMarket coordinate file (`real` or `integer`, `general` or
/// `symmetric`). Explicitly stored zeros are dropped.
pub fn parse_matrix_market(text: &str) -> Result<SparseMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(FableError::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(FableError::Parse {
            line: 1,
            message: format!("not a MatrixMarket header: {header:?}"),
        });
    }
    if tokens[2] != "coordinate" {
        return Err(FableError::Parse {
            line: 1,
            message: format!("unsupported format {:?}, expected coordinate", tokens[2]),
        });
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(FableError::Parse {
            line: 1,
            message: format!("unsupported field {:?}", tokens[3]),
        });
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(FableError::Parse {
                line: 1,
                message: format!("unsupported symmetry {other:?}"),
            })
        }
    };

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_idx, size_line) = body.next().ok_or(FableError::Parse {
        line: 2,
        message: "missing size line".into(),
    })?;
    let size: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| FableError::Parse {
            line: size_idx + 1,
            message: format!("bad size line: {e}"),
        })?;
    if size.len() != 3 {
        return Err(FableError::Parse {
            line: size_idx + 1,
            message: "size line needs rows, cols, nnz".into(),
        });
    }
    let (rows, cols, declared) = (size[0], size[1], size[2]);
    if rows != cols {
        return Err(FableError::Dimension(format!("matrix is {rows}x{cols}, not square")));
    }
    let n = log2_exact(rows)
        .ok_or_else(|| FableError::Dimension(format!("dimension {rows} is not a power of two")))?;

    let mut entries = Vec::with_capacity(declared);
    let mut count = 0;
    for (idx, line) in body {
        count += 1;
        let parse_err = |message: String| FableError::Parse {
            line: idx + 1,
            message,
        };
        let mut it = line.split_whitespace();
        let (Some(r), Some(c), Some(v)) = (it.next(), it.next(), it.next()) else {
            return Err(parse_err("expected `row col value`".into()));
        };
        let r: usize = r.parse().map_err(|e| parse_err(format!("row: {e}")))?;
        let c: usize = c.parse().map_err(|e| parse_err(format!("col: {e}")))?;
        let v: f64 = v.parse().map_err(|e| parse_err(format!("value: {e}")))?;
        if r == 0 || c == 0 || r > rows || c > cols {
            return Err(parse_err(format!("index ({r}, {c}) out of range")));
        }
        if v != 0.0 {
            entries.push((r - 1, c - 1, v));
            if symmetric && r != c {
                entries.push((c - 1, r - 1, v));
            }
        }
    }
    if count != declared {
        return Err(FableError::Parse {
            line: size_idx + 1,
            message: format!("declared {declared} entries, found {count}"),
        });
    }
    SparseMatrix::new(n, entries)
}

pub fn read_matrix_market(path: &Path) -> Result<SparseMatrix> {
    let text = fs::read_to_string(path).map_err(|e| FableError::io(path, e))?;
    parse_matrix_market(&text)
}

pub fn write_dense_csv_string(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.dim() {
        let row: Vec<String> = m.row(i).iter().map(|&v| format_real(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_dense_csv(path: &Path, m: &DenseMatrix) -> Result<()> {
    fs::write(path, write_dense_csv_string(m)).map_err(|e| FableError::io(path, e))
}

pub fn parse_dense_csv(text: &str) -> Result<DenseMatrix> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| FableError::Parse {
                line: idx + 1,
                message: e.to_string(),
            })?;
        rows.push(row);
    }
    DenseMatrix::from_rows(&rows)
}

pub fn read_dense_csv(path: &Path) -> Result<DenseMatrix> {
    let text = fs::read_to_string(path).map_err(|e| FableError::io(path, e))?;
    parse_dense_csv(&text)
}
