//! Plain-text matrix files: a `rows cols` line, then one whitespace-separated
//! row per line at 17 significant digits.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fmt::sig;

pub fn format_matrix(m: &DMatrix<f64>) -> String {
    let mut out = format!("{} {}\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|&v| sig(v, 17)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str, path: &Path) -> Result<DMatrix<f64>> {
    let err = |line: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line: line as u64,
        reason,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty matrix file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(1, format!("bad dimension `{t}`"))))
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        return Err(err(1, "expected `rows cols`".into()));
    };
    let mut data = Vec::with_capacity(rows * cols);
    for (idx, line) in lines.by_ref().take(rows) {
        let before = data.len();
        for tok in line.split_whitespace() {
            data.push(
                tok.parse::<f64>()
                    .map_err(|_| err(idx + 1, format!("bad number `{tok}`")))?,
            );
        }
        if data.len() - before != cols {
            return Err(err(idx + 1, format!("expected {cols} values")));
        }
    }
    if data.len() != rows * cols {
        return Err(err(rows + 1, format!("expected {rows} rows")));
    }
    if let Some((idx, _)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(err(idx + 1, "trailing data".into()));
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    fs::write(path, format_matrix(m)).map_err(|e| Error::io(path, e))
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix(&text, path)
}
