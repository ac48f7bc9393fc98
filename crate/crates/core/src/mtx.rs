//! Matrix Market array format (`%%MatrixMarket matrix array real general`).
//!
//! Entries are stored column-major, one per line, with 17 significant digits
//! so every `f64` round-trips exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

const HEADER: &str = "%%MatrixMarket matrix array real general";

/// Formats a value with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_string(m: &DenseMatrix) -> String {
    let mut out = String::with_capacity(24 * m.rows() * m.cols() + 64);
    out.push_str(HEADER);
    out.push('\n');
    out.push_str(&format!("{} {}\n", m.rows(), m.cols()));
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            out.push_str(&format_f64(m[(i, j)]));
            out.push('\n');
        }
    }
    out
}

pub fn write<W: Write>(m: &DenseMatrix, mut w: W) -> std::io::Result<()> {
    w.write_all(write_string(m).as_bytes())
}

pub fn write_file(m: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, write_string(m)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses array-format text. `origin` names the source in error messages.
pub fn read_str(text: &str, origin: &str) -> Result<DenseMatrix> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    let (hline, header) = lines.next().ok_or_else(|| err(1, "empty input".into()))?;
    let fields: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if fields.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(err(hline, "header must start with %%MatrixMarket".into()));
    }
    if fields[1..] != ["matrix", "array", "real", "general"] {
        return Err(err(
            hline,
            format!("unsupported header '{header}', expected '{HEADER}'"),
        ));
    }

    let mut content = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (dline, dims) = content
        .next()
        .ok_or_else(|| err(hline + 1, "missing dimensions line".into()))?;
    let dims: Vec<&str> = dims.split_whitespace().collect();
    let parse_dim = |s: &str| -> Result<usize> {
        s.parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| err(dline, format!("invalid dimension '{s}'")))
    };
    if dims.len() != 2 {
        return Err(err(dline, "dimensions line must be 'rows cols'".into()));
    }
    let rows = parse_dim(dims[0])?;
    let cols = parse_dim(dims[1])?;

    let mut m = DenseMatrix::zeros(rows, cols);
    let mut count = 0usize;
    let mut last_line = dline;
    for (lno, l) in content {
        last_line = lno;
        if count == rows * cols {
            return Err(err(lno, format!("more than {} entries", rows * cols)));
        }
        let v: f64 = l
            .parse()
            .map_err(|_| err(lno, format!("cannot parse entry '{l}'")))?;
        if !v.is_finite() {
            return Err(err(lno, format!("non-finite entry '{l}'")));
        }
        m[(count % rows, count / rows)] = v;
        count += 1;
    }
    if count != rows * cols {
        return Err(err(
            last_line,
            format!("expected {} entries, found {count}", rows * cols),
        ));
    }
    Ok(m)
}

pub fn read_file(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_str(&text, &path.display().to_string())
}
