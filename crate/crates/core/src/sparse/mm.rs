//! Matrix Market reading and writing.
//!
//! Supported inputs are `matrix coordinate real {general|symmetric}` and
//! `matrix array real general`. Indices in files are 1-based; floats are
//! written with 17 significant digits so values survive a round trip.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, DenseMatrix};

/// A matrix loaded from (or destined for) a Matrix Market file.
#[derive(Debug, Clone, PartialEq)]
pub enum MmMatrix {
    Sparse(CsrMatrix),
    Dense(DenseMatrix),
}

impl MmMatrix {
    pub fn nrows(&self) -> usize {
        match self {
            MmMatrix::Sparse(m) => m.nrows(),
            MmMatrix::Dense(m) => m.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            MmMatrix::Sparse(m) => m.ncols(),
            MmMatrix::Dense(m) => m.ncols(),
        }
    }

    /// Sparse view; dense input is converted (exact zeros dropped).
    pub fn into_csr(self) -> CsrMatrix {
        match self {
            MmMatrix::Sparse(m) => m,
            MmMatrix::Dense(m) => CsrMatrix::from_dense(&m),
        }
    }

    pub fn into_dense(self) -> DenseMatrix {
        match self {
            MmMatrix::Sparse(m) => m.to_dense(),
            MmMatrix::Dense(m) => m,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_banner(line_no: usize, line: &str) -> Result<(Layout, Symmetry)> {
    let tokens: Vec<String> = line.split_whitespace().map(|t| t.to_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(parse_err(line_no, "malformed Matrix Market banner"));
    }
    if tokens[1] != "matrix" {
        return Err(parse_err(
            line_no,
            format!("unsupported object '{}'", tokens[1]),
        ));
    }
    let layout = match tokens[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(parse_err(line_no, format!("unsupported format '{other}'"))),
    };
    if tokens[3] != "real" {
        return Err(parse_err(
            line_no,
            format!("unsupported field '{}' (only real is accepted)", tokens[3]),
        ));
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" if layout == Layout::Coordinate => Symmetry::Symmetric,
        other => {
            return Err(parse_err(
                line_no,
                format!("unsupported symmetry '{other}' for this format"),
            ))
        }
    };
    Ok((layout, symmetry))
}

fn parse_usize(line_no: usize, tok: Option<&str>, what: &str) -> Result<usize> {
    tok.ok_or_else(|| parse_err(line_no, format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(line_no, format!("invalid {what}")))
}

fn parse_f64(line_no: usize, tok: Option<&str>) -> Result<f64> {
    let v: f64 = tok
        .ok_or_else(|| parse_err(line_no, "missing value"))?
        .parse()
        .map_err(|_| parse_err(line_no, "invalid real value"))?;
    if !v.is_finite() {
        return Err(parse_err(line_no, "non-finite value"));
    }
    Ok(v)
}

/// Parses Matrix Market text from any reader.
pub fn read_from<R: Read>(reader: R) -> Result<MmMatrix> {
    let mut lines = BufReader::new(reader).lines().enumerate();
    let (banner_no, banner) = match lines.next() {
        Some((i, l)) => (i + 1, l?),
        None => return Err(parse_err(1, "empty file")),
    };
    let (layout, symmetry) = parse_banner(banner_no, &banner)?;

    let mut data = Vec::new();
    for (i, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        data.push((i + 1, trimmed.to_string()));
    }
    let mut data = data.into_iter();
    let (size_no, size_line) = data
        .next()
        .ok_or_else(|| parse_err(banner_no + 1, "missing size line"))?;
    let mut toks = size_line.split_whitespace();
    let nrows = parse_usize(size_no, toks.next(), "row count")?;
    let ncols = parse_usize(size_no, toks.next(), "column count")?;

    match layout {
        Layout::Coordinate => {
            let nnz = parse_usize(size_no, toks.next(), "entry count")?;
            if toks.next().is_some() {
                return Err(parse_err(size_no, "trailing tokens on size line"));
            }
            if symmetry == Symmetry::Symmetric && nrows != ncols {
                return Err(parse_err(size_no, "symmetric matrix must be square"));
            }
            let mut triplets = Vec::with_capacity(nnz * 2);
            let mut seen = 0usize;
            for (no, line) in data {
                if seen == nnz {
                    return Err(parse_err(no, "more entries than declared"));
                }
                let mut t = line.split_whitespace();
                let r = parse_usize(no, t.next(), "row index")?;
                let c = parse_usize(no, t.next(), "column index")?;
                let v = parse_f64(no, t.next())?;
                if t.next().is_some() {
                    return Err(parse_err(no, "trailing tokens in entry"));
                }
                if r == 0 || c == 0 || r > nrows || c > ncols {
                    return Err(parse_err(no, format!("index ({r}, {c}) out of range")));
                }
                if symmetry == Symmetry::Symmetric && c > r {
                    return Err(parse_err(
                        no,
                        "symmetric file lists an upper-triangular entry",
                    ));
                }
                triplets.push((r - 1, c - 1, v));
                if symmetry == Symmetry::Symmetric && r != c {
                    triplets.push((c - 1, r - 1, v));
                }
                seen += 1;
            }
            if seen != nnz {
                return Err(parse_err(
                    size_no,
                    format!("declared {nnz} entries, found {seen}"),
                ));
            }
            Ok(MmMatrix::Sparse(CsrMatrix::from_triplets(
                nrows, ncols, &triplets,
            )?))
        }
        Layout::Array => {
            if toks.next().is_some() {
                return Err(parse_err(size_no, "trailing tokens on size line"));
            }
            let total = nrows * ncols;
            let mut values = Vec::with_capacity(total);
            for (no, line) in data {
                for tok in line.split_whitespace() {
                    if values.len() == total {
                        return Err(parse_err(no, "more values than declared"));
                    }
                    values.push(parse_f64(no, Some(tok))?);
                }
            }
            if values.len() != total {
                return Err(parse_err(
                    size_no,
                    format!("declared {total} values, found {}", values.len()),
                ));
            }
            Ok(MmMatrix::Dense(DenseMatrix::new(nrows, ncols, values)?))
        }
    }
}

/// Reads a Matrix Market file.
pub fn mm_read(path: impl AsRef<Path>) -> Result<MmMatrix> {
    read_from(File::open(path)?)
}

fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a sparse matrix in coordinate format.
pub fn write_coordinate<W: Write>(m: &CsrMatrix, mut w: W) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::InvalidInput("cannot write non-finite values".into()));
    }
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for i in 0..m.nrows() {
        let (cols, vals) = m.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            writeln!(w, "{} {} {}", i + 1, c + 1, fmt_real(v))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes a dense matrix in array format (column-major).
pub fn write_array<W: Write>(m: &DenseMatrix, mut w: W) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::InvalidInput("cannot write non-finite values".into()));
    }
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} {}", m.nrows(), m.ncols())?;
    for v in m.values() {
        writeln!(w, "{}", fmt_real(*v))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a matrix to `path`: sparse as coordinate, dense as array.
pub fn mm_write(m: &MmMatrix, path: impl AsRef<Path>) -> Result<()> {
    let w = BufWriter::new(File::create(path)?);
    match m {
        MmMatrix::Sparse(s) => write_coordinate(s, w),
        MmMatrix::Dense(d) => write_array(d, w),
    }
}

/// Writes a vector as an n×1 array file.
pub fn write_vector(v: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let d = DenseMatrix::new(v.len(), 1, v.to_vec())?;
    mm_write(&MmMatrix::Dense(d), path)
}

/// Reads a vector stored as an n×1 (or 1×n) array or coordinate file.
pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let m = mm_read(path)?.into_dense();
    if m.ncols() != 1 && m.nrows() != 1 {
        return Err(Error::InvalidInput(format!(
            "expected a vector, found a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.values().to_vec())
}
