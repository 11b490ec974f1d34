//! MatrixMarket coordinate format.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    General,
    /// Only the lower triangle is written; the reader mirrors it.
    Symmetric,
}

/// Writes `a` as `matrix coordinate real` with 1-based indices.
pub fn write_matrix_market<T: Scalar, W: Write>(
    a: &CsrMatrix<T>,
    symmetry: Symmetry,
    out: &mut W,
) -> std::io::Result<()> {
    let tag = match symmetry {
        Symmetry::General => "general",
        Symmetry::Symmetric => "symmetric",
    };
    let keep = |i: usize, j: usize| symmetry == Symmetry::General || j <= i;
    let nnz = (0..a.n_rows())
        .map(|i| a.row(i).0.iter().filter(|&&j| keep(i, j)).count())
        .sum::<usize>();
    writeln!(out, "%%MatrixMarket matrix coordinate real {tag}")?;
    writeln!(out, "{} {} {}", a.n_rows(), a.n_cols(), nnz)?;
    for i in 0..a.n_rows() {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if keep(i, j) {
                writeln!(out, "{} {} {:e}", i + 1, j + 1, v.as_f64())?;
            }
        }
    }
    Ok(())
}

/// Writes a vector as an `n x 1` general coordinate matrix (nonzeros only).
pub fn write_vector_market<T: Scalar, W: Write>(v: &[T], out: &mut W) -> std::io::Result<()> {
    let nnz = v.iter().filter(|x| **x != T::zero()).count();
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} 1 {}", v.len(), nnz)?;
    for (i, &x) in v.iter().enumerate() {
        if x != T::zero() {
            writeln!(out, "{} 1 {:e}", i + 1, x.as_f64())?;
        }
    }
    Ok(())
}

/// Reads a `matrix coordinate real` file (general or symmetric).
pub fn read_matrix_market<R: BufRead>(input: R) -> Result<CsrMatrix<f64>> {
    let mut lines = input.lines().enumerate();
    let err = |line: usize, message: &str| Error::MatrixMarket {
        line: line + 1,
        message: message.to_string(),
    };
    let io_err = |e: std::io::Error| Error::io("<matrix market input>", e);

    let (no, header) = lines.next().ok_or_else(|| err(0, "empty input"))?;
    let header = header.map_err(io_err)?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(err(no, "missing %%MatrixMarket matrix header"));
    }
    if tokens[2] != "coordinate" {
        return Err(err(no, "only coordinate format is supported"));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(err(no, "only real or integer fields are supported"));
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        _ => return Err(err(no, "only general or symmetric matrices are supported")),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (no, line) in lines {
        let line = line.map_err(io_err)?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(err(no, "size line needs rows, columns, entries"));
                }
                let parse = |s: &str| s.parse::<usize>().map_err(|_| err(no, "bad size field"));
                let dims = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
                triplets.reserve(if symmetric { 2 * dims.2 } else { dims.2 });
                size = Some(dims);
            }
            Some((rows, cols, _)) => {
                if fields.len() != 3 {
                    return Err(err(no, "entry needs row, column, value"));
                }
                let i: usize = fields[0].parse().map_err(|_| err(no, "bad row index"))?;
                let j: usize = fields[1].parse().map_err(|_| err(no, "bad column index"))?;
                let v: f64 = fields[2].parse().map_err(|_| err(no, "bad value"))?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(err(no, "index out of range"));
                }
                triplets.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    triplets.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| err(0, "missing size line"))?;
    let stored = if symmetric {
        triplets.iter().filter(|(i, j, _)| j <= i).count()
    } else {
        triplets.len()
    };
    if stored != nnz {
        return Err(err(0, &format!("expected {nnz} entries, found {stored}")));
    }
    CsrMatrix::from_triplets(rows, cols, triplets)
}
