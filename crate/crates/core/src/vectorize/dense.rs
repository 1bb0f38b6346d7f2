//! Dense matrix text format.
//!
//! ```text
//! dense <rows> <cols>
//! <v11> <v12> ... <v1c>
//! ...
//! ```
//!
//! Values are written with 17 significant digits, which reproduces every
//! `f64` exactly on reading.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub fn write_dense(m: &DMatrix<f64>) -> String {
    let mut out = String::with_capacity(16 + m.len() * 24);
    let _ = writeln!(out, "dense {} {}", m.nrows(), m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if c > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:.16e}", m[(r, c)]);
        }
        out.push('\n');
    }
    out
}

/// Parses one dense block from the front of `lines`, consuming exactly the
/// header and its rows.
pub fn parse_dense<'a, I: Iterator<Item = &'a str>>(lines: &mut I) -> Result<DMatrix<f64>> {
    let bad = |m: String| Error::format("dense matrix", m);
    let header = lines.next().ok_or_else(|| bad("missing header".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 || parts[0] != "dense" {
        return Err(bad(format!("bad header `{header}`")));
    }
    let rows: usize = parts[1].parse().map_err(|_| bad("bad row count".into()))?;
    let cols: usize = parts[2].parse().map_err(|_| bad("bad column count".into()))?;
    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let line = lines.next().ok_or_else(|| bad(format!("missing row {r}")))?;
        let before = data.len();
        for v in line.split_whitespace() {
            data.push(
                v.parse::<f64>()
                    .map_err(|_| bad(format!("bad value `{v}` in row {r}")))?,
            );
        }
        if data.len() - before != cols {
            return Err(bad(format!(
                "row {r} has {} values, expected {cols}",
                data.len() - before
            )));
        }
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

pub fn read_dense(path: &Path) -> Result<DMatrix<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dense(&mut text.lines())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn header_and_rows() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, -2.0, 0.0]);
        let text = write_dense(&m);
        assert!(text.starts_with("dense 2 2\n1.0000000000000000e0 5.0000000000000000e-1\n"));
        assert_eq!(parse_dense(&mut text.lines()).unwrap(), m);
    }

    #[test]
    fn zero_sized() {
        let m = DMatrix::<f64>::zeros(0, 3);
        assert_eq!(parse_dense(&mut write_dense(&m).lines()).unwrap(), m);
    }

    #[test]
    fn rejects_short_rows() {
        assert!(parse_dense(&mut "dense 1 2\n1.0\n".lines()).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(vals in proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO, 6)) {
            let m = DMatrix::from_row_slice(2, 3, &vals);
            let back = parse_dense(&mut write_dense(&m).lines()).unwrap();
            prop_assert!(m.iter().zip(back.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }
}
