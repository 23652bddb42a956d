//! Matrix file formats.
//!
//! Text: a header line `n m`, then `n` lines of `m` whitespace-separated
//! decimals. Lines starting with `#` are comments and may appear anywhere.
//! The writer uses 17 significant digits so values round-trip exactly.
//!
//! JSON: `{"rows": n, "cols": m, "data": [row-major numbers]}`.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

pub fn parse_text(s: &str) -> Result<DenseMatrix> {
    let mut lines = s
        .lines()
        .map(str::trim)
        .enumerate()
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(Error::Parse(format!("bad header {header:?}, expected \"n m\"")));
    }
    let parse_dim = |t: &str| {
        t.parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad dimension {t:?}")))
    };
    let rows = parse_dim(dims[0])?;
    let cols = parse_dim(dims[1])?;
    if rows == 0 || cols == 0 {
        return Err(Error::Parse("dimensions must be positive".into()));
    }

    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (lineno, line) = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("expected {rows} rows, found {r}")))?;
        let before = data.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad number {tok:?}", lineno + 1)))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("line {}: non-finite entry", lineno + 1)));
            }
            data.push(v);
        }
        if data.len() - before != cols {
            return Err(Error::Parse(format!(
                "line {}: expected {cols} entries, found {}",
                lineno + 1,
                data.len() - before
            )));
        }
    }
    if let Some((lineno, _)) = lines.next() {
        return Err(Error::Parse(format!("line {}: trailing data", lineno + 1)));
    }
    DenseMatrix::from_row_major(rows, cols, data)
}

pub fn format_text(m: &DenseMatrix) -> String {
    let mut s = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{x:.16e}")).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

#[derive(Serialize, Deserialize)]
struct JsonMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

pub fn parse_json(s: &str) -> Result<DenseMatrix> {
    let j: JsonMatrix = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    if j.rows == 0 || j.cols == 0 {
        return Err(Error::Parse("dimensions must be positive".into()));
    }
    DenseMatrix::from_row_major(j.rows, j.cols, j.data).map_err(|e| match e {
        Error::NonFinite { .. } | Error::DimensionMismatch(_) => Error::Parse(e.to_string()),
        other => other,
    })
}

pub fn format_json(m: &DenseMatrix) -> String {
    serde_json::to_string(&JsonMatrix {
        rows: m.rows(),
        cols: m.cols(),
        data: m.as_slice().to_vec(),
    })
    .expect("finite matrix serialises")
}

/// Picks the format from the content: JSON if it starts with `{`.
pub fn parse_auto(s: &str) -> Result<DenseMatrix> {
    if s.trim_start().starts_with('{') {
        parse_json(s)
    } else {
        parse_text(s)
    }
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let s = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_auto(&s)
}

/// Writes JSON when the extension is `.json`, text otherwise.
pub fn write_matrix(path: &Path, m: &DenseMatrix) -> std::io::Result<()> {
    let body = if path.extension().is_some_and(|e| e == "json") {
        format_json(m)
    } else {
        format_text(m)
    };
    std::fs::write(path, body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_text_with_comments() {
        let m = parse_text("# comment\n2 3\n1 2 3\n# mid\n4 5 6.5\n").unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m[(1, 2)], 6.5);
    }

    #[test]
    fn rejects_bad_text() {
        assert!(matches!(parse_text("2 2\n1 2\n3\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_text("2 2\n1 2\n3 NaN\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_text("1 1\n1\n2\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_text(""), Err(Error::Parse(_))));
    }

    #[test]
    fn json_shape_checked() {
        let m = parse_json(r#"{"rows":2,"cols":1,"data":[1,2]}"#).unwrap();
        assert_eq!(m.column(0), vec![1.0, 2.0]);
        assert!(parse_json(r#"{"rows":2,"cols":2,"data":[1,2]}"#).is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip_is_bit_exact(
            rows in 1usize..5,
            cols in 1usize..5,
            seed in proptest::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 25)
        ) {
            let m = DenseMatrix::from_fn(rows, cols, |i, j| seed[i * 5 + j]);
            let back = parse_text(&format_text(&m)).unwrap();
            for (a, b) in m.as_slice().iter().zip(back.as_slice()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
            let back = parse_json(&format_json(&m)).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
