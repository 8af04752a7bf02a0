//! Plain-text matrix format.
//!
//! ```text
//! 2 4
//! 5 4 7 6
//! 3 2 1 0
//! ```
//!
//! The first line holds `m n`, followed by `m` lines of `n` decimal values.
//! Fields are separated by one space and every line ends with `\n`.

use std::fmt::Write as _;

use thiserror::Error;
use zerodisc_core::grid::{Board, GridError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{0}")]
    Board(#[from] GridError),
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> MatrixError {
    MatrixError::Parse { line, column, message: message.into() }
}

pub fn write_matrix(board: &Board) -> String {
    let mut out = String::with_capacity(board.cells().len() * 4 + 16);
    writeln!(out, "{} {}", board.rows(), board.cols()).unwrap();
    for i in 0..board.rows() {
        for (j, v) in board.row(i).iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Splits a line into `(column, token)` pairs, columns 1-based.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let skip = rest.len() - rest.trim_start_matches([' ', '\t', '\r']).len();
        offset += skip;
        rest = &rest[skip..];
        if rest.is_empty() {
            return None;
        }
        let end = rest.find([' ', '\t', '\r']).unwrap_or(rest.len());
        let tok = &rest[..end];
        let col = offset + 1;
        offset += end;
        rest = &rest[end..];
        Some((col, tok))
    })
}

fn number<T: std::str::FromStr>(line: usize, (column, tok): (usize, &str)) -> Result<T, MatrixError> {
    if !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(parse_err(line, column, format!("expected a decimal number, found {tok:?}")));
    }
    tok.parse()
        .map_err(|_| parse_err(line, column, format!("number {tok} out of range")))
}

pub fn read_matrix(text: &str) -> Result<Board, MatrixError> {
    let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));

    let (hline, header) = lines.next().unwrap_or((1, ""));
    let mut head = tokens(header);
    let m: usize = number(hline, head.next().ok_or_else(|| parse_err(hline, 1, "missing row count"))?)?;
    let n: usize = number(
        hline,
        head.next().ok_or_else(|| parse_err(hline, header.len() + 1, "missing column count"))?,
    )?;
    if let Some((col, _)) = head.next() {
        return Err(parse_err(hline, col, "unexpected token after dimensions"));
    }
    if m == 0 || n == 0 {
        return Err(parse_err(hline, 1, "dimensions must be positive"));
    }

    let mut values = Vec::with_capacity(m.saturating_mul(n).min(1 << 24));
    for r in 0..m {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| parse_err(hline + r + 1, 1, format!("expected {m} rows, found {r}")))?;
        let mut count = 0;
        for tok in tokens(line) {
            if count == n {
                return Err(parse_err(lno, tok.0, format!("row has more than {n} values")));
            }
            values.push(number::<u32>(lno, tok)?);
            count += 1;
        }
        if count != n {
            return Err(parse_err(lno, line.len() + 1, format!("row has {count} values, expected {n}")));
        }
    }
    for (lno, line) in lines {
        if let Some((col, _)) = tokens(line).next() {
            return Err(parse_err(lno, col, "unexpected content after the last row"));
        }
    }
    Ok(Board::new(m, n, values)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use zerodisc_core::grid::PermutationDefect;

    #[test]
    fn write_examples() {
        assert_eq!(write_matrix(&Board::row_major(1, 1).unwrap()), "1 1\n0\n");
        let b = Board::from_rows(&[[5, 4, 7, 6], [3, 2, 1, 0]]).unwrap();
        assert_eq!(write_matrix(&b), "2 4\n5 4 7 6\n3 2 1 0\n");
    }

    #[test]
    fn read_examples() {
        let b = read_matrix("2 4\n5 4 7 6\n3 2 1 0\n").unwrap();
        assert_eq!(b, Board::from_rows(&[[5, 4, 7, 6], [3, 2, 1, 0]]).unwrap());
        assert_eq!(
            read_matrix("2 2\n0 1\n1 2\n"),
            Err(MatrixError::Board(GridError::NotAPermutation {
                index: 2,
                value: 1,
                reason: PermutationDefect::Duplicate
            }))
        );
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(
            read_matrix("2 2\n0 1\n2 x\n"),
            Err(parse_err(3, 3, "expected a decimal number, found \"x\""))
        );
        assert!(matches!(read_matrix("2 2\n0 1\n"), Err(MatrixError::Parse { line: 3, .. })));
        assert!(matches!(read_matrix("2 2\n0 1 2\n3\n"), Err(MatrixError::Parse { line: 2, column: 5, .. })));
        assert!(matches!(read_matrix("1 1\n0\n5\n"), Err(MatrixError::Parse { line: 3, column: 1, .. })));
        assert!(matches!(read_matrix(""), Err(MatrixError::Parse { line: 1, .. })));
        assert!(matches!(read_matrix("0 3\n"), Err(MatrixError::Parse { .. })));
        assert!(matches!(read_matrix("1 2 3\n"), Err(MatrixError::Parse { line: 1, column: 5, .. })));
    }

    #[test]
    fn tolerates_missing_final_newline_and_crlf() {
        assert!(read_matrix("1 2\n1 0").is_ok());
        assert!(read_matrix("1 2\r\n1 0\r\n").is_ok());
    }
}
