//! The instance text format.
//!
//! ```text
//! # comment lines start with '#'; blank lines are ignored
//! m n
//! <m lines of n whitespace separated 0/1 tokens>
//! ```
//!
//! Rows are customer orders (nets), columns are products (gates).

use std::fmt::Write as _;
use std::path::Path;

use colperm_core::{BinaryMatrix, Instance};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("line {line}: malformed header, expected `m n`")]
    Header { line: usize },
    #[error("line {line}: {got} tokens, expected {expected}")]
    RowLength { line: usize, got: usize, expected: usize },
    #[error("line {line}: token `{token}` is not 0 or 1")]
    Token { line: usize, token: String },
    #[error("line {line}: input ends after {got} of {expected} rows")]
    MissingRows { line: usize, got: usize, expected: usize },
    #[error("line {line}: unexpected data after the last row")]
    Trailing { line: usize },
}

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_matrix(text: &str) -> Result<BinaryMatrix, ParseError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(ParseError::Empty)?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| ParseError::Header { line: hline })?;
    let [rows, cols] = dims[..] else {
        return Err(ParseError::Header { line: hline });
    };

    let mut cells = Vec::with_capacity(rows * cols);
    let mut last_line = hline;
    for got in 0..rows {
        let Some((line, text)) = lines.next() else {
            return Err(ParseError::MissingRows {
                line: last_line + 1,
                got,
                expected: rows,
            });
        };
        last_line = line;
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != cols {
            return Err(ParseError::RowLength {
                line,
                got: tokens.len(),
                expected: cols,
            });
        }
        for t in tokens {
            cells.push(match t {
                "0" => false,
                "1" => true,
                _ => {
                    return Err(ParseError::Token {
                        line,
                        token: t.to_owned(),
                    })
                }
            });
        }
    }
    if let Some((line, _)) = lines.next() {
        return Err(ParseError::Trailing { line });
    }
    Ok(BinaryMatrix::from_cells(rows, cols, cells).expect("shape checked while parsing"))
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    parse_matrix(text).map(|m| Instance::preprocess(&m))
}

pub fn render_matrix(m: &BinaryMatrix) -> String {
    let mut out = String::with_capacity(m.rows() * (2 * m.cols() + 1) + 16);
    writeln!(out, "{} {}", m.rows(), m.cols()).unwrap();
    for i in 0..m.rows() {
        let row: Vec<&str> = m.row(i).iter().map(|&c| if c { "1" } else { "0" }).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn render_instance(inst: &Instance) -> String {
    render_matrix(&inst.to_matrix())
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance, FileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text).map_err(|source| FileError::Parse {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use colperm_core::fixtures::example_instance;
    use proptest::prelude::*;

    const EXAMPLE: &str = "# 6x6 example\n6 6\n1 1 0 0 0 0\n1 0 1 0 0 0\n0 0 0 1 1 0\n\
                          0 0 0 1 0 1\n0 1 0 0 1 0\n0 0 1 0 0 1\n";

    #[test]
    fn example6() {
        let inst = parse_instance(EXAMPLE).unwrap();
        assert_eq!(inst, example_instance());
        assert_eq!(inst.col_rows(0), &[0, 1]);
        assert_eq!(inst.col_rows(4), &[2, 4]);
    }

    #[test]
    fn smallest() {
        let inst = parse_instance("1 1\n1\n").unwrap();
        assert_eq!((inst.rows(), inst.cols(), inst.nonzeros()), (1, 1, 1));
        assert_eq!(inst.singleton_rows(), &[(0, 0)]);
    }

    #[test]
    fn errors() {
        assert_eq!(
            parse_instance("2 2\n1 0\n1\n"),
            Err(ParseError::RowLength {
                line: 3,
                got: 1,
                expected: 2
            })
        );
        assert_eq!(parse_instance(""), Err(ParseError::Empty));
        assert_eq!(parse_instance("# only\n"), Err(ParseError::Empty));
        assert_eq!(parse_instance("2\n"), Err(ParseError::Header { line: 1 }));
        assert_eq!(parse_instance("a b\n"), Err(ParseError::Header { line: 1 }));
        assert_eq!(
            parse_instance("1 2\n1 2\n"),
            Err(ParseError::Token {
                line: 2,
                token: "2".into()
            })
        );
        assert_eq!(
            parse_instance("3 1\n1\n0\n"),
            Err(ParseError::MissingRows {
                line: 4,
                got: 2,
                expected: 3
            })
        );
        assert_eq!(parse_instance("1 1\n1\n0\n"), Err(ParseError::Trailing { line: 3 }));
        let msg = parse_instance("2 2\n1 0\n1\n").unwrap_err().to_string();
        assert!(msg.starts_with("line 3"), "{msg}");
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            read_instance("/nonexistent/instance.txt"),
            Err(FileError::Io { .. })
        ));
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(m in 1usize..12, n in 1usize..12, d in 0.0f64..1.0, seed: u64) {
            let inst = Instance::generate(m, n, d, seed);
            prop_assert_eq!(parse_instance(&render_instance(&inst)).unwrap(), inst);
        }
    }
}
