//! Pattern file grammar and table cell rendering.
//!
//! A pattern file holds one pattern per line as comma-separated unsigned
//! decimals. Lines whose first non-blank character is `#` are comments;
//! blank lines are skipped.

use thiserror::Error;

use crate::engine::Dataset;
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected {expected} values, found {found}")]
    Ragged { expected: usize, found: usize },
    #[error("negative value `{0}`")]
    Negative(String),
    #[error("not a decimal number: `{0}`")]
    NotNumeric(String),
    #[error("value `{0}` is not representable")]
    Unrepresentable(String),
    #[error("empty dataset")]
    EmptyDataset,
}

/// Positional parse failure. Line and column are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

fn is_decimal_literal(token: &str) -> bool {
    let (whole, frac) = match token.split_once('.') {
        Some((w, f)) => (w, Some(f)),
        None => (token, None),
    };
    let digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    match frac {
        None => !whole.is_empty() && digits(whole),
        Some(f) => (!whole.is_empty() || !f.is_empty()) && digits(whole) && digits(f),
    }
}

fn parse_token<S: Scalar>(token: &str) -> Result<S, ParseErrorKind> {
    if let Some(rest) = token.strip_prefix('-') {
        if is_decimal_literal(rest) {
            return Err(ParseErrorKind::Negative(token.to_string()));
        }
    }
    if !is_decimal_literal(token) {
        return Err(ParseErrorKind::NotNumeric(token.to_string()));
    }
    S::parse_decimal(token).ok_or_else(|| ParseErrorKind::Unrepresentable(token.to_string()))
}

/// Parses pattern-file text into a dataset.
pub fn parse_dataset<S: Scalar>(text: &str) -> Result<Dataset<S>, ParseError> {
    let mut rows: Vec<Vec<S>> = Vec::new();
    let mut line_count = 0;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        line_count = line_no;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        let mut offset = 0;
        for field in line.split(',') {
            let lead = field.len() - field.trim_start().len();
            let token = field.trim();
            let column = line[..offset + lead].chars().count() + 1;
            let value = parse_token(token).map_err(|kind| ParseError {
                line: line_no,
                column,
                kind,
            })?;
            row.push(value);
            offset += field.len() + 1;
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(ParseError {
                    line: line_no,
                    column: 1,
                    kind: ParseErrorKind::Ragged {
                        expected: first.len(),
                        found: row.len(),
                    },
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(ParseError {
            line: line_count.max(1),
            column: 1,
            kind: ParseErrorKind::EmptyDataset,
        });
    }
    // rows are validated above, so this cannot fail
    Ok(Dataset::from_rows(rows).expect("validated rows"))
}

/// Renders a dataset in the pattern-file grammar.
pub fn render_dataset<S: Scalar>(dataset: &Dataset<S>) -> String {
    let mut out = String::new();
    for p in dataset.patterns() {
        let fields: Vec<String> = p.inputs.iter().map(Scalar::render_decimal).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Truncates toward zero at three decimals and trims trailing zeros:
/// 8/3 -> "2.666", 5/2 -> "2.5", 3 -> "3".
pub fn render_cell(value: &Rational) -> String {
    let scaled = (*value.numer() as i128 * 1000) / *value.denom() as i128;
    let sign = if scaled < 0 { "-" } else { "" };
    let (whole, frac) = (scaled.abs() / 1000, scaled.abs() % 1000);
    if frac == 0 {
        format!("{sign}{whole}")
    } else {
        let frac = format!("{frac:03}");
        format!("{sign}{whole}.{}", frac.trim_end_matches('0'))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_truncate() {
        let r = Rational::new;
        assert_eq!(render_cell(&r(8, 3)), "2.666");
        assert_eq!(render_cell(&r(11, 3)), "3.666");
        assert_eq!(render_cell(&r(7, 3)), "2.333");
        assert_eq!(render_cell(&r(5, 2)), "2.5");
        assert_eq!(render_cell(&r(14, 5)), "2.8");
        assert_eq!(render_cell(&r(19, 5)), "3.8");
        assert_eq!(render_cell(&r(12, 5)), "2.4");
        assert_eq!(render_cell(&r(3, 1)), "3");
        assert_eq!(render_cell(&r(0, 1)), "0");
        assert_eq!(render_cell(&r(1, 2000)), "0");
        assert_eq!(render_cell(&r(-1, 2)), "-0.5");
    }

    #[test]
    fn parses_comments_blanks_and_spacing() {
        let ds: Dataset<f64> = parse_dataset("# header\n\n1, 1,0\n  # x\n0,.5 ,2.\n").unwrap();
        assert_eq!(ds.pattern_count(), 2);
        assert_eq!(ds.node_count(), 3);
        assert_eq!(ds.patterns()[1].inputs, vec![0.0, 0.5, 2.0]);
    }

    #[test]
    fn ragged_rows_report_the_short_line() {
        let err = parse_dataset::<f64>("1,1,0,0,1\n1,1,0,1\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(
            err.kind,
            ParseErrorKind::Ragged {
                expected: 5,
                found: 4
            }
        );
    }

    #[test]
    fn token_errors_are_positional() {
        let err = parse_dataset::<f64>("1,0\n1, -1\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 4));
        assert_eq!(err.kind, ParseErrorKind::Negative("-1".into()));

        let err = parse_dataset::<f64>("1,abc\n").unwrap_err();
        assert_eq!((err.line, err.column), (1, 3));
        assert!(matches!(err.kind, ParseErrorKind::NotNumeric(_)));

        for bad in ["1,", "1,,1", "1,.", "nan", "1e3", "+1"] {
            assert!(parse_dataset::<f64>(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn comments_only_is_empty() {
        let err = parse_dataset::<f64>("# a\n# b\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::EmptyDataset);
        assert_eq!(err.line, 2);
        assert_eq!(
            parse_dataset::<f64>("").unwrap_err().kind,
            ParseErrorKind::EmptyDataset
        );
    }

    #[test]
    fn exact_rationals_parse() {
        let ds: Dataset<Rational> = parse_dataset("0.25,1\n").unwrap();
        assert_eq!(ds.patterns()[0].inputs[0], Rational::new(1, 4));
    }
}
