//! `weight*NAME (+ weight*NAME)*` expressions over canonical box names.

use std::fmt;

use qcorr::BoxLabel;

/// Weights must sum to one within this tolerance.
pub const WEIGHT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ParseError {}

struct Cursor {
    chars: Vec<(usize, usize, char)>,
    pos: usize,
    end: (usize, usize),
}

impl Cursor {
    fn new(src: &str) -> Self {
        let mut chars = Vec::new();
        let (mut line, mut col) = (1, 1);
        for c in src.chars() {
            chars.push((line, col, c));
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        Self {
            chars,
            pos: 0,
            end: (line, col),
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.2)
    }

    fn here(&self) -> (usize, usize) {
        self.chars.get(self.pos).map_or(self.end, |c| (c.0, c.1))
    }

    fn error(&self, at: (usize, usize), message: impl Into<String>) -> ParseError {
        ParseError {
            line: at.0,
            column: at.1,
            message: message.into(),
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek().filter(|c| f(*c)) {
            out.push(c);
            self.pos += 1;
        }
        out
    }

    fn describe_next(&self) -> String {
        self.peek()
            .map_or("end of input".to_string(), |c| format!("'{c}'"))
    }
}

/// Parses an expression into `(label, weight)` terms.
pub fn parse_mixture(src: &str) -> Result<Vec<(BoxLabel, f64)>, ParseError> {
    let mut cur = Cursor::new(src);
    let mut terms = Vec::new();
    loop {
        cur.skip_ws();
        let at = cur.here();
        let number = cur.take_while(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '-'));
        if number.is_empty() {
            return Err(cur.error(
                at,
                format!("expected a weight, found {}", cur.describe_next()),
            ));
        }
        let weight: f64 = number
            .parse()
            .map_err(|_| cur.error(at, format!("invalid weight '{number}'")))?;
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(cur.error(at, format!("weight {weight} must be non-negative")));
        }
        cur.skip_ws();
        if cur.peek() != Some('*') {
            let at = cur.here();
            return Err(cur.error(at, format!("expected '*', found {}", cur.describe_next())));
        }
        cur.pos += 1;
        cur.skip_ws();
        let at = cur.here();
        let name = cur.take_while(|c| c.is_ascii_alphanumeric() || matches!(c, ':' | '_'));
        if name.is_empty() {
            return Err(cur.error(
                at,
                format!("expected a box name, found {}", cur.describe_next()),
            ));
        }
        let label: BoxLabel = name
            .parse()
            .map_err(|_| cur.error(at, format!("unknown box name '{name}'")))?;
        terms.push((label, weight));
        cur.skip_ws();
        match cur.peek() {
            None => break,
            Some('+') => cur.pos += 1,
            Some(c) => {
                let at = cur.here();
                return Err(cur.error(at, format!("expected '+' or end of input, found '{c}'")));
            }
        }
    }
    let total: f64 = terms.iter().map(|t| t.1).sum();
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(ParseError {
            line: 1,
            column: 1,
            message: format!("weights sum to {total}, expected 1 within {WEIGHT_TOL:e}"),
        });
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_terms() {
        let t = parse_mixture("0.334*P1 + 0.333*P3+0.333 * P4").unwrap();
        assert_eq!(
            t,
            vec![
                (BoxLabel::P1, 0.334),
                (BoxLabel::P3, 0.333),
                (BoxLabel::P4, 0.333)
            ]
        );
        assert_eq!(
            parse_mixture("1*P1:4").unwrap(),
            vec![(BoxLabel::P1to4, 1.0)]
        );
    }

    #[test]
    fn reports_positions() {
        let e = parse_mixture("0.5*P1+0.5P3").unwrap_err();
        assert_eq!((e.line, e.column), (1, 11));
        let e = parse_mixture("0.5*P1+0.5*Q3").unwrap_err();
        assert_eq!((e.line, e.column), (1, 12));
        assert!(e.message.contains("Q3"));
        let e = parse_mixture("0.5*P1+\n0.5*").unwrap_err();
        assert_eq!((e.line, e.column), (2, 5));
        let e = parse_mixture("0.5*P1 - 0.5*P2").unwrap_err();
        assert_eq!((e.line, e.column), (1, 8));
    }

    #[test]
    fn weights_must_sum_to_one() {
        assert!(parse_mixture("0.5*P1+0.4*P3")
            .unwrap_err()
            .message
            .contains("sum"));
        assert!(parse_mixture("0.5*P1+0.5000000001*P3").is_ok());
    }
}
