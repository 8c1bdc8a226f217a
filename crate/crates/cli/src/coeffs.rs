//! Coefficient files: one `re im` pair per line, constant term first.

use std::fmt;

use cmvroots::poly::Polynomial;
use cmvroots::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub enum ParseError {
    /// 1-based line number and what was wrong with it.
    Line { line: usize, message: String },
    /// The coefficients parsed but do not form a valid polynomial.
    Polynomial(cmvroots::Error),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Line { line, message } => write!(f, "line {line}: {message}"),
            ParseError::Polynomial(e) => write!(f, "invalid polynomial: {e}"),
        }
    }
}

impl std::error::Error for ParseError {}

/// Parses the text format. Blank lines and lines starting with `#` are skipped.
pub fn parse_coefficients(text: &str) -> Result<Polynomial, ParseError> {
    let mut coeffs = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| ParseError::Line { line: k + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(bad(format!("expected two numbers \"re im\", found {} fields", fields.len())));
        }
        let mut parts = [0.0f64; 2];
        for (slot, field) in parts.iter_mut().zip(&fields) {
            *slot = field.parse().map_err(|_| bad(format!("not a number: {field:?}")))?;
            if !slot.is_finite() {
                return Err(bad(format!("not finite: {field:?}")));
            }
        }
        coeffs.push(Complex64::new(parts[0], parts[1]));
    }
    Polynomial::new(coeffs).map_err(ParseError::Polynomial)
}

/// Inverse of [`parse_coefficients`], at full precision.
pub fn format_coefficients(p: &Polynomial) -> String {
    p.coeffs().iter().map(|c| format!("{} {}\n", crate::output::num(c.re), crate::output::num(c.im))).collect()
}
