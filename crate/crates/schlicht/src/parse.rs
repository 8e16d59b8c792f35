//! Text parsers for the command-line surface: complex literals in `a+bi`
//! form, functional specifications, and comma-separated value lists.
//!
//! These parsers handle untrusted input and must never panic; they are the
//! entry points exercised by the fuzz targets.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functional::LinearFunctional;

/// Parses a complex literal: `2`, `-1.5`, `2i`, `-i`, `1+2i`, `3e-2-0.5i`.
///
/// Whitespace is ignored. The imaginary part, when present, must follow the
/// real part. Non-finite values are rejected.
pub fn parse_complex(input: &str) -> Result<Complex64> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty complex literal".into()));
    }

    // Split before a sign that is not leading and not an exponent sign.
    let bytes = s.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let c = bytes[k];
        if (c == b'+' || c == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }

    match split {
        Some(k) => {
            let (first, second) = (&s[..k], &s[k..]);
            let re = parse_part(first)?;
            let im = parse_part(second)?;
            match (re, im) {
                (Part::Real(re), Part::Imag(im)) => finite(Complex64::new(re, im)),
                (Part::Real(_), Part::Real(_)) => {
                    Err(Error::Parse(format!("'{input}': second term must be imaginary")))
                }
                (Part::Imag(_), _) => {
                    Err(Error::Parse(format!("'{input}': imaginary part must come last")))
                }
            }
        }
        None => match parse_part(&s)? {
            Part::Real(re) => finite(Complex64::new(re, 0.0)),
            Part::Imag(im) => finite(Complex64::new(0.0, im)),
        },
    }
}

enum Part {
    Real(f64),
    Imag(f64),
}

fn parse_part(s: &str) -> Result<Part> {
    if let Some(num) = s.strip_suffix(['i', 'I']) {
        let v = match num {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => parse_real(num)?,
        };
        Ok(Part::Imag(v))
    } else {
        Ok(Part::Real(parse_real(s)?))
    }
}

fn parse_real(s: &str) -> Result<f64> {
    // Rust's f64 parser accepts "inf" and "NaN" spellings; reject them
    // along with anything non-numeric.
    if s.chars().any(|c| c.is_alphabetic() && !matches!(c, 'e' | 'E')) {
        return Err(Error::Parse(format!("'{s}' is not a number")));
    }
    s.parse::<f64>().map_err(|_| Error::Parse(format!("'{s}' is not a number")))
}

fn finite(v: Complex64) -> Result<Complex64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse("complex literal overflows to infinity".into()))
    }
}

/// Canonical `a+bi` rendering that `parse_complex` round-trips exactly.
pub fn format_complex(v: Complex64) -> String {
    if v.im == 0.0 {
        format!("{:?}", v.re)
    } else if v.re == 0.0 {
        format!("{:?}i", v.im)
    } else if v.im < 0.0 {
        format!("{:?}-{:?}i", v.re, -v.im)
    } else {
        format!("{:?}+{:?}i", v.re, v.im)
    }
}

/// Parses a functional specification:
///
/// * `a<j>` — the coefficient functional of z^j;
/// * `point:<complex>` — evaluation at a point of the open disk;
/// * `<complex>*a<j>[,<complex>*a<j>...]` — a weighted combination.
pub fn parse_functional(input: &str) -> Result<LinearFunctional> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(point) = s.strip_prefix("point:") {
        let z = parse_complex(point)?;
        let l = LinearFunctional::PointEvaluation(z);
        l.validate()?;
        return Ok(l);
    }
    if !s.contains('*') {
        let j = parse_coefficient_index(&s)?;
        return Ok(LinearFunctional::CoefficientIndex(j));
    }
    let mut terms = Vec::new();
    for term in s.split(',') {
        let (weight, index) = term
            .split_once('*')
            .ok_or_else(|| Error::Parse(format!("term '{term}' must look like w*aj")))?;
        terms.push((parse_coefficient_index(index)?, parse_complex(weight)?));
    }
    let l = LinearFunctional::FiniteCombination(terms);
    l.validate()?;
    Ok(l)
}

fn parse_coefficient_index(s: &str) -> Result<usize> {
    let digits = s
        .strip_prefix('a')
        .ok_or_else(|| Error::Parse(format!("'{s}' is not a coefficient spec like a2")))?;
    let j: usize = digits
        .parse()
        .map_err(|_| Error::Parse(format!("'{digits}' is not a coefficient index")))?;
    if j > 64 {
        return Err(Error::Parse(format!("coefficient index {j} is unreasonably large")));
    }
    Ok(j)
}

/// Comma-separated list of positive finite reals, e.g. report times.
pub fn parse_positive_list(input: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in input.split(',') {
        let t: f64 = part
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("'{part}' is not a number")))?;
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::Parse(format!("value {t} must be positive and finite")));
        }
        out.push(t);
    }
    if out.is_empty() {
        return Err(Error::Parse("empty list".into()));
    }
    Ok(out)
}

/// Comma-separated list of complex literals (polynomial coefficients).
pub fn parse_complex_list(input: &str) -> Result<Vec<Complex64>> {
    input.split(',').map(parse_complex).collect()
}
