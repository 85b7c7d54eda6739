//! Text input: coefficient lists, polynomial expressions and curve shorthand.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use padic_chabauty_core::expectation::BigRational;
use padic_chabauty_core::Padic;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError(msg.into()))
}

pub fn parse_int(s: &str) -> Result<BigInt, ParseError> {
    let t = s.trim();
    t.parse::<BigInt>().or_else(|_| err(format!("`{t}` is not an integer")))
}

/// `a` or `a/b` in decimal.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseError> {
    let t = s.trim();
    match t.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(t)?)),
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return err(format!("`{t}` has a zero denominator"));
            }
            Ok(BigRational::new(parse_int(n)?, d))
        }
    }
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect()
}

pub fn parse_int_list(s: &str) -> Result<Vec<BigInt>, ParseError> {
    split_list(s).into_iter().map(parse_int).collect()
}

pub fn parse_rational_list(s: &str) -> Result<Vec<BigRational>, ParseError> {
    split_list(s).into_iter().map(parse_rational).collect()
}

/// A rational as a `p`-adic number with absolute precision `prec`.
pub fn to_padic(p: u64, r: &BigRational, prec: i64) -> Result<Padic, ParseError> {
    Padic::new(p, r.numer(), r.denom(), prec).or_else(|e| err(format!("cannot read {r} as a {p}-adic number: {e}")))
}

/// Integer polynomial in `var`, e.g. `x7+x+1` or `3x^2 - 2*x`.
/// Coefficients are returned in increasing degree.
pub fn parse_poly(s: &str, var: char) -> Result<Vec<BigInt>, ParseError> {
    let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if src.is_empty() {
        return err("empty polynomial");
    }
    let mut coeffs: Vec<BigInt> = Vec::new();
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, c) in src.char_indices() {
        if (c == '+' || c == '-') && i > 0 && !src[..i].ends_with('^') {
            terms.push(&src[start..i]);
            start = i;
        }
    }
    terms.push(&src[start..]);
    for term in terms {
        let (sign, body) = match term.as_bytes().first() {
            Some(b'-') => (-1, &term[1..]),
            Some(b'+') => (1, &term[1..]),
            _ => (1, term),
        };
        if body.is_empty() {
            return err(format!("dangling sign in `{s}`"));
        }
        let (coef, exp) = match body.find(var) {
            None => (parse_int(body)?, 0usize),
            Some(at) => {
                let c = body[..at].trim_end_matches('*');
                let c = if c.is_empty() { BigInt::one() } else { parse_int(c)? };
                let e = body[at + var.len_utf8()..].trim_start_matches('^');
                let e = if e.is_empty() {
                    1
                } else {
                    e.parse::<usize>().or_else(|_| err(format!("bad exponent in `{term}`")))?
                };
                (c, e)
            }
        };
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, BigInt::zero());
        }
        coeffs[exp] += coef * sign;
    }
    while coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
    Ok(coeffs)
}

/// `y2 + q(x)y = r(x)` shorthand: `y2+y=x7+x+1`, `y^2 = x^5 + 1`,
/// `y2+(x+1)y=x5+x`, `y2 + x*y = x^5 + 1`. Returns `(q, r)`.
pub fn parse_curve(s: &str) -> Result<(Vec<BigInt>, Vec<BigInt>), ParseError> {
    let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some((lhs, rhs)) = src.split_once('=') else {
        return err(format!("`{s}`: expected `y2 + q(x)y = r(x)`"));
    };
    let rest = lhs
        .strip_prefix("y^2")
        .or_else(|| lhs.strip_prefix("y2"))
        .ok_or_else(|| ParseError(format!("`{s}`: left side must start with y2")))?;
    let q = if rest.is_empty() {
        Vec::new()
    } else {
        let body = rest
            .strip_prefix('+')
            .and_then(|b| b.strip_suffix('y'))
            .ok_or_else(|| ParseError(format!("`{s}`: left side must read y2 + q(x)y")))?;
        let body = body.trim_end_matches('*');
        if body.is_empty() {
            vec![BigInt::one()]
        } else if let Some(inner) = body.strip_prefix('(').and_then(|b| b.strip_suffix(')')) {
            parse_poly(inner, 'x')?
        } else {
            parse_poly(body, 'x')?
        }
    };
    Ok((q, parse_poly(rhs, 'x')?))
}

/// Renders an integer polynomial in `var`, highest degree first.
pub fn format_poly(c: &[BigInt], var: char) -> String {
    let mut out = String::new();
    for (i, a) in c.iter().enumerate().rev().filter(|(_, a)| !a.is_zero()) {
        let neg = a.is_negative();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let m = a.abs();
        match i {
            0 => out.push_str(&m.to_string()),
            _ => {
                if !m.is_one() {
                    out.push_str(&m.to_string());
                }
                out.push(var);
                if i > 1 {
                    out.push('^');
                    out.push_str(&i.to_string());
                }
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn polynomials() {
        assert_eq!(parse_poly("x7+x+1", 'x').unwrap(), ints(&[1, 1, 0, 0, 0, 0, 0, 1]));
        assert_eq!(parse_poly("3x^2 - 2*x", 'x').unwrap(), ints(&[0, -2, 3]));
        assert_eq!(parse_poly("-t+5", 't').unwrap(), ints(&[5, -1]));
        assert_eq!(parse_poly("x^2-x^2", 'x').unwrap(), ints(&[]));
        assert!(parse_poly("x+", 'x').is_err());
        assert!(parse_poly("", 'x').is_err());
    }

    #[test]
    fn curves() {
        assert_eq!(parse_curve("y2+y=x7+x+1").unwrap(), (ints(&[1]), ints(&[1, 1, 0, 0, 0, 0, 0, 1])));
        assert_eq!(parse_curve("y^2 = x^5 + 1").unwrap(), (ints(&[]), ints(&[1, 0, 0, 0, 0, 1])));
        assert_eq!(parse_curve("y2 + x*y = x^5 + 1").unwrap().0, ints(&[0, 1]));
        assert_eq!(parse_curve("y2+(x+1)y=x5+x").unwrap().0, ints(&[1, 1]));
        assert!(parse_curve("y3=x").is_err());
        assert!(parse_curve("y2+y").is_err());
    }

    #[test]
    fn formatting_round_trips() {
        for s in ["x^7 + x + 1", "-3x^2 + 1", "x - 4", "0"] {
            let c = parse_poly(s, 'x').unwrap();
            assert_eq!(format_poly(&c, 'x'), s);
        }
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-3/6").unwrap(), BigRational::new(BigInt::from(-1), BigInt::from(2)));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(parse_int_list("1, 0,-1,0").unwrap(), ints(&[1, 0, -1, 0]));
        let x = to_padic(3, &parse_rational("1/2").unwrap(), 10).unwrap();
        assert_eq!(x.residue(2).unwrap(), BigInt::from(5));
    }

    proptest::proptest! {
        #[test]
        fn poly_format_parse(c in proptest::collection::vec(-50i64..50, 0..8)) {
            let c = ints(&c);
            let mut want = c.clone();
            while want.last().is_some_and(Zero::is_zero) {
                want.pop();
            }
            proptest::prop_assert_eq!(parse_poly(&format_poly(&c, 'x'), 'x').unwrap(), want);
        }
    }
}
