//! Parser for ring elements written as polynomials in `t`, e.g. `1 - 1/2*t + 3t^2`.

use num_bigint::BigInt;
use num_traits::One;

use super::RingError;

/// A parsed monomial `num/den * t^power`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Monomial {
    pub num: BigInt,
    pub den: BigInt,
    pub power: usize,
}

pub(crate) fn parse_polynomial(input: &str) -> Result<Vec<Monomial>, RingError> {
    let err = |reason: &str| RingError::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(err("empty input"));
    }
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let mut negative = false;
        if bytes[pos] == b'+' || bytes[pos] == b'-' {
            negative = bytes[pos] == b'-';
            pos += 1;
        } else if pos > 0 {
            return Err(err("expected '+' or '-' between terms"));
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos] != b'+' && bytes[pos] != b'-' {
            pos += 1;
        }
        let term = &s[start..pos];
        if term.is_empty() {
            return Err(err("empty term"));
        }
        let mut m = parse_term(term).ok_or_else(|| err("malformed term"))?;
        if negative {
            m.num = -m.num;
        }
        out.push(m);
    }
    Ok(out)
}

fn parse_term(term: &str) -> Option<Monomial> {
    let (coef, var) = match term.find('t') {
        Some(i) => (&term[..i], Some(&term[i + 1..])),
        None => (term, None),
    };
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let (num, den) = if coef.is_empty() {
        var?;
        (BigInt::one(), BigInt::one())
    } else {
        match coef.split_once('/') {
            Some((n, d)) => (n.parse().ok()?, d.parse().ok()?),
            None => (coef.parse().ok()?, BigInt::one()),
        }
    };
    let power = match var {
        None => 0,
        Some("") => 1,
        Some(rest) => rest.strip_prefix('^')?.parse().ok()?,
    };
    Some(Monomial { num, den, power })
}
