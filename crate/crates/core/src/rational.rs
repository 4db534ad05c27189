//! Thin helpers around arbitrary-precision rationals.
//!
//! `num_rational::BigRational` already guarantees the two invariants we rely
//! on everywhere (always reduced, denominator positive), so the domain type is
//! an alias plus constructors, mod-1 normalization and bit-exact string I/O.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// `p/q` from machine integers.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

/// Normalize into the half-open interval [0, 1).
pub fn mod1(x: &Rat) -> Rat {
    let f = x.fract();
    if f.is_negative() {
        f + Rat::one()
    } else {
        f
    }
}

pub fn is_integer(x: &Rat) -> bool {
    x.denom().is_one()
}

/// Denominator as u64; callers only use this at desk scale.
pub fn denom_u64(x: &Rat) -> u64 {
    x.denom().to_u64().expect("denominator exceeds u64")
}

pub fn numer_i64(x: &Rat) -> i64 {
    x.numer().to_i64().expect("numerator exceeds i64")
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().expect("rational out of f64 range")
}

/// Bit-exact rendering: integers as `p`, fractions as `p/q`.
pub fn format_rat(x: &Rat) -> String {
    if is_integer(x) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse `p` or `p/q` with an optional sign; `q` must be positive after
/// reduction, which BigRational enforces on construction.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator {num:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator {den:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(n, d))
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / a.gcd(&b) * b
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Integer square root check; `Some(r)` iff `n == r*r`.
pub fn perfect_sqrt(n: u64) -> Option<u64> {
    let r = (n as f64).sqrt().round() as u64;
    for c in r.saturating_sub(1)..=r + 1 {
        if c * c == n {
            return Some(c);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod1_normalizes_into_unit_interval() {
        assert_eq!(mod1(&rat(7, 3)), rat(1, 3));
        assert_eq!(mod1(&rat(-1, 4)), rat(3, 4));
        assert_eq!(mod1(&rat(-8, 4)), rat(0, 1));
        assert_eq!(mod1(&rat(5, 5)), rat(0, 1));
    }

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-5", "1/3", "-7/12", "22/7"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
        assert_eq!(parse_rat(" 4/6 ").unwrap(), rat(2, 3));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn perfect_sqrt_detects_squares() {
        assert_eq!(perfect_sqrt(49), Some(7));
        assert_eq!(perfect_sqrt(1), Some(1));
        assert_eq!(perfect_sqrt(0), Some(0));
        assert_eq!(perfect_sqrt(48), None);
    }
}
