//! Exact rational helpers on top of `num::BigRational`.

use std::fmt;

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_big(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

pub fn half() -> Rational {
    rat(1, 2)
}

pub fn mid(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

pub fn floor_int(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

pub fn ceil_int(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

pub fn is_integer(q: &Rational) -> bool {
    q.is_integer()
}

/// Least common multiple of two positive rationals: the smallest positive
/// rational that is an integer multiple of both.
pub fn lcm(a: &Rational, b: &Rational) -> Rational {
    use num::Integer;
    let num = a.numer().lcm(b.numer());
    let den = a.denom().gcd(b.denom());
    Rational::new(num, den)
}

/// Formats a rational as `p` or `p/q`.
pub fn show(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

pub fn sign(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// A rational or one of the two infinities.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ext {
    NegInf,
    Fin(Rational),
    PosInf,
}

impl Ext {
    pub fn fin(&self) -> Option<&Rational> {
        match self {
            Ext::Fin(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Fin(_))
    }

    pub fn neg(&self) -> Ext {
        match self {
            Ext::NegInf => Ext::PosInf,
            Ext::PosInf => Ext::NegInf,
            Ext::Fin(q) => Ext::Fin(-q),
        }
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ext {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Ext::NegInf, Ext::NegInf) | (Ext::PosInf, Ext::PosInf) => Equal,
            (Ext::NegInf, _) | (_, Ext::PosInf) => Less,
            (_, Ext::NegInf) | (Ext::PosInf, _) => Greater,
            (Ext::Fin(a), Ext::Fin(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => write!(f, "-inf"),
            Ext::PosInf => write!(f, "inf"),
            Ext::Fin(q) => write!(f, "{}", show(q)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcm_of_rationals() {
        assert_eq!(lcm(&rat(1, 7), &rat(1, 11)), int(1));
        assert_eq!(lcm(&rat(3, 7), &rat(5, 11)), int(15));
        assert_eq!(lcm(&rat(1, 2), &rat(1, 4)), rat(1, 2));
    }

    #[test]
    fn parse_and_show() {
        assert_eq!(parse("-3/6"), Some(rat(-1, 2)));
        assert_eq!(parse(" 4 "), Some(int(4)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(show(&rat(-1, 2)), "-1/2");
        assert_eq!(show(&int(7)), "7");
    }

    #[test]
    fn ext_order() {
        assert!(Ext::NegInf < Ext::Fin(int(-100)));
        assert!(Ext::Fin(int(100)) < Ext::PosInf);
    }
}
