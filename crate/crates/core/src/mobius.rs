//! Möbius sequences `n -> (a n + b) / (c n + d)`.
//!
//! Every non-constant sequence with `c != 0` converges to `L = a / c` from a
//! fixed side, and its reciprocal distance to the limit is affine in `n`:
//! `1 / |x(n) - L| = alpha n + beta`. That reciprocal coordinate is what the
//! set algebra in [`crate::decomp`] works in.

use std::cmp::Ordering;
use std::fmt;

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{ceil_int, floor_int, from_big, int, show, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MobiusSeq {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

/// Side of the limit from which a sequence approaches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Values stay below the limit (increasing sequence).
    Below,
    /// Values stay above the limit (decreasing sequence).
    Above,
}

impl Side {
    /// Position of `t` in reciprocal coordinates around `limit`.
    pub fn to_x(self, limit: &Rational, t: &Rational) -> Rational {
        match self {
            Side::Below => limit - t.recip(),
            Side::Above => limit + t.recip(),
        }
    }

    pub fn to_t(self, limit: &Rational, x: &Rational) -> Option<Rational> {
        let dist = match self {
            Side::Below => limit - x,
            Side::Above => x - limit,
        };
        dist.is_positive().then(|| dist.recip())
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Below => Side::Above,
            Side::Above => Side::Below,
        }
    }
}

/// Reciprocal-coordinate form of a non-constant sequence:
/// `x(n) = limit -/+ 1 / (alpha n + beta)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TForm {
    pub limit: Rational,
    pub side: Side,
    pub alpha: Rational,
    pub beta: Rational,
}

impl TForm {
    pub fn t(&self, n: &Rational) -> Rational {
        &self.alpha * n + &self.beta
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Rel {
    fn holds(self, o: Ordering) -> bool {
        match self {
            Rel::Lt => o == Ordering::Less,
            Rel::Le => o != Ordering::Greater,
            Rel::Gt => o == Ordering::Greater,
            Rel::Ge => o != Ordering::Less,
        }
    }
}

/// Half-open range of integer indices `[lo, hi)`; `hi = None` means unbounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexRange {
    pub lo: BigInt,
    pub hi: Option<BigInt>,
}

impl IndexRange {
    pub fn from(lo: BigInt) -> Self {
        IndexRange { lo, hi: None }
    }

    pub fn none() -> Self {
        IndexRange { lo: BigInt::one(), hi: Some(BigInt::one()) }
    }

    pub fn is_empty(&self) -> bool {
        matches!(&self.hi, Some(h) if *h <= self.lo)
    }

    pub fn intersect(&self, other: &IndexRange) -> IndexRange {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = match (&self.hi, &other.hi) {
            (Some(a), Some(b)) => Some(a.min(b).clone()),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        IndexRange { lo, hi }
    }

    pub fn first(&self) -> Option<BigInt> {
        (!self.is_empty()).then(|| self.lo.clone())
    }
}

impl MobiusSeq {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        MobiusSeq { a, b, c, d }
    }

    pub fn constant(v: Rational) -> Self {
        MobiusSeq { a: int(0), b: v, c: int(0), d: int(1) }
    }

    pub fn eval(&self, n: &BigInt) -> Rational {
        let n = from_big(n.clone());
        self.eval_q(&n)
    }

    pub fn eval_q(&self, n: &Rational) -> Rational {
        (&self.a * n + &self.b) / (&self.c * n + &self.d)
    }

    pub fn eval_i(&self, n: i64) -> Rational {
        self.eval(&BigInt::from(n))
    }

    pub fn is_constant(&self) -> bool {
        &self.a * &self.d == &self.b * &self.c
    }

    /// Defined and sign-stable denominator on every `n >= start`.
    pub fn is_valid_from(&self, start: &BigInt) -> bool {
        let s = from_big(start.clone());
        if self.c.is_zero() {
            return !self.d.is_zero() && self.is_constant();
        }
        // c n + d keeps the sign of c for every n >= s iff s > -d / c
        s > -(&self.d / &self.c)
    }

    pub fn limit(&self) -> Option<Rational> {
        if self.c.is_zero() {
            if self.is_constant() {
                return Some(&self.b / &self.d);
            }
            return None;
        }
        Some(&self.a / &self.c)
    }

    /// `Ordering::Greater` for increasing, `Less` for decreasing, `Equal` for constant.
    pub fn direction(&self) -> Ordering {
        (&self.a * &self.d - &self.b * &self.c).cmp(&Rational::zero())
    }

    pub fn tform(&self) -> Option<TForm> {
        if self.is_constant() || self.c.is_zero() {
            return None;
        }
        let limit = &self.a / &self.c;
        let k = &limit * &self.d - &self.b;
        // limit - x(n) = k / (c n + d)
        let (side, k) = if (k.is_positive()) == (self.c.is_positive()) {
            (Side::Below, k)
        } else {
            (Side::Above, -k)
        };
        Some(TForm { limit, side, alpha: &self.c / &k, beta: &self.d / &k })
    }

    /// Canonical sequence with `c = 1` for the reciprocal form.
    pub fn from_tform(tf: &TForm) -> Self {
        let l = &tf.limit;
        let s = match tf.side {
            Side::Below => int(-1),
            Side::Above => int(1),
        };
        // x = l + s / (alpha n + beta) = (l alpha n + l beta + s) / (alpha n + beta)
        let a = l.clone();
        let b = (l * &tf.beta + s) / &tf.alpha;
        let d = &tf.beta / &tf.alpha;
        MobiusSeq { a, b, c: int(1), d }
    }

    /// Scales so that `c = 1` (or `d = 1` for constants).
    pub fn canonical(&self) -> Self {
        let k = if !self.c.is_zero() { self.c.clone() } else { self.d.clone() };
        MobiusSeq { a: &self.a / &k, b: &self.b / &k, c: &self.c / &k, d: &self.d / &k }
    }

    /// Same values, reindexed so that old index `n + shift` is new index `n`.
    pub fn shifted(&self, shift: &BigInt) -> Self {
        let s = from_big(shift.clone());
        MobiusSeq { a: self.a.clone(), b: &self.b + &self.a * &s, c: self.c.clone(), d: &self.d + &self.c * &s }
    }

    /// Affine image `x -> slope x + offset`.
    pub fn affine(&self, slope: &Rational, offset: &Rational) -> Self {
        MobiusSeq {
            a: slope * &self.a + offset * &self.c,
            b: slope * &self.b + offset * &self.d,
            c: self.c.clone(),
            d: self.d.clone(),
        }
    }

    /// Indices `n >= start` with `x(n) rel q`. Monotonicity makes this a
    /// prefix or a suffix of `[start, inf)`.
    pub fn solve(&self, start: &BigInt, q: &Rational, rel: Rel) -> IndexRange {
        let holds = |n: &BigInt| rel.holds(self.eval(n).cmp(q));
        let at_start = holds(start);
        if self.is_constant() {
            return if at_start { IndexRange::from(start.clone()) } else { IndexRange::none() };
        }
        let denom = &self.a - &self.c * q;
        if denom.is_zero() {
            // q is the limit: never attained, the comparison is constant
            return if at_start { IndexRange::from(start.clone()) } else { IndexRange::none() };
        }
        let crossing = (&self.d * q - &self.b) / denom;
        let beyond = start.max(&(ceil_int(&crossing) + 2)).clone();
        let at_inf = holds(&beyond);
        if at_start == at_inf {
            return if at_start { IndexRange::from(start.clone()) } else { IndexRange::none() };
        }
        let mut n = start.max(&(floor_int(&crossing) - 1)).clone();
        while holds(&n) != at_inf {
            n += 1;
        }
        if at_inf {
            IndexRange::from(n)
        } else {
            IndexRange { lo: start.clone(), hi: Some(n) }
        }
    }

    /// DSL text for this endpoint.
    pub fn to_dsl(&self) -> String {
        let m = self.canonical();
        if m.c.is_zero() {
            return show(&(&m.b / &m.d));
        }
        // (a n + b) / (n + d) = a + k / (n + d)
        let k = &m.b - &m.a * &m.d;
        if m.a.is_integer() && k.is_integer() && m.d.is_integer() {
            let den = if m.d.is_zero() {
                "n".to_string()
            } else if m.d.is_negative() {
                format!("(n-{})", show(&-&m.d))
            } else {
                format!("(n+{})", show(&m.d))
            };
            let frac = format!("{}/{}", show(&k.abs()), den);
            if m.a.is_zero() {
                if k.is_negative() {
                    format!("-{frac}")
                } else {
                    frac
                }
            } else {
                let op = if k.is_negative() { "-" } else { "+" };
                format!("{}{}{}", show(&m.a), op, frac)
            }
        } else {
            format!("mob({},{},{},{})", show(&m.a), show(&m.b), show(&m.c), show(&m.d))
        }
    }
}

impl fmt::Display for MobiusSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dsl())
    }
}

/// Sign-exact check that `p(n) = A n^2 + B n + C > 0` for every integer `n >= start`.
pub fn quadratic_positive_from(qa: &Rational, qb: &Rational, qc: &Rational, start: &BigInt) -> bool {
    let p = |n: &BigInt| {
        let n = from_big(n.clone());
        qa * &n * &n + qb * &n + qc
    };
    if qa.is_negative() {
        return false;
    }
    if qa.is_zero() {
        if qb.is_negative() {
            return false;
        }
        return p(start).is_positive();
    }
    let vertex = -qb / (int(2) * qa);
    let mut candidates = vec![start.clone()];
    for v in [floor_int(&vertex), ceil_int(&vertex)] {
        if v > *start {
            candidates.push(v);
        }
    }
    candidates.iter().all(|n| p(n).is_positive())
}

/// `left(n) < right(n)` for all `n >= start`.
pub fn strictly_below_from(left: &MobiusSeq, right: &MobiusSeq, start: &BigInt) -> bool {
    // right - left = (a2 n + b2)(c1 n + d1) - (a1 n + b1)(c2 n + d2), over a positive
    // denominator when both denominators share the sign of their c (or d) coefficient.
    let s1 = denom_sign(left, start);
    let s2 = denom_sign(right, start);
    let qa = &right.a * &left.c - &left.a * &right.c;
    let qb = &right.a * &left.d + &right.b * &left.c - &left.a * &right.d - &left.b * &right.c;
    let qc = &right.b * &left.d - &left.b * &right.d;
    let sgn = int((s1 * s2) as i64);
    quadratic_positive_from(&(&qa * &sgn), &(&qb * &sgn), &(&qc * &sgn), start)
}

fn denom_sign(m: &MobiusSeq, start: &BigInt) -> i32 {
    let v = &m.c * from_big(start.clone()) + &m.d;
    if v.is_positive() {
        1
    } else {
        -1
    }
}
