//! Text syntax for [`RealSet`] values.
//!
//! ```text
//! expr     := 'empty' | term ('|' term)*
//! term     := interval | point | family
//! interval := ('(' | '[') bound ',' bound (')' | ']')
//! bound    := rational | '-inf' | 'inf'
//! point    := '{' rational '}'
//! family   := 'fam' '(' 'n' '>=' int ')' '{' piece '}'
//! piece    := ('(' | '[') endpoint ',' endpoint (')' | ']') | '{' endpoint '}'
//! endpoint := 'mob' '(' r ',' r ',' r ',' r ')'
//!           | [rational ('+' | '-')] rational '/' ('n' | '(' 'n' [('+' | '-') rational] ')')
//!           | rational
//! rational := ['-'] int ['/' int]
//! ```
//!
//! Whitespace is ignored. Families are not validated while parsing; that
//! happens in [`DslExpression::to_realset`].

use num::bigint::BigInt;
use num::Zero;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::mobius::MobiusSeq;
use crate::rational::{int, Ext, Rational};
use crate::realset::{RealSet, SchemaAtom};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Piece {
    Interval { left: MobiusSeq, left_closed: bool, right: MobiusSeq, right_closed: bool },
    Point(MobiusSeq),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Interval { lo: Ext, lo_closed: bool, hi: Ext, hi_closed: bool },
    Point(Rational),
    Family { start: BigInt, piece: Piece },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DslExpression {
    pub source: String,
    pub terms: Vec<Term>,
}

impl DslExpression {
    /// Builds the raw (unnormalized) set, validating every atom and family.
    pub fn to_realset(&self) -> Result<RealSet> {
        let mut out = RealSet::raw(vec![], vec![], vec![]);
        for t in &self.terms {
            match t {
                Term::Interval { lo, lo_closed, hi, hi_closed } => {
                    let iv = Interval::new(lo.clone(), *lo_closed, hi.clone(), *hi_closed)
                        .ok_or_else(|| Error::InvalidSchema("empty interval".into()))?;
                    if iv.is_point() {
                        out.points.push(iv.lo.fin().expect("finite").clone());
                    } else {
                        out.intervals.push(iv);
                    }
                }
                Term::Point(q) => out.points.push(q.clone()),
                Term::Family { start, piece } => {
                    let s = match piece {
                        Piece::Point(seq) => SchemaAtom::point_family(seq.clone(), start.clone())?,
                        Piece::Interval { left, left_closed, right, right_closed } => SchemaAtom::interval_family(
                            left.clone(),
                            *left_closed,
                            right.clone(),
                            *right_closed,
                            start.clone(),
                        )?,
                    };
                    out.schemas.push(s);
                }
            }
        }
        Ok(out)
    }
}

pub fn parse_dsl(text: &str) -> Result<DslExpression> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let terms = p.expr()?;
    Ok(DslExpression { source: text.to_string(), terms })
}

/// Parses and validates in one step.
pub fn parse_set(text: &str) -> Result<RealSet> {
    parse_dsl(text)?.to_realset()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    /// Next non-whitespace byte after the current one.
    fn peek2(&mut self) -> Option<u8> {
        self.skip_ws();
        let mut i = self.pos + 1;
        while i < self.src.len() && self.src[i].is_ascii_whitespace() {
            i += 1;
        }
        self.src.get(i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.peek().map(|b| format!("'{}'", b as char)).unwrap_or_else(|| "end of input".into());
            self.err(format!("expected '{}', found {}", c as char, found))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Vec<Term>> {
        if self.keyword("empty") {
            return self.finish(vec![]);
        }
        let mut terms = vec![self.term()?];
        while self.eat(b'|') {
            terms.push(self.term()?);
        }
        self.finish(terms)
    }

    fn finish(&mut self, terms: Vec<Term>) -> Result<Vec<Term>> {
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<Term> {
        match self.peek() {
            Some(b'(') | Some(b'[') => self.interval(),
            Some(b'{') => {
                self.pos += 1;
                let q = self.rational()?;
                self.expect(b'}')?;
                Ok(Term::Point(q))
            }
            Some(b'f') => self.family(),
            Some(c) => self.err(format!("unexpected '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }

    fn open_bracket(&mut self) -> Result<bool> {
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                Ok(true)
            }
            Some(b'(') => {
                self.pos += 1;
                Ok(false)
            }
            _ => self.err("expected '(' or '['"),
        }
    }

    fn close_bracket(&mut self) -> Result<bool> {
        match self.peek() {
            Some(b']') => {
                self.pos += 1;
                Ok(true)
            }
            Some(b')') => {
                self.pos += 1;
                Ok(false)
            }
            _ => self.err("expected ')' or ']'"),
        }
    }

    fn interval(&mut self) -> Result<Term> {
        let lo_closed = self.open_bracket()?;
        let lo = self.bound()?;
        self.expect(b',')?;
        let hi = self.bound()?;
        let hi_closed = self.close_bracket()?;
        if lo_closed && !lo.is_finite() || hi_closed && !hi.is_finite() {
            return self.err("infinite bounds must be open");
        }
        Ok(Term::Interval { lo, lo_closed, hi, hi_closed })
    }

    fn bound(&mut self) -> Result<Ext> {
        if self.keyword("-inf") {
            return Ok(Ext::NegInf);
        }
        if self.keyword("+inf") || self.keyword("inf") {
            return Ok(Ext::PosInf);
        }
        Ok(Ext::Fin(self.rational()?))
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits {
            self.pos = start;
            return self.err("expected a number");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(text.parse().expect("digits"))
    }

    /// `int` or `int/int`. A slash followed by anything but a digit is left
    /// for the caller.
    fn rational(&mut self) -> Result<Rational> {
        let num = self.integer()?;
        if self.peek() == Some(b'/') && self.peek2().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
            let at = self.pos;
            let den = self.integer()?;
            if den.is_zero() {
                self.pos = at;
                return self.err("zero denominator");
            }
            return Ok(Rational::new(num, den));
        }
        Ok(Rational::from_integer(num))
    }

    fn family(&mut self) -> Result<Term> {
        if !self.keyword("fam") {
            return self.err("expected 'fam'");
        }
        self.expect(b'(')?;
        self.expect(b'n')?;
        if !self.keyword(">=") {
            return self.err("expected '>='");
        }
        let start = self.integer()?;
        self.expect(b')')?;
        self.expect(b'{')?;
        let piece = if self.eat(b'{') {
            let seq = self.endpoint()?;
            self.expect(b'}')?;
            Piece::Point(seq)
        } else {
            let left_closed = self.open_bracket()?;
            let left = self.endpoint()?;
            self.expect(b',')?;
            let right = self.endpoint()?;
            let right_closed = self.close_bracket()?;
            Piece::Interval { left, left_closed, right, right_closed }
        };
        self.expect(b'}')?;
        Ok(Term::Family { start, piece })
    }

    fn endpoint(&mut self) -> Result<MobiusSeq> {
        if self.keyword("mob") {
            self.expect(b'(')?;
            let a = self.rational()?;
            self.expect(b',')?;
            let b = self.rational()?;
            self.expect(b',')?;
            let c = self.rational()?;
            self.expect(b',')?;
            let d = self.rational()?;
            self.expect(b')')?;
            if c.is_zero() && d.is_zero() {
                return self.err("mob(a,b,0,0) has no denominator");
            }
            return Ok(MobiusSeq::new(a, b, c, d));
        }
        let first = self.rational()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let d = self.denominator()?;
            return Ok(sugar(Rational::zero(), first, d));
        }
        let sign = match self.peek() {
            Some(b'+') => int(1),
            Some(b'-') => int(-1),
            _ => return Ok(MobiusSeq::constant(first)),
        };
        self.pos += 1;
        let k = self.rational()?;
        self.expect(b'/')?;
        let d = self.denominator()?;
        Ok(sugar(first, sign * k, d))
    }

    /// `n` or `(n +- r)`, returning the shift r.
    fn denominator(&mut self) -> Result<Rational> {
        if self.eat(b'n') {
            return Ok(Rational::zero());
        }
        self.expect(b'(')?;
        self.expect(b'n')?;
        let d = match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                self.rational()?
            }
            Some(b'-') => {
                self.pos += 1;
                -self.rational()?
            }
            _ => Rational::zero(),
        };
        self.expect(b')')?;
        Ok(d)
    }
}

/// a + k/(n + d) = (a n + a d + k) / (n + d)
fn sugar(a: Rational, k: Rational, d: Rational) -> MobiusSeq {
    let b = &a * &d + k;
    MobiusSeq::new(a, b, int(1), d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn atoms_and_points() {
        let e = parse_dsl("[0, 1) | {2} | (3, inf)").unwrap();
        assert_eq!(e.terms.len(), 3);
        let x = e.to_realset().unwrap();
        assert!(x.member(&int(0)));
        assert!(!x.member(&int(1)));
        assert!(x.member(&int(2)));
        assert!(x.member(&int(1000)));
    }

    #[test]
    fn sugar_forms() {
        let e = parse_dsl("fam(n>=1){ [1/(2n), 1/(2n-1)] }");
        assert!(e.is_err(), "2n is not part of the grammar");
        let e = parse_dsl("fam(n>=2){ (1 - 1/n, 1 - 1/(n+1)) }").unwrap();
        match &e.terms[0] {
            Term::Family { piece: Piece::Interval { left, right, .. }, .. } => {
                assert_eq!(left.eval_i(2), rat(1, 2));
                assert_eq!(right.eval_i(2), rat(2, 3));
            }
            t => panic!("{t:?}"),
        }
        let e = parse_dsl("fam(n>=1){ {mob(1,0,1,1)} }").unwrap();
        match &e.terms[0] {
            Term::Family { piece: Piece::Point(s), .. } => assert_eq!(s.eval_i(1), rat(1, 2)),
            t => panic!("{t:?}"),
        }
    }

    #[test]
    fn empty_keyword() {
        assert!(parse_set("empty").unwrap().is_empty());
    }

    #[test]
    fn errors_carry_position() {
        match parse_dsl("[0, 1) | (2,") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 12),
            r => panic!("{r:?}"),
        }
        assert!(matches!(parse_dsl("[0, 1/0]"), Err(Error::Parse { .. })));
        assert!(matches!(parse_dsl("[-inf, 0]"), Err(Error::Parse { .. })));
    }

    #[test]
    fn reversed_family_parses_but_fails_validation() {
        let e = parse_dsl("fam(n>=1){ (1/n, 1/(n+1)) }").unwrap();
        assert!(matches!(e.to_realset(), Err(Error::InvalidSchema(_))));
    }
}
