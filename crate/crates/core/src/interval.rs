//! Finite unions of intervals with exact rational endpoints.
//!
//! This is the finite half of the set algebra: every operation here is a
//! plain sweep over sorted endpoint lists. Degenerate intervals `[p, p]`
//! represent isolated points.

use std::cmp::Ordering;

use crate::rational::{Ext, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Ext,
    pub lo_closed: bool,
    pub hi: Ext,
    pub hi_closed: bool,
}

impl Interval {
    /// Builds an interval, or `None` when the bounds describe the empty set.
    /// Infinite bounds are always treated as open.
    pub fn new(lo: Ext, lo_closed: bool, hi: Ext, hi_closed: bool) -> Option<Interval> {
        let lo_closed = lo_closed && lo.is_finite();
        let hi_closed = hi_closed && hi.is_finite();
        match lo.cmp(&hi) {
            Ordering::Less => {}
            Ordering::Equal if lo_closed && hi_closed => {}
            _ => return None,
        }
        Some(Interval { lo, lo_closed, hi, hi_closed })
    }

    pub fn fin(lo: Rational, lo_closed: bool, hi: Rational, hi_closed: bool) -> Option<Interval> {
        Interval::new(Ext::Fin(lo), lo_closed, Ext::Fin(hi), hi_closed)
    }

    pub fn point(q: Rational) -> Interval {
        Interval { lo: Ext::Fin(q.clone()), lo_closed: true, hi: Ext::Fin(q), hi_closed: true }
    }

    pub fn full() -> Interval {
        Interval { lo: Ext::NegInf, lo_closed: false, hi: Ext::PosInf, hi_closed: false }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn point_value(&self) -> Option<&Rational> {
        if self.is_point() {
            self.lo.fin()
        } else {
            None
        }
    }

    pub fn contains(&self, q: &Rational) -> bool {
        let x = Ext::Fin(q.clone());
        let above = match self.lo.cmp(&x) {
            Ordering::Less => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Greater => false,
        };
        let below = match x.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    pub fn closure(&self) -> Interval {
        Interval::new(self.lo.clone(), true, self.hi.clone(), true).expect("closure of nonempty interval")
    }

    /// Interior in the real line; empty for points.
    pub fn interior(&self) -> Option<Interval> {
        Interval::new(self.lo.clone(), false, self.hi.clone(), false)
    }

    pub fn is_closed(&self) -> bool {
        (self.lo_closed || !self.lo.is_finite()) && (self.hi_closed || !self.hi.is_finite())
    }

    pub fn is_open(&self) -> bool {
        !self.lo_closed && !self.hi_closed && !self.is_point()
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Image under `x -> -x`.
    pub fn negate(&self) -> Interval {
        Interval { lo: self.hi.neg(), lo_closed: self.hi_closed, hi: self.lo.neg(), hi_closed: self.lo_closed }
    }

    fn lower_key(&self) -> (Ext, bool) {
        (self.lo.clone(), !self.lo_closed)
    }
}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lower_key()
            .cmp(&other.lower_key())
            .then_with(|| upper_cmp((&self.hi, self.hi_closed), (&other.hi, other.hi_closed)))
    }
}

fn upper_cmp(a: (&Ext, bool), b: (&Ext, bool)) -> Ordering {
    a.0.cmp(b.0).then(a.1.cmp(&b.1))
}

/// `b` starts no later than just after `a` ends, so their union is connected.
fn touches(a: &Interval, b: &Interval) -> bool {
    match b.lo.cmp(&a.hi) {
        Ordering::Less => true,
        Ordering::Equal => b.lo_closed || a.hi_closed,
        Ordering::Greater => false,
    }
}

/// A sorted list of pairwise disjoint, non-adjacent intervals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntervalUnion {
    parts: Vec<Interval>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion { parts: Vec::new() }
    }

    pub fn full() -> Self {
        IntervalUnion { parts: vec![Interval::full()] }
    }

    pub fn from_interval(iv: Interval) -> Self {
        IntervalUnion { parts: vec![iv] }
    }

    pub fn from_intervals<I: IntoIterator<Item = Interval>>(items: I) -> Self {
        let mut v: Vec<Interval> = items.into_iter().collect();
        v.sort();
        let mut parts: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            if let Some(last) = parts.last_mut() {
                if touches(last, &iv) {
                    if upper_cmp((&iv.hi, iv.hi_closed), (&last.hi, last.hi_closed)) == Ordering::Greater {
                        last.hi = iv.hi;
                        last.hi_closed = iv.hi_closed;
                    }
                    continue;
                }
            }
            parts.push(iv);
        }
        IntervalUnion { parts }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<Interval> {
        self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, q: &Rational) -> bool {
        let x = Ext::Fin(q.clone());
        // first part whose upper end is not below x
        let idx = self.parts.partition_point(|p| p.hi < x);
        self.parts[idx..].iter().take(2).any(|p| p.contains(q))
    }

    /// Whether `iv` is exactly one of the maximal parts.
    pub fn has_part(&self, iv: &Interval) -> bool {
        self.parts.binary_search(iv).is_ok()
    }

    pub fn remove_part(&mut self, iv: &Interval) -> bool {
        match self.parts.binary_search(iv) {
            Ok(i) => {
                self.parts.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        IntervalUnion::from_intervals(self.parts.iter().chain(other.parts.iter()).cloned())
    }

    pub fn complement(&self) -> IntervalUnion {
        let mut out = Vec::with_capacity(self.parts.len() + 1);
        let mut lo = Ext::NegInf;
        let mut lo_closed = false;
        for p in &self.parts {
            if let Some(g) = Interval::new(lo.clone(), lo_closed, p.lo.clone(), !p.lo_closed) {
                out.push(g);
            }
            lo = p.hi.clone();
            lo_closed = !p.hi_closed;
        }
        if let Some(g) = Interval::new(lo, lo_closed, Ext::PosInf, false) {
            out.push(g);
        }
        IntervalUnion { parts: out }
    }

    pub fn intersect(&self, other: &IntervalUnion) -> IntervalUnion {
        self.complement().union(&other.complement()).complement()
    }

    pub fn difference(&self, other: &IntervalUnion) -> IntervalUnion {
        self.intersect(&other.complement())
    }

    pub fn closure(&self) -> IntervalUnion {
        IntervalUnion::from_intervals(self.parts.iter().map(Interval::closure))
    }

    pub fn interior(&self) -> IntervalUnion {
        IntervalUnion::from_intervals(self.parts.iter().filter_map(Interval::interior))
    }

    pub fn is_subset(&self, other: &IntervalUnion) -> bool {
        self.difference(other).is_empty()
    }

    /// Every finite endpoint, in order.
    pub fn endpoints(&self) -> impl Iterator<Item = &Rational> {
        self.parts.iter().flat_map(|p| p.lo.fin().into_iter().chain(p.hi.fin()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn iv(a: i64, ac: bool, b: i64, bc: bool) -> Interval {
        Interval::fin(int(a), ac, int(b), bc).unwrap()
    }

    #[test]
    fn merge_touching_closed() {
        let u = IntervalUnion::from_intervals([iv(0, false, 1, true), iv(1, false, 2, false)]);
        assert_eq!(u.parts(), &[iv(0, false, 2, false)]);
        let v = IntervalUnion::from_intervals([iv(0, false, 1, false), iv(1, false, 2, false)]);
        assert_eq!(v.parts().len(), 2);
    }

    #[test]
    fn complement_of_open_unit() {
        let u = IntervalUnion::from_interval(iv(0, false, 1, false));
        let c = u.complement();
        assert_eq!(c.parts().len(), 2);
        assert!(c.contains(&int(0)) && c.contains(&int(1)) && !c.contains(&rat(1, 2)));
        assert_eq!(c.complement(), u);
    }

    #[test]
    fn degenerate_rejected() {
        assert!(Interval::fin(int(1), true, int(1), false).is_none());
        assert!(Interval::fin(int(2), true, int(1), true).is_none());
        assert!(Interval::new(Ext::NegInf, true, Ext::PosInf, true).unwrap().lo_closed == false);
    }

    #[test]
    fn intersect_points() {
        let a = IntervalUnion::from_intervals([iv(0, true, 1, true)]);
        let b = IntervalUnion::from_intervals([Interval::point(int(1)), Interval::point(int(3))]);
        assert_eq!(a.intersect(&b).parts(), &[Interval::point(int(1))]);
    }
}
