//! Continuous piecewise-linear maps of the line and exact images of sets.

use num::bigint::BigInt;
use num::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalUnion};
use crate::mobius::{MobiusSeq, Rel, Side};
use crate::ops::normalize;
use crate::rational::{Ext, Rational};
use crate::realset::{RealSet, SchemaAtom, SchemaKind};

/// `x -> slope x + offset`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Affine {
    #[serde(serialize_with = "ser_q")]
    pub slope: Rational,
    #[serde(serialize_with = "ser_q")]
    pub offset: Rational,
}

fn ser_q<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::rational::show(q))
}

impl Affine {
    pub fn new(slope: Rational, offset: Rational) -> Affine {
        Affine { slope, offset }
    }

    pub fn eval(&self, q: &Rational) -> Rational {
        &self.slope * q + &self.offset
    }

    fn eval_ext(&self, e: &Ext) -> Ext {
        match e {
            Ext::Fin(q) => Ext::Fin(self.eval(q)),
            _ if self.slope.is_zero() => Ext::Fin(self.offset.clone()),
            inf if self.slope.is_negative() => inf.neg(),
            inf => inf.clone(),
        }
    }

    /// Image of an interval.
    pub fn image(&self, iv: &Interval) -> Interval {
        if self.slope.is_zero() {
            return Interval::point(self.offset.clone());
        }
        let lo = self.eval_ext(&iv.lo);
        let hi = self.eval_ext(&iv.hi);
        let out = if self.slope.is_positive() {
            Interval::new(lo, iv.lo_closed, hi, iv.hi_closed)
        } else {
            Interval::new(hi, iv.hi_closed, lo, iv.lo_closed)
        };
        out.expect("injective affine image of a nonempty interval")
    }

    /// Preimage of a single value; `None` when the piece is constant.
    pub fn invert(&self, y: &Rational) -> Option<Rational> {
        if self.slope.is_zero() {
            None
        } else {
            Some((y - &self.offset) / &self.slope)
        }
    }
}

/// A continuous piecewise-affine map. Piece `i` applies on
/// `[breakpoints[i-1], breakpoints[i]]`, with unbounded first and last pieces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PLMap {
    #[serde(serialize_with = "ser_qs")]
    breakpoints: Vec<Rational>,
    pieces: Vec<Affine>,
}

fn ser_qs<S: serde::Serializer>(qs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(qs.iter().map(crate::rational::show))
}

impl PLMap {
    /// Validates ordering and continuity at every breakpoint.
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Affine>) -> Result<PLMap> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidMap(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMap("breakpoints must be strictly increasing".into()));
        }
        for (i, b) in breakpoints.iter().enumerate() {
            if pieces[i].eval(b) != pieces[i + 1].eval(b) {
                return Err(Error::InvalidMap(format!("discontinuous at {}", crate::rational::show(b))));
            }
        }
        Ok(PLMap { breakpoints, pieces })
    }

    pub fn affine(slope: Rational, offset: Rational) -> PLMap {
        PLMap { breakpoints: vec![], pieces: vec![Affine::new(slope, offset)] }
    }

    pub fn identity() -> PLMap {
        PLMap::affine(Rational::from_integer(1.into()), Rational::zero())
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Affine] {
        &self.pieces
    }

    /// Index of the piece applying at `q` (the left one at a breakpoint; both agree).
    fn piece_at(&self, q: &Rational) -> usize {
        self.breakpoints.partition_point(|b| b < q)
    }

    /// Closed domain of piece `i`.
    fn domain(&self, i: usize) -> Interval {
        let lo = if i == 0 { Ext::NegInf } else { Ext::Fin(self.breakpoints[i - 1].clone()) };
        let hi = self.breakpoints.get(i).cloned().map(Ext::Fin).unwrap_or(Ext::PosInf);
        let (lc, hc) = (lo.is_finite(), hi.is_finite());
        Interval::new(lo, lc, hi, hc).expect("nonempty piece domain")
    }

    /// Image of an interval, split at breakpoints.
    fn image_interval(&self, iv: &Interval) -> Vec<Interval> {
        let whole = IntervalUnion::from_interval(iv.clone());
        (0..self.pieces.len())
            .flat_map(|i| {
                let part = whole.intersect(&IntervalUnion::from_interval(self.domain(i)));
                let f = &self.pieces[i];
                part.into_parts().into_iter().map(move |p| f.image(&p)).collect::<Vec<_>>()
            })
            .collect()
    }

    /// The piece governing points just on `side` of `limit`, and the open
    /// region of that piece's domain adjacent to `limit`.
    fn piece_near(&self, limit: &Rational, side: Side) -> (usize, Ext) {
        match side {
            Side::Below => {
                let i = self.breakpoints.partition_point(|b| b < limit);
                let lo = if i == 0 { Ext::NegInf } else { Ext::Fin(self.breakpoints[i - 1].clone()) };
                (i, lo)
            }
            Side::Above => {
                let i = self.breakpoints.partition_point(|b| b <= limit);
                let hi = self.breakpoints.get(i).cloned().map(Ext::Fin).unwrap_or(Ext::PosInf);
                (i, hi)
            }
        }
    }
}

pub fn eval_map(m: &PLMap, q: &Rational) -> Rational {
    m.pieces[m.piece_at(q)].eval(q)
}

/// Index from which every piece of `s` lies strictly beyond `bound` towards the limit.
fn tail_start(s: &SchemaAtom, side: Side, bound: &Ext) -> BigInt {
    let b = match bound {
        Ext::Fin(b) => b,
        _ => return s.start.clone(),
    };
    let (seq, rel) = match (&s.kind, side) {
        (SchemaKind::PointFamily { seq }, Side::Below) => (seq, Rel::Gt),
        (SchemaKind::PointFamily { seq }, Side::Above) => (seq, Rel::Lt),
        (SchemaKind::IntervalFamily { left, .. }, Side::Below) => (left, Rel::Gt),
        (SchemaKind::IntervalFamily { right, .. }, Side::Above) => (right, Rel::Lt),
    };
    seq.solve(&s.start, b, rel).lo
}

fn map_schema(s: &SchemaAtom, f: &Affine, start: BigInt) -> Result<Option<SchemaAtom>> {
    if f.slope.is_zero() {
        return Ok(None);
    }
    let g = |m: &MobiusSeq| m.affine(&f.slope, &f.offset);
    let out = match &s.kind {
        SchemaKind::PointFamily { seq } => SchemaAtom::point_family(g(seq), start)?,
        SchemaKind::IntervalFamily { left, left_closed, right, right_closed } => {
            if f.slope.is_positive() {
                SchemaAtom::interval_family(g(left), *left_closed, g(right), *right_closed, start)?
            } else {
                SchemaAtom::interval_family(g(right), *right_closed, g(left), *left_closed, start)?
            }
        }
    };
    Ok(Some(out))
}

/// Exact image `m(X)` in canonical form.
pub fn pushforward(m: &PLMap, x: &RealSet) -> Result<RealSet> {
    let mut raw = RealSet::raw(vec![], vec![], vec![]);
    let push = |iv: Interval, raw: &mut RealSet| match iv.point_value() {
        Some(p) => raw.points.push(p.clone()),
        None => raw.intervals.push(iv),
    };
    for iv in &x.intervals {
        for im in m.image_interval(iv) {
            push(im, &mut raw);
        }
    }
    for p in &x.points {
        raw.points.push(eval_map(m, p));
    }
    for s in &x.schemas {
        let side = match s.side() {
            Some(side) => side,
            None => {
                // constant family: a single piece repeated, cannot occur in a valid schema
                return Err(Error::InvalidSchema("constant schema".into()));
            }
        };
        let (i, bound) = m.piece_near(&s.limit, side);
        let n0 = tail_start(s, side, &bound);
        crate::decomp::budget_check(&(&n0 - &s.start))?;
        let mut n = s.start.clone();
        while n < n0 {
            for im in m.image_interval(&s.piece(&n)) {
                push(im, &mut raw);
            }
            n += 1;
        }
        let f = &m.pieces[i];
        match map_schema(&shift_schema(s, &n0)?, f, BigInt::from(1))? {
            Some(t) => raw.schemas.push(t),
            None => raw.points.push(f.offset.clone()),
        }
    }
    normalize(&raw)
}

/// The same family restricted to indices `>= from`, reindexed to start at 1.
fn shift_schema(s: &SchemaAtom, from: &BigInt) -> Result<SchemaAtom> {
    let k = from - BigInt::from(1);
    match &s.kind {
        SchemaKind::PointFamily { seq } => SchemaAtom::point_family(seq.shifted(&k), BigInt::from(1)),
        SchemaKind::IntervalFamily { left, left_closed, right, right_closed } => SchemaAtom::interval_family(
            left.shifted(&k),
            *left_closed,
            right.shifted(&k),
            *right_closed,
            BigInt::from(1),
        ),
    }
}

/// Extremal behaviour of `m(X)` at one end.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EndReport {
    /// `"inf"`, `"-inf"` or an exact rational.
    pub value: String,
    pub attained: bool,
    /// For a finite unattained extremum: some `(a-e, a)` (or `(a, a+e)`) lies in the image.
    pub interval_contained: bool,
    pub epsilon: Option<String>,
    /// For an infinite extremum: the image contains an unbounded interval in that direction.
    pub unbounded_interval: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremumReport {
    pub sup: EndReport,
    pub inf: EndReport,
    #[serde(skip)]
    pub sup_value: Ext,
    #[serde(skip)]
    pub inf_value: Ext,
}

impl ExtremumReport {
    /// The trichotomy: attained, an adjacent interval, or an unbounded interval.
    pub fn trichotomy_holds(&self) -> bool {
        let ok = |e: &EndReport, v: &Ext| if v.is_finite() { e.attained || e.interval_contained } else { e.unbounded_interval };
        ok(&self.sup, &self.sup_value) && ok(&self.inf, &self.inf_value)
    }
}

/// Extrema of `m(X)`; `X` must be nonempty.
pub fn extremum_report(m: &PLMap, x: &RealSet) -> Result<ExtremumReport> {
    let y = pushforward(m, x)?;
    let (sv, sa) = y.sup().ok_or_else(|| Error::Domain("empty set has no extrema".into()))?;
    let (iv, ia) = y.inf().expect("nonempty");
    let sup = end_report(&y, &sv, sa, true);
    let inf = end_report(&y, &iv, ia, false);
    Ok(ExtremumReport { sup, inf, sup_value: sv, inf_value: iv })
}

fn end_report(y: &RealSet, v: &Ext, attained: bool, upper: bool) -> EndReport {
    let mut rep = EndReport {
        value: v.to_string(),
        attained,
        interval_contained: false,
        epsilon: None,
        unbounded_interval: false,
    };
    match v {
        Ext::Fin(a) if !attained => {
            // an interval atom or a nondegenerate family piece ending at a
            let ends_at = |i: &Interval| !i.is_point() && if upper { i.hi == *v } else { i.lo == *v };
            let piece = y.schemas.iter().find_map(|s| {
                let SchemaKind::IntervalFamily { left, right, .. } = &s.kind else { return None };
                let e = if upper { right } else { left };
                let n = e.solve(&s.start, a, Rel::Le).intersect(&e.solve(&s.start, a, Rel::Ge)).first()?;
                Some(s.piece(&n))
            });
            let hit = y.intervals.iter().find(|i| ends_at(i)).cloned().or(piece.filter(|p| ends_at(p)));
            if let Some(i) = &hit {
                let other = if upper { &i.lo } else { &i.hi };
                let eps = match other {
                    Ext::Fin(o) => (a - o).abs(),
                    _ => Rational::from_integer(1.into()),
                };
                rep.interval_contained = true;
                rep.epsilon = Some(crate::rational::show(&eps));
            }
        }
        Ext::Fin(_) => {}
        _ => {
            rep.unbounded_interval = y.intervals.iter().any(|i| if upper { i.hi == Ext::PosInf } else { i.lo == Ext::NegInf });
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_set;
    use crate::ops::semantic_eq;
    use crate::rational::{int, rat};

    fn abs_map() -> PLMap {
        PLMap::new(vec![int(0)], vec![Affine::new(int(-1), int(0)), Affine::new(int(1), int(0))]).unwrap()
    }

    fn n(s: &str) -> RealSet {
        normalize(&parse_set(s).unwrap()).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval_map(&PLMap::identity(), &rat(3, 7)), rat(3, 7));
        assert_eq!(eval_map(&abs_map(), &int(-2)), int(2));
        assert_eq!(eval_map(&PLMap::affine(int(2), int(1)), &rat(1, 2)), int(2));
    }

    #[test]
    fn continuity_is_validated() {
        let bad = PLMap::new(vec![int(0)], vec![Affine::new(int(1), int(1)), Affine::new(int(1), int(0))]);
        assert!(matches!(bad, Err(Error::InvalidMap(_))));
    }

    #[test]
    fn pushforward_examples() {
        let x = n("{0} | fam(n>=1){ (1/(n+1), 1/n) }");
        assert_eq!(pushforward(&PLMap::identity(), &x).unwrap(), x);
        assert_eq!(pushforward(&PLMap::affine(int(-1), int(0)), &n("(0,1)")).unwrap().to_dsl(), "(-1,0)");
        let y = pushforward(&PLMap::affine(int(2), int(0)), &x).unwrap();
        assert!(semantic_eq(&y, &n("{0} | fam(n>=1){ (2/(n+1), 2/n) }")).unwrap());
    }

    #[test]
    fn folding_map_merges_halves() {
        let y = pushforward(&abs_map(), &n("(-1,1)")).unwrap();
        assert_eq!(y.to_dsl(), "[0,1)");
    }

    #[test]
    fn schema_across_breakpoint() {
        // breakpoint at 1/10 splits the prefix from the tail
        let m = PLMap::new(vec![rat(1, 10)], vec![Affine::new(int(1), int(0)), Affine::new(int(3), rat(-1, 5))]).unwrap();
        let x = n("{0} | fam(n>=1){ {1/n} }");
        let y = pushforward(&m, &x).unwrap();
        for k in 1..40 {
            assert!(y.member(&eval_map(&m, &rat(1, k))));
        }
        assert!(y.member(&int(0)));
        assert!(!y.member(&rat(1, 2)));
    }

    #[test]
    fn constant_piece_collapses() {
        let m = PLMap::new(vec![int(0)], vec![Affine::new(int(0), int(0)), Affine::new(int(1), int(0))]).unwrap();
        let y = pushforward(&m, &n("fam(n>=1){ {-1/n} } | [1,2]")).unwrap();
        assert_eq!(y.to_dsl(), "{0} | [1,2]");
    }

    #[test]
    fn extremum_at_outer_family_piece() {
        // sup 2 is the open right end of the first piece (3/2, 2)
        let r = extremum_report(&PLMap::identity(), &n("{1} | fam(n>=1){ (1 + 1/(n+1), 1 + 1/n) }")).unwrap();
        assert_eq!(r.sup.value, "2");
        assert!(!r.sup.attained && r.sup.interval_contained);
        assert!(r.trichotomy_holds());
    }

    #[test]
    fn extremum_examples() {
        let id = PLMap::identity();
        let r = extremum_report(&id, &n("[0,1]")).unwrap();
        assert_eq!((r.sup.value.as_str(), r.sup.attained), ("1", true));
        let r = extremum_report(&id, &n("(0,1)")).unwrap();
        assert!(!r.sup.attained && r.sup.interval_contained);
        assert_eq!(r.sup.epsilon.as_deref(), Some("1"));
        let r = extremum_report(&id, &n("{0} | fam(n>=1){ {1/n} }")).unwrap();
        assert!(r.sup.attained && r.inf.attained);
        assert_eq!(r.inf.value, "0");
        let r = extremum_report(&id, &n("fam(n>=1){ {1/n} }")).unwrap();
        assert!(!r.trichotomy_holds());
    }
}
