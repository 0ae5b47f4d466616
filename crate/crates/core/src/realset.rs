//! Symbolic subsets of the real line: finitely many interval and point atoms
//! plus convergent schema families of intervals or points.

use std::fmt;

use num::bigint::BigInt;
use num::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::mobius::{strictly_below_from, IndexRange, MobiusSeq, Rel, Side};
use crate::rational::{show, Ext, Rational};

/// Interval atoms reuse the finite-algebra interval type.
pub type IntervalAtom = Interval;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SchemaKind {
    IntervalFamily { left: MobiusSeq, left_closed: bool, right: MobiusSeq, right_closed: bool },
    PointFamily { seq: MobiusSeq },
}

/// An infinite family of pieces indexed by `n >= start`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SchemaAtom {
    pub kind: SchemaKind,
    pub start: BigInt,
    pub limit: Rational,
}

impl SchemaAtom {
    pub fn interval_family(
        left: MobiusSeq,
        left_closed: bool,
        right: MobiusSeq,
        right_closed: bool,
        start: BigInt,
    ) -> Result<SchemaAtom> {
        let kind = SchemaKind::IntervalFamily { left, left_closed, right, right_closed };
        SchemaAtom::checked(kind, start)
    }

    pub fn point_family(seq: MobiusSeq, start: BigInt) -> Result<SchemaAtom> {
        SchemaAtom::checked(SchemaKind::PointFamily { seq }, start)
    }

    fn checked(kind: SchemaKind, start: BigInt) -> Result<SchemaAtom> {
        if start < BigInt::one() {
            return Err(Error::InvalidSchema("start index must be positive".into()));
        }
        let limit = match &kind {
            SchemaKind::PointFamily { seq } => {
                if !seq.is_valid_from(&start) {
                    return Err(Error::InvalidSchema(format!("{seq} has a pole at or after n = {start}")));
                }
                seq.limit().ok_or_else(|| Error::InvalidSchema(format!("{seq} has no finite limit")))?
            }
            SchemaKind::IntervalFamily { left, right, .. } => {
                for s in [left, right] {
                    if !s.is_valid_from(&start) {
                        return Err(Error::InvalidSchema(format!("{s} has a pole at or after n = {start}")));
                    }
                }
                let (ll, rl) = (left.limit(), right.limit());
                let limit = ll.clone().ok_or_else(|| Error::InvalidSchema(format!("{left} has no finite limit")))?;
                if ll != rl {
                    return Err(Error::InvalidSchema("endpoint sequences converge to different limits".into()));
                }
                if !strictly_below_from(left, right, &start) {
                    return Err(Error::InvalidSchema(format!(
                        "left endpoint {left} is not strictly below right endpoint {right} for every n >= {start}"
                    )));
                }
                limit
            }
        };
        Ok(SchemaAtom { kind, start, limit })
    }

    pub fn is_point_family(&self) -> bool {
        matches!(self.kind, SchemaKind::PointFamily { .. })
    }

    pub fn piece(&self, n: &BigInt) -> Interval {
        match &self.kind {
            SchemaKind::PointFamily { seq } => Interval::point(seq.eval(n)),
            SchemaKind::IntervalFamily { left, left_closed, right, right_closed } => {
                Interval::fin(left.eval(n), *left_closed, right.eval(n), *right_closed)
                    .expect("validated schema pieces are nonempty")
            }
        }
    }

    pub fn piece_i(&self, n: i64) -> Interval {
        self.piece(&BigInt::from(n))
    }

    /// Side of the limit the pieces approach from, for non-constant families.
    pub fn side(&self) -> Option<Side> {
        match &self.kind {
            SchemaKind::PointFamily { seq } => seq.tform().map(|t| t.side),
            SchemaKind::IntervalFamily { left, right, .. } => {
                left.tform().or_else(|| right.tform()).map(|t| t.side)
            }
        }
    }

    /// Indices of the pieces containing `q`.
    pub fn indices_containing(&self, q: &Rational) -> IndexRange {
        match &self.kind {
            SchemaKind::PointFamily { seq } => {
                seq.solve(&self.start, q, Rel::Le).intersect(&seq.solve(&self.start, q, Rel::Ge))
            }
            SchemaKind::IntervalFamily { left, left_closed, right, right_closed } => {
                let lr = if *left_closed { Rel::Le } else { Rel::Lt };
                let rr = if *right_closed { Rel::Ge } else { Rel::Gt };
                left.solve(&self.start, q, lr).intersect(&right.solve(&self.start, q, rr))
            }
        }
    }

    pub fn index_of(&self, q: &Rational) -> Option<BigInt> {
        self.indices_containing(q).first()
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.index_of(q).is_some()
    }

    pub fn pieces_closed(&self) -> bool {
        match &self.kind {
            SchemaKind::PointFamily { .. } => true,
            SchemaKind::IntervalFamily { left_closed, right_closed, .. } => *left_closed && *right_closed,
        }
    }

    /// Same family with every piece closed.
    pub fn closed_pieces(&self) -> SchemaAtom {
        let mut s = self.clone();
        if let SchemaKind::IntervalFamily { left_closed, right_closed, .. } = &mut s.kind {
            *left_closed = true;
            *right_closed = true;
        }
        s
    }

    /// Same family starting at a later index.
    pub fn from_index(&self, start: BigInt) -> SchemaAtom {
        let mut s = self.clone();
        s.start = start.max(self.start.clone());
        s
    }

    pub fn descriptor(&self) -> PieceDescriptor {
        match &self.kind {
            SchemaKind::PointFamily { .. } => PieceDescriptor { left_closed: true, right_closed: true, singleton: true },
            SchemaKind::IntervalFamily { left_closed, right_closed, .. } => {
                PieceDescriptor { left_closed: *left_closed, right_closed: *right_closed, singleton: false }
            }
        }
    }

    pub fn to_dsl(&self) -> String {
        let body = match &self.kind {
            SchemaKind::PointFamily { seq } => format!("{{{}}}", seq.to_dsl()),
            SchemaKind::IntervalFamily { left, left_closed, right, right_closed } => format!(
                "{}{}, {}{}",
                if *left_closed { "[" } else { "(" },
                left.to_dsl(),
                right.to_dsl(),
                if *right_closed { "]" } else { ")" }
            ),
        };
        format!("fam(n>={}){{ {} }}", self.start, body)
    }
}

/// Boundary openness of the pieces of a component family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PieceDescriptor {
    pub left_closed: bool,
    pub right_closed: bool,
    pub singleton: bool,
}

/// A subspace of the real line.
///
/// Values produced by [`crate::normalize`] and the other set operations are
/// in canonical form (`normal_form == true`): atoms are the maximal
/// components that do not belong to a family, schema pieces are components,
/// everything is sorted, and equal point sets have identical canonical forms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RealSet {
    pub intervals: Vec<IntervalAtom>,
    pub points: Vec<Rational>,
    pub schemas: Vec<SchemaAtom>,
    pub normal_form: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Predicates {
    pub bounded: bool,
    pub closed: bool,
    pub compact: bool,
}

/// Connected components: finitely many atoms plus one family per schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentList {
    pub finite: Vec<Interval>,
    pub families: Vec<(SchemaAtom, PieceDescriptor)>,
}

impl ComponentList {
    /// The finite component or family piece containing `q`.
    pub fn locate(&self, q: &Rational) -> Option<ComponentRef> {
        if let Some(i) = self.finite.iter().position(|c| c.contains(q)) {
            return Some(ComponentRef::Finite(i));
        }
        self.families
            .iter()
            .enumerate()
            .find_map(|(f, (s, _))| s.index_of(q).map(|n| ComponentRef::Piece(f, n)))
    }

    pub fn component(&self, r: &ComponentRef) -> Interval {
        match r {
            ComponentRef::Finite(i) => self.finite[*i].clone(),
            ComponentRef::Piece(f, n) => self.families[*f].0.piece(n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentRef {
    Finite(usize),
    Piece(usize, BigInt),
}

impl RealSet {
    pub fn empty() -> RealSet {
        RealSet { intervals: vec![], points: vec![], schemas: vec![], normal_form: true }
    }

    /// An unnormalized set from raw parts.
    pub fn raw(intervals: Vec<IntervalAtom>, points: Vec<Rational>, schemas: Vec<SchemaAtom>) -> RealSet {
        RealSet { intervals, points, schemas, normal_form: false }
    }

    pub fn interval(iv: Interval) -> RealSet {
        RealSet::raw(vec![iv], vec![], vec![])
    }

    pub fn point(q: Rational) -> RealSet {
        RealSet::raw(vec![], vec![q], vec![])
    }

    pub fn schema(s: SchemaAtom) -> RealSet {
        RealSet::raw(vec![], vec![], vec![s])
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty() && self.schemas.is_empty()
    }

    /// Exact membership. Schema containment is solved by monotone inversion
    /// of the endpoint sequences.
    pub fn member(&self, q: &Rational) -> bool {
        self.intervals.iter().any(|i| i.contains(q))
            || self.points.iter().any(|p| p == q)
            || self.schemas.iter().any(|s| s.contains(q))
    }

    /// Predicates of a normalized set.
    pub fn predicates(&self) -> Predicates {
        let bounded = self.intervals.iter().all(Interval::is_bounded);
        let closed = self.intervals.iter().all(Interval::is_closed)
            && self.schemas.iter().all(|s| s.pieces_closed() && self.member(&s.limit));
        Predicates { bounded, closed, compact: bounded && closed }
    }

    /// Components of a normalized set.
    pub fn components(&self) -> ComponentList {
        let mut finite: Vec<Interval> =
            self.intervals.iter().cloned().chain(self.points.iter().cloned().map(Interval::point)).collect();
        finite.sort();
        let families = self.schemas.iter().map(|s| (s.clone(), s.descriptor())).collect();
        ComponentList { finite, families }
    }

    /// Points of the set every neighborhood of which meets infinitely many
    /// components. On a normalized set these are the schema limits that
    /// belong to the set.
    pub fn local_connectedness_defects(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> =
            self.schemas.iter().map(|s| s.limit.clone()).filter(|l| self.member(l)).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Supremum of a normalized set and whether it is attained.
    pub fn sup(&self) -> Option<(Ext, bool)> {
        let mut cands: Vec<(Ext, bool)> = Vec::new();
        cands.extend(self.intervals.iter().map(|i| (i.hi.clone(), i.hi_closed)));
        cands.extend(self.points.iter().map(|p| (Ext::Fin(p.clone()), true)));
        for s in &self.schemas {
            match s.side() {
                Some(Side::Below) | None => cands.push((Ext::Fin(s.limit.clone()), false)),
                Some(Side::Above) => {
                    let first = s.piece(&s.start);
                    cands.push((first.hi.clone(), first.hi_closed));
                }
            }
        }
        extreme(cands, true)
    }

    pub fn inf(&self) -> Option<(Ext, bool)> {
        let mut cands: Vec<(Ext, bool)> = Vec::new();
        cands.extend(self.intervals.iter().map(|i| (i.lo.clone(), i.lo_closed)));
        cands.extend(self.points.iter().map(|p| (Ext::Fin(p.clone()), true)));
        for s in &self.schemas {
            match s.side() {
                Some(Side::Above) | None => cands.push((Ext::Fin(s.limit.clone()), false)),
                Some(Side::Below) => {
                    let first = s.piece(&s.start);
                    cands.push((first.lo.clone(), first.lo_closed));
                }
            }
        }
        extreme(cands, false)
    }

    /// Bounds used when nothing better is known: the hull of all atoms and
    /// the first pieces and limits of all schemas.
    pub fn finite_span(&self) -> Option<(Rational, Rational)> {
        let mut vals: Vec<Rational> = self.points.clone();
        for i in &self.intervals {
            vals.extend(i.lo.fin().cloned());
            vals.extend(i.hi.fin().cloned());
        }
        for s in &self.schemas {
            let p = s.piece(&s.start);
            vals.extend(p.lo.fin().cloned());
            vals.extend(p.hi.fin().cloned());
            vals.push(s.limit.clone());
        }
        let lo = vals.iter().min()?.clone();
        let hi = vals.iter().max()?.clone();
        Some((lo, hi))
    }

    pub fn to_dsl(&self) -> String {
        if self.is_empty() {
            return "empty".into();
        }
        let mut atoms: Vec<Interval> =
            self.intervals.iter().cloned().chain(self.points.iter().cloned().map(Interval::point)).collect();
        atoms.sort();
        let mut terms: Vec<String> = atoms.iter().map(interval_dsl).collect();
        terms.extend(self.schemas.iter().map(SchemaAtom::to_dsl));
        terms.join(" | ")
    }

    /// Whether some point lies strictly beyond `limit` on the given side
    /// within every neighborhood of `limit`, i.e. the set accumulates at
    /// `limit` from that side.
    pub fn accumulates_at(&self, limit: &Rational, side: Side) -> bool {
        let within = |iv: &Interval| match side {
            Side::Below => iv.lo < Ext::Fin(limit.clone()) && iv.hi >= Ext::Fin(limit.clone()),
            Side::Above => iv.hi > Ext::Fin(limit.clone()) && iv.lo <= Ext::Fin(limit.clone()),
        };
        self.intervals.iter().any(within)
            || self.schemas.iter().any(|s| &s.limit == limit && s.side() == Some(side))
    }
}

fn extreme(cands: Vec<(Ext, bool)>, max: bool) -> Option<(Ext, bool)> {
    let best = if max {
        cands.iter().map(|c| c.0.clone()).max()?
    } else {
        cands.iter().map(|c| c.0.clone()).min()?
    };
    let attained = best.is_finite() && cands.iter().any(|(v, a)| *v == best && *a);
    Some((best, attained))
}

pub fn interval_dsl(iv: &Interval) -> String {
    if let Some(p) = iv.point_value() {
        return format!("{{{}}}", show(p));
    }
    format!(
        "{}{},{}{}",
        if iv.lo_closed { "[" } else { "(" },
        iv.lo,
        iv.hi,
        if iv.hi_closed { "]" } else { ")" }
    )
}

impl fmt::Display for RealSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dsl())
    }
}

/// Whether `q` is on the strict `side` of `limit`.
pub fn on_side(q: &Rational, limit: &Rational, side: Side) -> bool {
    match side {
        Side::Below => q < limit,
        Side::Above => q > limit,
    }
}

/// Absolute distance.
pub fn dist(a: &Rational, b: &Rational) -> Rational {
    (a - b).abs()
}
