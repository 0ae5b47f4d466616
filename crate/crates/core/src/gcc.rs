//! Deciders and witnesses for GCC and CCC subspaces of the line.
//!
//! A subspace is GCC when it is not a union of infinitely many disjoint
//! nonempty open subsets, and CCC when some compact subspace meets every
//! connected component. On the line the two coincide.

use std::cmp::Ordering;

use num::bigint::BigInt;
use num::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::mobius::{strictly_below_from, MobiusSeq, Rel, Side, TForm};
use crate::ops::{closure, complement_in, difference, intersect, is_open_in, normalize, semantic_subset, union_all};
use crate::rational::{from_big, int, rat, show, Ext, Rational};
use crate::realset::{ComponentRef, RealSet, SchemaAtom, SchemaKind};

fn normalized(x: &RealSet) -> Result<RealSet> {
    if x.normal_form {
        Ok(x.clone())
    } else {
        normalize(x)
    }
}

// ---------------------------------------------------------------- transversal

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectorPolicy {
    Midpoint,
    LeftmostProbe,
    SeededRandom(u64),
    /// Midpoints for finite components, reciprocal-coordinate midpoints for
    /// family pieces (a Möbius sequence).
    ReciprocalMidpoint,
}

impl SelectorPolicy {
    /// Weight `w` in `(0, 1)` placing the interior point at `lo + w (hi - lo)`.
    fn weight(self, component: u64) -> Rational {
        match self {
            SelectorPolicy::Midpoint | SelectorPolicy::ReciprocalMidpoint => rat(1, 2),
            SelectorPolicy::LeftmostProbe => rat(1, 4),
            SelectorPolicy::SeededRandom(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ component.wrapping_mul(0x9E37_79B9_7F4A_7C15));
                rat(rng.gen_range(1..1024), 1024)
            }
        }
    }
}

/// `n -> left(n) + w (right(n) - left(n))`, a ratio of quadratics in `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedSeq {
    pub left: MobiusSeq,
    pub right: MobiusSeq,
    pub weight: Rational,
}

impl WeightedSeq {
    pub fn eval(&self, n: &BigInt) -> Rational {
        let l = self.left.eval(n);
        let r = self.right.eval(n);
        &l + &self.weight * (r - &l)
    }
}

/// Interior selection of a family, indexed like the family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InteriorSelection {
    Weighted(WeightedSeq),
    Mobius(MobiusSeq),
}

impl InteriorSelection {
    pub fn eval(&self, n: &BigInt) -> Rational {
        match self {
            InteriorSelection::Weighted(w) => w.eval(n),
            InteriorSelection::Mobius(m) => m.eval(n),
        }
    }
}

/// Selections for one family of components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransversalFamily {
    pub schema: SchemaAtom,
    /// Closed endpoint sequences (the non-interior points of each piece).
    pub boundary: Vec<MobiusSeq>,
    /// The interior selection, absent for point families.
    pub interior: Option<InteriorSelection>,
}

impl TransversalFamily {
    pub fn selected(&self, n: &BigInt) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.boundary.iter().map(|b| b.eval(n)).collect();
        out.extend(self.interior.as_ref().map(|w| w.eval(n)));
        out.sort();
        out
    }

    fn contains(&self, q: &Rational) -> bool {
        let start = &self.schema.start;
        let hits = |s: &MobiusSeq| !s.solve(start, q, Rel::Le).intersect(&s.solve(start, q, Rel::Ge)).is_empty();
        if self.boundary.iter().any(hits) {
            return true;
        }
        match (&self.interior, self.schema.index_of(q)) {
            (Some(w), Some(n)) => w.eval(&n) == *q,
            _ => false,
        }
    }
}

/// The union of per-component selections: all non-interior points of each
/// component plus one interior point when the interior is nonempty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transversal {
    pub policy: SelectorPolicy,
    /// Selections of the finite components, in component order.
    pub finite: Vec<Vec<Rational>>,
    pub families: Vec<TransversalFamily>,
}

impl Transversal {
    pub fn selected(&self, c: &ComponentRef) -> Vec<Rational> {
        match c {
            ComponentRef::Finite(i) => self.finite[*i].clone(),
            ComponentRef::Piece(f, n) => self.families[*f].selected(n),
        }
    }

    /// Exact membership in the union of selections.
    pub fn contains(&self, q: &Rational) -> bool {
        self.finite.iter().flatten().any(|p| p == q) || self.families.iter().any(|f| f.contains(q))
    }

    /// Points the selections accumulate at.
    pub fn accumulation_points(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self.families.iter().map(|f| f.schema.limit.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Compact iff closed: the selections are bounded, so only the
    /// accumulation points need to belong to the set.
    pub fn is_compact(&self) -> bool {
        self.accumulation_points().iter().all(|l| self.contains(l))
    }

    /// Finite selections, family selections for indices below `depth`, and
    /// the accumulation points that belong to the set.
    pub fn truncated_points(&self, depth: u32) -> Vec<Rational> {
        let mut v: Vec<Rational> = self.finite.iter().flatten().cloned().collect();
        for f in &self.families {
            let mut n = f.schema.start.clone();
            for _ in 0..depth {
                v.extend(f.selected(&n));
                n += 1;
            }
        }
        v.extend(self.accumulation_points().into_iter().filter(|l| self.contains(l)));
        v.sort();
        v.dedup();
        v
    }

    /// DSL-like description; interior family selections are written as
    /// weighted combinations of their endpoint sequences.
    pub fn describe(&self) -> Vec<String> {
        let mut out: Vec<String> = self.finite.iter().flatten().map(|p| format!("{{{}}}", show(p))).collect();
        for f in &self.families {
            let s = &f.schema.start;
            for b in &f.boundary {
                out.push(format!("fam(n>={s}){{ {{{b}}} }}"));
            }
            match &f.interior {
                Some(InteriorSelection::Weighted(w)) => {
                    out.push(format!("fam(n>={s}){{ {{{} + {}*({} - {})}} }}", w.left, show(&w.weight), w.right, w.left))
                }
                Some(InteriorSelection::Mobius(m)) => out.push(format!("fam(n>={s}){{ {{{m}}} }}")),
                None => {}
            }
        }
        out
    }
}

pub(crate) fn interior_pick(c: &Interval, w: &Rational) -> Option<Rational> {
    if c.is_point() {
        return None;
    }
    Some(match (&c.lo, &c.hi) {
        (Ext::Fin(a), Ext::Fin(b)) => a + w * (b - a),
        (Ext::Fin(a), _) => a + w.recip(),
        (_, Ext::Fin(b)) => b - w.recip(),
        _ => w - rat(1, 2),
    })
}

pub fn build_transversal(x: &RealSet, policy: SelectorPolicy) -> Result<Transversal> {
    let x = normalized(x)?;
    let comps = x.components();
    let mut finite = Vec::new();
    for (i, c) in comps.finite.iter().enumerate() {
        let mut sel: Vec<Rational> = Vec::new();
        if c.lo_closed {
            sel.extend(c.lo.fin().cloned());
        }
        if c.hi_closed && !c.is_point() {
            sel.extend(c.hi.fin().cloned());
        }
        sel.extend(interior_pick(c, &policy.weight(i as u64)));
        sel.sort();
        finite.push(sel);
    }
    let mut families = Vec::new();
    for (f, (s, _)) in comps.families.iter().enumerate() {
        let fam = match &s.kind {
            SchemaKind::PointFamily { seq } => TransversalFamily { schema: s.clone(), boundary: vec![seq.clone()], interior: None },
            SchemaKind::IntervalFamily { left, left_closed, right, right_closed } => {
                let mut boundary = Vec::new();
                if *left_closed {
                    boundary.push(left.clone());
                }
                if *right_closed {
                    boundary.push(right.clone());
                }
                let interior = if policy == SelectorPolicy::ReciprocalMidpoint {
                    let tf = t_mid(s).ok_or_else(|| Error::Unnormalizable("non-canonical family".into()))?;
                    InteriorSelection::Mobius(MobiusSeq::from_tform(&tf))
                } else {
                    let weight = policy.weight((1u64 << 32) + f as u64);
                    InteriorSelection::Weighted(WeightedSeq { left: left.clone(), right: right.clone(), weight })
                };
                let interior = Some(interior);
                TransversalFamily { schema: s.clone(), boundary, interior }
            }
        };
        families.push(fam);
    }
    Ok(Transversal { policy, finite, families })
}

#[derive(Clone, Debug)]
pub struct TransversalVerdict {
    pub verdict: bool,
    pub transversal: Transversal,
}

/// GCC iff the transversal is compact.
pub fn decide_gcc_transversal(x: &RealSet) -> Result<TransversalVerdict> {
    decide_gcc_transversal_with(x, SelectorPolicy::Midpoint)
}

pub fn decide_gcc_transversal_with(x: &RealSet, policy: SelectorPolicy) -> Result<TransversalVerdict> {
    let transversal = build_transversal(x, policy)?;
    Ok(TransversalVerdict { verdict: transversal.is_compact(), transversal })
}

// ------------------------------------------------------- alternating sequences

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// A monotone sequence alternating between the complement (odd terms) and
/// the set (even terms) whose limit is missing from the set:
/// `odd(1), even(1), odd(2), even(2), ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingWitness {
    pub direction: Direction,
    pub even_terms: MobiusSeq,
    pub odd_terms: MobiusSeq,
    pub limit: Rational,
    pub limit_in_x: bool,
}

impl AlternatingWitness {
    /// Checks the first `terms` pairs exactly.
    pub fn check_prefix(&self, x: &RealSet, terms: u32) -> bool {
        let mut prev: Option<Rational> = None;
        for k in 1..=terms as i64 {
            let o = self.odd_terms.eval_i(k);
            let e = self.even_terms.eval_i(k);
            if x.member(&o) || !x.member(&e) {
                return false;
            }
            for v in [o, e] {
                if let Some(p) = &prev {
                    let ok = match self.direction {
                        Direction::Increasing => *p < v,
                        Direction::Decreasing => *p > v,
                    };
                    if !ok {
                        return false;
                    }
                }
                prev = Some(v);
            }
        }
        x.member(&self.limit) == self.limit_in_x
    }

    /// Structural certificate: strict interleaving for every index and a
    /// shared limit.
    pub fn interleaves(&self) -> bool {
        let one = BigInt::one();
        let (o, e) = (&self.odd_terms, &self.even_terms);
        let o_next = o.shifted(&one);
        let same_limit = o.limit() == Some(self.limit.clone()) && e.limit() == Some(self.limit.clone());
        same_limit
            && match self.direction {
                Direction::Increasing => strictly_below_from(o, e, &one) && strictly_below_from(e, &o_next, &one),
                Direction::Decreasing => strictly_below_from(e, o, &one) && strictly_below_from(&o_next, e, &one),
            }
    }
}

#[derive(Clone, Debug)]
pub struct SequenceVerdict {
    pub verdict: bool,
    pub witness: Option<AlternatingWitness>,
}

/// Reciprocal form of the piece midpoints of a canonical family.
fn t_mid(s: &SchemaAtom) -> Option<TForm> {
    match &s.kind {
        SchemaKind::PointFamily { seq } => seq.tform(),
        SchemaKind::IntervalFamily { left, right, .. } => {
            let (l, r) = (left.tform()?, right.tform()?);
            if l.alpha != r.alpha || l.side != r.side || l.limit != r.limit {
                return None;
            }
            Some(TForm { beta: (&l.beta + &r.beta) / int(2), ..l })
        }
    }
}

/// Midpoint selection in reciprocal coordinates: one point per piece, a
/// Möbius sequence.
pub fn mobius_selection(s: &SchemaAtom) -> Option<MobiusSeq> {
    let tf = t_mid(s)?;
    let m = MobiusSeq::from_tform(&tf).shifted(&(&s.start - BigInt::one()));
    Some(m)
}

/// GCC iff no monotone sequence alternating between the set and its
/// complement converges outside the set. Witnesses are built from a family
/// of the set and an interleaved family of its complement at the same limit.
pub fn decide_gcc_sequences(x: &RealSet) -> Result<SequenceVerdict> {
    let x = normalized(x)?;
    let bad = x.schemas.iter().find(|s| !x.member(&s.limit));
    let Some(s) = bad else {
        return Ok(SequenceVerdict { verdict: true, witness: None });
    };
    let witness = alternating_witness(&x, s)?;
    Ok(SequenceVerdict { verdict: false, witness: Some(witness) })
}

fn alternating_witness(x: &RealSet, s: &SchemaAtom) -> Result<AlternatingWitness> {
    let unsupported = || Error::Unnormalizable(format!("no interleaving complement family at {}", show(&s.limit)));
    let even = t_mid(s).ok_or_else(unsupported)?;
    let comp = complement_in(x, None)?;
    let odd = comp
        .schemas
        .iter()
        .filter(|c| c.limit == s.limit)
        .filter_map(|c| t_mid(c).map(|t| (c, t)))
        .find(|(_, t)| t.side == even.side && t.alpha == even.alpha)
        .ok_or_else(unsupported)?;
    let (c, odd) = odd;
    // t_o(m) = alpha m + beta_o for m >= c.start; t_e(n) likewise for n >= s.start.
    // Pick n0 and the largest m0 with t_o(m0) < t_e(n0).
    let alpha = &even.alpha;
    let mut n0 = s.start.clone();
    let m0 = loop {
        let te = even.t(&Rational::from_integer(n0.clone()));
        let m = crate::rational::ceil_int(&((&te - &odd.beta) / alpha)) - 1;
        if m >= c.start {
            break m;
        }
        n0 += 1;
    };
    let one = BigInt::one();
    let even_terms = MobiusSeq::from_tform(&even).shifted(&(&n0 - &one));
    let odd_terms = MobiusSeq::from_tform(&odd).shifted(&(&m0 - &one));
    let direction = match even.side {
        Side::Below => Direction::Increasing,
        Side::Above => Direction::Decreasing,
    };
    Ok(AlternatingWitness { direction, even_terms, odd_terms, limit: s.limit.clone(), limit_in_x: x.member(&s.limit) })
}

// ------------------------------------------------------------------------ CCC

#[derive(Clone, Debug)]
pub struct CccVerdict {
    pub verdict: bool,
    pub witness_k: Option<RealSet>,
}

/// A compact subset meeting every component, when one exists.
pub fn decide_ccc(x: &RealSet) -> Result<CccVerdict> {
    let x = normalized(x)?;
    if !decide_gcc_transversal(&x)?.verdict {
        return Ok(CccVerdict { verdict: false, witness_k: None });
    }
    let k = compact_meeting_set(&x)?;
    Ok(CccVerdict { verdict: true, witness_k: Some(k) })
}

/// One point per component (family pieces use the reciprocal midpoint)
/// plus every family limit.
fn compact_meeting_set(x: &RealSet) -> Result<RealSet> {
    let comps = x.components();
    let mut raw = RealSet::raw(vec![], vec![], vec![]);
    for c in &comps.finite {
        raw.points.push(match c.point_value() {
            Some(p) => p.clone(),
            None => interior_pick(c, &rat(1, 2)).expect("nondegenerate"),
        });
    }
    for (s, _) in &comps.families {
        let m = mobius_selection(s).ok_or_else(|| Error::Unnormalizable("non-canonical family".into()))?;
        raw.schemas.push(SchemaAtom::point_family(m, BigInt::one())?);
        raw.points.push(s.limit.clone());
    }
    normalize(&raw)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KCheck {
    pub compact: bool,
    pub subset: bool,
    pub meets_every_component: bool,
}

impl KCheck {
    pub fn ok(&self) -> bool {
        self.compact && self.subset && self.meets_every_component
    }
}

/// Symbolic soundness check of a CCC witness against `x`.
pub fn verify_witness_k(x: &RealSet, k: &RealSet) -> Result<KCheck> {
    let x = normalized(x)?;
    let k = normalized(k)?;
    let compact = k.predicates().compact;
    let subset = semantic_subset(&k, &x)?;
    let comps = x.components();
    let mut meets = true;
    for c in &comps.finite {
        meets &= !intersect(&k, &RealSet::interval(c.clone()))?.is_empty();
    }
    for (s, _) in &comps.families {
        meets &= family_met(&k, s)?;
    }
    Ok(KCheck { compact, subset, meets_every_component: meets })
}

/// Whether every piece of `s` meets `k`: some point family of `k` (or a
/// tail of one) lands inside piece `n` for every `n`, after finitely many
/// pieces checked directly.
fn family_met(k: &RealSet, s: &SchemaAtom) -> Result<bool> {
    let pieces = RealSet::schema(s.clone());
    let missing = difference(&pieces, k)?;
    if missing.is_empty() {
        return Ok(true);
    }
    // otherwise look for a selection family p and an integer step r with
    // p(r (n - start) + n0) in piece n
    let Some(st) = t_mid(s) else { return Ok(false) };
    for ks in &k.schemas {
        let SchemaKind::PointFamily { seq } = &ks.kind else { continue };
        let Some(pt) = seq.tform() else { continue };
        if pt.limit != st.limit || pt.side != st.side {
            continue;
        }
        let r = &st.alpha / &pt.alpha;
        if !r.is_integer() {
            continue;
        }
        // early selections may have been absorbed into finite points of k
        let mut head = s.clone();
        for _ in 0..16 {
            if let Some(n0) = seq_index_for_piece(&head, seq, &ks.start) {
                let beta = &pt.alpha * (from_big(n0) - &r * from_big(head.start.clone())) + &pt.beta;
                let sub = MobiusSeq::from_tform(&TForm { alpha: st.alpha.clone(), beta, ..pt.clone() });
                if within_pieces(&head, &sub) {
                    return Ok(true);
                }
            }
            if intersect(k, &RealSet::interval(head.piece(&head.start)))?.is_empty() {
                break;
            }
            head.start += 1;
        }
    }
    Ok(false)
}

/// Index of `seq` whose value lies in the first piece of `s`.
fn seq_index_for_piece(s: &SchemaAtom, seq: &MobiusSeq, start: &BigInt) -> Option<BigInt> {
    let first = s.piece(&s.start);
    let lo = first.lo.fin()?.clone();
    let hi = first.hi.fin()?.clone();
    let r = seq.solve(start, &lo, Rel::Ge).intersect(&seq.solve(start, &hi, Rel::Le));
    r.first()
}

/// Whether `p(n)` lies in piece `n` of `s` for every `n >= s.start`.
fn within_pieces(s: &SchemaAtom, p: &MobiusSeq) -> bool {
    let st = &s.start;
    match &s.kind {
        SchemaKind::PointFamily { seq } => seq == p || (seq.canonical() == p.canonical()),
        SchemaKind::IntervalFamily { left, left_closed, right, right_closed } => {
            let lo_ok = strictly_below_from(left, p, st) || (*left_closed && left.canonical() == p.canonical());
            let hi_ok = strictly_below_from(p, right, st) || (*right_closed && right.canonical() == p.canonical());
            lo_ok && hi_ok
        }
    }
}

// ---------------------------------------------------------------------- covers

/// A family of cover members `piece(n) ∩ X`, with an optional certificate
/// `witness(n) ∈ piece(n) ∩ X` that every member is nonempty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverFamily {
    pub template: SchemaAtom,
    pub witness: Option<MobiusSeq>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointOpenCover {
    pub finite_members: Vec<RealSet>,
    pub families: Vec<CoverFamily>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MemberRef {
    Finite { index: usize },
    Family { family: usize, n: String },
}

impl DisjointOpenCover {
    pub fn member(&self, x: &RealSet, r: &MemberRef) -> Result<RealSet> {
        match r {
            MemberRef::Finite { index } => Ok(self.finite_members[*index].clone()),
            MemberRef::Family { family, n } => {
                let n: BigInt = n.parse().map_err(|_| Error::Domain(format!("bad index {n}")))?;
                let piece = self.families[*family].template.piece(&n);
                intersect(&RealSet::interval(piece), x)
            }
        }
    }

    /// Every family member is certified nonempty by its witness sequence.
    pub fn certified_infinite(&self, x: &RealSet) -> Result<bool> {
        if self.families.is_empty() {
            return Ok(false);
        }
        for f in &self.families {
            let Some(w) = &f.witness else { return Ok(false) };
            let wset = RealSet::schema(SchemaAtom::point_family(w.clone(), f.template.start.clone())?);
            if !semantic_subset(&wset, x)? || !within_pieces(&f.template, w) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn describe(&self) -> Vec<String> {
        let mut v: Vec<String> = self.finite_members.iter().map(|m| m.to_dsl()).collect();
        v.extend(self.families.iter().map(|f| format!("{} & X", f.template.to_dsl())));
        v
    }
}

/// A disjoint open cover with infinitely many nonempty members, built
/// between consecutive odd terms of an alternating witness.
pub fn witness_non_gcc_cover(x: &RealSet) -> Result<DisjointOpenCover> {
    let x = normalized(x)?;
    let seq = decide_gcc_sequences(&x)?;
    let w = match seq.witness {
        Some(w) if !seq.verdict => w,
        _ => return Err(Error::NotApplicable("the set is GCC".into())),
    };
    let one = BigInt::one();
    let first_odd = w.odd_terms.eval(&one);
    let (outer, beyond) = match w.direction {
        Direction::Increasing => (
            Interval::new(Ext::NegInf, false, Ext::Fin(first_odd), false),
            Interval::new(Ext::Fin(w.limit.clone()), false, Ext::PosInf, false),
        ),
        Direction::Decreasing => (
            Interval::new(Ext::Fin(first_odd), false, Ext::PosInf, false),
            Interval::new(Ext::NegInf, false, Ext::Fin(w.limit.clone()), false),
        ),
    };
    let mut finite_members = Vec::new();
    for iv in [outer, beyond].into_iter().flatten() {
        let m = intersect(&RealSet::interval(iv), &x)?;
        if !m.is_empty() {
            finite_members.push(m);
        }
    }
    let next = w.odd_terms.shifted(&one);
    let template = match w.direction {
        Direction::Increasing => SchemaAtom::interval_family(w.odd_terms.clone(), false, next, false, one)?,
        Direction::Decreasing => SchemaAtom::interval_family(next, false, w.odd_terms.clone(), false, one)?,
    };
    Ok(DisjointOpenCover { finite_members, families: vec![CoverFamily { template, witness: Some(w.even_terms) }] })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverCheck {
    pub covers: bool,
    pub disjoint: bool,
    pub open_in_x: bool,
    pub finite_subcover: Option<Vec<MemberRef>>,
}

impl CoverCheck {
    pub fn valid(&self) -> bool {
        self.covers && self.disjoint && self.open_in_x
    }
}

/// Points at which `x` accumulates from the given side (the side the
/// points are approached from).
fn one_sided_closure(x: &RealSet, from: Side) -> Result<RealSet> {
    let mut raw = RealSet::raw(vec![], vec![], vec![]);
    let half_open = |iv: &Interval| match from {
        // approached from above: points p with x ∩ (p, p + d) nonempty
        Side::Above => Interval::new(iv.lo.clone(), iv.lo.is_finite(), iv.hi.clone(), false),
        Side::Below => Interval::new(iv.lo.clone(), false, iv.hi.clone(), iv.hi.is_finite()),
    };
    raw.intervals.extend(x.intervals.iter().filter_map(half_open));
    for s in &x.schemas {
        if let SchemaKind::IntervalFamily { left, right, .. } = &s.kind {
            let (lc, rc) = match from {
                Side::Above => (true, false),
                Side::Below => (false, true),
            };
            raw.schemas.push(SchemaAtom::interval_family(left.clone(), lc, right.clone(), rc, s.start.clone())?);
        }
        let limit_side = s.side().expect("canonical families move");
        if limit_side == from {
            raw.points.push(s.limit.clone());
        }
    }
    normalize(&raw)
}

fn endpoint_points(s: &SchemaAtom, right_end: bool) -> Result<RealSet> {
    let seq = match &s.kind {
        SchemaKind::PointFamily { .. } => return Ok(RealSet::empty()),
        SchemaKind::IntervalFamily { left, right, .. } => if right_end { right } else { left },
    };
    if seq.is_constant() {
        return normalize(&RealSet::point(seq.eval(&s.start)));
    }
    normalize(&RealSet::schema(SchemaAtom::point_family(seq.clone(), s.start.clone())?))
}

/// Whether every member `piece(n) ∩ x` of a family is open in `x`.
fn family_open(x: &RealSet, s: &SchemaAtom) -> Result<bool> {
    let w = normalize(&RealSet::schema(s.clone()))?;
    let wx = intersect(&w, x)?;
    let outside = difference(x, &w)?;
    if !intersect(&wx, &closure(&outside)?)?.is_empty() {
        return Ok(false);
    }
    let SchemaKind::IntervalFamily { left_closed, right_closed, .. } = &s.kind else {
        return Ok(true);
    };
    // shared endpoints of distinct pieces
    let shared = intersect(&endpoint_points(s, true)?, &endpoint_points(s, false)?)?;
    let shared = intersect(&shared, x)?;
    if shared.is_empty() {
        return Ok(true);
    }
    // a closed right end is a problem when x accumulates there from above,
    // a closed left end when it accumulates from below
    let mut bad = RealSet::empty();
    if *right_closed {
        bad = intersect(&shared, &one_sided_closure(x, Side::Above)?)?;
    }
    if *left_closed {
        let b = intersect(&shared, &one_sided_closure(x, Side::Below)?)?;
        bad = union_all([&bad, &b])?;
    }
    Ok(bad.is_empty())
}

pub fn verify_cover(x: &RealSet, cover: &DisjointOpenCover) -> Result<CoverCheck> {
    let x = normalized(x)?;
    let fam_sets: Vec<RealSet> =
        cover.families.iter().map(|f| intersect(&RealSet::schema(f.template.clone()), &x)).collect::<Result<_>>()?;
    let all: Vec<&RealSet> = cover.finite_members.iter().chain(fam_sets.iter()).collect();
    let covers = semantic_subset(&x, &union_all(all.iter().copied())?)?;
    let mut disjoint = true;
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            disjoint &= intersect(all[i], all[j])?.is_empty();
        }
    }
    let mut open_in_x = true;
    for m in &cover.finite_members {
        open_in_x &= semantic_subset(m, &x)? && is_open_in(m, &x)?;
    }
    for f in &cover.families {
        open_in_x &= family_open(&x, &f.template)?;
    }
    let finite_subcover = if covers && disjoint && open_in_x { finite_subcover(&x, cover, &fam_sets)? } else { None };
    Ok(CoverCheck { covers, disjoint, open_in_x, finite_subcover })
}

/// The nonempty members, when only finitely many are nonempty.
fn finite_subcover(x: &RealSet, cover: &DisjointOpenCover, fam_sets: &[RealSet]) -> Result<Option<Vec<MemberRef>>> {
    let mut out = Vec::new();
    for (i, m) in cover.finite_members.iter().enumerate() {
        if !m.is_empty() {
            out.push(MemberRef::Finite { index: i });
        }
    }
    for (fi, (f, y)) in cover.families.iter().zip(fam_sets).enumerate() {
        if y.is_empty() {
            continue;
        }
        let s = &f.template;
        let side = s.side().expect("moving family");
        // the last index whose piece can meet y
        let end = match side {
            Side::Below => {
                let (sup, attained) = y.sup().expect("nonempty");
                let sup = sup.fin().expect("bounded by the limit").clone();
                if sup == s.limit && !attained {
                    return Ok(None);
                }
                let left = match &s.kind {
                    SchemaKind::PointFamily { seq } => seq,
                    SchemaKind::IntervalFamily { left, .. } => left,
                };
                left.solve(&s.start, &sup, Rel::Gt).lo
            }
            Side::Above => {
                let (inf, attained) = y.inf().expect("nonempty");
                let inf = inf.fin().expect("bounded by the limit").clone();
                if inf == s.limit && !attained {
                    return Ok(None);
                }
                let right = match &s.kind {
                    SchemaKind::PointFamily { seq } => seq,
                    SchemaKind::IntervalFamily { right, .. } => right,
                };
                right.solve(&s.start, &inf, Rel::Lt).lo
            }
        };
        crate::decomp::budget_check(&(&end - &s.start))?;
        let mut n = s.start.clone();
        while n < end {
            if !intersect(&RealSet::interval(s.piece(&n)), x)?.is_empty() {
                out.push(MemberRef::Family { family: fi, n: n.to_string() });
            }
            n += 1;
        }
    }
    Ok(Some(out))
}

/// A continuous map onto the positive integers, constant on each cover
/// member: the nonempty finite members take `1..=m`, family member `n`
/// takes `m + n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurjectionOntoN {
    pub x: RealSet,
    pub cover: DisjointOpenCover,
    finite_labels: Vec<usize>,
}

pub fn cover_to_surjection(x: &RealSet, cover: &DisjointOpenCover) -> Result<SurjectionOntoN> {
    if cover.families.len() != 1 {
        return Err(Error::NotApplicable("indexing needs exactly one member family".into()));
    }
    let finite_labels = cover.finite_members.iter().enumerate().filter(|(_, m)| !m.is_empty()).map(|(i, _)| i).collect();
    Ok(SurjectionOntoN { x: normalized(x)?, cover: cover.clone(), finite_labels })
}

impl SurjectionOntoN {
    pub fn eval(&self, q: &Rational) -> Result<BigInt> {
        if !self.x.member(q) {
            return Err(Error::Domain(format!("{} is not in the set", show(q))));
        }
        for (label, &i) in self.finite_labels.iter().enumerate() {
            if self.cover.finite_members[i].member(q) {
                return Ok(BigInt::from(label + 1));
            }
        }
        let t = &self.cover.families[0].template;
        let n = t.index_of(q).ok_or_else(|| Error::Domain(format!("{} is not covered", show(q))))?;
        Ok(BigInt::from(self.finite_labels.len()) + n - &t.start + BigInt::one())
    }

    /// The member sent to `k`.
    pub fn preimage(&self, k: &BigInt) -> Result<RealSet> {
        let m = BigInt::from(self.finite_labels.len());
        if k < &BigInt::one() {
            return Err(Error::Domain(format!("{k} is not a positive integer")));
        }
        if k <= &m {
            let i: usize = (k - BigInt::one()).try_into().expect("small");
            return Ok(self.cover.finite_members[self.finite_labels[i]].clone());
        }
        let t = &self.cover.families[0].template;
        let n = k - &m - BigInt::one() + &t.start;
        intersect(&RealSet::interval(t.piece(&n)), &self.x)
    }
}

// ---------------------------------------------------------------- clopen chains

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Fixed(Ext),
    Moving(MobiusSeq),
}

impl Endpoint {
    fn at(&self, n: &BigInt) -> Ext {
        match self {
            Endpoint::Fixed(e) => e.clone(),
            Endpoint::Moving(m) => Ext::Fin(m.eval(n)),
        }
    }

    fn limit(&self) -> Ext {
        match self {
            Endpoint::Fixed(e) => e.clone(),
            Endpoint::Moving(m) => Ext::Fin(m.limit().expect("finite limit")),
        }
    }
}

/// Interval with possibly moving endpoints, indexed by `n >= start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MovingInterval {
    pub lo: Endpoint,
    pub lo_closed: bool,
    pub hi: Endpoint,
    pub hi_closed: bool,
    pub start: BigInt,
}

impl MovingInterval {
    pub fn at(&self, n: &BigInt) -> Option<Interval> {
        Interval::new(self.lo.at(n), self.lo_closed, self.hi.at(n), self.hi_closed)
    }
}

/// `F_n = X ∩ (fixed ∪ window(n))`, with an optional certificate
/// `witness(n) ∈ F_n` of nonemptiness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClopenChain {
    pub fixed: RealSet,
    pub window: Option<MovingInterval>,
    pub witness: Option<MobiusSeq>,
}

impl ClopenChain {
    pub fn constant(fixed: RealSet) -> ClopenChain {
        ClopenChain { fixed, window: None, witness: None }
    }

    pub fn term(&self, x: &RealSet, n: &BigInt) -> Result<RealSet> {
        let mut parts = vec![self.fixed.clone()];
        if let Some(w) = &self.window {
            parts.extend(w.at(n).map(RealSet::interval));
        }
        intersect(&union_all(parts.iter())?, x)
    }

    /// Sufficient validity check: every term clopen in `x` and the terms
    /// decreasing. Moving endpoints must avoid `x`; fixed endpoints may
    /// touch `x` only where `x` has no points on the outside.
    pub fn validate(&self, x: &RealSet) -> Result<()> {
        let x = normalized(x)?;
        let fixed = intersect(&self.fixed, &x)?;
        if !crate::ops::is_clopen_in(&fixed, &x)? {
            return Err(Error::InvalidChain("fixed part is not clopen".into()));
        }
        let Some(w) = &self.window else { return Ok(()) };
        let inc = |e: &Endpoint, up: bool| match e {
            Endpoint::Fixed(_) => true,
            Endpoint::Moving(m) => m.direction() == if up { Ordering::Greater } else { Ordering::Less },
        };
        if !inc(&w.lo, true) || !inc(&w.hi, false) {
            return Err(Error::InvalidChain("windows are not nested".into()));
        }
        for (e, closed, is_lo) in [(&w.lo, w.lo_closed, true), (&w.hi, w.hi_closed, false)] {
            match e {
                Endpoint::Moving(m) => {
                    let pts = RealSet::schema(SchemaAtom::point_family(m.clone(), w.start.clone())?);
                    if !intersect(&pts, &x)?.is_empty() {
                        return Err(Error::InvalidChain(format!("moving endpoint {m} meets the set")));
                    }
                }
                Endpoint::Fixed(Ext::Fin(c)) if x.member(c) => {
                    // outside of the window at c
                    let (outside, inside) = if is_lo {
                        (Interval::new(Ext::NegInf, false, Ext::Fin(c.clone()), false), Interval::new(Ext::Fin(c.clone()), false, Ext::PosInf, false))
                    } else {
                        (Interval::new(Ext::Fin(c.clone()), false, Ext::PosInf, false), Interval::new(Ext::NegInf, false, Ext::Fin(c.clone()), false))
                    };
                    let side = if closed { outside } else { inside };
                    let near = intersect(&RealSet::interval(side.expect("nonempty")), &x)?;
                    if closure(&near)?.member(c) {
                        return Err(Error::InvalidChain(format!("endpoint {} is a limit of the set", show(c))));
                    }
                }
                Endpoint::Fixed(_) => {}
            }
        }
        Ok(())
    }

    /// Whether the nonemptiness certificate holds for every term.
    pub fn certified_nonempty(&self, x: &RealSet) -> Result<bool> {
        if !intersect(&self.fixed, x)?.is_empty() {
            return Ok(true);
        }
        let (Some(w), Some(p)) = (&self.window, &self.witness) else { return Ok(false) };
        let pts = RealSet::schema(SchemaAtom::point_family(p.clone(), w.start.clone())?);
        if !semantic_subset(&pts, x)? {
            return Ok(false);
        }
        let below = |e: &Endpoint, closed: bool, lower: bool| match e {
            Endpoint::Fixed(Ext::Fin(c)) => {
                let r = if lower { if closed { Rel::Ge } else { Rel::Gt } } else if closed { Rel::Le } else { Rel::Lt };
                let ok = p.solve(&w.start, c, r);
                ok.lo == w.start && ok.hi.is_none()
            }
            Endpoint::Fixed(_) => true,
            Endpoint::Moving(m) => {
                if lower {
                    strictly_below_from(m, p, &w.start)
                } else {
                    strictly_below_from(p, m, &w.start)
                }
            }
        };
        Ok(below(&w.lo, w.lo_closed, true) && below(&w.hi, w.hi_closed, false))
    }
}

/// `⋂ F_n` for a nested chain.
pub fn clopen_chain_intersection(x: &RealSet, chain: &ClopenChain) -> Result<RealSet> {
    let x = normalized(x)?;
    let mut parts = vec![chain.fixed.clone()];
    if let Some(w) = &chain.window {
        let closed = |e: &Endpoint, c: bool| matches!(e, Endpoint::Moving(_)) || c;
        let lo = w.lo.limit();
        let hi = w.hi.limit();
        let (lc, hc) = (closed(&w.lo, w.lo_closed), closed(&w.hi, w.hi_closed));
        if let Some(iv) = Interval::new(lo.clone(), lc && lo.is_finite(), hi.clone(), hc && hi.is_finite()) {
            parts.push(RealSet::interval(iv));
        }
    }
    intersect(&union_all(parts.iter())?, &x)
}

/// `(X ∩ (-inf, c), X ∩ (c, inf))` for a cut `c` outside the closure of `X`.
pub fn split_clopen(x: &RealSet, c: &Rational) -> Result<(RealSet, RealSet)> {
    let x = normalized(x)?;
    if closure(&x)?.member(c) {
        return Err(Error::InvalidCut(c.clone()));
    }
    let lo = Interval::new(Ext::NegInf, false, Ext::Fin(c.clone()), false).expect("nonempty");
    let hi = Interval::new(Ext::Fin(c.clone()), false, Ext::PosInf, false).expect("nonempty");
    Ok((intersect(&RealSet::interval(lo), &x)?, intersect(&RealSet::interval(hi), &x)?))
}
