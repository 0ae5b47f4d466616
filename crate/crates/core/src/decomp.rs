//! Finite-part plus periodic-tail decomposition of a [`RealSet`].
//!
//! Around a schema limit `L`, write points on one side as `x = L -/+ 1/t`.
//! Every schema converging to `L` from that side is, in the coordinate `t`,
//! a periodic pattern of intervals (the endpoints are affine in the index).
//! A set therefore splits into a finite interval union away from all limits,
//! and for every (limit, side) a region `t > t0` on which the set is
//! `{ t : (t - t0) mod period in pattern }`. Boolean operations act on the
//! finite parts with an interval sweep and on the tails as operations on
//! one period, after both operands are brought to common regions and
//! periods. [`Decomp::canonicalize`] turns the result back into a canonical
//! [`RealSet`].

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalUnion};
use crate::mobius::{MobiusSeq, Side, TForm};
use crate::rational::{ceil_int, floor_int, from_big, int, lcm, mid, Ext, Rational};
use crate::realset::{RealSet, SchemaAtom, SchemaKind};

/// Upper bound on pieces materialized by a single operation.
pub const PIECE_BUDGET: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site {
    pub limit: Rational,
    pub side: Side,
}

impl Site {
    fn t_to_x(&self, t: &Rational) -> Rational {
        self.side.to_x(&self.limit, t)
    }

    /// Image of a t-interval (positive, finite or unbounded above) in x.
    fn t_interval_to_x(&self, lo: &Rational, lo_closed: bool, hi: &Ext, hi_closed: bool) -> Option<Interval> {
        let xlo = self.t_to_x(lo);
        let xhi = match hi {
            Ext::Fin(h) => Ext::Fin(self.t_to_x(h)),
            _ => Ext::Fin(self.limit.clone()),
        };
        let hi_closed = hi_closed && hi.is_finite();
        match self.side {
            Side::Below => Interval::new(Ext::Fin(xlo), lo_closed, xhi, hi_closed),
            Side::Above => Interval::new(xhi, hi_closed, Ext::Fin(xlo), lo_closed),
        }
    }

    /// The open region `t > t0`.
    fn region(&self, t0: &Rational) -> Interval {
        self.t_interval_to_x(t0, false, &Ext::PosInf, false).expect("nonempty region")
    }

    /// Whether `x` lies strictly on this site's side of the limit.
    fn faces(&self, x: &Rational) -> bool {
        match self.side {
            Side::Below => x < &self.limit,
            Side::Above => x > &self.limit,
        }
    }
}

/// Pieces `[alpha n + lo, alpha n + hi]` in reciprocal coordinates, `n >= start`.
#[derive(Clone, Debug)]
struct TFamily {
    site: Site,
    alpha: Rational,
    lo: Rational,
    lo_closed: bool,
    hi: Rational,
    hi_closed: bool,
    start: BigInt,
}

impl TFamily {
    fn t_lo(&self, n: &BigInt) -> Rational {
        &self.alpha * from_big(n.clone()) + &self.lo
    }

    fn t_hi(&self, n: &BigInt) -> Rational {
        &self.alpha * from_big(n.clone()) + &self.hi
    }

    /// Smallest region start for which the periodic extension agrees with the family.
    fn threshold(&self) -> Rational {
        self.t_hi(&(&self.start - 1))
    }

    fn piece_t(&self, n: &BigInt) -> Option<Interval> {
        Interval::fin(self.t_lo(n), self.lo_closed, self.t_hi(n), self.hi_closed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Tail {
    t0: Rational,
    period: Rational,
    /// Subset of `[0, period)`.
    pattern: IntervalUnion,
}

impl Tail {
    fn full_phase(&self) -> IntervalUnion {
        IntervalUnion::from_interval(
            Interval::fin(int(0), true, self.period.clone(), false).expect("positive period"),
        )
    }

    fn is_full(&self) -> bool {
        self.pattern == self.full_phase()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomp {
    finite: IntervalUnion,
    tails: BTreeMap<Site, Tail>,
}

fn shift_union(u: &IntervalUnion, by: &Rational) -> IntervalUnion {
    IntervalUnion::from_intervals(u.parts().iter().map(|p| shift_interval(p, by)))
}

fn shift_interval(p: &Interval, by: &Rational) -> Interval {
    let sh = |e: &Ext| match e {
        Ext::Fin(q) => Ext::Fin(q + by),
        other => other.clone(),
    };
    Interval { lo: sh(&p.lo), lo_closed: p.lo_closed, hi: sh(&p.hi), hi_closed: p.hi_closed }
}

fn phase_window(period: &Rational) -> IntervalUnion {
    IntervalUnion::from_interval(Interval::fin(int(0), true, period.clone(), false).expect("positive period"))
}

/// Lowered form of one raw schema.
enum Lowered {
    Finite(Vec<Interval>),
    Family(TFamily, Vec<Interval>),
}

pub(crate) fn budget_check(count: &BigInt) -> Result<usize> {
    let n: usize = count.try_into().unwrap_or(usize::MAX);
    if n > PIECE_BUDGET {
        return Err(Error::Unnormalizable(format!("would materialize {count} schema pieces")));
    }
    Ok(n)
}

fn lower_schema(s: &SchemaAtom) -> Result<Lowered> {
    match &s.kind {
        SchemaKind::PointFamily { seq } => match seq.tform() {
            None => Ok(Lowered::Finite(vec![Interval::point(seq.eval(&s.start))])),
            Some(tf) => {
                let fam = TFamily {
                    site: Site { limit: tf.limit.clone(), side: tf.side },
                    alpha: tf.alpha.clone(),
                    lo: tf.beta.clone(),
                    lo_closed: true,
                    hi: tf.beta,
                    hi_closed: true,
                    start: s.start.clone(),
                };
                Ok(Lowered::Family(fam, vec![]))
            }
        },
        SchemaKind::IntervalFamily { left, left_closed, right, right_closed } => {
            let (lt, rt) = (left.tform(), right.tform());
            let (lt, rt) = match (lt, rt) {
                (Some(l), Some(r)) if l.side == r.side => (l, r),
                // one endpoint constant or endpoints on opposite sides: nested pieces
                _ => return Ok(Lowered::Finite(vec![s.piece(&s.start)])),
            };
            let side = lt.side;
            // in t, the endpoint far from the limit comes first
            let ((alo, blo, clo), (ahi, bhi, chi)) = match side {
                Side::Below => ((lt.alpha, lt.beta, *left_closed), (rt.alpha, rt.beta, *right_closed)),
                Side::Above => ((rt.alpha, rt.beta, *right_closed), (lt.alpha, lt.beta, *left_closed)),
            };
            let site = Site { limit: lt.limit.clone(), side };
            if alo == ahi {
                let fam = TFamily { site, alpha: alo, lo: blo, lo_closed: clo, hi: bhi, hi_closed: chi, start: s.start.clone() };
                return Ok(Lowered::Family(fam, vec![]));
            }
            // Widening pieces: consecutive pieces overlap from index `big_n` on,
            // so the union of the tail is one interval reaching the limit.
            let rate = &ahi - &alo;
            debug_assert!(rate.is_positive());
            let rhs = (&alo + &blo - &bhi) / &rate;
            let big_n = s.start.clone().max(floor_int(&rhs) + 1);
            budget_check(&(&big_n - &s.start))?;
            let mut parts = Vec::new();
            let mut n = s.start.clone();
            while n < big_n {
                parts.push(s.piece(&n));
                n += 1;
            }
            let t_start = &alo * from_big(big_n.clone()) + &blo;
            parts.extend(site.t_interval_to_x(&t_start, clo, &Ext::PosInf, false));
            Ok(Lowered::Finite(parts))
        }
    }
}

impl Decomp {
    pub fn from_realset(x: &RealSet) -> Result<Decomp> {
        let mut finite: Vec<Interval> = x.intervals.clone();
        finite.extend(x.points.iter().cloned().map(Interval::point));
        let mut fams: Vec<TFamily> = Vec::new();
        for s in &x.schemas {
            match lower_schema(s)? {
                Lowered::Finite(parts) => finite.extend(parts),
                Lowered::Family(f, parts) => {
                    finite.extend(parts);
                    fams.push(f);
                }
            }
        }
        let limits: Vec<Rational> = fams.iter().map(|f| f.site.limit.clone()).collect();
        let mut t0s: BTreeMap<Site, Rational> = BTreeMap::new();
        for f in &fams {
            let e = t0s.entry(f.site.clone()).or_insert_with(|| int(1));
            let th = f.threshold();
            if th > *e {
                *e = th;
            }
        }
        let base_keys: Vec<Rational> = finite
            .iter()
            .flat_map(|i| i.lo.fin().into_iter().chain(i.hi.fin()).cloned())
            .chain(limits.iter().cloned())
            .collect();
        for (site, t0) in t0s.iter_mut() {
            raise_for_keys(site, t0, base_keys.iter());
        }
        // pieces of other sites left outside their regions may still enter a region
        for _ in 0..8 {
            let mut changed = false;
            let mut extra: BTreeMap<Site, Vec<Interval>> = BTreeMap::new();
            for f in &fams {
                extra.entry(f.site.clone()).or_default().extend(materialize_family(f, &t0s[&f.site])?);
            }
            let sites: Vec<Site> = t0s.keys().cloned().collect();
            for site in &sites {
                let keys: Vec<Rational> = extra
                    .iter()
                    .filter(|(s, _)| *s != site)
                    .flat_map(|(_, v)| v.iter())
                    .flat_map(|i| i.lo.fin().into_iter().chain(i.hi.fin()).cloned())
                    .collect();
                let t0 = t0s.get_mut(site).expect("site");
                let before = t0.clone();
                raise_for_keys(site, t0, keys.iter());
                changed |= *t0 != before;
            }
            if !changed {
                break;
            }
        }
        let mut tails: BTreeMap<Site, Tail> = BTreeMap::new();
        for f in &fams {
            let t0 = t0s[&f.site].clone();
            finite.extend(materialize_family(f, &t0)?);
            let tail = tails
                .entry(f.site.clone())
                .or_insert_with(|| Tail { t0: t0.clone(), period: f.alpha.clone(), pattern: IntervalUnion::empty() });
            let period = lcm(&tail.period, &f.alpha);
            repattern(tail, &period);
            let pat = family_pattern(f, &t0, &period)?;
            tail.pattern = tail.pattern.union(&pat);
        }
        let mut finite = IntervalUnion::from_intervals(finite);
        for (site, tail) in tails.iter_mut() {
            let region = IntervalUnion::from_interval(site.region(&tail.t0));
            if region.is_subset(&finite) {
                tail.pattern = tail.full_phase();
            }
            finite = finite.difference(&region);
        }
        let d = Decomp { finite, tails };
        d.check_regions()?;
        Ok(d)
    }

    /// No finite endpoint and no foreign limit may lie inside a region.
    fn check_regions(&self) -> Result<()> {
        for (s, t) in &self.tails {
            let region = s.region(&t.t0);
            let bad = self
                .finite
                .endpoints()
                .chain(self.site_limits())
                .any(|p| region.contains(p));
            if bad {
                return Err(Error::Unnormalizable(format!(
                    "could not isolate the accumulation at {} from nearby structure",
                    crate::rational::show(&s.limit)
                )));
            }
        }
        Ok(())
    }

    fn site_limits(&self) -> impl Iterator<Item = &Rational> {
        self.tails.keys().map(|s| &s.limit)
    }

    /// Moves the region start of `site` out to `new_t0`, materializing the
    /// pieces in between. Returns the materialized pieces.
    fn shrink(&mut self, site: &Site, new_t0: &Rational) -> Result<Vec<Interval>> {
        let tail = match self.tails.get_mut(site) {
            Some(t) => t,
            None => return Ok(vec![]),
        };
        if *new_t0 <= tail.t0 {
            return Ok(vec![]);
        }
        let span = new_t0 - &tail.t0;
        let periods = ceil_int(&(&span / &tail.period));
        budget_check(&(&periods * BigInt::from(tail.pattern.parts().len().max(1))))?;
        let mut parts = Vec::new();
        let window = Interval::fin(tail.t0.clone(), false, new_t0.clone(), true).expect("nonempty window");
        let window = IntervalUnion::from_interval(window);
        // phase 0 of block k sits at t0 + k*period, so the last block needed
        // is the one starting at or before new_t0
        let mut k = BigInt::zero();
        while k <= periods {
            let off = &tail.t0 + &tail.period * from_big(k.clone());
            let block = shift_union(&tail.pattern, &off).intersect(&window);
            for p in block.parts() {
                let lo = p.lo.fin().expect("finite").clone();
                parts.extend(site.t_interval_to_x(&lo, p.lo_closed, &p.hi, p.hi_closed));
            }
            k += 1;
        }
        let rem = &span - &tail.period * from_big(floor_int(&(&span / &tail.period)));
        let doubled = tail.pattern.union(&shift_union(&tail.pattern, &tail.period));
        tail.pattern = shift_union(&doubled, &-rem).intersect(&phase_window(&tail.period));
        tail.t0 = new_t0.clone();
        self.finite = self.finite.union(&IntervalUnion::from_intervals(parts.iter().cloned()));
        Ok(parts)
    }

    fn ensure_site(&mut self, site: &Site, t0: &Rational) {
        if self.tails.contains_key(site) {
            return;
        }
        let region = IntervalUnion::from_interval(site.region(t0));
        let mut tail = Tail { t0: t0.clone(), period: int(1), pattern: IntervalUnion::empty() };
        if region.is_subset(&self.finite) {
            tail.pattern = tail.full_phase();
        }
        self.finite = self.finite.difference(&region);
        self.tails.insert(site.clone(), tail);
    }

    /// Brings both decompositions to the same sites, region starts and periods.
    fn align(a: &mut Decomp, b: &mut Decomp) -> Result<()> {
        let sites: Vec<Site> = a.tails.keys().chain(b.tails.keys()).cloned().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        if sites.is_empty() {
            return Ok(());
        }
        let limits: Vec<Rational> = a.site_limits().chain(b.site_limits()).cloned().collect();
        let mut t0s: BTreeMap<Site, Rational> = BTreeMap::new();
        for s in &sites {
            let mut t0 = int(1);
            for d in [&*a, &*b] {
                if let Some(t) = d.tails.get(s) {
                    if t.t0 > t0 {
                        t0 = t.t0.clone();
                    }
                }
            }
            t0s.insert(s.clone(), t0);
        }
        // a site's own materialized pieces end at its region start and must
        // not push that start further out
        let base: Vec<Rational> = a.finite.endpoints().chain(b.finite.endpoints()).chain(limits.iter()).cloned().collect();
        let mut made: BTreeMap<Site, Vec<Rational>> = BTreeMap::new();
        for _ in 0..8 {
            let mut changed = false;
            for s in &sites {
                let t0 = t0s.get_mut(s).expect("site");
                let before = t0.clone();
                let foreign = made.iter().filter(|(o, _)| *o != s).flat_map(|(_, v)| v.iter());
                raise_for_keys(s, t0, base.iter().chain(foreign));
                changed |= *t0 != before;
                let mut parts = a.shrink(s, t0)?;
                parts.extend(b.shrink(s, t0)?);
                made.entry(s.clone())
                    .or_default()
                    .extend(parts.iter().flat_map(|i| i.lo.fin().into_iter().chain(i.hi.fin()).cloned()));
            }
            if !changed {
                break;
            }
        }
        a.check_regions()?;
        b.check_regions()?;
        for s in &sites {
            a.ensure_site(s, &t0s[s]);
            b.ensure_site(s, &t0s[s]);
            let ta = a.tails.get_mut(s).expect("site");
            let tb = b.tails.get_mut(s).expect("site");
            let period = lcm(&ta.period, &tb.period);
            repattern(ta, &period);
            repattern(tb, &period);
        }
        Ok(())
    }

    fn combine(
        a: &Decomp,
        b: &Decomp,
        op: impl Fn(&IntervalUnion, &IntervalUnion) -> IntervalUnion,
    ) -> Result<Decomp> {
        let mut a = a.clone();
        let mut b = b.clone();
        Decomp::align(&mut a, &mut b)?;
        let finite = op(&a.finite, &b.finite);
        let mut tails = BTreeMap::new();
        for (s, ta) in &a.tails {
            let tb = &b.tails[s];
            let pattern = op(&ta.pattern, &tb.pattern).intersect(&phase_window(&ta.period));
            tails.insert(s.clone(), Tail { t0: ta.t0.clone(), period: ta.period.clone(), pattern });
        }
        Ok(Decomp { finite, tails })
    }

    pub fn union(&self, other: &Decomp) -> Result<Decomp> {
        Decomp::combine(self, other, |x, y| x.union(y))
    }

    pub fn intersect(&self, other: &Decomp) -> Result<Decomp> {
        Decomp::combine(self, other, |x, y| x.intersect(y))
    }

    pub fn difference(&self, other: &Decomp) -> Result<Decomp> {
        Decomp::combine(self, other, |x, y| x.difference(y))
    }

    pub fn complement(&self) -> Decomp {
        let mut finite = self.finite.complement();
        let mut tails = BTreeMap::new();
        for (s, t) in &self.tails {
            finite = finite.difference(&IntervalUnion::from_interval(s.region(&t.t0)));
            let pattern = phase_window(&t.period).difference(&t.pattern);
            tails.insert(s.clone(), Tail { t0: t.t0.clone(), period: t.period.clone(), pattern });
        }
        Decomp { finite, tails }
    }

    pub fn is_empty(&self) -> bool {
        self.finite.is_empty() && self.tails.values().all(|t| t.pattern.is_empty())
    }

    /// Canonical [`RealSet`] for this point set.
    pub fn canonicalize(&self) -> Result<RealSet> {
        let mut d = self.clone();
        let mut fams: Vec<TFamily> = Vec::new();
        let sites: Vec<Site> = d.tails.keys().cloned().collect();
        for site in &sites {
            let tail = d.tails[site].clone();
            if tail.pattern.is_empty() {
                continue;
            }
            if tail.is_full() {
                d.finite = d.finite.union(&IntervalUnion::from_interval(site.region(&tail.t0)));
                continue;
            }
            let g = gap_phase(&tail.pattern, &tail.period);
            let new_t0 = &tail.t0 + &g;
            d.shrink(site, &new_t0)?;
            let tail = d.tails[site].clone();
            let parts = tail.pattern.parts().to_vec();
            let (period, classes) = minimal_period(&parts, &tail.period);
            for c in classes {
                let u1 = c.lo.fin().expect("finite phase").clone();
                let u2 = c.hi.fin().expect("finite phase").clone();
                fams.push(TFamily {
                    site: site.clone(),
                    alpha: period.clone(),
                    lo: &tail.t0 + u1 - &period,
                    lo_closed: c.lo_closed,
                    hi: &tail.t0 + u2 - &period,
                    hi_closed: c.hi_closed,
                    start: BigInt::one(),
                });
            }
        }
        let mut finite = d.finite;
        for f in fams.iter_mut() {
            // extend each family backwards over components that continue its
            // pattern; with start 1 the piece before the first one sits at n = 0
            loop {
                if !f.lo.is_positive() {
                    break;
                }
                let x = f.site.t_interval_to_x(&f.lo, f.lo_closed, &Ext::Fin(f.hi.clone()), f.hi_closed);
                match x {
                    Some(iv) if finite.remove_part(&iv) => {
                        f.lo = &f.lo - &f.alpha;
                        f.hi = &f.hi - &f.alpha;
                    }
                    _ => break,
                }
            }
        }
        let mut schemas: Vec<SchemaAtom> = fams.iter().map(family_to_schema).collect::<Result<_>>()?;
        schemas.sort_by(|x, y| {
            (x.limit.clone(), x.side(), x.piece(&x.start)).cmp(&(y.limit.clone(), y.side(), y.piece(&y.start)))
        });
        let mut intervals = Vec::new();
        let mut points = Vec::new();
        for p in finite.into_parts() {
            match p.point_value() {
                Some(q) => points.push(q.clone()),
                None => intervals.push(p),
            }
        }
        Ok(RealSet { intervals, points, schemas, normal_form: true })
    }
}

fn family_to_schema(f: &TFamily) -> Result<SchemaAtom> {
    let seq = |beta: &Rational| {
        MobiusSeq::from_tform(&TForm { limit: f.site.limit.clone(), side: f.site.side, alpha: f.alpha.clone(), beta: beta.clone() })
    };
    if f.lo == f.hi {
        return SchemaAtom::point_family(seq(&f.lo), BigInt::one());
    }
    let (left, lc, right, rc) = match f.site.side {
        Side::Below => (seq(&f.lo), f.lo_closed, seq(&f.hi), f.hi_closed),
        Side::Above => (seq(&f.hi), f.hi_closed, seq(&f.lo), f.lo_closed),
    };
    SchemaAtom::interval_family(left, lc, right, rc, BigInt::one())
}

/// Raises `t0` so that the region `t > t0` stays at most half way to every
/// key point strictly on the site's side.
fn raise_for_keys<'a>(site: &Site, t0: &mut Rational, keys: impl Iterator<Item = &'a Rational>) {
    for p in keys {
        if site.faces(p) {
            let need = int(2) / (p - &site.limit).abs();
            if need > *t0 {
                *t0 = need;
            }
        }
    }
}

/// Pieces of `f` not entirely inside `t > t0`, clipped to `t <= t0`, in x.
fn materialize_family(f: &TFamily, t0: &Rational) -> Result<Vec<Interval>> {
    let mut out = Vec::new();
    let last = floor_int(&((t0 - &f.lo) / &f.alpha));
    if last < f.start {
        return Ok(out);
    }
    budget_check(&(&last - &f.start + 1))?;
    let clip = IntervalUnion::from_interval(Interval::new(Ext::NegInf, false, Ext::Fin(t0.clone()), true).expect("clip"));
    let mut n = f.start.clone();
    while n <= last {
        if let Some(p) = f.piece_t(&n) {
            for q in IntervalUnion::from_interval(p).intersect(&clip).parts() {
                let lo = q.lo.fin().expect("finite").clone();
                out.extend(f.site.t_interval_to_x(&lo, q.lo_closed, &q.hi, q.hi_closed));
            }
        }
        n += 1;
    }
    Ok(out)
}

/// One period `[0, period)` of the periodic extension of `f`, phase measured from `t0`.
fn family_pattern(f: &TFamily, t0: &Rational, period: &Rational) -> Result<IntervalUnion> {
    let n_min = floor_int(&((t0 - &f.hi) / &f.alpha)) - 1;
    let n_max = ceil_int(&((t0 + period - &f.lo) / &f.alpha)) + 1;
    budget_check(&(&n_max - &n_min))?;
    let mut parts = Vec::new();
    let mut n = n_min;
    while n <= n_max {
        if let Some(p) = f.piece_t(&n) {
            parts.push(shift_interval(&p, &-t0));
        }
        n += 1;
    }
    Ok(IntervalUnion::from_intervals(parts).intersect(&phase_window(period)))
}

fn repattern(tail: &mut Tail, period: &Rational) {
    if *period == tail.period {
        return;
    }
    let k = floor_int(&(period / &tail.period));
    let mut parts = Vec::new();
    let mut j = BigInt::zero();
    while j < k {
        let off = &tail.period * from_big(j.clone());
        parts.extend(shift_union(&tail.pattern, &off).into_parts());
        j += 1;
    }
    tail.pattern = IntervalUnion::from_intervals(parts);
    tail.period = period.clone();
}

/// First phase in `[0, period)` not covered by `pattern` (which is not full).
fn gap_phase(pattern: &IntervalUnion, period: &Rational) -> Rational {
    let parts = pattern.parts();
    if !pattern.contains(&int(0)) {
        return int(0);
    }
    let first = &parts[0];
    let hi = first.hi.fin().expect("bounded phase").clone();
    if !first.hi_closed {
        return hi;
    }
    let next = parts.get(1).and_then(|p| p.lo.fin().cloned()).unwrap_or_else(|| period.clone());
    mid(&hi, &next)
}

/// Smallest period dividing `period` under which the parts are invariant,
/// and the parts of one such period.
fn minimal_period(parts: &[Interval], period: &Rational) -> (Rational, Vec<Interval>) {
    let k = parts.len();
    for step in 1..=k {
        if k % step != 0 {
            continue;
        }
        let j = k / step;
        if j == 1 {
            break;
        }
        let p = period / int(j as i64);
        let ok = (0..k).all(|i| {
            let target = shift_interval(&parts[i], &p);
            if i + step < k {
                parts[i + step] == target
            } else {
                shift_interval(&parts[i + step - k], period) == target
            }
        });
        if ok {
            return (p, parts[..step].to_vec());
        }
    }
    (period.clone(), parts.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn canon(x: &RealSet) -> RealSet {
        Decomp::from_realset(x).unwrap().canonicalize().unwrap()
    }

    fn recip(k: i64) -> MobiusSeq {
        MobiusSeq::new(int(0), int(1), int(1), int(k))
    }

    #[test]
    fn open_pieces_are_already_canonical() {
        let s = SchemaAtom::interval_family(recip(1), false, recip(0), false, BigInt::one()).unwrap();
        let x = RealSet::schema(s.clone());
        let c = canon(&x);
        assert_eq!(c.schemas, vec![s]);
        assert!(c.intervals.is_empty() && c.points.is_empty());
    }

    #[test]
    fn closed_chain_telescopes() {
        let s = SchemaAtom::interval_family(recip(1), true, recip(0), true, BigInt::one()).unwrap();
        let c = canon(&RealSet::schema(s));
        assert!(c.schemas.is_empty());
        assert_eq!(c.intervals, vec![Interval::fin(int(0), false, int(1), true).unwrap()]);
    }

    #[test]
    fn even_odd_points_merge() {
        // {1/(2n)} and {1/(2n-1)} together are {1/n}
        let ev = SchemaAtom::point_family(MobiusSeq::new(int(0), int(1), int(2), int(0)), BigInt::one()).unwrap();
        let od = SchemaAtom::point_family(MobiusSeq::new(int(0), int(1), int(2), int(-1)), BigInt::one()).unwrap();
        let c = canon(&RealSet::raw(vec![], vec![], vec![ev, od]));
        let expect = SchemaAtom::point_family(recip(0), BigInt::one()).unwrap();
        assert_eq!(c.schemas, vec![expect]);
        assert!(c.points.is_empty());
    }

    #[test]
    fn gap_phase_and_period() {
        let parts = vec![
            Interval::fin(rat(1, 4), true, rat(1, 2), false).unwrap(),
            Interval::fin(rat(5, 4), true, rat(3, 2), false).unwrap(),
        ];
        let (p, classes) = minimal_period(&parts, &int(2));
        assert_eq!(p, int(1));
        assert_eq!(classes.len(), 1);
        let u = IntervalUnion::from_intervals(vec![Interval::fin(int(0), true, rat(1, 2), true).unwrap()]);
        assert_eq!(gap_phase(&u, &int(1)), rat(3, 4));
    }
}
