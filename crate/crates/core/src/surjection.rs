//! A continuous surjection `A × ℝ → X` for GCC sets, where `A` is the
//! compact midpoint transversal, and a Cantor-stage bracket encoder onto a
//! compact set.

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gcc::{build_transversal, interior_pick, InteriorSelection, SelectorPolicy, Transversal};
use crate::interval::Interval;
use crate::mobius::Rel;
use crate::ops::normalize;
use crate::rational::{int, rat, show, Ext, Rational};
use crate::realset::{ComponentList, ComponentRef, RealSet, SchemaAtom, SchemaKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentKind {
    Open,
    Closed,
    /// `(a, b]`
    HalfOpenLeft,
    /// `[a, b)`
    HalfOpenRight,
    /// `(a, inf)`
    OpenUpperRay,
    /// `[a, inf)`
    ClosedUpperRay,
    /// `(-inf, b)`
    OpenLowerRay,
    /// `(-inf, b]`
    ClosedLowerRay,
    FullLine,
    Singleton,
}

/// A fixed piecewise-rational map from ℝ onto one component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentSurjection {
    pub kind: ComponentKind,
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
}

fn halve(q: &Rational) -> Rational {
    q / int(2)
}

/// `|y| / (1 + |y|)`, onto `[0, 1)`.
fn squash(y: &Rational) -> Rational {
    let a = y.abs();
    &a / (Rational::one() + &a)
}

/// Inverse of `squash` on `[0, 1)`, choosing `y >= 0`.
fn unsquash(s: &Rational) -> Rational {
    s / (Rational::one() - s)
}

/// Onto `(0, inf)`: `1/(1 - y)` for `y <= 0`, `1 + y` for `y >= 0`.
fn ray(y: &Rational) -> Rational {
    if y.is_positive() {
        Rational::one() + y
    } else {
        (Rational::one() - y).recip()
    }
}

fn unray(u: &Rational) -> Rational {
    if u > &Rational::one() {
        u - Rational::one()
    } else {
        Rational::one() - u.recip()
    }
}

impl ComponentSurjection {
    pub fn for_component(c: &Interval) -> ComponentSurjection {
        use ComponentKind::*;
        let lo = c.lo.fin().cloned();
        let hi = c.hi.fin().cloned();
        let kind = if c.is_point() {
            Singleton
        } else {
            match (&lo, &hi) {
                (Some(_), Some(_)) => match (c.lo_closed, c.hi_closed) {
                    (false, false) => Open,
                    (true, true) => Closed,
                    (false, true) => HalfOpenLeft,
                    (true, false) => HalfOpenRight,
                },
                (Some(_), None) if c.lo_closed => ClosedUpperRay,
                (Some(_), None) => OpenUpperRay,
                (None, Some(_)) if c.hi_closed => ClosedLowerRay,
                (None, Some(_)) => OpenLowerRay,
                (None, None) => FullLine,
            }
        };
        ComponentSurjection { kind, lo, hi }
    }

    fn a(&self) -> &Rational {
        self.lo.as_ref().expect("finite lower end")
    }

    fn b(&self) -> &Rational {
        self.hi.as_ref().expect("finite upper end")
    }

    pub fn eval(&self, y: &Rational) -> Rational {
        use ComponentKind::*;
        match self.kind {
            Open => {
                let (a, b) = (self.a(), self.b());
                let m = halve(&(a + b));
                let h = halve(&(b - a));
                let s = y / (Rational::one() + y.abs());
                m + h * s
            }
            Closed => {
                let (a, b) = (self.a(), self.b());
                let v = a + (b - a) * (y + Rational::one()) / rat(2, 1);
                v.clamp(a.clone(), b.clone())
            }
            HalfOpenRight => self.a() + (self.b() - self.a()) * squash(y),
            HalfOpenLeft => self.b() - (self.b() - self.a()) * squash(y),
            OpenUpperRay => self.a() + ray(y),
            ClosedUpperRay => self.a() + y.max(&Rational::zero()),
            OpenLowerRay => self.b() - ray(y),
            ClosedLowerRay => self.b() - y.max(&Rational::zero()),
            FullLine => y.clone(),
            Singleton => self.a().clone(),
        }
    }

    /// Some `y` with `eval(y) = t`, for `t` in the component.
    pub fn invert(&self, t: &Rational) -> Rational {
        use ComponentKind::*;
        match self.kind {
            Open => {
                let (a, b) = (self.a(), self.b());
                let s = (t - halve(&(a + b))) / halve(&(b - a));
                &s / (Rational::one() - s.abs())
            }
            Closed => {
                let (a, b) = (self.a(), self.b());
                rat(2, 1) * (t - a) / (b - a) - Rational::one()
            }
            HalfOpenRight => unsquash(&((t - self.a()) / (self.b() - self.a()))),
            HalfOpenLeft => unsquash(&((self.b() - t) / (self.b() - self.a()))),
            OpenUpperRay => unray(&(t - self.a())),
            ClosedUpperRay => t - self.a(),
            OpenLowerRay => unray(&(self.b() - t)),
            ClosedLowerRay => self.b() - t,
            FullLine => t.clone(),
            Singleton => Rational::zero(),
        }
    }

    /// The exact image: infimum and supremum of the formula over ℝ with
    /// attainment.
    pub fn image(&self) -> Interval {
        use ComponentKind::*;
        let f = |q: &Option<Rational>| q.clone().map(Ext::Fin);
        let (lo, lc, hi, hc) = match self.kind {
            // strictly increasing, limits a and b at -inf and +inf
            Open => (f(&self.lo), false, f(&self.hi), false),
            // clamps at y = -1 and y = 1
            Closed => (f(&self.lo), true, f(&self.hi), true),
            // even in y: minimum a at y = 0, tends to b
            HalfOpenRight => (f(&self.lo), true, f(&self.hi), false),
            HalfOpenLeft => (f(&self.lo), false, f(&self.hi), true),
            // increasing, tends to a at -inf
            OpenUpperRay => (f(&self.lo), false, Some(Ext::PosInf), false),
            ClosedUpperRay => (f(&self.lo), true, Some(Ext::PosInf), false),
            OpenLowerRay => (Some(Ext::NegInf), false, f(&self.hi), false),
            ClosedLowerRay => (Some(Ext::NegInf), false, f(&self.hi), true),
            FullLine => (Some(Ext::NegInf), false, Some(Ext::PosInf), false),
            Singleton => (f(&self.lo), true, f(&self.lo), true),
        };
        Interval::new(lo.expect("end"), lc, hi.expect("end"), hc).expect("nonempty image")
    }

    /// Lipschitz constant in `y`.
    pub fn lipschitz(&self) -> Rational {
        use ComponentKind::*;
        match self.kind {
            Open | Closed => halve(&(self.b() - self.a())),
            HalfOpenLeft | HalfOpenRight => self.b() - self.a(),
            OpenUpperRay | ClosedUpperRay | OpenLowerRay | ClosedLowerRay | FullLine => Rational::one(),
            Singleton => Rational::zero(),
        }
    }
}

/// What a point of `A` does.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// Points of `C ∖ C°` map constantly to themselves.
    Constant(Rational),
    /// Interior selections map onto their component.
    Onto(ComponentSurjection),
}

impl Rule {
    pub fn eval(&self, y: &Rational) -> Rational {
        match self {
            Rule::Constant(a) => a.clone(),
            Rule::Onto(g) => g.eval(y),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SurjectionPlan {
    pub x: RealSet,
    pub components: ComponentList,
    pub domain: Transversal,
}

pub fn build_surjection(x: &RealSet) -> Result<SurjectionPlan> {
    let x = if x.normal_form { x.clone() } else { normalize(x)? };
    let domain = build_transversal(&x, SelectorPolicy::ReciprocalMidpoint)?;
    if !domain.is_compact() {
        return Err(Error::NotGcc);
    }
    Ok(SurjectionPlan { components: x.components(), x, domain })
}

impl SurjectionPlan {
    fn interior_selection(&self, r: &ComponentRef) -> Option<Rational> {
        match r {
            ComponentRef::Finite(i) => interior_pick(&self.components.finite[*i], &halve(&Rational::one())),
            ComponentRef::Piece(f, n) => self.domain.families[*f].interior.as_ref().map(|w| w.eval(n)),
        }
    }

    pub fn rule(&self, a: &Rational) -> Result<Rule> {
        let outside = || Error::Domain(format!("{} is not in the transversal", show(a)));
        let r = self.components.locate(a).ok_or_else(outside)?;
        if !self.domain.selected(&r).contains(a) {
            return Err(outside());
        }
        let c = self.components.component(&r);
        match c.interior() {
            Some(i) if i.contains(a) && self.interior_selection(&r).as_ref() == Some(a) => {
                Ok(Rule::Onto(ComponentSurjection::for_component(&c)))
            }
            _ => Ok(Rule::Constant(a.clone())),
        }
    }

    pub fn eval(&self, a: &Rational, y: &Rational) -> Result<Rational> {
        Ok(self.rule(a)?.eval(y))
    }

    /// `(a, y)` with `eval(a, y) = t`.
    pub fn preimage(&self, t: &Rational) -> Result<(Rational, Rational)> {
        let r = self.components.locate(t).ok_or_else(|| Error::NotMember(t.clone()))?;
        if let Ok(Rule::Constant(_)) = self.rule(t) {
            return Ok((t.clone(), Rational::zero()));
        }
        let c = self.components.component(&r);
        let a = self.interior_selection(&r).expect("a point component is its own selection");
        Ok((a, ComponentSurjection::for_component(&c).invert(t)))
    }

    /// Points of `A`: finite selections, family selections below `depth`, and
    /// limits.
    pub fn domain_points(&self, depth: u32) -> Vec<Rational> {
        self.domain.truncated_points(depth)
    }

    /// Selections of families accumulating at `l` that lie within `delta`
    /// of it, a few per family.
    fn deep_neighbors(&self, l: &Rational, delta: &Rational) -> Result<Vec<Rational>> {
        let mut out = Vec::new();
        for f in &self.domain.families {
            let s = &f.schema;
            if &s.limit != l {
                continue;
            }
            let (near, rel) = match s.side() {
                Some(crate::mobius::Side::Below) => (l - delta, Rel::Ge),
                _ => (l + delta, Rel::Le),
            };
            let outer = match &s.kind {
                SchemaKind::PointFamily { seq } => seq,
                SchemaKind::IntervalFamily { left, right, .. } => match rel {
                    Rel::Ge => left,
                    _ => right,
                },
            };
            let n0 = outer.solve(&s.start, &near, rel).lo;
            for k in [0u32, 1, 7] {
                out.extend(f.selected(&(&n0 + BigInt::from(k))));
            }
        }
        Ok(out)
    }
}

pub fn eval_surjection(plan: &SurjectionPlan, a: &Rational, y: &Rational) -> Result<Rational> {
    plan.eval(a, y)
}

pub fn solve_preimage(plan: &SurjectionPlan, target: &Rational) -> Result<(Rational, Rational)> {
    plan.preimage(target)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    /// Family selections taken for indices below this depth.
    pub depth: u32,
    pub y_min: Rational,
    pub y_max: Rational,
    pub y_steps: u32,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { depth: 8, y_min: rat(-4, 1), y_max: rat(4, 1), y_steps: 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContinuityViolation {
    pub a: String,
    pub y: String,
    pub a_near: String,
    pub y_near: String,
}

/// Sampled continuity check. Around each grid point `(a, y)` the neighbors
/// are `a` itself, sampled points of `A` within `delta`, and deep family
/// selections within `delta` of a limit, paired with `y ± delta`. A point is
/// reported when none of `delta0, delta0/2, ..., delta0/16` keeps every
/// neighbor image within `epsilon`.
pub fn continuity_samples(plan: &SurjectionPlan, epsilon: &Rational, grid: &GridSpec) -> Result<Vec<ContinuityViolation>> {
    let points = plan.domain_points(grid.depth);
    let rules: Vec<Rule> = points.iter().map(|a| plan.rule(a)).collect::<Result<_>>()?;
    let lip = rules
        .iter()
        .map(|r| match r {
            Rule::Onto(g) => g.lipschitz(),
            Rule::Constant(_) => Rational::zero(),
        })
        .fold(Rational::one(), |m, l| m.max(l));
    let delta0 = epsilon / lip;
    let step = (&grid.y_max - &grid.y_min) / Rational::from_integer(BigInt::from(grid.y_steps.max(1)));
    let limits = plan.domain.accumulation_points();
    let mut out = Vec::new();
    for (a, rule) in points.iter().zip(&rules) {
        for j in 0..=grid.y_steps {
            let y = &grid.y_min + &step * Rational::from_integer(BigInt::from(j));
            let fy = rule.eval(&y);
            let mut witness = None;
            let mut delta = delta0.clone();
            let mut ok = false;
            for _ in 0..5 {
                let mut near: Vec<Rational> = points.iter().filter(|p| (*p - a).abs() <= delta).cloned().collect();
                if limits.contains(a) {
                    near.extend(plan.deep_neighbors(a, &delta)?);
                }
                let mut bad = None;
                'scan: for p in &near {
                    for yy in [&y - &delta, y.clone(), &y + &delta] {
                        let v = plan.eval(p, &yy)?;
                        if (&v - &fy).abs() >= *epsilon {
                            bad = Some((p.clone(), yy));
                            break 'scan;
                        }
                    }
                }
                match bad {
                    None => {
                        ok = true;
                        break;
                    }
                    Some(b) => witness = Some(b),
                }
                delta = halve(&delta);
            }
            if !ok {
                let (p, yy) = witness.expect("a failing neighbor");
                out.push(ContinuityViolation { a: show(a), y: show(&y), a_near: show(&p), y_near: show(&yy) });
            }
        }
    }
    Ok(out)
}

// --------------------------------------------------------------- Cantor stage

fn check_compact(a: &RealSet) -> Result<RealSet> {
    let a = if a.normal_form { a.clone() } else { normalize(a)? };
    if !a.predicates().compact {
        return Err(Error::NotCompact);
    }
    if a.is_empty() {
        return Err(Error::Domain("empty set".into()));
    }
    Ok(a)
}

type Bracket = (Rational, Rational);

fn widen(acc: &mut Option<Bracket>, lo: Rational, hi: Rational) {
    *acc = Some(match acc.take() {
        None => (lo, hi),
        Some((l, h)) => (l.min(lo), h.max(hi)),
    });
}

/// Hull of `a ∩ [l, h]` for a compact normalized `a`. Family pieces meeting
/// the window form an index range, and the extremes sit at its two ends.
fn hull_in(a: &RealSet, l: &Rational, h: &Rational) -> Option<Bracket> {
    let mut acc = None;
    let mut clip = |iv: &Interval| {
        let lo = iv.lo.fin().expect("bounded").max(l).clone();
        let hi = iv.hi.fin().expect("bounded").min(h).clone();
        if lo <= hi {
            widen(&mut acc, lo, hi);
        }
    };
    for iv in &a.intervals {
        clip(iv);
    }
    for p in &a.points {
        clip(&Interval::point(p.clone()));
    }
    for s in &a.schemas {
        let (left, right) = match &s.kind {
            SchemaKind::PointFamily { seq } => (seq, seq),
            SchemaKind::IntervalFamily { left, right, .. } => (left, right),
        };
        let r = left.solve(&s.start, h, Rel::Le).intersect(&right.solve(&s.start, l, Rel::Ge));
        let Some(first) = r.first() else { continue };
        clip(&s.piece(&first));
        match &r.hi {
            Some(end) => clip(&s.piece(&(end - BigInt::one()))),
            None => clip(&Interval::point(s.limit.clone())),
        }
    }
    acc
}

/// One subdivision step on the window `[lo, hi]` (the current hull): the
/// closed left or right half. Both halves meet `a` and are at most half as
/// wide.
fn descend(a: &RealSet, b: &Bracket, bit: bool) -> Bracket {
    let (lo, hi) = b;
    if lo == hi {
        return b.clone();
    }
    let c = halve(&(lo + hi));
    let (l, h) = if bit { (c, hi.clone()) } else { (lo.clone(), c) };
    hull_in(a, &l, &h).expect("the hull ends lie in the set")
}

fn full_hull(a: &RealSet) -> Bracket {
    let (lo, _) = a.inf().expect("nonempty");
    let (hi, _) = a.sup().expect("nonempty");
    (lo.fin().expect("bounded").clone(), hi.fin().expect("bounded").clone())
}

/// The closed hull of the part of `a` addressed by `bits`. Brackets of
/// longer prefixes are nested, each meets `a`, and the bracket at depth `k`
/// has width at most `2^-k` times the hull width of `a`.
pub fn cantor_eval(a: &RealSet, bits: &str) -> Result<Interval> {
    let a = check_compact(a)?;
    let mut b = full_hull(&a);
    for (i, ch) in bits.chars().enumerate() {
        let bit = match ch {
            '0' => false,
            '1' => true,
            _ => return Err(Error::Parse { pos: i, msg: format!("expected a bit, found {ch:?}") }),
        };
        b = descend(&a, &b, bit);
    }
    Ok(Interval::fin(b.0, true, b.1, true).expect("ordered"))
}

/// A path of length `depth` whose brackets all contain `p`.
pub fn cantor_address(a: &RealSet, p: &Rational, depth: u32) -> Result<String> {
    let a = check_compact(a)?;
    if !a.member(p) {
        return Err(Error::NotMember(p.clone()));
    }
    let mut b = full_hull(&a);
    let mut bits = String::new();
    for _ in 0..depth {
        let bit = p > &halve(&(&b.0 + &b.1));
        bits.push(if bit { '1' } else { '0' });
        b = descend(&a, &b, bit);
    }
    Ok(bits)
}

/// The compact transversal as a set, for the Cantor stage.
pub fn transversal_set(plan: &SurjectionPlan) -> Result<RealSet> {
    let t = &plan.domain;
    let mut raw = RealSet::raw(vec![], t.finite.iter().flatten().cloned().collect(), vec![]);
    for f in &t.families {
        for b in &f.boundary {
            raw.schemas.push(SchemaAtom::point_family(b.clone(), f.schema.start.clone())?);
        }
        match &f.interior {
            Some(InteriorSelection::Mobius(m)) => {
                raw.schemas.push(SchemaAtom::point_family(m.clone(), f.schema.start.clone())?);
            }
            Some(InteriorSelection::Weighted(_)) => {
                return Err(Error::Unnormalizable("weighted selections are not Möbius families".into()))
            }
            None => {}
        }
        raw.points.push(f.schema.limit.clone());
    }
    normalize(&raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_set;

    fn plan(s: &str) -> SurjectionPlan {
        build_surjection(&parse_set(s).unwrap()).unwrap()
    }

    const EX: &str = "{0} | fam(n>=1){ (1/(n+1), 1/n) }";

    #[test]
    fn closed_interval_plan() {
        let p = plan("[0,1]");
        assert_eq!(p.domain_points(0), vec![int(0), rat(1, 2), int(1)]);
        assert_eq!(p.eval(&int(0), &int(7)).unwrap(), int(0));
        assert_eq!(p.eval(&int(1), &int(-3)).unwrap(), int(1));
        assert_eq!(p.eval(&rat(1, 2), &int(0)).unwrap(), rat(1, 2));
        assert_eq!(p.eval(&int(0), &int(99)).unwrap(), int(0));
        assert_eq!(p.eval(&rat(1, 2), &int(5)).unwrap(), int(1));
        assert_eq!(p.preimage(&int(0)).unwrap(), (int(0), int(0)));
        assert!(matches!(p.eval(&rat(1, 3), &int(0)), Err(Error::Domain(_))));
    }

    #[test]
    fn singleton_and_open_plans() {
        let p = plan("{5}");
        assert_eq!(p.domain_points(0), vec![int(5)]);
        assert_eq!(p.eval(&int(5), &rat(-7, 3)).unwrap(), int(5));
        let p = plan("(0,1)");
        assert_eq!(p.eval(&rat(1, 2), &int(1)).unwrap(), rat(3, 4));
        assert_eq!(p.preimage(&rat(3, 4)).unwrap(), (rat(1, 2), int(1)));
        assert!(matches!(p.preimage(&int(1)), Err(Error::NotMember(_))));
    }

    #[test]
    fn family_plan() {
        let p = plan(EX);
        assert_eq!(p.eval(&int(0), &int(3)).unwrap(), int(0));
        let (a, y) = p.preimage(&rat(2, 5)).unwrap();
        assert_eq!(a, rat(2, 5));
        assert_eq!(p.eval(&a, &y).unwrap(), rat(2, 5));
        assert!(matches!(build_surjection(&parse_set("fam(n>=1){ (1/(n+1), 1/n) }").unwrap()), Err(Error::NotGcc)));
    }

    #[test]
    fn catalog_images_and_inverses() {
        let cases = [
            "(0,1)", "[0,1]", "(0,1]", "[0,1)", "(2,inf)", "[2,inf)", "(-inf,2)", "(-inf,2]", "(-inf,inf)", "{3}",
        ];
        for c in cases {
            let x = normalize(&parse_set(c).unwrap()).unwrap();
            let iv = x.components().finite[0].clone();
            let g = ComponentSurjection::for_component(&iv);
            assert_eq!(g.image(), iv, "{c}");
            for k in -40..=40 {
                let y = rat(k, 7);
                let v = g.eval(&y);
                assert!(iv.contains(&v), "{c} at {y}");
                let back = g.invert(&v);
                assert_eq!(g.eval(&back), v, "{c}");
            }
        }
    }

    #[test]
    fn continuity_on_fixtures() {
        let e = rat(1, 1000);
        for s in ["[0,1]", EX, "{5}", "(0,1) | [2,inf)"] {
            assert!(continuity_samples(&plan(s), &e, &GridSpec::default()).unwrap().is_empty(), "{s}");
        }
    }

    #[test]
    fn cantor_examples() {
        let two = parse_set("{0} | {1}").unwrap();
        assert_eq!(cantor_eval(&two, "0").unwrap(), Interval::point(int(0)));
        let a = parse_set("{0} | fam(n>=1){ {1/n} }").unwrap();
        assert!(cantor_eval(&a, "1").unwrap().contains(&int(1)));
        assert_eq!(cantor_eval(&parse_set("{5}").unwrap(), "0110").unwrap(), Interval::point(int(5)));
        assert!(matches!(cantor_eval(&parse_set("(0,1)").unwrap(), "0"), Err(Error::NotCompact)));
    }

    #[test]
    fn cantor_brackets_nest_and_shrink() {
        let a = parse_set("{0} | fam(n>=1){ {1/n} } | [2,3]").unwrap();
        for p in [int(0), rat(1, 7), int(1), rat(5, 2), int(3)] {
            let bits = cantor_address(&a, &p, 20).unwrap();
            let mut prev = cantor_eval(&a, "").unwrap();
            for k in 1..=20 {
                let b = cantor_eval(&a, &bits[..k]).unwrap();
                assert!(b.contains(&p));
                assert!(prev.contains(b.lo.fin().unwrap()) && prev.contains(b.hi.fin().unwrap()));
                let w = b.hi.fin().unwrap() - b.lo.fin().unwrap();
                assert!(w <= int(3) * rat(1, 1 << k));
                prev = b;
            }
        }
    }

    #[test]
    fn transversal_as_set() {
        let p = plan(EX);
        let t = transversal_set(&p).unwrap();
        assert!(t.predicates().compact);
        assert!(t.member(&rat(2, 5)));
        assert!(t.member(&int(0)));
        assert_eq!(cantor_eval(&t, "1").unwrap(), Interval::fin(rat(2, 5), true, rat(2, 3), true).unwrap());
    }
}
