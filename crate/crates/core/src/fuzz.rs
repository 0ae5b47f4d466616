//! Seeded random sets and the property battery run over them.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dsl::parse_set;
use crate::error::{Error, Result};
use crate::gcc::{
    build_transversal, clopen_chain_intersection, cover_to_surjection, decide_ccc, decide_gcc_sequences,
    decide_gcc_transversal, mobius_selection, split_clopen, verify_cover, verify_witness_k, witness_non_gcc_cover,
    ClopenChain, Endpoint, MovingInterval, SelectorPolicy,
};
use crate::interval::Interval;
use crate::maps::{extremum_report, pushforward, Affine, PLMap};
use crate::mobius::{MobiusSeq, Side, TForm};
use crate::ops::{closure, complement_in, is_clopen_in, normalize, semantic_eq, union, union_all};
use crate::par::{map_range, Mode};
use crate::rational::{int, rat, Ext, Rational};
use crate::realset::{RealSet, SchemaAtom};
use crate::report::{corollary1, corollary2};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzSpec {
    pub seed: u64,
    pub trials: u64,
    /// Upper bound on interval and point atoms each.
    pub max_atoms: usize,
    pub max_schemas: usize,
    /// Magnitude bound for generated endpoints and limits.
    pub coeff_bound: i64,
    /// Replace the sequence decider with a known-bad one.
    pub mutate: bool,
}

impl FuzzSpec {
    pub fn new(seed: u64, trials: u64) -> FuzzSpec {
        FuzzSpec { seed, trials, max_atoms: 3, max_schemas: 2, coeff_bound: 4, mutate: false }
    }
}

/// Deterministic generator for trial `index`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

fn small(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    rat(rng.gen_range(-4 * bound..=4 * bound), rng.gen_range(1..=4))
}

fn gen_interval(rng: &mut ChaCha8Rng, bound: i64) -> Interval {
    let lo = small(rng, bound);
    let hi = &lo + rat(rng.gen_range(1..=8), rng.gen_range(1..=4));
    let lo = if rng.gen_bool(0.08) { Ext::NegInf } else { Ext::Fin(lo) };
    let hi = if rng.gen_bool(0.08) { Ext::PosInf } else { Ext::Fin(hi) };
    let (lc, hc) = (rng.gen_bool(0.5), rng.gen_bool(0.5));
    Interval::new(lo.clone(), lc && lo.is_finite(), hi.clone(), hc && hi.is_finite()).expect("positive width")
}

fn gen_schema(rng: &mut ChaCha8Rng, bound: i64) -> Result<SchemaAtom> {
    let limit = small(rng, bound);
    let side = if rng.gen_bool(0.5) { Side::Below } else { Side::Above };
    let alpha = [int(1), int(2), rat(1, 2), int(3)].choose(rng).expect("nonempty").clone();
    let beta = rat(rng.gen_range(0..=8), 4);
    let start = BigInt::from(rng.gen_range(1..=3));
    let seq = |beta: &Rational| MobiusSeq::from_tform(&TForm { limit: limit.clone(), side, alpha: alpha.clone(), beta: beta.clone() });
    if rng.gen_bool(0.4) {
        return SchemaAtom::point_family(seq(&beta), start);
    }
    let width = &alpha * rat(rng.gen_range(1..=3), 4);
    let near = seq(&beta);
    let far = seq(&(&beta + width));
    let (left, right) = match side {
        Side::Below => (near, far),
        Side::Above => (far, near),
    };
    SchemaAtom::interval_family(left, rng.gen_bool(0.5), right, rng.gen_bool(0.5), start)
}

/// A raw (unnormalized) random set. About half the cases carry a schema,
/// and about half of those omit the schema limit.
pub fn gen_case(rng: &mut ChaCha8Rng, spec: &FuzzSpec) -> Result<RealSet> {
    let b = spec.coeff_bound;
    let intervals: Vec<Interval> = (0..rng.gen_range(0..=spec.max_atoms)).map(|_| gen_interval(rng, b)).collect();
    let mut points: Vec<Rational> = (0..rng.gen_range(0..=spec.max_atoms)).map(|_| small(rng, b)).collect();
    let mut schemas = Vec::new();
    if rng.gen_bool(0.5) {
        for _ in 0..rng.gen_range(1..=spec.max_schemas.max(1)) {
            let s = gen_schema(rng, b)?;
            if rng.gen_bool(0.5) {
                points.push(s.limit.clone());
            }
            schemas.push(s);
        }
    }
    if intervals_empty(&intervals, &points, &schemas) {
        points.push(small(rng, b));
    }
    Ok(RealSet::raw(intervals, points, schemas))
}

fn intervals_empty(i: &[Interval], p: &[Rational], s: &[SchemaAtom]) -> bool {
    i.is_empty() && p.is_empty() && s.is_empty()
}

/// A continuous piecewise-linear map with up to two breakpoints.
pub fn gen_plmap(rng: &mut ChaCha8Rng) -> PLMap {
    let slopes = [int(-2), int(-1), int(0), rat(1, 2), int(1), int(3)];
    let mut bps: Vec<Rational> = (0..rng.gen_range(0..=2)).map(|_| small(rng, 3)).collect();
    bps.sort();
    bps.dedup();
    let mut pieces = vec![Affine::new(slopes.choose(rng).expect("nonempty").clone(), small(rng, 3))];
    for b in &bps {
        let prev = pieces.last().expect("nonempty").clone();
        let s = slopes.choose(rng).expect("nonempty").clone();
        let offset = prev.eval(b) - &s * b;
        pieces.push(Affine::new(s, offset));
    }
    PLMap::new(bps, pieces).expect("continuous by construction")
}

/// A random member of a normalized nonempty set.
pub fn sample_member(x: &RealSet, rng: &mut ChaCha8Rng) -> Option<Rational> {
    let comps = x.components();
    let limits = x.local_connectedness_defects();
    let total = comps.finite.len() + comps.families.len() + limits.len();
    if total == 0 {
        return None;
    }
    let k = rng.gen_range(0..total);
    let iv = if k < comps.finite.len() {
        comps.finite[k].clone()
    } else if k < comps.finite.len() + comps.families.len() {
        let (s, _) = &comps.families[k - comps.finite.len()];
        s.piece(&(&s.start + BigInt::from(rng.gen_range(0..40))))
    } else {
        return Some(limits[k - comps.finite.len() - comps.families.len()].clone());
    };
    let u = rat(rng.gen_range(1..64), 64);
    let q = match (&iv.lo, &iv.hi) {
        _ if iv.is_point() => iv.point_value().expect("point").clone(),
        (Ext::Fin(a), Ext::Fin(b)) => match rng.gen_range(0..8) {
            0 if iv.lo_closed => a.clone(),
            1 if iv.hi_closed => b.clone(),
            _ => a + (b - a) * u,
        },
        (Ext::Fin(a), _) => a + u * int(rng.gen_range(1..200)),
        (_, Ext::Fin(b)) => b - u * int(rng.gen_range(1..200)),
        _ => small(rng, 50),
    };
    debug_assert!(x.member(&q));
    Some(q)
}

pub fn sample_y(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-400..=400), rng.gen_range(1..=8))
}

// --------------------------------------------------------------------- battery

pub const CHECKS: [&str; 15] = [
    "decider-agreement",
    "policy-invariance",
    "witness-soundness",
    "surjection-onto-n",
    "ccc-implies-gcc",
    "corollary1",
    "corollary2",
    "corollary3",
    "prop1-pushforward",
    "prop1-clopen-split",
    "prop1-closure",
    "prop1-boundary-points",
    "prop1-union",
    "clopen-chain",
    "dsl-roundtrip",
];

/// `Some(ok)` when a check applies, `None` when it does not (or a derived
/// set could not be normalized).
pub type CheckResult = Option<bool>;

fn gcc(x: &RealSet) -> Result<bool> {
    Ok(decide_gcc_transversal(x)?.verdict)
}

fn skip_unnormalizable(r: Result<bool>) -> CheckResult {
    match r {
        Ok(b) => Some(b),
        Err(Error::Unnormalizable(_)) => None,
        Err(_) => Some(false),
    }
}

/// A deliberately wrong sequence decider for mutation testing: it calls
/// every set with a family non-GCC.
fn mutant_verdict(x: &RealSet) -> bool {
    x.schemas.is_empty()
}

pub fn agreement(x: &RealSet, mutate: bool) -> Result<bool> {
    let a = gcc(x)?;
    let b = if mutate { mutant_verdict(x) } else { decide_gcc_sequences(x)?.verdict };
    Ok(a == b)
}

pub fn policies(seeds: std::ops::Range<u64>) -> Vec<SelectorPolicy> {
    let mut v = vec![SelectorPolicy::Midpoint, SelectorPolicy::LeftmostProbe];
    v.extend(seeds.map(SelectorPolicy::SeededRandom));
    v
}

pub fn policy_invariant(x: &RealSet, ps: &[SelectorPolicy]) -> Result<bool> {
    let base = gcc(x)?;
    for p in ps {
        if build_transversal(x, *p)?.is_compact() != base {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn witness_sound(x: &RealSet) -> Result<bool> {
    if gcc(x)? {
        let v = decide_ccc(x)?;
        let Some(k) = v.witness_k else { return Ok(false) };
        Ok(verify_witness_k(x, &k)?.ok())
    } else {
        let cover = witness_non_gcc_cover(x)?;
        Ok(verify_cover(x, &cover)?.valid() && cover.certified_infinite(x)?)
    }
}

fn surjection_onto_n(x: &RealSet, rng: &mut ChaCha8Rng) -> Result<Option<bool>> {
    if gcc(x)? {
        return Ok(None);
    }
    let f = cover_to_surjection(x, &witness_non_gcc_cover(x)?)?;
    for _ in 0..5 {
        let q = sample_member(x, rng).expect("nonempty");
        let k = f.eval(&q)?;
        if !f.preimage(&k)?.member(&q) {
            return Ok(Some(false));
        }
    }
    for k in 1..=3 {
        let p = f.preimage(&BigInt::from(k))?;
        if p.is_empty() || !is_clopen_in(&p, x)? {
            return Ok(Some(false));
        }
    }
    Ok(Some(true))
}

fn boundary_points(x: &RealSet, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let mut v: Vec<Rational> = x.intervals.iter().flat_map(|i| [i.lo.fin().cloned(), i.hi.fin().cloned()]).flatten().collect();
    for s in &x.schemas {
        v.push(s.limit.clone());
        let p = s.piece(&(&s.start + BigInt::from(rng.gen_range(0..5))));
        v.extend(p.lo.fin().cloned());
    }
    v.shuffle(rng);
    v.truncate(3);
    v
}

/// A nested chain of nonempty clopen sets shrinking toward a family limit,
/// with moving endpoint on a gap sequence of the complement.
fn gap_chain(x: &RealSet) -> Result<Option<ClopenChain>> {
    let comp = complement_in(x, None)?;
    for s in &x.schemas {
        let side = s.side().expect("moving family");
        let Some(gap) = comp.schemas.iter().find(|c| c.limit == s.limit && c.side() == Some(side)) else { continue };
        let Some(g) = mobius_selection(gap) else { continue };
        let window = match side {
            Side::Below => MovingInterval {
                lo: Endpoint::Moving(g),
                lo_closed: false,
                hi: Endpoint::Fixed(Ext::PosInf),
                hi_closed: false,
                start: BigInt::one(),
            },
            Side::Above => MovingInterval {
                lo: Endpoint::Fixed(Ext::NegInf),
                lo_closed: false,
                hi: Endpoint::Moving(g),
                hi_closed: false,
                start: BigInt::one(),
            },
        };
        let witness = Some(MobiusSeq::constant(s.limit.clone()));
        return Ok(Some(ClopenChain { fixed: RealSet::empty(), window: Some(window), witness }));
    }
    Ok(None)
}

fn chain_check(x: &RealSet) -> Result<Option<bool>> {
    if !gcc(x)? {
        return Ok(None);
    }
    let chain = gap_chain(x)?.unwrap_or_else(|| ClopenChain::constant(x.clone()));
    chain.validate(x)?;
    if chain.window.is_some() && !chain.certified_nonempty(x)? {
        return Ok(Some(false));
    }
    Ok(Some(!clopen_chain_intersection(x, &chain)?.is_empty()))
}

/// Runs every check on a normalized set.
pub fn battery(x: &RealSet, rng: &mut ChaCha8Rng, mutate: bool, seeds: std::ops::Range<u64>) -> BTreeMap<&'static str, CheckResult> {
    let mut out = BTreeMap::new();
    let g = match gcc(x) {
        Ok(g) => g,
        Err(_) => {
            out.insert("decider-agreement", Some(false));
            return out;
        }
    };
    out.insert("decider-agreement", skip_unnormalizable(agreement(x, mutate)));
    out.insert("policy-invariance", skip_unnormalizable(policy_invariant(x, &policies(seeds))));
    out.insert("witness-soundness", skip_unnormalizable(witness_sound(x)));
    out.insert("surjection-onto-n", surjection_onto_n(x, rng).unwrap_or(Some(false)));
    out.insert("ccc-implies-gcc", skip_unnormalizable(decide_ccc(x).map(|c| !c.verdict || g)));
    out.insert("corollary1", skip_unnormalizable(corollary1(x, g)));
    out.insert("corollary2", skip_unnormalizable(corollary2(x, g)));
    let m = gen_plmap(rng);
    out.insert("corollary3", if g { skip_unnormalizable(extremum_report(&m, x).map(|r| r.trichotomy_holds())) } else { None });
    out.insert("prop1-pushforward", if g { skip_unnormalizable(pushforward(&m, x).and_then(|y| gcc(&y))) } else { None });
    let split = (0..8).find_map(|_| {
        let c = small(rng, 6);
        match split_clopen(x, &c) {
            Ok((a, b)) => Some(gcc(&a).and_then(|ga| Ok(ga && gcc(&b)?))),
            Err(Error::InvalidCut(_)) => None,
            Err(e) => Some(Err(e)),
        }
    });
    out.insert("prop1-clopen-split", if g { split.map(|r| skip_unnormalizable(r)).unwrap_or(None) } else { None });
    out.insert("prop1-closure", if g { skip_unnormalizable(closure(x).and_then(|c| gcc(&c))) } else { None });
    let pts = boundary_points(x, rng);
    let with_pts = || -> Result<bool> {
        let extra = RealSet::raw(vec![], pts.clone(), vec![]);
        gcc(&union(x, &extra)?)
    };
    out.insert("prop1-boundary-points", if g { skip_unnormalizable(with_pts()) } else { None });
    let other = (0..5).find_map(|_| {
        let raw = gen_case(rng, &FuzzSpec::new(0, 0)).ok()?;
        let y = normalize(&raw).ok()?;
        gcc(&y).ok()?.then_some(y)
    });
    out.insert(
        "prop1-union",
        match (g, other) {
            (true, Some(y)) => skip_unnormalizable(union_all([x, &y]).and_then(|u| gcc(&u))),
            _ => None,
        },
    );
    out.insert("clopen-chain", chain_check(x).unwrap_or(Some(false)));
    let rt = parse_set(&x.to_dsl()).and_then(|y| semantic_eq(x, &normalize(&y)?));
    out.insert("dsl-roundtrip", Some(rt.unwrap_or(false)));
    out
}

// --------------------------------------------------------------------- runner

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckTally {
    pub pass: u64,
    pub fail: u64,
    pub skipped: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub trial: u64,
    pub case: String,
    pub failed_checks: Vec<String>,
    pub shrunk: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzSummary {
    pub seed: u64,
    pub trials: u64,
    pub passed: u64,
    pub failed: u64,
    pub unnormalizable: u64,
    pub gcc_cases: u64,
    pub non_gcc_cases: u64,
    pub checks: BTreeMap<String, CheckTally>,
    pub failures: Vec<Failure>,
}

impl FuzzSummary {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn unnormalizable_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.unnormalizable as f64 / self.trials as f64
        }
    }
}

enum Outcome {
    Unnormalizable,
    Checked { gcc: bool, results: BTreeMap<&'static str, CheckResult>, raw: RealSet },
}

fn run_trial(spec: &FuzzSpec, index: u64) -> Outcome {
    let mut rng = trial_rng(spec.seed, index);
    let raw = match gen_case(&mut rng, spec) {
        Ok(r) => r,
        Err(_) => return Outcome::Unnormalizable,
    };
    let x = match normalize(&raw) {
        Ok(x) => x,
        Err(_) => return Outcome::Unnormalizable,
    };
    let g = gcc(&x).unwrap_or(false);
    let results = battery(&x, &mut rng, spec.mutate, 0..10);
    Outcome::Checked { gcc: g, results, raw }
}

fn fails(raw: &RealSet, mutate: bool, names: &[String]) -> bool {
    let Ok(x) = normalize(raw) else { return false };
    let mut rng = trial_rng(0, 0);
    let r = battery(&x, &mut rng, mutate, 0..10);
    names.iter().any(|n| r.get(n.as_str()) == Some(&Some(false)))
}

/// Greedy shrinking: drop atoms, then schemas, then round coefficients.
pub fn shrink(raw: &RealSet, still_fails: impl Fn(&RealSet) -> bool) -> RealSet {
    let mut cur = raw.clone();
    loop {
        let mut cands: Vec<RealSet> = Vec::new();
        for i in 0..cur.intervals.len() {
            let mut c = cur.clone();
            c.intervals.remove(i);
            cands.push(c);
        }
        for i in 0..cur.points.len() {
            let mut c = cur.clone();
            c.points.remove(i);
            cands.push(c);
        }
        for i in 0..cur.schemas.len() {
            let mut c = cur.clone();
            c.schemas.remove(i);
            cands.push(c);
        }
        for i in 0..cur.intervals.len() {
            let iv = &cur.intervals[i];
            let round = |e: &Ext, up: bool| match e {
                Ext::Fin(q) if !q.is_integer() => Ext::Fin(if up { q.ceil() } else { q.floor() }),
                e => e.clone(),
            };
            if let Some(r) = Interval::new(round(&iv.lo, false), iv.lo_closed, round(&iv.hi, true), iv.hi_closed) {
                if &r != iv {
                    let mut c = cur.clone();
                    c.intervals[i] = r;
                    cands.push(c);
                }
            }
        }
        for i in 0..cur.points.len() {
            if !cur.points[i].is_integer() {
                let mut c = cur.clone();
                c.points[i] = cur.points[i].floor();
                cands.push(c);
            }
        }
        match cands.into_iter().find(|c| !c.is_empty() && still_fails(c)) {
            Some(c) => cur = c,
            None => return cur,
        }
    }
}

pub fn fuzz_run(spec: &FuzzSpec) -> FuzzSummary {
    fuzz_run_with(spec, Mode::default())
}

pub fn fuzz_run_with(spec: &FuzzSpec, mode: Mode) -> FuzzSummary {
    let outcomes = map_range(spec.trials, mode, |i| run_trial(spec, i));
    let mut summary = FuzzSummary {
        seed: spec.seed,
        trials: spec.trials,
        passed: 0,
        failed: 0,
        unnormalizable: 0,
        gcc_cases: 0,
        non_gcc_cases: 0,
        checks: CHECKS.iter().map(|c| (c.to_string(), CheckTally::default())).collect(),
        failures: Vec::new(),
    };
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Outcome::Unnormalizable => summary.unnormalizable += 1,
            Outcome::Checked { gcc, results, raw } => {
                if gcc {
                    summary.gcc_cases += 1;
                } else {
                    summary.non_gcc_cases += 1;
                }
                let mut failed = Vec::new();
                for (name, r) in results {
                    let t = summary.checks.entry(name.to_string()).or_default();
                    match r {
                        Some(true) => t.pass += 1,
                        Some(false) => {
                            t.fail += 1;
                            failed.push(name.to_string());
                        }
                        None => t.skipped += 1,
                    }
                }
                if failed.is_empty() {
                    summary.passed += 1;
                } else {
                    summary.failed += 1;
                    if summary.failures.len() < 10 {
                        let shrunk = shrink(&raw, |c| fails(c, spec.mutate, &failed));
                        summary.failures.push(Failure {
                            trial: i as u64,
                            case: raw.to_dsl(),
                            failed_checks: failed,
                            shrunk: shrunk.to_dsl(),
                        });
                    }
                }
            }
        }
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let s = FuzzSpec::new(7, 20);
        let a = fuzz_run_with(&s, Mode::Sequential);
        let b = fuzz_run_with(&s, Mode::Parallel);
        assert_eq!(a, b);
    }

    #[test]
    fn small_run_passes() {
        let s = fuzz_run(&FuzzSpec::new(1, 100));
        assert!(s.ok(), "{:#?}", s.failures);
        assert!(s.unnormalizable_rate() < 0.01);
        assert!(s.gcc_cases > 0 && s.non_gcc_cases > 0);
    }

    #[test]
    fn zero_trials() {
        let s = fuzz_run(&FuzzSpec::new(1, 0));
        assert!(s.ok());
        assert_eq!(s.passed + s.failed + s.unnormalizable, 0);
    }

    #[test]
    fn mutation_is_caught_and_shrunk() {
        let mut spec = FuzzSpec::new(3, 60);
        spec.mutate = true;
        let s = fuzz_run(&spec);
        assert!(!s.ok());
        let f = &s.failures[0];
        assert!(f.failed_checks.contains(&"decider-agreement".to_string()));
        // the minimal failing case is a single family with its limit
        let shrunk = normalize(&parse_set(&f.shrunk).unwrap()).unwrap();
        assert_eq!(shrunk.schemas.len(), 1, "{}", f.shrunk);
        assert!(shrunk.intervals.is_empty());
    }
}
