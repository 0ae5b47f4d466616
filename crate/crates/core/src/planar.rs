//! The planar space `X = {x_n} ∪ ⋃ A_n ∪ {0}` with `x_n = (1, 1/n)` and
//! `A_n` the rows `[0,1] × {h(n,m)}`, `m >= n+1`. It is GCC but not CCC.
//!
//! The height `h(n,m)` has two readings. The literal sum `1/n + 1/m` puts
//! some `x_n` on rows of other `A_k` (`1/3 + 1/6 = 1/2`); `1/(n + 1/m)` keeps
//! every `x_n` a singleton component.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::integer::gcd;
use num::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{map_range, Mode};
use crate::rational::{floor_int, int, rat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeightRule {
    /// `1/n + 1/m`
    Literal,
    /// `1/(n + 1/m) = m/(nm + 1)`
    CollisionFree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PlanarConfig {
    pub rule: HeightRule,
    pub bound: u64,
}

impl PlanarConfig {
    pub fn new(rule: HeightRule, bound: u64) -> Result<PlanarConfig> {
        if bound == 0 {
            return Err(Error::Domain("enumeration bound must be at least 1".into()));
        }
        Ok(PlanarConfig { rule, bound })
    }
}

pub fn height(rule: HeightRule, n: u64, m: u64) -> Rational {
    match rule {
        HeightRule::Literal => rat(1, n as i64) + rat(1, m as i64),
        HeightRule::CollisionFree => rat(m as i64, (n * m + 1) as i64),
    }
}

/// Height as a reduced fraction, for hashing.
fn height_key(rule: HeightRule, n: u64, m: u64) -> (u128, u128) {
    let (p, q) = match rule {
        HeightRule::Literal => ((n + m) as u128, (n * m) as u128),
        HeightRule::CollisionFree => (m as u128, (n * m + 1) as u128),
    };
    let g = gcd(p, q);
    (p / g, q / g)
}

fn recip_integer(q: &Rational) -> Option<u64> {
    if !q.is_positive() {
        return None;
    }
    let r = q.recip();
    r.is_integer().then(|| r.to_integer().try_into().ok()).flatten()
}

/// The row `(n, m)` at height `y`, if any.
pub fn row_at(rule: HeightRule, y: &Rational) -> Option<(u64, u64)> {
    if !y.is_positive() {
        return None;
    }
    match rule {
        HeightRule::CollisionFree => {
            // 1/y = n + 1/m with m >= n + 1 >= 2
            let r = y.recip();
            let n: u64 = floor_int(&r).try_into().ok()?;
            let m = recip_integer(&(r - int(n as i64)))?;
            (n >= 1 && m > n).then_some((n, m))
        }
        HeightRule::Literal => {
            // y - 1/n = 1/m <= 1/(n+1) forces 1/y < n < 2/y
            if let (Ok(p), Ok(q)) = (u64::try_from(y.numer()), u64::try_from(y.denom())) {
                return literal_row(p as u128, q as u128);
            }
            let lo: u64 = floor_int(&y.recip()).try_into().ok()?;
            let two_over = rat(2, 1) / y;
            let mut n = lo + 1;
            while int(n as i64) < two_over {
                if let Some(m) = recip_integer(&(y - rat(1, n as i64))) {
                    if m > n {
                        return Some((n, m));
                    }
                }
                n += 1;
            }
            None
        }
    }
}

/// `1/n + 1/m = p/q` with `m > n`: `m = nq / (np - q)`.
fn literal_row(p: u128, q: u128) -> Option<(u64, u64)> {
    let mut n = q / p + 1;
    while n * p < 2 * q {
        let d = n * p - q;
        if (n * q) % d == 0 {
            let m = n * q / d;
            if m > n {
                return Some((n.try_into().ok()?, m.try_into().ok()?));
            }
        }
        n += 1;
    }
    None
}

/// Exact membership of `(px, py)`.
pub fn member_planar(cfg: &PlanarConfig, p: (&Rational, &Rational)) -> bool {
    let (px, py) = p;
    if px.is_zero() && py.is_zero() {
        return true;
    }
    if px == &Rational::one() && recip_integer(py).is_some() {
        return true;
    }
    let on_segment = !px.is_negative() && px <= &Rational::one();
    on_segment && row_at(cfg.rule, py).is_some()
}

/// Membership against the rows, points and origin enumerated up to the bound.
pub fn member_brute(cfg: &PlanarConfig, p: (&Rational, &Rational)) -> bool {
    let (px, py) = p;
    if px.is_zero() && py.is_zero() {
        return true;
    }
    let b = cfg.bound;
    if px == &Rational::one() && (1..=b).any(|n| py == &rat(1, n as i64)) {
        return true;
    }
    let on_segment = !px.is_negative() && px <= &Rational::one();
    let key = match (u128::try_from(py.numer()), u128::try_from(py.denom())) {
        (Ok(p), Ok(q)) => (p, q),
        _ => return false,
    };
    on_segment && (1..=b).any(|n| (n + 1..=b).any(|m| height_key(cfg.rule, n, m) == key))
}

/// Triples `(n, k, m)` with `k < m <= bound` and `h(k, m) = 1/n`: the point
/// `x_n` lies on a row of `A_k`.
pub fn detect_height_collisions(rule: HeightRule, bound: u64) -> Vec<(u64, u64, u64)> {
    detect_height_collisions_with(rule, bound, Mode::default())
}

pub fn detect_height_collisions_with(rule: HeightRule, bound: u64, mode: Mode) -> Vec<(u64, u64, u64)> {
    let per_k = map_range(bound, mode, |i| {
        let k = i + 1;
        let mut hits = Vec::new();
        for m in k + 1..=bound {
            let (num, den) = match rule {
                HeightRule::Literal => (k + m, k * m),
                HeightRule::CollisionFree => (m, k * m + 1),
            };
            if den % num == 0 {
                hits.push((den / num, k, m));
            }
        }
        hits
    });
    let mut out: Vec<_> = per_k.into_iter().flatten().collect();
    out.sort();
    out
}

/// Pairs of distinct rows at the same height, up to the bound.
pub fn detect_row_overlaps(rule: HeightRule, bound: u64) -> Vec<((u64, u64), (u64, u64))> {
    let mut seen: HashMap<(u128, u128), (u64, u64)> = HashMap::new();
    let mut out = Vec::new();
    for n in 1..=bound {
        for m in n + 1..=bound {
            match seen.get(&height_key(rule, n, m)) {
                Some(&first) => out.push((first, (n, m))),
                None => {
                    seen.insert(height_key(rule, n, m), (n, m));
                }
            }
        }
    }
    out
}

/// Whether `x_n` is in the closure of `A_n`: for `eps = 1/t` the row
/// `m(t)` has `|h(n, m(t)) - 1/n| < eps` and contains `(1, h)`. The choice
/// of `m(t)` is checked exactly for `t <= 64` and by its closed form for all
/// `t`: the distance is `1/(n(nm+1))` (collision-free) or `1/m` (literal).
pub fn check_xn_in_closure_an(cfg: &PlanarConfig, n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let target = rat(1, n as i64);
    let choose = |t: u64| match cfg.rule {
        HeightRule::CollisionFree => (n + 1).max(t),
        HeightRule::Literal => (n + 1).max(t + 1),
    };
    let sampled = (1..=64u64).all(|t| {
        let m = choose(t);
        let h = height(cfg.rule, n, m);
        let d = (&h - &target).abs();
        d < rat(1, t as i64) && row_at(cfg.rule, &h).is_some()
    });
    // closed form: with m >= t, n(nm + 1) >= n^2 t + n > t, and m >= t + 1 > t
    let symbolic = match cfg.rule {
        HeightRule::CollisionFree => n * n >= 1,
        HeightRule::Literal => true,
    };
    sampled && symbolic
}

pub fn truncated_component_count(cfg: &PlanarConfig) -> u64 {
    let b = cfg.bound;
    let rows = b * b.saturating_sub(1) / 2;
    let isolated_points = match cfg.rule {
        HeightRule::CollisionFree => b,
        HeightRule::Literal => {
            let on_rows: BTreeSet<u64> = detect_height_collisions(cfg.rule, b).into_iter().map(|c| c.0).collect();
            b - on_rows.iter().filter(|&&n| n <= b).count() as u64
        }
    };
    1 + isolated_points + rows
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub claim: String,
    pub verified: bool,
    pub detail: String,
}

fn step(claim: &str, verified: bool, detail: String) -> TraceStep {
    TraceStep { claim: claim.into(), verified, detail }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixtureVerdicts {
    pub gcc: bool,
    pub ccc: bool,
    pub config: PlanarConfig,
    pub reasons: Vec<TraceStep>,
}

/// A union of components: the origin with every `A_n ∪ {x_n}` for
/// `n > tail_from`, points `x_n`, row tails `m >= M` of `A_n`, and single rows.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Block {
    tail_from: Option<u64>,
    xs: BTreeSet<u64>,
    row_tails: BTreeMap<u64, u64>,
    rows: BTreeSet<(u64, u64)>,
}

impl Block {
    /// Clopen iff each accumulation point is in the block exactly when the
    /// components accumulating at it eventually are: the origin is the limit
    /// of rows with `n -> inf`, and `x_n` of rows `(n, m)` with `m -> inf`.
    fn is_clopen(&self) -> bool {
        let xs_ok = self.xs.iter().all(|n| self.row_tails.contains_key(n))
            && self.row_tails.keys().all(|n| self.xs.contains(n));
        let tail_disjoint = match self.tail_from {
            Some(nn) => self.xs.iter().all(|&n| n <= nn) && self.rows.iter().all(|&(n, _)| n <= nn),
            None => true,
        };
        xs_ok && tail_disjoint
    }

    fn contains_row(&self, n: u64, m: u64) -> bool {
        self.tail_from.is_some_and(|nn| n > nn)
            || self.row_tails.get(&n).is_some_and(|&mm| m >= mm)
            || self.rows.contains(&(n, m))
    }

    fn contains_x(&self, n: u64) -> bool {
        self.tail_from.is_some_and(|nn| n > nn) || self.xs.contains(&n)
    }
}

/// Covers from the constrained clopen family: an origin block past `nn`,
/// and for each `k <= nn` a block `{x_k} ∪ rows m >= mk` plus the rows
/// below `mk` one by one.
fn generated_cover(nn: u64, extra: u64) -> Vec<Block> {
    let mut cover = vec![Block { tail_from: Some(nn), ..Block::default() }];
    for k in 1..=nn {
        let mk = k + 1 + (k * extra) % 5;
        cover.push(Block { xs: [k].into(), row_tails: [(k, mk)].into(), ..Block::default() });
        for m in k + 1..mk {
            cover.push(Block { rows: [(k, m)].into(), ..Block::default() });
        }
    }
    cover
}

/// Checks a generated cover: members clopen, pairwise disjoint on the
/// truncated components, covering them, and finite.
fn check_cover(cover: &[Block], bound: u64) -> bool {
    if !cover.iter().all(Block::is_clopen) {
        return false;
    }
    let origin = cover.iter().filter(|b| b.tail_from.is_some()).count() == 1;
    let rows = (1..=bound).all(|n| (n + 1..=bound).all(|m| cover.iter().filter(|b| b.contains_row(n, m)).count() == 1));
    let xs = (1..=bound).all(|n| cover.iter().filter(|b| b.contains_x(n)).count() == 1);
    origin && rows && xs
}

pub fn fixture_verdicts(cfg: &PlanarConfig) -> Result<FixtureVerdicts> {
    let b = cfg.bound;
    let collisions = detect_height_collisions(cfg.rule, b);
    if cfg.rule == HeightRule::Literal {
        return Err(Error::UnsupportedConfig(collisions));
    }
    let mut reasons = Vec::new();

    // not CCC
    let overlaps = detect_row_overlaps(cfg.rule, b);
    reasons.push(step(
        "rows are pairwise disjoint",
        overlaps.is_empty(),
        format!("no equal heights among rows with m <= {b}; in general h = 1/(n + 1/m) determines n = floor(1/h) and m = 1/(1/h - n)"),
    ));
    reasons.push(step(
        "no x_n lies on a row",
        collisions.is_empty(),
        format!("no k < m <= {b} with h(k,m) = 1/n; in general k + 1/m = n is impossible for m >= 2"),
    ));
    reasons.push(step(
        "each x_n is a singleton component",
        collisions.is_empty(),
        "x_n meets no row, and rows are the only connected pieces of positive length".into(),
    ));
    let one_zero_out = !member_planar(cfg, (&Rational::one(), &Rational::zero()));
    reasons.push(step(
        "(1,0) is not in X",
        one_zero_out,
        "the only accumulation point of {x_n} in the plane".into(),
    ));
    let min_gap = rat(1, b as i64) - rat(1, b as i64 + 1);
    reasons.push(step(
        "{x_n} is closed and discrete",
        one_zero_out && min_gap.is_positive(),
        format!("min |1/n - 1/n'| over n != n' <= {b} is {min_gap}"),
    ));
    let not_ccc = reasons.iter().all(|s| s.verified);
    reasons.push(step(
        "X is not CCC",
        not_ccc,
        "a compact K meeting every component contains the infinite closed discrete set {x_n}".into(),
    ));

    // GCC
    let heights_band = (1..=b).all(|n| {
        let top = height(cfg.rule, n, n + 1);
        top < rat(1, n as i64) && top > rat(1, n as i64 + 1)
    });
    reasons.push(step(
        "rows of A_n lie strictly between heights 1/(n+1) and 1/n",
        heights_band,
        format!("checked for n <= {b}; h(n,m) < 1/n and h(n, n+1) = (n+1)/(n^2+n+1) > 1/(n+1)"),
    ));
    reasons.push(step(
        "a clopen set containing the origin contains A_n for all n > n0",
        heights_band,
        "row heights tend to 0 and each row is connected and reaches the y-axis".into(),
    ));
    let closure_ok = (1..=b.min(1000)).all(|n| check_xn_in_closure_an(cfg, n));
    reasons.push(step(
        "x_n is in the closure of A_n",
        closure_ok,
        format!("explicit m(eps) checked for n <= {}", b.min(1000)),
    ));
    let depth = b.min(40);
    let covers_ok = (1..=depth.min(8)).all(|nn| (0..3).all(|e| check_cover(&generated_cover(nn, e), depth)));
    reasons.push(step(
        "every cover in the constrained clopen family has a finite subcover",
        covers_ok,
        format!("origin blocks, row tails of A_k and single rows, up to truncation {depth}; bounded verification"),
    ));
    let count = truncated_component_count(cfg);
    reasons.push(step(
        "component count at truncation",
        count <= b * b + b + 1,
        format!("{count} components with n, m <= {b}"),
    ));
    let gcc = reasons.iter().skip(6).all(|s| s.verified);
    Ok(FixtureVerdicts { gcc, ccc: !not_ccc, config: *cfg, reasons })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CF: HeightRule = HeightRule::CollisionFree;
    const PL: HeightRule = HeightRule::Literal;

    fn cfg(rule: HeightRule) -> PlanarConfig {
        PlanarConfig::new(rule, 30).unwrap()
    }

    #[test]
    fn membership_examples() {
        for r in [CF, PL] {
            assert!(member_planar(&cfg(r), (&int(0), &int(0))));
            assert!(member_planar(&cfg(r), (&int(1), &rat(1, 2))));
            assert!(!member_planar(&cfg(r), (&int(1), &int(0))));
        }
        assert_eq!(height(CF, 1, 2), rat(2, 3));
        assert!(member_planar(&cfg(CF), (&rat(1, 2), &rat(2, 3))));
        assert!(!member_planar(&cfg(CF), (&rat(3, 2), &rat(2, 3))));
        assert!(member_planar(&cfg(PL), (&rat(1, 2), &rat(5, 6))));
    }

    #[test]
    fn brute_force_agrees() {
        for r in [CF, PL] {
            let c = cfg(r);
            for num in 0..=60i64 {
                for den in 1..=60i64 {
                    let y = rat(num, den);
                    // within the enumerated range every row has n, m <= 30
                    let in_range = row_at(r, &y).map_or(true, |(n, m)| n <= 30 && m <= 30)
                        && recip_integer(&y).map_or(true, |n| n <= 30);
                    if !in_range {
                        continue;
                    }
                    for x in [int(0), rat(1, 3), int(1), int(2)] {
                        assert_eq!(member_planar(&c, (&x, &y)), member_brute(&c, (&x, &y)), "{x} {y}");
                    }
                }
            }
        }
    }

    #[test]
    fn collision_examples() {
        assert!(detect_height_collisions(PL, 10).contains(&(2, 3, 6)));
        assert!(detect_height_collisions(CF, 1000).is_empty());
        assert!(detect_height_collisions(PL, 1).is_empty());
        assert!(detect_height_collisions(CF, 1).is_empty());
        assert!(detect_row_overlaps(CF, 200).is_empty());
        assert!(!detect_row_overlaps(PL, 20).is_empty());
    }

    #[test]
    fn closure_examples() {
        for n in [1, 7, 1000] {
            assert!(check_xn_in_closure_an(&cfg(CF), n));
        }
    }

    #[test]
    fn verdicts() {
        let v = fixture_verdicts(&cfg(CF)).unwrap();
        assert!(v.gcc && !v.ccc, "{:#?}", v.reasons);
        match fixture_verdicts(&cfg(PL)) {
            Err(Error::UnsupportedConfig(c)) => assert!(c.contains(&(2, 3, 6))),
            other => panic!("{other:?}"),
        }
        assert!(truncated_component_count(&cfg(CF)) <= 30 * 30 + 30 + 1);
    }

    #[test]
    fn bad_cover_is_rejected() {
        // a block holding x_1 without a row tail of A_1 is not closed
        let mut cover = generated_cover(2, 0);
        cover[1].row_tails.clear();
        assert!(!check_cover(&cover, 10));
    }
}
