use num::bigint::BigInt;
use proptest::prelude::*;
use realtopo::dsl::parse_set;
use realtopo::fuzz::{gen_case, trial_rng, FuzzSpec};
use realtopo::rational::{int, rat};
use realtopo::*;

fn case(seed: u64) -> Option<(RealSet, RealSet)> {
    let raw = gen_case(&mut trial_rng(seed, 0), &FuzzSpec::new(seed, 1)).ok()?;
    let x = normalize(&raw).ok()?;
    Some((raw, x))
}

/// Endpoints, limits and nearby points of every atom, plus a few far away.
fn probes(x: &RealSet) -> Vec<Rational> {
    let eps = [int(0), rat(1, 1000), rat(-1, 1000), rat(1, 1_000_000), rat(-1, 1_000_000)];
    let mut keys: Vec<Rational> = vec![int(-100), int(0), int(100)];
    for i in &x.intervals {
        keys.extend(i.lo.fin().cloned());
        keys.extend(i.hi.fin().cloned());
    }
    keys.extend(x.points.iter().cloned());
    for s in &x.schemas {
        keys.push(s.limit.clone());
        for k in [0, 1, 2, 5, 40, 1000] {
            let p = s.piece(&(&s.start + BigInt::from(k)));
            let (lo, hi) = (p.lo.fin().cloned(), p.hi.fin().cloned());
            if let (Some(a), Some(b)) = (&lo, &hi) {
                keys.push((a + b) / int(2));
            }
            keys.extend(lo);
            keys.extend(hi);
        }
    }
    let mut out = Vec::new();
    for k in &keys {
        for e in &eps {
            out.push(k + e);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>()) {
        let Some((_, x)) = case(seed) else { return Ok(()) };
        prop_assert_eq!(normalize(&x).unwrap(), x);
    }

    #[test]
    fn normalize_preserves_membership(seed in any::<u64>()) {
        let Some((raw, x)) = case(seed) else { return Ok(()) };
        for q in probes(&raw).iter().chain(probes(&x).iter()) {
            prop_assert_eq!(raw.member(q), x.member(q), "at {}", q);
        }
    }

    #[test]
    fn boolean_ops_are_pointwise(a in any::<u64>(), b in any::<u64>()) {
        let (Some((_, x)), Some((_, y))) = (case(a), case(b)) else { return Ok(()) };
        let (Ok(u), Ok(i), Ok(d), Ok(c)) = (union(&x, &y), intersect(&x, &y), difference(&x, &y), complement_in(&x, None)) else {
            return Ok(());
        };
        let mut pts = probes(&x);
        pts.extend(probes(&y));
        for q in &pts {
            let (mx, my) = (x.member(q), y.member(q));
            prop_assert_eq!(u.member(q), mx || my);
            prop_assert_eq!(i.member(q), mx && my);
            prop_assert_eq!(d.member(q), mx && !my);
            prop_assert_eq!(c.member(q), !mx);
        }
    }

    #[test]
    fn closure_interior_duality(seed in any::<u64>()) {
        let Some((_, x)) = case(seed) else { return Ok(()) };
        let cl = closure(&x).unwrap();
        let int_ = interior(&x).unwrap();
        prop_assert!(semantic_subset(&x, &cl).unwrap());
        prop_assert!(semantic_subset(&int_, &x).unwrap());
        prop_assert_eq!(closure(&cl).unwrap(), cl.clone());
        // interior is the complement of the closure of the complement
        let c = complement_in(&x, None).unwrap();
        let dual = complement_in(&closure(&c).unwrap(), None).unwrap();
        prop_assert!(semantic_eq(&int_, &dual).unwrap());
    }

    #[test]
    fn components_partition_the_set(seed in any::<u64>()) {
        let Some((_, x)) = case(seed) else { return Ok(()) };
        let comps = x.components();
        for w in comps.finite.windows(2) {
            prop_assert!(w[0].hi <= w[1].lo);
        }
        for q in probes(&x) {
            let hits = comps.finite.iter().filter(|c| c.contains(&q)).count()
                + comps.families.iter().filter(|(s, _)| s.contains(&q)).count();
            prop_assert_eq!(hits, usize::from(x.member(&q)), "at {}", q);
        }
    }

    #[test]
    fn dsl_round_trip(seed in any::<u64>()) {
        let Some((raw, x)) = case(seed) else { return Ok(()) };
        prop_assert_eq!(normalize(&parse_set(&x.to_dsl()).unwrap()).unwrap(), x.clone());
        let again = normalize(&parse_set(&raw.to_dsl()).unwrap()).unwrap();
        prop_assert_eq!(again, x);
    }
}
