//! Set algebra on [`RealSet`] values. Every result is in canonical form.

use crate::decomp::Decomp;
use crate::error::Result;
use crate::interval::Interval;
use crate::realset::RealSet;

/// Canonical form of a raw set with the same points.
pub fn normalize(raw: &RealSet) -> Result<RealSet> {
    Decomp::from_realset(raw)?.canonicalize()
}

pub fn union(x: &RealSet, y: &RealSet) -> Result<RealSet> {
    Decomp::from_realset(x)?.union(&Decomp::from_realset(y)?)?.canonicalize()
}

pub fn union_all<'a, I: IntoIterator<Item = &'a RealSet>>(sets: I) -> Result<RealSet> {
    let mut raw = RealSet::raw(vec![], vec![], vec![]);
    for s in sets {
        raw.intervals.extend(s.intervals.iter().cloned());
        raw.points.extend(s.points.iter().cloned());
        raw.schemas.extend(s.schemas.iter().cloned());
    }
    normalize(&raw)
}

pub fn intersect(x: &RealSet, y: &RealSet) -> Result<RealSet> {
    Decomp::from_realset(x)?.intersect(&Decomp::from_realset(y)?)?.canonicalize()
}

pub fn difference(x: &RealSet, y: &RealSet) -> Result<RealSet> {
    Decomp::from_realset(x)?.difference(&Decomp::from_realset(y)?)?.canonicalize()
}

/// Relative complement `window \ x`; `None` means the whole line.
pub fn complement_in(x: &RealSet, window: Option<&Interval>) -> Result<RealSet> {
    let c = Decomp::from_realset(x)?.complement();
    match window {
        None => c.canonicalize(),
        Some(w) => c.intersect(&Decomp::from_realset(&RealSet::interval(w.clone()))?)?.canonicalize(),
    }
}

pub fn closure(x: &RealSet) -> Result<RealSet> {
    let mut raw = RealSet::raw(
        x.intervals.iter().map(Interval::closure).collect(),
        x.points.clone(),
        x.schemas.iter().map(|s| s.closed_pieces()).collect(),
    );
    raw.points.extend(x.schemas.iter().map(|s| s.limit.clone()));
    normalize(&raw)
}

/// Interior in the real line.
pub fn interior(x: &RealSet) -> Result<RealSet> {
    let c = complement_in(x, None)?;
    complement_in(&closure(&c)?, None)
}

pub fn is_empty(x: &RealSet) -> Result<bool> {
    Ok(Decomp::from_realset(x)?.is_empty())
}

pub fn semantic_subset(x: &RealSet, y: &RealSet) -> Result<bool> {
    Ok(Decomp::from_realset(x)?.difference(&Decomp::from_realset(y)?)?.is_empty())
}

pub fn semantic_eq(x: &RealSet, y: &RealSet) -> Result<bool> {
    Ok(semantic_subset(x, y)? && semantic_subset(y, x)?)
}

/// Whether `part` is open in the subspace `x` (assumes `part` is a subset of `x`):
/// no point of `part` is a limit of `x \ part`.
pub fn is_open_in(part: &RealSet, x: &RealSet) -> Result<bool> {
    let rest = difference(x, part)?;
    Ok(intersect(part, &closure(&rest)?)?.is_empty())
}

pub fn is_clopen_in(part: &RealSet, x: &RealSet) -> Result<bool> {
    let rest = difference(x, part)?;
    Ok(is_open_in(part, x)? && is_open_in(&rest, x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_set;
    use crate::rational::{int, rat};

    fn n(s: &str) -> RealSet {
        normalize(&parse_set(s).unwrap()).unwrap()
    }

    fn dsl(s: &str) -> String {
        n(s).to_dsl()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(dsl("(0,1) | (1/2, 2)"), "(0,2)");
        assert_eq!(dsl("fam(n>=1){ [1/(n+1), 1/n] }"), "(0,1]");
        let x = parse_set("fam(n>=1){ (1/(n+1), 1/n) }").unwrap();
        assert_eq!(normalize(&x).unwrap().schemas, x.schemas);
    }

    #[test]
    fn normalize_is_idempotent_on_examples() {
        for s in ["{0} | fam(n>=1){ (1/(n+1), 1/n) }", "fam(n>=3){ [1/n, 1/n + 1/(n*1)] }", "[0,1) | {2}"] {
            let Ok(x) = parse_set(s) else { continue };
            let a = normalize(&x).unwrap();
            assert_eq!(normalize(&a).unwrap(), a);
        }
    }

    #[test]
    fn member_examples() {
        let x = n("{0} | fam(n>=1){ (1/(n+1), 1/n) }");
        assert!(!x.member(&rat(1, 2)));
        assert!(x.member(&int(0)));
        assert!(x.member(&rat(2, 5)));
    }

    #[test]
    fn closure_examples() {
        assert_eq!(closure(&n("(0,1)")).unwrap().to_dsl(), "[0,1]");
        assert_eq!(closure(&n("{0} | fam(n>=1){ (1/(n+1), 1/n) }")).unwrap().to_dsl(), "[0,1]");
        assert_eq!(closure(&n("fam(n>=1){ {1/n} }")).unwrap().to_dsl(), "{0} | fam(n>=1){ {1/n} }");
    }

    #[test]
    fn interior_examples() {
        assert_eq!(interior(&n("[0,1] | {2}")).unwrap().to_dsl(), "(0,1)");
        assert_eq!(interior(&n("(0,1)")).unwrap().to_dsl(), "(0,1)");
        assert_eq!(interior(&n("fam(n>=1){ [1/(n+1), 1/n] }")).unwrap().to_dsl(), "(0,1)");
    }

    #[test]
    fn component_examples() {
        assert_eq!(n("(0,1) | {5} | [7,8]").components().finite.len(), 3);
        let c = n("{0} | fam(n>=1){ (1/(n+1), 1/n) }").components();
        assert_eq!((c.finite.len(), c.families.len()), (1, 1));
        assert!(!c.families[0].1.singleton);
        assert_eq!(n("(0,2)").components().finite.len(), 1);
    }

    #[test]
    fn union_examples() {
        assert_eq!(union(&n("(0,1)"), &n("{1}")).unwrap().to_dsl(), "(0,1]");
        assert_eq!(union(&n("fam(n>=1){ {1/n} }"), &n("{0}")).unwrap().to_dsl(), "{0} | fam(n>=1){ {1/n} }");
        assert_eq!(
            union(&n("fam(n>=1){ (1/(n+1),1/n) }"), &n("fam(n>=1){ {1/n} }")).unwrap().to_dsl(),
            "(0,1]"
        );
    }

    #[test]
    fn complement_examples() {
        assert_eq!(complement_in(&n("(0,1)"), None).unwrap().to_dsl(), "(-inf,0] | [1,inf)");
        let w = Interval::fin(int(0), true, int(1), true).unwrap();
        assert_eq!(
            complement_in(&n("{0} | fam(n>=1){ (1/(n+1),1/n) }"), Some(&w)).unwrap().to_dsl(),
            "fam(n>=1){ {1/n} }"
        );
        assert!(complement_in(&n("[0,1]"), Some(&w)).unwrap().is_empty());
    }

    #[test]
    fn subset_examples() {
        assert!(semantic_subset(&n("(0,1)"), &n("[0,1]")).unwrap());
        assert!(!semantic_subset(&n("[0,1]"), &n("(0,1)")).unwrap());
        assert!(semantic_subset(&n("fam(n>=1){ (1/(n+1),1/n) }"), &n("(0,1)")).unwrap());
    }

    #[test]
    fn predicate_examples() {
        let p = |s: &str| {
            let q = n(s).predicates();
            (q.bounded, q.closed, q.compact)
        };
        assert_eq!(p("[0,1]"), (true, true, true));
        assert_eq!(p("{0} | fam(n>=1){ {1/n} }"), (true, true, true));
        assert_eq!(p("fam(n>=1){ {1/n} }"), (true, false, false));
    }

    #[test]
    fn defect_examples() {
        assert_eq!(n("{0} | fam(n>=1){ {1/n} }").local_connectedness_defects(), vec![int(0)]);
        assert!(n("[0,1]").local_connectedness_defects().is_empty());
        assert!(n("fam(n>=1){ {1/n} }").local_connectedness_defects().is_empty());
    }
}
