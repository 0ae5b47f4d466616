//! JSON analysis reports and witness emission.

use num::bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dsl::parse_set;
use crate::error::{Error, Result};
use crate::gcc::{
    build_transversal, cover_to_surjection, decide_ccc, decide_gcc_sequences, decide_gcc_transversal, verify_cover,
    verify_witness_k, witness_non_gcc_cover, AlternatingWitness, SelectorPolicy, Transversal,
};
use crate::ops::{closure, complement_in, normalize, semantic_eq, union_all};
use crate::rational::show;
use crate::realset::{interval_dsl, RealSet, SchemaAtom};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentSummary {
    pub finite: usize,
    pub families: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorollaryChecks {
    pub corollary1: bool,
    pub corollary2: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub input: String,
    pub normalized: String,
    pub components: ComponentSummary,
    pub gcc: bool,
    pub ccc: bool,
    pub witness: Value,
    pub closure: String,
    pub checks: CorollaryChecks,
}

/// The closure of a GCC set is the union of the closures of its components.
/// Holds vacuously on non-GCC sets.
pub fn corollary1(x: &RealSet, gcc: bool) -> Result<bool> {
    if !gcc {
        return Ok(true);
    }
    let comps = x.components();
    let mut parts: Vec<RealSet> = comps.finite.iter().map(|c| RealSet::interval(c.closure())).collect();
    for (s, _) in &comps.families {
        parts.push(RealSet::schema(s.closed_pieces()));
    }
    semantic_eq(&closure(x)?, &union_all(parts.iter())?)
}

/// GCC sets have a locally connected complement; bounded sets with a
/// locally connected complement are GCC.
pub fn corollary2(x: &RealSet, gcc: bool) -> Result<bool> {
    let defect_free = complement_in(x, None)?.local_connectedness_defects().is_empty();
    let forward = !gcc || defect_free;
    let converse = !(x.predicates().bounded && defect_free) || gcc;
    Ok(forward && converse)
}

fn seq_json(s: &SchemaAtom) -> String {
    s.to_dsl()
}

pub fn alternating_json(w: &AlternatingWitness) -> Value {
    json!({
        "direction": w.direction,
        "even_terms": format!("fam(n>=1){{ {{{}}} }}", w.even_terms.to_dsl()),
        "odd_terms": format!("fam(n>=1){{ {{{}}} }}", w.odd_terms.to_dsl()),
        "limit": show(&w.limit),
        "limit_in_x": w.limit_in_x,
    })
}

pub fn transversal_json(t: &Transversal) -> Value {
    json!({
        "kind": "transversal",
        "policy": t.policy,
        "points": t.describe(),
        "accumulation_points": t.accumulation_points().iter().map(show).collect::<Vec<_>>(),
        "compact": t.is_compact(),
    })
}

pub fn ccc_json(x: &RealSet) -> Result<Value> {
    let v = decide_ccc(x)?;
    let Some(k) = v.witness_k else {
        return Err(Error::NotApplicable("the set is not CCC".into()));
    };
    let check = verify_witness_k(x, &k)?;
    Ok(json!({ "kind": "compact-meeting-set", "k": k.to_dsl(), "verified": check }))
}

pub fn non_gcc_json(x: &RealSet) -> Result<Value> {
    let seq = decide_gcc_sequences(x)?;
    let cover = witness_non_gcc_cover(x)?;
    let check = verify_cover(x, &cover)?;
    let f = cover_to_surjection(x, &cover)?;
    let m = cover.finite_members.iter().filter(|s| !s.is_empty()).count();
    let fam = &cover.families[0].template;
    Ok(json!({
        "kind": "cover",
        "alternating": seq.witness.as_ref().map(alternating_json),
        "cover": cover.describe(),
        "verified": check,
        "infinitely_many_nonempty": cover.certified_infinite(x)?,
        "surjection": format!(
            "{}member n of {} & X to n + {}",
            if m > 0 { format!("finite members to 1..{m}, ") } else { String::new() },
            fam.to_dsl(),
            BigInt::from(m) + 1 - &fam.start
        ),
        "surjection_sample": (1..=3)
            .map(|k| f.preimage(&k.into()).map(|s| s.to_dsl()))
            .collect::<Result<Vec<_>>>()?,
    }))
}

/// Full analysis of a DSL expression.
pub fn analyze(text: &str) -> Result<AnalysisReport> {
    let x = normalize(&parse_set(text)?)?;
    let tv = decide_gcc_transversal(&x)?;
    let ccc = decide_ccc(&x)?.verdict;
    let witness = if tv.verdict { transversal_json(&tv.transversal) } else { non_gcc_json(&x)? };
    let comps = x.components();
    Ok(AnalysisReport {
        input: text.to_string(),
        normalized: x.to_dsl(),
        components: ComponentSummary { finite: comps.finite.len(), families: comps.families.len() },
        gcc: tv.verdict,
        ccc,
        witness,
        closure: closure(&x)?.to_dsl(),
        checks: CorollaryChecks { corollary1: corollary1(&x, tv.verdict)?, corollary2: corollary2(&x, tv.verdict)? },
    })
}

/// Verdicts in a report agree with fresh runs on its normalized form.
pub fn report_consistent(r: &AnalysisReport) -> Result<bool> {
    let x = normalize(&parse_set(&r.normalized)?)?;
    Ok(decide_gcc_transversal(&x)?.verdict == r.gcc
        && decide_gcc_sequences(&x)?.verdict == r.gcc
        && decide_ccc(&x)?.verdict == r.ccc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    Gcc,
    NonGcc,
    Ccc,
}

pub fn witness(text: &str, kind: WitnessKind) -> Result<Value> {
    let x = normalize(&parse_set(text)?)?;
    match kind {
        WitnessKind::Gcc => {
            let t = build_transversal(&x, SelectorPolicy::Midpoint)?;
            if !t.is_compact() {
                return Err(Error::NotApplicable("the set is not GCC".into()));
            }
            Ok(transversal_json(&t))
        }
        WitnessKind::NonGcc => non_gcc_json(&x),
        WitnessKind::Ccc => ccc_json(&x),
    }
}

/// Component listing used by the human-readable analyze output.
pub fn component_lines(x: &RealSet) -> Vec<String> {
    let comps = x.components();
    let mut v: Vec<String> = comps.finite.iter().map(interval_dsl).collect();
    v.extend(comps.families.iter().map(|(s, _)| seq_json(s)));
    v
}
