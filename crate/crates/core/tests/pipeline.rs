use proptest::prelude::*;
use realtopo::dsl::parse_set;
use realtopo::fuzz::{gen_case, sample_member, sample_y, trial_rng, FuzzSpec};
use realtopo::gcc::{decide_ccc, decide_gcc_sequences, decide_gcc_transversal, verify_witness_k};
use realtopo::maps::{pushforward, PLMap};
use realtopo::rational::{int, rat};
use realtopo::surjection::{build_surjection, cantor_address, cantor_eval, eval_surjection, solve_preimage, transversal_set};
use realtopo::*;

fn n(s: &str) -> RealSet {
    normalize(&parse_set(s).unwrap()).unwrap()
}

#[test]
fn example_end_to_end() {
    let x = n("{0} | fam(n>=1){ (1/(n+1),1/n) }");
    assert!(decide_gcc_transversal(&x).unwrap().verdict);
    assert!(decide_gcc_sequences(&x).unwrap().verdict);
    let k = decide_ccc(&x).unwrap().witness_k.unwrap();
    assert!(verify_witness_k(&x, &k).unwrap().ok());

    let plan = build_surjection(&x).unwrap();
    assert_eq!(eval_surjection(&plan, &int(0), &int(7)).unwrap(), int(0));
    let (a, y) = solve_preimage(&plan, &rat(2, 5)).unwrap();
    assert_eq!(eval_surjection(&plan, &a, &y).unwrap(), rat(2, 5));

    let a = transversal_set(&plan).unwrap();
    let bits = cantor_address(&a, &int(0), 12).unwrap();
    assert_eq!(bits, "0".repeat(12));
    let b = cantor_eval(&a, &bits).unwrap();
    assert!(b.contains(&int(0)));
}

#[test]
fn scaled_example_stays_gcc() {
    let x = n("{0} | fam(n>=1){ (1/(n+1),1/n) }");
    let y = pushforward(&PLMap::affine(int(-3), int(2)), &x).unwrap();
    assert!(decide_gcc_transversal(&y).unwrap().verdict);
    assert!(y.member(&int(2)));
}

fn gcc_case(seed: u64) -> Option<RealSet> {
    let x = normalize(&gen_case(&mut trial_rng(seed, 0), &FuzzSpec::new(seed, 1)).ok()?).ok()?;
    decide_gcc_transversal(&x).ok()?.verdict.then_some(x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn deciders_agree(seed in any::<u64>()) {
        let raw = gen_case(&mut trial_rng(seed, 0), &FuzzSpec::new(seed, 1)).unwrap();
        let Ok(x) = normalize(&raw) else { return Ok(()) };
        let a = decide_gcc_transversal(&x).unwrap().verdict;
        prop_assert_eq!(a, decide_gcc_sequences(&x).unwrap().verdict);
        prop_assert!(a || !decide_ccc(&x).unwrap().verdict);
    }

    #[test]
    fn surjection_hits_and_inverts(seed in any::<u64>()) {
        let Some(x) = gcc_case(seed) else { return Ok(()) };
        let plan = build_surjection(&x).unwrap();
        let mut rng = trial_rng(seed, 1);
        let pts = plan.domain_points(8);
        for a in &pts {
            let v = eval_surjection(&plan, a, &sample_y(&mut rng)).unwrap();
            prop_assert!(x.member(&v));
        }
        for _ in 0..20 {
            let q = sample_member(&x, &mut rng).unwrap();
            let (a, y) = solve_preimage(&plan, &q).unwrap();
            prop_assert_eq!(eval_surjection(&plan, &a, &y).unwrap(), q);
        }
    }

    #[test]
    fn cantor_brackets_nest(seed in any::<u64>(), bits in "[01]{1,16}") {
        let Some(x) = gcc_case(seed) else { return Ok(()) };
        let a = normalize(&transversal_set(&build_surjection(&x).unwrap()).unwrap()).unwrap();
        let outer = cantor_eval(&a, &bits[..bits.len() - 1]).unwrap();
        let inner = cantor_eval(&a, &bits).unwrap();
        prop_assert!(outer.lo <= inner.lo && inner.hi <= outer.hi);
        prop_assert!(a.member(inner.lo.fin().unwrap()) && a.member(inner.hi.fin().unwrap()));
    }
}
