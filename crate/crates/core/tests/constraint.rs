mod common;

use common::{arb_template, words};
use proptest::prelude::*;
use remedy_core::ast::{parse, RelevantAlphabet};
use remedy_core::constraint::{
    consistency_constraint, instantiate, ltp_constraint, num_vars, solve, Formulas,
    TemplateEncoder, DEFAULT_STATE_BUDGET,
};
use remedy_core::ltp::check_ltp;
use remedy_core::matcher::Matcher;
use remedy_sat::Dpll;

fn assignments(n: u32) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << n).map(move |bits| (0..n).map(|i| bits >> i & 1 == 1).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn symbolic_matching_agrees_with_matcher(t in arb_template()) {
        let ws = words(3);
        let alpha = RelevantAlphabet::new(&t, ws.iter().map(String::as_str));
        let n = num_vars(&t, &alpha);
        prop_assume!(n <= 8);
        let enc = TemplateEncoder::new(&t);
        let mut f = Formulas::new();
        let phis: Vec<_> = ws.iter().map(|w| enc.encode(w, &alpha, &mut f).unwrap()).collect();
        for x in assignments(n) {
            let m = Matcher::new(&instantiate(&t, &x, &alpha));
            for (w, &phi) in ws.iter().zip(&phis) {
                prop_assert_eq!(f.eval(phi, &x), m.accepts(w).unwrap(), "{} on {:?} under {:?}", t, w, x);
            }
        }
    }

    #[test]
    fn ltp_constraint_agrees_with_checker(t in arb_template()) {
        let alpha = RelevantAlphabet::new(&t, ["abc"]);
        let n = num_vars(&t, &alpha);
        prop_assume!(n <= 8);
        let mut f = Formulas::new();
        match ltp_constraint(&t, &alpha, &mut f) {
            Err(_) => {
                for x in assignments(n) {
                    prop_assert!(!check_ltp(&instantiate(&t, &x, &alpha)).satisfies);
                }
            }
            Ok(phi) => {
                for x in assignments(n) {
                    let inst = instantiate(&t, &x, &alpha);
                    prop_assert_eq!(f.eval(phi, &x), check_ltp(&inst).satisfies, "{} under {:?}", inst, x);
                }
            }
        }
    }
}

#[test]
fn solving_yields_consistent_ltp_fillings() {
    let t = parse("□0*□1*=.*").unwrap();
    let pos: Vec<String> = ["=", "abcd==", "==abcd", "ab=c"].map(String::from).to_vec();
    let neg: Vec<String> = vec!["abc".into()];
    let alpha = RelevantAlphabet::new(&parse(".*.*=.*").unwrap(), pos.iter().chain(&neg).map(String::as_str));
    let mut f = Formulas::new();
    let c = consistency_constraint(&t, &pos, &neg, &alpha, &mut f, DEFAULT_STATE_BUDGET).unwrap();
    let l = ltp_constraint(&t, &alpha, &mut f).unwrap();
    let root = f.and(c, l);
    let x = solve(&f, root, num_vars(&t, &alpha), &mut Dpll::new()).unwrap().expect("satisfiable");
    let r = instantiate(&t, &x, &alpha);
    assert!(check_ltp(&r).satisfies, "{r}");
    let m = Matcher::new(&r);
    assert!(pos.iter().all(|w| m.accepts(w).unwrap()));
    assert!(neg.iter().all(|w| !m.accepts(w).unwrap()));
}

#[test]
fn unsatisfiable_when_examples_conflict_with_shape() {
    let t = parse("□0").unwrap();
    let pos = vec!["ab".to_string()];
    let alpha = RelevantAlphabet::new(&t, ["ab"]);
    let mut f = Formulas::new();
    let c = consistency_constraint(&t, &pos, &[], &alpha, &mut f, DEFAULT_STATE_BUDGET).unwrap();
    assert_eq!(c, Formulas::FALSE);
}
