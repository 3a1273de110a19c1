use proptest::prelude::*;
use remedy_sat::{dimacs, Cnf, Dpll, ExternalSolver, Lit, Outcome, SolveError, Solver};
use std::path::PathBuf;

fn arb_cnf() -> impl Strategy<Value = Cnf> {
    (1u32..=10).prop_flat_map(|vars| {
        let lit = (0..vars, any::<bool>()).prop_map(|(v, p)| Lit::new(v, p));
        prop::collection::vec(prop::collection::vec(lit, 0..=3), 0..=30).prop_map(move |clauses| {
            let mut cnf = Cnf::with_vars(vars);
            for c in clauses {
                cnf.add_clause(c);
            }
            cnf
        })
    })
}

fn brute_force(cnf: &Cnf) -> bool {
    let n = cnf.num_vars();
    (0u32..1 << n).any(|bits| {
        let model: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
        cnf.eval(&model)
    })
}

fn script(name: &str, body: &str) -> PathBuf {
    use std::os::unix::fs::PermissionsExt;
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, format!("#!/bin/sh\ncat > /dev/null\n{body}\n")).unwrap();
    std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
    path
}

proptest! {
    #[test]
    fn dpll_agrees_with_truth_table(cnf in arb_cnf()) {
        match Dpll::new().solve(&cnf).unwrap() {
            Outcome::Sat(model) => prop_assert!(cnf.eval(&model)),
            Outcome::Unsat => prop_assert!(!brute_force(&cnf)),
        }
    }

    #[test]
    fn dimacs_round_trip(cnf in arb_cnf()) {
        let back = dimacs::parse(&dimacs::write(&cnf)).unwrap();
        prop_assert_eq!(back.num_vars(), cnf.num_vars());
        prop_assert_eq!(back.clauses(), cnf.clauses());
    }

    #[test]
    fn outcome_round_trip(model in prop::collection::vec(any::<bool>(), 1..12)) {
        let n = model.len() as u32;
        let sat = Outcome::Sat(model);
        prop_assert_eq!(dimacs::parse_outcome(&dimacs::write_outcome(&sat), n).unwrap(), sat);
        prop_assert_eq!(dimacs::parse_outcome(&dimacs::write_outcome(&Outcome::Unsat), n).unwrap(), Outcome::Unsat);
    }
}

#[test]
fn pigeonhole_is_unsat() {
    // Three pigeons, two holes; variable 2p+h puts pigeon p in hole h.
    let mut cnf = Cnf::with_vars(6);
    for p in 0..3 {
        cnf.add_clause([Lit::pos(2 * p), Lit::pos(2 * p + 1)]);
    }
    for h in 0..2 {
        for p in 0..3 {
            for q in p + 1..3 {
                cnf.add_clause([Lit::neg(2 * p + h), Lit::neg(2 * q + h)]);
            }
        }
    }
    assert_eq!(Dpll::new().solve(&cnf).unwrap(), Outcome::Unsat);
}

#[test]
fn decision_budget_is_reported() {
    let mut cnf = Cnf::with_vars(4);
    cnf.add_clause([Lit::pos(0), Lit::pos(1)]);
    cnf.add_clause([Lit::pos(2), Lit::neg(3)]);
    assert!(matches!(Dpll::with_budget(0).solve(&cnf), Err(SolveError::Budget(0))));
    assert!(Dpll::with_budget(10).solve(&cnf).unwrap().is_sat());
}

#[test]
fn external_process_protocol() {
    let mut cnf = Cnf::with_vars(2);
    cnf.add_clause([Lit::pos(0)]);
    let unsat = script("unsat.sh", "echo UNSAT");
    assert_eq!(ExternalSolver::new(unsat).solve(&cnf).unwrap(), Outcome::Unsat);
    let sat = script("sat.sh", "echo SAT; echo 'v 1 -2 0'");
    assert_eq!(ExternalSolver::new(sat).solve(&cnf).unwrap(), Outcome::Sat(vec![true, false]));
    let garbage = script("garbage.sh", "echo maybe");
    assert!(matches!(ExternalSolver::new(garbage).solve(&cnf), Err(SolveError::Protocol(_))));
    let missing = ExternalSolver::new("/nonexistent/solver").solve(&cnf);
    assert!(matches!(missing, Err(SolveError::Io(_))));
}
