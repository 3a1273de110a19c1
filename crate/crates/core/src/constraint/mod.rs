//! Constraints on hole fillings: consistency with the examples and the
//! linear-time property, solved through a SAT backend.

mod encode;
mod formula;

pub use encode::{var_index, EncodeBudget, TemplateEncoder, DEFAULT_STATE_BUDGET};
pub use formula::{FId, Formulas};

use crate::ast::{CharSet, Kind, Node, RelevantAlphabet};
use crate::ltp::{automaton, concrete, reach, Label, PathCount};
use remedy_sat::{Dpll, ExternalSolver, Outcome, SolveError, Solver};
use std::collections::BTreeSet;
use std::path::PathBuf;

/// Conjunction over positives of acceptance and over negatives of rejection.
pub fn consistency_constraint(
    t: &Node,
    pos: &[String],
    neg: &[String],
    alphabet: &RelevantAlphabet,
    f: &mut Formulas,
    budget: usize,
) -> Result<FId, EncodeBudget> {
    let enc = TemplateEncoder::new(t).with_budget(budget);
    let mut acc = Formulas::TRUE;
    for w in pos {
        let phi = enc.encode(w, alphabet, f)?;
        acc = f.and(acc, phi);
        if acc == Formulas::FALSE {
            return Ok(acc);
        }
    }
    for w in neg {
        let phi = enc.encode(w, alphabet, f)?;
        let not = f.not(phi);
        acc = f.and(acc, not);
        if acc == Formulas::FALSE {
            return Ok(acc);
        }
    }
    Ok(acc)
}

/// No hole filling can give the template the linear-time property.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("no hole filling satisfies the linear-time property")]
pub struct LtpInfeasible;

/// Formula over hole variables that holds exactly for the fillings under
/// which the instantiated template has the linear-time property.
pub fn ltp_constraint(
    t: &Node,
    alphabet: &RelevantAlphabet,
    f: &mut Formulas,
) -> Result<FId, LtpInfeasible> {
    if t.star_in_lookaround() {
        return Err(LtpInfeasible);
    }
    let nc = alphabet.len();
    let nfa = automaton(t);
    let mut empty_holes: BTreeSet<u32> = BTreeSet::new();
    let mut forbidden: BTreeSet<u32> = BTreeSet::new();
    let mut disjoint: BTreeSet<(u32, u32)> = BTreeSet::new();
    let holes_of = |labels: &[Label]| -> Vec<u32> {
        let mut hs: Vec<u32> = labels
            .iter()
            .filter_map(|l| match l {
                Label::Hole(k) => Some(*k),
                Label::Set(_) => None,
            })
            .collect();
        hs.sort_unstable();
        hs.dedup();
        hs
    };
    for q in 0..nfa.num_states() {
        let gadgets: Vec<(CharSet, Vec<u32>, PathCount)> = reach(&nfa, q)
            .into_iter()
            .map(|g| (concrete(&g.labels), holes_of(&g.labels), g.count))
            .collect();
        for (c, hs, count) in &gadgets {
            if *count != PathCount::One {
                if !c.is_empty() {
                    return Err(LtpInfeasible);
                }
                empty_holes.extend(hs);
            }
        }
        for i in 0..gadgets.len() {
            for j in i + 1..gadgets.len() {
                let (ci, hi, _) = &gadgets[i];
                let (cj, hj, _) = &gadgets[j];
                if ci.intersects(cj) {
                    return Err(LtpInfeasible);
                }
                for (hs, other) in [(hi, cj), (hj, ci)] {
                    if other.is_empty() {
                        continue;
                    }
                    for &h in hs {
                        for c in alphabet.classes_meeting(other) {
                            forbidden.insert(var_index(h, c, nc));
                        }
                    }
                }
                for &a in hi {
                    for &b in hj {
                        if a == b {
                            empty_holes.insert(a);
                        } else {
                            disjoint.insert((a.min(b), a.max(b)));
                        }
                    }
                }
            }
        }
    }
    for h in empty_holes {
        forbidden.extend((0..nc).map(|c| var_index(h, c, nc)));
    }
    let mut acc = Formulas::TRUE;
    for v in forbidden {
        let x = f.var(v);
        let nx = f.not(x);
        acc = f.and(acc, nx);
    }
    for (a, b) in disjoint {
        for c in 0..nc {
            let x = f.var(var_index(a, c, nc));
            let y = f.var(var_index(b, c, nc));
            let nx = f.not(x);
            let ny = f.not(y);
            let either = f.or(nx, ny);
            acc = f.and(acc, either);
        }
    }
    Ok(acc)
}

/// Which SAT backend to use.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum SolverChoice {
    #[default]
    Internal,
    /// A DIMACS solver binary reading the problem on stdin.
    External(PathBuf),
}

impl SolverChoice {
    /// Reads `REMEDY_SOLVER`: unset or `internal`, or `exec:<path>`.
    pub fn from_env() -> Result<SolverChoice, String> {
        match std::env::var("REMEDY_SOLVER") {
            Err(_) => Ok(SolverChoice::Internal),
            Ok(v) => SolverChoice::parse(&v),
        }
    }

    pub fn parse(v: &str) -> Result<SolverChoice, String> {
        if v.is_empty() || v == "internal" {
            Ok(SolverChoice::Internal)
        } else if let Some(p) = v.strip_prefix("exec:") {
            Ok(SolverChoice::External(PathBuf::from(p)))
        } else {
            Err(format!("unknown solver `{v}`; expected `internal` or `exec:<path>`"))
        }
    }

    pub fn build(&self) -> Box<dyn Solver + Send> {
        match self {
            SolverChoice::Internal => Box::new(Dpll::new()),
            SolverChoice::External(p) => Box::new(ExternalSolver::new(p)),
        }
    }
}

/// Truth values of the hole variables.
pub type Assignment = Vec<bool>;

/// A satisfying assignment of `root` over `num_vars` variables, if any.
pub fn solve(
    f: &Formulas,
    root: FId,
    num_vars: u32,
    solver: &mut dyn Solver,
) -> Result<Option<Assignment>, SolveError> {
    if root == Formulas::FALSE {
        return Ok(None);
    }
    let cnf = f.to_cnf(root, num_vars);
    match solver.solve(&cnf)? {
        Outcome::Sat(mut m) => {
            m.resize(num_vars as usize, false);
            Ok(Some(m))
        }
        Outcome::Unsat => Ok(None),
    }
}

/// Number of hole variables of a template.
pub fn num_vars(t: &Node, alphabet: &RelevantAlphabet) -> u32 {
    t.hole_bound() * alphabet.len() as u32
}

/// Replaces each hole by the union of the classes its variables select.
pub fn instantiate(t: &Node, assignment: &[bool], alphabet: &RelevantAlphabet) -> Node {
    let nc = alphabet.len();
    let mut out = t.clone();
    out.preorder_mut(&mut |n| {
        if let Kind::Hole(h) = n.kind {
            let chosen = (0..nc).filter(|&c| {
                assignment
                    .get(var_index(h, c, nc) as usize)
                    .copied()
                    .unwrap_or(false)
            });
            n.kind = Kind::Set(alphabet.union_of(chosen));
        }
    });
    out
}
