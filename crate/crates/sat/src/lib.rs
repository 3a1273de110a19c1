//! Propositional satisfiability: CNF representation, DIMACS I/O, an internal
//! DPLL solver with watched-literal unit propagation, and a backend that
//! delegates to an external solver process.

mod cnf;
pub mod dimacs;
mod dpll;
mod external;

pub use cnf::{Cnf, Lit};
pub use dpll::Dpll;
pub use external::ExternalSolver;

use thiserror::Error;

/// Result of a satisfiability query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// A model, indexed by variable.
    Sat(Vec<bool>),
    Unsat,
}

impl Outcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, Outcome::Sat(_))
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("decision budget of {0} exhausted")]
    Budget(u64),
    #[error("solver process failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed solver output: {0}")]
    Protocol(String),
}

/// A satisfiability backend.
pub trait Solver {
    fn solve(&mut self, cnf: &Cnf) -> Result<Outcome, SolveError>;
}
