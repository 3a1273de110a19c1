//! Reads a DIMACS CNF problem on stdin and prints `SAT` with a model line or
//! `UNSAT`, using the built-in solver.

use remedy_sat::{dimacs, Dpll, Solver};
use std::io::Read;
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut text = String::new();
    if let Err(e) = std::io::stdin().read_to_string(&mut text) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let result = dimacs::parse(&text).and_then(|cnf| Dpll::new().solve(&cnf));
    match result {
        Ok(outcome) => {
            print!("{}", dimacs::write_outcome(&outcome));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
