//! DIMACS CNF text format and the `SAT`/`UNSAT` model protocol.

use crate::{Cnf, Lit, Outcome, SolveError};
use std::fmt::Write;

pub fn write(cnf: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.num_vars(), cnf.clauses().len());
    for clause in cnf.clauses() {
        for l in clause {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

pub fn parse(text: &str) -> Result<Cnf, SolveError> {
    let mut cnf = Cnf::new();
    let mut current = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(header) = line.strip_prefix("p") {
            let fields: Vec<&str> = header.split_whitespace().collect();
            if fields.len() != 3 || fields[0] != "cnf" {
                return Err(SolveError::Protocol(format!("bad header: {line}")));
            }
            let vars = fields[1]
                .parse()
                .map_err(|_| SolveError::Protocol(format!("bad variable count: {line}")))?;
            cnf.ensure_vars(vars);
            continue;
        }
        for tok in line.split_whitespace() {
            let x: i64 = tok
                .parse()
                .map_err(|_| SolveError::Protocol(format!("bad literal: {tok}")))?;
            match Lit::from_dimacs(x) {
                Some(l) => current.push(l),
                None => cnf.add_clause(std::mem::take(&mut current)),
            }
        }
    }
    if !current.is_empty() {
        cnf.add_clause(current);
    }
    Ok(cnf)
}

/// Renders an outcome as `SAT` followed by a `0`-terminated model line, or `UNSAT`.
pub fn write_outcome(outcome: &Outcome) -> String {
    match outcome {
        Outcome::Unsat => "UNSAT\n".to_string(),
        Outcome::Sat(model) => {
            let mut out = String::from("SAT\n");
            for (v, &b) in model.iter().enumerate() {
                let _ = write!(out, "{} ", Lit::new(v as u32, b).to_dimacs());
            }
            out.push_str("0\n");
            out
        }
    }
}

/// Parses solver output. Accepts both the bare `SAT`/`UNSAT` protocol and the
/// competition `s SATISFIABLE` / `v ...` form. Variables absent from the model
/// default to false.
pub fn parse_outcome(text: &str, num_vars: u32) -> Result<Outcome, SolveError> {
    let mut status = None;
    let mut model = vec![false; num_vars as usize];
    for line in text.lines() {
        let line = line.trim();
        let body = line.strip_prefix("s ").unwrap_or(line);
        match body {
            "SAT" | "SATISFIABLE" => {
                status = Some(true);
                continue;
            }
            "UNSAT" | "UNSATISFIABLE" => {
                status = Some(false);
                continue;
            }
            _ => {}
        }
        if status != Some(true) || line.starts_with('c') {
            continue;
        }
        let body = line.strip_prefix("v ").unwrap_or(line);
        for tok in body.split_whitespace() {
            let x: i64 = tok
                .parse()
                .map_err(|_| SolveError::Protocol(format!("bad model literal: {tok}")))?;
            if let Some(l) = Lit::from_dimacs(x) {
                if let Some(slot) = model.get_mut(l.var() as usize) {
                    *slot = !l.is_neg();
                }
            }
        }
    }
    match status {
        Some(true) => Ok(Outcome::Sat(model)),
        Some(false) => Ok(Outcome::Unsat),
        None => Err(SolveError::Protocol("no SAT/UNSAT status line".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut cnf = Cnf::new();
        cnf.add_clause([Lit::pos(0), Lit::neg(2)]);
        cnf.add_clause([Lit::neg(1)]);
        let back = parse(&write(&cnf)).unwrap();
        assert_eq!(back, cnf);
    }

    #[test]
    fn outcome_forms() {
        let o = Outcome::Sat(vec![true, false, true]);
        assert_eq!(parse_outcome(&write_outcome(&o), 3).unwrap(), o);
        assert_eq!(parse_outcome("s UNSATISFIABLE\n", 2).unwrap(), Outcome::Unsat);
        let comp = parse_outcome("c hi\ns SATISFIABLE\nv -1 2\nv 0\n", 3).unwrap();
        assert_eq!(comp, Outcome::Sat(vec![false, true, false]));
        assert!(parse_outcome("garbage", 1).is_err());
    }
}
