use crate::{dimacs, Cnf, Outcome, SolveError, Solver};
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

/// Runs an external program that reads DIMACS on stdin and answers with the
/// `SAT`/`UNSAT` protocol on stdout.
#[derive(Clone, Debug)]
pub struct ExternalSolver {
    program: PathBuf,
}

impl ExternalSolver {
    pub fn new(program: impl Into<PathBuf>) -> ExternalSolver {
        ExternalSolver {
            program: program.into(),
        }
    }
}

impl Solver for ExternalSolver {
    fn solve(&mut self, cnf: &Cnf) -> Result<Outcome, SolveError> {
        let mut child = Command::new(&self.program)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()?;
        let input = dimacs::write(cnf);
        let mut stdin = child.stdin.take().expect("piped stdin");
        let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
        let output = child.wait_with_output()?;
        writer
            .join()
            .map_err(|_| SolveError::Protocol("stdin writer panicked".into()))??;
        let text = String::from_utf8_lossy(&output.stdout);
        dimacs::parse_outcome(&text, cnf.num_vars())
    }
}
