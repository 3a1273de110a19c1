use crate::{Cnf, Lit, Outcome, SolveError, Solver};

const UNASSIGNED: u8 = 2;

/// Chronological-backtracking DPLL with two-watched-literal propagation.
///
/// Decisions take the lowest unassigned variable and try `false` first, so
/// variables the formula leaves unconstrained come back false.
#[derive(Clone, Debug)]
pub struct Dpll {
    max_decisions: u64,
}

impl Default for Dpll {
    fn default() -> Self {
        Dpll {
            max_decisions: 50_000_000,
        }
    }
}

impl Dpll {
    pub fn new() -> Dpll {
        Dpll::default()
    }

    pub fn with_budget(max_decisions: u64) -> Dpll {
        Dpll { max_decisions }
    }
}

impl Solver for Dpll {
    fn solve(&mut self, cnf: &Cnf) -> Result<Outcome, SolveError> {
        State::new(cnf).run(self.max_decisions)
    }
}

struct Level {
    decision: Lit,
    trail_start: usize,
    flipped: bool,
}

struct State {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<u8>,
    trail: Vec<Lit>,
    qhead: usize,
    levels: Vec<Level>,
    next_var: usize,
    units: Vec<Lit>,
    empty_clause: bool,
}

impl State {
    fn new(cnf: &Cnf) -> State {
        let n = cnf.num_vars() as usize;
        let mut st = State {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            value: vec![UNASSIGNED; n],
            trail: Vec::new(),
            qhead: 0,
            levels: Vec::new(),
            next_var: 0,
            units: Vec::new(),
            empty_clause: false,
        };
        for clause in cnf.clauses() {
            let mut c = clause.clone();
            c.sort();
            c.dedup();
            if c.windows(2).any(|w| w[0] == !w[1]) {
                continue;
            }
            match c.len() {
                0 => st.empty_clause = true,
                1 => st.units.push(c[0]),
                _ => {
                    let idx = st.clauses.len();
                    st.watches[c[0].code()].push(idx);
                    st.watches[c[1].code()].push(idx);
                    st.clauses.push(c);
                }
            }
        }
        st
    }

    fn lit_value(&self, l: Lit) -> u8 {
        match self.value[l.var() as usize] {
            UNASSIGNED => UNASSIGNED,
            v => v ^ l.is_neg() as u8,
        }
    }

    fn assign(&mut self, l: Lit) {
        self.value[l.var() as usize] = !l.is_neg() as u8;
        self.trail.push(l);
    }

    /// Assigns `l` unless already set; returns false if it is already false.
    fn enqueue(&mut self, l: Lit) -> bool {
        match self.lit_value(l) {
            1 => true,
            0 => false,
            _ => {
                self.assign(l);
                true
            }
        }
    }

    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let falsified = !self.trail[self.qhead];
            self.qhead += 1;
            let watching = std::mem::take(&mut self.watches[falsified.code()]);
            let mut kept = Vec::with_capacity(watching.len());
            let mut conflict = false;
            let mut iter = watching.into_iter();
            for ci in iter.by_ref() {
                let mut clause = std::mem::take(&mut self.clauses[ci]);
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                let mut keep = true;
                if self.lit_value(other) != 1 {
                    if let Some(k) = (2..clause.len()).find(|&k| self.lit_value(clause[k]) != 0) {
                        clause.swap(1, k);
                        self.watches[clause[1].code()].push(ci);
                        keep = false;
                    }
                }
                let unit = keep && self.lit_value(other) != 1;
                self.clauses[ci] = clause;
                if keep {
                    kept.push(ci);
                }
                if unit && !self.enqueue(other) {
                    conflict = true;
                    break;
                }
            }
            kept.extend(iter);
            self.watches[falsified.code()] = kept;
            if conflict {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, trail_len: usize) {
        for l in self.trail.drain(trail_len..) {
            self.value[l.var() as usize] = UNASSIGNED;
        }
        self.qhead = trail_len;
        self.next_var = 0;
    }

    fn pick(&mut self) -> Option<u32> {
        while self.next_var < self.value.len() {
            if self.value[self.next_var] == UNASSIGNED {
                return Some(self.next_var as u32);
            }
            self.next_var += 1;
        }
        None
    }

    /// Flips the most recent unflipped decision; false when none remain.
    fn backtrack(&mut self) -> bool {
        while let Some(level) = self.levels.pop() {
            self.undo_to(level.trail_start);
            if !level.flipped {
                let flipped = !level.decision;
                self.levels.push(Level {
                    decision: flipped,
                    trail_start: level.trail_start,
                    flipped: true,
                });
                self.assign(flipped);
                return true;
            }
        }
        false
    }

    fn run(mut self, max_decisions: u64) -> Result<Outcome, SolveError> {
        if self.empty_clause {
            return Ok(Outcome::Unsat);
        }
        for l in std::mem::take(&mut self.units) {
            if !self.enqueue(l) {
                return Ok(Outcome::Unsat);
            }
        }
        let mut decisions = 0u64;
        let mut ok = self.propagate();
        loop {
            if !ok {
                if !self.backtrack() {
                    return Ok(Outcome::Unsat);
                }
                ok = self.propagate();
                continue;
            }
            let Some(var) = self.pick() else {
                return Ok(Outcome::Sat(self.value.iter().map(|&v| v == 1).collect()));
            };
            decisions += 1;
            if decisions > max_decisions {
                return Err(SolveError::Budget(max_decisions));
            }
            let decision = Lit::neg(var);
            self.levels.push(Level {
                decision,
                trail_start: self.trail.len(),
                flipped: false,
            });
            self.assign(decision);
            ok = self.propagate();
        }
    }
}
