//! Hash-consed propositional formulas and their clausal form.

use remedy_sat::{Cnf, Lit};
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FId(u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum F {
    True,
    False,
    Var(u32),
    Not(FId),
    And(FId, FId),
    Or(FId, FId),
}

/// Arena of shared formulas with local simplification. Variables are the
/// problem variables `0..`; clausal form adds gate variables above them.
#[derive(Clone, Debug)]
pub struct Formulas {
    nodes: Vec<F>,
    index: HashMap<F, FId>,
}

impl Default for Formulas {
    fn default() -> Self {
        Formulas::new()
    }
}

impl Formulas {
    pub const TRUE: FId = FId(0);
    pub const FALSE: FId = FId(1);

    pub fn new() -> Formulas {
        let mut f = Formulas {
            nodes: Vec::new(),
            index: HashMap::new(),
        };
        f.intern(F::True);
        f.intern(F::False);
        f
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn intern(&mut self, n: F) -> FId {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = FId(self.nodes.len() as u32);
        self.nodes.push(n);
        self.index.insert(n, id);
        id
    }

    pub fn var(&mut self, v: u32) -> FId {
        self.intern(F::Var(v))
    }

    pub fn not(&mut self, a: FId) -> FId {
        match self.nodes[a.0 as usize] {
            F::True => Self::FALSE,
            F::False => Self::TRUE,
            F::Not(b) => b,
            _ => self.intern(F::Not(a)),
        }
    }

    fn is_negation(&self, a: FId, b: FId) -> bool {
        self.nodes[a.0 as usize] == F::Not(b) || self.nodes[b.0 as usize] == F::Not(a)
    }

    pub fn and(&mut self, a: FId, b: FId) -> FId {
        if a == Self::FALSE || b == Self::FALSE || self.is_negation(a, b) {
            return Self::FALSE;
        }
        if a == Self::TRUE || a == b {
            return b;
        }
        if b == Self::TRUE {
            return a;
        }
        self.intern(F::And(a.min(b), a.max(b)))
    }

    pub fn or(&mut self, a: FId, b: FId) -> FId {
        if a == Self::TRUE || b == Self::TRUE || self.is_negation(a, b) {
            return Self::TRUE;
        }
        if a == Self::FALSE || a == b {
            return b;
        }
        if b == Self::FALSE {
            return a;
        }
        self.intern(F::Or(a.min(b), a.max(b)))
    }

    pub fn and_all(&mut self, xs: impl IntoIterator<Item = FId>) -> FId {
        xs.into_iter().fold(Self::TRUE, |acc, x| self.and(acc, x))
    }

    pub fn or_all(&mut self, xs: impl IntoIterator<Item = FId>) -> FId {
        xs.into_iter().fold(Self::FALSE, |acc, x| self.or(acc, x))
    }

    /// Truth value under an assignment of the problem variables; missing
    /// variables are false.
    pub fn eval(&self, root: FId, assignment: &[bool]) -> bool {
        let mut val: HashMap<FId, bool> = HashMap::new();
        let mut stack = vec![(root, false)];
        while let Some((id, ready)) = stack.pop() {
            if val.contains_key(&id) {
                continue;
            }
            let n = self.nodes[id.0 as usize];
            let kids: &[FId] = match &n {
                F::Not(a) => &[*a],
                F::And(a, b) | F::Or(a, b) => &[*a, *b],
                _ => &[],
            };
            if !ready && kids.iter().any(|k| !val.contains_key(k)) {
                stack.push((id, true));
                stack.extend(kids.iter().map(|&k| (k, false)));
                continue;
            }
            let v = match n {
                F::True => true,
                F::False => false,
                F::Var(v) => assignment.get(v as usize).copied().unwrap_or(false),
                F::Not(a) => !val[&a],
                F::And(a, b) => val[&a] && val[&b],
                F::Or(a, b) => val[&a] || val[&b],
            };
            val.insert(id, v);
        }
        val[&root]
    }

    /// Equisatisfiable clauses asserting `root`, over `num_vars` problem
    /// variables plus one gate variable per shared connective. Models agree
    /// with `root` on the problem variables.
    pub fn to_cnf(&self, root: FId, num_vars: u32) -> Cnf {
        let mut cnf = Cnf::with_vars(num_vars);
        if root == Self::TRUE {
            return cnf;
        }
        if root == Self::FALSE {
            cnf.add_clause(vec![]);
            return cnf;
        }
        let mut lit: HashMap<FId, Lit> = HashMap::new();
        let mut stack = vec![(root, false)];
        while let Some((id, ready)) = stack.pop() {
            if lit.contains_key(&id) {
                continue;
            }
            let n = self.nodes[id.0 as usize];
            let kids: &[FId] = match &n {
                F::Not(a) => &[*a],
                F::And(a, b) | F::Or(a, b) => &[*a, *b],
                _ => &[],
            };
            if !ready && kids.iter().any(|k| !lit.contains_key(k)) {
                stack.push((id, true));
                stack.extend(kids.iter().map(|&k| (k, false)));
                continue;
            }
            let l = match n {
                F::True | F::False => {
                    let g = Lit::pos(cnf.fresh_var());
                    cnf.add_clause(vec![if n == F::True { g } else { !g }]);
                    g
                }
                F::Var(v) => {
                    cnf.ensure_vars(v + 1);
                    Lit::pos(v)
                }
                F::Not(a) => !lit[&a],
                F::And(a, b) => {
                    let (x, y) = (lit[&a], lit[&b]);
                    let g = Lit::pos(cnf.fresh_var());
                    cnf.add_clause(vec![!g, x]);
                    cnf.add_clause(vec![!g, y]);
                    cnf.add_clause(vec![g, !x, !y]);
                    g
                }
                F::Or(a, b) => {
                    let (x, y) = (lit[&a], lit[&b]);
                    let g = Lit::pos(cnf.fresh_var());
                    cnf.add_clause(vec![g, !x]);
                    cnf.add_clause(vec![g, !y]);
                    cnf.add_clause(vec![!g, x, y]);
                    g
                }
            };
            lit.insert(id, l);
        }
        cnf.add_clause(vec![lit[&root]]);
        cnf
    }
}
