//! Symbolic matching: for each input, a formula over hole variables that
//! holds exactly when the instantiated template accepts it.

use super::formula::{FId, Formulas};
use crate::ast::{CharSet, Kind, Look, Node, RelevantAlphabet};
use indexmap::IndexMap;
use std::collections::{HashMap, HashSet};
use std::rc::Rc;

/// Default cap on distinct `(node, position, captures)` triples per input.
pub const DEFAULT_STATE_BUDGET: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("symbolic matching exceeded {0} intermediate states")]
pub struct EncodeBudget(pub usize);

/// Variable for "class `class` belongs to the filling of hole `hole`".
pub fn var_index(hole: u32, class: usize, classes: usize) -> u32 {
    hole * classes as u32 + class as u32
}

#[derive(Clone, Debug)]
enum Op {
    Set(CharSet),
    Eps,
    Hole(u32),
    Concat(u32, u32),
    Union(u32, u32),
    Star(u32),
    Capture(u32, u32),
    Backref(u32),
    Look(Look, u32, usize),
}

fn compile(n: &Node, ops: &mut Vec<Op>) -> u32 {
    let op = match &n.kind {
        Kind::Set(c) => Op::Set(c.clone()),
        Kind::Epsilon => Op::Eps,
        Kind::Hole(k) => Op::Hole(*k),
        Kind::Concat(a, b) => Op::Concat(compile(a, ops), compile(b, ops)),
        Kind::Union(a, b) => Op::Union(compile(a, ops), compile(b, ops)),
        Kind::Star(a) => Op::Star(compile(a, ops)),
        Kind::Capture(i, a) => Op::Capture(*i, compile(a, ops)),
        Kind::Backref(i) => Op::Backref(*i),
        Kind::Look(k, a) => {
            let len = if k.is_behind() {
                a.fixed_length().expect("lookbehind bodies are fixed-length")
            } else {
                0
            };
            Op::Look(*k, compile(a, ops), len)
        }
    };
    ops.push(op);
    (ops.len() - 1) as u32
}

/// A template compiled for symbolic matching.
#[derive(Clone, Debug)]
pub struct TemplateEncoder {
    ops: Vec<Op>,
    root: u32,
    slots: usize,
    budget: usize,
}

type State = (u32, u32);
type Results = Rc<Vec<(State, FId)>>;

impl TemplateEncoder {
    pub fn new(t: &Node) -> TemplateEncoder {
        let mut ops = Vec::new();
        let root = compile(t, &mut ops);
        let slots = t.max_capture() as usize + 1;
        TemplateEncoder {
            ops,
            root,
            slots,
            budget: DEFAULT_STATE_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> TemplateEncoder {
        self.budget = budget;
        self
    }

    /// Formula that holds exactly for the hole fillings (as unions of
    /// classes of `alphabet`) under which the template accepts `w`.
    pub fn encode(
        &self,
        w: &str,
        alphabet: &RelevantAlphabet,
        f: &mut Formulas,
    ) -> Result<FId, EncodeBudget> {
        let chars: Vec<char> = w.chars().collect();
        let classes = chars.iter().map(|&c| alphabet.class_of(c)).collect();
        let mut e = Encoder {
            ops: &self.ops,
            w: &chars,
            classes,
            nclasses: alphabet.len(),
            f,
            subs: Vec::new(),
            sub_ids: HashMap::new(),
            gammas: Vec::new(),
            gamma_ids: HashMap::new(),
            memo: HashMap::new(),
            active: HashSet::new(),
            guard_hits: 0,
            work: 0,
            budget: self.budget,
        };
        let g0 = e.intern_gamma(vec![None; self.slots].into());
        let results = e.enc(self.root, 0, g0)?;
        let n = chars.len() as u32;
        let finals: Vec<FId> = results
            .iter()
            .filter(|((p, _), _)| *p == n)
            .map(|&(_, phi)| phi)
            .collect();
        Ok(e.f.or_all(finals))
    }
}

struct Encoder<'a> {
    ops: &'a [Op],
    w: &'a [char],
    classes: Vec<usize>,
    nclasses: usize,
    f: &'a mut Formulas,
    subs: Vec<Rc<[char]>>,
    sub_ids: HashMap<Rc<[char]>, u32>,
    gammas: Vec<Rc<[Option<u32>]>>,
    gamma_ids: HashMap<Rc<[Option<u32>]>, u32>,
    memo: HashMap<(u32, u32, u32), Results>,
    active: HashSet<(u32, u32, u32)>,
    guard_hits: u64,
    work: usize,
    budget: usize,
}

fn add(f: &mut Formulas, acc: &mut IndexMap<State, FId>, s: State, phi: FId) {
    if phi == Formulas::FALSE {
        return;
    }
    let merged = match acc.get(&s) {
        Some(&old) => f.or(old, phi),
        None => phi,
    };
    acc.insert(s, merged);
}

impl Encoder<'_> {
    fn intern_sub(&mut self, s: &[char]) -> u32 {
        if let Some(&id) = self.sub_ids.get(s) {
            return id;
        }
        let rc: Rc<[char]> = s.into();
        let id = self.subs.len() as u32;
        self.subs.push(rc.clone());
        self.sub_ids.insert(rc, id);
        id
    }

    fn intern_gamma(&mut self, g: Rc<[Option<u32>]>) -> u32 {
        if let Some(&id) = self.gamma_ids.get(&g) {
            return id;
        }
        let id = self.gammas.len() as u32;
        self.gammas.push(g.clone());
        self.gamma_ids.insert(g, id);
        id
    }

    fn var(&mut self, hole: u32, pos: usize) -> FId {
        let v = var_index(hole, self.classes[pos], self.nclasses);
        self.f.var(v)
    }

    fn enc(&mut self, op: u32, p: u32, g: u32) -> Result<Results, EncodeBudget> {
        let key = (op, p, g);
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        let ops = self.ops;
        if let Op::Star(_) = ops[op as usize] {
            if self.active.contains(&key) {
                self.guard_hits += 1;
                return Ok(Rc::new(Vec::new()));
            }
        }
        self.work += 1;
        if self.work > self.budget {
            return Err(EncodeBudget(self.budget));
        }
        let hits_before = self.guard_hits;
        let n = self.w.len() as u32;
        let mut acc: IndexMap<State, FId> = IndexMap::new();
        match &ops[op as usize] {
            Op::Set(c) => {
                if p < n && c.contains(self.w[p as usize]) {
                    acc.insert((p + 1, g), Formulas::TRUE);
                }
            }
            Op::Eps => {
                acc.insert((p, g), Formulas::TRUE);
            }
            Op::Hole(k) => {
                if p < n {
                    let v = self.var(*k, p as usize);
                    acc.insert((p + 1, g), v);
                }
            }
            Op::Concat(a, b) => {
                let left = self.enc(*a, p, g)?;
                for &((p1, g1), phi) in left.iter() {
                    let right = self.enc(*b, p1, g1)?;
                    for &(s, psi) in right.iter() {
                        let both = self.f.and(phi, psi);
                        add(self.f, &mut acc, s, both);
                    }
                }
            }
            Op::Union(a, b) => {
                for side in [*a, *b] {
                    let r = self.enc(side, p, g)?;
                    for &(s, phi) in r.iter() {
                        add(self.f, &mut acc, s, phi);
                    }
                }
            }
            Op::Star(body) => {
                self.active.insert(key);
                acc.insert((p, g), Formulas::TRUE);
                let first = self.enc(*body, p, g);
                let first = match first {
                    Ok(r) => r,
                    Err(e) => {
                        self.active.remove(&key);
                        return Err(e);
                    }
                };
                for &(s, phi) in first.iter() {
                    if s == (p, g) {
                        continue;
                    }
                    let rest = match self.enc(op, s.0, s.1) {
                        Ok(r) => r,
                        Err(e) => {
                            self.active.remove(&key);
                            return Err(e);
                        }
                    };
                    for &(s2, psi) in rest.iter() {
                        let both = self.f.and(phi, psi);
                        add(self.f, &mut acc, s2, both);
                    }
                }
                self.active.remove(&key);
            }
            Op::Capture(i, body) => {
                let r = self.enc(*body, p, g)?;
                for &((p1, g1), phi) in r.iter() {
                    let sub = self.intern_sub(&self.w[p as usize..p1 as usize]);
                    let mut gamma: Vec<Option<u32>> = self.gammas[g1 as usize].to_vec();
                    gamma[*i as usize] = Some(sub);
                    let g2 = self.intern_gamma(gamma.into());
                    add(self.f, &mut acc, (p1, g2), phi);
                }
            }
            Op::Backref(i) => {
                if let Some(sub) = self.gammas[g as usize].get(*i as usize).copied().flatten() {
                    let s = self.subs[sub as usize].clone();
                    let end = p as usize + s.len();
                    if end <= self.w.len() && self.w[p as usize..end] == s[..] {
                        acc.insert((end as u32, g), Formulas::TRUE);
                    }
                }
            }
            Op::Look(k, body, len) => match k {
                Look::Ahead => {
                    let r = self.enc(*body, p, g)?;
                    for &((_, g1), phi) in r.iter() {
                        add(self.f, &mut acc, (p, g1), phi);
                    }
                }
                Look::NegAhead => {
                    let r = self.enc(*body, p, g)?;
                    let any = self.f.or_all(r.iter().map(|&(_, phi)| phi));
                    let none = self.f.not(any);
                    add(self.f, &mut acc, (p, g), none);
                }
                Look::Behind | Look::NegBehind => {
                    let inside = if (p as usize) < *len {
                        Formulas::FALSE
                    } else {
                        let mut at = p as usize - len;
                        self.fixed(*body, &mut at)
                    };
                    let phi = if *k == Look::Behind {
                        inside
                    } else {
                        self.f.not(inside)
                    };
                    add(self.f, &mut acc, (p, g), phi);
                }
            },
        }
        let r: Results = Rc::new(acc.into_iter().collect());
        if self.guard_hits == hits_before {
            self.memo.insert(key, r.clone());
        }
        Ok(r)
    }

    fn fixed(&mut self, op: u32, at: &mut usize) -> FId {
        let ops = self.ops;
        match &ops[op as usize] {
            Op::Set(c) => {
                let ok = c.contains(self.w[*at]);
                *at += 1;
                if ok {
                    Formulas::TRUE
                } else {
                    Formulas::FALSE
                }
            }
            Op::Hole(k) => {
                let v = self.var(*k, *at);
                *at += 1;
                v
            }
            Op::Eps => Formulas::TRUE,
            Op::Concat(a, b) => {
                let x = self.fixed(*a, at);
                let y = self.fixed(*b, at);
                self.f.and(x, y)
            }
            _ => unreachable!("lookbehind bodies are fixed-length"),
        }
    }
}
