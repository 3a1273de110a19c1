//! Backtracking matching semantics producing every matching result and the
//! derivation size.
//!
//! Evaluation runs on an explicit frame stack, so deep inputs do not exhaust
//! the native stack. Membership queries may enable memoization over
//! `(node, position, captures)`; derivation sizes are only reported by the
//! unmemoized mode, which counts every rule application.

use crate::ast::{CharSet, Kind, Look, Node};
use indexmap::IndexSet;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::rc::Rc;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Partial map from capture index to captured text; absent keys are unset.
pub type CaptureMap = BTreeMap<u32, String>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct MatchState {
    pub pos: usize,
    pub captures: CaptureMap,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct MatchResultSet {
    pub states: Vec<MatchState>,
    pub derivation_size: u64,
}

impl MatchResultSet {
    pub fn positions(&self) -> Vec<usize> {
        let mut ps: Vec<usize> = self.states.iter().map(|s| s.pos).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("matcher budget of {0} derivation nodes exhausted")]
pub struct BudgetExhausted(pub u64);

#[derive(Clone, Debug)]
enum Op {
    Set(CharSet),
    Eps,
    Hole,
    Concat(u32, u32),
    Union(u32, u32),
    Star(u32),
    Capture(u32, u32),
    Backref(u32),
    Look(Look, u32),
}

/// A compiled expression, reusable across inputs.
#[derive(Clone, Debug)]
pub struct Matcher {
    ops: Vec<Op>,
    root: u32,
    slots: usize,
    budget: u64,
}

fn compile(n: &Node, ops: &mut Vec<Op>) -> u32 {
    let op = match &n.kind {
        Kind::Set(c) => Op::Set(c.clone()),
        Kind::Epsilon => Op::Eps,
        Kind::Hole(_) => Op::Hole,
        Kind::Concat(a, b) => Op::Concat(compile(a, ops), compile(b, ops)),
        Kind::Union(a, b) => Op::Union(compile(a, ops), compile(b, ops)),
        Kind::Star(a) => Op::Star(compile(a, ops)),
        Kind::Capture(i, a) => Op::Capture(*i, compile(a, ops)),
        Kind::Backref(i) => Op::Backref(*i),
        Kind::Look(k, a) => Op::Look(*k, compile(a, ops)),
    };
    ops.push(op);
    (ops.len() - 1) as u32
}

impl Matcher {
    /// Compiles `r`. Holes match nothing.
    pub fn new(r: &Node) -> Matcher {
        let mut ops = Vec::new();
        let root = compile(r, &mut ops);
        let mut slots = 0;
        r.preorder(&mut |n| {
            if let Kind::Capture(i, _) | Kind::Backref(i) = n.kind {
                slots = slots.max(i as usize + 1);
            }
        });
        Matcher {
            ops,
            root,
            slots,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Matcher {
        self.budget = budget;
        self
    }

    /// All matching results of the expression on `w` from `pos` with
    /// captures `gamma`, plus the derivation size.
    pub fn step(
        &self,
        w: &str,
        pos: usize,
        gamma: &CaptureMap,
    ) -> Result<MatchResultSet, BudgetExhausted> {
        let chars: Vec<char> = w.chars().collect();
        assert!(pos <= chars.len(), "start position out of range");
        let mut m = Machine::new(self, &chars, false);
        let g = m.intern_map(gamma);
        let states = m.run(self.root, pos as u32, g)?;
        let states = states
            .iter()
            .map(|&(p, g)| MatchState {
                pos: p as usize,
                captures: m.export(g),
            })
            .collect();
        Ok(MatchResultSet {
            states,
            derivation_size: m.nodes,
        })
    }

    /// Whether some result from position 0 ends at `|w|`.
    pub fn accepts(&self, w: &str) -> Result<bool, BudgetExhausted> {
        let chars: Vec<char> = w.chars().collect();
        let mut m = Machine::new(self, &chars, true);
        let g = m.empty_gamma();
        let states = m.run(self.root, 0, g)?;
        Ok(states.iter().any(|&(p, _)| p as usize == chars.len()))
    }

    /// Derivation size of matching from position 0 with no captures.
    pub fn time(&self, w: &str) -> Result<u64, BudgetExhausted> {
        let chars: Vec<char> = w.chars().collect();
        let mut m = Machine::new(self, &chars, false);
        let g = m.empty_gamma();
        m.run(self.root, 0, g)?;
        Ok(m.nodes)
    }
}

/// Membership with the default budget; budget exhaustion counts as rejection.
pub fn accepts(r: &Node, w: &str) -> bool {
    Matcher::new(r).accepts(w).unwrap_or(false)
}

pub fn step(r: &Node, w: &str, pos: usize, gamma: &CaptureMap) -> Result<MatchResultSet, BudgetExhausted> {
    Matcher::new(r).step(w, pos, gamma)
}

pub fn time(r: &Node, w: &str) -> Result<u64, BudgetExhausted> {
    Matcher::new(r).time(w)
}

/// Every string over `alphabet` of length at most `max_len` that `r` accepts,
/// in length-lexicographic order.
pub fn language_sample(
    r: &Node,
    max_len: usize,
    alphabet: &[char],
    budget: u64,
) -> Result<Vec<String>, BudgetExhausted> {
    let total: u64 = (0..=max_len as u32)
        .map(|k| (alphabet.len() as u64).saturating_pow(k))
        .fold(0u64, |a, b| a.saturating_add(b));
    if total > budget {
        return Err(BudgetExhausted(budget));
    }
    let m = Matcher::new(r);
    let mut out = Vec::new();
    for w in all_strings(alphabet, max_len) {
        if m.accepts(&w)? {
            out.push(w);
        }
    }
    Ok(out)
}

/// All strings over `alphabet` of length ≤ `max_len`, length-lexicographic.
pub fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for s in &layer {
            for &c in alphabet {
                let mut t = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

type State = (u32, u32);

enum Action {
    Call(u32, u32, u32),
    Return(Vec<State>),
}

struct Frame {
    op: u32,
    p: u32,
    g: u32,
    stage: u8,
    idx: usize,
    items: Vec<State>,
    acc: IndexSet<State>,
    guard_mark: u64,
}

impl Frame {
    fn new(op: u32, p: u32, g: u32, guard_mark: u64) -> Frame {
        Frame {
            op,
            p,
            g,
            stage: 0,
            idx: 0,
            items: Vec::new(),
            acc: IndexSet::new(),
            guard_mark,
        }
    }
}

struct Machine<'a> {
    prog: &'a Matcher,
    w: &'a [char],
    memo: Option<HashMap<(u32, u32, u32), Rc<[State]>>>,
    subs: Vec<Vec<char>>,
    sub_ids: HashMap<Vec<char>, u32>,
    gammas: Vec<Box<[Option<u32>]>>,
    gamma_ids: HashMap<Box<[Option<u32>]>, u32>,
    active_stars: HashSet<(u32, u32, u32)>,
    guard_hits: u64,
    nodes: u64,
}

impl<'a> Machine<'a> {
    fn new(prog: &'a Matcher, w: &'a [char], memo: bool) -> Machine<'a> {
        Machine {
            prog,
            w,
            memo: memo.then(HashMap::new),
            subs: Vec::new(),
            sub_ids: HashMap::new(),
            gammas: Vec::new(),
            gamma_ids: HashMap::new(),
            active_stars: HashSet::new(),
            guard_hits: 0,
            nodes: 0,
        }
    }

    fn intern_sub(&mut self, s: &[char]) -> u32 {
        if let Some(&id) = self.sub_ids.get(s) {
            return id;
        }
        let id = self.subs.len() as u32;
        self.subs.push(s.to_vec());
        self.sub_ids.insert(s.to_vec(), id);
        id
    }

    fn intern_gamma(&mut self, g: Box<[Option<u32>]>) -> u32 {
        if let Some(&id) = self.gamma_ids.get(&g) {
            return id;
        }
        let id = self.gammas.len() as u32;
        self.gammas.push(g.clone());
        self.gamma_ids.insert(g, id);
        id
    }

    fn empty_gamma(&mut self) -> u32 {
        self.intern_gamma(vec![None; self.prog.slots].into_boxed_slice())
    }

    fn intern_map(&mut self, map: &CaptureMap) -> u32 {
        let slots = self
            .prog
            .slots
            .max(map.keys().map(|&k| k as usize + 1).max().unwrap_or(0));
        let mut g = vec![None; slots];
        for (&k, v) in map {
            let chars: Vec<char> = v.chars().collect();
            g[k as usize] = Some(self.intern_sub(&chars));
        }
        self.intern_gamma(g.into_boxed_slice())
    }

    fn export(&self, g: u32) -> CaptureMap {
        self.gammas[g as usize]
            .iter()
            .enumerate()
            .filter_map(|(k, s)| {
                s.map(|id| (k as u32, self.subs[id as usize].iter().collect()))
            })
            .collect()
    }

    fn with_capture(&mut self, g: u32, slot: u32, from: u32, to: u32) -> u32 {
        let sub = self.intern_sub(&self.w[from as usize..to as usize].to_vec());
        let mut next = self.gammas[g as usize].clone();
        next[slot as usize] = Some(sub);
        self.intern_gamma(next)
    }

    fn tick(&mut self, n: u64) -> Result<(), BudgetExhausted> {
        self.nodes += n;
        if self.nodes > self.prog.budget {
            Err(BudgetExhausted(self.prog.budget))
        } else {
            Ok(())
        }
    }

    fn run(&mut self, root: u32, p: u32, g: u32) -> Result<Rc<[State]>, BudgetExhausted> {
        let mut stack: Vec<Frame> = Vec::new();
        let mut ret: Option<Vec<State>> = None;
        if let Some(done) = self.enter(root, p, g, &mut stack)? {
            return Ok(done.into());
        }
        while let Some(top) = stack.last_mut() {
            match self.advance(top, ret.take()) {
                Action::Call(op, p, g) => {
                    if let Some(done) = self.enter(op, p, g, &mut stack)? {
                        ret = Some(done);
                    }
                }
                Action::Return(result) => {
                    let frame = stack.pop().expect("frame");
                    if matches!(self.prog.ops[frame.op as usize], Op::Star(_)) {
                        self.active_stars.remove(&(frame.op, frame.p, frame.g));
                    }
                    if self.guard_hits == frame.guard_mark {
                        if let Some(memo) = &mut self.memo {
                            memo.insert((frame.op, frame.p, frame.g), result.clone().into());
                        }
                    }
                    if stack.is_empty() {
                        return Ok(result.into());
                    }
                    ret = Some(result);
                }
            }
        }
        unreachable!("root frame returns")
    }

    /// Starts evaluating `op`; leaf rules and memo hits return immediately.
    fn enter(
        &mut self,
        op: u32,
        p: u32,
        g: u32,
        stack: &mut Vec<Frame>,
    ) -> Result<Option<Vec<State>>, BudgetExhausted> {
        self.tick(1)?;
        if let Some(memo) = &self.memo {
            if let Some(hit) = memo.get(&(op, p, g)) {
                return Ok(Some(hit.to_vec()));
            }
        }
        let n = self.w.len() as u32;
        let done = match &self.prog.ops[op as usize] {
            Op::Set(c) => {
                if p < n && c.contains(self.w[p as usize]) {
                    vec![(p + 1, g)]
                } else {
                    vec![]
                }
            }
            Op::Eps => vec![(p, g)],
            Op::Hole => vec![],
            Op::Backref(i) => {
                let slot = self.gammas[g as usize].get(*i as usize).copied().flatten();
                match slot {
                    None => vec![],
                    Some(sub) => {
                        let x = &self.subs[sub as usize];
                        let k = x.len();
                        let mismatch = (0..k).find(|&j| self.w.get(p as usize + j) != Some(&x[j]));
                        // Exact derivation size of matching `x` as a
                        // left-associated literal concatenation.
                        let sub_size = match (k, mismatch) {
                            (0, _) => 1,
                            (_, None) => 2 * k - 1,
                            (_, Some(j)) => k + j,
                        };
                        self.tick(sub_size as u64)?;
                        if mismatch.is_none() {
                            vec![(p + k as u32, g)]
                        } else {
                            vec![]
                        }
                    }
                }
            }
            Op::Look(k, body) if k.is_behind() => {
                let body = *body;
                let len = self.fixed_len(body);
                let hit = if len as u32 <= p {
                    let start = p as usize - len;
                    self.fixed_run(body, start, p as usize)?
                } else {
                    false
                };
                if hit != k.is_negative() {
                    vec![(p, g)]
                } else {
                    vec![]
                }
            }
            Op::Star(_) => {
                if !self.active_stars.insert((op, p, g)) {
                    self.guard_hits += 1;
                    vec![]
                } else {
                    stack.push(Frame::new(op, p, g, self.guard_hits));
                    return Ok(None);
                }
            }
            _ => {
                stack.push(Frame::new(op, p, g, self.guard_hits));
                return Ok(None);
            }
        };
        if let Some(memo) = &mut self.memo {
            memo.insert((op, p, g), done.clone().into());
        }
        Ok(Some(done))
    }

    fn advance(&mut self, f: &mut Frame, ret: Option<Vec<State>>) -> Action {
        let op = self.prog.ops[f.op as usize].clone();
        match op {
            Op::Concat(l, r) => {
                match f.stage {
                    0 => {
                        f.stage = 1;
                        return Action::Call(l, f.p, f.g);
                    }
                    1 => {
                        f.items = ret.expect("child result");
                        f.stage = 2;
                    }
                    _ => f.acc.extend(ret.expect("child result")),
                }
                next_item(f, r)
            }
            Op::Union(l, r) => match f.stage {
                0 => {
                    f.stage = 1;
                    Action::Call(l, f.p, f.g)
                }
                1 => {
                    f.acc.extend(ret.expect("child result"));
                    f.stage = 2;
                    Action::Call(r, f.p, f.g)
                }
                _ => {
                    f.acc.extend(ret.expect("child result"));
                    Action::Return(std::mem::take(&mut f.acc).into_iter().collect())
                }
            },
            Op::Star(body) => {
                match f.stage {
                    0 => {
                        f.stage = 1;
                        return Action::Call(body, f.p, f.g);
                    }
                    1 => {
                        let here = (f.p, f.g);
                        f.items = ret
                            .expect("child result")
                            .into_iter()
                            .filter(|&s| s != here)
                            .collect();
                        f.acc.insert(here);
                        f.stage = 2;
                    }
                    _ => f.acc.extend(ret.expect("child result")),
                }
                next_item(f, f.op)
            }
            Op::Capture(slot, body) => {
                if f.stage == 0 {
                    f.stage = 1;
                    return Action::Call(body, f.p, f.g);
                }
                let mut out = IndexSet::new();
                for (pi, gi) in ret.expect("child result") {
                    out.insert((pi, self.with_capture(gi, slot, f.p, pi)));
                }
                Action::Return(out.into_iter().collect())
            }
            Op::Look(k, body) => {
                if f.stage == 0 {
                    f.stage = 1;
                    return Action::Call(body, f.p, f.g);
                }
                let res = ret.expect("child result");
                let out = match k {
                    Look::Ahead => {
                        let gs: IndexSet<u32> = res.into_iter().map(|(_, g)| g).collect();
                        gs.into_iter().map(|g| (f.p, g)).collect()
                    }
                    _ if res.is_empty() => vec![(f.p, f.g)],
                    _ => vec![],
                };
                Action::Return(out)
            }
            Op::Set(_) | Op::Eps | Op::Hole | Op::Backref(_) => unreachable!("leaf rules"),
        }
    }

    fn fixed_len(&self, op: u32) -> usize {
        match &self.prog.ops[op as usize] {
            Op::Set(_) | Op::Hole => 1,
            Op::Eps => 0,
            Op::Concat(a, b) => self.fixed_len(*a) + self.fixed_len(*b),
            _ => unreachable!("lookbehind bodies are fixed-length"),
        }
    }

    /// Runs a fixed-length body over `w[from..to)` from its start, counting
    /// derivation nodes.
    fn fixed_run(&mut self, op: u32, from: usize, to: usize) -> Result<bool, BudgetExhausted> {
        fn go(m: &mut Machine<'_>, op: u32, at: usize, to: usize) -> Result<Option<usize>, BudgetExhausted> {
            m.tick(1)?;
            Ok(match m.prog.ops[op as usize].clone() {
                Op::Set(c) => (at < to && c.contains(m.w[at])).then_some(at + 1),
                Op::Eps => Some(at),
                Op::Hole => None,
                Op::Concat(a, b) => match go(m, a, at, to)? {
                    Some(mid) => go(m, b, mid, to)?,
                    None => None,
                },
                _ => unreachable!("lookbehind bodies are fixed-length"),
            })
        }
        Ok(go(self, op, from, to)? == Some(to))
    }
}

fn next_item(f: &mut Frame, callee: u32) -> Action {
    if f.idx < f.items.len() {
        let (p, g) = f.items[f.idx];
        f.idx += 1;
        Action::Call(callee, p, g)
    } else {
        Action::Return(std::mem::take(&mut f.acc).into_iter().collect())
    }
}
