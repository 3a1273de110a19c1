//! Best-first search over templates for a linear-time expression consistent
//! with the examples.

use crate::ast::{Kind, Node, RelevantAlphabet, Span};
use crate::constraint::{
    consistency_constraint, instantiate, ltp_constraint, num_vars, solve, Formulas, SolverChoice,
    DEFAULT_STATE_BUDGET,
};
use crate::examples::{widen_char_sets, ExampleError, ExampleSet};
use crate::ltp::check_ltp;
use crate::matcher::Matcher;
use crate::template::{add_holes, canonical, distance, expand_holes, feasible, within};
use remedy_sat::SolveError;
use serde::Serialize;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::time::{Duration, Instant};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairConfig {
    pub timeout: Duration,
    /// Largest template size explored.
    pub max_template_nodes: usize,
    /// Largest number of queued templates.
    pub max_queue: usize,
    /// Examples sampled per side when none are supplied.
    pub example_count: usize,
    pub widen: bool,
    pub localize: bool,
    pub seed: u64,
    pub solver: SolverChoice,
    /// Cap on symbolic matching states per example.
    pub state_budget: usize,
}

impl Default for RepairConfig {
    fn default() -> Self {
        RepairConfig {
            timeout: Duration::from_secs(30),
            max_template_nodes: 512,
            max_queue: 200_000,
            example_count: crate::examples::DEFAULT_EXAMPLE_COUNT,
            widen: false,
            localize: false,
            seed: 0,
            solver: SolverChoice::Internal,
            state_budget: DEFAULT_STATE_BUDGET,
        }
    }
}

impl RepairConfig {
    pub fn validate(&self) -> Result<(), RepairError> {
        let bounds = [
            ("timeout", self.timeout.is_zero()),
            ("max_template_nodes", self.max_template_nodes == 0),
            ("max_queue", self.max_queue == 0),
            ("example_count", self.example_count == 0),
            ("state_budget", self.state_budget == 0),
        ];
        match bounds.iter().find(|(_, zero)| *zero) {
            Some((name, _)) => Err(RepairError::Config(format!("{name} must be positive"))),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairStatus {
    Repaired,
    AlreadyLtp,
    Timeout,
    Infeasible,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RepairStats {
    pub templates_popped: u64,
    pub templates_pruned: u64,
    pub solver_calls: u64,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairResult {
    pub status: RepairStatus,
    pub output: Option<Node>,
    /// Distance from the input to the output.
    pub cost: Option<usize>,
    /// The template the output was instantiated from.
    pub template: Option<Node>,
    pub stats: RepairStats,
}

#[derive(Debug, thiserror::Error)]
pub enum RepairError {
    #[error("invalid examples: {0}")]
    InvalidExamples(#[from] ExampleError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(#[from] SolveError),
}

/// Minimal subtrees violating the linear-time property: each fails the check
/// while all of its children pass. Subtrees with backreferences to groups
/// outside them are not analysed on their own.
pub fn localize(r: &Node) -> Vec<(Span, Node)> {
    fn go(n: &Node, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, Node)>) -> bool {
        let mut child_fails = false;
        for (i, c) in n.children().into_iter().enumerate() {
            path.push(i);
            child_fails |= go(c, path, out);
            path.pop();
        }
        if child_fails {
            return true;
        }
        let closed = n.validate().is_ok();
        let fails = closed && !check_ltp(n).satisfies;
        if fails {
            out.push((path.clone(), n.clone()));
        }
        fails
    }
    let mut found = Vec::new();
    go(r, &mut Vec::new(), &mut found);
    found
        .into_iter()
        .filter_map(|(_, n)| n.span.map(|s| (s, n)))
        .collect()
}

fn flagged_paths(r: &Node) -> Vec<Vec<usize>> {
    let regions: Vec<Span> = localize(r).into_iter().map(|(s, _)| s).collect();
    let mut paths = Vec::new();
    r.preorder_paths(&mut |path, n| {
        let inside_earlier = paths.iter().any(|p: &Vec<usize>| path.starts_with(p));
        if !inside_earlier && n.span.is_some_and(|s| regions.contains(&s)) {
            paths.push(path.to_vec());
        }
    });
    paths
}

fn consistent(r: &Node, ex: &ExampleSet) -> bool {
    let m = Matcher::new(r);
    ex.positives.iter().all(|w| m.accepts(w) == Ok(true))
        && ex.negatives.iter().all(|w| m.accepts(w) == Ok(false))
}

fn sound(r: &Node, ex: &ExampleSet) -> bool {
    consistent(r, ex) && check_ltp(r).satisfies
}

/// Removes `[∅]*`, `(?:)` in concatenations, and `[∅]` alternatives, and
/// collapses capture-free concatenations containing `[∅]`. Each rewrite
/// preserves every matching result.
pub fn simplify(r: &Node) -> Node {
    let span = r.span;
    let kids: Vec<Node> = r.children().into_iter().map(simplify).collect();
    let is_nothing = |n: &Node| matches!(&n.kind, Kind::Set(c) if c.is_empty());
    let is_eps = |n: &Node| matches!(n.kind, Kind::Epsilon);
    let out = match (&r.kind, kids.as_slice()) {
        (Kind::Star(_), [b]) if is_nothing(b) || is_eps(b) => Node::eps(),
        (Kind::Star(_), [b]) => Node::star(b.clone()),
        (Kind::Concat(..), [a, b]) if (is_nothing(a) || is_nothing(b)) && a.captures().is_empty() && b.captures().is_empty() => {
            Node::nothing()
        }
        (Kind::Concat(..), [a, b]) if is_eps(a) => b.clone(),
        (Kind::Concat(..), [a, b]) if is_eps(b) => a.clone(),
        (Kind::Concat(..), [a, b]) => Node::concat(a.clone(), b.clone()),
        (Kind::Union(..), [a, b]) if is_nothing(a) => b.clone(),
        (Kind::Union(..), [a, b]) if is_nothing(b) => a.clone(),
        (Kind::Union(..), [a, b]) => Node::union(a.clone(), b.clone()),
        (Kind::Capture(i, _), [b]) => Node::capture(*i, b.clone()),
        (Kind::Look(k, _), [b]) => Node::look(*k, b.clone()),
        _ => return r.clone(),
    };
    out.with_span(span)
}

struct Search<'a> {
    input: &'a Node,
    ex: &'a ExampleSet,
    cfg: &'a RepairConfig,
    alphabet: RelevantAlphabet,
    queue: BinaryHeap<Reverse<(usize, u64)>>,
    items: std::collections::HashMap<u64, Node>,
    seen: HashSet<String>,
    seq: u64,
    regions: Option<Vec<Span>>,
    stats: RepairStats,
}

impl Search<'_> {
    fn push(&mut self, t: Node, parent_cost: usize) {
        if t.size() > self.cfg.max_template_nodes || self.items.len() >= self.cfg.max_queue {
            return;
        }
        if !self.seen.insert(t.to_string()) {
            return;
        }
        let cost = parent_cost.max(distance(self.input, &t));
        self.seq += 1;
        self.queue.push(Reverse((cost, self.seq)));
        self.items.insert(self.seq, t);
    }

    fn finish(&self, output: &Node, template: &Node) -> RepairResult {
        let mut out = output.clone();
        if self.cfg.widen {
            out = widen_char_sets(&out, &self.ex.positives, &self.ex.negatives, &self.alphabet);
        }
        let simple = simplify(&out);
        if sound(&simple, self.ex) {
            out = simple;
        }
        RepairResult {
            status: RepairStatus::Repaired,
            cost: Some(distance(self.input, &out)),
            output: Some(out),
            template: Some(template.clone()),
            stats: self.stats.clone(),
        }
    }

    fn run(&mut self, start: Instant) -> Result<RepairResult, RepairError> {
        let mut solver = self.cfg.solver.build();
        while let Some(Reverse((cost, id))) = self.queue.pop() {
            self.stats.elapsed_ms = start.elapsed().as_millis() as u64;
            if start.elapsed() > self.cfg.timeout {
                return Ok(self.stopped(RepairStatus::Timeout));
            }
            let t = self.items.remove(&id).expect("queued");
            self.stats.templates_popped += 1;
            let (pos, neg) = (&self.ex.positives, &self.ex.negatives);
            let ok = feasible(&t, pos, neg);
            if ok {
                if !t.has_holes() {
                    if sound(&t, self.ex) {
                        return Ok(self.finish(&t, &t));
                    }
                } else {
                    let mut f = Formulas::new();
                    let phi = consistency_constraint(&t, pos, neg, &self.alphabet, &mut f, self.cfg.state_budget)
                        .ok()
                        .filter(|&c| c != Formulas::FALSE)
                        .and_then(|c| ltp_constraint(&t, &self.alphabet, &mut f).ok().map(|l| f.and(c, l)));
                    if let Some(phi) = phi {
                        self.stats.solver_calls += 1;
                        if let Some(x) = solve(&f, phi, num_vars(&t, &self.alphabet), solver.as_mut())? {
                            let candidate = instantiate(&t, &x, &self.alphabet);
                            if sound(&candidate, self.ex) {
                                self.stats.elapsed_ms = start.elapsed().as_millis() as u64;
                                return Ok(self.finish(&candidate, &t));
                            }
                        }
                    }
                }
                for s in expand_holes(&t) {
                    self.push(s, cost);
                }
            } else {
                self.stats.templates_pruned += 1;
            }
            let regions = self.regions.clone();
            let allowed = |n: &Node| match &regions {
                None => true,
                Some(rs) => within(n.span, rs),
            };
            for s in add_holes(&t, &allowed) {
                self.push(s, cost);
            }
        }
        Ok(self.stopped(RepairStatus::Infeasible))
    }

    fn stopped(&self, status: RepairStatus) -> RepairResult {
        RepairResult {
            status,
            output: None,
            cost: None,
            template: None,
            stats: self.stats.clone(),
        }
    }
}

const SEARCH_STACK: usize = 512 << 20;

/// Searches for an expression with the linear-time property that accepts
/// every positive and rejects every negative example, preferring ones close
/// to `r`.
pub fn repair(r: &Node, ex: &ExampleSet, cfg: &RepairConfig) -> Result<RepairResult, RepairError> {
    cfg.validate()?;
    let ex = ExampleSet::new(r, ex.positives.clone(), ex.negatives.clone())?;
    let start = Instant::now();
    if check_ltp(r).satisfies {
        return Ok(RepairResult {
            status: RepairStatus::AlreadyLtp,
            output: Some(r.clone()),
            cost: Some(0),
            template: None,
            stats: RepairStats {
                elapsed_ms: start.elapsed().as_millis() as u64,
                ..Default::default()
            },
        });
    }
    let r = r.clone();
    let cfg = cfg.clone();
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(SEARCH_STACK)
            .spawn_scoped(scope, || {
                let mut search = Search {
                    input: &r,
                    ex: &ex,
                    cfg: &cfg,
                    alphabet: RelevantAlphabet::new(&r, ex.all()),
                    queue: BinaryHeap::new(),
                    items: Default::default(),
                    seen: HashSet::new(),
                    seq: 0,
                    regions: None,
                    stats: RepairStats::default(),
                };
                if cfg.localize {
                    let flagged = flagged_paths(&r);
                    search.regions = Some(flagged.iter().filter_map(|p| r.at(p).span).collect());
                    let mut seed = r.clone();
                    for p in &flagged {
                        seed = seed.replaced(p, Node::hole(u32::MAX));
                    }
                    search.push(canonical(seed), 0);
                } else {
                    search.push(r.clone(), 0);
                }
                search.run(start)
            })
            .expect("search thread starts")
            .join()
            .expect("search thread completes")
    })
}
