use super::bracket::{BNode, Bracketed};
use crate::ast::CharSet;
use std::collections::{HashMap, VecDeque};
use std::fmt;

/// What a symbol edge can read: a concrete set or a template hole.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Set(CharSet),
    Hole(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bracket {
    Open(u32),
    Close(u32),
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bracket::Open(i) => write!(f, "[{i}"),
            Bracket::Close(i) => write!(f, "]{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Edge {
    /// A symbol gadget: one edge reading any of its labels.
    Sym(Vec<Label>),
    Bracket(Bracket),
    Eps,
}

/// Thompson-style automaton over characters, holes and brackets.
#[derive(Clone, Debug, Default)]
pub struct BracketNfa {
    pub edges: Vec<Vec<(Edge, usize)>>,
    pub initial: usize,
    pub accepting: usize,
    /// Capture index to the initial state of the group body.
    pub capture_origin: HashMap<u32, usize>,
    /// Bracket index to the source state of its opening edge.
    pub open_state: Vec<(u32, usize)>,
    capture_range: HashMap<u32, (usize, usize)>,
}

impl BracketNfa {
    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    fn add_state(&mut self) -> usize {
        self.edges.push(Vec::new());
        self.edges.len() - 1
    }

    fn add_edge(&mut self, from: usize, e: Edge, to: usize) {
        self.edges[from].push((e, to));
    }

    /// Labels of symbol edges reachable from `q` through bracket and ε
    /// edges, staying within states `lo..hi`.
    fn first_labels(&self, q: usize, lo: usize, hi: usize) -> Vec<Label> {
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::from([q]);
        seen[q] = true;
        let mut out: Vec<Label> = Vec::new();
        while let Some(s) = queue.pop_front() {
            for (e, t) in &self.edges[s] {
                if *t < lo || *t >= hi {
                    continue;
                }
                match e {
                    Edge::Sym(ls) => {
                        for l in ls {
                            if !out.contains(l) {
                                out.push(l.clone());
                            }
                        }
                    }
                    _ => {
                        if !seen[*t] {
                            seen[*t] = true;
                            queue.push_back(*t);
                        }
                    }
                }
            }
        }
        out
    }
}

/// Translates a bracketed, lookaround-free expression. Lookarounds that are
/// still present translate like ε. A backreference becomes a single edge
/// reading everything its group can begin with.
pub fn translate(b: &Bracketed) -> BracketNfa {
    let mut nfa = BracketNfa::default();
    let (s, e) = build(b, &mut nfa);
    nfa.initial = s;
    nfa.accepting = e;
    nfa
}

fn build(b: &Bracketed, nfa: &mut BracketNfa) -> (usize, usize) {
    let s = nfa.add_state();
    nfa.open_state.push((b.index, s));
    let (is, ie) = inner(&b.node, nfa);
    let e = nfa.add_state();
    nfa.add_edge(s, Edge::Bracket(Bracket::Open(b.index)), is);
    nfa.add_edge(ie, Edge::Bracket(Bracket::Close(b.index)), e);
    (s, e)
}

fn inner(n: &BNode, nfa: &mut BracketNfa) -> (usize, usize) {
    match n {
        BNode::Set(c) => symbol(nfa, (!c.is_empty()).then(|| vec![Label::Set(c.clone())])),
        BNode::Hole(i) => symbol(nfa, Some(vec![Label::Hole(*i)])),
        BNode::Epsilon | BNode::Look(..) => {
            let x = nfa.add_state();
            (x, x)
        }
        BNode::Concat(a, b) => {
            let (as_, ae) = build(a, nfa);
            let (bs, be) = build(b, nfa);
            nfa.add_edge(ae, Edge::Eps, bs);
            (as_, be)
        }
        BNode::Union(a, b) => {
            let x = nfa.add_state();
            let (as_, ae) = build(a, nfa);
            let (bs, be) = build(b, nfa);
            let y = nfa.add_state();
            nfa.add_edge(x, Edge::Eps, as_);
            nfa.add_edge(x, Edge::Eps, bs);
            nfa.add_edge(ae, Edge::Eps, y);
            nfa.add_edge(be, Edge::Eps, y);
            (x, y)
        }
        BNode::Star(a) => {
            let x = nfa.add_state();
            let (as_, ae) = build(a, nfa);
            let y = nfa.add_state();
            nfa.add_edge(x, Edge::Eps, as_);
            nfa.add_edge(x, Edge::Eps, y);
            nfa.add_edge(ae, Edge::Eps, x);
            (x, y)
        }
        BNode::Capture(i, a) => {
            let lo = nfa.num_states();
            let (as_, ae) = build(a, nfa);
            nfa.capture_origin.insert(*i, as_);
            nfa.capture_range.insert(*i, (lo, nfa.num_states()));
            (as_, ae)
        }
        BNode::Backref(i) => {
            let labels = match (nfa.capture_origin.get(i), nfa.capture_range.get(i)) {
                (Some(&q), Some(&(lo, hi))) => nfa.first_labels(q, lo, hi),
                _ => Vec::new(),
            };
            symbol(nfa, (!labels.is_empty()).then_some(labels))
        }
    }
}

fn symbol(nfa: &mut BracketNfa, labels: Option<Vec<Label>>) -> (usize, usize) {
    let x = nfa.add_state();
    let y = nfa.add_state();
    if let Some(ls) = labels {
        nfa.add_edge(x, Edge::Sym(ls), y);
    }
    (x, y)
}

/// How many bracket paths lead from a state to a gadget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PathCount {
    One,
    Many,
    Infinite,
}

/// A symbol gadget reachable from some state through bracket and ε edges.
#[derive(Clone, Debug)]
pub struct GadgetReach {
    pub source: usize,
    pub labels: Vec<Label>,
    pub count: PathCount,
}

/// Every symbol gadget reachable from `q` without reading a symbol, with the
/// number of distinct bracket paths to it. Distinct ε/bracket edge paths in
/// this automaton always spell distinct bracket strings, and any cycle on the
/// way yields infinitely many.
pub fn reach(nfa: &BracketNfa, q: usize) -> Vec<GadgetReach> {
    let n = nfa.num_states();
    let mut local = vec![usize::MAX; n];
    let mut states = Vec::new();
    let mut queue = VecDeque::from([q]);
    local[q] = 0;
    states.push(q);
    while let Some(s) = queue.pop_front() {
        for (e, t) in &nfa.edges[s] {
            if !matches!(e, Edge::Sym(_)) && local[*t] == usize::MAX {
                local[*t] = states.len();
                states.push(*t);
                queue.push_back(*t);
            }
        }
    }
    let succ: Vec<Vec<usize>> = states
        .iter()
        .map(|&s| {
            nfa.edges[s]
                .iter()
                .filter(|(e, _)| !matches!(e, Edge::Sym(_)))
                .map(|(_, t)| local[*t])
                .collect()
        })
        .collect();
    let (comp, order) = tarjan(&succ);
    let ncomp = order.len();
    let mut cyclic = vec![false; ncomp];
    let mut comp_size = vec![0usize; ncomp];
    for &c in &comp {
        comp_size[c] += 1;
    }
    for (v, ss) in succ.iter().enumerate() {
        if comp_size[comp[v]] > 1 || ss.contains(&v) {
            cyclic[comp[v]] = true;
        }
    }
    // Components in topological order, sources first.
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    for (v, &c) in comp.iter().enumerate() {
        members[c].push(v);
    }
    let mut tainted = cyclic.clone();
    let mut count = vec![0u8; states.len()];
    count[0] = 1;
    for &c in order.iter().rev() {
        for &v in &members[c] {
            for &t in &succ[v] {
                if comp[t] != c {
                    if tainted[c] {
                        tainted[comp[t]] = true;
                    }
                    count[t] = (count[t] + count[v]).min(2);
                }
            }
        }
    }
    let mut out = Vec::new();
    for (v, &s) in states.iter().enumerate() {
        for (e, _) in &nfa.edges[s] {
            if let Edge::Sym(labels) = e {
                let pc = if tainted[comp[v]] {
                    PathCount::Infinite
                } else if count[v] >= 2 {
                    PathCount::Many
                } else {
                    PathCount::One
                };
                out.push(GadgetReach {
                    source: s,
                    labels: labels.clone(),
                    count: pc,
                });
            }
        }
    }
    out
}

/// Strongly connected components. Returns the component of each vertex and
/// the components in reverse topological order.
fn tarjan(succ: &[Vec<usize>]) -> (Vec<usize>, Vec<usize>) {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut order = Vec::new();
    let mut next = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = work.last_mut() {
            if *i < succ[v].len() {
                let t = succ[v][*i];
                *i += 1;
                if index[t] == usize::MAX {
                    index[t] = next;
                    low[t] = next;
                    next += 1;
                    stack.push(t);
                    on_stack[t] = true;
                    work.push((t, 0));
                } else if on_stack[t] {
                    low[v] = low[v].min(index[t]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let c = order.len();
                    loop {
                        let x = stack.pop().expect("scc member");
                        on_stack[x] = false;
                        comp[x] = c;
                        if x == v {
                            break;
                        }
                    }
                    order.push(c);
                }
            }
        }
    }
    (comp, order)
}

/// Up to `limit` bracket strings from `q` to the gadget at `target`, using
/// only bracket and ε edges. Each path visits a state at most once.
pub fn bracket_paths(nfa: &BracketNfa, q: usize, target: usize, limit: usize) -> Vec<Vec<Bracket>> {
    let n = nfa.num_states();
    // States that can reach the target without reading a symbol.
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, es) in nfa.edges.iter().enumerate() {
        for (e, t) in es {
            if !matches!(e, Edge::Sym(_)) {
                preds[*t].push(s);
            }
        }
    }
    let mut useful = vec![false; n];
    let mut queue = VecDeque::from([target]);
    useful[target] = true;
    while let Some(s) = queue.pop_front() {
        for &p in &preds[s] {
            if !useful[p] {
                useful[p] = true;
                queue.push_back(p);
            }
        }
    }
    let mut out = Vec::new();
    let mut on_path = vec![false; n];
    let mut path = Vec::new();
    fn dfs(
        nfa: &BracketNfa,
        s: usize,
        target: usize,
        useful: &[bool],
        on_path: &mut [bool],
        path: &mut Vec<Bracket>,
        out: &mut Vec<Vec<Bracket>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if s == target {
            out.push(path.clone());
            return;
        }
        on_path[s] = true;
        for (e, t) in &nfa.edges[s] {
            if matches!(e, Edge::Sym(_)) || !useful[*t] || on_path[*t] {
                continue;
            }
            let pushed = if let Edge::Bracket(b) = e {
                path.push(*b);
                true
            } else {
                false
            };
            dfs(nfa, *t, target, useful, on_path, path, out, limit);
            if pushed {
                path.pop();
            }
        }
        on_path[s] = false;
    }
    if useful[q] {
        dfs(nfa, q, target, &useful, &mut on_path, &mut path, &mut out, limit);
    }
    out
}

/// Bracket-path prefixes and the labels they reach from `q`. Gadgets reached
/// through a cycle are reported once with `infinite` set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstEntry {
    pub path: Vec<Bracket>,
    pub labels: Vec<Label>,
    pub infinite: bool,
}

pub fn first(nfa: &BracketNfa, q: usize) -> Vec<FirstEntry> {
    let mut out = Vec::new();
    for g in reach(nfa, q) {
        let infinite = g.count == PathCount::Infinite;
        let limit = if infinite { 1 } else { usize::MAX };
        for path in bracket_paths(nfa, q, g.source, limit) {
            out.push(FirstEntry {
                path,
                labels: g.labels.clone(),
                infinite,
            });
        }
    }
    out
}

pub fn path_string(path: &[Bracket]) -> String {
    path.iter().map(|b| b.to_string()).collect()
}
