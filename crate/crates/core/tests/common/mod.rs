#![allow(dead_code)]

use proptest::prelude::*;
use remedy_core::ast::{CharSet, Look, Node};

pub const SIGMA: [char; 3] = ['a', 'b', 'c'];
pub const AB: [char; 2] = ['a', 'b'];

pub fn arb_set_over(sigma: &'static [char]) -> impl Strategy<Value = CharSet> {
    (0u32..1 << sigma.len()).prop_map(move |bits| {
        CharSet::from_chars(sigma.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &c)| c))
    })
}

pub fn arb_set() -> impl Strategy<Value = CharSet> {
    arb_set_over(&SIGMA)
}

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub sigma: &'static [char],
    pub holes: bool,
    pub stars: bool,
    pub depth: u32,
    pub size: u32,
}

impl Shape {
    pub const REGEX: Shape = Shape { sigma: &SIGMA, holes: false, stars: true, depth: 4, size: 16 };
    pub const TEMPLATE: Shape = Shape { sigma: &SIGMA, holes: true, stars: true, depth: 4, size: 16 };
}

/// Random expressions using every construct, with captures and holes
/// numbered canonically and every backreference closed.
pub fn arb_tree(shape: Shape) -> impl Strategy<Value = Node> {
    let sigma = shape.sigma;
    let hole_weight = if shape.holes { 2 } else { 0 };
    let star_weight = if shape.stars { 2 } else { 0 };
    let leaf = prop_oneof![
        4 => arb_set_over(sigma).prop_map(Node::set),
        1 => Just(Node::eps()),
        hole_weight => Just(Node::hole(0)),
    ];
    let holes = shape.holes;
    leaf.prop_recursive(shape.depth, shape.size, 2, move |inner| {
        prop_oneof![
            3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::concat(a, b)),
            2 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::union(a, b)),
            star_weight => inner.clone().prop_map(Node::star),
            1 => (10u32..10_000, inner.clone()).prop_map(|(k, a)| Node::capture(k, a)),
            1 => (10u32..10_000, inner.clone())
                .prop_map(|(k, a)| Node::concat(Node::capture(k, a), Node::backref(k))),
            1 => (0usize..2, inner.clone())
                .prop_map(|(k, a)| Node::look([Look::Ahead, Look::NegAhead][k], a)),
            1 => (0usize..2, arb_set_over(sigma), any::<bool>()).prop_map(move |(k, s, hole)| {
                let tail = if hole && holes { Node::hole(0) } else { Node::set(s.clone()) };
                Node::look([Look::Behind, Look::NegBehind][k], Node::concat(Node::set(s), tail))
            }),
        ]
    })
    .prop_map(|mut n| {
        n.renumber_captures();
        n.renumber_holes();
        n
    })
    .prop_filter("captures must be distinct and closed", |n| n.validate().is_ok())
}

/// Small hole-free expressions over `a`, `b`, `c`.
pub fn arb_regex() -> impl Strategy<Value = Node> {
    arb_tree(Shape::REGEX).prop_filter("no holes", |n| !n.has_holes())
}

/// Small templates over `a`, `b`, `c` with at most three holes.
pub fn arb_template() -> impl Strategy<Value = Node> {
    arb_tree(Shape::TEMPLATE).prop_filter("at most three holes", |n| n.hole_bound() <= 3)
}

/// Templates over `a`, `b` with at most three holes and eight nodes.
pub fn arb_small_template() -> impl Strategy<Value = Node> {
    let shape = Shape { sigma: &AB, holes: true, stars: true, depth: 3, size: 8 };
    arb_tree(shape).prop_filter("at most three holes and eight nodes", |n| n.hole_bound() <= 3 && n.size() <= 8)
}

/// Every string over `SIGMA` up to length `n`.
pub fn words(n: usize) -> Vec<String> {
    remedy_core::matcher::all_strings(&SIGMA, n)
}

/// Every way to fill the holes of `t` with one of the given sets.
pub fn fillings(t: &Node, sets: &[CharSet]) -> Vec<Node> {
    let k = t.hole_bound() as usize;
    let mut out = Vec::new();
    let total = sets.len().pow(k as u32);
    for mut code in 0..total {
        let mut choice = Vec::with_capacity(k);
        for _ in 0..k {
            choice.push(sets[code % sets.len()].clone());
            code /= sets.len();
        }
        let mut n = t.clone();
        n.preorder_mut(&mut |m| {
            if let remedy_core::ast::Kind::Hole(h) = m.kind {
                *m = Node::set(choice[h as usize].clone());
            }
        });
        out.push(n);
    }
    out
}

/// Every tree with at most `max` nodes over leaves `a`, `b`, `ε`, unary star
/// and capture, and binary concatenation and union.
pub fn small_trees(max: usize) -> Vec<Node> {
    let mut by_size: Vec<Vec<Node>> = vec![Vec::new(); max + 1];
    if max >= 1 {
        by_size[1] = vec![Node::char('a'), Node::char('b'), Node::eps()];
    }
    for s in 2..=max {
        let mut here = Vec::new();
        for t in &by_size[s - 1] {
            here.push(Node::star(t.clone()));
            here.push(Node::capture(1, t.clone()));
        }
        for l in 1..s - 1 {
            let r = s - 1 - l;
            for a in &by_size[l] {
                for b in &by_size[r] {
                    here.push(Node::concat(a.clone(), b.clone()));
                    here.push(Node::union(a.clone(), b.clone()));
                }
            }
        }
        by_size[s] = here;
    }
    by_size.into_iter().flatten().collect()
}

fn label(n: &Node) -> String {
    match &n.kind {
        remedy_core::ast::Kind::Capture(..) => "capture".into(),
        remedy_core::ast::Kind::Set(_) | remedy_core::ast::Kind::Epsilon | remedy_core::ast::Kind::Backref(_) | remedy_core::ast::Kind::Hole(_) => n.to_string(),
        k => format!("{:?}", std::mem::discriminant(k)),
    }
}

fn positions(n: &Node) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    n.preorder_paths(&mut |p, _| out.push(p.to_vec()));
    out
}

/// Minimum edit cost by brute force: try every antichain of positions of
/// `a` as the set of replaced subtrees, keep those after which `a` and `b`
/// agree everywhere else, and charge both subtree sizes per replacement.
pub fn distance_oracle(a: &Node, b: &Node) -> usize {
    let pa = positions(a);
    let mut best = usize::MAX;
    let n = pa.len();
    for mask in 0u32..1 << n {
        let chosen: Vec<&Vec<usize>> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| &pa[i]).collect();
        let antichain = chosen
            .iter()
            .all(|x| chosen.iter().all(|y| x == y || !y.starts_with(x)));
        if !antichain {
            continue;
        }
        let replaced = |p: &Vec<usize>| chosen.iter().any(|c| p.starts_with(c));
        let mut ok = true;
        let mut cost = 0;
        for p in &pa {
            if chosen.contains(&p) {
                match try_at(b, p) {
                    Some(bn) => cost += a.at(p).size() + bn.size(),
                    None => ok = false,
                }
            } else if !replaced(p) {
                let an = a.at(p);
                match try_at(b, p) {
                    Some(bn) if label(an) == label(bn) && an.children().len() == bn.children().len() => {}
                    _ => ok = false,
                }
            }
        }
        if ok {
            best = best.min(cost);
        }
    }
    best
}

fn try_at<'a>(n: &'a Node, path: &[usize]) -> Option<&'a Node> {
    let mut cur = n;
    for &i in path {
        cur = *cur.children().get(i)?;
    }
    Some(cur)
}
