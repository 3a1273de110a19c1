//! Templates: expressions with holes. Edit distance, over- and
//! under-approximation, feasibility pruning, and the successor operators of
//! the search.

use crate::ast::{Kind, Look, Node, Span};
use crate::matcher::Matcher;
use std::mem::discriminant;

/// A search candidate and its distance from the expression being repaired.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub node: Node,
    pub cost: usize,
}

fn same_label(a: &Node, b: &Node) -> bool {
    match (&a.kind, &b.kind) {
        (Kind::Set(x), Kind::Set(y)) => x == y,
        (Kind::Backref(i), Kind::Backref(j)) => i == j,
        (Kind::Hole(i), Kind::Hole(j)) => i == j,
        (Kind::Look(k, _), Kind::Look(l, _)) => k == l,
        (x, y) => discriminant(x) == discriminant(y),
    }
}

/// Minimum total size of removed plus inserted subtrees over edits that
/// replace pairwise disjoint subtrees of `a` to obtain `b`. Capture indexes
/// are ignored; they follow from the tree shape.
pub fn distance(a: &Node, b: &Node) -> usize {
    fn go(a: &Node, b: &Node) -> (usize, usize, usize) {
        let ca = a.children();
        let cb = b.children();
        if !same_label(a, b) || ca.len() != cb.len() {
            return (a.size() + b.size(), a.size(), b.size());
        }
        let (mut inner, mut sa, mut sb) = (0, 1, 1);
        for (x, y) in ca.iter().zip(&cb) {
            let (d, xa, yb) = go(x, y);
            inner += d;
            sa += xa;
            sb += yb;
        }
        (inner.min(sa + sb), sa, sb)
    }
    go(a, b).0
}

/// Hole-free bounds on the language of every completion of a template.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxPair {
    pub over: Node,
    pub under: Node,
}

/// Over- and under-approximation. A hole becomes `.*` above and `[∅]` below;
/// negative lookarounds swap the two; lookbehinds with holes become ε above
/// and `[∅]` below. Capture groups are kept so backreferences stay bound.
pub fn approximate(t: &Node) -> ApproxPair {
    let (over, under) = approx(t);
    ApproxPair { over, under }
}

fn approx(t: &Node) -> (Node, Node) {
    let span = t.span;
    let (o, u) = match &t.kind {
        Kind::Set(_) | Kind::Epsilon | Kind::Backref(_) => (t.clone(), t.clone()),
        Kind::Hole(_) => (Node::star(Node::any()), Node::nothing()),
        Kind::Concat(a, b) => {
            let (ao, au) = approx(a);
            let (bo, bu) = approx(b);
            (Node::concat(ao, bo), Node::concat(au, bu))
        }
        Kind::Union(a, b) => {
            let (ao, au) = approx(a);
            let (bo, bu) = approx(b);
            (Node::union(ao, bo), Node::union(au, bu))
        }
        Kind::Star(a) => {
            let (ao, au) = approx(a);
            (Node::star(ao), Node::star(au))
        }
        Kind::Capture(i, a) => {
            let (ao, au) = approx(a);
            (Node::capture(*i, ao), Node::capture(*i, au))
        }
        Kind::Look(k, a) if k.is_behind() && a.has_holes() => (Node::eps(), Node::nothing()),
        Kind::Look(k, a) => {
            let (ao, au) = approx(a);
            if k.is_negative() {
                (Node::look(*k, au), Node::look(*k, ao))
            } else {
                (Node::look(*k, ao), Node::look(*k, au))
            }
        }
    };
    (o.with_span(span), u.with_span(span))
}

/// Whether some completion of `t` could be consistent with the examples:
/// every positive is accepted by the over-approximation and no negative by
/// the under-approximation. Matcher budget exhaustion never prunes.
pub fn feasible(t: &Node, pos: &[String], neg: &[String]) -> bool {
    let ApproxPair { over, under } = approximate(t);
    let over = Matcher::new(&over);
    if pos.iter().any(|w| over.accepts(w) == Ok(false)) {
        return false;
    }
    let under = Matcher::new(&under);
    !neg.iter().any(|w| under.accepts(w) == Ok(true))
}

/// Canonical form: captures numbered 1.. and holes 0.. in preorder.
pub fn canonical(mut n: Node) -> Node {
    n.renumber_captures();
    n.renumber_holes();
    n
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Context {
    Plain,
    Lookahead,
    Lookbehind,
}

/// Paths to every hole with its context and the capture indexes closed
/// before it in preorder.
fn hole_sites(t: &Node) -> Vec<(Vec<usize>, Context, Vec<u32>)> {
    fn go(
        n: &Node,
        ctx: Context,
        path: &mut Vec<usize>,
        closed: &mut Vec<u32>,
        out: &mut Vec<(Vec<usize>, Context, Vec<u32>)>,
    ) {
        match &n.kind {
            Kind::Hole(_) => out.push((path.clone(), ctx, closed.clone())),
            Kind::Capture(i, b) => {
                path.push(0);
                go(b, ctx, path, closed, out);
                path.pop();
                closed.push(*i);
            }
            Kind::Look(k, b) => {
                let inner = if k.is_behind() {
                    Context::Lookbehind
                } else if ctx == Context::Lookbehind {
                    ctx
                } else {
                    Context::Lookahead
                };
                path.push(0);
                go(b, inner, path, closed, out);
                path.pop();
            }
            _ => {
                for (i, c) in n.children().into_iter().enumerate() {
                    path.push(i);
                    go(c, ctx, path, closed, out);
                    path.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(t, Context::Plain, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

/// Successors replacing one hole by one production of the template grammar.
/// Repetitions are not introduced inside lookarounds, and inside lookbehinds
/// only `□□` and `ε` keep the body fixed-length. `(?:□)` is the hole itself
/// and is not generated.
pub fn expand_holes(t: &Node) -> Vec<Node> {
    let fresh_cap = t.max_capture() + 1;
    let mut out = Vec::new();
    for (path, ctx, closed) in hole_sites(t) {
        let h = || Node::hole(u32::MAX);
        let mut prods = vec![Node::concat(h(), h())];
        if ctx != Context::Lookbehind {
            prods.push(Node::union(h(), h()));
            if ctx == Context::Plain {
                prods.push(Node::star(h()));
            }
            prods.push(Node::capture(fresh_cap, h()));
            prods.extend(closed.iter().map(|&i| Node::backref(i)));
            for k in [Look::Ahead, Look::NegAhead, Look::Behind, Look::NegBehind] {
                prods.push(Node::look(k, h()));
            }
        }
        prods.push(Node::eps());
        for p in prods {
            out.push(canonical(t.replaced(&path, p)));
        }
    }
    out
}

/// Successors replacing a character set, or a node all of whose children are
/// holes, by a single hole. `allowed` restricts which nodes may be replaced.
pub fn add_holes(t: &Node, allowed: &dyn Fn(&Node) -> bool) -> Vec<Node> {
    let mut paths = Vec::new();
    t.preorder_paths(&mut |path, n| {
        let collapsible = match &n.kind {
            Kind::Hole(_) => false,
            Kind::Set(_) => true,
            _ => n.children().iter().all(|c| matches!(c.kind, Kind::Hole(_))),
        };
        if collapsible && allowed(n) {
            paths.push(path.to_vec());
        }
    });
    paths
        .into_iter()
        .map(|p| canonical(t.replaced(&p, Node::hole(u32::MAX))))
        .filter(|n| n.validate().is_ok())
        .collect()
}

/// Whether `span` lies within one of `regions`.
pub fn within(span: Option<Span>, regions: &[Span]) -> bool {
    match span {
        None => true,
        Some(s) => regions.iter().any(|r| r.start <= s.start && s.end <= r.end),
    }
}
