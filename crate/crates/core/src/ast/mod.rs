//! Syntax trees for real-world regular expressions and templates.

mod alphabet;
mod charset;
mod parse;
pub(crate) mod print;

pub use alphabet::RelevantAlphabet;
pub use charset::CharSet;
pub use parse::{parse, ParseError};

use std::fmt;
use std::hash::{Hash, Hasher};

/// Byte range in the source text a node was parsed from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, serde::Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Look {
    Ahead,
    NegAhead,
    Behind,
    NegBehind,
}

impl Look {
    pub fn is_negative(self) -> bool {
        matches!(self, Look::NegAhead | Look::NegBehind)
    }

    pub fn is_behind(self) -> bool {
        matches!(self, Look::Behind | Look::NegBehind)
    }

    pub(crate) fn opener(self) -> &'static str {
        match self {
            Look::Ahead => "(?=",
            Look::NegAhead => "(?!",
            Look::Behind => "(?<=",
            Look::NegBehind => "(?<!",
        }
    }
}

/// A node of a regular expression or template. Equality and hashing ignore
/// the source span.
#[derive(Clone)]
pub struct Node {
    pub kind: Kind,
    pub span: Option<Span>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Set(CharSet),
    Epsilon,
    Concat(Box<Node>, Box<Node>),
    Union(Box<Node>, Box<Node>),
    Star(Box<Node>),
    Capture(u32, Box<Node>),
    Backref(u32),
    Look(Look, Box<Node>),
    Hole(u32),
}

impl PartialEq for Node {
    fn eq(&self, other: &Node) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Node {}

impl Hash for Node {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state)
    }
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print::to_string(self))
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::to_string(self))
    }
}

impl From<Kind> for Node {
    fn from(kind: Kind) -> Node {
        Node { kind, span: None }
    }
}

/// Problems with capture or lookbehind structure.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("duplicate capture index {0}")]
    DuplicateCapture(u32),
    #[error("backreference \\{0} has no capturing group")]
    MissingGroup(u32),
    #[error("backreference \\{0} occurs before its group closes")]
    ForwardReference(u32),
    #[error("lookbehind body is not fixed-length")]
    VariableLookbehind,
}

impl Node {
    pub fn set(c: CharSet) -> Node {
        Kind::Set(c).into()
    }

    pub fn char(c: char) -> Node {
        Node::set(CharSet::single(c))
    }

    pub fn any() -> Node {
        Node::set(CharSet::full())
    }

    pub fn nothing() -> Node {
        Node::set(CharSet::empty())
    }

    pub fn eps() -> Node {
        Kind::Epsilon.into()
    }

    pub fn concat(a: Node, b: Node) -> Node {
        Kind::Concat(Box::new(a), Box::new(b)).into()
    }

    pub fn union(a: Node, b: Node) -> Node {
        Kind::Union(Box::new(a), Box::new(b)).into()
    }

    pub fn star(a: Node) -> Node {
        Kind::Star(Box::new(a)).into()
    }

    pub fn capture(i: u32, a: Node) -> Node {
        Kind::Capture(i, Box::new(a)).into()
    }

    pub fn backref(i: u32) -> Node {
        Kind::Backref(i).into()
    }

    pub fn look(k: Look, a: Node) -> Node {
        Kind::Look(k, Box::new(a)).into()
    }

    pub fn hole(i: u32) -> Node {
        Kind::Hole(i).into()
    }

    /// Left-associated concatenation; empty input gives ε.
    pub fn concat_all(items: impl IntoIterator<Item = Node>) -> Node {
        items
            .into_iter()
            .reduce(Node::concat)
            .unwrap_or_else(Node::eps)
    }

    /// Literal string as a left-associated concatenation of singletons.
    pub fn literal(s: &str) -> Node {
        Node::concat_all(s.chars().map(Node::char))
    }

    pub fn with_span(mut self, span: Option<Span>) -> Node {
        self.span = span;
        self
    }

    pub fn children(&self) -> Vec<&Node> {
        match &self.kind {
            Kind::Set(_) | Kind::Epsilon | Kind::Backref(_) | Kind::Hole(_) => vec![],
            Kind::Concat(a, b) | Kind::Union(a, b) => vec![a, b],
            Kind::Star(a) | Kind::Capture(_, a) | Kind::Look(_, a) => vec![a],
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Node> {
        match &mut self.kind {
            Kind::Set(_) | Kind::Epsilon | Kind::Backref(_) | Kind::Hole(_) => vec![],
            Kind::Concat(a, b) | Kind::Union(a, b) => vec![a, b],
            Kind::Star(a) | Kind::Capture(_, a) | Kind::Look(_, a) => vec![a],
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Visits nodes in preorder.
    pub fn preorder<'a>(&'a self, f: &mut impl FnMut(&'a Node)) {
        f(self);
        for c in self.children() {
            c.preorder(f);
        }
    }

    /// Visits nodes in preorder with their child-index paths.
    pub fn preorder_paths<'a>(&'a self, f: &mut impl FnMut(&[usize], &'a Node)) {
        fn go<'a>(n: &'a Node, path: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &'a Node)) {
            f(path, n);
            for (i, c) in n.children().into_iter().enumerate() {
                path.push(i);
                go(c, path, f);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), f)
    }

    pub fn preorder_mut(&mut self, f: &mut impl FnMut(&mut Node)) {
        f(self);
        for c in self.children_mut() {
            c.preorder_mut(f);
        }
    }

    pub fn at(&self, path: &[usize]) -> &Node {
        path.iter().fold(self, |n, &i| n.children()[i])
    }

    pub fn at_mut(&mut self, path: &[usize]) -> &mut Node {
        let mut n = self;
        for &i in path {
            n = n.children_mut().into_iter().nth(i).expect("valid path");
        }
        n
    }

    /// Copy with the subtree at `path` replaced.
    pub fn replaced(&self, path: &[usize], with: Node) -> Node {
        let mut out = self.clone();
        *out.at_mut(path) = with;
        out
    }

    pub fn any_node(&self, pred: &impl Fn(&Node) -> bool) -> bool {
        pred(self) || self.children().iter().any(|c| c.any_node(pred))
    }

    pub fn has_holes(&self) -> bool {
        self.any_node(&|n| matches!(n.kind, Kind::Hole(_)))
    }

    pub fn has_star(&self) -> bool {
        self.any_node(&|n| matches!(n.kind, Kind::Star(_)))
    }

    pub fn has_lookaround(&self) -> bool {
        self.any_node(&|n| matches!(n.kind, Kind::Look(..)))
    }

    /// Hole indexes in preorder.
    pub fn holes(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.preorder(&mut |n| {
            if let Kind::Hole(i) = n.kind {
                out.push(i)
            }
        });
        out
    }

    /// One past the largest hole index, or 0.
    pub fn hole_bound(&self) -> u32 {
        self.holes().into_iter().map(|i| i + 1).max().unwrap_or(0)
    }

    /// Capture indexes in preorder.
    pub fn captures(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.preorder(&mut |n| {
            if let Kind::Capture(i, _) = n.kind {
                out.push(i)
            }
        });
        out
    }

    pub fn max_capture(&self) -> u32 {
        self.captures().into_iter().max().unwrap_or(0)
    }

    /// Whether some lookaround body contains a repetition.
    pub fn star_in_lookaround(&self) -> bool {
        self.any_node(&|n| matches!(&n.kind, Kind::Look(_, b) if b.has_star()))
    }

    /// Number of characters consumed, when every match consumes the same amount.
    /// Only sets, holes, ε and concatenations qualify.
    pub fn fixed_length(&self) -> Option<usize> {
        match &self.kind {
            Kind::Set(_) | Kind::Hole(_) => Some(1),
            Kind::Epsilon => Some(0),
            Kind::Concat(a, b) => Some(a.fixed_length()? + b.fixed_length()?),
            _ => None,
        }
    }

    /// Adds `k` to every capture and backreference index.
    pub fn shift_captures(&mut self, k: u32) {
        self.preorder_mut(&mut |n| match &mut n.kind {
            Kind::Capture(i, _) | Kind::Backref(i) => *i += k,
            _ => {}
        });
    }

    /// Renumbers captures 1.. in preorder. A backreference follows the first
    /// capture that carried its old index.
    pub fn renumber_captures(&mut self) {
        let mut map = std::collections::HashMap::new();
        let mut next = 1;
        self.preorder_mut(&mut |n| {
            if let Kind::Capture(i, _) = &mut n.kind {
                map.entry(*i).or_insert(next);
                *i = next;
                next += 1;
            }
        });
        self.preorder_mut(&mut |n| {
            if let Kind::Backref(i) = &mut n.kind {
                if let Some(&j) = map.get(i) {
                    *i = j;
                }
            }
        });
    }

    /// Renumbers holes 0.. in preorder.
    pub fn renumber_holes(&mut self) {
        let mut next = 0;
        self.preorder_mut(&mut |n| {
            if let Kind::Hole(i) = &mut n.kind {
                *i = next;
                next += 1;
            }
        });
    }

    /// Checks capture distinctness, backreference targets, and lookbehind shape.
    pub fn validate(&self) -> Result<(), StructureError> {
        let caps = self.captures();
        let mut seen = std::collections::HashSet::new();
        for &c in &caps {
            if !seen.insert(c) {
                return Err(StructureError::DuplicateCapture(c));
            }
        }
        fn go(
            n: &Node,
            all: &std::collections::HashSet<u32>,
            done: &mut std::collections::HashSet<u32>,
        ) -> Result<(), StructureError> {
            match &n.kind {
                Kind::Backref(i) => {
                    if !all.contains(i) {
                        return Err(StructureError::MissingGroup(*i));
                    }
                    if !done.contains(i) {
                        return Err(StructureError::ForwardReference(*i));
                    }
                }
                Kind::Capture(i, b) => {
                    go(b, all, done)?;
                    done.insert(*i);
                }
                Kind::Look(k, b) if k.is_behind() => {
                    if b.fixed_length().is_none() {
                        return Err(StructureError::VariableLookbehind);
                    }
                }
                _ => {
                    for c in n.children() {
                        go(c, all, done)?;
                    }
                }
            }
            Ok(())
        }
        go(self, &seen, &mut std::collections::HashSet::new())
    }

    /// Every character set occurring in the tree.
    pub fn charsets(&self) -> Vec<&CharSet> {
        let mut out = Vec::new();
        self.preorder(&mut |n| {
            if let Kind::Set(c) = &n.kind {
                out.push(c)
            }
        });
        out
    }
}

/// Concatenates two expressions, shifting the second one's capture indexes
/// past the first one's so that indexes stay distinct.
pub fn renumber_concat(r1: Node, mut r2: Node) -> Node {
    r2.shift_captures(r1.max_capture());
    Node::concat(r1, r2)
}

/// Replaces every lookaround with ε.
pub fn remove_lookarounds(r: &Node) -> Node {
    match &r.kind {
        Kind::Look(..) => Node::eps().with_span(r.span),
        _ => {
            let mut out = r.clone();
            for c in out.children_mut() {
                *c = remove_lookarounds(c);
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renumber_concat_examples() {
        let r1 = parse(r"(a)\1(b)\2").unwrap();
        let r2 = parse(r"(c)\1").unwrap();
        assert_eq!(renumber_concat(r1, r2).to_string(), r"(a)\1(b)\2(?:(c)\3)");
        let r1 = parse("(x)").unwrap();
        let r2 = parse("(y)(z)").unwrap();
        let joined = renumber_concat(r1, r2);
        assert_eq!(joined.captures(), vec![1, 2, 3]);
        assert!(joined.validate().is_ok());
        let plain = renumber_concat(parse("ab").unwrap(), parse(r"(c)\1").unwrap());
        assert_eq!(plain.captures(), vec![1]);
    }

    #[test]
    fn lookaround_removal() {
        let r = parse("((?=a)*)*").unwrap();
        assert_eq!(remove_lookarounds(&r), Node::star(Node::capture(1, Node::star(Node::eps()))));
        let r = parse(r"(?!x)(a)\1").unwrap();
        assert_eq!(remove_lookarounds(&r).to_string(), r"(?:)(a)\1");
        let r = parse("abc").unwrap();
        assert_eq!(remove_lookarounds(&r), r);
    }

    #[test]
    fn size_counts_nodes() {
        assert_eq!(parse("a|b|c").unwrap().size(), 5);
        assert_eq!(parse("d|c").unwrap().size(), 3);
    }
}
