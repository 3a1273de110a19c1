use crate::ast::{CharSet, Kind, Look, Node};
use std::fmt;

/// An expression in which every subexpression carries a unique bracket index,
/// assigned in preorder from 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracketed {
    pub index: u32,
    pub node: BNode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BNode {
    Set(CharSet),
    Epsilon,
    Hole(u32),
    Concat(Box<Bracketed>, Box<Bracketed>),
    Union(Box<Bracketed>, Box<Bracketed>),
    Star(Box<Bracketed>),
    Capture(u32, Box<Bracketed>),
    Backref(u32),
    Look(Look, Box<Bracketed>),
}

pub fn bracket(r: &Node) -> Bracketed {
    fn go(n: &Node, next: &mut u32) -> Bracketed {
        let index = *next;
        *next += 1;
        let mut sub = |c: &Node| Box::new(go(c, next));
        let node = match &n.kind {
            Kind::Set(c) => BNode::Set(c.clone()),
            Kind::Epsilon => BNode::Epsilon,
            Kind::Hole(i) => BNode::Hole(*i),
            Kind::Concat(a, b) => {
                let a = sub(a);
                BNode::Concat(a, sub(b))
            }
            Kind::Union(a, b) => {
                let a = sub(a);
                BNode::Union(a, sub(b))
            }
            Kind::Star(a) => BNode::Star(sub(a)),
            Kind::Capture(i, a) => BNode::Capture(*i, sub(a)),
            Kind::Backref(i) => BNode::Backref(*i),
            Kind::Look(k, a) => BNode::Look(*k, sub(a)),
        };
        Bracketed { index, node }
    }
    go(r, &mut 1)
}

impl Bracketed {
    /// Drops the brackets.
    pub fn unwrap(&self) -> Node {
        match &self.node {
            BNode::Set(c) => Node::set(c.clone()),
            BNode::Epsilon => Node::eps(),
            BNode::Hole(i) => Node::hole(*i),
            BNode::Concat(a, b) => Node::concat(a.unwrap(), b.unwrap()),
            BNode::Union(a, b) => Node::union(a.unwrap(), b.unwrap()),
            BNode::Star(a) => Node::star(a.unwrap()),
            BNode::Capture(i, a) => Node::capture(*i, a.unwrap()),
            BNode::Backref(i) => Node::backref(*i),
            BNode::Look(k, a) => Node::look(*k, a.unwrap()),
        }
    }

    pub fn indexes(&self) -> Vec<u32> {
        let mut out = vec![self.index];
        match &self.node {
            BNode::Concat(a, b) | BNode::Union(a, b) => {
                out.extend(a.indexes());
                out.extend(b.indexes());
            }
            BNode::Star(a) | BNode::Capture(_, a) | BNode::Look(_, a) => out.extend(a.indexes()),
            _ => {}
        }
        out
    }
}

impl fmt::Display for Bracketed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.index)?;
        match &self.node {
            BNode::Set(_) | BNode::Epsilon | BNode::Hole(_) | BNode::Backref(_) => {
                write!(f, "{}", self.unwrap())?
            }
            BNode::Concat(a, b) => write!(f, "{a}{b}")?,
            BNode::Union(a, b) => write!(f, "({a}|{b})")?,
            BNode::Star(a) => write!(f, "({a})*")?,
            BNode::Capture(_, a) => write!(f, "({a})")?,
            BNode::Look(k, a) => write!(f, "{}{a})", k.opener())?,
        }
        write!(f, "]{}", self.index)
    }
}
