use super::{CharSet, Kind, Look, Node, Span, StructureError};

/// Largest bound accepted in `{i,j}`.
const MAX_REPEAT: u32 = 255;

/// Copies made while desugaring take indexes from here until renumbering, so
/// they never collide with group numbers written in the source.
const FRESH_BASE: u32 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{message} at byte {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        offset,
        message: message.into(),
    })
}

/// Parses the concrete syntax into a desugared tree.
///
/// `r?`, `r+` and `r{i,j}` are expanded; captures are numbered 1.. in preorder
/// of the result; `(?:...)` only groups. Holes are written `□k`.
pub fn parse(text: &str) -> Result<Node, ParseError> {
    let mut p = Parser {
        src: text,
        pos: 0,
        next_group: 1,
        next_fresh: FRESH_BASE,
    };
    let node = p.alternation()?;
    if p.pos < text.len() {
        return err(p.pos, "unmatched ')'");
    }
    let mut node = node;
    node.renumber_captures();
    node.validate().map_err(|e| {
        let offset = match e {
            StructureError::MissingGroup(_) | StructureError::ForwardReference(_) => {
                first_backref_offset(&node, &e)
            }
            _ => 0,
        };
        ParseError {
            offset,
            message: e.to_string(),
        }
    })?;
    Ok(node)
}

fn first_backref_offset(node: &Node, e: &StructureError) -> usize {
    let target = match e {
        StructureError::MissingGroup(i) | StructureError::ForwardReference(i) => *i,
        _ => return 0,
    };
    let mut found = 0;
    node.preorder(&mut |n| {
        if n.kind == Kind::Backref(target) && found == 0 {
            found = n.span.map_or(0, |s| s.start);
        }
    });
    found
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    next_group: u32,
    next_fresh: u32,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn span(&self, start: usize) -> Option<Span> {
        Some(Span {
            start,
            end: self.pos,
        })
    }

    fn alternation(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        let mut node = self.concatenation()?;
        while self.eat("|") {
            let rhs = self.concatenation()?;
            node = Node::union(node, rhs).with_span(self.span(start));
        }
        Ok(node)
    }

    fn concatenation(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        let mut node: Option<Node> = None;
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            let item = self.repetition()?;
            node = Some(match node {
                None => item,
                Some(prev) => Node::concat(prev, item).with_span(self.span(start)),
            });
        }
        Ok(node.unwrap_or_else(|| Node::eps().with_span(self.span(start))))
    }

    fn repetition(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        let mut node = self.atom()?;
        loop {
            let op = self.pos;
            match self.peek() {
                Some('*') => {
                    self.bump();
                    node = Node::star(node).with_span(self.span(start));
                }
                Some('+') => {
                    self.bump();
                    let copy = self.fresh_copy(&node);
                    node = Node::concat(node, Node::star(copy).with_span(self.span(start)))
                        .with_span(self.span(start));
                }
                Some('?') => {
                    self.bump();
                    node = Node::union(node, Node::eps().with_span(self.span(op)))
                        .with_span(self.span(start));
                }
                Some('{') => {
                    let (lo, hi) = self.bounds()?;
                    node = self.expand_bounds(node, lo, hi, self.span(start));
                }
                _ => break,
            }
            let _ = op;
        }
        Ok(node)
    }

    fn number(&mut self) -> Option<u32> {
        let start = self.pos;
        while matches!(self.peek(), Some('0'..='9')) {
            self.bump();
        }
        self.src[start..self.pos].parse().ok()
    }

    fn bounds(&mut self) -> Result<(u32, u32), ParseError> {
        let open = self.pos;
        self.bump();
        let Some(lo) = self.number() else {
            return err(open, "expected repetition bound");
        };
        let hi = if self.eat(",") {
            match self.number() {
                Some(hi) => hi,
                None => return err(self.pos, "unbounded {i,} repetition is not supported; use *"),
            }
        } else {
            lo
        };
        if !self.eat("}") {
            return err(self.pos, "expected '}'");
        }
        if lo > hi {
            return err(open, "repetition bounds out of order");
        }
        if hi > MAX_REPEAT {
            return err(open, format!("repetition bound exceeds {MAX_REPEAT}"));
        }
        Ok((lo, hi))
    }

    /// `r{i,j}` as `r...r` (i copies) followed by `j-i` copies of `r|ε`.
    fn expand_bounds(&mut self, node: Node, lo: u32, hi: u32, span: Option<Span>) -> Node {
        let mut parts = Vec::new();
        for k in 0..hi {
            let copy = if k == 0 {
                node.clone()
            } else {
                self.fresh_copy(&node)
            };
            if k < lo {
                parts.push(copy);
            } else {
                parts.push(Node::union(copy, Node::eps().with_span(span)).with_span(span));
            }
        }
        let mut out = Node::concat_all(parts);
        out.preorder_mut(&mut |n| {
            if n.span.is_none() {
                n.span = span;
            }
        });
        out.with_span(span)
    }

    /// Duplicate whose captures get fresh indexes; backreferences inside the
    /// copy that point into it follow along.
    fn fresh_copy(&mut self, node: &Node) -> Node {
        let mut map = std::collections::HashMap::new();
        let mut out = node.clone();
        out.preorder_mut(&mut |n| {
            if let Kind::Capture(i, _) = &mut n.kind {
                map.insert(*i, self.next_fresh);
                *i = self.next_fresh;
                self.next_fresh += 1;
            }
        });
        out.preorder_mut(&mut |n| {
            if let Kind::Backref(i) = &mut n.kind {
                if let Some(&j) = map.get(i) {
                    *i = j;
                }
            }
        });
        out
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        let Some(c) = self.bump() else {
            return err(start, "unexpected end of pattern");
        };
        let node = match c {
            '(' => return self.group(start),
            '[' => Node::set(self.class(start)?),
            '.' => Node::any(),
            '\\' => self.escape(start)?,
            '□' => match self.number() {
                Some(i) => Node::hole(i),
                None => return err(self.pos, "expected hole index after '□'"),
            },
            '*' | '+' | '?' | '{' => return err(start, "nothing to repeat"),
            '^' | '$' => return err(start, "anchors are not supported"),
            c => Node::char(c),
        };
        Ok(node.with_span(self.span(start)))
    }

    fn group(&mut self, start: usize) -> Result<Node, ParseError> {
        let kind = if self.eat("?:") {
            None
        } else if self.eat("?=") {
            Some(Look::Ahead)
        } else if self.eat("?!") {
            Some(Look::NegAhead)
        } else if self.eat("?<=") {
            Some(Look::Behind)
        } else if self.eat("?<!") {
            Some(Look::NegBehind)
        } else if self.peek() == Some('?') {
            return err(self.pos, "unsupported group syntax");
        } else {
            let index = self.next_group;
            self.next_group += 1;
            let body = self.alternation()?;
            self.close(start)?;
            return Ok(Node::capture(index, body).with_span(self.span(start)));
        };
        let body = self.alternation()?;
        self.close(start)?;
        let span = self.span(start);
        match kind {
            None => Ok(body.with_span(span)),
            Some(look) => {
                if look.is_behind() {
                    if body.has_star() {
                        return err(start, "repetition inside lookbehind");
                    }
                    if body.fixed_length().is_none() {
                        return err(start, "lookbehind body must be fixed-length");
                    }
                }
                Ok(Node::look(look, body).with_span(span))
            }
        }
    }

    fn close(&mut self, open: usize) -> Result<(), ParseError> {
        if self.eat(")") {
            Ok(())
        } else {
            err(open, "unclosed group")
        }
    }

    fn escape(&mut self, start: usize) -> Result<Node, ParseError> {
        match self.peek() {
            Some('1'..='9') => {
                let i = self.number().expect("digits");
                Ok(Node::backref(i))
            }
            _ => Ok(Node::set(self.escape_set(start)?)),
        }
    }

    /// Escape after a consumed backslash that denotes a set of characters.
    fn escape_set(&mut self, start: usize) -> Result<CharSet, ParseError> {
        let Some(c) = self.bump() else {
            return err(start, "trailing backslash");
        };
        let set = match c {
            'n' => CharSet::single('\n'),
            't' => CharSet::single('\t'),
            'r' => CharSet::single('\r'),
            'd' => digit(),
            'w' => word(),
            's' => space(),
            'D' => digit().complement(),
            'W' => word().complement(),
            'S' => space().complement(),
            'x' => CharSet::single(self.hex_escape(start, 2)?),
            'u' => {
                if !self.eat("{") {
                    return err(start, "expected '{' after \\u");
                }
                let digits_start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_hexdigit()) {
                    self.bump();
                }
                let code = u32::from_str_radix(&self.src[digits_start..self.pos], 16).ok();
                if !self.eat("}") {
                    return err(start, "expected '}' closing \\u{...}");
                }
                match code.and_then(char::from_u32) {
                    Some(c) => CharSet::single(c),
                    None => return err(start, "invalid code point"),
                }
            }
            '□' | '∅' => CharSet::single(c),
            c if c.is_ascii_punctuation() || c == ' ' => CharSet::single(c),
            c => return err(start, format!("unknown escape \\{c}")),
        };
        Ok(set)
    }

    fn hex_escape(&mut self, start: usize, n: usize) -> Result<char, ParseError> {
        let digits_start = self.pos;
        for _ in 0..n {
            match self.peek() {
                Some(c) if c.is_ascii_hexdigit() => {
                    self.bump();
                }
                _ => return err(start, "expected hex digits"),
            }
        }
        let code = u32::from_str_radix(&self.src[digits_start..self.pos], 16).expect("hex");
        char::from_u32(code).map_or_else(|| err(start, "invalid code point"), Ok)
    }

    fn class(&mut self, open: usize) -> Result<CharSet, ParseError> {
        if self.eat("∅]") {
            return Ok(CharSet::empty());
        }
        let negated = self.eat("^");
        let mut set = CharSet::empty();
        loop {
            let item_start = self.pos;
            let lo = match self.bump() {
                None => return err(open, "unclosed character class"),
                Some(']') => break,
                Some('\\') => self.escape_set(item_start)?,
                Some(c) => CharSet::single(c),
            };
            if self.peek() == Some('-') && !self.src[self.pos + 1..].starts_with(']') {
                let dash = self.pos;
                self.bump();
                let hi_start = self.pos;
                let hi = match self.bump() {
                    None => return err(open, "unclosed character class"),
                    Some('\\') => self.escape_set(hi_start)?,
                    Some(c) => CharSet::single(c),
                };
                match (lo.as_single(), hi.as_single()) {
                    (Some(a), Some(b)) if a <= b => set = set.union(&CharSet::range(a, b)),
                    (Some(_), Some(_)) => return err(dash, "character range out of order"),
                    _ => return err(dash, "class shorthand cannot bound a range"),
                }
            } else {
                set = set.union(&lo);
            }
        }
        Ok(if negated { set.complement() } else { set })
    }
}

fn digit() -> CharSet {
    CharSet::range('0', '9')
}

fn word() -> CharSet {
    CharSet::range('0', '9')
        .union(&CharSet::range('A', 'Z'))
        .union(&CharSet::range('a', 'z'))
        .union(&CharSet::single('_'))
}

fn space() -> CharSet {
    CharSet::from_chars([' ', '\t', '\n', '\r'])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Node {
        parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    #[test]
    fn optional_is_union_with_epsilon() {
        assert_eq!(p("a?"), Node::union(Node::char('a'), Node::eps()));
    }

    #[test]
    fn empty_pattern() {
        assert_eq!(p(""), Node::eps());
    }

    #[test]
    fn captures_and_backrefs() {
        let expect = Node::concat_all([
            Node::capture(1, Node::char('a')),
            Node::backref(1),
            Node::capture(2, Node::char('b')),
            Node::backref(2),
        ]);
        assert_eq!(p(r"(a)\1(b)\2"), expect);
    }

    #[test]
    fn plus_and_bounds() {
        assert_eq!(p("a+"), Node::concat(Node::char('a'), Node::star(Node::char('a'))));
        assert_eq!(
            p("a{1,3}"),
            Node::concat_all([
                Node::char('a'),
                Node::union(Node::char('a'), Node::eps()),
                Node::union(Node::char('a'), Node::eps()),
            ])
        );
        assert_eq!(p("a{0}"), Node::eps());
        assert_eq!(p("(a)+"), p("(a)(a)*"));
        assert_eq!(p(r"((a)\2)+").to_string(), r"((a)\2)((a)\4)*");
        assert_eq!(p(r"(a)+\1").to_string(), r"(a)(a)*\1");
        assert_eq!(p(r"(a)+(b)\2").to_string(), r"(a)(a)*(b)\3");
    }

    #[test]
    fn classes() {
        assert_eq!(p("[a-c]"), Node::set(CharSet::range('a', 'c')));
        assert_eq!(p("[^=]"), Node::set(CharSet::single('=').complement()));
        assert_eq!(p("[]"), Node::nothing());
        assert_eq!(p("[∅]"), Node::nothing());
        assert_eq!(p("[-a]"), Node::set(CharSet::from_chars(['-', 'a'])));
        assert_eq!(p(r"[\-.]"), Node::set(CharSet::from_chars(['-', '.'])));
        assert_eq!(p("."), Node::any());
        assert_eq!(p(r"\d"), Node::set(CharSet::range('0', '9')));
    }

    #[test]
    fn holes_and_lookarounds() {
        assert_eq!(
            p("□0□1*"),
            Node::concat(Node::hole(0), Node::star(Node::hole(1)))
        );
        assert_eq!(p("(?<=ab)"), Node::look(Look::Behind, p("ab")));
        assert_eq!(p("(?:ab)"), p("ab"));
    }

    #[test]
    fn errors() {
        for bad in [
            "(", ")", "a)", "*a", "^a", "a$", "[a", r"\1", r"(a\1)", "a{2,}", "a{3,1}", "(?<=a*)",
            "(?<=a|bc)", r"\q", "(?P<x>a)", "□",
        ] {
            assert!(parse(bad).is_err(), "{bad} should fail");
        }
        assert_eq!(parse("(").unwrap_err().offset, 0);
        assert_eq!(parse("ab)").unwrap_err().offset, 2);
    }
}
