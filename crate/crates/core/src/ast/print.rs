use super::{CharSet, Kind, Node};
use std::fmt::Write;

pub fn to_string(n: &Node) -> String {
    let mut out = String::new();
    alt(n, &mut out);
    out
}

/// Union operand or top level: ε prints as nothing.
fn alt(n: &Node, out: &mut String) {
    match &n.kind {
        Kind::Epsilon => {}
        Kind::Union(a, b) => {
            alt(a, out);
            out.push('|');
            match b.kind {
                Kind::Union(..) => group(b, out),
                _ => alt(b, out),
            }
        }
        _ => seq(n, out),
    }
}

/// Concatenation operand.
fn seq(n: &Node, out: &mut String) {
    match &n.kind {
        Kind::Epsilon | Kind::Union(..) => group(n, out),
        Kind::Concat(a, b) => {
            seq(a, out);
            let mut right = String::new();
            match b.kind {
                Kind::Concat(..) => group(b, &mut right),
                _ => seq(b, &mut right),
            }
            if ends_with_index(out) && right.starts_with(|c: char| c.is_ascii_digit()) {
                out.push_str("(?:");
                out.push_str(&right);
                out.push(')');
            } else {
                out.push_str(&right);
            }
        }
        _ => postfix(n, out),
    }
}

fn postfix(n: &Node, out: &mut String) {
    match &n.kind {
        Kind::Star(b) => {
            match b.kind {
                Kind::Epsilon | Kind::Union(..) | Kind::Concat(..) => group(b, out),
                _ => postfix(b, out),
            }
            out.push('*');
        }
        Kind::Set(c) => set(c, out),
        Kind::Capture(_, b) => {
            out.push('(');
            alt(b, out);
            out.push(')');
        }
        Kind::Backref(i) => {
            let _ = write!(out, "\\{i}");
        }
        Kind::Look(k, b) => {
            out.push_str(k.opener());
            alt(b, out);
            out.push(')');
        }
        Kind::Hole(i) => {
            let _ = write!(out, "□{i}");
        }
        Kind::Epsilon | Kind::Union(..) | Kind::Concat(..) => group(n, out),
    }
}

fn group(n: &Node, out: &mut String) {
    out.push_str("(?:");
    alt(n, out);
    out.push(')');
}

/// Whether the text ends in `\k` or `□k`, which a following digit would extend.
fn ends_with_index(s: &str) -> bool {
    let trimmed = s.trim_end_matches(|c: char| c.is_ascii_digit());
    trimmed.len() < s.len() && (trimmed.ends_with('\\') || trimmed.ends_with('□'))
}

pub fn charset_to_string(c: &CharSet) -> String {
    let mut out = String::new();
    set(c, &mut out);
    out
}

fn set(c: &CharSet, out: &mut String) {
    if c.is_empty() {
        out.push_str("[∅]");
    } else if c.is_full() {
        out.push('.');
    } else if let Some(ch) = c.as_single() {
        literal(ch, out);
    } else {
        let pos = class_body(c);
        let neg = class_body(&c.complement());
        if neg.len() + 1 < pos.len() {
            let _ = write!(out, "[^{neg}]");
        } else {
            let _ = write!(out, "[{pos}]");
        }
    }
}

fn class_body(c: &CharSet) -> String {
    let mut out = String::new();
    for (lo, hi) in c.char_ranges() {
        class_char(lo, &mut out);
        if hi != lo {
            if hi as u32 > lo as u32 + 1 && !(lo as u32 == 0xD7FF && hi as u32 == 0xE000) {
                out.push('-');
            }
            class_char(hi, &mut out);
        }
    }
    out
}

fn control(c: char, out: &mut String) -> bool {
    match c {
        '\n' => out.push_str("\\n"),
        '\t' => out.push_str("\\t"),
        '\r' => out.push_str("\\r"),
        c if c.is_control() && (c as u32) < 0x100 => {
            let _ = write!(out, "\\x{:02X}", c as u32);
        }
        c if c.is_control() => {
            let _ = write!(out, "\\u{{{:X}}}", c as u32);
        }
        _ => return false,
    }
    true
}

fn literal(c: char, out: &mut String) {
    if control(c, out) {
        return;
    }
    if "\\.|()[]*+?{}^$□".contains(c) {
        out.push('\\');
    }
    out.push(c);
}

fn class_char(c: char, out: &mut String) {
    if control(c, out) {
        return;
    }
    if "\\[]^-∅".contains(c) {
        out.push('\\');
    }
    out.push(c);
}
