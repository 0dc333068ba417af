//! Reference implementations used to cross-check the real ones.
//!
//! The role oracle works on a flat token list with bracket matching and
//! nothing else: no syntax tree, no scopes. It assumes that a name is
//! declared once outside opaque regions, which holds for generated methods.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tok {
    pub text: String,
    pub start: usize,
}

const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", "<<", ">>",
];

pub fn lex(src: &str) -> Vec<Tok> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            i = src[i..].find('\n').map_or(b.len(), |k| i + k);
            continue;
        }
        if src[i..].starts_with("/*") {
            i = src[i + 2..].find("*/").map_or(b.len(), |k| i + 2 + k + 2);
            continue;
        }
        if c == b'"' || c == b'\'' {
            i += 1;
            while i < b.len() && b[i] != c {
                i += if b[i] == b'\\' { 2 } else { 1 };
            }
            i = (i + 1).min(b.len());
        } else if c.is_ascii_alphabetic() || c == b'_' || c == b'$' || c >= 0x80 {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'$' || b[i] >= 0x80) {
                i += 1;
            }
        } else if c.is_ascii_digit() {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'.' || b[i] == b'_') {
                i += 1;
            }
        } else if let Some(op) = OPERATORS.iter().find(|op| src[i..].starts_with(*op)) {
            i += op.len();
        } else {
            i += 1;
        }
        out.push(Tok { text: src[start..i].to_string(), start });
    }
    out
}

fn is_ident(t: &str) -> bool {
    t.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_' || c == '$') && !NOT_NAMES.contains(&t)
}

const NOT_NAMES: &[&str] = &[
    "return",
    "new",
    "throw",
    "case",
    "else",
    "break",
    "continue",
    "instanceof",
    "assert",
    "do",
    "this",
    "super",
    "true",
    "false",
    "null",
    "class",
    "default",
    "for",
    "while",
    "if",
    "switch",
    "try",
    "catch",
    "finally",
    "final",
    "static",
    "public",
    "private",
    "protected",
    "void",
];
const NUMERIC: &[&str] =
    &["byte", "short", "int", "long", "float", "double", "Byte", "Short", "Integer", "Long", "Float", "Double"];
const ITERATORS: &[&str] = &["Iterator", "ListIterator", "Enumeration"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OracleRole {
    Stepper,
    Walker,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleVar {
    pub name: String,
    /// Byte offset of the declaring name.
    pub offset: usize,
    pub role: OracleRole,
    /// Detected as both roles.
    pub conflict: bool,
    /// Augmentation can rename it: no mention in an opaque region and no
    /// existing identifier equal to its prefixed name.
    pub renameable: bool,
}

struct Decl {
    offset: usize,
    ty: String,
    dims: usize,
}

struct Method {
    toks: Vec<Tok>,
    close: Vec<Option<usize>>,
    open: Vec<Option<usize>>,
    opaque: Vec<bool>,
}

impl Method {
    fn new(src: &str) -> Method {
        let toks = lex(src);
        let n = toks.len();
        let mut close = vec![None; n];
        let mut open = vec![None; n];
        let mut stack: Vec<usize> = Vec::new();
        for (i, t) in toks.iter().enumerate() {
            match t.text.as_str() {
                "(" | "[" | "{" => stack.push(i),
                ")" | "]" | "}" => {
                    if let Some(o) = stack.pop() {
                        close[o] = Some(i);
                        open[i] = Some(o);
                    }
                }
                _ => {}
            }
        }
        let mut m = Method { toks, close, open, opaque: vec![false; n] };
        m.mark_opaque();
        m
    }

    fn t(&self, i: usize) -> &str {
        self.toks.get(i).map_or("", |t| t.text.as_str())
    }

    fn mark(&mut self, from: usize, to: usize) {
        for k in from..=to.min(self.toks.len() - 1) {
            self.opaque[k] = true;
        }
    }

    fn mark_opaque(&mut self) {
        for i in 0..self.toks.len() {
            match self.t(i) {
                "->" => {
                    if i > 0 {
                        let p = if self.t(i - 1) == ")" { self.open[i - 1].unwrap_or(i - 1) } else { i - 1 };
                        self.mark(p, i);
                    }
                    let j = i + 1;
                    if self.t(j) == "{" {
                        if let Some(c) = self.close[j] {
                            self.mark(j, c);
                        }
                    } else {
                        let mut k = j;
                        let mut depth = 0i32;
                        while k < self.toks.len() {
                            match self.t(k) {
                                "(" | "[" | "{" => depth += 1,
                                ")" | "]" | "}" if depth == 0 => break,
                                ")" | "]" | "}" => depth -= 1,
                                "," | ";" if depth == 0 => break,
                                _ => {}
                            }
                            k += 1;
                        }
                        if k > j {
                            self.mark(j, k - 1);
                        }
                    }
                }
                "switch" if self.t(i + 1) == "(" => {
                    if let Some(c) = self.close[i + 1] {
                        if self.t(c + 1) == "{" {
                            if let Some(e) = self.close[c + 1] {
                                self.mark(c + 1, e);
                            }
                        }
                    }
                }
                "new" => {
                    let mut k = i + 1;
                    while k < self.toks.len() && !matches!(self.t(k), "(" | "[" | ";" | "{") {
                        k += 1;
                    }
                    if self.t(k) == "(" {
                        if let Some(c) = self.close[k] {
                            if self.t(c + 1) == "{" {
                                if let Some(e) = self.close[c + 1] {
                                    self.mark(c + 1, e);
                                }
                            }
                        }
                    }
                }
                _ => {}
            }
        }
    }

    /// The declared type ending just before token `i`, as (simple name, dims).
    fn type_before(&self, i: usize) -> Option<(String, usize)> {
        let mut p = i.checked_sub(1)?;
        let mut dims = 0;
        while self.t(p) == "]" && p >= 2 && self.t(p - 1) == "[" {
            dims += 1;
            p -= 2;
        }
        if matches!(self.t(p), ">" | ">>" | ">>>") {
            let mut depth = 0i32;
            loop {
                match self.t(p) {
                    ">" => depth += 1,
                    ">>" => depth += 2,
                    ">>>" => depth += 3,
                    "<" => depth -= 1,
                    "," | "." | "?" | "[" | "]" | "&" | "extends" | "super" => {}
                    t if is_ident(t) => {}
                    _ => return None,
                }
                if depth == 0 {
                    break;
                }
                p = p.checked_sub(1)?;
            }
            p = p.checked_sub(1)?;
        }
        let t = self.t(p);
        is_ident(t).then(|| (t.to_string(), dims))
    }

    fn decls(&self) -> BTreeMap<String, Decl> {
        let mut out: BTreeMap<String, Decl> = BTreeMap::new();
        let n = self.toks.len();
        let mut i = 0;
        while i < n {
            let name = self.t(i);
            let follows = matches!(self.t(i + 1), "=" | ";" | "," | ":" | ")");
            let ty = if !self.opaque[i] && is_ident(name) && follows { self.type_before(i) } else { None };
            let Some((ty, dims)) = ty else {
                i += 1;
                continue;
            };
            out.entry(name.to_string()).or_insert(Decl { offset: self.toks[i].start, ty: ty.clone(), dims });
            // Further declarators of the same statement: `T a = x, b = y`.
            let mut k = i + 1;
            let mut depth = 0i32;
            while k < n && self.t(i + 1) != ")" && self.t(i + 1) != ":" {
                match self.t(k) {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" if depth == 0 => break,
                    ")" | "]" | "}" => depth -= 1,
                    ";" if depth == 0 => break,
                    "," if depth == 0 => {
                        let next = self.t(k + 1);
                        if is_ident(next) && matches!(self.t(k + 2), "=" | "," | ";") {
                            out.entry(next.to_string()).or_insert(Decl {
                                offset: self.toks[k + 1].start,
                                ty: ty.clone(),
                                dims,
                            });
                        } else {
                            break;
                        }
                    }
                    _ => {}
                }
                k += 1;
            }
            i += 1;
        }
        out
    }

    /// Splits `from..to` at top-level occurrences of `sep`.
    fn split(&self, from: usize, to: usize, sep: &str) -> Vec<(usize, usize)> {
        let mut parts = Vec::new();
        let mut start = from;
        let mut depth = 0i32;
        for k in from..to {
            match self.t(k) {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                t if t == sep && depth == 0 => {
                    parts.push((start, k));
                    start = k + 1;
                }
                _ => {}
            }
        }
        parts.push((start, to));
        parts
    }

    /// Statement starting at `i`: the token range of a block or up to `;`.
    fn statement(&self, i: usize) -> (usize, usize) {
        if self.t(i) == "{" {
            return (i, self.close[i].unwrap_or(i));
        }
        let mut k = i;
        let mut depth = 0i32;
        while k < self.toks.len() {
            match self.t(k) {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                ";" if depth == 0 => break,
                _ => {}
            }
            k += 1;
        }
        (i, k)
    }

    /// Receivers `v` of `v.m()` in `from..to` for `m` in `methods`.
    fn receivers(&self, from: usize, to: usize, methods: &[&str]) -> Vec<String> {
        let mut out = Vec::new();
        for k in from..to {
            let v = self.t(k);
            let plain = k == 0 || self.t(k - 1) != ".";
            if plain
                && is_ident(v)
                && self.t(k + 1) == "."
                && methods.contains(&self.t(k + 2))
                && self.t(k + 3) == "("
                && self.t(k + 4) == ")"
                && !self.opaque[k]
            {
                out.push(v.to_string());
            }
        }
        out
    }

    fn mentions(&self, from: usize, to: usize, name: &str) -> bool {
        (from..to).any(|k| self.t(k) == name && (k == 0 || self.t(k - 1) != "."))
    }

    fn arithmetic_update(&self, from: usize, to: usize, v: &str) -> bool {
        let toks: Vec<&str> = (from..to).map(|k| self.t(k)).collect();
        match toks.as_slice() {
            [a, "++" | "--"] | ["++" | "--", a] => *a == v,
            [a, "+=" | "-=" | "*=" | "/=" | "%=" | "<<=" | ">>=", ..] => *a == v,
            [a, "=", ..] if *a == v => {
                let (mut s, mut e) = (from + 2, to);
                while self.t(s) == "(" && self.close[s] == Some(e - 1) {
                    s += 1;
                    e -= 1;
                }
                self.top_operator(s, e).is_some_and(|op| matches!(op, "+" | "-" | "*" | "/" | "%" | "<<" | ">>"))
                    && self.mentions(s, e, v)
            }
            _ => false,
        }
    }

    /// The loosest binary operator at depth 0 of an expression, if the
    /// expression is a binary one.
    fn top_operator(&self, from: usize, to: usize) -> Option<&str> {
        fn rank(op: &str) -> Option<u8> {
            Some(match op {
                "||" => 1,
                "&&" => 2,
                "|" => 3,
                "^" => 4,
                "&" => 5,
                "==" | "!=" => 6,
                "<" | ">" | "<=" | ">=" | "instanceof" => 7,
                "<<" | ">>" | ">>>" => 8,
                "+" | "-" => 9,
                "*" | "/" | "%" => 10,
                _ => return None,
            })
        }
        let mut best: Option<(u8, usize)> = None;
        let mut depth = 0i32;
        for k in from..to {
            let t = self.t(k);
            match t {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                "?" | "=" | "+=" | "-=" | "*=" | "/=" if depth == 0 => return None,
                _ if depth == 0 && k > from => {
                    let prev = self.t(k - 1);
                    let operand_before = is_ident(prev)
                        || prev.starts_with(|c: char| c.is_ascii_digit() || c == '"' || c == '\'')
                        || matches!(prev, ")" | "]" | "++" | "--" | "this" | "null" | "true" | "false");
                    if let (Some(r), true) = (rank(t), operand_before) {
                        // Left-associative: the last loosest operator is the root.
                        if best.is_none_or(|(b, _)| r <= b) {
                            best = Some((r, k));
                        }
                    }
                }
                _ => {}
            }
        }
        best.map(|(_, k)| self.t(k))
    }
}

/// Roles of one method, by the naive rules.
pub fn detect(src: &str) -> Vec<OracleVar> {
    let m = Method::new(src);
    let decls = m.decls();
    let numeric = |v: &str| decls.get(v).is_some_and(|d| d.dims == 0 && NUMERIC.contains(&d.ty.as_str()));
    let iterator = |v: &str| decls.get(v).is_some_and(|d| d.dims == 0 && ITERATORS.contains(&d.ty.as_str()));
    let mut steppers = BTreeSet::new();
    let mut walkers = BTreeSet::new();
    let mut bodies: Vec<(usize, usize)> = Vec::new();
    let mut conds: Vec<(usize, usize)> = Vec::new();
    for i in 0..m.toks.len() {
        if m.opaque[i] {
            continue;
        }
        match m.t(i) {
            "for" if m.t(i + 1) == "(" => {
                let Some(c) = m.close[i + 1] else { continue };
                bodies.push(m.statement(c + 1));
                let parts = m.split(i + 2, c, ";");
                if let [init, cond, update] = parts.as_slice() {
                    conds.push(*cond);
                    let mut candidates = Vec::new();
                    for (s, _) in m.split(init.0, init.1, ",") {
                        // `T a = 0`, `a = 0`, or a later declarator `b = 1`.
                        let name_at =
                            if m.t(s + 1) == "=" { s } else { (s..init.1).find(|&k| m.t(k + 1) == "=").unwrap_or(s) };
                        candidates.push(m.t(name_at).to_string());
                    }
                    for v in candidates.iter().filter(|v| numeric(v)) {
                        if m.split(update.0, update.1, ",").iter().any(|&(s, e)| m.arithmetic_update(s, e, v)) {
                            steppers.insert(v.clone());
                        }
                    }
                } else if let Some(&(s, e)) = m.split(i + 2, c, ":").first() {
                    if e > s && decls.contains_key(m.t(e - 1)) {
                        walkers.insert(m.t(e - 1).to_string());
                    }
                }
            }
            "while" if m.t(i + 1) == "(" => {
                let Some(c) = m.close[i + 1] else { continue };
                conds.push((i + 2, c));
                let after_do = i > 0 && m.t(i - 1) == "}" && m.open[i - 1].is_some_and(|o| o > 0 && m.t(o - 1) == "do");
                if !after_do {
                    bodies.push(m.statement(c + 1));
                }
            }
            "do" => bodies.push(m.statement(i + 1)),
            _ => {}
        }
    }
    for &(s, e) in &conds {
        walkers
            .extend(m.receivers(s, e, &["hasNext", "hasMoreElements"]).into_iter().filter(|v| decls.contains_key(v)));
    }
    for &(s, e) in &bodies {
        walkers.extend(m.receivers(s, e + 1, &["next", "nextElement"]).into_iter().filter(|v| iterator(v)));
    }

    let idents: BTreeSet<&str> = m.toks.iter().map(|t| t.text.as_str()).collect();
    let in_opaque: BTreeSet<&str> =
        m.toks.iter().zip(&m.opaque).filter(|(_, &o)| o).map(|(t, _)| t.text.as_str()).collect();
    let mut out: Vec<OracleVar> = steppers
        .iter()
        .map(|v| (v, OracleRole::Stepper, walkers.contains(v)))
        .chain(walkers.iter().filter(|v| !steppers.contains(*v)).map(|v| (v, OracleRole::Walker, false)))
        .map(|(v, role, conflict)| {
            let prefix = match role {
                OracleRole::Stepper => "stepper_",
                OracleRole::Walker => "walker_",
            };
            OracleVar {
                name: v.clone(),
                offset: decls[v.as_str()].offset,
                role,
                conflict,
                renameable: !in_opaque.contains(v.as_str()) && !idents.contains(format!("{prefix}{v}").as_str()),
            }
        })
        .collect();
    out.sort_by_key(|v| v.offset);
    out
}

/// Declared names carrying a role prefix that the oracle also detects as
/// that role, in a (possibly augmented) method.
pub fn prefixed_roles(src: &str) -> Vec<(String, OracleRole)> {
    detect(src)
        .into_iter()
        .filter(|v| match v.role {
            OracleRole::Stepper => v.name.starts_with("stepper_"),
            OracleRole::Walker => v.name.starts_with("walker_"),
        })
        .map(|v| (v.name, v.role))
        .collect()
}

/// Sub-token precision/recall/F1 from explicit token lists, matching each
/// predicted token against the first unused equal reference token.
pub fn brute_force_tp(pred: &[String], reference: &[String]) -> usize {
    let mut used = vec![false; reference.len()];
    let mut tp = 0;
    for p in pred {
        if let Some(k) = (0..reference.len()).find(|&k| !used[k] && reference[k] == *p) {
            used[k] = true;
            tp += 1;
        }
    }
    tp
}

pub fn prf(tp: usize, pred_len: usize, ref_len: usize) -> (f64, f64, f64) {
    let p = if pred_len == 0 { 0.0 } else { tp as f64 / pred_len as f64 };
    let r = if ref_len == 0 { 1.0 } else { tp as f64 / ref_len as f64 };
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}
