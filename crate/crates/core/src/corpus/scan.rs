//! Balanced-brace member scanner that cuts method declarations out of a
//! `.java` file without parsing it.

use crate::syntax::{tokenize, Span, Token, TokenKind};

const TYPE_KEYWORDS: &[&str] = &["class", "interface", "enum"];

/// Spans of the method declarations in `text`, in order.
///
/// Methods are found at the top level of the file (for bare method files)
/// and directly inside class, interface and enum bodies, nested member types
/// included. Each span runs from the first modifier or annotation to the
/// closing brace; leading comments stay outside. Returns `None` when the file
/// has malformed tokens or unbalanced brackets.
pub fn member_spans(text: &str) -> Option<Vec<Span>> {
    let tokens = tokenize(text);
    if tokens.iter().any(|t| t.malformed) {
        return None;
    }
    let sig: Vec<&Token> = tokens.iter().filter(|t| !t.kind.is_trivia()).collect();
    let close = matching_brackets(&sig)?;
    let mut out = Vec::new();
    members(&sig, &close, 0, sig.len(), false, &mut out);
    Some(out)
}

fn punct(t: &Token, text: &str) -> bool {
    matches!(t.kind, TokenKind::Punctuation | TokenKind::Operator) && t.text == text
}

/// For every opening bracket, the index of its partner; `None` if unbalanced.
fn matching_brackets(sig: &[&Token]) -> Option<Vec<usize>> {
    let mut close = vec![usize::MAX; sig.len()];
    let mut stack: Vec<(usize, &str)> = Vec::new();
    for (i, t) in sig.iter().enumerate() {
        if t.kind != TokenKind::Punctuation {
            continue;
        }
        match t.text {
            "(" | "[" | "{" => stack.push((i, t.text)),
            ")" | "]" | "}" => {
                let (open, kind) = stack.pop()?;
                let expected = match kind {
                    "(" => ")",
                    "[" => "]",
                    _ => "}",
                };
                if t.text != expected {
                    return None;
                }
                close[open] = i;
            }
            _ => {}
        }
    }
    stack.is_empty().then_some(close)
}

fn members(sig: &[&Token], close: &[usize], lo: usize, hi: usize, in_enum: bool, out: &mut Vec<Span>) {
    // Enum constants (which may carry argument lists and bodies) precede the
    // first top-level `;` of an enum body.
    let mut constants = in_enum;
    let mut head = lo;
    let mut i = lo;
    while i < hi {
        let t = sig[i];
        if punct(t, ";") {
            constants = false;
            head = i + 1;
            i += 1;
        } else if punct(t, "(") || punct(t, "[") {
            i = close[i] + 1;
        } else if punct(t, "{") {
            let end = close[i];
            let header = &sig[head..i];
            if let Some(kw) = type_keyword(header) {
                members(sig, close, i + 1, end, kw == "enum", out);
                head = end + 1;
            } else if !constants && is_method_header(header, close, head) {
                out.push(Span::new(sig[head].span.start, sig[end].span.end));
                head = end + 1;
            } else if !is_initializer(header, close, head) {
                // Initializer blocks and enum constant bodies end the member.
                head = end + 1;
            }
            i = end + 1;
        } else {
            i += 1;
        }
    }
}

fn type_keyword(header: &[&Token]) -> Option<&'static str> {
    header.iter().enumerate().find_map(|(k, t)| {
        let after_dot = k > 0 && punct(header[k - 1], ".");
        if t.kind == TokenKind::Keyword && !after_dot {
            TYPE_KEYWORDS.iter().copied().find(|kw| *kw == t.text)
        } else {
            None
        }
    })
}

/// Indices of `header` outside any bracket group; group openers are kept.
fn top_level(header: &[&Token], close: &[usize], base: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut k = 0;
    while k < header.len() {
        out.push(k);
        k = if punct(header[k], "(") || punct(header[k], "[") || punct(header[k], "{") {
            close[base + k] - base + 1
        } else {
            k + 1
        };
    }
    out
}

/// True when a member header ends an expression rather than a declaration.
fn is_initializer(header: &[&Token], close: &[usize], base: usize) -> bool {
    top_level(header, close, base).into_iter().any(|k| punct(header[k], "=") || header[k].text == "new")
}

/// `[modifiers] [type params] [type] name(params) [throws X, Y]`.
fn is_method_header(header: &[&Token], close: &[usize], base: usize) -> bool {
    let top = top_level(header, close, base);
    if top.iter().any(|&k| punct(header[k], "=") || header[k].text == "new" || punct(header[k], "->")) {
        return false;
    }
    // The last top-level parenthesis group is the parameter list.
    let Some(&p) = top.iter().rev().find(|&&k| punct(header[k], "(")) else { return false };
    if p == 0 || header[p - 1].kind != TokenKind::Identifier {
        return false;
    }
    // Annotations look like `@Name(...)`; the parameter list is not theirs.
    if p >= 2 && punct(header[p - 2], "@") {
        return false;
    }
    let tail = &header[close[base + p] - base + 1..];
    tail.is_empty() || tail[0].text == "throws"
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cut(text: &str) -> Vec<&str> {
        member_spans(text).unwrap().into_iter().map(|s| s.slice(text)).collect()
    }

    #[test]
    fn class_with_two_methods() {
        let src = "package p;\nimport java.util.*;\n/** doc */\npublic class A {\n  private int x = 1;\n  /** f */\n  @Override public String toString() { return \"}\"; }\n  static <T> void g(List<T> l) throws IOException { for (T t : l) {} }\n}\n";
        assert_eq!(
            cut(src),
            vec![
                "@Override public String toString() { return \"}\"; }",
                "static <T> void g(List<T> l) throws IOException { for (T t : l) {} }",
            ]
        );
    }

    #[test]
    fn bare_methods_at_top_level() {
        let src = "int add(int a, int b) { return a + b; }\n\nvoid m() { for (int count=0 ; count<10; count++){} }\n";
        assert_eq!(cut(src).len(), 2);
    }

    #[test]
    fn skips_initializers_fields_and_anonymous_bodies() {
        let src = "class A { static { init(); } { x = 2; } int[] a = {1, 2}; Runnable r = new Runnable() { public void run() {} }; A() { super(); } }";
        assert_eq!(cut(src), vec!["A() { super(); }"]);
    }

    #[test]
    fn nested_types_and_enums() {
        let src = "class A { enum E { X(1) { int v() { return 1; } }, Y(2); E(int v) {} int w() { return 0; } } interface I { void n(); default int d() { return 3; } } }";
        assert_eq!(cut(src), vec!["E(int v) {}", "int w() { return 0; }", "default int d() { return 3; }"]);
    }

    #[test]
    fn annotation_arguments_are_not_parameters() {
        let src = "class A { @SuppressWarnings({\"a\"}) @Deprecated(since = \"1\") void f() {} }";
        assert_eq!(cut(src), vec!["@SuppressWarnings({\"a\"}) @Deprecated(since = \"1\") void f() {}"]);
    }

    #[test]
    fn unbalanced_file_is_rejected() {
        assert_eq!(member_spans("class A { void f() { }"), None);
        assert_eq!(member_spans("class A { String s = \"oops; }"), None);
    }
}
