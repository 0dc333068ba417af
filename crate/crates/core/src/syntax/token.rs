//! Lossless Java lexer.
//!
//! Every byte of the input ends up in exactly one token, trivia included, so
//! that concatenating token texts reproduces the source. Malformed input
//! (unterminated literals or comments, stray characters) still produces
//! tokens; those are marked with `malformed`.

use serde::Serialize;
use std::fmt;

/// Half-open byte range `[start, end)` into a source string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, other: Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    pub fn slice<'a>(&self, source: &'a str) -> &'a str {
        &source[self.start..self.end]
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenKind {
    Identifier,
    Keyword,
    NumericLiteral,
    StringLiteral,
    CharLiteral,
    Operator,
    Punctuation,
    Comment,
    Whitespace,
}

impl TokenKind {
    pub fn is_trivia(self) -> bool {
        matches!(self, TokenKind::Comment | TokenKind::Whitespace)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'src> {
    pub kind: TokenKind,
    pub text: &'src str,
    pub span: Span,
    /// Unterminated literal/comment or a character Java does not allow here.
    pub malformed: bool,
}

const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "false",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "null",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "true",
    "try",
    "void",
    "volatile",
    "while",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.binary_search(&word).is_ok()
}

// Longest first within each leading character.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=",
    "/=", "&=", "|=", "^=", "%=", "<<", ">>", "=", ">", "<", "!", "~", "?", ":", "+", "-", "*", "/", "&", "|", "^",
    "%", "@",
];

fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

fn is_ident_part(c: char) -> bool {
    is_ident_start(c) || c.is_alphanumeric()
}

/// Splits `source` into a lossless token list.
pub fn tokenize(source: &str) -> Vec<Token<'_>> {
    Lexer { src: source, pos: 0 }.run()
}

/// Tokens that are neither whitespace nor comments.
pub fn significant<'a, 's>(tokens: &'a [Token<'s>]) -> impl Iterator<Item = &'a Token<'s>> + 'a {
    tokens.iter().filter(|t| !t.kind.is_trivia())
}

struct Lexer<'src> {
    src: &'src str,
    pos: usize,
}

impl<'src> Lexer<'src> {
    fn run(mut self) -> Vec<Token<'src>> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let start = self.pos;
            let (kind, malformed) = self.lex_one();
            debug_assert!(self.pos > start);
            out.push(Token { kind, text: &self.src[start..self.pos], span: Span::new(start, self.pos), malformed });
        }
        out
    }

    fn rest(&self) -> &'src str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat_while(&mut self, pred: impl Fn(char) -> bool) {
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn lex_one(&mut self) -> (TokenKind, bool) {
        let c = self.peek().expect("lex_one called at end of input");
        let rest = self.rest();
        if c.is_whitespace() {
            self.eat_while(char::is_whitespace);
            return (TokenKind::Whitespace, false);
        }
        if rest.starts_with("//") {
            match rest.find(['\n', '\r']) {
                Some(n) => self.pos += n,
                None => self.pos = self.src.len(),
            }
            return (TokenKind::Comment, false);
        }
        if let Some(body) = rest.strip_prefix("/*") {
            return match body.find("*/") {
                Some(n) => {
                    self.pos += n + 4;
                    (TokenKind::Comment, false)
                }
                None => {
                    self.pos = self.src.len();
                    (TokenKind::Comment, true)
                }
            };
        }
        if rest.starts_with("\"\"\"") {
            return self.text_block();
        }
        if c == '"' {
            return self.quoted('"', TokenKind::StringLiteral);
        }
        if c == '\'' {
            return self.quoted('\'', TokenKind::CharLiteral);
        }
        if c.is_ascii_digit() || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
            return self.number();
        }
        if is_ident_start(c) {
            let start = self.pos;
            self.eat_while(is_ident_part);
            let word = &self.src[start..self.pos];
            let kind = if is_keyword(word) { TokenKind::Keyword } else { TokenKind::Identifier };
            return (kind, false);
        }
        if let Some(op) = OPERATORS.iter().find(|op| rest.starts_with(**op)) {
            self.pos += op.len();
            return (TokenKind::Operator, false);
        }
        self.bump();
        match c {
            '(' | ')' | '{' | '}' | '[' | ']' | ';' | ',' | '.' => (TokenKind::Punctuation, false),
            _ => (TokenKind::Punctuation, true),
        }
    }

    fn quoted(&mut self, quote: char, kind: TokenKind) -> (TokenKind, bool) {
        self.bump();
        while let Some(c) = self.peek() {
            match c {
                '\\' => {
                    self.bump();
                    if matches!(self.peek(), Some('\n' | '\r') | None) {
                        return (kind, true);
                    }
                    self.bump();
                }
                '\n' | '\r' => return (kind, true),
                _ => {
                    self.bump();
                    if c == quote {
                        return (kind, false);
                    }
                }
            }
        }
        (kind, true)
    }

    fn text_block(&mut self) -> (TokenKind, bool) {
        self.pos += 3;
        while self.pos < self.src.len() {
            let rest = self.rest();
            if rest.starts_with('\\') {
                self.bump();
                self.bump();
            } else if rest.starts_with("\"\"\"") {
                self.pos += 3;
                return (TokenKind::StringLiteral, false);
            } else {
                self.bump();
            }
        }
        (TokenKind::StringLiteral, true)
    }

    fn number(&mut self) -> (TokenKind, bool) {
        let rest = self.rest().as_bytes();
        if rest.len() > 1 && rest[0] == b'0' && matches!(rest[1], b'x' | b'X' | b'b' | b'B') {
            self.pos += 2;
            self.eat_while(|c| c.is_ascii_hexdigit() || c == '_');
            // hex floating point: 0x1.8p3
            if self.peek() == Some('.') {
                self.bump();
                self.eat_while(|c| c.is_ascii_hexdigit() || c == '_');
            }
            if matches!(self.peek(), Some('p' | 'P')) {
                self.exponent();
            }
        } else {
            self.eat_while(|c| c.is_ascii_digit() || c == '_');
            if self.peek() == Some('.') && self.peek_at(1).is_none_or(|c| !is_ident_start(c) && c != '.') {
                self.bump();
                self.eat_while(|c| c.is_ascii_digit() || c == '_');
            }
            if matches!(self.peek(), Some('e' | 'E')) {
                self.exponent();
            }
        }
        if matches!(self.peek(), Some('l' | 'L' | 'f' | 'F' | 'd' | 'D')) {
            self.bump();
        }
        (TokenKind::NumericLiteral, false)
    }

    fn exponent(&mut self) {
        let save = self.pos;
        self.bump();
        if matches!(self.peek(), Some('+' | '-')) {
            self.bump();
        }
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.eat_while(|c| c.is_ascii_digit() || c == '_');
        } else {
            self.pos = save;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds_and_texts(src: &str) -> Vec<(TokenKind, &str)> {
        significant(&tokenize(src)).map(|t| (t.kind, t.text)).collect()
    }

    #[test]
    fn keywords_sorted_for_binary_search() {
        let mut sorted = KEYWORDS.to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, KEYWORDS);
    }

    #[test]
    fn stepper_loop_header() {
        let src = "for (int i=0; i<5; i++){}";
        let toks = tokenize(src);
        let idents: Vec<_> =
            toks.iter().filter(|t| t.kind == TokenKind::Identifier).map(|t| (t.text, t.span)).collect();
        assert_eq!(idents, vec![("i", Span::new(9, 10)), ("i", Span::new(14, 15)), ("i", Span::new(19, 20))]);
        assert!(toks.iter().any(|t| t.kind == TokenKind::Keyword && t.text == "for"));
        assert!(toks.iter().any(|t| t.kind == TokenKind::Keyword && t.text == "int"));
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn literals_and_comments_hide_identifiers() {
        let toks = tokenize(r#"/* i */ "i" + i"#);
        let idents: Vec<_> = toks.iter().filter(|t| t.kind == TokenKind::Identifier).collect();
        assert_eq!(idents.len(), 1);
        assert_eq!(idents[0].span, Span::new(14, 15));
    }

    #[test]
    fn unterminated_tokens_are_flagged() {
        let toks = tokenize("a = \"abc");
        let last = toks.last().unwrap();
        assert_eq!(last.kind, TokenKind::StringLiteral);
        assert!(last.malformed);

        let toks = tokenize("x /* never closed\n y");
        let last = toks.last().unwrap();
        assert_eq!((last.kind, last.malformed), (TokenKind::Comment, true));
        assert_eq!(last.text, "/* never closed\n y");
    }

    #[test]
    fn numbers() {
        let src = "1 0x1F 0b101 1_000L 3.14f .5 1e10 2.0E-3d 0x1.8p3 07";
        let toks = kinds_and_texts(src);
        assert!(toks.iter().all(|(k, _)| *k == TokenKind::NumericLiteral), "{toks:?}");
        assert_eq!(toks.len(), 10);
    }

    #[test]
    fn member_access_on_integer_is_not_a_float() {
        let toks = kinds_and_texts("1.toString");
        assert_eq!(toks[0], (TokenKind::NumericLiteral, "1"));
    }

    #[test]
    fn longest_operator_match() {
        let toks = kinds_and_texts("a >>>= b -> c :: d ... e");
        let ops: Vec<_> = toks.iter().filter(|(k, _)| *k == TokenKind::Operator).map(|t| t.1).collect();
        assert_eq!(ops, vec![">>>=", "->", "::", "..."]);
    }

    #[test]
    fn escapes_in_literals() {
        let toks = kinds_and_texts(r#"'\'' "a\"b" 'A'"#);
        assert_eq!(
            toks,
            vec![
                (TokenKind::CharLiteral, r"'\''"),
                (TokenKind::StringLiteral, r#""a\"b""#),
                (TokenKind::CharLiteral, r"'A'"),
            ]
        );
    }

    #[test]
    fn text_blocks() {
        let src = "s = \"\"\"\n  hi \"there\"\n  \"\"\";";
        let toks = kinds_and_texts(src);
        assert_eq!(toks[2].0, TokenKind::StringLiteral);
        assert_eq!(toks[3], (TokenKind::Punctuation, ";"));
    }

    #[test]
    fn stray_characters_are_flagged_not_dropped() {
        let toks = tokenize("a # b");
        let joined: String = toks.iter().map(|t| t.text).collect();
        assert_eq!(joined, "a # b");
        assert!(toks.iter().any(|t| t.malformed && t.text == "#"));
    }

    #[test]
    fn unicode_identifiers() {
        let toks = kinds_and_texts("int größe = 1;");
        assert_eq!(toks[1], (TokenKind::Identifier, "größe"));
    }
}
