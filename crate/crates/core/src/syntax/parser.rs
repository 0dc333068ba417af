//! Recursive-descent parser for a single Java method declaration.
//!
//! The parser never panics on bad input; it reports the first error as a
//! [`ParseFailure`]. Constructs that role analysis does not need (lambdas,
//! anonymous classes, local type declarations, switch bodies) are captured
//! as balanced-delimiter [`Opaque`] regions.

use super::ast::*;
use super::token::{tokenize, Span, Token, TokenKind};
use serde::Serialize;
use std::fmt;

/// Nesting limit for statements and expressions.
const MAX_DEPTH: usize = 256;
const RED_ZONE: usize = 128 * 1024;
const STACK_CHUNK: usize = 2 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseFailure {
    pub reason: String,
    /// Byte offset of the offending token.
    pub position: usize,
}

impl fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at byte {}", self.reason, self.position)
    }
}

impl std::error::Error for ParseFailure {}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)] // built once per method, then unwrapped
pub enum ParseOutcome {
    Parsed(SyntaxTree),
    Failed(ParseFailure),
}

impl ParseOutcome {
    pub fn into_result(self) -> Result<SyntaxTree, ParseFailure> {
        match self {
            ParseOutcome::Parsed(t) => Ok(t),
            ParseOutcome::Failed(f) => Err(f),
        }
    }

    pub fn tree(&self) -> Option<&SyntaxTree> {
        match self {
            ParseOutcome::Parsed(t) => Some(t),
            ParseOutcome::Failed(_) => None,
        }
    }
}

/// Parses `source` as exactly one method or constructor declaration.
pub fn parse_method(source: &str) -> ParseOutcome {
    let tokens = tokenize(source);
    if let Some(bad) = tokens.iter().find(|t| t.malformed) {
        return ParseOutcome::Failed(ParseFailure {
            reason: format!("malformed {:?} token", bad.kind),
            position: bad.span.start,
        });
    }
    let mut parser = Parser::new(source, &tokens);
    match parser.method() {
        Ok(method) => ParseOutcome::Parsed(SyntaxTree { method }),
        Err(e) => ParseOutcome::Failed(e),
    }
}

type PResult<T> = Result<T, ParseFailure>;

#[derive(Debug, Clone, Copy)]
struct PTok<'s> {
    kind: TokenKind,
    text: &'s str,
    span: Span,
}

const PRIMITIVES: &[&str] = &["boolean", "byte", "char", "double", "float", "int", "long", "short"];

const MODIFIERS: &[&str] = &[
    "abstract",
    "default",
    "final",
    "native",
    "private",
    "protected",
    "public",
    "static",
    "strictfp",
    "synchronized",
    "transient",
    "volatile",
];

struct Parser<'s> {
    src: &'s str,
    toks: Vec<PTok<'s>>,
    pos: usize,
    depth: usize,
}

impl<'s> Parser<'s> {
    fn new(src: &'s str, tokens: &[Token<'s>]) -> Self {
        let mut toks = Vec::with_capacity(tokens.len());
        for t in tokens.iter().filter(|t| !t.kind.is_trivia()) {
            // `>`-led operators are split into single characters so that
            // nested type arguments can close one bracket at a time; the
            // expression parser glues adjacent pieces back together.
            if t.kind == TokenKind::Operator && t.text.len() > 1 && t.text.starts_with('>') {
                for (i, _) in t.text.char_indices() {
                    let start = t.span.start + i;
                    toks.push(PTok {
                        kind: TokenKind::Operator,
                        text: &src[start..start + 1],
                        span: Span::new(start, start + 1),
                    });
                }
            } else {
                toks.push(PTok { kind: t.kind, text: t.text, span: t.span });
            }
        }
        Parser { src, toks, pos: 0, depth: 0 }
    }

    // ---- token helpers ----

    fn peek(&self) -> Option<&PTok<'s>> {
        self.toks.get(self.pos)
    }

    fn peek_n(&self, n: usize) -> Option<&PTok<'s>> {
        self.toks.get(self.pos + n)
    }

    fn at(&self, text: &str) -> bool {
        self.at_n(0, text)
    }

    fn at_n(&self, n: usize, text: &str) -> bool {
        self.peek_n(n).is_some_and(|t| t.text == text && is_symbolic(t.kind))
    }

    fn at_ident(&self) -> bool {
        self.at_ident_n(0)
    }

    fn at_ident_n(&self, n: usize) -> bool {
        self.peek_n(n).is_some_and(|t| t.kind == TokenKind::Identifier)
    }

    fn at_any(&self, texts: &[&str]) -> bool {
        texts.iter().any(|t| self.at(t))
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.at(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn bump(&mut self) -> PTok<'s> {
        let t = self.toks[self.pos];
        self.pos += 1;
        t
    }

    fn error<T>(&self, what: impl Into<String>) -> PResult<T> {
        let what = what.into();
        let (reason, position) = match self.peek() {
            Some(t) => (format!("{what}, found `{}`", t.text), t.span.start),
            None => (format!("{what}, found end of input"), self.src.len()),
        };
        Err(ParseFailure { reason, position })
    }

    fn expect(&mut self, text: &str) -> PResult<Span> {
        if self.at(text) {
            Ok(self.bump().span)
        } else {
            self.error(format!("expected `{text}`"))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        if self.at_ident() {
            let t = self.bump();
            Ok(Ident { name: t.text.to_string(), span: t.span })
        } else {
            self.error("expected identifier")
        }
    }

    /// Span from token `start` through the last consumed token.
    fn span_from(&self, start: usize) -> Span {
        let first = self.toks.get(start).map_or(self.src.len(), |t| t.span.start);
        let last = if self.pos > start { self.toks[self.pos - 1].span.end } else { first };
        Span::new(first, last)
    }

    fn opaque(&self, start: usize, end: usize) -> Opaque {
        let tokens = self.toks[start..end]
            .iter()
            .map(|t| OpaqueToken { kind: t.kind, text: t.text.to_string(), span: t.span })
            .collect();
        let span = if end > start {
            Span::new(self.toks[start].span.start, self.toks[end - 1].span.end)
        } else {
            let p = self.toks.get(start).map_or(self.src.len(), |t| t.span.start);
            Span::new(p, p)
        };
        Opaque { span, tokens }
    }

    /// Consumes a balanced group starting at the current opening delimiter.
    fn skip_balanced(&mut self) -> PResult<()> {
        let mut stack: Vec<&str> = Vec::new();
        loop {
            let Some(t) = self.peek().copied() else {
                return self.error("unbalanced delimiters");
            };
            if t.kind == TokenKind::Punctuation {
                match t.text {
                    "(" => stack.push(")"),
                    "[" => stack.push("]"),
                    "{" => stack.push("}"),
                    ")" | "]" | "}" if stack.pop() != Some(t.text) => return self.error("mismatched delimiter"),
                    _ => {}
                }
            }
            self.pos += 1;
            if stack.is_empty() {
                return Ok(());
            }
        }
    }

    /// Consumes `<...>` counting angle brackets only.
    fn skip_angles(&mut self) -> PResult<()> {
        let mut depth = 0usize;
        loop {
            let Some(t) = self.peek() else {
                return self.error("unclosed `<`");
            };
            match (t.kind, t.text) {
                (TokenKind::Operator, "<") => depth += 1,
                (TokenKind::Operator, ">") => depth -= 1,
                (TokenKind::Punctuation, ";" | "{" | "}") => return self.error("unclosed `<`"),
                _ => {}
            }
            self.pos += 1;
            if depth == 0 {
                return Ok(());
            }
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.error("nesting too deep");
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    // ---- declarations ----

    fn method(&mut self) -> PResult<MethodDecl> {
        let start = self.pos;
        let mod_start = self.pos;
        self.modifiers()?;
        let modifiers = (self.pos > mod_start).then(|| self.opaque(mod_start, self.pos));

        let type_params = if self.at("<") {
            let s = self.pos;
            self.skip_angles()?;
            Some(self.opaque(s, self.pos))
        } else {
            None
        };
        // Annotations may also follow type parameters.
        self.modifiers()?;

        let return_type = if self.at_ident() && self.at_n(1, "(") {
            None
        } else if self.peek().is_some_and(|t| t.text == "void" && t.kind == TokenKind::Keyword) {
            let t = self.bump();
            Some(TypeRef { span: t.span, text: "void".into(), simple_name: "void".into(), dims: 0, primitive: true })
        } else {
            Some(self.type_ref()?)
        };
        let name = self.ident()?;

        self.expect("(")?;
        let mut params = Vec::new();
        if !self.at(")") {
            loop {
                params.push(self.parameter()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        while self.at("[") && self.at_n(1, "]") {
            self.pos += 2;
        }
        let mut throws = Vec::new();
        if self.eat("throws") {
            loop {
                throws.push(self.type_ref()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        let body = if self.eat(";") {
            None
        } else if self.at("{") {
            Some(self.block()?)
        } else {
            return self.error("expected method body");
        };
        if self.peek().is_some() {
            return self.error("unexpected token after method body");
        }
        Ok(MethodDecl { span: self.span_from(start), modifiers, type_params, return_type, name, params, throws, body })
    }

    /// Skips annotations and modifier keywords; returns whether any were found.
    fn modifiers(&mut self) -> PResult<bool> {
        let start = self.pos;
        loop {
            if self.at("@") && !self.at_n(1, "interface") {
                self.annotation()?;
            } else if self.peek().is_some_and(|t| t.kind == TokenKind::Keyword && MODIFIERS.contains(&t.text))
                // `synchronized (x) {}` is a statement, not a modifier
                && !(self.at("synchronized") && self.at_n(1, "("))
            {
                self.pos += 1;
            } else {
                return Ok(self.pos > start);
            }
        }
    }

    fn annotation(&mut self) -> PResult<()> {
        self.expect("@")?;
        self.ident()?;
        while self.at(".") && self.at_ident_n(1) {
            self.pos += 2;
        }
        if self.at("(") {
            self.skip_balanced()?;
        }
        Ok(())
    }

    fn parameter(&mut self) -> PResult<Parameter> {
        let start = self.pos;
        self.modifiers()?;
        let ty = self.type_ref()?;
        self.modifiers()?;
        let varargs = self.eat("...");
        let name = self.ident()?;
        let mut ty = ty;
        while self.at("[") && self.at_n(1, "]") {
            self.pos += 2;
            ty.dims += 1;
        }
        Ok(Parameter { span: self.span_from(start), ty, varargs, name })
    }

    fn type_ref(&mut self) -> PResult<TypeRef> {
        let start = self.pos;
        let (simple_name, primitive) = self.type_base()?;
        let mut dims = 0;
        loop {
            let save = self.pos;
            while self.at("@") {
                self.annotation()?;
            }
            if self.at("[") && self.at_n(1, "]") {
                self.pos += 2;
                dims += 1;
            } else {
                self.pos = save;
                break;
            }
        }
        Ok(self.finish_type(start, simple_name, dims, primitive))
    }

    fn finish_type(&self, start: usize, simple_name: String, dims: usize, primitive: bool) -> TypeRef {
        let text = self.toks[start..self.pos].iter().map(|t| t.text).collect();
        TypeRef { span: self.span_from(start), text, simple_name, dims, primitive }
    }

    /// Primitive or (qualified, parameterized) class type without dimensions.
    fn type_base(&mut self) -> PResult<(String, bool)> {
        while self.at("@") {
            self.annotation()?;
        }
        if let Some(t) = self.peek() {
            if t.kind == TokenKind::Keyword && PRIMITIVES.contains(&t.text) {
                let name = t.text.to_string();
                self.pos += 1;
                return Ok((name, true));
            }
        }
        let mut last = self.ident()?;
        loop {
            if self.at("<") {
                self.type_args()?;
            }
            if self.at(".") && (self.at_ident_n(1) || self.at_n(1, "@")) {
                self.pos += 1;
                while self.at("@") {
                    self.annotation()?;
                }
                last = self.ident()?;
            } else {
                break;
            }
        }
        Ok((last.name, false))
    }

    fn type_args(&mut self) -> PResult<()> {
        self.expect("<")?;
        if self.eat(">") {
            return Ok(());
        }
        loop {
            while self.at("@") {
                self.annotation()?;
            }
            if self.eat("?") {
                if self.eat("extends") || self.eat("super") {
                    self.type_ref()?;
                }
            } else {
                self.type_ref()?;
            }
            if !self.eat(",") {
                break;
            }
        }
        self.expect(">")?;
        Ok(())
    }

    /// Speculatively checks whether a local variable declaration starts here.
    fn looks_like_decl(&mut self, allow_colon: bool) -> bool {
        let save = self.pos;
        let result = (|| -> PResult<bool> {
            if self.modifiers()? {
                return Ok(true);
            }
            self.type_ref()?;
            if !self.at_ident() {
                return Ok(false);
            }
            self.pos += 1;
            Ok(self.at_any(&["=", ";", ",", "["]) || (allow_colon && self.at(":")))
        })();
        self.pos = save;
        result.unwrap_or(false)
    }

    fn local_var_decl(&mut self) -> PResult<LocalVarDecl> {
        let start = self.pos;
        self.modifiers()?;
        let ty = self.type_ref()?;
        let mut declarators = Vec::new();
        loop {
            let dstart = self.pos;
            let name = self.ident()?;
            let mut dims = 0;
            while self.at("[") && self.at_n(1, "]") {
                self.pos += 2;
                dims += 1;
            }
            let init =
                if self.eat("=") { Some(if self.at("{") { self.array_init()? } else { self.expr()? }) } else { None };
            declarators.push(Declarator { span: self.span_from(dstart), name, dims, init });
            if !self.eat(",") {
                break;
            }
        }
        Ok(LocalVarDecl { span: self.span_from(start), ty, declarators })
    }

    /// Local class, interface, enum or record declaration as an opaque region.
    fn at_local_type_decl(&self) -> bool {
        let mut n = 0;
        while let Some(t) = self.peek_n(n) {
            match (t.kind, t.text) {
                (TokenKind::Keyword, "class" | "interface" | "enum") => return true,
                (TokenKind::Identifier, "record") => {
                    return self.at_ident_n(n + 1) && (self.at_n(n + 2, "(") || self.at_n(n + 2, "<"))
                }
                (TokenKind::Keyword, m) if MODIFIERS.contains(&m) => n += 1,
                (TokenKind::Operator, "@") => return false,
                _ => return false,
            }
        }
        false
    }

    fn local_type_decl(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        while !self.at("{") {
            if self.peek().is_none() || self.at(";") {
                return self.error("expected type body");
            }
            self.pos += 1;
        }
        self.skip_balanced()?;
        Ok(Stmt { span: self.span_from(start), kind: StmtKind::Other(self.opaque(start, self.pos)) })
    }

    // ---- statements ----

    fn block(&mut self) -> PResult<Block> {
        let start = self.pos;
        self.expect("{")?;
        let mut stmts = Vec::new();
        while !self.at("}") {
            if self.peek().is_none() {
                return self.error("expected `}`");
            }
            stmts.push(self.stmt()?);
        }
        self.pos += 1;
        Ok(Block { span: self.span_from(start), stmts })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        self.enter()?;
        let r = stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || self.stmt_inner());
        self.leave();
        r
    }

    fn stmt_inner(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        let Some(tok) = self.peek().copied() else {
            return self.error("expected statement");
        };
        let kind = match (tok.kind, tok.text) {
            (TokenKind::Punctuation, "{") => StmtKind::Block(self.block()?),
            (TokenKind::Punctuation, ";") => {
                self.pos += 1;
                StmtKind::Empty
            }
            (TokenKind::Keyword, "if") => {
                self.pos += 1;
                let cond = self.paren_expr()?;
                let then = Box::new(self.stmt()?);
                let otherwise = if self.eat("else") { Some(Box::new(self.stmt()?)) } else { None };
                StmtKind::If { cond, then, otherwise }
            }
            (TokenKind::Keyword, "for") => self.for_stmt()?,
            (TokenKind::Keyword, "while") => {
                self.pos += 1;
                let cond = self.paren_expr()?;
                let body = Box::new(self.stmt()?);
                StmtKind::While { cond, body }
            }
            (TokenKind::Keyword, "do") => {
                self.pos += 1;
                let body = Box::new(self.stmt()?);
                self.expect("while")?;
                let cond = self.paren_expr()?;
                self.expect(";")?;
                StmtKind::DoWhile { body, cond }
            }
            (TokenKind::Keyword, "try") => self.try_stmt()?,
            (TokenKind::Keyword, "switch") => {
                self.pos += 1;
                let selector = self.paren_expr()?;
                if !self.at("{") {
                    return self.error("expected switch body");
                }
                let s = self.pos;
                self.skip_balanced()?;
                StmtKind::Switch { selector, body: self.opaque(s, self.pos) }
            }
            (TokenKind::Keyword, "return") => {
                self.pos += 1;
                let value = if self.at(";") { None } else { Some(self.expr()?) };
                self.expect(";")?;
                StmtKind::Return(value)
            }
            (TokenKind::Keyword, "throw") => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(";")?;
                StmtKind::Throw(e)
            }
            (TokenKind::Keyword, kw @ ("break" | "continue")) => {
                self.pos += 1;
                let label = if self.at_ident() { Some(self.ident()?) } else { None };
                self.expect(";")?;
                if kw == "break" {
                    StmtKind::Break(label)
                } else {
                    StmtKind::Continue(label)
                }
            }
            (TokenKind::Keyword, "synchronized") if self.at_n(1, "(") => {
                self.pos += 1;
                let lock = self.paren_expr()?;
                let body = self.block()?;
                StmtKind::Synchronized { lock, body }
            }
            (TokenKind::Keyword, "assert") => {
                self.pos += 1;
                let cond = self.expr()?;
                let message = if self.eat(":") { Some(self.expr()?) } else { None };
                self.expect(";")?;
                StmtKind::Assert { cond, message }
            }
            (TokenKind::Identifier, _) if self.at_n(1, ":") => {
                let label = self.ident()?;
                self.pos += 1;
                let body = Box::new(self.stmt()?);
                StmtKind::Labeled { label, body }
            }
            _ if self.at_local_type_decl() => return self.local_type_decl(),
            _ if self.at("@") && {
                let save = self.pos;
                let is_type = self.modifiers().is_ok() && self.at_local_type_decl();
                self.pos = save;
                is_type
            } =>
            {
                return self.local_type_decl()
            }
            _ if self.looks_like_decl(false) => {
                let d = self.local_var_decl()?;
                self.expect(";")?;
                StmtKind::LocalVarDecl(d)
            }
            _ => {
                let e = self.expr()?;
                self.expect(";")?;
                StmtKind::ExprStmt(e)
            }
        };
        Ok(Stmt { span: self.span_from(start), kind })
    }

    fn paren_expr(&mut self) -> PResult<Expr> {
        self.expect("(")?;
        let e = self.expr()?;
        self.expect(")")?;
        Ok(e)
    }

    fn for_stmt(&mut self) -> PResult<StmtKind> {
        self.expect("for")?;
        self.expect("(")?;
        if self.looks_like_enhanced_for() {
            self.modifiers()?;
            let ty = self.type_ref()?;
            let var = self.ident()?;
            self.expect(":")?;
            let iterable = self.expr()?;
            self.expect(")")?;
            let body = Box::new(self.stmt()?);
            return Ok(StmtKind::EnhancedFor(EnhancedFor { ty, var, iterable, body }));
        }
        let init = if self.at(";") {
            ForInit::Exprs(Vec::new())
        } else if self.looks_like_decl(false) {
            ForInit::Decl(self.local_var_decl()?)
        } else {
            ForInit::Exprs(self.expr_list()?)
        };
        self.expect(";")?;
        let cond = if self.at(";") { None } else { Some(self.expr()?) };
        self.expect(";")?;
        let update = if self.at(")") { Vec::new() } else { self.expr_list()? };
        self.expect(")")?;
        let body = Box::new(self.stmt()?);
        Ok(StmtKind::BasicFor(BasicFor { init, cond, update, body }))
    }

    fn looks_like_enhanced_for(&mut self) -> bool {
        let save = self.pos;
        let r = (|| -> PResult<bool> {
            self.modifiers()?;
            self.type_ref()?;
            if !self.at_ident() {
                return Ok(false);
            }
            self.pos += 1;
            Ok(self.at(":"))
        })();
        self.pos = save;
        r.unwrap_or(false)
    }

    fn expr_list(&mut self) -> PResult<Vec<Expr>> {
        let mut out = vec![self.expr()?];
        while self.eat(",") {
            out.push(self.expr()?);
        }
        Ok(out)
    }

    fn try_stmt(&mut self) -> PResult<StmtKind> {
        self.expect("try")?;
        let mut resources = Vec::new();
        if self.eat("(") {
            while !self.at(")") {
                if self.looks_like_decl(false) {
                    resources.push(Resource::Decl(self.local_var_decl()?));
                } else {
                    resources.push(Resource::Expr(self.expr()?));
                }
                if !self.eat(";") {
                    break;
                }
            }
            self.expect(")")?;
        }
        let body = self.block()?;
        let mut catches = Vec::new();
        while self.at("catch") {
            let cstart = self.pos;
            self.pos += 1;
            self.expect("(")?;
            self.modifiers()?;
            let mut types = vec![self.type_ref()?];
            while self.eat("|") {
                types.push(self.type_ref()?);
            }
            let param = self.ident()?;
            self.expect(")")?;
            let cbody = self.block()?;
            catches.push(CatchClause { span: self.span_from(cstart), types, param, body: cbody });
        }
        let finally = if self.eat("finally") { Some(self.block()?) } else { None };
        if catches.is_empty() && finally.is_none() && resources.is_empty() {
            return self.error("expected `catch` or `finally`");
        }
        Ok(StmtKind::Try { resources, body, catches, finally })
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || self.assignment());
        self.leave();
        r
    }

    fn assignment(&mut self) -> PResult<Expr> {
        if self.lambda_ahead() {
            return self.lambda();
        }
        let start = self.pos;
        let lhs = self.conditional()?;
        if let Some((Op::Assign(op), n)) = self.peek_op() {
            self.pos += n;
            let rhs = self.expr()?;
            return Ok(Expr {
                span: self.span_from(start),
                kind: ExprKind::Assign { op, lhs: Box::new(lhs), rhs: Box::new(rhs) },
            });
        }
        Ok(lhs)
    }

    fn conditional(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let cond = self.binary(1)?;
        if !self.eat("?") {
            return Ok(cond);
        }
        let then = self.expr()?;
        self.expect(":")?;
        let otherwise = if self.lambda_ahead() { self.lambda()? } else { self.conditional()? };
        Ok(Expr {
            span: self.span_from(start),
            kind: ExprKind::Conditional { cond: Box::new(cond), then: Box::new(then), otherwise: Box::new(otherwise) },
        })
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let start = self.pos;
        let mut lhs = self.unary()?;
        loop {
            if self.at("instanceof") && 7 >= min_prec {
                self.pos += 1;
                self.eat("final");
                let ty = self.type_ref()?;
                let binding = if self.at_ident() { Some(self.ident()?) } else { None };
                lhs = Expr {
                    span: self.span_from(start),
                    kind: ExprKind::InstanceOf { expr: Box::new(lhs), ty, binding },
                };
                continue;
            }
            match self.peek_op() {
                Some((Op::Binary(op), n)) if op.precedence() >= min_prec => {
                    self.pos += n;
                    let rhs = self.binary(op.precedence() + 1)?;
                    lhs = Expr {
                        span: self.span_from(start),
                        kind: ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) },
                    };
                }
                _ => return Ok(lhs),
            }
        }
    }

    /// Reads a binary or assignment operator at the cursor, gluing split `>` pieces.
    fn peek_op(&self) -> Option<(Op, usize)> {
        let t = self.peek()?;
        if t.kind != TokenKind::Operator {
            return None;
        }
        if t.text == ">" {
            let mut text = String::from(">");
            let mut n = 1;
            let mut end = t.span.end;
            while let Some(next) = self.peek_n(n) {
                let glue = next.span.start == end
                    && next.kind == TokenKind::Operator
                    && ((next.text == ">" && !text.ends_with('=') && text.len() < 3)
                        || (next.text == "=" && !text.ends_with('=')));
                if !glue {
                    break;
                }
                text.push_str(next.text);
                end = next.span.end;
                n += 1;
            }
            if text == ">=" {
                return Some((Op::Binary(BinaryOp::Ge), n));
            }
            if let Some(b) = BinaryOp::from_token(&text) {
                return Some((Op::Binary(b), n));
            }
            return AssignOp::from_token(&text).map(|a| (Op::Assign(a), n));
        }
        if let Some(a) = AssignOp::from_token(t.text) {
            if t.text != "==" && t.text != "!=" && t.text != "<=" && t.text != ">=" {
                return Some((Op::Assign(a), 1));
            }
        }
        BinaryOp::from_token(t.text).map(|b| (Op::Binary(b), 1))
    }

    fn unary(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || self.unary_inner());
        self.leave();
        r
    }

    fn unary_inner(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let op = match self.peek().map(|t| (t.kind, t.text)) {
            Some((TokenKind::Operator, "++")) => Some(UnaryOp::Inc),
            Some((TokenKind::Operator, "--")) => Some(UnaryOp::Dec),
            Some((TokenKind::Operator, "+")) => Some(UnaryOp::Plus),
            Some((TokenKind::Operator, "-")) => Some(UnaryOp::Minus),
            Some((TokenKind::Operator, "!")) => Some(UnaryOp::Not),
            Some((TokenKind::Operator, "~")) => Some(UnaryOp::BitNot),
            _ => None,
        };
        if let Some(op) = op {
            self.pos += 1;
            let operand = self.unary()?;
            return Ok(Expr {
                span: self.span_from(start),
                kind: ExprKind::Unary { op, operand: Box::new(operand), prefix: true },
            });
        }
        if self.at("(") {
            if let Some(ty) = self.cast_type() {
                let expr = if self.lambda_ahead() { self.lambda()? } else { self.unary()? };
                return Ok(Expr { span: self.span_from(start), kind: ExprKind::Cast { ty, expr: Box::new(expr) } });
            }
        }
        let mut e = self.primary()?;
        loop {
            let op = if self.at("++") {
                UnaryOp::Inc
            } else if self.at("--") {
                UnaryOp::Dec
            } else {
                break;
            };
            self.pos += 1;
            e = Expr { span: self.span_from(start), kind: ExprKind::Unary { op, operand: Box::new(e), prefix: false } };
        }
        Ok(e)
    }

    /// If a cast `(Type)` starts here, consumes it and returns the type.
    fn cast_type(&mut self) -> Option<TypeRef> {
        let save = self.pos;
        self.pos += 1;
        let primitive_start = self.peek().is_some_and(|t| t.kind == TokenKind::Keyword && PRIMITIVES.contains(&t.text));
        let ty = match self.type_ref() {
            Ok(ty) => ty,
            Err(_) => {
                self.pos = save;
                return None;
            }
        };
        // intersection casts: (A & B)
        while self.at("&") {
            self.pos += 1;
            if self.type_ref().is_err() {
                self.pos = save;
                return None;
            }
        }
        if !self.eat(")") {
            self.pos = save;
            return None;
        }
        let is_cast = if primitive_start && ty.dims == 0 {
            // `(int) -x` is a cast, `(int) + x` too; anything expression-like follows.
            self.peek().is_some_and(|t| !matches!(t.kind, TokenKind::Punctuation) || t.text == "(")
                && !self.at_any(&[
                    "*",
                    "/",
                    "%",
                    "=",
                    "==",
                    "!=",
                    "<",
                    ">",
                    "&&",
                    "||",
                    "?",
                    ":",
                    "&",
                    "|",
                    "^",
                    "instanceof",
                ])
        } else {
            self.peek().is_some_and(|t| match t.kind {
                TokenKind::Identifier
                | TokenKind::NumericLiteral
                | TokenKind::StringLiteral
                | TokenKind::CharLiteral => true,
                TokenKind::Keyword => {
                    matches!(t.text, "this" | "super" | "new" | "true" | "false" | "null" | "switch")
                        || PRIMITIVES.contains(&t.text)
                }
                TokenKind::Punctuation => t.text == "(",
                TokenKind::Operator => t.text == "!" || t.text == "~",
                _ => false,
            })
        };
        if is_cast {
            Some(ty)
        } else {
            self.pos = save;
            None
        }
    }

    fn lambda_ahead(&self) -> bool {
        if self.at_ident() && self.at_n(1, "->") {
            return true;
        }
        if !self.at("(") {
            return false;
        }
        let mut depth = 0usize;
        let mut i = self.pos;
        while let Some(t) = self.toks.get(i) {
            if t.kind == TokenKind::Punctuation {
                match t.text {
                    "(" => depth += 1,
                    ")" => {
                        depth -= 1;
                        if depth == 0 {
                            return self
                                .toks
                                .get(i + 1)
                                .is_some_and(|n| n.kind == TokenKind::Operator && n.text == "->");
                        }
                    }
                    ";" | "{" | "}" => return false,
                    _ => {}
                }
            }
            i += 1;
        }
        false
    }

    fn lambda(&mut self) -> PResult<Expr> {
        let start = self.pos;
        if self.at("(") {
            self.skip_balanced()?;
        } else {
            self.pos += 1;
        }
        self.expect("->")?;
        if self.at("{") {
            self.skip_balanced()?;
        } else {
            self.expr()?;
        }
        Ok(Expr { span: self.span_from(start), kind: ExprKind::Lambda(self.opaque(start, self.pos)) })
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect("(")?;
        let mut args = Vec::new();
        if !self.at(")") {
            args = self.expr_list()?;
        }
        self.expect(")")?;
        Ok(args)
    }

    fn array_init(&mut self) -> PResult<Expr> {
        self.enter()?;
        let start = self.pos;
        self.expect("{")?;
        let mut items = Vec::new();
        while !self.at("}") {
            items.push(if self.at("{") { self.array_init()? } else { self.expr()? });
            if !self.eat(",") {
                break;
            }
        }
        self.expect("}")?;
        self.leave();
        Ok(Expr { span: self.span_from(start), kind: ExprKind::ArrayInit(items) })
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let Some(tok) = self.peek().copied() else {
            return self.error("expected expression");
        };
        let mut e = match (tok.kind, tok.text) {
            (TokenKind::NumericLiteral | TokenKind::StringLiteral | TokenKind::CharLiteral, _)
            | (TokenKind::Keyword, "true" | "false" | "null") => {
                self.pos += 1;
                Expr { span: tok.span, kind: ExprKind::Literal(tok.text.to_string()) }
            }
            (TokenKind::Keyword, kw @ ("this" | "super")) => {
                self.pos += 1;
                if self.at("(") {
                    let args = self.args()?;
                    Expr {
                        span: self.span_from(start),
                        kind: ExprKind::MethodCall {
                            receiver: None,
                            type_args: None,
                            name: Ident { name: kw.to_string(), span: tok.span },
                            args,
                        },
                    }
                } else if kw == "this" {
                    Expr { span: tok.span, kind: ExprKind::This }
                } else {
                    Expr { span: tok.span, kind: ExprKind::Super }
                }
            }
            (TokenKind::Identifier, _) => {
                let name = self.ident()?;
                if self.at("(") {
                    let args = self.args()?;
                    Expr {
                        span: self.span_from(start),
                        kind: ExprKind::MethodCall { receiver: None, type_args: None, name, args },
                    }
                } else {
                    Expr { span: name.span, kind: ExprKind::Name(name) }
                }
            }
            (TokenKind::Punctuation, "(") => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(")")?;
                Expr { span: self.span_from(start), kind: ExprKind::Paren(Box::new(inner)) }
            }
            (TokenKind::Punctuation, "{") => self.array_init()?,
            (TokenKind::Keyword, "new") => self.creation()?,
            (TokenKind::Keyword, "switch") => {
                self.pos += 1;
                if !self.at("(") {
                    return self.error("expected `(`");
                }
                self.skip_balanced()?;
                if !self.at("{") {
                    return self.error("expected switch body");
                }
                self.skip_balanced()?;
                Expr { span: self.span_from(start), kind: ExprKind::Other(self.opaque(start, self.pos)) }
            }
            (TokenKind::Keyword, kw) if PRIMITIVES.contains(&kw) || kw == "void" => {
                let ty = if kw == "void" {
                    self.pos += 1;
                    self.finish_type(start, "void".into(), 0, true)
                } else {
                    self.type_ref()?
                };
                if self.at(".") && self.at_n(1, "class") {
                    self.pos += 2;
                    Expr { span: self.span_from(start), kind: ExprKind::ClassLiteral(ty) }
                } else if self.at("::") {
                    Expr { span: ty.span, kind: ExprKind::TypeExpr(ty) }
                } else {
                    return self.error("expected `.class` or `::`");
                }
            }
            _ => return self.error("expected expression"),
        };
        loop {
            if self.at(".") {
                let next = self.peek_n(1).copied();
                match next.map(|t| (t.kind, t.text)) {
                    Some((TokenKind::Identifier, _)) => {
                        self.pos += 1;
                        let name = self.ident()?;
                        e = if self.at("(") {
                            let args = self.args()?;
                            Expr {
                                span: self.span_from(start),
                                kind: ExprKind::MethodCall { receiver: Some(Box::new(e)), type_args: None, name, args },
                            }
                        } else {
                            Expr {
                                span: self.span_from(start),
                                kind: ExprKind::FieldAccess { target: Box::new(e), field: name },
                            }
                        };
                    }
                    Some((TokenKind::Operator, "<")) => {
                        self.pos += 1;
                        let s = self.pos;
                        self.skip_angles()?;
                        let type_args = Some(self.opaque(s, self.pos));
                        let name = self.ident()?;
                        let args = self.args()?;
                        e = Expr {
                            span: self.span_from(start),
                            kind: ExprKind::MethodCall { receiver: Some(Box::new(e)), type_args, name, args },
                        };
                    }
                    Some((TokenKind::Keyword, "class")) => {
                        self.pos += 2;
                        let ty = self.type_from_expr(&e)?;
                        e = Expr { span: self.span_from(start), kind: ExprKind::ClassLiteral(ty) };
                    }
                    Some((TokenKind::Keyword, "this")) => {
                        self.pos += 2;
                        e = Expr { span: self.span_from(start), kind: ExprKind::This };
                    }
                    Some((TokenKind::Keyword, "super")) => {
                        self.pos += 2;
                        e = Expr { span: self.span_from(start), kind: ExprKind::Super };
                    }
                    Some((TokenKind::Keyword, "new")) => {
                        // Qualified inner-class creation: keep the whole thing opaque.
                        self.pos += 1;
                        self.creation()?;
                        e = Expr { span: self.span_from(start), kind: ExprKind::Other(self.opaque(start, self.pos)) };
                    }
                    _ => return self.error("expected member name"),
                }
            } else if self.at("[") {
                if self.at_n(1, "]") {
                    // `Type[].class` or `Type[]::new`
                    let mut ty = self.type_from_expr(&e)?;
                    while self.at("[") && self.at_n(1, "]") {
                        self.pos += 2;
                        ty.dims += 1;
                    }
                    ty.span = self.span_from(start);
                    ty.text = self.toks[start..self.pos].iter().map(|t| t.text).collect();
                    if self.at(".") && self.at_n(1, "class") {
                        self.pos += 2;
                        e = Expr { span: self.span_from(start), kind: ExprKind::ClassLiteral(ty) };
                    } else if self.at("::") {
                        e = Expr { span: ty.span, kind: ExprKind::TypeExpr(ty) };
                    } else {
                        return self.error("expected `.class` or `::`");
                    }
                } else {
                    self.pos += 1;
                    let index = self.expr()?;
                    self.expect("]")?;
                    e = Expr {
                        span: self.span_from(start),
                        kind: ExprKind::ArrayAccess { array: Box::new(e), index: Box::new(index) },
                    };
                }
            } else if self.at("::") {
                self.pos += 1;
                if self.at("<") {
                    self.skip_angles()?;
                }
                let name = if self.at("new") {
                    let t = self.bump();
                    Ident { name: "new".into(), span: t.span }
                } else {
                    self.ident()?
                };
                e = Expr { span: self.span_from(start), kind: ExprKind::MethodRef { target: Box::new(e), name } };
            } else {
                return Ok(e);
            }
        }
    }

    /// Reinterprets a dotted name expression as a type (for `.class` and `[]`).
    fn type_from_expr(&self, e: &Expr) -> PResult<TypeRef> {
        fn simple(e: &Expr) -> Option<String> {
            match &e.kind {
                ExprKind::Name(id) => Some(id.name.clone()),
                ExprKind::FieldAccess { target, field } => simple(target).map(|_| field.name.clone()),
                ExprKind::TypeExpr(t) => Some(t.simple_name.clone()),
                _ => None,
            }
        }
        match simple(e) {
            Some(name) => {
                let text =
                    crate::syntax::token::significant(&tokenize(e.span.slice(self.src))).map(|t| t.text).collect();
                Ok(TypeRef { span: e.span, text, simple_name: name, dims: 0, primitive: false })
            }
            None => self.error("expected type name"),
        }
    }

    fn creation(&mut self) -> PResult<Expr> {
        let start = self.pos;
        self.expect("new")?;
        if self.at("<") {
            self.skip_angles()?;
        }
        let tstart = self.pos;
        let (simple_name, primitive) = self.type_base()?;
        let ty = self.finish_type(tstart, simple_name, 0, primitive);
        if self.at("[") {
            let mut ty = ty;
            let mut dims = Vec::new();
            while self.at("[") {
                self.pos += 1;
                if self.eat("]") {
                    ty.dims += 1;
                } else {
                    dims.push(self.expr()?);
                    self.expect("]")?;
                    ty.dims += 1;
                }
            }
            let init = if self.at("{") { Some(Box::new(self.array_init()?)) } else { None };
            return Ok(Expr { span: self.span_from(start), kind: ExprKind::NewArray { ty, dims, init } });
        }
        let args = self.args()?;
        let body = if self.at("{") {
            let s = self.pos;
            self.skip_balanced()?;
            Some(self.opaque(s, self.pos))
        } else {
            None
        };
        Ok(Expr { span: self.span_from(start), kind: ExprKind::New { ty, args, body } })
    }
}

enum Op {
    Binary(BinaryOp),
    Assign(AssignOp),
}

fn is_symbolic(kind: TokenKind) -> bool {
    matches!(kind, TokenKind::Keyword | TokenKind::Operator | TokenKind::Punctuation)
}
