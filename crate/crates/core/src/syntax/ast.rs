//! Span-preserving syntax tree for a single Java method.
//!
//! The tree only models what loop-level role analysis needs. Lambdas,
//! anonymous class bodies, local type declarations and switch bodies are kept
//! as [`Opaque`] regions: their significant tokens are recorded but never
//! interpreted.

use super::token::{Span, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRef {
    pub span: Span,
    /// Source text of the type with whitespace and comments removed.
    pub text: String,
    /// Last identifier of the type name, without type arguments or dimensions.
    pub simple_name: String,
    pub dims: usize,
    pub primitive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpaqueToken {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
}

/// A region the parser deliberately does not look into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Opaque {
    pub span: Span,
    pub tokens: Vec<OpaqueToken>,
}

impl Opaque {
    pub fn identifiers(&self) -> impl Iterator<Item = &OpaqueToken> {
        self.tokens.iter().filter(|t| t.kind == TokenKind::Identifier)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxTree {
    pub method: MethodDecl,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub span: Span,
    /// Annotations and modifiers, kept as raw tokens.
    pub modifiers: Option<Opaque>,
    pub type_params: Option<Opaque>,
    /// `None` for constructors.
    pub return_type: Option<TypeRef>,
    pub name: Ident,
    pub params: Vec<Parameter>,
    pub throws: Vec<TypeRef>,
    /// `None` for abstract and native methods.
    pub body: Option<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parameter {
    pub span: Span,
    pub ty: TypeRef,
    pub varargs: bool,
    pub name: Ident,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub span: Span,
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub span: Span,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Declarator {
    pub span: Span,
    pub name: Ident,
    pub dims: usize,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalVarDecl {
    pub span: Span,
    pub ty: TypeRef,
    pub declarators: Vec<Declarator>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForInit {
    Decl(LocalVarDecl),
    Exprs(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicFor {
    pub init: ForInit,
    pub cond: Option<Expr>,
    pub update: Vec<Expr>,
    pub body: Box<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnhancedFor {
    pub ty: TypeRef,
    pub var: Ident,
    pub iterable: Expr,
    pub body: Box<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatchClause {
    pub span: Span,
    pub types: Vec<TypeRef>,
    pub param: Ident,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resource {
    Decl(LocalVarDecl),
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Block(Block),
    LocalVarDecl(LocalVarDecl),
    BasicFor(BasicFor),
    EnhancedFor(EnhancedFor),
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    DoWhile {
        body: Box<Stmt>,
        cond: Expr,
    },
    If {
        cond: Expr,
        then: Box<Stmt>,
        otherwise: Option<Box<Stmt>>,
    },
    ExprStmt(Expr),
    Try {
        resources: Vec<Resource>,
        body: Block,
        catches: Vec<CatchClause>,
        finally: Option<Block>,
    },
    Switch {
        selector: Expr,
        body: Opaque,
    },
    Return(Option<Expr>),
    Throw(Expr),
    Break(Option<Ident>),
    Continue(Option<Ident>),
    Labeled {
        label: Ident,
        body: Box<Stmt>,
    },
    Synchronized {
        lock: Expr,
        body: Block,
    },
    Assert {
        cond: Expr,
        message: Option<Expr>,
    },
    Empty,
    /// Local class/record/interface declarations.
    Other(Opaque),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Inc,
    Dec,
    Plus,
    Minus,
    Not,
    BitNot,
}

impl UnaryOp {
    pub fn as_str(self) -> &'static str {
        match self {
            UnaryOp::Inc => "++",
            UnaryOp::Dec => "--",
            UnaryOp::Plus => "+",
            UnaryOp::Minus => "-",
            UnaryOp::Not => "!",
            UnaryOp::BitNot => "~",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Or,
    And,
    BitOr,
    BitXor,
    BitAnd,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    Shl,
    Shr,
    UShr,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
}

impl BinaryOp {
    pub fn as_str(self) -> &'static str {
        use BinaryOp::*;
        match self {
            Or => "||",
            And => "&&",
            BitOr => "|",
            BitXor => "^",
            BitAnd => "&",
            Eq => "==",
            Ne => "!=",
            Lt => "<",
            Gt => ">",
            Le => "<=",
            Ge => ">=",
            Shl => "<<",
            Shr => ">>",
            UShr => ">>>",
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Rem => "%",
        }
    }

    pub fn from_token(op: &str) -> Option<Self> {
        use BinaryOp::*;
        Some(match op {
            "||" => Or,
            "&&" => And,
            "|" => BitOr,
            "^" => BitXor,
            "&" => BitAnd,
            "==" => Eq,
            "!=" => Ne,
            "<" => Lt,
            ">" => Gt,
            "<=" => Le,
            ">=" => Ge,
            "<<" => Shl,
            ">>" => Shr,
            ">>>" => UShr,
            "+" => Add,
            "-" => Sub,
            "*" => Mul,
            "/" => Div,
            "%" => Rem,
            _ => return None,
        })
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        use BinaryOp::*;
        match self {
            Or => 1,
            And => 2,
            BitOr => 3,
            BitXor => 4,
            BitAnd => 5,
            Eq | Ne => 6,
            Lt | Gt | Le | Ge => 7,
            Shl | Shr | UShr => 8,
            Add | Sub => 9,
            Mul | Div | Rem => 10,
        }
    }
}

/// `=` or a compound assignment operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AssignOp(pub Option<BinaryOp>);

impl AssignOp {
    pub fn from_token(op: &str) -> Option<Self> {
        if op == "=" {
            return Some(AssignOp(None));
        }
        let base = op.strip_suffix('=')?;
        match BinaryOp::from_token(base)? {
            b @ (BinaryOp::Add
            | BinaryOp::Sub
            | BinaryOp::Mul
            | BinaryOp::Div
            | BinaryOp::Rem
            | BinaryOp::Shl
            | BinaryOp::Shr
            | BinaryOp::UShr
            | BinaryOp::BitAnd
            | BinaryOp::BitOr
            | BinaryOp::BitXor) => Some(AssignOp(Some(b))),
            _ => None,
        }
    }

    pub fn as_string(self) -> String {
        match self.0 {
            None => "=".to_string(),
            Some(b) => format!("{}=", b.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub span: Span,
    pub kind: ExprKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    /// A simple name in expression position: a variable, field or type qualifier.
    Name(Ident),
    Literal(String),
    This,
    Super,
    Paren(Box<Expr>),
    FieldAccess {
        target: Box<Expr>,
        field: Ident,
    },
    ArrayAccess {
        array: Box<Expr>,
        index: Box<Expr>,
    },
    MethodCall {
        receiver: Option<Box<Expr>>,
        type_args: Option<Opaque>,
        name: Ident,
        args: Vec<Expr>,
    },
    New {
        ty: TypeRef,
        args: Vec<Expr>,
        body: Option<Opaque>,
    },
    NewArray {
        ty: TypeRef,
        dims: Vec<Expr>,
        init: Option<Box<Expr>>,
    },
    ArrayInit(Vec<Expr>),
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
        prefix: bool,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Assign {
        op: AssignOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Conditional {
        cond: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
    Cast {
        ty: TypeRef,
        expr: Box<Expr>,
    },
    InstanceOf {
        expr: Box<Expr>,
        ty: TypeRef,
        binding: Option<Ident>,
    },
    ClassLiteral(TypeRef),
    MethodRef {
        target: Box<Expr>,
        name: Ident,
    },
    /// A type used as a method-reference target, e.g. `int[]::new`.
    TypeExpr(TypeRef),
    Lambda(Opaque),
    /// Switch expressions.
    Other(Opaque),
}

impl Expr {
    /// Strips any number of enclosing parentheses.
    pub fn unparen(&self) -> &Expr {
        let mut e = self;
        while let ExprKind::Paren(inner) = &e.kind {
            e = inner;
        }
        e
    }

    pub fn as_name(&self) -> Option<&Ident> {
        match &self.unparen().kind {
            ExprKind::Name(id) => Some(id),
            _ => None,
        }
    }
}

/// Read-only traversal over a method tree.
///
/// Default methods recurse into children; overriding a method and not calling
/// the matching `walk_*` function prunes that subtree.
pub trait Visitor {
    fn visit_stmt(&mut self, stmt: &Stmt) {
        walk_stmt(self, stmt);
    }

    fn visit_expr(&mut self, expr: &Expr) {
        walk_expr(self, expr);
    }

    fn visit_opaque(&mut self, _opaque: &Opaque) {}
}

pub fn walk_method<V: Visitor + ?Sized>(v: &mut V, method: &MethodDecl) {
    if let Some(body) = &method.body {
        walk_block(v, body);
    }
}

pub fn walk_block<V: Visitor + ?Sized>(v: &mut V, block: &Block) {
    for s in &block.stmts {
        v.visit_stmt(s);
    }
}

fn walk_decl<V: Visitor + ?Sized>(v: &mut V, decl: &LocalVarDecl) {
    for d in &decl.declarators {
        if let Some(init) = &d.init {
            v.visit_expr(init);
        }
    }
}

pub fn walk_stmt<V: Visitor + ?Sized>(v: &mut V, stmt: &Stmt) {
    match &stmt.kind {
        StmtKind::Block(b) => walk_block(v, b),
        StmtKind::LocalVarDecl(d) => walk_decl(v, d),
        StmtKind::BasicFor(f) => {
            match &f.init {
                ForInit::Decl(d) => walk_decl(v, d),
                ForInit::Exprs(es) => es.iter().for_each(|e| v.visit_expr(e)),
            }
            if let Some(c) = &f.cond {
                v.visit_expr(c);
            }
            f.update.iter().for_each(|e| v.visit_expr(e));
            v.visit_stmt(&f.body);
        }
        StmtKind::EnhancedFor(f) => {
            v.visit_expr(&f.iterable);
            v.visit_stmt(&f.body);
        }
        StmtKind::While { cond, body } => {
            v.visit_expr(cond);
            v.visit_stmt(body);
        }
        StmtKind::DoWhile { body, cond } => {
            v.visit_stmt(body);
            v.visit_expr(cond);
        }
        StmtKind::If { cond, then, otherwise } => {
            v.visit_expr(cond);
            v.visit_stmt(then);
            if let Some(o) = otherwise {
                v.visit_stmt(o);
            }
        }
        StmtKind::ExprStmt(e) | StmtKind::Throw(e) => v.visit_expr(e),
        StmtKind::Try { resources, body, catches, finally } => {
            for r in resources {
                match r {
                    Resource::Decl(d) => walk_decl(v, d),
                    Resource::Expr(e) => v.visit_expr(e),
                }
            }
            walk_block(v, body);
            for c in catches {
                walk_block(v, &c.body);
            }
            if let Some(f) = finally {
                walk_block(v, f);
            }
        }
        StmtKind::Switch { selector, body } => {
            v.visit_expr(selector);
            v.visit_opaque(body);
        }
        StmtKind::Return(e) => {
            if let Some(e) = e {
                v.visit_expr(e);
            }
        }
        StmtKind::Labeled { body, .. } => v.visit_stmt(body),
        StmtKind::Synchronized { lock, body } => {
            v.visit_expr(lock);
            walk_block(v, body);
        }
        StmtKind::Assert { cond, message } => {
            v.visit_expr(cond);
            if let Some(m) = message {
                v.visit_expr(m);
            }
        }
        StmtKind::Other(o) => v.visit_opaque(o),
        StmtKind::Break(_) | StmtKind::Continue(_) | StmtKind::Empty => {}
    }
}

pub fn walk_expr<V: Visitor + ?Sized>(v: &mut V, expr: &Expr) {
    match &expr.kind {
        ExprKind::Name(_)
        | ExprKind::Literal(_)
        | ExprKind::This
        | ExprKind::Super
        | ExprKind::ClassLiteral(_)
        | ExprKind::TypeExpr(_) => {}
        ExprKind::Paren(e) | ExprKind::Cast { expr: e, .. } => v.visit_expr(e),
        ExprKind::FieldAccess { target, .. } | ExprKind::MethodRef { target, .. } => v.visit_expr(target),
        ExprKind::ArrayAccess { array, index } => {
            v.visit_expr(array);
            v.visit_expr(index);
        }
        ExprKind::MethodCall { receiver, args, .. } => {
            if let Some(r) = receiver {
                v.visit_expr(r);
            }
            args.iter().for_each(|a| v.visit_expr(a));
        }
        ExprKind::New { args, body, .. } => {
            args.iter().for_each(|a| v.visit_expr(a));
            if let Some(b) = body {
                v.visit_opaque(b);
            }
        }
        ExprKind::NewArray { dims, init, .. } => {
            dims.iter().for_each(|d| v.visit_expr(d));
            if let Some(i) = init {
                v.visit_expr(i);
            }
        }
        ExprKind::ArrayInit(items) => items.iter().for_each(|i| v.visit_expr(i)),
        ExprKind::Unary { operand, .. } => v.visit_expr(operand),
        ExprKind::Binary { lhs, rhs, .. } | ExprKind::Assign { lhs, rhs, .. } => {
            v.visit_expr(lhs);
            v.visit_expr(rhs);
        }
        ExprKind::Conditional { cond, then, otherwise } => {
            v.visit_expr(cond);
            v.visit_expr(then);
            v.visit_expr(otherwise);
        }
        ExprKind::InstanceOf { expr, .. } => v.visit_expr(expr),
        ExprKind::Lambda(o) | ExprKind::Other(o) => v.visit_opaque(o),
    }
}
