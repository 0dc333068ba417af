//! Lexical-scope resolution of identifiers to local declarations.
//!
//! Only parameters and locals become [`Binding`]s. Fields, statics, type
//! qualifiers and anything else not declared inside the method end up in
//! [`SymbolTable::free_names`]. Method names, field selectors after `.` and
//! labels are never variable occurrences.

use crate::syntax::ast::*;
use crate::syntax::token::Span;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Dense index of a binding within one method, in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BindingId(pub usize);

impl fmt::Display for BindingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeclKind {
    Parameter,
    Local,
    ForInit,
    EnhancedForVar,
    CaughtException,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub id: BindingId,
    pub name: String,
    pub kind: DeclKind,
    /// Declared type with declarator dimensions folded in; absent for
    /// multi-catch parameters.
    pub declared_type: Option<TypeRef>,
    pub decl_span: Span,
    pub scope_span: Span,
    /// False when the name is mentioned inside an opaque region within scope.
    pub renameable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BindingError {
    #[error("unknown binding id {0}")]
    UnknownBinding(BindingId),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    pub bindings: Vec<Binding>,
    /// Indexed by binding id; each list is ascending and starts with the declaration.
    occurrences: Vec<Vec<Span>>,
    /// Names used but never declared in the method.
    pub free_names: BTreeSet<String>,
    /// Expression-position identifiers that did not resolve to a binding.
    pub free_occurrences: Vec<(String, Span)>,
    /// Identifiers seen inside opaque regions.
    pub opaque_mentions: Vec<(String, Span)>,
    by_start: BTreeMap<usize, BindingId>,
}

impl SymbolTable {
    pub fn binding(&self, id: BindingId) -> Option<&Binding> {
        self.bindings.get(id.0)
    }

    pub fn occurrences(&self, id: BindingId) -> Result<&[Span], BindingError> {
        self.occurrences.get(id.0).map(Vec::as_slice).ok_or(BindingError::UnknownBinding(id))
    }

    /// Binding owning the identifier that starts at `span.start`, if any.
    pub fn binding_at(&self, span: Span) -> Option<BindingId> {
        self.by_start.get(&span.start).copied()
    }

    pub fn resolve_name(&self, ident: &Ident) -> Option<&Binding> {
        self.binding_at(ident.span).and_then(|id| self.binding(id))
    }

    pub fn total_occurrences(&self) -> usize {
        self.occurrences.iter().map(Vec::len).sum()
    }
}

pub fn occurrences(table: &SymbolTable, binding: &Binding) -> Result<Vec<Span>, BindingError> {
    table.occurrences(binding.id).map(<[Span]>::to_vec)
}

/// Resolves every identifier occurrence in `tree` under Java lexical scoping.
pub fn resolve(tree: &SyntaxTree) -> SymbolTable {
    let mut r = Resolver::default();
    let m = &tree.method;
    r.push(m.span.end);
    for p in &m.params {
        let mut ty = p.ty.clone();
        if p.varargs {
            ty.dims += 1;
        }
        r.declare(&p.name, DeclKind::Parameter, Some(ty));
    }
    if let Some(body) = &m.body {
        r.block(body);
    }
    r.pop();
    r.finish()
}

#[derive(Default)]
struct Resolver {
    table: SymbolTable,
    scopes: Vec<(usize, Vec<(String, BindingId)>)>,
}

impl Resolver {
    fn push(&mut self, end: usize) {
        self.scopes.push((end, Vec::new()));
    }

    fn pop(&mut self) {
        self.scopes.pop();
    }

    fn declare(&mut self, name: &Ident, kind: DeclKind, declared_type: Option<TypeRef>) {
        let id = BindingId(self.table.bindings.len());
        let (end, names) = self.scopes.last_mut().expect("declaration outside any scope");
        names.push((name.name.clone(), id));
        self.table.bindings.push(Binding {
            id,
            name: name.name.clone(),
            kind,
            declared_type,
            decl_span: name.span,
            scope_span: Span::new(name.span.start, *end),
            renameable: true,
        });
        self.table.occurrences.push(vec![name.span]);
        self.table.by_start.insert(name.span.start, id);
    }

    fn lookup(&self, name: &str) -> Option<BindingId> {
        self.scopes.iter().rev().flat_map(|(_, names)| names.iter().rev()).find(|(n, _)| n == name).map(|(_, id)| *id)
    }

    fn use_name(&mut self, ident: &Ident) {
        match self.lookup(&ident.name) {
            Some(id) => {
                self.table.occurrences[id.0].push(ident.span);
                self.table.by_start.insert(ident.span.start, id);
            }
            None => {
                self.table.free_names.insert(ident.name.clone());
                self.table.free_occurrences.push((ident.name.clone(), ident.span));
            }
        }
    }

    fn opaque(&mut self, o: &Opaque) {
        for t in o.identifiers() {
            self.table.free_names.insert(t.text.clone());
            self.table.opaque_mentions.push((t.text.clone(), t.span));
        }
    }

    fn block(&mut self, b: &Block) {
        self.push(b.span.end);
        for s in &b.stmts {
            self.stmt(s);
        }
        self.pop();
    }

    fn local_decl(&mut self, d: &LocalVarDecl, kind: DeclKind) {
        for decl in &d.declarators {
            let mut ty = d.ty.clone();
            ty.dims += decl.dims;
            self.declare(&decl.name, kind, Some(ty));
            if let Some(init) = &decl.init {
                self.expr(init);
            }
        }
    }

    /// Statement in a position where it cannot leak declarations (loop and if bodies).
    fn nested_stmt(&mut self, s: &Stmt) {
        self.push(s.span.end);
        self.stmt(s);
        self.pop();
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Block(b) => self.block(b),
            StmtKind::LocalVarDecl(d) => self.local_decl(d, DeclKind::Local),
            StmtKind::BasicFor(f) => {
                self.push(s.span.end);
                match &f.init {
                    ForInit::Decl(d) => self.local_decl(d, DeclKind::ForInit),
                    ForInit::Exprs(es) => es.iter().for_each(|e| self.expr(e)),
                }
                if let Some(c) = &f.cond {
                    self.expr(c);
                }
                f.update.iter().for_each(|e| self.expr(e));
                self.nested_stmt(&f.body);
                self.pop();
            }
            StmtKind::EnhancedFor(f) => {
                self.expr(&f.iterable);
                self.push(s.span.end);
                self.declare(&f.var, DeclKind::EnhancedForVar, Some(f.ty.clone()));
                self.nested_stmt(&f.body);
                self.pop();
            }
            StmtKind::While { cond, body } => {
                self.expr(cond);
                self.nested_stmt(body);
            }
            StmtKind::DoWhile { body, cond } => {
                self.nested_stmt(body);
                self.expr(cond);
            }
            StmtKind::If { cond, then, otherwise } => {
                self.expr(cond);
                self.nested_stmt(then);
                if let Some(o) = otherwise {
                    self.nested_stmt(o);
                }
            }
            StmtKind::ExprStmt(e) | StmtKind::Throw(e) => self.expr(e),
            StmtKind::Try { resources, body, catches, finally } => {
                self.push(body.span.end);
                for r in resources {
                    match r {
                        Resource::Decl(d) => self.local_decl(d, DeclKind::Local),
                        Resource::Expr(e) => self.expr(e),
                    }
                }
                self.block(body);
                self.pop();
                for c in catches {
                    self.push(c.span.end);
                    let ty = (c.types.len() == 1).then(|| c.types[0].clone());
                    self.declare(&c.param, DeclKind::CaughtException, ty);
                    self.block(&c.body);
                    self.pop();
                }
                if let Some(f) = finally {
                    self.block(f);
                }
            }
            StmtKind::Switch { selector, body } => {
                self.expr(selector);
                self.opaque(body);
            }
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    self.expr(e);
                }
            }
            StmtKind::Labeled { body, .. } => self.stmt(body),
            StmtKind::Synchronized { lock, body } => {
                self.expr(lock);
                self.block(body);
            }
            StmtKind::Assert { cond, message } => {
                self.expr(cond);
                if let Some(m) = message {
                    self.expr(m);
                }
            }
            StmtKind::Other(o) => self.opaque(o),
            StmtKind::Break(_) | StmtKind::Continue(_) | StmtKind::Empty => {}
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Name(id) => self.use_name(id),
            // `this.x` cannot be captured by a local `x`, so it is not a free name.
            ExprKind::FieldAccess { target, .. } => self.expr(target),
            ExprKind::InstanceOf { expr, ty, binding } => {
                self.expr(expr);
                if let Some(b) = binding {
                    self.declare(b, DeclKind::Local, Some(ty.clone()));
                }
            }
            ExprKind::Lambda(o) | ExprKind::Other(o) => self.opaque(o),
            ExprKind::New { args, body, .. } => {
                args.iter().for_each(|a| self.expr(a));
                if let Some(b) = body {
                    self.opaque(b);
                }
            }
            _ => {
                struct Children<'a>(&'a mut Resolver);
                impl Visitor for Children<'_> {
                    fn visit_expr(&mut self, e: &Expr) {
                        self.0.expr(e);
                    }
                    fn visit_opaque(&mut self, o: &Opaque) {
                        self.0.opaque(o);
                    }
                }
                walk_expr(&mut Children(self), e);
            }
        }
    }

    fn finish(mut self) -> SymbolTable {
        let mentions = std::mem::take(&mut self.table.opaque_mentions);
        for b in &mut self.table.bindings {
            if mentions.iter().any(|(n, sp)| *n == b.name && b.scope_span.contains(*sp)) {
                b.renameable = false;
            }
        }
        self.table.opaque_mentions = mentions;
        for occ in &mut self.table.occurrences {
            occ.sort();
        }
        self.table
    }
}
