//! Alpha-equivalence digest of a method tree.
//!
//! Bound identifiers are written as their binding index, spans are dropped,
//! and everything else (free names, method names, types, literals, operators,
//! opaque token texts) is written verbatim. Two methods that differ only by a
//! consistent renaming of locals get the same fingerprint.

use super::ast::*;
use crate::binding::{resolve, SymbolTable};
use sha2::{Digest, Sha256};
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(pub [u8; 32]);

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fingerprint({self})")
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0[..8] {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

pub fn shape_fingerprint(tree: &SyntaxTree) -> Fingerprint {
    let table = resolve(tree);
    shape_fingerprint_with(tree, &table)
}

/// Same as [`shape_fingerprint`] with a precomputed symbol table.
pub fn shape_fingerprint_with(tree: &SyntaxTree, table: &SymbolTable) -> Fingerprint {
    let mut w = Writer { hasher: Sha256::new(), table };
    w.method(&tree.method);
    Fingerprint(w.hasher.finalize().into())
}

struct Writer<'a> {
    hasher: Sha256,
    table: &'a SymbolTable,
}

impl Writer<'_> {
    fn put(&mut self, s: &str) {
        self.hasher.update(s.as_bytes());
        self.hasher.update([0x1f]);
    }

    fn open(&mut self, tag: &str) {
        self.hasher.update(b"(");
        self.put(tag);
    }

    fn close(&mut self) {
        self.hasher.update(b")");
    }

    /// Identifier that may be a binding occurrence.
    fn var(&mut self, id: &Ident) {
        match self.table.binding_at(id.span) {
            Some(b) => self.put(&format!("#{}", b.0)),
            None => self.put(&id.name),
        }
    }

    fn ty(&mut self, t: &TypeRef) {
        self.put(&t.text);
    }

    fn opaque(&mut self, o: &Opaque) {
        self.open("opaque");
        for t in &o.tokens {
            self.put(&t.text);
        }
        self.close();
    }

    fn method(&mut self, m: &MethodDecl) {
        self.open("method");
        if let Some(o) = &m.modifiers {
            self.opaque(o);
        }
        if let Some(o) = &m.type_params {
            self.opaque(o);
        }
        match &m.return_type {
            Some(t) => self.ty(t),
            None => self.put("<ctor>"),
        }
        self.put(&m.name.name);
        for p in &m.params {
            self.open("param");
            self.ty(&p.ty);
            if p.varargs {
                self.put("...");
            }
            self.var(&p.name);
            self.close();
        }
        for t in &m.throws {
            self.ty(t);
        }
        if let Some(b) = &m.body {
            self.block(b);
        }
        self.close();
    }

    fn block(&mut self, b: &Block) {
        self.open("block");
        for s in &b.stmts {
            self.stmt(s);
        }
        self.close();
    }

    fn decl(&mut self, d: &LocalVarDecl) {
        self.open("decl");
        self.ty(&d.ty);
        for dec in &d.declarators {
            self.var(&dec.name);
            self.put(&dec.dims.to_string());
            if let Some(i) = &dec.init {
                self.expr(i);
            }
        }
        self.close();
    }

    fn opt_expr(&mut self, e: Option<&Expr>) {
        match e {
            Some(e) => self.expr(e),
            None => self.put("-"),
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Block(b) => self.block(b),
            StmtKind::LocalVarDecl(d) => self.decl(d),
            StmtKind::BasicFor(f) => {
                self.open("for");
                match &f.init {
                    ForInit::Decl(d) => self.decl(d),
                    ForInit::Exprs(es) => {
                        self.open("init");
                        es.iter().for_each(|e| self.expr(e));
                        self.close();
                    }
                }
                self.opt_expr(f.cond.as_ref());
                self.open("update");
                f.update.iter().for_each(|e| self.expr(e));
                self.close();
                self.stmt(&f.body);
                self.close();
            }
            StmtKind::EnhancedFor(f) => {
                self.open("foreach");
                self.ty(&f.ty);
                self.var(&f.var);
                self.expr(&f.iterable);
                self.stmt(&f.body);
                self.close();
            }
            StmtKind::While { cond, body } => {
                self.open("while");
                self.expr(cond);
                self.stmt(body);
                self.close();
            }
            StmtKind::DoWhile { body, cond } => {
                self.open("do");
                self.stmt(body);
                self.expr(cond);
                self.close();
            }
            StmtKind::If { cond, then, otherwise } => {
                self.open("if");
                self.expr(cond);
                self.stmt(then);
                if let Some(o) = otherwise {
                    self.stmt(o);
                }
                self.close();
            }
            StmtKind::ExprStmt(e) => {
                self.open("expr");
                self.expr(e);
                self.close();
            }
            StmtKind::Try { resources, body, catches, finally } => {
                self.open("try");
                for r in resources {
                    match r {
                        Resource::Decl(d) => self.decl(d),
                        Resource::Expr(e) => self.expr(e),
                    }
                }
                self.block(body);
                for c in catches {
                    self.open("catch");
                    c.types.iter().for_each(|t| self.ty(t));
                    self.var(&c.param);
                    self.block(&c.body);
                    self.close();
                }
                if let Some(f) = finally {
                    self.open("finally");
                    self.block(f);
                    self.close();
                }
                self.close();
            }
            StmtKind::Switch { selector, body } => {
                self.open("switch");
                self.expr(selector);
                self.opaque(body);
                self.close();
            }
            StmtKind::Return(e) => {
                self.open("return");
                self.opt_expr(e.as_ref());
                self.close();
            }
            StmtKind::Throw(e) => {
                self.open("throw");
                self.expr(e);
                self.close();
            }
            StmtKind::Break(l) | StmtKind::Continue(l) => {
                self.open(if matches!(s.kind, StmtKind::Break(_)) { "break" } else { "continue" });
                if let Some(l) = l {
                    self.put(&l.name);
                }
                self.close();
            }
            StmtKind::Labeled { label, body } => {
                self.open("label");
                self.put(&label.name);
                self.stmt(body);
                self.close();
            }
            StmtKind::Synchronized { lock, body } => {
                self.open("sync");
                self.expr(lock);
                self.block(body);
                self.close();
            }
            StmtKind::Assert { cond, message } => {
                self.open("assert");
                self.expr(cond);
                self.opt_expr(message.as_ref());
                self.close();
            }
            StmtKind::Empty => self.put(";"),
            StmtKind::Other(o) => self.opaque(o),
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Name(id) => self.var(id),
            ExprKind::Literal(l) => self.put(l),
            ExprKind::This => self.put("this"),
            ExprKind::Super => self.put("super"),
            ExprKind::Paren(inner) => {
                self.open("paren");
                self.expr(inner);
                self.close();
            }
            ExprKind::FieldAccess { target, field } => {
                self.open(".");
                self.expr(target);
                self.put(&field.name);
                self.close();
            }
            ExprKind::ArrayAccess { array, index } => {
                self.open("[]");
                self.expr(array);
                self.expr(index);
                self.close();
            }
            ExprKind::MethodCall { receiver, type_args, name, args } => {
                self.open("call");
                match receiver {
                    Some(r) => self.expr(r),
                    None => self.put("-"),
                }
                if let Some(t) = type_args {
                    self.opaque(t);
                }
                self.put(&name.name);
                args.iter().for_each(|a| self.expr(a));
                self.close();
            }
            ExprKind::New { ty, args, body } => {
                self.open("new");
                self.ty(ty);
                args.iter().for_each(|a| self.expr(a));
                if let Some(b) = body {
                    self.opaque(b);
                }
                self.close();
            }
            ExprKind::NewArray { ty, dims, init } => {
                self.open("newarray");
                self.ty(ty);
                self.put(&ty.dims.to_string());
                dims.iter().for_each(|d| self.expr(d));
                if let Some(i) = init {
                    self.expr(i);
                }
                self.close();
            }
            ExprKind::ArrayInit(items) => {
                self.open("{}");
                items.iter().for_each(|i| self.expr(i));
                self.close();
            }
            ExprKind::Unary { op, operand, prefix } => {
                self.open(if *prefix { "pre" } else { "post" });
                self.put(op.as_str());
                self.expr(operand);
                self.close();
            }
            ExprKind::Binary { op, lhs, rhs } => {
                self.open(op.as_str());
                self.expr(lhs);
                self.expr(rhs);
                self.close();
            }
            ExprKind::Assign { op, lhs, rhs } => {
                self.open(&op.as_string());
                self.expr(lhs);
                self.expr(rhs);
                self.close();
            }
            ExprKind::Conditional { cond, then, otherwise } => {
                self.open("?:");
                self.expr(cond);
                self.expr(then);
                self.expr(otherwise);
                self.close();
            }
            ExprKind::Cast { ty, expr } => {
                self.open("cast");
                self.ty(ty);
                self.expr(expr);
                self.close();
            }
            ExprKind::InstanceOf { expr, ty, binding } => {
                self.open("instanceof");
                self.expr(expr);
                self.ty(ty);
                if let Some(b) = binding {
                    self.var(b);
                }
                self.close();
            }
            ExprKind::ClassLiteral(t) => {
                self.open("class");
                self.ty(t);
                self.close();
            }
            ExprKind::MethodRef { target, name } => {
                self.open("::");
                self.expr(target);
                self.put(&name.name);
                self.close();
            }
            ExprKind::TypeExpr(t) => self.ty(t),
            ExprKind::Lambda(o) | ExprKind::Other(o) => self.opaque(o),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_method;

    fn fp(src: &str) -> Fingerprint {
        shape_fingerprint(&parse_method(src).into_result().unwrap())
    }

    #[test]
    fn alpha_equivalent_methods_match() {
        assert_eq!(fp("void f(){int i;i++;}"), fp("void f(){int j;j++;}"));
        assert_eq!(fp("void f(){int i;i++;}"), fp("void f() {\n  int i;  // c\n  i++;\n}"));
    }

    #[test]
    fn structure_changes_are_detected() {
        assert_ne!(fp("void f(){int i;i++;}"), fp("void f(){int i;i++;i++;}"));
        assert_ne!(fp("void f(){int i;i++;}"), fp("void f(){int i;i--;}"));
        assert_ne!(fp("void f(){i++;}"), fp("void f(){j++;}"), "free names are not alpha-renamed");
        assert_ne!(fp("void f(){a.x();}"), fp("void f(){a.y();}"));
    }

    #[test]
    fn renaming_is_not_collapsing() {
        // two bindings merged into one name would change binding indices
        assert_ne!(fp("void f(int a, int b){ a = b; }"), fp("void f(int a, int b){ a = a; }"));
    }
}
