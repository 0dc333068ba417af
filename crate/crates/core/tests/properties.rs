use proptest::prelude::*;
use rolemark_core::binding::resolve;
use rolemark_core::rewrite::{apply_patches, identifier_names, Patch};
use rolemark_core::syntax::ast::{walk_expr, walk_stmt, Expr, ExprKind, Stmt, StmtKind, Visitor};
use rolemark_core::syntax::{parse_method, shape_fingerprint, tokenize, Span};
use rolemark_core::synth::generate;

fn synth_source() -> impl Strategy<Value = String> {
    (any::<u64>(), 0..4usize).prop_map(|(seed, k)| generate(4, seed).swap_remove(k).source)
}

/// A generated method with a few characters spliced in somewhere.
fn mutated_source() -> impl Strategy<Value = String> {
    (synth_source(), any::<prop::sample::Index>(), "[\"'/*\\\\{}()<>;@\\n a-z0-9é]{0,6}").prop_map(|(src, at, junk)| {
        let bounds: Vec<usize> = src.char_indices().map(|(i, _)| i).chain([src.len()]).collect();
        let mut s = src;
        s.insert_str(bounds[at.index(bounds.len())], &junk);
        s
    })
}

fn any_source() -> impl Strategy<Value = String> {
    prop_oneof![synth_source(), mutated_source(), any::<String>(), "[ -~\\n]{0,200}"]
}

struct Nesting<'s> {
    src: &'s str,
    stack: Vec<Span>,
    problems: Vec<String>,
    names: usize,
}

impl Nesting<'_> {
    fn enter(&mut self, span: Span, what: &str) {
        if let Some(parent) = self.stack.last() {
            if !parent.contains(span) {
                self.problems.push(format!("{what} {span} escapes {parent}"));
            }
        }
        self.stack.push(span);
    }

    fn ident(&mut self, name: &str, span: Span) {
        if span.slice(self.src) != name {
            self.problems.push(format!("identifier {name} at {span} slices to {:?}", span.slice(self.src)));
        }
    }
}

impl Visitor for Nesting<'_> {
    fn visit_stmt(&mut self, s: &Stmt) {
        self.enter(s.span, "statement");
        if let StmtKind::EnhancedFor(f) = &s.kind {
            self.ident(&f.var.name, f.var.span);
        }
        walk_stmt(self, s);
        self.stack.pop();
    }

    fn visit_expr(&mut self, e: &Expr) {
        self.enter(e.span, "expression");
        match &e.kind {
            ExprKind::Name(id) => {
                self.names += 1;
                self.ident(&id.name, id.span);
            }
            ExprKind::MethodCall { name, .. } => self.ident(&name.name, name.span),
            _ => {}
        }
        walk_expr(self, e);
        self.stack.pop();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn tokens_rebuild_any_input(src in any_source()) {
        let toks = tokenize(&src);
        let joined: String = toks.iter().map(|t| t.text).collect();
        prop_assert_eq!(&joined, &src);
        prop_assert!(toks.iter().all(|t| !t.span.is_empty() && t.span.slice(&src) == t.text));
        prop_assert!(toks.windows(2).all(|w| w[0].span.end == w[1].span.start));
    }

    #[test]
    fn parsing_is_total(src in any_source()) {
        // Either variant is fine; reaching here without a panic is the property.
        let outcome = parse_method(&src);
        prop_assert!(outcome.tree().is_some() != outcome.into_result().is_err());
    }

    #[test]
    fn spans_nest_and_identifiers_slice(src in synth_source()) {
        let tree = parse_method(&src).into_result().unwrap();
        let method = &tree.method;
        let mut v = Nesting { src: &src, stack: vec![method.span], problems: Vec::new(), names: 0 };
        v.ident(&method.name.name, method.name.span);
        for p in &method.params {
            v.ident(&p.name.name, p.name.span);
            prop_assert!(method.span.contains(p.span));
        }
        rolemark_core::syntax::ast::walk_method(&mut v, method);
        prop_assert!(v.problems.is_empty(), "{:?}", v.problems);

        let table = resolve(&tree);
        for b in &table.bindings {
            let occ = table.occurrences(b.id).unwrap();
            prop_assert_eq!(occ[0], b.decl_span);
            prop_assert!(b.scope_span.contains(b.decl_span));
            for s in occ {
                prop_assert_eq!(s.slice(&src), b.name.as_str());
                prop_assert!(b.scope_span.contains(*s));
            }
        }
        // Every expression-position name is either a use of a binding or free.
        let uses = table.total_occurrences() - table.bindings.len();
        prop_assert_eq!(uses + table.free_occurrences.len(), v.names);
    }

    #[test]
    fn renaming_one_binding_keeps_shape(src in synth_source(), pick in any::<prop::sample::Index>()) {
        let tree = parse_method(&src).into_result().unwrap();
        let table = resolve(&tree);
        prop_assume!(!table.bindings.is_empty());
        let b = &table.bindings[pick.index(table.bindings.len())];
        prop_assume!(b.renameable);
        let taken = identifier_names(&src);
        let fresh = (0..).map(|k| format!("q{k}")).find(|n| !taken.contains(n)).unwrap();
        let patches: Vec<Patch> = table.occurrences(b.id).unwrap().iter().map(|s| Patch::new(*s, fresh.as_str())).collect();
        let renamed = apply_patches(&src, &patches).unwrap();

        let tree2 = parse_method(&renamed).into_result().unwrap();
        prop_assert_eq!(shape_fingerprint(&tree), shape_fingerprint(&tree2));
        let table2 = resolve(&tree2);
        prop_assert_eq!(table.bindings.len(), table2.bindings.len());
        for (x, y) in table.bindings.iter().zip(&table2.bindings) {
            prop_assert_eq!(x.kind, y.kind);
            prop_assert_eq!(table.occurrences(x.id).unwrap().len(), table2.occurrences(y.id).unwrap().len());
            let expected = if x.id == b.id { fresh.as_str() } else { x.name.as_str() };
            prop_assert_eq!(y.name.as_str(), expected);
        }
    }
}
