//! Stepper and walker detection.
//!
//! A *stepper* is a numeric for-loop variable advanced by arithmetic in the
//! loop's update clause. A *walker* either drives an iterator API
//! (`hasNext`/`next`, `hasMoreElements`/`nextElement`) in a loop, or is the
//! variable of an enhanced for loop. Detection is purely syntactic and
//! deterministic. When both roles are found for one binding, the stepper wins
//! and the clash is recorded in [`RoleReport::conflicts`].

use crate::binding::{BindingId, SymbolTable};
use crate::syntax::ast::*;
use crate::syntax::Span;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// Numeric primitives and their boxed forms. `char` is deliberately absent.
const NUMERIC_TYPES: &[&str] =
    &["byte", "short", "int", "long", "float", "double", "Byte", "Short", "Integer", "Long", "Float", "Double"];

const ITERATOR_TYPES: &[&str] = &["Iterator", "ListIterator", "Enumeration"];

/// Variable role tag. New roles extend this enum together with a detector and
/// a prefix in [`Role::prefix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Stepper,
    Walker,
}

impl Role {
    pub const ALL: [Role; 2] = [Role::Stepper, Role::Walker];

    pub fn prefix(self) -> &'static str {
        match self {
            Role::Stepper => "stepper_",
            Role::Walker => "walker_",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Stepper => "stepper",
            Role::Walker => "walker",
        }
    }

    /// Role whose prefix starts `name`, with the remainder.
    pub fn split_prefixed(name: &str) -> Option<(Role, &str)> {
        Role::ALL
            .into_iter()
            .find_map(|r| name.strip_prefix(r.prefix()).filter(|rest| !rest.is_empty()).map(|rest| (r, rest)))
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[allow(clippy::upper_case_acronyms)]
pub enum RuleId {
    #[serde(rename = "STEP_FOR_UPDATE")]
    StepForUpdate,
    #[serde(rename = "WALK_ITER_API")]
    WalkIterApi,
    #[serde(rename = "WALK_ENHANCED_FOR")]
    WalkEnhancedFor,
}

impl RuleId {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::StepForUpdate => "STEP_FOR_UPDATE",
            RuleId::WalkIterApi => "WALK_ITER_API",
            RuleId::WalkEnhancedFor => "WALK_ENHANCED_FOR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoleAssignment {
    pub binding: BindingId,
    pub role: Role,
    /// The loop statement that triggered the detection.
    pub evidence: Span,
    pub rule: RuleId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoleConflict {
    pub binding: BindingId,
    pub roles: Vec<Role>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RoleCounts {
    pub steppers: usize,
    pub walkers: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RoleReport {
    /// Sorted by binding id, at most one per binding.
    pub assignments: Vec<RoleAssignment>,
    pub conflicts: Vec<RoleConflict>,
    pub counts: RoleCounts,
}

impl RoleReport {
    pub fn role_of(&self, binding: BindingId) -> Option<Role> {
        self.assignments.iter().find(|a| a.binding == binding).map(|a| a.role)
    }
}

pub fn is_numeric_type(ty: &TypeRef) -> bool {
    ty.dims == 0 && NUMERIC_TYPES.contains(&ty.simple_name.as_str())
}

/// Calls `f` on every loop statement outside opaque regions, in source order.
fn for_each_loop(tree: &SyntaxTree, f: &mut dyn FnMut(&Stmt)) {
    struct Loops<'f>(&'f mut dyn FnMut(&Stmt));
    impl Visitor for Loops<'_> {
        fn visit_stmt(&mut self, s: &Stmt) {
            if matches!(
                s.kind,
                StmtKind::BasicFor(_) | StmtKind::EnhancedFor(_) | StmtKind::While { .. } | StmtKind::DoWhile { .. }
            ) {
                (self.0)(s);
            }
            walk_stmt(self, s);
        }
    }
    walk_method(&mut Loops(f), &tree.method);
}

/// Receiver bindings of no-argument calls named one of `names` anywhere under `stmt`/`expr`.
struct CallFinder<'t> {
    names: &'static [&'static str],
    table: &'t SymbolTable,
    found: Vec<BindingId>,
}

impl Visitor for CallFinder<'_> {
    fn visit_expr(&mut self, e: &Expr) {
        if let ExprKind::MethodCall { receiver: Some(r), name, args, .. } = &e.kind {
            if args.is_empty() && self.names.contains(&name.name.as_str()) {
                if let Some(b) = r.as_name().and_then(|id| self.table.binding_at(id.span)) {
                    self.found.push(b);
                }
            }
        }
        walk_expr(self, e);
    }
}

fn calls_in_expr(e: &Expr, names: &'static [&'static str], table: &SymbolTable) -> Vec<BindingId> {
    let mut v = CallFinder { names, table, found: Vec::new() };
    v.visit_expr(e);
    v.found
}

fn calls_in_stmt(s: &Stmt, names: &'static [&'static str], table: &SymbolTable) -> Vec<BindingId> {
    let mut v = CallFinder { names, table, found: Vec::new() };
    v.visit_stmt(s);
    v.found
}

fn refers_to(e: &Expr, b: BindingId, table: &SymbolTable) -> bool {
    e.as_name().and_then(|id| table.binding_at(id.span)) == Some(b)
}

fn mentions(e: &Expr, b: BindingId, table: &SymbolTable) -> bool {
    struct Mentions<'t> {
        b: BindingId,
        table: &'t SymbolTable,
        hit: bool,
    }
    impl Visitor for Mentions<'_> {
        fn visit_expr(&mut self, e: &Expr) {
            if let ExprKind::Name(id) = &e.kind {
                self.hit |= self.table.binding_at(id.span) == Some(self.b);
            }
            walk_expr(self, e);
        }
    }
    let mut m = Mentions { b, table, hit: false };
    m.visit_expr(e);
    m.hit
}

fn is_arithmetic(op: BinaryOp) -> bool {
    use BinaryOp::*;
    matches!(op, Add | Sub | Mul | Div | Rem | Shl | Shr)
}

/// `b++`, `--b`, `b op= e`, or `b = <arithmetic expression mentioning b>`.
fn is_arithmetic_update(e: &Expr, b: BindingId, table: &SymbolTable) -> bool {
    match &e.unparen().kind {
        ExprKind::Unary { op: UnaryOp::Inc | UnaryOp::Dec, operand, .. } => refers_to(operand, b, table),
        ExprKind::Assign { op: AssignOp(Some(op)), lhs, .. } => is_arithmetic(*op) && refers_to(lhs, b, table),
        ExprKind::Assign { op: AssignOp(None), lhs, rhs } => {
            refers_to(lhs, b, table)
                && matches!(&rhs.unparen().kind, ExprKind::Binary { op, .. } if is_arithmetic(*op))
                && mentions(rhs, b, table)
        }
        _ => false,
    }
}

pub fn detect_steppers(tree: &SyntaxTree, table: &SymbolTable) -> Vec<RoleAssignment> {
    let mut out = Vec::new();
    for_each_loop(tree, &mut |s| {
        let StmtKind::BasicFor(f) = &s.kind else { return };
        let candidates: Vec<BindingId> = match &f.init {
            ForInit::Decl(d) => d.declarators.iter().filter_map(|dec| table.binding_at(dec.name.span)).collect(),
            ForInit::Exprs(es) => es
                .iter()
                .filter_map(|e| match &e.unparen().kind {
                    ExprKind::Assign { lhs, .. } => lhs.as_name().and_then(|id| table.binding_at(id.span)),
                    _ => None,
                })
                .collect(),
        };
        for b in candidates {
            let numeric = table.binding(b).and_then(|x| x.declared_type.as_ref()).is_some_and(is_numeric_type);
            if numeric && f.update.iter().any(|u| is_arithmetic_update(u, b, table)) {
                out.push(RoleAssignment {
                    binding: b,
                    role: Role::Stepper,
                    evidence: s.span,
                    rule: RuleId::StepForUpdate,
                });
            }
        }
    });
    out
}

pub fn detect_walkers(tree: &SyntaxTree, table: &SymbolTable) -> Vec<RoleAssignment> {
    let mut out = Vec::new();
    let walker = |binding, evidence, rule| RoleAssignment { binding, role: Role::Walker, evidence, rule };
    for_each_loop(tree, &mut |s| {
        let (cond, body) = match &s.kind {
            StmtKind::EnhancedFor(f) => {
                if let Some(b) = table.binding_at(f.var.span) {
                    out.push(walker(b, s.span, RuleId::WalkEnhancedFor));
                }
                (None, &*f.body)
            }
            StmtKind::BasicFor(f) => (f.cond.as_ref(), &*f.body),
            StmtKind::While { cond, body } | StmtKind::DoWhile { body, cond } => (Some(cond), &**body),
            _ => return,
        };
        if let Some(cond) = cond {
            for b in calls_in_expr(cond, &["hasNext", "hasMoreElements"], table) {
                out.push(walker(b, s.span, RuleId::WalkIterApi));
            }
        }
        for b in calls_in_stmt(body, &["next", "nextElement"], table) {
            let iterator_typed = table
                .binding(b)
                .and_then(|x| x.declared_type.as_ref())
                .is_some_and(|t| t.dims == 0 && ITERATOR_TYPES.contains(&t.simple_name.as_str()));
            if iterator_typed {
                out.push(walker(b, s.span, RuleId::WalkIterApi));
            }
        }
    });
    out
}

/// Runs both detectors and resolves each binding to at most one role.
pub fn detect_roles(tree: &SyntaxTree, table: &SymbolTable) -> RoleReport {
    let mut by_binding: BTreeMap<BindingId, Vec<RoleAssignment>> = BTreeMap::new();
    for a in detect_steppers(tree, table).into_iter().chain(detect_walkers(tree, table)) {
        by_binding.entry(a.binding).or_default().push(a);
    }
    let mut report = RoleReport::default();
    for (binding, found) in by_binding {
        let mut roles: Vec<Role> = found.iter().map(|a| a.role).collect();
        roles.sort();
        roles.dedup();
        // Stepper sorts first, which is also the precedence order.
        let winner = roles[0];
        let chosen = found
            .into_iter()
            .filter(|a| a.role == winner)
            .min_by_key(|a| (a.evidence.start, a.rule))
            .expect("winner role has a detection");
        match winner {
            Role::Stepper => report.counts.steppers += 1,
            Role::Walker => report.counts.walkers += 1,
        }
        report.assignments.push(chosen);
        if roles.len() > 1 {
            report.conflicts.push(RoleConflict { binding, roles });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binding::resolve;
    use crate::syntax::parse_method;

    fn detect(src: &str) -> (RoleReport, SymbolTable) {
        let tree = parse_method(src).into_result().unwrap();
        let table = resolve(&tree);
        (detect_roles(&tree, &table), table)
    }

    fn named(src: &str) -> Vec<(String, Role, RuleId)> {
        let (r, t) = detect(src);
        r.assignments.iter().map(|a| (t.bindings[a.binding.0].name.clone(), a.role, a.rule)).collect()
    }

    fn s(x: &str) -> String {
        x.to_string()
    }

    #[test]
    fn simple_stepper() {
        assert_eq!(
            named("void f(){ for (int i=0; i<5; i++){} }"),
            vec![(s("i"), Role::Stepper, RuleId::StepForUpdate)]
        );
    }

    #[test]
    fn halving_stepper() {
        assert_eq!(
            named("void f(int n){ for (int size=n; size>0; size = size/2){} }"),
            vec![(s("size"), Role::Stepper, RuleId::StepForUpdate)]
        );
    }

    #[test]
    fn non_numeric_for_variable_is_not_a_stepper() {
        assert!(named("void f(String first){ for (String s = first; s != null; s = next(s)){} }").is_empty());
        assert!(named("void f(){ for (char c='a'; c<'z'; c++){} }").is_empty());
        assert!(named("void f(){ for (int[] a = x; a != null; a++){} }").is_empty());
    }

    #[test]
    fn update_must_be_arithmetic_on_the_variable() {
        assert!(named("void f(){ for (int i=0; i<5; j++){} }").is_empty());
        assert!(named("void f(){ for (int i=0; i<5; i = next(i)){} }").is_empty());
        assert!(named("void f(){ for (int i=0; i<5; i = j + 1){} }").is_empty());
        assert!(named("void f(){ for (int i=0; i<5; i >>>= 1){} }").is_empty());
        assert!(named("void f(){ for (int i=0; i<5; i |= 1){} }").is_empty());
        assert_eq!(named("void f(){ for (long i=0; i<5; i += 2){} }").len(), 1);
        assert_eq!(named("void f(){ for (Integer i=0; i<5; --i){} }").len(), 1);
        assert_eq!(named("void f(){ for (double d=1; d<5; d = (d * 1.5)){} }").len(), 1);
    }

    #[test]
    fn assigned_in_init_clause() {
        assert_eq!(
            named("void f(){ int k; for (k = 0; k < 3; k++) {} }"),
            vec![(s("k"), Role::Stepper, RuleId::StepForUpdate)]
        );
    }

    #[test]
    fn multiple_updates_give_multiple_steppers() {
        let got = named("void f(int[] a){ for (int i = 0, j = a.length - 1; i < j; i++, j--) {} }");
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn iterator_walkers() {
        assert_eq!(
            named("void f(List<String> l){ Iterator<String> iter = l.iterator(); while (iter.hasNext()){ iter.next(); } }"),
            vec![(s("iter"), Role::Walker, RuleId::WalkIterApi)]
        );
        assert_eq!(named("void f(Enumeration e){ do { e.nextElement(); } while (e.hasMoreElements()); }").len(), 1);
        // type-name rule: next() in a loop body, no hasNext in the condition
        assert_eq!(named("void f(ListIterator<A> it){ for (;;) { it.next(); } }").len(), 1);
        // next() outside a loop does not count
        assert!(named("void f(Iterator<A> it){ it.next(); }").is_empty());
        // next() on a non-iterator type does not count
        assert!(named("void f(Scanner sc){ while (true) { sc.next(); } }").is_empty());
    }

    #[test]
    fn enhanced_for_walker() {
        assert_eq!(
            named("void f(){ for (String elem: Elements) {} }"),
            vec![(s("elem"), Role::Walker, RuleId::WalkEnhancedFor)]
        );
    }

    #[test]
    fn empty_method() {
        assert_eq!(detect("void f(){}").0, RoleReport::default());
    }

    #[test]
    fn combined_examples() {
        let (r, _) = detect("void f(){ for (int i=0; i<5; i++){} for (String elem: Elements) {} }");
        assert_eq!(r.counts, RoleCounts { steppers: 1, walkers: 1 });
        assert_eq!(r.counts.steppers + r.counts.walkers, r.assignments.len());
    }

    #[test]
    fn conflict_prefers_stepper() {
        let src = "void f(Integer k){ for (k = 0; k < 3; k++) {} while (k.hasNext()) {} }";
        let (r, _) = detect(src);
        assert_eq!(r.assignments.len(), 1);
        assert_eq!(r.assignments[0].role, Role::Stepper);
        assert_eq!(r.conflicts, vec![RoleConflict { binding: BindingId(0), roles: vec![Role::Stepper, Role::Walker] }]);
    }

    #[test]
    fn same_role_twice_is_not_a_conflict() {
        let (r, _) = detect("void f(Iterator it){ while (it.hasNext()) { it.next(); } }");
        assert_eq!(r.assignments.len(), 1);
        assert!(r.conflicts.is_empty());
    }

    #[test]
    fn lambdas_are_not_inspected() {
        assert!(named("void f(){ run(() -> { for (int i=0; i<5; i++){} }); }").is_empty());
    }

    #[test]
    fn evidence_encloses_occurrence() {
        let src = "void f(){ x(); for (int i=0; i<5; i++){} }";
        let (r, t) = detect(src);
        let a = &r.assignments[0];
        assert_eq!(a.evidence.slice(src), "for (int i=0; i<5; i++){}");
        assert!(a.evidence.contains(t.bindings[0].decl_span));
    }

    #[test]
    fn prefix_split() {
        assert_eq!(Role::split_prefixed("stepper_i"), Some((Role::Stepper, "i")));
        assert_eq!(Role::split_prefixed("walker_it"), Some((Role::Walker, "it")));
        assert_eq!(Role::split_prefixed("stepper_"), None);
        assert_eq!(Role::split_prefixed("step"), None);
    }
}
