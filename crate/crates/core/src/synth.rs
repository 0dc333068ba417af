//! Deterministic generator of Java methods with known roles, for fixtures
//! and benchmarks.
//!
//! Methods are assembled from statement fragments. Each fragment knows which
//! of its variables are steppers or walkers and whether augmentation can
//! rename them, so every generated method carries its own ground truth.

use crate::corpus::{Corpus, MethodRecord, Origin, Provenance, Split, Status, TOOL_VERSION};
use crate::rewrite::SplitMix64;
use crate::roles::Role;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthMethod {
    pub id: String,
    pub name: String,
    pub source: String,
    /// Role-bearing variables by name, in source order.
    pub expected: Vec<(String, Role)>,
    /// Whether augmentation will change the method.
    pub augmentable: bool,
}

struct Rng(SplitMix64);

impl Rng {
    fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len())]
    }

    fn chance(&mut self, num: usize, den: usize) -> bool {
        self.below(den) < num
    }
}

const VERBS: &[&str] = &[
    "get", "set", "compute", "find", "count", "sum", "process", "build", "update", "load", "parse", "merge", "reverse",
    "print", "check", "collect", "sort", "copy", "scan", "render",
];
const NOUNS: &[&str] = &[
    "Items", "Total", "Names", "Values", "Index", "Size", "Matrix", "Line", "Words", "Keys", "Buffer", "Range", "Path",
    "Node", "Score", "Cache",
];
const PARAMS: &[(&str, &str)] = &[
    ("List<String>", "items"),
    ("int", "n"),
    ("int[]", "data"),
    ("Map<String, Integer>", "counts"),
    ("Collection<Integer>", "values"),
    ("Vector<String>", "names"),
    ("String", "text"),
    ("long", "limit"),
    ("int[][]", "grid"),
];
const STEP_NAMES: &[&str] = &[
    "i", "i", "i", "i", "i", "i", "j", "j", "k", "idx", "index", "pos", "count", "row", "col", "step", "offset", "size",
];
const STEP_TYPES: &[(&str, &str)] = &[
    ("int", "0"),
    ("int", "0"),
    ("int", "0"),
    ("int", "0"),
    ("long", "0L"),
    ("short", "0"),
    ("byte", "0"),
    ("double", "0.0"),
    ("float", "0f"),
    ("Integer", "0"),
    ("Long", "0L"),
];
const BOUNDS: &[&str] = &["n", "10", "data.length", "items.size()", "limit", "text.length()"];
/// The shift comes last so non-integral types can skip it.
const UPDATES: &[&str] =
    &["{v}++", "{v}++", "{v}++", "++{v}", "{v} += 2", "{v} += 1", "{v} = {v} + 1", "{v} *= 2", "{v} <<= 1"];
const ITER_NAMES: &[&str] = &["it", "iter", "iterator", "cursor", "walk"];
const ELEM_NAMES: &[&str] = &["s", "elem", "item", "name", "word", "value", "entry", "line", "x"];

struct Builder<'r> {
    rng: &'r mut Rng,
    lines: Vec<String>,
    taken: BTreeSet<String>,
    expected: Vec<(String, Role)>,
    augmentable: bool,
}

impl Builder<'_> {
    /// A method-wide unused name based on `base`.
    fn fresh(&mut self, base: &str) -> String {
        let mut name = base.to_string();
        let mut k = 2;
        while self.taken.contains(&name) {
            name = format!("{base}{k}");
            k += 1;
        }
        self.taken.insert(name.clone());
        name
    }

    fn fresh_from(&mut self, pool: &[&str]) -> String {
        let base = *self.rng.pick(pool);
        self.fresh(base)
    }

    fn line(&mut self, depth: usize, text: impl AsRef<str>) {
        self.lines.push(format!("{}{}", "    ".repeat(depth + 1), text.as_ref()));
    }

    fn role(&mut self, name: &str, role: Role, renameable: bool) {
        self.expected.push((name.to_string(), role));
        self.augmentable |= renameable;
    }

    fn update(&mut self, v: &str, integral: bool) -> String {
        let choices = if integral { UPDATES } else { &UPDATES[..UPDATES.len() - 1] };
        self.rng.pick(choices).replace("{v}", v)
    }

    // Role fragments; all of their role variables are renameable.

    fn counting_for(&mut self, depth: usize) {
        let v = self.fresh_from(STEP_NAMES);
        let (ty, zero) = *self.rng.pick(STEP_TYPES);
        let bound = *self.rng.pick(BOUNDS);
        let upd = self.update(&v, !matches!(ty, "double" | "float"));
        self.line(depth, format!("for ({ty} {v} = {zero}; {v} < {bound}; {upd}) {{"));
        self.role(&v, Role::Stepper, true);
        match self.rng.below(4) {
            0 => self.line(depth + 1, format!("total += {v};")),
            1 => self.line(depth + 1, format!("System.out.println(\"{v}=\" + {v});")),
            2 if depth < 2 => self.counting_for(depth + 1),
            _ => self.line(depth + 1, format!("process({v});")),
        }
        self.line(depth, "}");
    }

    fn halving_for(&mut self, depth: usize) {
        let v = self.fresh("size");
        let op = self.rng.pick(&["/", ">>"]);
        let rhs = if *op == "/" { "2" } else { "1" };
        self.line(depth, format!("for (int {v} = n; {v} > 0; {v} = {v} {op} {rhs}) {{"));
        self.line(depth + 1, format!("visit({v});"));
        self.line(depth, "}");
        self.role(&v, Role::Stepper, true);
    }

    fn two_pointer_for(&mut self, depth: usize) {
        let a = self.fresh("lo");
        let b = self.fresh("hi");
        self.line(depth, format!("for (int {a} = 0, {b} = data.length - 1; {a} < {b}; {a}++, {b}--) {{"));
        self.line(depth + 1, format!("swap(data, {a}, {b});"));
        self.line(depth, "}");
        self.role(&a, Role::Stepper, true);
        self.role(&b, Role::Stepper, true);
    }

    fn predeclared_for(&mut self, depth: usize) {
        let v = self.fresh_from(&["k", "p", "cnt"]);
        self.line(depth, format!("int {v};"));
        let upd = self.update(&v, true);
        self.line(depth, format!("for ({v} = 0; {v} < n; {upd}) {{"));
        self.line(depth + 1, "tick();");
        self.line(depth, "}");
        self.role(&v, Role::Stepper, true);
    }

    fn iterator_while(&mut self, depth: usize) {
        let it = self.fresh_from(ITER_NAMES);
        let ty = self.rng.pick(&["Iterator<String>", "ListIterator<String>"]);
        let call = if ty.starts_with("List") { "listIterator" } else { "iterator" };
        self.line(depth, format!("{ty} {it} = items.{call}();"));
        self.line(depth, format!("while ({it}.hasNext()) {{"));
        let e = self.fresh_from(ELEM_NAMES);
        self.line(depth + 1, format!("String {e} = {it}.next();"));
        self.line(depth + 1, format!("if ({e}.isEmpty()) {{ {it}.remove(); }}"));
        self.line(depth, "}");
        self.role(&it, Role::Walker, true);
    }

    fn enumeration_do(&mut self, depth: usize) {
        let e = self.fresh("en");
        self.line(depth, format!("Enumeration<String> {e} = names.elements();"));
        self.line(depth, "do {");
        self.line(depth + 1, format!("consume({e}.nextElement());"));
        self.line(depth, format!("}} while ({e}.hasMoreElements());"));
        self.role(&e, Role::Walker, true);
    }

    fn iterator_for(&mut self, depth: usize) {
        let it = self.fresh_from(ITER_NAMES);
        self.line(depth, format!("for (Iterator<Integer> {it} = values.iterator(); {it}.hasNext();) {{"));
        self.line(depth + 1, format!("total += {it}.next();"));
        self.line(depth, "}");
        self.role(&it, Role::Walker, true);
    }

    fn enhanced_for(&mut self, depth: usize) {
        let e = self.fresh_from(ELEM_NAMES);
        let (ty, src) =
            *self.rng.pick(&[("String", "items"), ("Integer", "values"), ("int", "data"), ("String", "names")]);
        let fin = if self.rng.chance(1, 5) { "final " } else { "" };
        self.line(depth, format!("for ({fin}{ty} {e} : {src}) {{"));
        self.line(depth + 1, format!("handle({e});"));
        self.line(depth, "}");
        self.role(&e, Role::Walker, true);
    }

    fn next_in_counted_loop(&mut self, depth: usize) {
        let it = self.fresh("source");
        let c = self.fresh("c");
        self.line(depth, format!("Iterator<Integer> {it} = values.iterator();"));
        self.line(depth, format!("for (int {c} = 0; {c} < 3; {c}++) {{"));
        self.line(depth + 1, format!("total += {it}.next();"));
        self.line(depth, "}");
        self.role(&it, Role::Walker, true);
        self.role(&c, Role::Stepper, true);
    }

    fn scanner_while(&mut self, depth: usize) {
        let sc = self.fresh("sc");
        self.line(depth, format!("Scanner {sc} = new Scanner(text);"));
        self.line(depth, format!("while ({sc}.hasNext()) {{"));
        self.line(depth + 1, format!("words.add({sc}.next());"));
        self.line(depth, "}");
        self.role(&sc, Role::Walker, true);
    }

    // Fragments without any role.

    fn plain(&mut self, depth: usize) {
        match self.rng.below(12) {
            0 => {
                let c = self.fresh("c");
                self.line(depth, format!("int {c} = 0;"));
                self.line(depth, format!("while ({c} < n) {{ {c}++; }}"));
            }
            1 => {
                let ch = self.fresh("ch");
                self.line(depth, format!("for (char {ch} = 'a'; {ch} <= 'z'; {ch}++) {{ letters.add({ch}); }}"));
            }
            2 => {
                let s = self.fresh("node");
                self.line(
                    depth,
                    format!("for (String {s} = first; {s} != null; {s} = next({s})) {{ seen.add({s}); }}"),
                );
            }
            3 => {
                let v = self.fresh("m");
                self.line(depth, format!("for (int {v} = 0; {v} < n; {v} = advance({v})) {{ mark({v}); }}"));
            }
            4 => {
                let v = self.fresh("bits");
                self.line(depth, format!("for (int {v} = n; {v} > 0; {v} >>>= 1) {{ parity ^= {v} & 1; }}"));
            }
            5 => {
                let it = self.fresh("head");
                self.line(depth, format!("Iterator<String> {it} = items.iterator();"));
                self.line(depth, format!("if ({it}.hasNext()) {{ first = {it}.next(); }}"));
            }
            6 => self.line(depth, "while (this.cursor.hasNext()) { this.cursor.next(); }"),
            7 => {
                let v = self.fresh("r");
                self.line(depth, format!("for (int {v} = 0; {v} < n;) {{ {v} = {v} + skip(); }}"));
            }
            8 => {
                let sb = self.fresh("sb");
                self.line(depth, format!("StringBuilder {sb} = new StringBuilder();"));
                self.line(depth, format!("{sb}.append(text).append(\"/* i */\");"));
                self.line(depth, format!("result = {sb}.toString();"));
            }
            9 => {
                self.line(depth, "try {");
                self.line(depth + 1, "open(text);");
                let e = self.fresh("ex");
                self.line(depth, format!("}} catch (IOException {e}) {{"));
                self.line(depth + 1, format!("log({e});"));
                self.line(depth, "}");
            }
            10 => {
                let t = self.fresh("tok");
                self.line(depth, format!("Tokenizer {t} = new Tokenizer(text);"));
                self.line(depth, format!("while (ready()) {{ {t}.next(); }}"));
            }
            _ => {
                let a = self.fresh("sum");
                self.line(depth, format!("int {a} = n * 2 + (int) limit;"));
                self.line(depth, format!("if ({a} > 10) {{ {a} -= 10; }} else {{ {a} += 1; }}"));
                self.line(depth, format!("total = {a};"));
            }
        }
    }

    // Cases that stress opaque regions, collisions and conflicts.

    fn hard(&mut self, depth: usize) {
        match self.rng.below(8) {
            0 => {
                // Captured by a lambda: detected but not renameable.
                let e = self.fresh("task");
                self.line(depth, format!("for (String {e} : items) {{ pool.submit(() -> run({e})); }}"));
                self.role(&e, Role::Walker, false);
            }
            1 => {
                // Loops inside lambdas are never analyzed.
                self.line(depth, "later(() -> { for (int inner = 0; inner < 2; inner++) { ping(inner); } });");
            }
            2 => {
                self.line(depth, "switch (mode) {");
                self.line(depth + 1, "case 1: for (int sw = 0; sw < 3; sw++) { beep(sw); } break;");
                self.line(depth + 1, "default: break;");
                self.line(depth, "}");
            }
            3 => {
                let v = self.fresh("j");
                let clash = self.fresh(&format!("stepper_{v}"));
                self.line(depth, format!("int {clash} = 7;"));
                self.line(depth, format!("for (int {v} = 0; {v} < {clash}; {v}++) {{ emit({v}); }}"));
                self.role(&v, Role::Stepper, false);
            }
            4 => {
                // One binding seen as both stepper and walker.
                let k = self.fresh("kk");
                self.line(depth, format!("Integer {k} = null;"));
                self.line(depth, format!("for ({k} = 0; {k} < 3; {k}++) {{ }}"));
                self.line(depth, format!("while ({k}.hasNext()) {{ {k}.next(); }}"));
                self.role(&k, Role::Stepper, true);
            }
            5 => {
                self.line(depth, "Runnable job = new Runnable() {");
                self.line(depth + 1, "public void run() { for (int anon = 0; anon < 4; anon++) { work(anon); } }");
                self.line(depth, "};");
            }
            6 => {
                let v = self.fresh("w");
                self.line(depth, format!("outer: for (int {v} = 0; {v} < n; {v} += 3) {{"));
                self.line(depth + 1, format!("if (stop({v})) break outer;"));
                self.line(depth, "}");
                self.role(&v, Role::Stepper, true);
            }
            _ => {
                // A user variable that merely looks augmented.
                let v = self.fresh("walker_total");
                self.line(depth, format!("int {v} = 0;"));
                self.line(depth, format!("{v} += n;"));
            }
        }
    }

    fn role_fragment(&mut self, depth: usize) {
        match self.rng.below(11) {
            0..=2 => self.counting_for(depth),
            3 => self.halving_for(depth),
            4 => self.two_pointer_for(depth),
            5 => self.predeclared_for(depth),
            6 => self.iterator_while(depth),
            7 => self.enumeration_do(depth),
            8 => self.iterator_for(depth),
            9 => self.next_in_counted_loop(depth),
            _ => {
                if self.rng.chance(1, 2) {
                    self.enhanced_for(depth)
                } else {
                    self.scanner_while(depth)
                }
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Plain,
    Roles,
    Mixed,
}

fn method(rng: &mut Rng, id: String, kind: Kind) -> SynthMethod {
    let name = format!("{}{}", rng.pick(VERBS), rng.pick(NOUNS));
    let mut params: Vec<(&str, &str)> = Vec::new();
    for _ in 0..rng.below(4) {
        let p = *rng.pick(PARAMS);
        if !params.iter().any(|q| q.1 == p.1) {
            params.push(p);
        }
    }
    let returns_int = rng.chance(1, 3);
    let mut b = Builder {
        rng,
        lines: Vec::new(),
        taken: params.iter().map(|p| p.1.to_string()).collect(),
        expected: Vec::new(),
        augmentable: false,
    };
    let fragments = 1 + b.rng.below(3);
    let role_at = b.rng.below(fragments);
    for f in 0..fragments {
        match kind {
            Kind::Plain => b.plain(0),
            Kind::Roles if f == role_at => b.role_fragment(0),
            Kind::Roles => {
                if b.rng.chance(1, 2) {
                    b.role_fragment(0)
                } else {
                    b.plain(0)
                }
            }
            Kind::Mixed => match b.rng.below(10) {
                0..=3 => b.role_fragment(0),
                4..=6 => b.plain(0),
                _ => b.hard(0),
            },
        }
    }
    if returns_int {
        b.line(0, "return total;");
    }
    let modifiers = *b.rng.pick(&["", "", "public ", "private ", "static ", "protected final "]);
    let ret = if returns_int { "int" } else { "void" };
    let params = params.iter().map(|(t, n)| format!("{t} {n}")).collect::<Vec<_>>().join(", ");
    let source = format!("{modifiers}{ret} {name}({params}) {{\n{}\n}}", b.lines.join("\n"));
    SynthMethod { id, name, source, expected: b.expected, augmentable: b.augmentable }
}

/// `count` methods mixing role fragments, role-free fragments and hard cases
/// (lambdas, switches, anonymous classes, name collisions, role conflicts).
pub fn generate(count: usize, seed: u64) -> Vec<SynthMethod> {
    let mut rng = Rng(SplitMix64::new(seed));
    (0..count).map(|k| method(&mut rng, format!("gen/{k:05}"), Kind::Mixed)).collect()
}

/// `count` methods of which exactly `augmentable` will be changed by
/// augmentation; no hard cases.
pub fn generate_with_augmented(count: usize, augmentable: usize, seed: u64) -> Vec<SynthMethod> {
    assert!(augmentable <= count, "cannot augment more methods than generated");
    let mut rng = Rng(SplitMix64::new(seed));
    // Partial Fisher-Yates picks which positions carry roles.
    let mut order: Vec<usize> = (0..count).collect();
    for k in 0..augmentable {
        let j = k + rng.below(count - k);
        order.swap(k, j);
    }
    let with_roles: BTreeSet<usize> = order[..augmentable].iter().copied().collect();
    (0..count)
        .map(|k| {
            let kind = if with_roles.contains(&k) { Kind::Roles } else { Kind::Plain };
            method(&mut rng, format!("fixture/{k:05}"), kind)
        })
        .collect()
}

/// Wraps generated methods as a corpus, all in `split`.
pub fn to_corpus(methods: &[SynthMethod], split: Split) -> Corpus {
    let mut records: Vec<MethodRecord> = methods
        .iter()
        .enumerate()
        .map(|(k, m)| MethodRecord {
            id: m.id.clone(),
            source: m.source.clone(),
            split,
            status: Status::CarriedOver,
            origin: Origin::Line(k + 1),
        })
        .collect();
    records.sort_by(|a, b| a.id.cmp(&b.id));
    Corpus {
        records,
        provenance: Provenance { source_path: "synthetic".into(), tool_version: TOOL_VERSION.into(), seed: 0 },
        ..Corpus::default()
    }
}
