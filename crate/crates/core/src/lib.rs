//! Variable-role detection and role-aware rewriting for Java method corpora.
//!
//! The pipeline is parse → resolve → detect → rewrite, applied per method:
//!
//! * [`syntax`] lexes losslessly and parses one method into a span-preserving tree.
//! * [`binding`] resolves identifiers to parameter and local declarations.
//! * [`roles`] finds steppers and walkers.
//! * [`rewrite`] prefixes role-bearing variables, strips prefixes, and applies
//!   the `varN` renaming noise.
//! * [`corpus`] runs all of that over whole corpora and builds evaluation sets.
//! * [`evalmetrics`] scores method-name predictions at the sub-token level.
//! * [`synth`] generates methods with known roles for tests and benchmarks.

pub mod binding;
pub mod corpus;
pub mod evalmetrics;
pub mod rewrite;
pub mod roles;
pub mod syntax;
pub mod synth;

pub use binding::{resolve, Binding, BindingId, DeclKind, SymbolTable};
pub use syntax::{parse_method, shape_fingerprint, ParseOutcome, Span, SyntaxTree};
