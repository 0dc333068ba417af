//! Span-based source rewriting: role prefixes, their removal, and the
//! `varN` renaming noise.
//!
//! All rewrites replace identifier occurrences of whole bindings and leave
//! every other byte alone, so comments, literals and formatting survive.

mod augment;
mod patch;
mod strip;
mod transform;

pub use augment::{augment, augment_source, AugmentOutcome, AugmentResult, RenameMode, SkipReason, SkippedBinding};
pub use patch::{apply_patches, Patch};
pub use strip::{strip_roles, strip_source, Ambiguity, StripResult};
pub use transform::{mix_seed, stable_hash, transform_rename, transform_source, SplitMix64, TransformResult};

use crate::binding::{BindingId, SymbolTable};
use crate::syntax::{tokenize, ParseFailure, Span, TokenKind};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error("patches overlap: {0} and {1}")]
    Overlap(Span, Span),
    #[error("patch span {0} is out of bounds or splits a character")]
    InvalidSpan(Span),
    #[error("source does not parse: {0}")]
    Parse(#[from] ParseFailure),
    #[error("rename record for binding {binding} does not match the source (expected `{expected}`)")]
    SidecarMismatch { binding: BindingId, expected: String },
}

/// One binding renamed by a rewrite; also the sidecar record format.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RenamedBinding {
    pub binding: BindingId,
    pub old: String,
    pub new: String,
}

/// Every identifier token text in `source`, including names inside opaque
/// regions, types and method names.
pub fn identifier_names(source: &str) -> BTreeSet<String> {
    tokenize(source).into_iter().filter(|t| t.kind == TokenKind::Identifier).map(|t| t.text.to_string()).collect()
}

fn rename_patches(table: &SymbolTable, binding: BindingId, new_name: &str) -> Vec<Patch> {
    table.occurrences(binding).map(|spans| spans.iter().map(|s| Patch::new(*s, new_name)).collect()).unwrap_or_default()
}
