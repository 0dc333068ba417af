use super::{apply_patches, rename_patches, RenamedBinding, RewriteError};
use crate::binding::{resolve, BindingId, SymbolTable};
use crate::roles::{detect_roles, Role, RoleReport};
use crate::syntax::parse_method;
use serde::Serialize;

/// A prefixed binding that the heuristic path refused to touch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ambiguity {
    pub binding: BindingId,
    pub name: String,
    pub reason: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripResult {
    pub source: String,
    pub restored: Vec<RenamedBinding>,
    pub ambiguous: Vec<Ambiguity>,
}

/// Removes role prefixes from `source`.
///
/// With `sidecar` (the rename records written by augmentation) exactly those
/// bindings are restored. Without it, a binding is restored when its prefix
/// matches the role detected for it and the bare name is free in its scope;
/// other prefixed bindings are reported as ambiguous and left alone.
pub fn strip_roles(
    source: &str,
    report: &RoleReport,
    table: &SymbolTable,
    sidecar: Option<&[RenamedBinding]>,
) -> Result<StripResult, RewriteError> {
    let mut patches = Vec::new();
    let mut restored = Vec::new();
    let mut ambiguous = Vec::new();
    match sidecar {
        Some(records) => {
            for rec in records {
                let matches = table.binding(rec.binding).is_some_and(|b| b.name == rec.new);
                if !matches {
                    return Err(RewriteError::SidecarMismatch { binding: rec.binding, expected: rec.new.clone() });
                }
                patches.extend(rename_patches(table, rec.binding, &rec.old));
                restored.push(rec.clone());
            }
        }
        None => {
            for b in &table.bindings {
                let Some((role, bare)) = Role::split_prefixed(&b.name) else { continue };
                let mut reason = None;
                if report.role_of(b.id) != Some(role) {
                    reason = Some("prefix does not match detected role");
                } else if !b.renameable {
                    reason = Some("used inside an opaque region");
                } else if table.free_names.contains(bare)
                    || table
                        .bindings
                        .iter()
                        .any(|o| o.id != b.id && o.name == bare && o.scope_span.overlaps(b.scope_span))
                {
                    reason = Some("bare name is already in scope");
                }
                match reason {
                    Some(reason) => ambiguous.push(Ambiguity { binding: b.id, name: b.name.clone(), reason }),
                    None => {
                        patches.extend(rename_patches(table, b.id, bare));
                        restored.push(RenamedBinding { binding: b.id, old: bare.to_string(), new: b.name.clone() });
                    }
                }
            }
        }
    }
    Ok(StripResult { source: apply_patches(source, &patches)?, restored, ambiguous })
}

/// Parses `source` and strips prefixes; unparseable input is an error.
pub fn strip_source(source: &str, sidecar: Option<&[RenamedBinding]>) -> Result<StripResult, RewriteError> {
    let tree = parse_method(source).into_result()?;
    let table = resolve(&tree);
    let report = detect_roles(&tree, &table);
    strip_roles(source, &report, &table, sidecar)
}
