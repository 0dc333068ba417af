use super::{apply_patches, identifier_names, rename_patches, RenamedBinding, RewriteError};
use crate::binding::{resolve, BindingId, SymbolTable};
use crate::roles::{detect_roles, Role, RoleReport};
use crate::syntax::{parse_method, ParseFailure};
use serde::Serialize;
use std::collections::BTreeSet;

/// How role prefixes are applied.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum RenameMode {
    /// Rename exactly the occurrences of the role-bearing binding.
    #[default]
    BindingAware,
    /// Rename every binding that shares the role-bearing binding's name.
    NameBased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipReason {
    NameCollision,
    NonRenameableOpaque,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedBinding {
    pub binding: BindingId,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentResult {
    pub source: String,
    pub changed: bool,
    pub renamed: Vec<RenamedBinding>,
    pub skipped: Vec<SkippedBinding>,
}

/// Prefixes every occurrence of each role-bearing binding with its role.
///
/// `report` and `table` must come from `source`. A binding is skipped when
/// its prefixed name already appears anywhere in the method, or when its
/// name is used inside an opaque region within its scope.
pub fn augment(
    source: &str,
    report: &RoleReport,
    table: &SymbolTable,
    mode: RenameMode,
) -> Result<AugmentResult, RewriteError> {
    let taken = identifier_names(source);
    let mut done: BTreeSet<BindingId> = BTreeSet::new();
    let mut renamed = Vec::new();
    let mut skipped = Vec::new();
    let mut patches = Vec::new();

    for a in &report.assignments {
        if done.contains(&a.binding) {
            continue;
        }
        let Some(binding) = table.binding(a.binding) else { continue };
        let new_name = format!("{}{}", a.role.prefix(), binding.name);
        let targets: Vec<BindingId> = match mode {
            RenameMode::BindingAware => vec![binding.id],
            RenameMode::NameBased => table
                .bindings
                .iter()
                .filter(|b| b.name == binding.name && !done.contains(&b.id))
                .map(|b| b.id)
                .collect(),
        };
        if targets.iter().any(|id| !table.bindings[id.0].renameable) {
            skipped.push(SkippedBinding { binding: a.binding, reason: SkipReason::NonRenameableOpaque });
            continue;
        }
        if taken.contains(&new_name) {
            skipped.push(SkippedBinding { binding: a.binding, reason: SkipReason::NameCollision });
            continue;
        }
        for id in targets {
            done.insert(id);
            patches.extend(rename_patches(table, id, &new_name));
            renamed.push(RenamedBinding { binding: id, old: binding.name.clone(), new: new_name.clone() });
        }
    }
    renamed.sort();
    let source = apply_patches(source, &patches)?;
    Ok(AugmentResult { changed: !renamed.is_empty(), source, renamed, skipped })
}

/// Result of running detection and augmentation on raw method text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentOutcome {
    pub report: RoleReport,
    pub result: AugmentResult,
}

impl AugmentOutcome {
    pub fn renamed_with_role(&self) -> impl Iterator<Item = (Role, &RenamedBinding)> {
        self.result.renamed.iter().filter_map(|r| Role::split_prefixed(&r.new).map(|(role, _)| (role, r)))
    }
}

/// Parse, resolve, detect and augment in one go.
pub fn augment_source(source: &str, mode: RenameMode) -> Result<AugmentOutcome, ParseFailure> {
    let tree = parse_method(source).into_result()?;
    let table = resolve(&tree);
    let report = detect_roles(&tree, &table);
    let result = augment(source, &report, &table, mode).expect("binding occurrences never overlap");
    Ok(AugmentOutcome { report, result })
}
