use super::{apply_patches, identifier_names, rename_patches, RenamedBinding, RewriteError};
use crate::binding::{resolve, SymbolTable};
use crate::syntax::{parse_method, ParseFailure};

/// splitmix64 generator; fully specified so picks are identical everywhere.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// 64-bit FNV-1a of the UTF-8 bytes of `text`.
pub fn stable_hash(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3))
}

/// Per-method seed: depends only on the global seed and the method id.
pub fn mix_seed(global_seed: u64, method_id: &str) -> u64 {
    global_seed ^ stable_hash(method_id)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformResult {
    pub source: String,
    pub renamed: Option<RenamedBinding>,
    pub seed_used: u64,
}

/// Renames one uniformly chosen renameable binding to the smallest fresh `varN`.
///
/// Candidates are all renameable parameters and locals in declaration order;
/// the pick is `splitmix64(mix_seed(global_seed, method_id)) mod |candidates|`.
pub fn transform_rename(
    source: &str,
    table: &SymbolTable,
    method_id: &str,
    global_seed: u64,
) -> Result<TransformResult, RewriteError> {
    let seed_used = mix_seed(global_seed, method_id);
    let candidates: Vec<_> = table.bindings.iter().filter(|b| b.renameable).collect();
    if candidates.is_empty() {
        return Ok(TransformResult { source: source.to_string(), renamed: None, seed_used });
    }
    let pick = SplitMix64::new(seed_used).next_u64() % candidates.len() as u64;
    let chosen = candidates[pick as usize];
    let taken = identifier_names(source);
    let new_name = (0u64..).map(|n| format!("var{n}")).find(|n| !taken.contains(n)).expect("finitely many identifiers");
    let patches = rename_patches(table, chosen.id, &new_name);
    Ok(TransformResult {
        source: apply_patches(source, &patches)?,
        renamed: Some(RenamedBinding { binding: chosen.id, old: chosen.name.clone(), new: new_name }),
        seed_used,
    })
}

/// Parse, resolve and transform raw method text.
pub fn transform_source(source: &str, method_id: &str, global_seed: u64) -> Result<TransformResult, ParseFailure> {
    let tree = parse_method(source).into_result()?;
    let table = resolve(&tree);
    Ok(transform_rename(source, &table, method_id, global_seed).expect("binding occurrences never overlap"))
}
