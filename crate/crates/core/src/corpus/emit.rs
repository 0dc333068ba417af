use super::{Corpus, CorpusError, Format, MethodRecord, Piece, Provenance, Split, Status};
use crate::rewrite::RenamedBinding;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const METHODS_FILE: &str = "methods.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub id: String,
    pub split: Split,
    pub status: Status,
}

/// The JSON written next to every emitted corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Manifest {
    pub records: Vec<ManifestRecord>,
    pub counts_per_split: BTreeMap<Split, usize>,
    /// `null` when the corpus was never augmented by this tool.
    pub augmented: Option<BTreeMap<String, Vec<RenamedBinding>>>,
    #[serde(default)]
    pub transformed: BTreeMap<String, RenamedBinding>,
    pub provenance: Provenance,
}

impl Manifest {
    pub fn of(corpus: &Corpus) -> Manifest {
        Manifest {
            records: corpus
                .records
                .iter()
                .map(|r| ManifestRecord { id: r.id.clone(), split: r.split, status: r.status })
                .collect(),
            counts_per_split: Split::ALL.into_iter().map(|s| (s, corpus.count_split(s))).collect(),
            augmented: corpus.augmented.clone(),
            transformed: corpus.transformed.clone(),
            provenance: corpus.provenance.clone(),
        }
    }
}

#[derive(Serialize)]
struct JsonlOut<'a> {
    id: &'a str,
    code: &'a str,
    split: Split,
}

/// Writes `corpus` below the directory `out` together with `manifest.json`.
///
/// Dir-tree output rebuilds each input file around its (possibly rewritten)
/// methods. A file whose methods are all absent from the corpus is not
/// written, and absent methods are dropped from files that are. Records
/// without a source file go to `<split>/<id>.java`. Jsonl output is a single
/// `methods.jsonl` in record order.
pub fn emit(corpus: &Corpus, out: &Path, format: Format) -> Result<(), CorpusError> {
    fs::create_dir_all(out).map_err(|e| CorpusError::io(out, e))?;
    match format {
        Format::DirTree => emit_tree(corpus, out)?,
        Format::Jsonl => {
            let mut text = String::new();
            for r in &corpus.records {
                let line = JsonlOut { id: &r.id, code: &r.source, split: r.split };
                text.push_str(&serde_json::to_string(&line).expect("plain strings serialize"));
                text.push('\n');
            }
            write(&out.join(METHODS_FILE), &text)?;
        }
    }
    let mut manifest = serde_json::to_string_pretty(&Manifest::of(corpus)).expect("manifest serializes");
    manifest.push('\n');
    write(&out.join(MANIFEST_FILE), &manifest)
}

fn emit_tree(corpus: &Corpus, out: &Path) -> Result<(), CorpusError> {
    let by_id: HashMap<&str, &MethodRecord> = corpus.records.iter().map(|r| (r.id.as_str(), r)).collect();
    let mut written: BTreeSet<&str> = BTreeSet::new();
    let mut paths: BTreeSet<String> = BTreeSet::new();
    for file in &corpus.files {
        let slots: Vec<&str> = file.method_ids().collect();
        if !slots.is_empty() && !slots.iter().any(|id| by_id.contains_key(id)) {
            continue;
        }
        let mut text = String::new();
        for piece in &file.pieces {
            match piece {
                Piece::Text(t) => text.push_str(t),
                Piece::Method(id) => {
                    if let Some(r) = by_id.get(id.as_str()) {
                        text.push_str(&r.source);
                        written.insert(&r.id);
                    }
                }
            }
        }
        write(&out.join(&file.path), &text)?;
        paths.insert(file.path.clone());
    }
    for r in corpus.records.iter().filter(|r| !written.contains(r.id.as_str())) {
        let stem = sanitize(&r.id);
        let mut path = format!("{}/{stem}.java", r.split);
        let mut k = 1;
        while paths.contains(&path) {
            path = format!("{}/{stem}_{k}.java", r.split);
            k += 1;
        }
        write(&out.join(&path), &format!("{}\n", r.source))?;
        paths.insert(path);
    }
    Ok(())
}

fn sanitize(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

fn write(path: &Path, text: &str) -> Result<(), CorpusError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CorpusError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CorpusError::io(path, e))
}
