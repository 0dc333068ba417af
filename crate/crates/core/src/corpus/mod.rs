//! Corpus-scale processing: ingest, per-method pipelines, evaluation suites,
//! statistics and emission.
//!
//! A [`Corpus`] is an ordered set of [`MethodRecord`]s (lexicographic by id)
//! plus enough context to write it back out: file templates for methods that
//! came from `.java` files, and the rename sidecars produced by augmentation
//! and transformation.

mod detect;
mod emit;
mod ingest;
mod pipeline;
mod scan;
mod stats;

pub use detect::{detect_all, MethodRoles, NamedAssignment, NamedConflict};
pub use emit::{emit, Manifest, ManifestRecord, MANIFEST_FILE, METHODS_FILE};
pub use ingest::{detect_format, ingest, ingest_dir, ingest_jsonl, parse_jsonl};
pub use pipeline::{
    build_eval_suite, filter_pair, run_augment, run_transform, EvalSuite, SuiteOptions, TransformSummary,
    INDEPENDENT_SEED_SALT,
};
pub use scan::member_spans;
pub use stats::{stats, NameCount, SplitStats, StatsReport};

use crate::rewrite::RenamedBinding;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

pub const TOOL_VERSION: &str = concat!("rolemark ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }

    /// Split named by a top-level directory, accepting common spellings.
    pub fn from_dir_name(name: &str) -> Option<Split> {
        match name.to_ascii_lowercase().as_str() {
            "train" | "training" => Some(Split::Train),
            "val" | "valid" | "validation" | "dev" => Some(Split::Val),
            "test" | "testing" => Some(Split::Test),
            _ => None,
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Processed,
    ParseFailed,
    CarriedOver,
}

/// Where a record's text lives in the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    /// A method cut out of `file` by the member scanner.
    Member { file: String },
    /// A file the scanner could not split; the record is the whole file.
    WholeFile { file: String },
    /// A jsonl line.
    Line(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodRecord {
    pub id: String,
    pub source: String,
    pub split: Split,
    pub status: Status,
    pub origin: Origin,
}

impl MethodRecord {
    /// Whole-file records are never fed to the method parser.
    pub fn is_method(&self) -> bool {
        !matches!(self.origin, Origin::WholeFile { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece {
    Text(String),
    Method(String),
}

/// A `.java` file with its methods replaced by record-id slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileTemplate {
    /// Relative to the corpus root, `/`-separated.
    pub path: String,
    pub pieces: Vec<Piece>,
}

impl FileTemplate {
    pub fn method_ids(&self) -> impl Iterator<Item = &str> {
        self.pieces.iter().filter_map(|p| match p {
            Piece::Method(id) => Some(id.as_str()),
            Piece::Text(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Provenance {
    pub source_path: String,
    pub tool_version: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    /// Sorted by id; ids are unique.
    pub records: Vec<MethodRecord>,
    /// Sorted by path. Empty for jsonl input.
    pub files: Vec<FileTemplate>,
    /// Augmentation sidecar. `None` means unknown (for example a corpus read
    /// without a manifest), which makes [`stats`] re-detect.
    pub augmented: Option<BTreeMap<String, Vec<RenamedBinding>>>,
    pub transformed: BTreeMap<String, RenamedBinding>,
    pub provenance: Provenance,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|r| r.id.as_str())
    }

    pub fn get(&self, id: &str) -> Option<&MethodRecord> {
        self.records.binary_search_by(|r| r.id.as_str().cmp(id)).ok().map(|i| &self.records[i])
    }

    pub fn count_split(&self, split: Split) -> usize {
        self.records.iter().filter(|r| r.split == split).count()
    }

    /// The records of one split, keeping templates and sidecars consistent.
    pub fn split_only(&self, split: Split) -> Corpus {
        let ids: BTreeSet<&str> = self.records.iter().filter(|r| r.split == split).map(|r| r.id.as_str()).collect();
        self.restrict(&ids)
    }

    /// The sub-corpus with exactly the records whose ids are in `ids`.
    pub fn restrict(&self, ids: &BTreeSet<&str>) -> Corpus {
        let keep = |id: &str| ids.contains(id);
        Corpus {
            records: self.records.iter().filter(|r| keep(&r.id)).cloned().collect(),
            files: self.files.iter().filter(|f| f.method_ids().any(keep)).cloned().collect(),
            augmented: self
                .augmented
                .as_ref()
                .map(|m| m.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (k.clone(), v.clone())).collect()),
            transformed: self
                .transformed
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Records sorted by id; returns the first duplicated id, if any.
    pub(crate) fn sort_records(&mut self) -> Result<(), CorpusError> {
        self.records.sort_by(|a, b| a.id.cmp(&b.id));
        match self.records.windows(2).find(|w| w[0].id == w[1].id) {
            Some(w) => Err(CorpusError::DuplicateId(w[0].id.clone())),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    DirTree,
    Jsonl,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dir-tree" => Ok(Format::DirTree),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(format!("unknown format `{other}` (expected dir-tree or jsonl)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::DirTree => "dir-tree",
            Format::Jsonl => "jsonl",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Jsonl { path: PathBuf, line: usize, message: String },
    #[error("duplicate method id `{0}`")]
    DuplicateId(String),
    #[error("corpora do not share the same ids: `{0}` is only in one of them")]
    IdMismatch(String),
    #[error("{}: invalid manifest: {message}", path.display())]
    Manifest { path: PathBuf, message: String },
}

impl CorpusError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CorpusError::Io { path: path.into(), source }
    }
}

/// Runs `f` over `items` on a pool of `workers` threads (0 picks the rayon
/// default), returning results in input order.
pub(crate) fn par_map<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).stack_size(8 << 20).build().expect("thread pool");
    pool.install(|| items.par_iter().map(&f).collect())
}
