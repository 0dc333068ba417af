use super::{
    scan::member_spans, Corpus, CorpusError, FileTemplate, Format, Manifest, MethodRecord, Origin, Piece, Provenance,
    Split, Status, MANIFEST_FILE, METHODS_FILE, TOOL_VERSION,
};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fs;
use std::io::BufRead;
use std::path::Path;

/// Guesses the layout of `path`: a file or a directory holding
/// `methods.jsonl` is jsonl, any other directory is a dir-tree.
pub fn detect_format(path: &Path) -> Format {
    if path.is_file() || path.join(METHODS_FILE).is_file() {
        Format::Jsonl
    } else {
        Format::DirTree
    }
}

/// Reads a corpus and, when a consistent `manifest.json` sits next to it, its
/// sidecars and record statuses.
pub fn ingest(path: &Path, format: Format) -> Result<Corpus, CorpusError> {
    let (mut corpus, manifest_dir) = match format {
        Format::DirTree => (ingest_dir(path)?, path.to_path_buf()),
        Format::Jsonl => {
            let file = if path.is_dir() { path.join(METHODS_FILE) } else { path.to_path_buf() };
            let dir = file.parent().map(Path::to_path_buf).unwrap_or_default();
            (ingest_jsonl(&file)?, dir)
        }
    };
    let manifest_path = manifest_dir.join(MANIFEST_FILE);
    if manifest_path.is_file() {
        let text = fs::read_to_string(&manifest_path).map_err(|e| CorpusError::io(&manifest_path, e))?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| CorpusError::Manifest { path: manifest_path.clone(), message: e.to_string() })?;
        apply_manifest(&mut corpus, manifest, &manifest_path);
    }
    Ok(corpus)
}

fn apply_manifest(corpus: &mut Corpus, manifest: Manifest, path: &Path) {
    let same_ids = manifest.records.len() == corpus.records.len()
        && manifest.records.iter().zip(&corpus.records).all(|(m, r)| m.id == r.id);
    if !same_ids {
        log::warn!("{}: record ids differ from the corpus; ignoring it", path.display());
        return;
    }
    for (m, r) in manifest.records.iter().zip(&mut corpus.records) {
        r.status = m.status;
    }
    corpus.augmented = manifest.augmented;
    corpus.transformed = manifest.transformed;
    corpus.provenance.seed = manifest.provenance.seed;
}

/// Reads every `.java` file below `root`, cutting each into method records.
///
/// The top-level directory name picks the split (`train`, `val`, `test`);
/// anything else counts as test. Unreadable and non-UTF-8 files are skipped
/// with a warning. A file the member scanner cannot handle becomes one
/// carried-over record holding the whole file.
pub fn ingest_dir(root: &Path) -> Result<Corpus, CorpusError> {
    if !root.is_dir() {
        return Err(CorpusError::io(root, std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory")));
    }
    let mut paths = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                log::warn!("skipping unreadable entry: {e}");
                continue;
            }
        };
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|x| x == "java") {
            paths.push(entry.into_path());
        }
    }
    let mut corpus = Corpus {
        provenance: Provenance {
            source_path: root.display().to_string(),
            tool_version: TOOL_VERSION.to_string(),
            seed: 0,
        },
        ..Corpus::default()
    };
    for path in paths {
        let rel = relative(root, &path);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                continue;
            }
        };
        let Ok(text) = String::from_utf8(bytes) else {
            log::warn!("skipping {}: not valid UTF-8", path.display());
            continue;
        };
        let split = rel.split('/').next().and_then(Split::from_dir_name).unwrap_or(Split::Test);
        let (records, template) = split_file(&rel, &text, split);
        corpus.records.extend(records);
        corpus.files.push(template);
    }
    corpus.files.sort_by(|a, b| a.path.cmp(&b.path));
    corpus.sort_records()?;
    Ok(corpus)
}

fn relative(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/")
}

fn split_file(rel: &str, text: &str, split: Split) -> (Vec<MethodRecord>, FileTemplate) {
    let Some(spans) = member_spans(text) else {
        log::warn!("{rel}: member scan failed; keeping the file as one record");
        let id = format!("{rel}#0");
        let record = MethodRecord {
            id: id.clone(),
            source: text.to_string(),
            split,
            status: Status::CarriedOver,
            origin: Origin::WholeFile { file: rel.to_string() },
        };
        return (vec![record], FileTemplate { path: rel.to_string(), pieces: vec![Piece::Method(id)] });
    };
    let mut records = Vec::with_capacity(spans.len());
    let mut pieces = Vec::with_capacity(spans.len() * 2 + 1);
    let mut cursor = 0;
    for (k, span) in spans.into_iter().enumerate() {
        let id = format!("{rel}#{k}");
        pieces.push(Piece::Text(text[cursor..span.start].to_string()));
        pieces.push(Piece::Method(id.clone()));
        records.push(MethodRecord {
            id,
            source: span.slice(text).to_string(),
            split,
            status: Status::CarriedOver,
            origin: Origin::Member { file: rel.to_string() },
        });
        cursor = span.end;
    }
    pieces.push(Piece::Text(text[cursor..].to_string()));
    pieces.retain(|p| !matches!(p, Piece::Text(t) if t.is_empty()));
    (records, FileTemplate { path: rel.to_string(), pieces })
}

#[derive(Deserialize)]
struct JsonlRecord {
    id: String,
    code: String,
    #[serde(default)]
    split: Option<Split>,
}

pub fn ingest_jsonl(path: &Path) -> Result<Corpus, CorpusError> {
    let file = fs::File::open(path).map_err(|e| CorpusError::io(path, e))?;
    parse_jsonl(std::io::BufReader::new(file), path)
}

/// Parses `{id, code, split?}` lines; blank lines are ignored and a missing
/// split means test.
pub fn parse_jsonl(reader: impl BufRead, path: &Path) -> Result<Corpus, CorpusError> {
    let mut records = Vec::new();
    let mut seen = BTreeMap::new();
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonlRecord = serde_json::from_str(&line).map_err(|e| CorpusError::Jsonl {
            path: path.to_path_buf(),
            line: line_no,
            message: e.to_string(),
        })?;
        if seen.insert(rec.id.clone(), line_no).is_some() {
            return Err(CorpusError::DuplicateId(rec.id));
        }
        records.push(MethodRecord {
            id: rec.id,
            source: rec.code,
            split: rec.split.unwrap_or(Split::Test),
            status: Status::CarriedOver,
            origin: Origin::Line(line_no),
        });
    }
    let mut corpus = Corpus {
        records,
        provenance: Provenance {
            source_path: path.display().to_string(),
            tool_version: TOOL_VERSION.to_string(),
            seed: 0,
        },
        ..Corpus::default()
    };
    corpus.sort_records()?;
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn write(root: &Path, rel: &str, text: &str) {
        let p = root.join(rel);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, text).unwrap();
    }

    #[test]
    fn three_files_two_methods_each() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["a", "b", "c"] {
            write(dir.path(), &format!("{name}.java"), "class X { void f() {} int g(int x) { return x; } }");
        }
        let c = ingest_dir(dir.path()).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(
            c.ids().collect::<Vec<_>>(),
            ["a.java#0", "a.java#1", "b.java#0", "b.java#1", "c.java#0", "c.java#1"]
        );
    }

    #[test]
    fn splits_follow_top_level_directories() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "train/p/A.java", "class A { void f() {} }");
        write(dir.path(), "val/B.java", "class B { void f() {} void g() {} }");
        write(dir.path(), "test/C.java", "class C { void f() {} }");
        write(dir.path(), "other/D.java", "class D { void f() {} }");
        let c = ingest_dir(dir.path()).unwrap();
        let splits: Vec<_> = c.records.iter().map(|r| (r.id.as_str(), r.split)).collect();
        assert_eq!(
            splits,
            [
                ("other/D.java#0", Split::Test),
                ("test/C.java#0", Split::Test),
                ("train/p/A.java#0", Split::Train),
                ("val/B.java#0", Split::Val),
                ("val/B.java#1", Split::Val),
            ]
        );
    }

    #[test]
    fn bad_files_are_skipped_or_kept_whole() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("bin.java"), [0xffu8, 0xfe, 0x00]).unwrap();
        write(dir.path(), "broken.java", "class A { void f() {");
        let c = ingest_dir(dir.path()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.records[0].origin, Origin::WholeFile { file: "broken.java".into() });
        assert!(!c.records[0].is_method());
    }

    #[test]
    fn jsonl_duplicate_id_is_named() {
        let text = "{\"id\":\"m1\",\"code\":\"void f(){}\"}\n{\"id\":\"m1\",\"code\":\"void g(){}\"}\n";
        let err = parse_jsonl(Cursor::new(text), Path::new("x.jsonl")).unwrap_err();
        assert!(err.to_string().contains("`m1`"), "{err}");
    }

    #[test]
    fn jsonl_malformed_line_reports_line_number() {
        let text = "{\"id\":\"a\",\"code\":\"void f(){}\",\"split\":\"train\"}\n\n{\"id\": 3}\n";
        match parse_jsonl(Cursor::new(text), Path::new("x.jsonl")) {
            Err(CorpusError::Jsonl { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn jsonl_records_are_sorted_and_default_to_test() {
        let text = "{\"id\":\"b\",\"code\":\"void g(){}\"}\n{\"id\":\"a\",\"code\":\"void f(){}\",\"split\":\"val\"}\n";
        let c = parse_jsonl(Cursor::new(text), Path::new("x.jsonl")).unwrap();
        assert_eq!(c.ids().collect::<Vec<_>>(), ["a", "b"]);
        assert_eq!(c.records[0].split, Split::Val);
        assert_eq!(c.records[1].split, Split::Test);
    }
}
