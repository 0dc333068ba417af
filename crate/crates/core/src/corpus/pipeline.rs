use super::{par_map, stats, Corpus, CorpusError, MethodRecord, StatsReport, Status};
use crate::binding::resolve;
use crate::rewrite::{augment_source, transform_rename, RenameMode, RenamedBinding};
use crate::syntax::parse_method;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Augments every method record.
///
/// Records that fail to parse keep their text and become parse-failed;
/// parsed records without any rename are carried over. Ids and order are
/// unchanged, and the returned corpus carries the rename sidecar.
pub fn run_augment(corpus: &Corpus, mode: RenameMode, workers: usize) -> (Corpus, StatsReport) {
    let results = par_map(&corpus.records, workers, |r| augment_record(r, mode));
    let mut out = Corpus { records: Vec::with_capacity(results.len()), ..corpus.clone() };
    let mut sidecar = BTreeMap::new();
    for (record, renamed) in results {
        if !renamed.is_empty() {
            sidecar.insert(record.id.clone(), renamed);
        }
        out.records.push(record);
    }
    out.augmented = Some(sidecar);
    let report = stats(&out, workers);
    (out, report)
}

fn augment_record(r: &MethodRecord, mode: RenameMode) -> (MethodRecord, Vec<RenamedBinding>) {
    let mut rec = r.clone();
    if !r.is_method() {
        rec.status = Status::CarriedOver;
        return (rec, Vec::new());
    }
    match augment_source(&r.source, mode) {
        Err(e) => {
            log::debug!("{}: {e}", r.id);
            rec.status = Status::ParseFailed;
            (rec, Vec::new())
        }
        Ok(outcome) if outcome.result.changed => {
            rec.source = outcome.result.source;
            rec.status = Status::Processed;
            (rec, outcome.result.renamed)
        }
        Ok(_) => {
            rec.status = Status::CarriedOver;
            (rec, Vec::new())
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TransformSummary {
    pub renamed: usize,
    pub passed_through: usize,
    pub parse_failed: usize,
}

/// Applies the `varN` rename to every method record under `seed`.
pub fn run_transform(corpus: &Corpus, seed: u64, workers: usize) -> (Corpus, TransformSummary) {
    let results = par_map(&corpus.records, workers, |r| transform_record(r, seed));
    let mut out = Corpus { records: Vec::with_capacity(results.len()), ..corpus.clone() };
    out.provenance.seed = seed;
    let mut summary = TransformSummary::default();
    for (record, renamed) in results {
        match (&renamed, record.status) {
            (Some(_), _) => summary.renamed += 1,
            (None, Status::ParseFailed) => summary.parse_failed += 1,
            (None, _) => summary.passed_through += 1,
        }
        if let Some(t) = renamed {
            // A sidecar entry for the binding just renamed no longer
            // describes the text.
            if let Some(sidecar) = out.augmented.as_mut() {
                if let Some(list) = sidecar.get_mut(&record.id) {
                    list.retain(|a| a.binding != t.binding);
                    if list.is_empty() {
                        sidecar.remove(&record.id);
                    }
                }
            }
            out.transformed.insert(record.id.clone(), t);
        }
        out.records.push(record);
    }
    (out, summary)
}

fn transform_record(r: &MethodRecord, seed: u64) -> (MethodRecord, Option<RenamedBinding>) {
    let mut rec = r.clone();
    if !r.is_method() {
        rec.status = Status::CarriedOver;
        return (rec, None);
    }
    let tree = match parse_method(&r.source).into_result() {
        Ok(t) => t,
        Err(e) => {
            log::debug!("{}: {e}", r.id);
            rec.status = Status::ParseFailed;
            return (rec, None);
        }
    };
    let table = resolve(&tree);
    let result = transform_rename(&r.source, &table, &r.id, seed).expect("binding occurrences never overlap");
    rec.status = if result.renamed.is_some() { Status::Processed } else { Status::CarriedOver };
    rec.source = result.source;
    (rec, result.renamed)
}

/// Keeps the methods whose roles version differs from the original.
///
/// Both inputs must hold exactly the same ids; both outputs hold the same
/// subset.
pub fn filter_pair(original: &Corpus, roles: &Corpus) -> Result<(Corpus, Corpus), CorpusError> {
    let a: BTreeSet<&str> = original.ids().collect();
    let b: BTreeSet<&str> = roles.ids().collect();
    if let Some(id) = a.symmetric_difference(&b).next() {
        return Err(CorpusError::IdMismatch(id.to_string()));
    }
    let changed: BTreeSet<&str> = original
        .records
        .iter()
        .zip(&roles.records)
        .filter(|(o, r)| o.source != r.source)
        .map(|(o, _)| o.id.as_str())
        .collect();
    Ok((original.restrict(&changed), roles.restrict(&changed)))
}

/// XORed into the seed of the roles-side transform under `independent_seeds`.
pub const INDEPENDENT_SEED_SALT: u64 = 0xD1B5_4A32_D192_ED03;

#[derive(Debug, Clone, Copy, Default)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Transform the roles corpus under a different seed, so the two
    /// transformed sets no longer rename corresponding bindings.
    pub independent_seeds: bool,
    pub workers: usize,
}

/// The eight evaluation corpora.
#[derive(Debug, Clone)]
pub struct EvalSuite {
    pub jl: Corpus,
    pub jlr: Corpus,
    pub jl_f: Corpus,
    pub jlr_f: Corpus,
    pub jlt: Corpus,
    pub jltr: Corpus,
    pub jlt_f: Corpus,
    pub jltr_f: Corpus,
}

impl EvalSuite {
    pub const NAMES: [&'static str; 8] = ["jl", "jlr", "jl_f", "jlr_f", "jlt", "jltr", "jlt_f", "jltr_f"];

    pub fn sets(&self) -> [(&'static str, &Corpus); 8] {
        let n = Self::NAMES;
        [
            (n[0], &self.jl),
            (n[1], &self.jlr),
            (n[2], &self.jl_f),
            (n[3], &self.jlr_f),
            (n[4], &self.jlt),
            (n[5], &self.jltr),
            (n[6], &self.jlt_f),
            (n[7], &self.jltr_f),
        ]
    }
}

/// Builds original, roles, filtered and transformed test sets.
///
/// `roles` must be the augmentation of `original`. The roles-transformed set
/// is the transform of `roles`, and both filtered transformed sets keep the
/// ids of the untransformed filtered sets.
pub fn build_eval_suite(original: &Corpus, roles: &Corpus, opts: SuiteOptions) -> Result<EvalSuite, CorpusError> {
    let (jl_f, jlr_f) = filter_pair(original, roles)?;
    let roles_seed = if opts.independent_seeds { opts.seed ^ INDEPENDENT_SEED_SALT } else { opts.seed };
    let (jlt, _) = run_transform(original, opts.seed, opts.workers);
    let (jltr, _) = run_transform(roles, roles_seed, opts.workers);
    let kept: BTreeSet<&str> = jl_f.ids().collect();
    let jlt_f = jlt.restrict(&kept);
    let jltr_f = jltr.restrict(&kept);
    Ok(EvalSuite { jl: original.clone(), jlr: roles.clone(), jl_f, jlr_f, jlt, jltr, jlt_f, jltr_f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Origin, Split};
    use crate::rewrite::strip_source;

    fn corpus(sources: &[&str]) -> Corpus {
        let records = sources
            .iter()
            .enumerate()
            .map(|(k, s)| MethodRecord {
                id: format!("m{k:03}"),
                source: s.to_string(),
                split: Split::Test,
                status: Status::CarriedOver,
                origin: Origin::Line(k + 1),
            })
            .collect();
        Corpus { records, ..Corpus::default() }
    }

    const STEP: &str = "void f(){ for (int i=0;i<3;i++){} }";
    const WALK: &str = "void g(List<String> xs){ for (String s : xs) { p(s); } }";
    const PLAIN: &str = "int h(int a){ return a * 2; }";
    const BROKEN: &str = "void f( {";

    #[test]
    fn augment_statuses_and_stats() {
        let c = corpus(&[STEP, WALK, PLAIN, BROKEN]);
        let (out, report) = run_augment(&c, RenameMode::BindingAware, 2);
        let statuses: Vec<_> = out.records.iter().map(|r| r.status).collect();
        assert_eq!(statuses, [Status::Processed, Status::Processed, Status::CarriedOver, Status::ParseFailed]);
        assert_eq!(out.records[3].source, BROKEN);
        assert_eq!(report.steppers, 1);
        assert_eq!(report.walkers, 1);
        assert_eq!(report.splits[&Split::Test].augmented_methods, 2);
        assert_eq!(report.splits[&Split::Test].parse_failed, 1);
        assert_eq!(out.augmented.as_ref().unwrap().len(), 2);
    }

    #[test]
    fn roleless_corpus_is_unchanged() {
        let c = corpus(&[PLAIN, PLAIN]);
        let (out, report) = run_augment(&c, RenameMode::BindingAware, 1);
        assert_eq!(
            out.records.iter().map(|r| &r.source).collect::<Vec<_>>(),
            c.records.iter().map(|r| &r.source).collect::<Vec<_>>()
        );
        assert_eq!(report.augmented_methods(), 0);
    }

    #[test]
    fn filter_keeps_exactly_augmented_ids() {
        let srcs = [STEP, PLAIN, WALK, PLAIN, PLAIN, STEP, PLAIN, PLAIN, WALK, PLAIN];
        let c = corpus(&srcs);
        let (roles, _) = run_augment(&c, RenameMode::BindingAware, 3);
        let (fo, fr) = filter_pair(&c, &roles).unwrap();
        let expected = ["m000", "m002", "m005", "m008"];
        assert_eq!(fo.ids().collect::<Vec<_>>(), expected);
        assert_eq!(fr.ids().collect::<Vec<_>>(), expected);
        for (o, r) in fo.records.iter().zip(&fr.records) {
            assert_eq!(strip_source(&r.source, None).unwrap().source, o.source);
        }
    }

    #[test]
    fn filter_rejects_id_mismatch() {
        let a = corpus(&[STEP, PLAIN]);
        let mut b = corpus(&[STEP, PLAIN]);
        b.records[1].id = "zzz".into();
        let err = filter_pair(&a, &b).unwrap_err();
        assert!(err.to_string().contains("m001") || err.to_string().contains("zzz"));
    }

    #[test]
    fn zero_augmented_gives_empty_filters() {
        let c = corpus(&[PLAIN]);
        let (roles, _) = run_augment(&c, RenameMode::BindingAware, 1);
        let (a, b) = filter_pair(&c, &roles).unwrap();
        assert!(a.is_empty() && b.is_empty());
    }

    #[test]
    fn transform_is_deterministic_and_coherent() {
        let srcs = [STEP, WALK, PLAIN, "void k(){ run(); }", BROKEN];
        let c = corpus(&srcs);
        let (roles, _) = run_augment(&c, RenameMode::BindingAware, 1);
        let (t1, s1) = run_transform(&c, 7, 1);
        let (t2, _) = run_transform(&c, 7, 4);
        assert_eq!(t1.records, t2.records);
        assert_eq!(s1, TransformSummary { renamed: 3, passed_through: 1, parse_failed: 1 });
        let (tr, _) = run_transform(&roles, 7, 2);
        for (id, a) in &t1.transformed {
            assert_eq!(tr.transformed[id].binding, a.binding);
        }
    }

    #[test]
    fn suite_cardinalities() {
        let mut srcs = vec![PLAIN; 13];
        srcs.extend([STEP, WALK, STEP, WALK, STEP, WALK, STEP]);
        let c = corpus(&srcs);
        let (roles, _) = run_augment(&c, RenameMode::BindingAware, 2);
        let suite = build_eval_suite(&c, &roles, SuiteOptions { seed: 7, ..Default::default() }).unwrap();
        let sizes: Vec<usize> = suite.sets().iter().map(|(_, c)| c.len()).collect();
        assert_eq!(sizes, [20, 20, 7, 7, 20, 20, 7, 7]);
        assert_eq!(suite.jlt_f.ids().collect::<Vec<_>>(), suite.jl_f.ids().collect::<Vec<_>>());
    }

    #[test]
    fn empty_suite() {
        let c = Corpus::default();
        let suite = build_eval_suite(&c, &c, SuiteOptions::default()).unwrap();
        assert!(suite.sets().iter().all(|(_, c)| c.is_empty()));
    }
}
