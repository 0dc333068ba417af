use super::{par_map, Corpus, MethodRecord, Split, Status};
use crate::binding::resolve;
use crate::rewrite::RenamedBinding;
use crate::roles::{detect_roles, Role};
use crate::syntax::parse_method;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SplitStats {
    pub methods: usize,
    pub augmented_methods: usize,
    pub parse_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameCount {
    pub name: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StatsReport {
    /// Always lists train, val and test.
    pub splits: BTreeMap<Split, SplitStats>,
    pub steppers: usize,
    pub walkers: usize,
    pub total_augmented_vars: usize,
    /// Original stepper names, by count descending then name ascending.
    pub stepper_name_histogram: Vec<NameCount>,
}

impl Default for StatsReport {
    fn default() -> Self {
        StatsReport {
            splits: Split::ALL.into_iter().map(|s| (s, SplitStats::default())).collect(),
            steppers: 0,
            walkers: 0,
            total_augmented_vars: 0,
            stepper_name_histogram: Vec::new(),
        }
    }
}

impl StatsReport {
    pub fn augmented_methods(&self) -> usize {
        self.splits.values().map(|s| s.augmented_methods).sum()
    }

    pub fn methods(&self) -> usize {
        self.splits.values().map(|s| s.methods).sum()
    }

    /// Share of steppers carrying `name`, in `[0, 1]`.
    pub fn stepper_share(&self, name: &str) -> f64 {
        if self.steppers == 0 {
            return 0.0;
        }
        let n = self.stepper_name_histogram.iter().find(|e| e.name == name).map_or(0, |e| e.count);
        n as f64 / self.steppers as f64
    }
}

/// What one record contributes to a report.
struct Contribution {
    split: Split,
    parse_failed: bool,
    renamed: Vec<(Role, String)>,
}

/// Role-augmentation statistics for `corpus`.
///
/// With an augmentation sidecar the renames it lists are counted. Without
/// one, every record is re-detected and a binding counts when its name
/// carries a role prefix matching the role detected for it.
pub fn stats(corpus: &Corpus, workers: usize) -> StatsReport {
    let contributions: Vec<Contribution> = match &corpus.augmented {
        Some(sidecar) => corpus
            .records
            .iter()
            .map(|r| Contribution {
                split: r.split,
                parse_failed: r.status == Status::ParseFailed,
                renamed: sidecar.get(&r.id).map(|v| from_sidecar(v)).unwrap_or_default(),
            })
            .collect(),
        None => par_map(&corpus.records, workers, redetect),
    };
    let mut report = StatsReport::default();
    let mut histogram: BTreeMap<&str, usize> = BTreeMap::new();
    for c in &contributions {
        let split = report.splits.entry(c.split).or_default();
        split.methods += 1;
        split.parse_failed += usize::from(c.parse_failed);
        split.augmented_methods += usize::from(!c.renamed.is_empty());
        for (role, name) in &c.renamed {
            match role {
                Role::Stepper => {
                    report.steppers += 1;
                    *histogram.entry(name).or_default() += 1;
                }
                Role::Walker => report.walkers += 1,
            }
        }
    }
    report.total_augmented_vars = report.steppers + report.walkers;
    let mut hist: Vec<NameCount> =
        histogram.into_iter().map(|(name, count)| NameCount { name: name.to_string(), count }).collect();
    hist.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.name.cmp(&b.name)));
    report.stepper_name_histogram = hist;
    report
}

fn from_sidecar(records: &[RenamedBinding]) -> Vec<(Role, String)> {
    records.iter().filter_map(|r| Role::split_prefixed(&r.new).map(|(role, _)| (role, r.old.clone()))).collect()
}

fn redetect(r: &MethodRecord) -> Contribution {
    let mut c = Contribution { split: r.split, parse_failed: false, renamed: Vec::new() };
    if !r.is_method() {
        return c;
    }
    let Some(tree) = parse_method(&r.source).into_result().ok() else {
        c.parse_failed = true;
        return c;
    };
    let table = resolve(&tree);
    let report = detect_roles(&tree, &table);
    for b in &table.bindings {
        if let Some((role, bare)) = Role::split_prefixed(&b.name) {
            if report.role_of(b.id) == Some(role) {
                c.renamed.push((role, bare.to_string()));
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{run_augment, Origin};
    use crate::rewrite::RenameMode;

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

    #[test]
    fn empty_corpus_is_all_zero() {
        let r = stats(&Corpus::default(), 1);
        assert_eq!(r, StatsReport::default());
        assert_eq!(r.splits.len(), 3);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["totalAugmentedVars"], 0);
        assert_eq!(json["splits"]["test"]["augmentedMethods"], 0);
    }

    #[test]
    fn every_stepper_named_i() {
        let srcs: Vec<String> =
            (0..5).map(|n| format!("void f{n}(){{ for (int i = 0; i < {n}; i++) {{ }} }}")).collect();
        let refs: Vec<&str> = srcs.iter().map(String::as_str).collect();
        let (out, report) = run_augment(&corpus(&refs), RenameMode::BindingAware, 2);
        assert_eq!(report.stepper_name_histogram, vec![NameCount { name: "i".into(), count: 5 }]);
        assert_eq!(report.stepper_share("i"), 1.0);
        // Re-detection from the augmented text agrees with the sidecar.
        let mut bare = out.clone();
        bare.augmented = None;
        assert_eq!(stats(&bare, 3), report);
    }

    #[test]
    fn histogram_ties_break_by_name() {
        let srcs = [
            "void a(){ for (int j=0;j<1;j++){} for (int k=0;k<1;k++){} }",
            "void b(){ for (int k=0;k<1;k++){} for (int j=0;j<1;j++){} for (int i=0;i<1;i++){} }",
        ];
        let (_, report) = run_augment(&corpus(&srcs), RenameMode::BindingAware, 1);
        let names: Vec<_> = report.stepper_name_histogram.iter().map(|e| (e.name.as_str(), e.count)).collect();
        assert_eq!(names, [("j", 2), ("k", 2), ("i", 1)]);
    }
}
