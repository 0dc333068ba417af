use super::{par_map, Corpus, MethodRecord};
use crate::binding::resolve;
use crate::roles::{detect_roles, Role, RuleId};
use crate::syntax::{parse_method, Span};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedAssignment {
    pub name: String,
    pub role: Role,
    pub rule: RuleId,
    /// The loop that triggered the detection.
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedConflict {
    pub name: String,
    pub roles: Vec<Role>,
}

/// Detection result for one record, keyed by variable name for output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MethodRoles {
    pub method_id: String,
    pub assignments: Vec<NamedAssignment>,
    pub conflicts: Vec<NamedConflict>,
    pub parse_failed: bool,
}

/// Runs role detection on every method record, in record order.
pub fn detect_all(corpus: &Corpus, workers: usize) -> Vec<MethodRoles> {
    par_map(&corpus.records, workers, detect_record)
}

fn detect_record(r: &MethodRecord) -> MethodRoles {
    let mut out =
        MethodRoles { method_id: r.id.clone(), assignments: Vec::new(), conflicts: Vec::new(), parse_failed: false };
    let tree = match parse_method(&r.source).into_result() {
        Ok(t) if r.is_method() => t,
        _ => {
            out.parse_failed = true;
            return out;
        }
    };
    let table = resolve(&tree);
    let report = detect_roles(&tree, &table);
    let name = |id: crate::binding::BindingId| table.bindings[id.0].name.clone();
    out.assignments = report
        .assignments
        .iter()
        .map(|a| NamedAssignment { name: name(a.binding), role: a.role, rule: a.rule, span: a.evidence })
        .collect();
    out.conflicts =
        report.conflicts.iter().map(|c| NamedConflict { name: name(c.binding), roles: c.roles.clone() }).collect();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Origin, Split, Status};

    #[test]
    fn json_shape() {
        let src = "void f(Iterator<String> iter){ for (int i=0; i<5; i++){} while (iter.hasNext()){ iter.next(); } }";
        let corpus = Corpus {
            records: vec![MethodRecord {
                id: "m".into(),
                source: src.into(),
                split: Split::Test,
                status: Status::CarriedOver,
                origin: Origin::Line(1),
            }],
            ..Corpus::default()
        };
        let out = detect_all(&corpus, 1);
        let v = serde_json::to_value(&out[0]).unwrap();
        assert_eq!(v["methodId"], "m");
        assert_eq!(v["assignments"][0]["name"], "iter");
        assert_eq!(v["assignments"][0]["role"], "walker");
        assert_eq!(v["assignments"][1]["rule"], "STEP_FOR_UPDATE");
        assert_eq!(v["assignments"][1]["span"]["start"], 31);
        assert_eq!(v["parseFailed"], false);
    }
}
