//! Sub-token precision, recall and F1 for predicted method names.
//!
//! Names are split into lowercase sub-tokens; an example's true positives are
//! the size of the multiset intersection of predicted and reference
//! sub-tokens. Corpus scores are micro-averaged over all examples.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};

/// Splits an identifier on non-alphanumerics, lower-to-upper transitions,
/// the end of an acronym (`HTTPServer` → `http`, `server`) and letter/digit
/// boundaries, then lowercases.
pub fn subtokenize(name: &str) -> Vec<String> {
    let mut out = Vec::new();
    for word in name.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()) {
        let chars: Vec<char> = word.chars().collect();
        let mut start = 0;
        for i in 1..chars.len() {
            let (prev, cur) = (chars[i - 1], chars[i]);
            let next_lower = chars.get(i + 1).is_some_and(|c| c.is_lowercase());
            let boundary = (prev.is_lowercase() && cur.is_uppercase())
                || (prev.is_uppercase() && cur.is_uppercase() && next_lower)
                || (prev.is_numeric() != cur.is_numeric());
            if boundary {
                out.push(chars[start..i].iter().collect::<String>().to_lowercase());
                start = i;
            }
        }
        out.push(chars[start..].iter().collect::<String>().to_lowercase());
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Score {
    pub tp: usize,
    pub pred_len: usize,
    pub ref_len: usize,
}

impl Score {
    pub fn precision(&self) -> f64 {
        precision(self.tp, self.pred_len)
    }

    pub fn recall(&self) -> f64 {
        recall(self.tp, self.ref_len)
    }

    pub fn f1(&self) -> f64 {
        f1(self.precision(), self.recall())
    }
}

fn precision(tp: usize, pred_len: usize) -> f64 {
    if pred_len == 0 {
        0.0
    } else {
        tp as f64 / pred_len as f64
    }
}

fn recall(tp: usize, ref_len: usize) -> f64 {
    if ref_len == 0 {
        1.0
    } else {
        tp as f64 / ref_len as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

pub fn score_example(pred: &str, reference: &str) -> Score {
    let pred = subtokenize(pred);
    let reference = subtokenize(reference);
    let mut pool: HashMap<&str, usize> = HashMap::new();
    for t in &reference {
        *pool.entry(t).or_default() += 1;
    }
    let mut tp = 0;
    for t in &pred {
        if let Some(n) = pool.get_mut(t.as_str()).filter(|n| **n > 0) {
            *n -= 1;
            tp += 1;
        }
    }
    Score { tp, pred_len: pred.len(), ref_len: reference.len() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamePair {
    pub id: String,
    #[serde(rename = "ref")]
    pub reference: String,
    #[serde(default)]
    pub pred: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Micro {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExampleScore {
    pub id: String,
    pub tp: usize,
    pub pred_len: usize,
    pub ref_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Counts {
    pub examples: usize,
    pub empty_predictions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvalReport {
    pub micro: Micro,
    pub per_example: Vec<ExampleScore>,
    pub counts: Counts,
}

impl EvalReport {
    /// `P=0.750 R=0.600 F1=0.667`
    pub fn summary_line(&self) -> String {
        format!("P={:.3} R={:.3} F1={:.3}", self.micro.precision, self.micro.recall, self.micro.f1)
    }

    /// Per-example table as CSV with a header row.
    pub fn per_example_csv(&self) -> String {
        let mut out = String::from("id,tp,predLen,refLen\n");
        for e in &self.per_example {
            out.push_str(&format!("{},{},{},{}\n", csv_field(&e.id), e.tp, e.pred_len, e.ref_len));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("duplicate example id `{0}`")]
    DuplicateId(String),
}

/// Scores `pairs` and micro-averages over them, in input order.
pub fn evaluate(pairs: &[NamePair]) -> Result<EvalReport, EvalError> {
    let mut seen = BTreeSet::new();
    let mut per_example = Vec::with_capacity(pairs.len());
    let mut total = Score::default();
    let mut empty = 0;
    for p in pairs {
        if !seen.insert(p.id.as_str()) {
            return Err(EvalError::DuplicateId(p.id.clone()));
        }
        let s = score_example(&p.pred, &p.reference);
        empty += usize::from(s.pred_len == 0);
        total.tp += s.tp;
        total.pred_len += s.pred_len;
        total.ref_len += s.ref_len;
        per_example.push(ExampleScore { id: p.id.clone(), tp: s.tp, pred_len: s.pred_len, ref_len: s.ref_len });
    }
    Ok(EvalReport {
        micro: Micro { precision: total.precision(), recall: total.recall(), f1: total.f1() },
        per_example,
        counts: Counts { examples: pairs.len(), empty_predictions: empty },
    })
}
