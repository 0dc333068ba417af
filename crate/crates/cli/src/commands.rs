use crate::args::{AugmentArgs, DetectArgs, EvalArgs, FilterArgs, Output, StatsArgs, SuiteArgs, TransformArgs};
use anyhow::{bail, Context, Result};
use rolemark_core::corpus::{
    build_eval_suite, detect_all, detect_format, emit, filter_pair, ingest, run_augment, run_transform, stats, Corpus,
    Format, SuiteOptions,
};
use rolemark_core::evalmetrics::{evaluate, NamePair};
use rolemark_core::rewrite::RenameMode;
use rolemark_core::roles::Role;
use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;

pub const STATS_FILE: &str = "stats.json";

fn load(path: &Path) -> Result<(Corpus, Format)> {
    if !path.exists() {
        bail!("input path {} does not exist", path.display());
    }
    let format = detect_format(path);
    let corpus = ingest(path, format).with_context(|| format!("reading {}", path.display()))?;
    Ok((corpus, format))
}

fn save(corpus: &Corpus, out: &Output, input_format: Format) -> Result<()> {
    let format = out.format.map_or(input_format, Format::from);
    emit(corpus, &out.out, format).with_context(|| format!("writing {}", out.out.display()))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn mode(name_based: bool) -> RenameMode {
    if name_based {
        RenameMode::NameBased
    } else {
        RenameMode::BindingAware
    }
}

pub fn detect(args: &DetectArgs) -> Result<()> {
    let (corpus, _) = load(&args.input.input)?;
    let results = detect_all(&corpus, args.workers.count());
    let mut text = String::new();
    for r in &results {
        text.push_str(&serde_json::to_string(r)?);
        text.push('\n');
    }
    match &args.out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            let count = |role| results.iter().flat_map(|r| &r.assignments).filter(|a| a.role == role).count();
            println!(
                "detect: {} methods, {} steppers, {} walkers",
                results.len(),
                count(Role::Stepper),
                count(Role::Walker)
            );
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn augment(args: &AugmentArgs) -> Result<()> {
    let (mut corpus, format) = load(&args.input.input)?;
    corpus.provenance.seed = args.seed;
    let (out, report) = run_augment(&corpus, mode(args.name_based), args.workers.count());
    save(&out, &args.output, format)?;
    write_json(&args.output.out.join(STATS_FILE), &report)?;
    println!(
        "augment: {} of {} methods augmented; steppers={} walkers={} total={}",
        report.augmented_methods(),
        report.methods(),
        report.steppers,
        report.walkers,
        report.total_augmented_vars
    );
    Ok(())
}

pub fn transform(args: &TransformArgs) -> Result<()> {
    let (corpus, format) = load(&args.input.input)?;
    let (out, summary) = run_transform(&corpus, args.seed, args.workers.count());
    save(&out, &args.output, format)?;
    println!(
        "transform: {} renamed, {} without candidates, {} unparseable (seed {})",
        summary.renamed, summary.passed_through, summary.parse_failed, args.seed
    );
    Ok(())
}

pub fn filter(args: &FilterArgs) -> Result<()> {
    let (original, format) = load(&args.original)?;
    let (roles, _) = load(&args.roles)?;
    let (fo, fr) = filter_pair(&original, &roles)?;
    let fmt = args.output.format.map_or(format, Format::from);
    emit(&fo, &args.output.out.join("original"), fmt)?;
    emit(&fr, &args.output.out.join("roles"), fmt)?;
    println!("filter: kept {} of {} methods", fo.len(), original.len());
    Ok(())
}

pub fn suite(args: &SuiteArgs) -> Result<()> {
    let workers = args.workers.count();
    let (mut original, format) = load(&args.original)?;
    original.provenance.seed = args.seed;
    let roles = match &args.roles {
        Some(path) => load(path)?.0,
        None => run_augment(&original, mode(args.name_based), workers).0,
    };
    let opts = SuiteOptions { seed: args.seed, independent_seeds: args.independent_seeds, workers };
    let suite = build_eval_suite(&original, &roles, opts)?;
    let fmt = args.output.format.map_or(format, Format::from);
    let mut sizes = BTreeMap::new();
    for (name, corpus) in suite.sets() {
        emit(corpus, &args.output.out.join(name), fmt)?;
        sizes.insert(name, corpus.len());
    }
    write_json(&args.output.out.join("suite.json"), &sizes)?;
    let line: Vec<String> = suite.sets().iter().map(|(n, c)| format!("{n}={}", c.len())).collect();
    println!("suite: {}", line.join(" "));
    Ok(())
}

pub fn stats_cmd(args: &StatsArgs) -> Result<()> {
    let (corpus, _) = load(&args.input.input)?;
    let report = stats(&corpus, args.workers.count());
    match &args.out {
        Some(path) => {
            write_json(path, &report)?;
            println!(
                "stats: {} methods, {} augmented, steppers={} walkers={}",
                report.methods(),
                report.augmented_methods(),
                report.steppers,
                report.walkers
            );
        }
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(())
}

#[derive(Deserialize)]
struct NameLine {
    id: String,
    name: String,
}

/// Names keyed by id, in file order. Jsonl `{id, name}` lines, or plain
/// lines numbered from 1.
fn read_names(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let jsonl = text.lines().find(|l| !l.trim().is_empty()).is_some_and(|l| l.trim_start().starts_with('{'));
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (n, line) in text.lines().enumerate() {
        let (id, name) = if jsonl {
            if line.trim().is_empty() {
                continue;
            }
            let rec: NameLine =
                serde_json::from_str(line).with_context(|| format!("{}:{}: malformed line", path.display(), n + 1))?;
            (rec.id, rec.name)
        } else {
            ((n + 1).to_string(), line.trim().to_string())
        };
        if !seen.insert(id.clone()) {
            bail!("{}: duplicate id `{id}`", path.display());
        }
        out.push((id, name));
    }
    Ok(out)
}

fn read_pairs(path: &Path) -> Result<Vec<NamePair>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(line).with_context(|| format!("{}:{}: malformed line", path.display(), n + 1))?);
    }
    Ok(out)
}

fn join_names(refs: Vec<(String, String)>, preds: Vec<(String, String)>) -> Result<Vec<NamePair>> {
    let ref_ids: BTreeSet<&str> = refs.iter().map(|(id, _)| id.as_str()).collect();
    if let Some((id, _)) = preds.iter().find(|(id, _)| !ref_ids.contains(id.as_str())) {
        bail!("prediction `{id}` has no reference");
    }
    let mut preds: BTreeMap<String, String> = preds.into_iter().collect();
    Ok(refs
        .into_iter()
        .map(|(id, reference)| {
            let pred = preds.remove(&id).unwrap_or_default();
            NamePair { id, reference, pred }
        })
        .collect())
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let pairs = match (&args.input, &args.refs, &args.preds) {
        (Some(path), _, _) => read_pairs(path)?,
        (None, Some(r), Some(p)) => join_names(read_names(r)?, read_names(p)?)?,
        _ => unreachable!("argument parser enforces an input"),
    };
    let report = evaluate(&pairs)?;
    println!("{}", report.summary_line());
    if let Some(path) = &args.out {
        write_json(path, &report)?;
        if args.per_example {
            let csv = path.with_extension("csv");
            fs::write(&csv, report.per_example_csv()).with_context(|| format!("writing {}", csv.display()))?;
        }
    } else if args.per_example {
        print!("{}", report.per_example_csv());
    }
    Ok(())
}
