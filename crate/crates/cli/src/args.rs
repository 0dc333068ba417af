use clap::{Args, Parser, Subcommand, ValueEnum};
use rolemark_core::corpus::Format;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "rolemark", version, about = "Detect variable roles in Java methods and build role-augmented corpora")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the detected roles of every method as JSON lines.
    Detect(DetectArgs),
    /// Prefix steppers and walkers with their role.
    Augment(AugmentArgs),
    /// Rename one random variable per method to `varN`.
    Transform(TransformArgs),
    /// Keep only the methods that augmentation changed, in both corpora.
    Filter(FilterArgs),
    /// Build the eight evaluation test sets.
    Suite(SuiteArgs),
    /// Report augmentation statistics.
    Stats(StatsArgs),
    /// Score predicted method names against references.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    DirTree,
    Jsonl,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::DirTree => Format::DirTree,
            FormatArg::Jsonl => Format::Jsonl,
        }
    }
}

#[derive(Debug, Args)]
pub struct Input {
    /// Corpus directory, jsonl file, or directory holding methods.jsonl.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Output layout; defaults to the layout of the input.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct Workers {
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "ROLEMARK_WORKERS", value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: Option<u16>,
}

impl Workers {
    /// 0 lets the thread pool pick.
    pub fn count(&self) -> usize {
        self.workers.map_or(0, usize::from)
    }
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub input: Input,
    /// Write the JSON lines here instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub output: Output,
    /// Rename every binding sharing a role variable's name.
    #[arg(long)]
    pub name_based: bool,
    /// Recorded in the manifest.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub output: Output,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long, value_name = "PATH")]
    pub original: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub roles: PathBuf,
    /// Receives `original/` and `roles/`.
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// The original test corpus.
    #[arg(long, value_name = "PATH")]
    pub original: PathBuf,
    /// Its augmentation; computed when absent.
    #[arg(long, value_name = "PATH")]
    pub roles: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Transform the roles corpus under an unrelated seed.
    #[arg(long)]
    pub independent_seeds: bool,
    #[arg(long)]
    pub name_based: bool,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: Input,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Jsonl of `{id, ref, pred}` objects.
    #[arg(long = "in", value_name = "FILE", conflicts_with_all = ["refs", "preds"], required_unless_present = "refs")]
    pub input: Option<PathBuf>,
    /// Reference names: jsonl `{id, name}` or one name per line.
    #[arg(long, value_name = "FILE", requires = "preds")]
    pub refs: Option<PathBuf>,
    /// Predicted names, same layouts as `--refs`.
    #[arg(long, value_name = "FILE", requires = "refs")]
    pub preds: Option<PathBuf>,
    /// Write the report JSON here.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also print the per-example table as CSV.
    #[arg(long)]
    pub per_example: bool,
}
