//! The `emoset` command line.
//!
//! Results go to stdout in the selected `--format` and into a
//! content-addressed directory under `--out`, named after the command and a
//! digest of its inputs and options. Diagnostics go to stderr as one JSON
//! object per line. Exit codes: 1 usage, 2 I/O, 3 validation, 4 upstream.

mod commands;
mod error;
mod output;
mod rows;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::{CliError, ErrorKind};

#[derive(Debug, Parser)]
#[command(name = "emoset", version, about = "Set-based evaluation of open-vocabulary emotion labels")]
pub struct Cli {
    /// Taxonomy bundle JSON; the built-in bundle when omitted
    #[arg(long, global = true, value_name = "FILE")]
    pub bundle: Option<PathBuf>,
    /// Root directory for content-addressed outputs
    #[arg(long, global = true, value_name = "DIR", default_value = "emoset-out")]
    pub out: PathBuf,
    /// Seed for commands that draw random numbers
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output format for result tables
    #[arg(long, global = true, value_enum, default_value_t = Format::JsonLines)]
    pub format: Format,
    /// Run per-sample work on one thread
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    JsonLines,
    Delimited,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score prediction files against ground truth under grouping strategies
    Evaluate(EvaluateArgs),
    /// Build taxonomy bundles, materialize LLM partitions, inspect groupings
    #[command(subcommand)]
    Grouping(GroupingCommand),
    /// Ask an LLM for synonyms or word forms of labels
    Expand(ExpandArgs),
    /// Pearson correlation between score columns or report files
    Correlate(CorrelateArgs),
    /// Pairwise Jaccard agreement between annotators
    Agreement(AgreementArgs),
    /// Label-count, emotion-frequency and description-length distributions
    Stats(StatsArgs),
    /// One random basic emotion per sample
    Baseline(BaselineArgs),
    /// BLEU and ROUGE-L between reference and hypothesis descriptions
    Textmetrics(TextmetricsArgs),
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Ground-truth records (JSON lines)
    #[arg(long, value_name = "FILE")]
    pub gt: PathBuf,
    /// Prediction records; repeat for repeated runs
    #[arg(long, value_name = "FILE", required = true)]
    pub pred: Vec<PathBuf>,
    /// Comma-separated strategies: M1, M2, M3-W1-L1, M3-W2-L2:last, GPT:<name>, M3-all, EW-all
    #[arg(long, default_value = "M2")]
    pub strategy: String,
    /// Cached partition for GPT:<name>
    #[arg(long, value_name = "NAME=FILE")]
    pub partition: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum GroupingCommand {
    /// Assemble a taxonomy bundle from wheel, synonym and form files
    Build(BuildArgs),
    /// Ask an LLM to group labels and write a partition file
    Partition(PartitionArgs),
    /// Show the group each label maps to under each strategy
    Trace(TraceArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Wheel file (tab-separated); repeat per wheel
    #[arg(long, value_name = "FILE", required = true)]
    pub wheel: Vec<PathBuf>,
    /// Synonym map file
    #[arg(long, value_name = "FILE")]
    pub synonyms: Option<PathBuf>,
    /// Word-form map file
    #[arg(long, value_name = "FILE")]
    pub forms: Option<PathBuf>,
    /// Version string stored in the bundle
    #[arg(long = "taxonomy-version", default_value = "custom")]
    pub taxonomy_version: String,
}

#[derive(Debug, Args)]
pub struct LabelInput {
    /// Label list, one per line (`#` starts a comment)
    #[arg(long, value_name = "FILE")]
    pub labels: Option<PathBuf>,
    /// Record file whose distinct labels are used
    #[arg(long, value_name = "FILE")]
    pub from_records: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LlmArgs {
    /// Response cache directory
    #[arg(long, value_name = "DIR", default_value = "llm-cache")]
    pub cache: PathBuf,
    /// replay (cache only), record (cache, then endpoint) or live (endpoint only)
    #[arg(long, default_value = "replay")]
    pub mode: crate::llmclient::Mode,
    /// Model id sent with every request [default: the endpoint config's model, else gpt-3.5-turbo]
    #[arg(long)]
    pub model: Option<String>,
    /// TOML endpoint configuration (base_url, model, api_key, timeout_secs)
    #[arg(long, value_name = "FILE")]
    pub endpoint_config: Option<PathBuf>,
    /// Sampling temperature
    #[arg(long, default_value_t = 0.0)]
    pub temperature: f64,
    /// Maximum requests in flight
    #[arg(long, default_value_t = 4)]
    pub concurrency: usize,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[command(flatten)]
    pub input: LabelInput,
    #[command(flatten)]
    pub llm: LlmArgs,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    /// Label to trace; repeatable
    #[arg(long, required = true)]
    pub label: Vec<String>,
    /// Comma-separated strategies
    #[arg(long, default_value = "M1,M2,M3-all")]
    pub strategy: String,
    /// Cached partition for GPT:<name>
    #[arg(long, value_name = "NAME=FILE")]
    pub partition: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExpandKind {
    Synonyms,
    Forms,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    /// What to ask for
    #[arg(long, value_enum)]
    pub kind: ExpandKind,
    #[command(flatten)]
    pub input: LabelInput,
    #[command(flatten)]
    pub llm: LlmArgs,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// CSV score table: row names, then numeric columns
    #[arg(long, value_name = "FILE", conflicts_with = "report")]
    pub table: Option<PathBuf>,
    /// Reference column; every other column is correlated against it
    #[arg(long, requires = "table")]
    pub reference: Option<String>,
    /// Append an M-avg column computed from the twelve wheel-based strategy columns
    #[arg(long, requires = "table")]
    pub add_mavg: bool,
    /// Report JSON files; per-sample F columns are correlated pairwise
    #[arg(long, value_name = "FILE")]
    pub report: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AgreementArgs {
    /// Annotator records as NAME=FILE or FILE (named by file stem); repeat per annotator
    #[arg(long, value_name = "[NAME=]FILE", required = true)]
    pub annotation: Vec<String>,
    /// Grouping strategy applied before comparing
    #[arg(long, default_value = "M2")]
    pub strategy: String,
    /// Cached partition for GPT:<name>
    #[arg(long, value_name = "NAME=FILE")]
    pub partition: Vec<String>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Label records
    #[arg(long, value_name = "FILE")]
    pub records: PathBuf,
    /// Description texts (JSON lines with id and text)
    #[arg(long, value_name = "FILE")]
    pub texts: Option<PathBuf>,
    /// Description-length histogram bucket width, in tokens
    #[arg(long, default_value_t = 10)]
    pub bucket_width: usize,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    /// Records whose sample ids receive a random label
    #[arg(long, value_name = "FILE")]
    pub ids_from: PathBuf,
    /// Comma-separated label space; the six basic emotions when omitted
    #[arg(long)]
    pub labels: Option<String>,
}

#[derive(Debug, Args)]
pub struct TextmetricsArgs {
    /// Reference sentence
    #[arg(long, requires = "hypothesis", conflicts_with_all = ["references", "hypotheses"])]
    pub reference: Option<String>,
    /// Hypothesis sentence
    #[arg(long, requires = "reference")]
    pub hypothesis: Option<String>,
    /// Reference descriptions (JSON lines with id and text)
    #[arg(long, value_name = "FILE", requires = "hypotheses")]
    pub references: Option<PathBuf>,
    /// Hypothesis descriptions (JSON lines with id and text)
    #[arg(long, value_name = "FILE", requires = "references")]
    pub hypotheses: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command, writing results
/// to `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(CliError::from_clap)?;
    commands::dispatch(&cli, stdout)
}

/// Process entry point; returns the exit code.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format(|buf, record| {
            use std::io::Write;
            writeln!(buf, "{}", record.args())
        })
        .init();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(std::env::args_os(), &mut lock) {
        Ok(()) => 0,
        Err(e) if e.kind == ErrorKind::Help => {
            print!("{}", e.message);
            0
        }
        Err(e) => {
            eprintln!("{}", e.json_line());
            e.exit_code()
        }
    }
}
