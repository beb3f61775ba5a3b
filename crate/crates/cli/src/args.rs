use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "derivekit", version, about = "Reconstruct hidden steps of symbolic derivations")]
pub struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "DERIVEKIT_JOBS", default_value_t = 0)]
    pub jobs: usize,

    /// File of `key = value` lines, one per flag, read before the command line.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect derivation files.
    Dataset {
        #[command(subcommand)]
        command: DatasetCommand,
    },
    /// Distance between two strings.
    Metrics(MetricsArgs),
    /// Reconstruct hidden states of a derivation, one JSON line per unit.
    Reconstruct(ReconstructArgs),
    /// Score reconstruction over a whole derivation.
    Evaluate(EvaluateArgs),
    /// Write a synthetic derivation.
    Generate(GenerateArgs),
    /// The action set.
    Actions {
        #[command(subcommand)]
        command: ActionsCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum DatasetCommand {
    /// Record counts, role census and string lengths.
    Stats {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Report::Json)]
        report: Report,
    },
    /// Check the schema and the role and category columns.
    Validate {
        path: PathBuf,
        /// Also replay every step with the built-in actions.
        #[arg(long)]
        replay: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum ActionsCommand {
    List {
        #[arg(long, value_enum, default_value_t = Report::Table)]
        report: Report,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Report {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureName {
    Levenshtein,
    Damerau,
    Osa,
    Hamming,
    Jaro,
    JaroWinkler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RenderingName {
    Text,
    Latex,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long, value_enum, default_value_t = MeasureName::Damerau)]
    pub measure: MeasureName,
    /// Jaro-Winkler prefix scaling.
    #[arg(long, default_value_t = 0.1)]
    pub jw_p: f64,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[arg(long, default_value_t = 10)]
    pub n1: u32,
    #[arg(long, default_value_t = 10)]
    pub n2: u32,
    #[arg(long, default_value_t = 10)]
    pub n3: u32,
    /// Subexpressions shorter than this many characters are small.
    #[arg(long, default_value_t = 100)]
    pub threshold: usize,
    #[arg(long, value_enum, default_value_t = RenderingName::Text)]
    pub rendering: RenderingName,
    /// Requisite equations added to every knowledge base.
    #[arg(long, value_name = "PATH")]
    pub kb: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
    /// Omit to print every measure.
    #[arg(long, value_enum)]
    pub measure: Option<MeasureName>,
    #[arg(long, default_value_t = 0.1)]
    pub jw_p: f64,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// 1-based record of the hidden state; omit for every unit.
    #[arg(long)]
    pub unit: Option<usize>,
    /// Intermediate states searched between the endpoints.
    #[arg(long, default_value_t = 1)]
    pub hops: usize,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub eta: u32,
    /// Non-integer eta; overrides --eta.
    #[arg(long)]
    pub eta_real: Option<f64>,
    #[arg(long, value_enum, default_value_t = Report::Table)]
    pub report: Report,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_name = "PATH")]
    pub seed_eqs: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub length: usize,
    #[arg(long, default_value_t = 0.2)]
    pub branch_p: f64,
    #[arg(long, default_value_t = 0)]
    pub rng: u64,
    /// Longest text rendering a generated state may have.
    #[arg(long, default_value_t = 160)]
    pub max_state_chars: usize,
    /// `.csv` selects commas; anything else is tab-separated.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

/// Inserts `--key value` pairs from a config file after the command-line
/// arguments. Keys already given on the command line are skipped. `true` and
/// `false` switch boolean flags.
pub fn merge_config(argv: Vec<OsString>, text: &str, origin: &str) -> Result<Vec<OsString>, String> {
    let given: Vec<String> = argv
        .iter()
        .filter_map(|a| a.to_str())
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    let mut out = argv;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("{origin}:{}: expected key = value", i + 1));
        };
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim();
        if key.is_empty() {
            return Err(format!("{origin}:{}: empty key", i + 1));
        }
        if key == "config" || given.contains(&key) {
            continue;
        }
        match value {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            v => out.push(format!("--{key}={v}").into()),
        }
    }
    Ok(out)
}
