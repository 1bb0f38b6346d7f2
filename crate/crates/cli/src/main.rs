//! `hmlcr`: index a source tree, train projections, answer queries,
//! cross-validate, and inspect what a code feature learned.

mod commands;
mod config;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use hmlcr_core::eval::{FoldOrientation, Method};
use hmlcr_core::vectorize::Weighting;

use commands::QueryMethod;
use config::PipelineConfig;

/// Environment variable naming the config file when `--config` is absent.
const CONFIG_ENV: &str = "HMLCR_CONFIG";

#[derive(Debug, Parser)]
#[command(
    name = "hmlcr",
    version,
    about = "Retrieve source files for natural-language queries"
)]
struct Cli {
    /// Pipeline config (TOML); falls back to $HMLCR_CONFIG, then defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Flags win over the config file.
#[derive(Debug, clap::Args)]
struct Overrides {
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// Built-in profile name or profile TOML path.
    #[arg(long, global = true)]
    profile: Option<String>,
    /// `path<TAB>label` manifest.
    #[arg(long, global = true)]
    labels: Option<PathBuf>,
    #[arg(long, global = true)]
    queries: Option<PathBuf>,
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true, value_parser = parse_weighting)]
    weighting: Option<Weighting>,
    /// Document-frequency bounds for code features, as `LOWER,UPPER`.
    #[arg(long, global = true, value_parser = parse_bounds)]
    bounds: Option<(usize, usize)>,
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    eta: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    #[arg(long, global = true)]
    lambda1: Option<f64>,
    #[arg(long, global = true)]
    lambda2: Option<f64>,
    #[arg(long, global = true)]
    lambda3: Option<f64>,
    /// Choose the learning rate by the sufficient-decrease search.
    #[arg(long, global = true)]
    auto_eta: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ingest the corpus and write vocabulary, features, X, Y and R.
    Index,
    /// Train on the whole indexed corpus and write the model and loss trace.
    Train,
    /// Rank documents for a query.
    Query {
        text: String,
        #[arg(short, default_value_t = 10)]
        n: usize,
        #[arg(long, value_enum, default_value_t = QueryMethod::Hmlcr)]
        method: QueryMethod,
    },
    /// Cross-validate the configured methods on the labeled query file.
    Eval {
        /// Comma-separated method names.
        #[arg(long, value_delimiter = ',', value_parser = parse_method)]
        methods: Option<Vec<Method>>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long, value_parser = parse_orientation)]
        orientation: Option<FoldOrientation>,
    },
    /// Top words of a code feature under the trained model.
    Explain {
        key: String,
        #[arg(short, default_value_t = 10)]
        t: usize,
        /// Also show the CFA initialization's words side by side.
        #[arg(long)]
        with_cfa: bool,
    },
}

fn parse_weighting(s: &str) -> Result<Weighting, String> {
    s.parse().map_err(|e: hmlcr_core::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: hmlcr_core::Error| e.to_string())
}

fn parse_orientation(s: &str) -> Result<FoldOrientation, String> {
    match s {
        "train-on-one" => Ok(FoldOrientation::TrainOnOne),
        "test-on-one" => Ok(FoldOrientation::TestOnOne),
        _ => Err(format!("unknown orientation `{s}` (train-on-one, test-on-one)")),
    }
}

fn parse_bounds(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LOWER,UPPER")?;
    let lo = lo.trim().parse().map_err(|_| format!("bad lower bound `{lo}`"))?;
    let hi = hi.trim().parse().map_err(|_| format!("bad upper bound `{hi}`"))?;
    Ok((lo, hi))
}

/// A problem with the invocation or configuration rather than the run.
#[derive(Debug)]
struct UsageError(anyhow::Error);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn load_config(cli: &Cli) -> anyhow::Result<PipelineConfig> {
    let path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let mut c = match path {
        Some(p) => PipelineConfig::load(&p)?,
        None => PipelineConfig::from_toml("", &std::env::current_dir().context("no working directory")?)?,
    };
    let o = &cli.overrides;
    if let Some(v) = &o.corpus {
        c.corpus = v.clone();
    }
    if let Some(v) = &o.profile {
        c.profile = v.clone();
    }
    if let Some(v) = &o.labels {
        c.labels = Some(v.clone());
    }
    if let Some(v) = &o.queries {
        c.queries = Some(v.clone());
    }
    if let Some(v) = &o.output {
        c.output = v.clone();
    }
    if let Some(v) = o.seed {
        c.seed = v;
    }
    if let Some(v) = o.alpha {
        c.alpha = v;
    }
    if let Some(v) = o.weighting {
        c.weighting = v;
    }
    if let Some(v) = o.bounds {
        c.bounds = Some(v);
    }
    if let Some(v) = o.k {
        c.hyper.k = v;
    }
    if let Some(v) = o.eta {
        c.hyper.eta = v;
    }
    if let Some(v) = o.max_iter {
        c.hyper.max_iter = v;
    }
    if let Some(v) = o.lambda1 {
        c.hyper.lambda1 = v;
    }
    if let Some(v) = o.lambda2 {
        c.hyper.lambda2 = v;
    }
    if let Some(v) = o.lambda3 {
        c.hyper.lambda3 = v;
    }
    c.auto_eta |= o.auto_eta;
    if let Command::Eval {
        methods,
        folds,
        orientation,
    } = &cli.command
    {
        if let Some(v) = methods {
            c.eval.methods = v.clone();
        }
        if let Some(v) = folds {
            c.eval.folds = *v;
        }
        if let Some(v) = orientation {
            c.eval.orientation = *v;
        }
    }
    c.validate()?;
    Ok(c)
}

fn run(cli: &Cli) -> anyhow::Result<String> {
    let config = load_config(cli).map_err(UsageError)?;
    match &cli.command {
        Command::Index => commands::index(&config),
        Command::Train => commands::train_model(&config),
        Command::Query { text, n, method } => commands::query(&config, text, *n, *method),
        Command::Eval { .. } => commands::evaluate(&config),
        Command::Explain { key, t, with_cfa } => commands::explain(&config, key, *t, *with_cfa),
    }
}

/// 2 for usage and configuration problems, 1 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    use hmlcr_core::Error as E;
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::MissingRoot(_)
                | E::Profile(_)
                | E::InvalidBounds { .. }
                | E::Hyperparams(_)
                | E::InvalidArgument(_)
                | E::UnlabeledQuery(_)
                | E::TooFewQueries { .. }
                | E::ManifestEntryMissing(_) => 2,
                _ => 1,
            };
        }
    }
    1
}

/// The error chain joined with `: `, skipping causes already spelled out by
/// the message above them.
fn one_line(err: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in err.chain() {
        let text = cause.to_string();
        if msg.contains(&text) {
            continue;
        }
        if !msg.is_empty() {
            msg.push_str(": ");
        }
        msg.push_str(&text);
    }
    msg.replace(['\n', '\t'], " ")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            eprintln!("error\tusage\t{first}");
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = exit_code(&e);
            let kind = if code == 2 { "usage" } else { "runtime" };
            let msg = one_line(&e);
            eprintln!("error\t{kind}\t{msg}");
            ExitCode::from(code)
        }
    }
}
