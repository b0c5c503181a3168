//! Command-line front end: `classify`, `analyze`, `lexicon`, `trend`,
//! `fetch`.
//!
//! Standard output carries only data; diagnostics go to standard error.
//! Settings resolve flag-over-file-over-environment: an optional `key=value`
//! config file (`--config`) mirrors every long flag, and the feed endpoint
//! can come from `PHISHSCOPE_FEED_URL`.
//!
//! Exit codes: 0 success; 2 URL parse error (`classify`); 64 usage errors;
//! 65 malformed or empty input data; 66 unreadable input file; 69 network
//! failure.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::dataset::{self, FeedError, FeedReader};
use crate::detectors::{classify, Detection, DetectorConfig, Type2Mode};
use crate::lexicon::{self, WordList};
use crate::report::{
    self, analyze_stream, AnalysisConfig, OutputFormat, ReportMeta, TrendRow,
};
use crate::share::format_percent_trunc;
use crate::url_model::parse_url;

pub const FEED_URL_ENV: &str = "PHISHSCOPE_FEED_URL";

#[derive(Parser, Debug)]
#[command(
    name = "phishscope",
    version,
    about = "Classify phishing URLs by obfuscation technique and analyze PhishTank feeds"
)]
struct Cli {
    /// Optional key=value config file mirroring the long flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// More logging on standard error (repeatable)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct DetectorArgs {
    /// Minimum extra hostname characters for the oversized-subdomain detector
    #[arg(long)]
    type3_threshold: Option<usize>,

    /// Maximum edit distance for the look-alike-domain detector
    #[arg(long)]
    edit_distance: Option<usize>,

    /// Brand list file (one lowercase brand per line, `#` comments)
    #[arg(long)]
    brands: Option<PathBuf>,

    /// Public-suffix snapshot file (`*.` wildcards, `!` exceptions, `//` comments)
    #[arg(long)]
    suffixes: Option<PathBuf>,

    /// How the foreign-domain detector decides
    #[arg(long, value_enum)]
    type2_mode: Option<Type2Mode>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify one URL and print the detection set as JSON
    Classify {
        url: String,
        #[command(flatten)]
        detector: DetectorArgs,
    },
    /// Run the full table set over a PhishTank-format CSV feed
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        detector: DetectorArgs,
        /// Output format
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
        /// Additional word-list files (repeatable)
        #[arg(long)]
        wordlist: Vec<PathBuf>,
        /// Lexicon size
        #[arg(long)]
        top: Option<usize>,
        /// Minimum token length
        #[arg(long)]
        min_len: Option<usize>,
        /// Drop repeated URL strings before analysis
        #[arg(long)]
        dedupe_url: bool,
        /// Worker threads (output is identical for any value)
        #[arg(long)]
        jobs: Option<usize>,
        /// Omit the metadata header (enables golden-file diffing)
        #[arg(long)]
        no_meta: bool,
    },
    /// Mine the word-token lexicon of a feed
    Lexicon {
        input: PathBuf,
        #[arg(long)]
        top: Option<usize>,
        #[arg(long)]
        min_len: Option<usize>,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
    },
    /// Per-year feature trend over a feed
    Trend {
        input: PathBuf,
        /// Which feature to bucket by year
        #[arg(long, value_enum)]
        feature: TrendFeature,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
    },
    /// Download a feed and verify it parses before keeping it
    Fetch {
        /// Feed endpoint; defaults to the config file or PHISHSCOPE_FEED_URL
        endpoint: Option<String>,
        /// Destination file
        #[arg(short, long)]
        output: PathBuf,
        /// Request timeout in seconds
        #[arg(long)]
        timeout: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum TrendFeature {
    Https,
    Idn,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    UrlParse(#[from] crate::url_model::ParseError),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    NoInput(String),
    #[error("{0}")]
    Network(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::UrlParse(_) => 2,
            CliError::Usage(_) => 64,
            CliError::Data(_) => 65,
            CliError::NoInput(_) => 66,
            CliError::Network(_) => 69,
        }
    }
}

impl From<FeedError> for CliError {
    fn from(e: FeedError) -> Self {
        match e {
            FeedError::FileUnreadable { .. } => CliError::NoInput(e.to_string()),
            FeedError::HeaderMismatch { .. } | FeedError::NonCsvPayload(_) => {
                CliError::Data(e.to_string())
            }
            FeedError::NetworkFailure(_) => CliError::Network(e.to_string()),
        }
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return code;
        }
    };

    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();

    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file = Settings::load(cli.config.as_deref())?;
    match cli.command {
        Command::Classify { url, detector } => cmd_classify(&url, &detector, &file),
        Command::Analyze {
            input,
            detector,
            format,
            wordlist,
            top,
            min_len,
            dedupe_url,
            jobs,
            no_meta,
        } => cmd_analyze(
            &input, &detector, format, &wordlist, top, min_len, dedupe_url, jobs, no_meta, &file,
        ),
        Command::Lexicon {
            input,
            top,
            min_len,
            format,
        } => cmd_lexicon(&input, top, min_len, format, &file),
        Command::Trend {
            input,
            feature,
            format,
        } => cmd_trend(&input, feature, format, &file),
        Command::Fetch {
            endpoint,
            output,
            timeout,
        } => cmd_fetch(endpoint.as_deref(), &output, timeout, &file),
    }
}

/// `key=value` lines; `#` comments. Keys repeat to accumulate (used by
/// `wordlist`).
struct Settings {
    values: BTreeMap<String, Vec<String>>,
}

impl Settings {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut values: BTreeMap<String, Vec<String>> = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
            })?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    CliError::Usage(format!(
                        "config line {} is not key=value: {line:?}",
                        lineno + 1
                    ))
                })?;
                values
                    .entry(key.trim().to_string())
                    .or_default()
                    .push(value.trim().to_string());
            }
        }
        Ok(Settings { values })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values
            .get(key)
            .and_then(|v| v.last())
            .map(String::as_str)
    }

    fn get_all(&self, key: &str) -> impl Iterator<Item = &str> {
        self.values
            .get(key)
            .into_iter()
            .flatten()
            .map(String::as_str)
    }
}

/// Flag wins over config file.
fn resolve<T>(flag: Option<T>, file: Option<&str>, key: &str) -> Result<Option<T>, CliError>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    match file {
        Some(text) => text
            .parse::<T>()
            .map(Some)
            .map_err(|e| CliError::Usage(format!("bad config value for {key}: {e}"))),
        None => Ok(None),
    }
}

fn build_detector_config(
    args: &DetectorArgs,
    file: &Settings,
) -> Result<DetectorConfig, CliError> {
    let mut cfg = DetectorConfig::default();
    if let Some(t) = resolve(args.type3_threshold, file.get("type3-threshold"), "type3-threshold")? {
        cfg.type3_length_threshold = t;
    }
    if let Some(d) = resolve(args.edit_distance, file.get("edit-distance"), "edit-distance")? {
        cfg.type4_max_edit_distance = d;
    }
    let brands = args
        .brands
        .clone()
        .or_else(|| file.get("brands").map(PathBuf::from));
    if let Some(path) = brands {
        cfg.load_brands(&path)
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let suffixes = args
        .suffixes
        .clone()
        .or_else(|| file.get("suffixes").map(PathBuf::from));
    if let Some(path) = suffixes {
        cfg.load_suffixes(&path)
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    if let Some(mode) = args.type2_mode {
        cfg.type2_mode = mode;
    } else if let Some(text) = file.get("type2-mode") {
        cfg.type2_mode = match text.to_ascii_lowercase().as_str() {
            "metadata" => Type2Mode::Metadata,
            "heuristic" => Type2Mode::Heuristic,
            "both" => Type2Mode::Both,
            other => {
                return Err(CliError::Usage(format!(
                    "bad config value for type2-mode: {other:?}"
                )))
            }
        };
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

#[derive(Serialize)]
struct ClassifyOutput<'a> {
    url: &'a str,
    detections: &'a [Detection],
}

fn cmd_classify(url: &str, detector: &DetectorArgs, file: &Settings) -> Result<(), CliError> {
    let cfg = build_detector_config(detector, file)?;
    let parsed = parse_url(url)?;
    let classification = classify(&parsed, &cfg, None);
    let out = ClassifyOutput {
        url,
        detections: &classification.detections,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&out).expect("detections serialize")
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_analyze(
    input: &Path,
    detector: &DetectorArgs,
    format: Option<OutputFormat>,
    wordlist: &[PathBuf],
    top: Option<usize>,
    min_len: Option<usize>,
    dedupe_url: bool,
    jobs: Option<usize>,
    no_meta: bool,
    file: &Settings,
) -> Result<(), CliError> {
    let format = resolve(format, file.get("format"), "format")?.unwrap_or(OutputFormat::Markdown);
    let top = resolve(top, file.get("top"), "top")?.unwrap_or(10);
    let min_len = resolve(min_len, file.get("min-len"), "min-len")?
        .unwrap_or(lexicon::DEFAULT_MIN_TOKEN_LEN);
    let jobs = resolve(jobs, file.get("jobs"), "jobs")?.unwrap_or(1);
    let dedupe_url = dedupe_url || file.get("dedupe-url") == Some("true");
    if top < 1 || min_len < 1 || jobs < 1 {
        return Err(CliError::Usage(
            "--top, --min-len and --jobs must be at least 1".into(),
        ));
    }

    let mut wordlists = WordList::bundled_defaults();
    for path in wordlist
        .iter()
        .cloned()
        .chain(file.get_all("wordlist").map(PathBuf::from))
    {
        wordlists.push(WordList::from_file(&path).map_err(|e| CliError::Usage(e.to_string()))?);
    }

    let cfg = AnalysisConfig {
        detector: build_detector_config(detector, file)?,
        wordlists,
        top_n: top,
        min_token_len: min_len,
    };

    let mut reader = FeedReader::open(input)?;
    let outcome = analyze_stream(reader.by_ref(), &cfg, jobs, dedupe_url);
    eprintln!("ingest: {}", reader.stats().summary());
    if outcome.url_parse_failures > 0 {
        eprintln!("url parse failures: {}", outcome.url_parse_failures);
    }
    for (kind, count) in outcome.diagnostics.counts() {
        eprintln!("detector diagnostic {kind}: {count}");
    }

    let mut report =
        report::finalize(&outcome.counters).map_err(|e| CliError::Data(e.to_string()))?;
    if !no_meta {
        report.meta = Some(ReportMeta {
            input: input.display().to_string(),
            config_digest: outcome.counters.config_digest().to_string(),
            generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        });
    }
    print!("{}", report::render(&report, format));
    Ok(())
}

fn cmd_lexicon(
    input: &Path,
    top: Option<usize>,
    min_len: Option<usize>,
    format: Option<OutputFormat>,
    file: &Settings,
) -> Result<(), CliError> {
    let top = resolve(top, file.get("top"), "top")?.unwrap_or(10);
    let min_len = resolve(min_len, file.get("min-len"), "min-len")?
        .unwrap_or(lexicon::DEFAULT_MIN_TOKEN_LEN);
    let format = resolve(format, file.get("format"), "format")?.unwrap_or(OutputFormat::Csv);
    if top < 1 || min_len < 1 {
        return Err(CliError::Usage("--top and --min-len must be at least 1".into()));
    }

    let mut reader = FeedReader::open(input)?;
    let entries = lexicon::build_lexicon(reader.by_ref().map(|r| r.url), top, min_len)
        .map_err(|e| CliError::Data(e.to_string()))?;
    eprintln!("ingest: {}", reader.stats().summary());

    match format {
        OutputFormat::Csv => {
            println!("token,url_count,percentage");
            for e in &entries {
                println!(
                    "{},{},{}",
                    e.token,
                    e.url_count,
                    e.percentage.format_percent(3)
                );
            }
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Row<'a> {
                token: &'a str,
                url_count: u64,
                percentage: String,
            }
            let rows: Vec<Row> = entries
                .iter()
                .map(|e| Row {
                    token: &e.token,
                    url_count: e.url_count,
                    percentage: e.percentage.format_percent(3),
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&rows).expect("rows serialize"));
        }
        OutputFormat::Markdown => {
            println!("| Token | URLs | % of URLs |");
            println!("|---|---:|---:|");
            for e in &entries {
                println!(
                    "| {} | {} | {} |",
                    e.token,
                    e.url_count,
                    e.percentage.format_percent(3)
                );
            }
        }
    }
    Ok(())
}

fn cmd_trend(
    input: &Path,
    feature: TrendFeature,
    format: Option<OutputFormat>,
    file: &Settings,
) -> Result<(), CliError> {
    let format = resolve(format, file.get("format"), "format")?.unwrap_or(OutputFormat::Markdown);
    let mut reader = FeedReader::open(input)?;

    let mut per_year_total: BTreeMap<i32, u64> = BTreeMap::new();
    let mut per_year_feature: BTreeMap<i32, u64> = BTreeMap::new();
    for record in reader.by_ref() {
        let parsed = match parse_url(&record.url) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let year = dataset::year_of(&record);
        *per_year_total.entry(year).or_insert(0) += 1;
        let hit = match feature {
            TrendFeature::Https => parsed.scheme == "https",
            TrendFeature::Idn => crate::detectors::detect_type6(&parsed).is_some(),
        };
        if hit {
            *per_year_feature.entry(year).or_insert(0) += 1;
        }
    }
    eprintln!("ingest: {}", reader.stats().summary());
    if per_year_total.is_empty() {
        return Err(CliError::Data("no URLs to analyze".into()));
    }

    let rows: Vec<TrendRow> = per_year_total
        .iter()
        .rev()
        .map(|(year, total)| {
            let count = per_year_feature.get(year).copied().unwrap_or(0);
            TrendRow {
                year: *year,
                count,
                total: *total,
                percentage: format_percent_trunc(count, *total, 2),
            }
        })
        .collect();

    let name = match feature {
        TrendFeature::Https => "https",
        TrendFeature::Idn => "idn",
    };
    match format {
        OutputFormat::Json => {
            println!("{}", serde_json::to_string_pretty(&rows).expect("rows serialize"));
        }
        OutputFormat::Csv => {
            println!("year,{name}_count,year_total,percentage");
            for r in &rows {
                println!("{},{},{},{}", r.year, r.count, r.total, r.percentage);
            }
        }
        OutputFormat::Markdown => {
            println!("| Year | {name} URLs | Year total | % |");
            println!("|---|---:|---:|---:|");
            for r in &rows {
                println!("| {} | {} | {} | {} |", r.year, r.count, r.total, r.percentage);
            }
        }
    }
    Ok(())
}

fn cmd_fetch(
    endpoint: Option<&str>,
    output: &Path,
    timeout: Option<u64>,
    file: &Settings,
) -> Result<(), CliError> {
    let from_env = std::env::var(FEED_URL_ENV).ok();
    let endpoint = endpoint
        .map(str::to_string)
        .or_else(|| file.get("endpoint").map(str::to_string))
        .or(from_env)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "no endpoint given; pass one, set endpoint= in the config file, or set {FEED_URL_ENV}"
            ))
        })?;
    let timeout = resolve(timeout, file.get("timeout"), "timeout")?.unwrap_or(30);
    let saved = dataset::fetch_feed(&endpoint, output, Duration::from_secs(timeout))?;
    eprintln!("saved feed to {}", saved.display());
    Ok(())
}
