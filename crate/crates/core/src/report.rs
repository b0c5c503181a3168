//! Feed-level aggregation and table rendering.
//!
//! `FeatureCounters` is a value with an associative, commutative merge:
//! workers accumulate private counters over disjoint slices of a corpus and
//! the merged result is identical to a single sequential pass, so `analyze`
//! can fan out without changing a byte of output. `finalize` turns counters
//! into the report's seven tables plus hostname/URL length statistics, and
//! `render` emits them as JSON, CSV or markdown with fixed orderings.
//!
//! Denominators: the component, type, word-presence and lexicon tables use
//! the total URL count; the per-year https table divides by that year's
//! total.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{year_of, PhishRecord};
use crate::detectors::{
    classify_with_diagnostics, DetectorConfig, DetectorDiagnostics, TypeTag, UrlClassification,
};
use crate::lexicon::{self, extract_tokens, LexiconEntry, WordList};
use crate::share::{format_mean_trunc, format_percent_trunc};
use crate::url_model::{classify_host, parse_url, split_domain, Component, ParsedUrl};

pub const SCHEMA_VERSION: u32 = 1;

/// Scheme bucket for the per-year trend table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SchemeClass {
    Https,
    Other,
}

impl SchemeClass {
    pub fn of(u: &ParsedUrl) -> SchemeClass {
        if u.scheme == "https" {
            SchemeClass::Https
        } else {
            SchemeClass::Other
        }
    }
}

/// Everything that parameterizes one analysis run.
#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub detector: DetectorConfig,
    pub wordlists: Vec<WordList>,
    pub top_n: usize,
    pub min_token_len: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            detector: DetectorConfig::default(),
            wordlists: WordList::bundled_defaults(),
            top_n: 10,
            min_token_len: lexicon::DEFAULT_MIN_TOKEN_LEN,
        }
    }
}

impl AnalysisConfig {
    /// Stable fingerprint of every knob that can change the report.
    pub fn digest(&self) -> String {
        let mut input = String::new();
        self.detector.digest_input(&mut input);
        input.push_str(&format!(
            ";top={};minlen={};lists=",
            self.top_n, self.min_token_len
        ));
        for list in &self.wordlists {
            input.push_str(&list.name);
            input.push(':');
            input.push_str(&list.words.join(","));
            input.push('|');
        }
        format!("{:016x}", crate::url_model::fnv1a64(input.as_bytes()))
    }
}

/// Running (count, sum, max) for a length statistic.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LenStat {
    pub count: u64,
    pub sum: u64,
    pub max: u64,
}

impl LenStat {
    fn add(&mut self, value: u64) {
        self.count += 1;
        self.sum += value;
        self.max = self.max.max(value);
    }

    fn merge(&mut self, other: &LenStat) {
        self.count += other.count;
        self.sum += other.sum;
        self.max = self.max.max(other.max);
    }
}

/// Mergeable aggregation state for one analysis configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureCounters {
    config_digest: String,
    /// Word order of each configured list, kept so tables render in list
    /// order rather than alphabetically.
    wordlist_order: Vec<(String, Vec<String>)>,
    top_n: usize,
    pub total_urls: u64,
    pub per_component_present: BTreeMap<Component, u64>,
    pub per_type: BTreeMap<TypeTag, u64>,
    pub type2_metadata: u64,
    pub type2_heuristic: u64,
    pub per_word: BTreeMap<(String, String), u64>,
    pub per_token: BTreeMap<String, u64>,
    pub per_year_scheme: BTreeMap<(i32, SchemeClass), u64>,
    pub per_year_idn: BTreeMap<i32, u64>,
    /// Extra hostname characters, over URLs with a registrable domain.
    pub extra_len: LenStat,
    /// Whole-URL character length, over all URLs.
    pub url_len: LenStat,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot merge counters built with different configurations")]
    ConfigMismatch,
    #[error("no URLs to analyze")]
    EmptyAnalysis,
}

impl FeatureCounters {
    pub fn new(cfg: &AnalysisConfig) -> Self {
        FeatureCounters {
            config_digest: cfg.digest(),
            wordlist_order: cfg
                .wordlists
                .iter()
                .map(|l| (l.name.clone(), l.words.clone()))
                .collect(),
            top_n: cfg.top_n,
            total_urls: 0,
            per_component_present: BTreeMap::new(),
            per_type: BTreeMap::new(),
            type2_metadata: 0,
            type2_heuristic: 0,
            per_word: BTreeMap::new(),
            per_token: BTreeMap::new(),
            per_year_scheme: BTreeMap::new(),
            per_year_idn: BTreeMap::new(),
            extra_len: LenStat::default(),
            url_len: LenStat::default(),
        }
    }

    pub fn config_digest(&self) -> &str {
        &self.config_digest
    }

    /// Fold one classified record into the counters. Every per-URL predicate
    /// increments exactly once.
    pub fn accumulate(
        &mut self,
        cfg: &AnalysisConfig,
        record: &PhishRecord,
        classification: &UrlClassification,
        tokens: &BTreeSet<String>,
    ) {
        let url = &classification.url;
        self.total_urls += 1;

        for c in Component::ALL {
            if url.component_present(c) {
                *self.per_component_present.entry(c).or_insert(0) += 1;
            }
        }

        for det in &classification.detections {
            *self.per_type.entry(det.type_tag).or_insert(0) += 1;
            if det.type_tag == TypeTag::II {
                if det.score_inputs.get("metadata_fired") == Some(&1.0) {
                    self.type2_metadata += 1;
                }
                if det.score_inputs.get("heuristic_fired") == Some(&1.0) {
                    self.type2_heuristic += 1;
                }
            }
        }

        let lower = record.url.to_lowercase();
        for list in &cfg.wordlists {
            for word in &list.words {
                if lower.contains(word.as_str()) {
                    *self
                        .per_word
                        .entry((list.name.clone(), word.clone()))
                        .or_insert(0) += 1;
                }
            }
        }

        for token in tokens {
            *self.per_token.entry(token.clone()).or_insert(0) += 1;
        }

        let year = year_of(record);
        *self
            .per_year_scheme
            .entry((year, SchemeClass::of(url)))
            .or_insert(0) += 1;
        if classification.has(TypeTag::VI) {
            *self.per_year_idn.entry(year).or_insert(0) += 1;
        }

        self.url_len.add(url.char_len() as u64);
        if !classify_host(&url.host).is_ip() {
            let extra = match split_domain(&url.host, &cfg.detector.suffixes) {
                Ok(split) => crate::url_model::extra_hostname_length(&split) as u64,
                Err(_) => 0, // whole host stands in as the registrable domain
            };
            self.extra_len.add(extra);
        }
    }

    /// Pointwise sum (max fields take the max). Both sides must come from
    /// the same configuration.
    pub fn merge(mut self, other: &FeatureCounters) -> Result<FeatureCounters, ReportError> {
        if self.config_digest != other.config_digest {
            return Err(ReportError::ConfigMismatch);
        }
        self.total_urls += other.total_urls;
        for (k, v) in &other.per_component_present {
            *self.per_component_present.entry(*k).or_insert(0) += v;
        }
        for (k, v) in &other.per_type {
            *self.per_type.entry(*k).or_insert(0) += v;
        }
        self.type2_metadata += other.type2_metadata;
        self.type2_heuristic += other.type2_heuristic;
        for (k, v) in &other.per_word {
            *self.per_word.entry(k.clone()).or_insert(0) += v;
        }
        for (k, v) in &other.per_token {
            *self.per_token.entry(k.clone()).or_insert(0) += v;
        }
        for (k, v) in &other.per_year_scheme {
            *self.per_year_scheme.entry(*k).or_insert(0) += v;
        }
        for (k, v) in &other.per_year_idn {
            *self.per_year_idn.entry(*k).or_insert(0) += v;
        }
        self.extra_len.merge(&other.extra_len);
        self.url_len.merge(&other.url_len);
        Ok(self)
    }

    fn years_desc(&self) -> Vec<i32> {
        let mut years: BTreeSet<i32> = self.per_year_scheme.keys().map(|(y, _)| *y).collect();
        years.extend(self.per_year_idn.keys().copied());
        years.into_iter().rev().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub input: String,
    pub config_digest: String,
    pub generated_at: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledRow {
    pub label: String,
    pub count: u64,
    pub percentage: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeRow {
    pub label: String,
    pub count: u64,
    pub percentage: String,
    /// Static reference column quoting the 2007 blacklist study, where one
    /// exists for the row.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference_2007: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordTable {
    pub list: String,
    pub rows: Vec<LabeledRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrendRow {
    pub year: i32,
    pub count: u64,
    pub total: u64,
    pub percentage: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearCountRow {
    pub year: i32,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthStats {
    /// Mean extra hostname characters (subdomain plus joining dot), two
    /// decimals, over URLs with a registrable domain.
    pub extra_chars_mean: String,
    pub extra_chars_max: u64,
    pub hosts_counted: u64,
    /// Character length of the longest URL in the corpus.
    pub url_chars_max: u64,
}

/// The rendered table set. JSON form round-trips losslessly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub meta: Option<ReportMeta>,
    pub total_urls: u64,
    /// Share of URLs with a non-empty value per component.
    pub component_distribution: Vec<LabeledRow>,
    /// Prevalence of each obfuscation type; Type II appears once per
    /// decision rule (metadata / heuristic).
    pub type_prevalence: Vec<TypeRow>,
    /// Curated word presence, one table per configured list.
    pub word_presence: Vec<WordTable>,
    /// Mined token lexicon, top N by URL count.
    pub lexicon: Vec<LabeledRow>,
    /// Https share per year, year-descending; denominator is the year total.
    pub https_by_year: Vec<TrendRow>,
    /// Internationalized-host count per year, year-descending.
    pub idn_by_year: Vec<YearCountRow>,
    pub length_stats: LengthStats,
}

/// Turn counters into the report tables.
pub fn finalize(counters: &FeatureCounters) -> Result<AnalysisReport, ReportError> {
    if counters.total_urls == 0 {
        return Err(ReportError::EmptyAnalysis);
    }
    let total = counters.total_urls;

    let component_distribution = Component::ALL
        .iter()
        .map(|c| {
            let count = counters.per_component_present.get(c).copied().unwrap_or(0);
            LabeledRow {
                label: c.label().to_string(),
                count,
                percentage: format_percent_trunc(count, total, 1),
            }
        })
        .collect();

    let mut type_prevalence = Vec::new();
    for t in TypeTag::ALL {
        let reference = match t {
            TypeTag::I => Some("63.6%".to_string()),
            TypeTag::II => Some("39.7%".to_string()),
            _ => None,
        };
        if t == TypeTag::II {
            for (mode, count) in [
                ("metadata", counters.type2_metadata),
                ("heuristic", counters.type2_heuristic),
            ] {
                type_prevalence.push(TypeRow {
                    label: format!("{} [{mode}]", t.label()),
                    count,
                    percentage: format_percent_trunc(count, total, 2),
                    reference_2007: reference.clone(),
                });
            }
        } else {
            let count = counters.per_type.get(&t).copied().unwrap_or(0);
            type_prevalence.push(TypeRow {
                label: t.label().to_string(),
                count,
                percentage: format_percent_trunc(count, total, 2),
                reference_2007: reference,
            });
        }
    }

    let word_presence = counters
        .wordlist_order
        .iter()
        .map(|(name, words)| WordTable {
            list: name.clone(),
            rows: words
                .iter()
                .map(|w| {
                    let count = counters
                        .per_word
                        .get(&(name.clone(), w.clone()))
                        .copied()
                        .unwrap_or(0);
                    LabeledRow {
                        label: w.clone(),
                        count,
                        percentage: format_percent_trunc(count, total, 3),
                    }
                })
                .collect(),
        })
        .collect();

    let lexicon: Vec<LabeledRow> =
        lexicon::rank_tokens(&counters.per_token, counters.top_n, total)
            .into_iter()
            .map(|e: LexiconEntry| LabeledRow {
                label: e.token,
                count: e.url_count,
                percentage: format_percent_trunc(e.url_count, total, 3),
            })
            .collect();

    let https_by_year = https_trend(counters);
    let idn_by_year = counters
        .years_desc()
        .into_iter()
        .map(|year| YearCountRow {
            year,
            count: counters.per_year_idn.get(&year).copied().unwrap_or(0),
        })
        .collect();

    let length_stats = LengthStats {
        extra_chars_mean: format_mean_trunc(counters.extra_len.sum, counters.extra_len.count, 2),
        extra_chars_max: counters.extra_len.max,
        hosts_counted: counters.extra_len.count,
        url_chars_max: counters.url_len.max,
    };

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        meta: None,
        total_urls: total,
        component_distribution,
        type_prevalence,
        word_presence,
        lexicon,
        https_by_year,
        idn_by_year,
        length_stats,
    })
}

/// Per-year https share, year-descending. Denominator is that year's total.
pub fn https_trend(counters: &FeatureCounters) -> Vec<TrendRow> {
    counters
        .years_desc()
        .into_iter()
        .map(|year| {
            let https = counters
                .per_year_scheme
                .get(&(year, SchemeClass::Https))
                .copied()
                .unwrap_or(0);
            let other = counters
                .per_year_scheme
                .get(&(year, SchemeClass::Other))
                .copied()
                .unwrap_or(0);
            let total = https + other;
            TrendRow {
                year,
                count: https,
                total,
                percentage: format_percent_trunc(https, total, 2),
            }
        })
        .collect()
}

/// Per-year internationalized-host share, year-descending.
pub fn idn_trend(counters: &FeatureCounters) -> Vec<TrendRow> {
    counters
        .years_desc()
        .into_iter()
        .map(|year| {
            let count = counters.per_year_idn.get(&year).copied().unwrap_or(0);
            let https = counters
                .per_year_scheme
                .get(&(year, SchemeClass::Https))
                .copied()
                .unwrap_or(0);
            let other = counters
                .per_year_scheme
                .get(&(year, SchemeClass::Other))
                .copied()
                .unwrap_or(0);
            let total = https + other;
            TrendRow {
                year,
                count,
                total,
                percentage: format_percent_trunc(count, total, 2),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Markdown,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            other => Err(format!("unsupported format {other:?}")),
        }
    }
}

/// Render the report. Byte-deterministic for a fixed report.
pub fn render(report: &AnalysisReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => render_csv(report),
        OutputFormat::Markdown => render_markdown(report),
    }
}

fn render_csv(report: &AnalysisReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["table", "label", "count", "denominator", "value"])
        .unwrap();
    let total = report.total_urls.to_string();
    for row in &report.component_distribution {
        w.write_record([
            "components",
            &row.label,
            &row.count.to_string(),
            &total,
            &row.percentage,
        ])
        .unwrap();
    }
    for row in &report.type_prevalence {
        w.write_record([
            "types",
            &row.label,
            &row.count.to_string(),
            &total,
            &row.percentage,
        ])
        .unwrap();
    }
    for table in &report.word_presence {
        let section = format!("words:{}", table.list);
        for row in &table.rows {
            w.write_record([
                section.as_str(),
                &row.label,
                &row.count.to_string(),
                &total,
                &row.percentage,
            ])
            .unwrap();
        }
    }
    for row in &report.lexicon {
        w.write_record([
            "lexicon",
            &row.label,
            &row.count.to_string(),
            &total,
            &row.percentage,
        ])
        .unwrap();
    }
    for row in &report.https_by_year {
        w.write_record([
            "https_by_year",
            &row.year.to_string(),
            &row.count.to_string(),
            &row.total.to_string(),
            &row.percentage,
        ])
        .unwrap();
    }
    for row in &report.idn_by_year {
        w.write_record([
            "idn_by_year",
            &row.year.to_string(),
            &row.count.to_string(),
            "",
            "",
        ])
        .unwrap();
    }
    let ls = &report.length_stats;
    w.write_record([
        "length_stats",
        "extra_chars_mean",
        "",
        &ls.hosts_counted.to_string(),
        &ls.extra_chars_mean,
    ])
    .unwrap();
    w.write_record([
        "length_stats",
        "extra_chars_max",
        &ls.extra_chars_max.to_string(),
        &ls.hosts_counted.to_string(),
        "",
    ])
    .unwrap();
    w.write_record([
        "length_stats",
        "url_chars_max",
        &ls.url_chars_max.to_string(),
        &total,
        "",
    ])
    .unwrap();
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn render_markdown(report: &AnalysisReport) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let _ = writeln!(s, "# URL obfuscation analysis");
    let _ = writeln!(s);
    if let Some(meta) = &report.meta {
        let _ = writeln!(
            s,
            "Input: `{}` | config `{}` | generated {}",
            meta.input, meta.config_digest, meta.generated_at
        );
        let _ = writeln!(s);
    }
    let _ = writeln!(s, "URLs analyzed: {}", report.total_urls);

    let _ = writeln!(s, "\n## 1. Component distribution\n");
    let _ = writeln!(s, "| Component | Count | % of URLs |");
    let _ = writeln!(s, "|---|---:|---:|");
    for row in &report.component_distribution {
        let _ = writeln!(s, "| {} | {} | {} |", row.label, row.count, row.percentage);
    }

    let _ = writeln!(s, "\n## 2. Obfuscation type prevalence\n");
    let _ = writeln!(s, "| Technique | Count | % of URLs | 2007 blacklist |");
    let _ = writeln!(s, "|---|---:|---:|---:|");
    for row in &report.type_prevalence {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} |",
            row.label,
            row.count,
            row.percentage,
            row.reference_2007.as_deref().unwrap_or("-")
        );
    }

    for (i, table) in report.word_presence.iter().enumerate() {
        let _ = writeln!(s, "\n## {}. Word presence ({})\n", 3 + i, table.list);
        let _ = writeln!(s, "| Word | URLs | % of URLs |");
        let _ = writeln!(s, "|---|---:|---:|");
        for row in &table.rows {
            let _ = writeln!(s, "| {} | {} | {} |", row.label, row.count, row.percentage);
        }
    }
    let base = 3 + report.word_presence.len();

    let _ = writeln!(s, "\n## {}. Token lexicon (top {})\n", base, report.lexicon.len());
    let _ = writeln!(s, "| Token | URLs | % of URLs |");
    let _ = writeln!(s, "|---|---:|---:|");
    for row in &report.lexicon {
        let _ = writeln!(s, "| {} | {} | {} |", row.label, row.count, row.percentage);
    }

    let _ = writeln!(s, "\n## {}. Https usage by year\n", base + 1);
    let _ = writeln!(s, "| Year | Https URLs | Year total | % |");
    let _ = writeln!(s, "|---|---:|---:|---:|");
    for row in &report.https_by_year {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} |",
            row.year, row.count, row.total, row.percentage
        );
    }

    let _ = writeln!(s, "\n## {}. Internationalized hosts by year\n", base + 2);
    let _ = writeln!(s, "| Year | IDN URLs |");
    let _ = writeln!(s, "|---|---:|");
    for row in &report.idn_by_year {
        let _ = writeln!(s, "| {} | {} |", row.year, row.count);
    }

    let ls = &report.length_stats;
    let _ = writeln!(s, "\n## {}. Length statistics\n", base + 3);
    let _ = writeln!(
        s,
        "Mean extra hostname characters: {} (over {} hosts); max: {}",
        ls.extra_chars_mean, ls.hosts_counted, ls.extra_chars_max
    );
    let _ = writeln!(s, "Longest URL: {} characters", ls.url_chars_max);
    s
}

/// Outcome of a streaming analysis pass.
#[derive(Debug)]
pub struct AnalyzeOutcome {
    pub counters: FeatureCounters,
    pub diagnostics: DetectorDiagnostics,
    /// URLs that failed to parse and were left out of the counters.
    pub url_parse_failures: u64,
}

/// Classify and accumulate a record stream. With `jobs > 1` the stream fans
/// out over a worker pool; merge laws guarantee output identical to the
/// sequential pass.
pub fn analyze_stream<I>(records: I, cfg: &AnalysisConfig, jobs: usize, dedupe_url: bool) -> AnalyzeOutcome
where
    I: Iterator<Item = PhishRecord>,
{
    let mut seen: HashSet<String> = HashSet::new();
    let mut deduped = records.filter(|r| !dedupe_url || seen.insert(r.url.clone()));
    if jobs <= 1 {
        let mut counters = FeatureCounters::new(cfg);
        let mut diagnostics = DetectorDiagnostics::default();
        let mut failures = 0u64;
        for record in deduped {
            process_record(cfg, &record, &mut counters, &mut diagnostics, &mut failures);
        }
        return AnalyzeOutcome {
            counters,
            diagnostics,
            url_parse_failures: failures,
        };
    }

    const BATCH: usize = 256;
    let (tx, rx) = crossbeam_channel::bounded::<Vec<PhishRecord>>(jobs * 4);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for _ in 0..jobs {
            let rx = rx.clone();
            handles.push(scope.spawn(move || {
                let mut counters = FeatureCounters::new(cfg);
                let mut diagnostics = DetectorDiagnostics::default();
                let mut failures = 0u64;
                for batch in rx.iter() {
                    for record in &batch {
                        process_record(cfg, record, &mut counters, &mut diagnostics, &mut failures);
                    }
                }
                (counters, diagnostics, failures)
            }));
        }
        drop(rx);

        let mut batch = Vec::with_capacity(BATCH);
        for record in &mut deduped {
            batch.push(record);
            if batch.len() == BATCH {
                tx.send(std::mem::replace(&mut batch, Vec::with_capacity(BATCH)))
                    .expect("workers alive");
            }
        }
        if !batch.is_empty() {
            tx.send(batch).expect("workers alive");
        }
        drop(tx);

        let mut counters = FeatureCounters::new(cfg);
        let mut diagnostics = DetectorDiagnostics::default();
        let mut failures = 0u64;
        for handle in handles {
            let (c, d, f) = handle.join().expect("worker panicked");
            counters = counters.merge(&c).expect("same config digest");
            diagnostics.merge(&d);
            failures += f;
        }
        AnalyzeOutcome {
            counters,
            diagnostics,
            url_parse_failures: failures,
        }
    })
}

fn process_record(
    cfg: &AnalysisConfig,
    record: &PhishRecord,
    counters: &mut FeatureCounters,
    diagnostics: &mut DetectorDiagnostics,
    failures: &mut u64,
) {
    let parsed = match parse_url(&record.url) {
        Ok(p) => p,
        Err(e) => {
            log::debug!("unparseable URL in feed row {}: {e}", record.phish_id);
            *failures += 1;
            return;
        }
    };
    let classification =
        classify_with_diagnostics(&parsed, &cfg.detector, record.target_hint(), diagnostics);
    let tokens = extract_tokens(&record.url, cfg.min_token_len);
    counters.accumulate(cfg, record, &classification, &tokens);
}
