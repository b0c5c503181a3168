//! The six URL obfuscation detectors and the combined multi-label classifier.
//!
//! Type I: the host is an IPv4 address (dotted quad, hex/decimal dword, or
//! octal/mixed octets). Type II: a foreign domain rides in the path, path
//! parameters or query, or the feed's spoofed-organisation field names a
//! brand missing from the registrable domain. Type III: an oversized
//! subdomain with delimiter-separated words in front of the registrable
//! domain. Type IV: the registrable domain's first label is a leet-normalized
//! near-miss of a known brand. Type V: the https scheme itself, traded on as
//! a trust cue. Type VI: punycode (`xn--`) or non-ASCII host text.
//!
//! Detectors are pure functions over immutable inputs; a `DetectorConfig` is
//! immutable after construction and may be shared across threads. Detector
//! failures never abort batch work: they degrade to "no detection" plus a
//! diagnostics counter.

mod punycode;

pub use punycode::{decode_punycode, PunycodeError};

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::url_model::{
    classify_host, extra_hostname_length, split_domain, HostKind, ParsedUrl,
    PublicSuffixSnapshot,
};

const BUNDLED_BRANDS: &str = include_str!("../../data/brands.txt");

/// The six obfuscation techniques.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum TypeTag {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl TypeTag {
    pub const ALL: [TypeTag; 6] = [
        TypeTag::I,
        TypeTag::II,
        TypeTag::III,
        TypeTag::IV,
        TypeTag::V,
        TypeTag::VI,
    ];

    /// Short descriptive label used in report tables.
    pub fn label(&self) -> &'static str {
        match self {
            TypeTag::I => "Type I (IP-address host)",
            TypeTag::II => "Type II (foreign domain in path)",
            TypeTag::III => "Type III (oversized subdomain)",
            TypeTag::IV => "Type IV (look-alike domain)",
            TypeTag::V => "Type V (https scheme)",
            TypeTag::VI => "Type VI (internationalized host)",
        }
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TypeTag::I => "I",
            TypeTag::II => "II",
            TypeTag::III => "III",
            TypeTag::IV => "IV",
            TypeTag::V => "V",
            TypeTag::VI => "VI",
        };
        f.write_str(s)
    }
}

/// A set of enabled detector types.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypeSet(u8);

impl TypeSet {
    pub const ALL: TypeSet = TypeSet(0b0011_1111);
    pub const EMPTY: TypeSet = TypeSet(0);

    fn bit(t: TypeTag) -> u8 {
        1 << (t as u8)
    }

    pub fn contains(&self, t: TypeTag) -> bool {
        self.0 & Self::bit(t) != 0
    }

    #[must_use]
    pub fn without(&self, t: TypeTag) -> TypeSet {
        TypeSet(self.0 & !Self::bit(t))
    }

    #[must_use]
    pub fn with(&self, t: TypeTag) -> TypeSet {
        TypeSet(self.0 | Self::bit(t))
    }
}

impl Default for TypeSet {
    fn default() -> Self {
        TypeSet::ALL
    }
}

/// How Type II is decided.
///
/// `Metadata` uses only the feed's spoofed-organisation field; `Heuristic`
/// only scans for embedded domains; `Both` fires when either rule does. The
/// two rules are also counted separately during feed analysis so that
/// metadata-based numbers stay comparable across datasets.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum,
)]
pub enum Type2Mode {
    Metadata,
    Heuristic,
    #[default]
    Both,
}

/// One firing of one detector.
///
/// `score_inputs` keys are fixed per type: Type II uses `metadata_fired` and
/// `heuristic_fired` (0/1 for each rule that was evaluated), Type III uses
/// `extra_length`, Type IV uses `edit_distance`. The other types keep it
/// empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    #[serde(rename = "type")]
    pub type_tag: TypeTag,
    pub evidence: String,
    pub score_inputs: BTreeMap<String, f64>,
}

impl Detection {
    fn new(type_tag: TypeTag, evidence: impl Into<String>) -> Self {
        Detection {
            type_tag,
            evidence: evidence.into(),
            score_inputs: BTreeMap::new(),
        }
    }

    fn with_input(mut self, key: &str, value: f64) -> Self {
        self.score_inputs.insert(key.to_string(), value);
        self
    }
}

/// The multi-label result for one URL: zero to six detections, at most one
/// per type.
#[derive(Debug, Clone, PartialEq)]
pub struct UrlClassification {
    pub url: ParsedUrl,
    pub detections: Vec<Detection>,
}

impl UrlClassification {
    pub fn has(&self, t: TypeTag) -> bool {
        self.detections.iter().any(|d| d.type_tag == t)
    }

    pub fn get(&self, t: TypeTag) -> Option<&Detection> {
        self.detections.iter().find(|d| d.type_tag == t)
    }

    pub fn types(&self) -> Vec<TypeTag> {
        self.detections.iter().map(|d| d.type_tag).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.detections.is_empty()
    }
}

/// Counters for detector-internal degradations (for example an `xn--` label
/// that does not decode). Merged across workers during batch analysis.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetectorDiagnostics {
    counts: BTreeMap<&'static str, u64>,
}

impl DetectorDiagnostics {
    fn bump(&mut self, key: &'static str) {
        *self.counts.entry(key).or_insert(0) += 1;
    }

    pub fn counts(&self) -> &BTreeMap<&'static str, u64> {
        &self.counts
    }

    pub fn merge(&mut self, other: &DetectorDiagnostics) {
        for (k, v) in &other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("type3 length threshold must be >= 1")]
    BadThreshold,
    #[error("brand list entries must be lowercase ASCII: {0:?}")]
    BadBrand(String),
    #[error("cannot read {path}: {source}")]
    Unreadable {
        path: String,
        #[source]
        source: io::Error,
    },
}

/// Tunables shared by all detectors. Immutable after construction.
#[derive(Debug, Clone)]
pub struct DetectorConfig {
    /// Minimum extra hostname characters for Type III (subdomain plus its
    /// joining dot).
    pub type3_length_threshold: usize,
    /// Characters accepted as word delimiters inside the subdomain.
    pub type3_delimiters: Vec<char>,
    /// Maximum Damerau-Levenshtein distance for Type IV brand matches.
    pub type4_max_edit_distance: usize,
    /// Lowercase brand names for Type IV.
    pub brand_list: Vec<String>,
    /// Public-suffix rules used for registrable-domain splits.
    pub suffixes: Arc<PublicSuffixSnapshot>,
    pub type2_mode: Type2Mode,
    /// Which detectors run at all. Disabling one never changes another's
    /// output.
    pub enabled: TypeSet,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            type3_length_threshold: 15,
            type3_delimiters: vec!['-', '_', '=', '?', '%'],
            type4_max_edit_distance: 2,
            brand_list: parse_brand_list(BUNDLED_BRANDS),
            suffixes: PublicSuffixSnapshot::bundled(),
            type2_mode: Type2Mode::default(),
            enabled: TypeSet::ALL,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.type3_length_threshold < 1 {
            return Err(ConfigError::BadThreshold);
        }
        for b in &self.brand_list {
            if b.is_empty() || !b.bytes().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit()) {
                return Err(ConfigError::BadBrand(b.clone()));
            }
        }
        Ok(())
    }

    pub fn load_brands(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Unreadable {
            path: path.display().to_string(),
            source,
        })?;
        self.brand_list = parse_brand_list(&text);
        Ok(())
    }

    pub fn load_suffixes(&mut self, path: &Path) -> Result<(), ConfigError> {
        let snap = PublicSuffixSnapshot::from_file(path).map_err(|source| {
            ConfigError::Unreadable {
                path: path.display().to_string(),
                source,
            }
        })?;
        self.suffixes = Arc::new(snap);
        Ok(())
    }

    /// Stable fingerprint of every knob that can change classification or
    /// aggregation output.
    pub fn digest_input(&self, out: &mut String) {
        use std::fmt::Write;
        let _ = write!(
            out,
            "t3={};delims={};t4={};mode={:?};enabled={:08b};psl={:016x};brands=",
            self.type3_length_threshold,
            self.type3_delimiters.iter().collect::<String>(),
            self.type4_max_edit_distance,
            self.type2_mode,
            self.enabled.0,
            self.suffixes.content_hash(),
        );
        for b in &self.brand_list {
            out.push_str(b);
            out.push(',');
        }
    }
}

/// One lowercase brand per line; `#` starts a comment.
pub fn parse_brand_list(text: &str) -> Vec<String> {
    let mut brands = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let b = line.to_ascii_lowercase();
        if !brands.contains(&b) {
            brands.push(b);
        }
    }
    brands
}

/// Type I: the host is an IPv4 address in any rendering. Evidence is the
/// normalized dotted quad.
pub fn detect_type1(u: &ParsedUrl) -> Option<Detection> {
    let kind = classify_host(&u.host);
    kind.normalized_ip()
        .map(|ip| Detection::new(TypeTag::I, ip))
}

/// The registrable domain of the URL's own host, lowercased; `None` for IP
/// hosts or hosts without a known suffix (the whole host stands in then).
fn own_registrable(u: &ParsedUrl, cfg: &DetectorConfig) -> Option<String> {
    if classify_host(&u.host).is_ip() {
        return None;
    }
    match split_domain(&u.host, &cfg.suffixes) {
        Ok(split) => Some(split.registrable.to_ascii_lowercase()),
        Err(_) => Some(u.host.to_ascii_lowercase()),
    }
}

/// Longest ASCII-alphanumeric run of the spoofed-organisation field,
/// lowercased; the token most likely to appear inside a domain name.
fn brand_token(target: &str) -> Option<String> {
    target
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|t| !t.is_empty())
        .max_by_key(|t| t.len())
        .map(|t| t.to_ascii_lowercase())
}

/// Type II metadata rule: the feed names a spoofed organisation whose brand
/// token does not appear in the URL's own registrable domain.
pub fn detect_type2_metadata(
    u: &ParsedUrl,
    cfg: &DetectorConfig,
    target_hint: Option<&str>,
) -> Option<Detection> {
    let target = target_hint.map(str::trim).filter(|t| !t.is_empty())?;
    if target.eq_ignore_ascii_case("other") {
        return None;
    }
    let token = brand_token(target)?;
    let in_domain = own_registrable(u, cfg)
        .map(|reg| reg.contains(&token))
        .unwrap_or(false);
    if in_domain {
        None
    } else {
        Some(Detection::new(TypeTag::II, token))
    }
}

/// Type II heuristic rule: the path, path parameters or query contain a
/// dotted token ending in a known public suffix whose registrable part is
/// not the URL's own.
pub fn detect_type2_heuristic(u: &ParsedUrl, cfg: &DetectorConfig) -> Option<Detection> {
    let own = own_registrable(u, cfg);
    for component in [&u.path, &u.params, &u.query] {
        if let Some(found) = scan_embedded_domain(component, cfg, own.as_deref()) {
            return Some(Detection::new(TypeTag::II, found));
        }
    }
    None
}

fn scan_embedded_domain(
    text: &str,
    cfg: &DetectorConfig,
    own_registrable: Option<&str>,
) -> Option<String> {
    for run in text.split(|c: char| !(c.is_ascii_alphanumeric() || c == '.' || c == '-')) {
        let candidate = run.trim_matches(|c| c == '.' || c == '-');
        if !candidate.contains('.') {
            continue;
        }
        let lower = candidate.to_ascii_lowercase();
        if lower
            .split('.')
            .any(|l| l.is_empty() || !l.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-'))
        {
            continue;
        }
        if let Ok(split) = split_domain(&lower, &cfg.suffixes) {
            if own_registrable != Some(split.registrable.as_str()) {
                return Some(candidate.to_string());
            }
        }
    }
    None
}

/// Type II: dispatch on the configured mode. With `Both`, either rule firing
/// produces the detection; `score_inputs` records which rule(s) fired.
pub fn detect_type2(
    u: &ParsedUrl,
    cfg: &DetectorConfig,
    target_hint: Option<&str>,
) -> Option<Detection> {
    let metadata = match cfg.type2_mode {
        Type2Mode::Metadata | Type2Mode::Both => detect_type2_metadata(u, cfg, target_hint),
        Type2Mode::Heuristic => None,
    };
    let heuristic = match cfg.type2_mode {
        Type2Mode::Heuristic | Type2Mode::Both => detect_type2_heuristic(u, cfg),
        Type2Mode::Metadata => None,
    };
    let metadata_fired = metadata.is_some();
    let heuristic_fired = heuristic.is_some();
    // prefer the concrete embedded-domain string as evidence
    let base = heuristic.or(metadata)?;
    let mut det = Detection::new(TypeTag::II, base.evidence);
    match cfg.type2_mode {
        Type2Mode::Metadata => {
            det = det.with_input("metadata_fired", 1.0);
        }
        Type2Mode::Heuristic => {
            det = det.with_input("heuristic_fired", 1.0);
        }
        Type2Mode::Both => {
            det = det
                .with_input("metadata_fired", if metadata_fired { 1.0 } else { 0.0 })
                .with_input("heuristic_fired", if heuristic_fired { 1.0 } else { 0.0 });
        }
    }
    Some(det)
}

/// Type III: the subdomain adds at least `type3_length_threshold` characters
/// and contains delimiter-separated alphanumeric runs.
pub fn detect_type3(u: &ParsedUrl, cfg: &DetectorConfig) -> Option<Detection> {
    if classify_host(&u.host).is_ip() {
        return None;
    }
    let split = split_domain(&u.host, &cfg.suffixes).ok()?;
    let extra = extra_hostname_length(&split);
    if extra < cfg.type3_length_threshold {
        return None;
    }
    if !has_separated_words(&split.subdomain, &cfg.type3_delimiters) {
        return None;
    }
    Some(
        Detection::new(TypeTag::III, split.subdomain.clone())
            .with_input("extra_length", extra as f64),
    )
}

/// True when some delimiter sits between alphanumeric characters.
fn has_separated_words(s: &str, delimiters: &[char]) -> bool {
    let chars: Vec<char> = s.chars().collect();
    chars.iter().enumerate().any(|(i, c)| {
        delimiters.contains(c)
            && i > 0
            && i + 1 < chars.len()
            && chars[i - 1].is_alphanumeric()
            && chars[i + 1].is_alphanumeric()
    })
}

/// Substitutions undone before the Type IV brand comparison.
fn leet_normalize(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            '0' => 'o',
            '1' => 'l',
            '3' => 'e',
            '5' => 's',
            '9' => 'g',
            '@' => 'a',
            other => other,
        })
        .collect()
}

/// Damerau-Levenshtein distance (optimal string alignment: substitutions,
/// insertions, deletions and adjacent transpositions all cost 1).
pub fn damerau_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (n, m) = (a.len(), b.len());
    if n == 0 {
        return m;
    }
    if m == 0 {
        return n;
    }
    let mut prev2 = vec![0usize; m + 1];
    let mut prev: Vec<usize> = (0..=m).collect();
    let mut cur = vec![0usize; m + 1];
    for i in 1..=n {
        cur[0] = i;
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut best = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                best = best.min(prev2[j - 2] + 1);
            }
            cur[j] = best;
        }
        std::mem::swap(&mut prev2, &mut prev);
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// Type IV: the registrable domain's first label (or one of its
/// hyphen/underscore tokens), after leet normalization, sits within the
/// configured edit distance of a brand it does not literally equal.
pub fn detect_type4(u: &ParsedUrl, cfg: &DetectorConfig) -> Option<Detection> {
    if classify_host(&u.host) != HostKind::RegisteredName {
        return None;
    }
    let registrable = match split_domain(&u.host, &cfg.suffixes) {
        Ok(split) => split.registrable,
        Err(_) => u.host.clone(),
    };
    let first_label = registrable.split('.').next()?.to_ascii_lowercase();
    let mut tokens: Vec<&str> = vec![&first_label];
    tokens.extend(
        first_label
            .split(['-', '_'])
            .filter(|t| !t.is_empty() && t.len() < first_label.len()),
    );

    let mut best: Option<(usize, &str)> = None;
    for token in tokens {
        let normalized = leet_normalize(token);
        for brand in &cfg.brand_list {
            // the literal brand itself is legitimate use, not a look-alike
            if token == brand {
                continue;
            }
            if normalized.len().abs_diff(brand.len()) > cfg.type4_max_edit_distance {
                continue;
            }
            let d = damerau_levenshtein(&normalized, brand);
            if d <= cfg.type4_max_edit_distance
                && best.is_none_or(|(bd, bb)| (d, brand.as_str()) < (bd, bb))
            {
                best = Some((d, brand));
            }
        }
    }
    best.map(|(d, brand)| {
        Detection::new(TypeTag::IV, brand).with_input("edit_distance", d as f64)
    })
}

/// Type V: the scheme case-folds to https.
pub fn detect_type5(u: &ParsedUrl) -> Option<Detection> {
    if u.scheme == "https" {
        Some(Detection::new(TypeTag::V, "https"))
    } else {
        None
    }
}

/// Type VI: any label carries the `xn--` prefix, or the host contains
/// non-ASCII text. Evidence is the decoded Unicode host when decodable.
pub fn detect_type6(u: &ParsedUrl) -> Option<Detection> {
    let mut diag = DetectorDiagnostics::default();
    detect_type6_diag(u, &mut diag)
}

fn detect_type6_diag(u: &ParsedUrl, diag: &mut DetectorDiagnostics) -> Option<Detection> {
    let host = &u.host;
    let has_ace = host
        .split('.')
        .any(|l| l.len() >= 4 && l[..4].eq_ignore_ascii_case("xn--"));
    if has_ace {
        let mut decoded_any = false;
        let labels: Vec<String> = host
            .split('.')
            .map(|l| {
                if l.len() >= 4 && l[..4].eq_ignore_ascii_case("xn--") {
                    match decode_punycode(l) {
                        Ok(unicode) => {
                            decoded_any = true;
                            unicode
                        }
                        Err(_) => {
                            diag.bump("punycode_decode_failed");
                            log::debug!("undecodable punycode label {l:?} in {host:?}");
                            l.to_string()
                        }
                    }
                } else {
                    l.to_string()
                }
            })
            .collect();
        let evidence = if decoded_any {
            labels.join(".")
        } else {
            host.to_string()
        };
        return Some(Detection::new(TypeTag::VI, evidence));
    }
    if !host.is_ascii() {
        return Some(Detection::new(TypeTag::VI, host.clone()));
    }
    None
}

/// Run every enabled detector and collect the firings. The result is the
/// union of the individual detectors, deterministic for fixed inputs and
/// configuration.
pub fn classify(
    u: &ParsedUrl,
    cfg: &DetectorConfig,
    target_hint: Option<&str>,
) -> UrlClassification {
    let mut diag = DetectorDiagnostics::default();
    classify_with_diagnostics(u, cfg, target_hint, &mut diag)
}

/// [`classify`], accumulating detector degradations into `diag`.
pub fn classify_with_diagnostics(
    u: &ParsedUrl,
    cfg: &DetectorConfig,
    target_hint: Option<&str>,
    diag: &mut DetectorDiagnostics,
) -> UrlClassification {
    let mut detections = Vec::new();
    if cfg.enabled.contains(TypeTag::I) {
        detections.extend(detect_type1(u));
    }
    if cfg.enabled.contains(TypeTag::II) {
        detections.extend(detect_type2(u, cfg, target_hint));
    }
    if cfg.enabled.contains(TypeTag::III) {
        detections.extend(detect_type3(u, cfg));
    }
    if cfg.enabled.contains(TypeTag::IV) {
        detections.extend(detect_type4(u, cfg));
    }
    if cfg.enabled.contains(TypeTag::V) {
        detections.extend(detect_type5(u));
    }
    if cfg.enabled.contains(TypeTag::VI) {
        detections.extend(detect_type6_diag(u, diag));
    }
    UrlClassification {
        url: u.clone(),
        detections,
    }
}
