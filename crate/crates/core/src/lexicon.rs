//! Word-token features: curated suggestive-word presence testing and corpus
//! lexicon mining.
//!
//! Presence tests are case-insensitive Boolean substring checks over the
//! whole raw URL, so a curated entry like `secur` matches `secure` and
//! `security`. Lexicon mining splits the case-folded URL on every
//! non-alphanumeric byte (ASCII alphanumerics only; anything else is a
//! delimiter) and deduplicates tokens per URL.

use std::collections::{BTreeSet, HashMap};
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::share::Share;

const GARERA2007: &str = include_str!("../data/words_garera2007.txt");
const LE2011: &str = include_str!("../data/words_le2011.txt");
const PHISHTANK2019: &str = include_str!("../data/words_phishtank2019.txt");

pub const DEFAULT_MIN_TOKEN_LEN: usize = 5;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("word list {name:?} is invalid: {reason}")]
    BadWordList { name: String, reason: String },
    #[error("cannot read {path}: {source}")]
    Unreadable {
        path: String,
        #[source]
        source: io::Error,
    },
}

/// A named, ordered list of lowercase words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordList {
    pub name: String,
    pub words: Vec<String>,
}

impl WordList {
    pub fn new(name: impl Into<String>, words: Vec<String>) -> Result<Self, LexiconError> {
        let name = name.into();
        if words.is_empty() {
            return Err(LexiconError::BadWordList {
                name,
                reason: "no words".into(),
            });
        }
        let mut seen = BTreeSet::new();
        for w in &words {
            if w.is_empty() || *w != w.to_lowercase() {
                return Err(LexiconError::BadWordList {
                    name,
                    reason: format!("word {w:?} is empty or not lowercase"),
                });
            }
            if !seen.insert(w.clone()) {
                return Err(LexiconError::BadWordList {
                    name,
                    reason: format!("duplicate word {w:?}"),
                });
            }
        }
        Ok(WordList { name, words })
    }

    /// One word per line; `#` starts a comment.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self, LexiconError> {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase())
            .collect();
        WordList::new(name, words)
    }

    pub fn from_file(path: &Path) -> Result<Self, LexiconError> {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Unreadable {
            path: path.display().to_string(),
            source,
        })?;
        WordList::parse(name, &text)
    }

    /// The 2007 suggestive-word list (confirm, account, banking, ...).
    pub fn garera2007() -> WordList {
        WordList::parse("garera2007", GARERA2007).expect("bundled list is valid")
    }

    /// The 2011 extension words (paypal, free, lucky, bonus).
    pub fn le2011() -> WordList {
        WordList::parse("le2011", LE2011).expect("bundled list is valid")
    }

    /// Common tokens mined from a 2019 PhishTank snapshot.
    pub fn phishtank2019() -> WordList {
        WordList::parse("phishtank2019", PHISHTANK2019).expect("bundled list is valid")
    }

    pub fn bundled_defaults() -> Vec<WordList> {
        vec![
            WordList::garera2007(),
            WordList::le2011(),
            WordList::phishtank2019(),
        ]
    }
}

/// One mined lexicon row: how many distinct URLs contained the token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub token: String,
    pub url_count: u64,
    pub percentage: Share,
}

/// Case-insensitive Boolean substring test over the entire raw URL.
pub fn contains_word(raw_url: &str, word: &str) -> bool {
    raw_url.to_lowercase().contains(word)
}

/// Count and share of URLs containing each list word, in list order.
pub fn word_presence<I, S>(
    corpus: I,
    list: &WordList,
) -> Result<Vec<(String, u64, Share)>, LexiconError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counts = vec![0u64; list.words.len()];
    let mut total = 0u64;
    for url in corpus {
        total += 1;
        let lower = url.as_ref().to_lowercase();
        for (i, w) in list.words.iter().enumerate() {
            if lower.contains(w.as_str()) {
                counts[i] += 1;
            }
        }
    }
    if total == 0 {
        return Err(LexiconError::EmptyCorpus);
    }
    Ok(list
        .words
        .iter()
        .zip(counts)
        .map(|(w, c)| (w.clone(), c, Share::new(c, total)))
        .collect())
}

/// Split the case-folded URL on every non-alphanumeric byte and keep the
/// deduplicated tokens of at least `min_len` characters.
pub fn extract_tokens(raw_url: &str, min_len: usize) -> BTreeSet<String> {
    let mut tokens = BTreeSet::new();
    let bytes = raw_url.as_bytes();
    let mut start = None::<usize>;
    for (i, &b) in bytes.iter().enumerate() {
        if b.is_ascii_alphanumeric() {
            if start.is_none() {
                start = Some(i);
            }
        } else if let Some(s) = start.take() {
            push_token(&mut tokens, &bytes[s..i], min_len);
        }
    }
    if let Some(s) = start {
        push_token(&mut tokens, &bytes[s..], min_len);
    }
    tokens
}

fn push_token(tokens: &mut BTreeSet<String>, run: &[u8], min_len: usize) {
    if run.len() >= min_len {
        let token: String = run.iter().map(|b| (*b as char).to_ascii_lowercase()).collect();
        tokens.insert(token);
    }
}

/// Mine the corpus lexicon: per token, the number of distinct URLs whose
/// token set contains it, ranked by count descending with lexicographic
/// tie-breaks.
pub fn build_lexicon<I, S>(
    corpus: I,
    top_n: usize,
    min_len: usize,
) -> Result<Vec<LexiconEntry>, LexiconError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut total = 0u64;
    for url in corpus {
        total += 1;
        for token in extract_tokens(url.as_ref(), min_len) {
            *counts.entry(token).or_insert(0) += 1;
        }
    }
    if total == 0 {
        return Err(LexiconError::EmptyCorpus);
    }
    Ok(rank_tokens(&counts, top_n, total))
}

/// Shared ranking step, also used by the feed aggregator: count descending,
/// then token ascending.
pub fn rank_tokens<'a, M>(counts: M, top_n: usize, total: u64) -> Vec<LexiconEntry>
where
    M: IntoIterator<Item = (&'a String, &'a u64)>,
{
    let mut entries: Vec<(&String, u64)> = counts.into_iter().map(|(t, c)| (t, *c)).collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    entries
        .into_iter()
        .take(top_n)
        .map(|(token, url_count)| LexiconEntry {
            token: token.clone(),
            url_count,
            percentage: Share::new(url_count, total),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presence_is_case_insensitive_substring() {
        assert!(contains_word("http://a.com/Login.php", "login"));
        assert!(!contains_word("http://67.210.122.222/apple/login", "signin"));
        assert!(contains_word(
            "https://nz1webapps7mpp3manage-my-papl-account.felixkot.biz/signin",
            "signin"
        ));
        // curated truncations match by substring
        assert!(contains_word("http://x.com/secure/area", "secur"));
    }

    #[test]
    fn word_presence_counts_urls() {
        let corpus = ["http://x/account", "http://x/a", "http://x/account2"];
        let rows = word_presence(corpus, &WordList::new("t", vec!["account".into()]).unwrap())
            .unwrap();
        assert_eq!(rows[0].1, 2);
        assert_eq!(rows[0].2, Share::new(2, 3));
        assert!((rows[0].2.percent() - 66.6667).abs() < 1e-3);
    }

    #[test]
    fn word_presence_zero_and_empty() {
        let rows = word_presence(
            ["http://a/x", "http://b/y", "http://c/z", "http://d/w"],
            &WordList::new("t", vec!["bonus".into()]).unwrap(),
        )
        .unwrap();
        assert_eq!(rows[0].1, 0);
        let empty: [&str; 0] = [];
        assert!(matches!(
            word_presence(empty, &WordList::garera2007()),
            Err(LexiconError::EmptyCorpus)
        ));
    }

    #[test]
    fn tokens_split_on_every_non_alphanumeric() {
        let t = extract_tokens("http://example.com/login", 5);
        assert_eq!(
            t,
            ["example", "login"].iter().map(|s| s.to_string()).collect()
        );
        assert!(extract_tokens("http://a.b/c", 5).is_empty());
        let t = extract_tokens("https://sites.google.com/site/admin-update", 5);
        assert_eq!(
            t,
            ["https", "sites", "google", "admin", "update"]
                .iter()
                .map(|s| s.to_string())
                .collect()
        );
    }

    #[test]
    fn tokens_are_lowercased_and_ascii_only() {
        let t = extract_tokens("http://EXAMPLE.com/LOGIN", 5);
        assert!(t.contains("example") && t.contains("login"));
        // non-ASCII bytes delimit
        let t = extract_tokens("http://пример.com/grande-paris", 5);
        assert_eq!(
            t,
            ["grande", "paris"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn lexicon_deduplicates_per_url() {
        let entries = build_lexicon(["http://a.io/login/login"], 10, 5).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].token, "login");
        assert_eq!(entries[0].url_count, 1);
    }

    #[test]
    fn lexicon_single_url() {
        // tokens at min_len 5: "alpha" and "gamma" ("http" and "beta" are
        // four characters and get dropped)
        let entries = build_lexicon(["http://alpha.beta/gamma"], 10, 5).unwrap();
        assert_eq!(entries.len(), 2);
        assert!(entries.iter().all(|e| e.url_count == 1));
        assert_eq!(entries[0].token, "alpha");
        assert_eq!(entries[1].token, "gamma");
    }

    #[test]
    fn lexicon_ranking_matches_brute_force() {
        let corpus = [
            "http://a.io/login/account",
            "http://b.io/login",
            "http://c.io/account/extra1",
            "http://d.io/login?other=thing",
            "http://e.io/plain",
        ];
        // brute force tally by hand:
        // login: 3 (a, b, d), account: 2 (a, c), extra1: 1, other: 1,
        // thing: 1, plain: 1
        let entries = build_lexicon(corpus, 10, 5).unwrap();
        let got: Vec<(&str, u64)> = entries
            .iter()
            .map(|e| (e.token.as_str(), e.url_count))
            .collect();
        assert_eq!(
            got,
            vec![
                ("login", 3),
                ("account", 2),
                ("extra1", 1),
                ("other", 1),
                ("plain", 1),
                ("thing", 1),
            ]
        );
        assert_eq!(entries[0].percentage, Share::new(3, 5));
    }

    #[test]
    fn top_n_truncates_after_ranking() {
        let corpus = ["http://a.io/login/account", "http://b.io/login"];
        let entries = build_lexicon(corpus, 1, 5).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].token, "login");
    }

    #[test]
    fn bundled_lists_load() {
        let g = WordList::garera2007();
        assert_eq!(g.words.len(), 8);
        assert_eq!(g.words[0], "confirm");
        let l = WordList::le2011();
        assert_eq!(l.words, vec!["paypal", "free", "lucky", "bonus"]);
        let p = WordList::phishtank2019();
        assert_eq!(p.words.len(), 11);
    }

    #[test]
    fn token_membership_implies_substring_presence() {
        let url = "https://sites.google.com/site/admin-update";
        for token in extract_tokens(url, 5) {
            assert!(contains_word(url, &token));
        }
        // converse does not hold: "secur" is a substring but not a token
        assert!(contains_word("http://x.io/secure", "secur"));
        assert!(!extract_tokens("http://x.io/secure", 5).contains("secur"));
    }
}
