//! Public-suffix matching and registrable-domain splitting.
//!
//! The snapshot file format is a subset of the publicsuffix.org list: one
//! rule per line, `*.` wildcard rules, `!` exception rules, `//` comments.
//! A snapshot is immutable after load and safe to share across threads.

use std::collections::HashSet;
use std::io;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

const BUNDLED: &str = include_str!("../../data/public_suffixes.dat");

/// FNV-1a, used for cheap content fingerprints.
pub(crate) fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// An immutable set of public-suffix rules.
#[derive(Debug, Clone)]
pub struct PublicSuffixSnapshot {
    exact: HashSet<String>,
    wildcard: HashSet<String>,
    exception: HashSet<String>,
    content_hash: u64,
}

impl PublicSuffixSnapshot {
    /// Parse snapshot text. Unknown lines are treated as exact rules; blank
    /// lines and `//` comments are skipped.
    pub fn parse(text: &str) -> Self {
        let mut exact = HashSet::new();
        let mut wildcard = HashSet::new();
        let mut exception = HashSet::new();
        let mut canonical: Vec<String> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with("//") {
                continue;
            }
            let token = match line.split_whitespace().next() {
                Some(t) => t.to_ascii_lowercase(),
                None => continue,
            };
            if let Some(e) = token.strip_prefix('!') {
                canonical.push(format!("!{e}"));
                exception.insert(e.to_string());
            } else if let Some(w) = token.strip_prefix("*.") {
                canonical.push(format!("*{w}"));
                wildcard.insert(w.to_string());
            } else {
                canonical.push(token.clone());
                exact.insert(token);
            }
        }
        canonical.sort();
        let content_hash = fnv1a64(canonical.join("\n").as_bytes());
        PublicSuffixSnapshot {
            exact,
            wildcard,
            exception,
            content_hash,
        }
    }

    pub fn from_file(path: &Path) -> io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    /// The snapshot shipped with the library.
    pub fn bundled() -> Arc<PublicSuffixSnapshot> {
        static SNAP: OnceLock<Arc<PublicSuffixSnapshot>> = OnceLock::new();
        SNAP.get_or_init(|| Arc::new(PublicSuffixSnapshot::parse(BUNDLED)))
            .clone()
    }

    pub fn rule_count(&self) -> usize {
        self.exact.len() + self.wildcard.len() + self.exception.len()
    }

    pub fn content_hash(&self) -> u64 {
        self.content_hash
    }

    /// Longest matching rule over lowercased labels. Exception rules beat
    /// everything; otherwise the match covering the most labels prevails.
    /// Returns the index of the leftmost matched label and whether an
    /// exception rule won.
    pub(crate) fn longest_match(&self, labels: &[&str]) -> Option<(usize, bool)> {
        for i in 0..labels.len() {
            if self.exception.contains(&labels[i..].join(".")) {
                return Some((i, true));
            }
        }
        let mut best: Option<usize> = None;
        for i in 0..labels.len() {
            if self.exact.contains(&labels[i..].join(".")) {
                best = Some(i);
                break;
            }
        }
        for i in 0..labels.len().saturating_sub(1) {
            if self.wildcard.contains(&labels[i + 1..].join(".")) {
                if best.is_none_or(|b| i < b) {
                    best = Some(i);
                }
                break;
            }
        }
        best.map(|i| (i, false))
    }
}

/// A host split at the registrable-domain boundary. Case follows the input
/// host; when `subdomain` is non-empty, `subdomain + "." + registrable`
/// reproduces the host.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainSplit {
    pub subdomain: String,
    pub registrable: String,
    pub public_suffix: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SplitError {
    /// No known suffix matches; callers fall back to treating the whole host
    /// as the registrable domain.
    #[error("host has no known public suffix")]
    NoSuffixMatch,
    /// The host itself is a public suffix, so there is nothing to register
    /// under it.
    #[error("host is itself a public suffix")]
    HostIsPublicSuffix,
}

/// Split a registered-name (or IDN) host against the snapshot using
/// longest-rule matching. The registrable domain is one label plus the
/// matched suffix.
pub fn split_domain(
    host: &str,
    suffixes: &PublicSuffixSnapshot,
) -> Result<DomainSplit, SplitError> {
    let lower = host.to_ascii_lowercase();
    let labels: Vec<&str> = lower.split('.').collect();
    if labels.iter().any(|l| l.is_empty()) {
        return Err(SplitError::NoSuffixMatch);
    }
    let (start, is_exception) = suffixes
        .longest_match(&labels)
        .ok_or(SplitError::NoSuffixMatch)?;
    let (ps_start, reg_start) = if is_exception {
        // the suffix is the exception rule minus its leftmost label
        if start + 1 > labels.len() {
            return Err(SplitError::NoSuffixMatch);
        }
        (start + 1, start)
    } else {
        if start == 0 {
            return Err(SplitError::HostIsPublicSuffix);
        }
        (start, start - 1)
    };

    // byte offsets of each label in the original host ('.' is ASCII, so the
    // lowercased copy has identical label boundaries)
    let mut offsets = Vec::with_capacity(labels.len());
    let mut pos = 0usize;
    for l in &labels {
        offsets.push(pos);
        pos += l.len() + 1;
    }
    let registrable = host[offsets[reg_start]..].to_string();
    let public_suffix = if ps_start < labels.len() {
        host[offsets[ps_start]..].to_string()
    } else {
        String::new()
    };
    let subdomain = if reg_start == 0 {
        String::new()
    } else {
        host[..offsets[reg_start] - 1].to_string()
    };
    Ok(DomainSplit {
        subdomain,
        registrable,
        public_suffix,
    })
}

/// Characters the host carries in front of the registrable domain, counting
/// the joining dot. Zero when there is no subdomain.
pub fn extra_hostname_length(split: &DomainSplit) -> usize {
    if split.subdomain.is_empty() {
        0
    } else {
        split.subdomain.chars().count() + 1
    }
}
