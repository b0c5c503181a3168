//! Phishing-URL obfuscation analysis.
//!
//! The library parses raw URLs into their six classic components, classifies
//! each URL against six obfuscation techniques (IP-address hosts, foreign
//! domains embedded in the path or query, oversized subdomains, look-alike
//! registered names, the https scheme used as a trust cue, and
//! internationalized/punycode hosts), mines word-token features, and
//! aggregates PhishTank-format feeds into component, type, word and per-year
//! trend tables.
//!
//! The `phishscope` binary in this crate exposes the same functionality as
//! `classify`, `analyze`, `lexicon`, `trend` and `fetch` subcommands.

pub mod cli;
pub mod dataset;
pub mod detectors;
pub mod lexicon;
pub mod report;
pub mod share;
pub mod url_model;
