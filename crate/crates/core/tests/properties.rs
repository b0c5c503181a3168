//! Property tests over the parsing, detection, lexicon and aggregation laws.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use phishscope::dataset::PhishRecord;
use phishscope::detectors::{
    classify, decode_punycode, detect_type1, detect_type2, detect_type3, detect_type4,
    detect_type5, detect_type6, DetectorConfig, TypeTag,
};
use phishscope::lexicon::{build_lexicon, contains_word, extract_tokens};
use phishscope::report::{analyze_stream, AnalysisConfig};
use phishscope::url_model::{classify_host, parse_url};

fn char_soup() -> impl Strategy<Value = String> {
    proptest::collection::vec(
        prop_oneof![
            proptest::char::range('\u{20}', '\u{7e}'),
            proptest::char::range('\u{a0}', '\u{24f}'),
            proptest::char::range('\u{400}', '\u{4ff}'),
            Just(':'),
            Just('/'),
            Just('#'),
            Just('?'),
            Just('@'),
        ],
        0..64,
    )
    .prop_map(|chars| chars.into_iter().collect())
}

proptest! {
    /// Parsing is total: a value or a typed error, never a panic.
    #[test]
    fn parse_url_is_total(input in char_soup()) {
        let _ = parse_url(&input);
    }

    /// Whatever parses can be recombined and re-parsed to an equal value.
    #[test]
    fn recombine_reparses_equal(input in char_soup()) {
        if let Ok(u) = parse_url(&input) {
            let again = parse_url(&u.recombine()).expect("recombined form parses");
            prop_assert_eq!(&u, &again);
        }
    }

    /// Dotted-quad, hex-dword and decimal-dword renderings of one value all
    /// classify as IPv4 with the same normalized quad.
    #[test]
    fn ip_renderings_agree(v in 256u32..=u32::MAX) {
        let dotted = format!("{}.{}.{}.{}", v >> 24, (v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff);
        let hex = format!("0x{v:X}");
        let dec = v.to_string();
        for host in [&dotted, &hex, &dec] {
            let kind = classify_host(host);
            prop_assert!(kind.is_ipv4(), "{host} not ipv4");
            prop_assert_eq!(kind.normalized_ip().unwrap(), dotted.as_str());
        }
    }
}

fn url_strategy() -> impl Strategy<Value = String> {
    let scheme = prop_oneof![Just("http"), Just("https"), Just("ftp")];
    let host = prop_oneof![
        Just("67.210.122.222".to_string()),
        Just("0x43D27ADE".to_string()),
        Just("example.com".to_string()),
        Just("www.g0og1e.com".to_string()),
        Just("xn--pple-43d.com".to_string()),
        Just("secure-login-update-account.example.com".to_string()),
        "[a-z]{1,8}\\.(com|biz|cf|io)",
        "[a-z]{3,6}(-[a-z]{3,6}){1,4}\\.[a-z]{2,10}\\.(com|biz)",
    ];
    let path = prop_oneof![
        Just(String::new()),
        Just("/login".to_string()),
        Just("/a/paypal.com/x".to_string()),
        "/[a-z0-9/._-]{0,20}",
    ];
    let query = prop_oneof![
        Just(String::new()),
        Just("?facebook.com=x".to_string()),
        "\\?[a-z0-9=&.]{0,16}",
    ];
    (scheme, host, path, query)
        .prop_map(|(s, h, p, q)| format!("{s}://{h}{p}{q}"))
}

proptest! {
    /// classify is exactly the union of the six detectors.
    #[test]
    fn classify_is_union_of_detectors(raw in url_strategy(), use_hint in any::<bool>()) {
        let cfg = DetectorConfig::default();
        let u = parse_url(&raw).expect("generated URLs parse");
        let hint = if use_hint { Some("PayPal") } else { None };
        let got = classify(&u, &cfg, hint);
        let mut expect = Vec::new();
        expect.extend(detect_type1(&u));
        expect.extend(detect_type2(&u, &cfg, hint));
        expect.extend(detect_type3(&u, &cfg));
        expect.extend(detect_type4(&u, &cfg));
        expect.extend(detect_type5(&u));
        expect.extend(detect_type6(&u));
        let tags: Vec<TypeTag> = got.types();
        prop_assert_eq!(got.detections, expect);
        // at most one detection per type
        let unique: BTreeSet<TypeTag> = tags.iter().copied().collect();
        prop_assert_eq!(tags.len(), unique.len());
    }

    /// Raising the length threshold never adds Type III detections.
    #[test]
    fn type3_threshold_monotone(raw in url_strategy(), lo in 1usize..30, delta in 0usize..30) {
        let u = parse_url(&raw).expect("generated URLs parse");
        let mut cfg = DetectorConfig {
            type3_length_threshold: lo,
            ..Default::default()
        };
        let at_lo = detect_type3(&u, &cfg).is_some();
        cfg.type3_length_threshold = lo + delta;
        let at_hi = detect_type3(&u, &cfg).is_some();
        prop_assert!(!at_hi || at_lo);
    }

    /// Disabling one detector never changes another's output.
    #[test]
    fn detectors_are_independent(raw in url_strategy()) {
        let u = parse_url(&raw).expect("generated URLs parse");
        let full = classify(&u, &DetectorConfig::default(), None);
        for t in TypeTag::ALL {
            let mut cfg = DetectorConfig::default();
            cfg.enabled = cfg.enabled.without(t);
            let partial = classify(&u, &cfg, None);
            let expect: Vec<_> = full
                .detections
                .iter()
                .filter(|d| d.type_tag != t)
                .cloned()
                .collect();
            prop_assert_eq!(partial.detections, expect);
        }
    }
}

#[test]
fn type5_fires_iff_scheme_is_https() {
    // exhaustive over short lowercase schemes plus the length-5 alphabet
    // around "https" and a list of real schemes
    let mut checked = 0u64;
    let alphabet: Vec<char> = ('a'..='z').collect();
    let mut stack: Vec<String> = alphabet.iter().map(|c| c.to_string()).collect();
    while let Some(s) = stack.pop() {
        let u = parse_url(&format!("{s}://h/")).expect("scheme parses");
        assert_eq!(detect_type5(&u).is_some(), s == "https", "scheme {s}");
        checked += 1;
        if s.len() < 4 {
            for c in &alphabet {
                stack.push(format!("{s}{c}"));
            }
        }
    }
    let five = ['h', 't', 'p', 's', 'x'];
    for a in five {
        for b in five {
            for c in five {
                for d in five {
                    for e in five {
                        let s: String = [a, b, c, d, e].iter().collect();
                        let u = parse_url(&format!("{s}://h/")).unwrap();
                        assert_eq!(detect_type5(&u).is_some(), s == "https");
                        checked += 1;
                    }
                }
            }
        }
    }
    for s in ["http", "ftp", "mailto", "file", "wss", "gopher", "https"] {
        let u = parse_url(&format!("{s}://h/")).unwrap();
        assert_eq!(detect_type5(&u).is_some(), *s == *"https");
        checked += 1;
    }
    assert!(checked > 400_000);
}

fn label_strategy() -> impl Strategy<Value = String> {
    proptest::collection::vec(
        prop_oneof![
            proptest::char::range('a', 'z'),
            proptest::char::range('A', 'Z'),
            proptest::char::range('0', '9'),
            Just('-'),
            proptest::char::range('\u{a1}', '\u{24f}'),
            proptest::char::range('\u{370}', '\u{3ff}'),
            proptest::char::range('\u{400}', '\u{4ff}'),
            proptest::char::range('\u{4e00}', '\u{4fff}'),
            proptest::char::range('\u{1f300}', '\u{1f64f}'),
        ],
        1..16,
    )
    .prop_map(|chars| chars.into_iter().collect())
}

proptest! {
    /// decode inverts an independently written RFC 3492 encoder.
    #[test]
    fn punycode_round_trips_against_oracle(label in label_strategy()) {
        let encoded = common::punycode_encode_oracle(&label).expect("oracle encodes");
        let decoded = decode_punycode(&format!("xn--{encoded}")).expect("decode succeeds");
        prop_assert_eq!(decoded, label);
    }

    /// Tokens are lowercase ASCII alphanumeric runs of at least min_len, and
    /// every token is a substring of the URL under case folding.
    #[test]
    fn token_laws(raw in char_soup(), min_len in 1usize..8) {
        let tokens = extract_tokens(&raw, min_len);
        for t in &tokens {
            prop_assert!(t.len() >= min_len);
            prop_assert!(t.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit()));
            prop_assert!(contains_word(&raw, t), "token {t:?} not a substring of {raw:?}");
        }
    }

    /// Lexicon counts never exceed the corpus size and survive permutation.
    #[test]
    fn lexicon_counts_and_order_independence(
        urls in proptest::collection::vec("[a-z]{1,6}(://)?[a-z0-9./-]{0,24}", 1..20),
        seed in any::<u64>(),
    ) {
        let entries = build_lexicon(urls.iter(), 50, 3).unwrap();
        for e in &entries {
            prop_assert!(e.url_count <= urls.len() as u64);
            prop_assert!(e.percentage.percent() <= 100.0);
        }
        let mut shuffled = urls.clone();
        // deterministic Fisher-Yates from the seed
        let mut state = seed | 1;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            shuffled.swap(i, j);
        }
        let reshuffled = build_lexicon(shuffled.iter(), 50, 3).unwrap();
        prop_assert_eq!(entries, reshuffled);
    }
}

fn record_strategy() -> impl Strategy<Value = PhishRecord> {
    (
        url_strategy(),
        2008i32..=2019,
        prop_oneof![
            Just(String::new()),
            Just("Other".to_string()),
            Just("PayPal".to_string()),
            Just("Facebook".to_string()),
        ],
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(url, year, target, verified, online)| PhishRecord {
            phish_id: 0,
            url,
            detail_url: String::new(),
            submission_time: chrono::DateTime::parse_from_rfc3339(&format!(
                "{year}-06-01T00:00:00+00:00"
            ))
            .unwrap(),
            verified,
            verification_time: None,
            online,
            target,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Any partition of a corpus, accumulated independently and merged,
    /// equals the sequential pass.
    #[test]
    fn partitioned_merge_equals_sequential(
        records in proptest::collection::vec(record_strategy(), 1..40),
        cut_a in 0usize..40,
        cut_b in 0usize..40,
    ) {
        let cfg = AnalysisConfig::default();
        let whole = analyze_stream(records.iter().cloned(), &cfg, 1, false);
        let mut cuts = [cut_a % (records.len() + 1), cut_b % (records.len() + 1)];
        cuts.sort_unstable();
        let parts = [
            &records[..cuts[0]],
            &records[cuts[0]..cuts[1]],
            &records[cuts[1]..],
        ];
        let mut merged = phishscope::report::FeatureCounters::new(&cfg);
        for part in parts {
            let partial = analyze_stream(part.iter().cloned(), &cfg, 1, false);
            merged = merged.merge(&partial.counters).unwrap();
        }
        prop_assert_eq!(merged, whole.counters);
    }
}
