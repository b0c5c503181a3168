//! PhishTank-format feed ingestion.
//!
//! Feeds are RFC 4180 CSV with the columns `phish_id, url, phish_detail_url,
//! submission_time, verified, verification_time, online, target` in any
//! order. Rows stream one at a time so memory stays bounded regardless of
//! feed size; malformed rows are skipped and counted by failure kind, never
//! defaulted. Bytes that are not valid UTF-8 are replaced and counted, and
//! the affected rows still flow through (their URLs may well be IDN
//! candidates).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufReader, Read, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::time::Duration;

use chrono::{DateTime, Datelike, FixedOffset};
use thiserror::Error;

pub const FEED_COLUMNS: [&str; 8] = [
    "phish_id",
    "url",
    "phish_detail_url",
    "submission_time",
    "verified",
    "verification_time",
    "online",
    "target",
];

/// One feed row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhishRecord {
    pub phish_id: u64,
    pub url: String,
    pub detail_url: String,
    pub submission_time: DateTime<FixedOffset>,
    pub verified: bool,
    pub verification_time: Option<DateTime<FixedOffset>>,
    pub online: bool,
    /// Spoofed organisation; `Other` when the feed could not resolve one.
    pub target: String,
}

impl PhishRecord {
    /// The spoofed-organisation field, normalized: `Other` and empty values
    /// mean "no hint".
    pub fn target_hint(&self) -> Option<&str> {
        let t = self.target.trim();
        if t.is_empty() || t.eq_ignore_ascii_case("other") {
            None
        } else {
            Some(t)
        }
    }
}

/// Calendar year of the submission, evaluated in the timestamp's own zone
/// offset.
pub fn year_of(r: &PhishRecord) -> i32 {
    r.submission_time.year()
}

/// Ingest bookkeeping. `rows_read = records_ok + rows_skipped` always holds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub rows_read: u64,
    pub records_ok: u64,
    pub rows_skipped: u64,
    pub parse_failures_by_kind: BTreeMap<String, u64>,
    /// Rows that contained invalid UTF-8 (replaced, still ingested).
    pub encoding_replaced_rows: u64,
}

impl IngestStats {
    fn skip(&mut self, kind: &str) {
        self.rows_skipped += 1;
        *self
            .parse_failures_by_kind
            .entry(kind.to_string())
            .or_insert(0) += 1;
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "rows_read={} records_ok={} rows_skipped={} encoding_replaced_rows={}",
            self.rows_read, self.records_ok, self.rows_skipped, self.encoding_replaced_rows
        );
        for (kind, n) in &self.parse_failures_by_kind {
            s.push_str(&format!(" {kind}={n}"));
        }
        s
    }
}

#[derive(Debug, Error)]
pub enum FeedError {
    #[error("cannot read feed {path}: {source}")]
    FileUnreadable {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("feed header mismatch; missing columns: {}", missing.join(", "))]
    HeaderMismatch { missing: Vec<String> },
    #[error("network failure: {0}")]
    NetworkFailure(String),
    #[error("endpoint did not return a parseable CSV feed: {0}")]
    NonCsvPayload(String),
}

/// Streaming reader over a PhishTank-format CSV feed.
///
/// Iterate to get records; malformed rows are skipped and tallied in
/// [`FeedReader::stats`]. Two passes over the same bytes yield identical
/// record sequences and stats.
pub struct FeedReader<R: Read> {
    reader: csv::Reader<R>,
    columns: [usize; 8],
    stats: IngestStats,
    row: csv::ByteRecord,
    done: bool,
}

impl FeedReader<BufReader<File>> {
    pub fn open(path: &Path) -> Result<Self, FeedError> {
        let file = File::open(path).map_err(|source| FeedError::FileUnreadable {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_reader(BufReader::new(file))
    }
}

/// Alias for [`FeedReader::open`] under the name the rest of the crate uses.
pub fn load_csv(path: &Path) -> Result<FeedReader<BufReader<File>>, FeedError> {
    FeedReader::open(path)
}

impl<R: Read> FeedReader<R> {
    /// Read the header now; records stream lazily afterwards.
    pub fn from_reader(r: R) -> Result<Self, FeedError> {
        let mut reader = csv::ReaderBuilder::new()
            .flexible(true)
            .has_headers(true)
            .from_reader(r);
        let header = reader
            .byte_headers()
            .map_err(|e| FeedError::NonCsvPayload(e.to_string()))?;
        let names: Vec<String> = header
            .iter()
            .map(|f| String::from_utf8_lossy(f).trim().to_ascii_lowercase())
            .collect();
        let mut columns = [0usize; 8];
        let mut missing = Vec::new();
        for (slot, want) in FEED_COLUMNS.iter().enumerate() {
            match names.iter().position(|n| n == want) {
                Some(i) => columns[slot] = i,
                None => missing.push((*want).to_string()),
            }
        }
        if !missing.is_empty() {
            return Err(FeedError::HeaderMismatch { missing });
        }
        Ok(FeedReader {
            reader,
            columns,
            stats: IngestStats::default(),
            row: csv::ByteRecord::new(),
            done: false,
        })
    }

    pub fn stats(&self) -> &IngestStats {
        &self.stats
    }

    fn parse_row(&mut self) -> Result<PhishRecord, &'static str> {
        let max_col = *self.columns.iter().max().unwrap();
        if self.row.len() <= max_col {
            return Err("field_count");
        }
        let mut replaced = false;
        let mut field = |slot: usize| -> String {
            let bytes = &self.row[self.columns[slot]];
            match std::str::from_utf8(bytes) {
                Ok(s) => s.to_string(),
                Err(_) => {
                    replaced = true;
                    String::from_utf8_lossy(bytes).into_owned()
                }
            }
        };

        let id_text = field(0);
        let url = field(1);
        let detail_url = field(2);
        let submission_text = field(3);
        let verified_text = field(4);
        let verification_text = field(5);
        let online_text = field(6);
        let target = field(7);
        if replaced {
            self.stats.encoding_replaced_rows += 1;
        }

        let phish_id = id_text.trim().parse::<u64>().map_err(|_| "bad_id")?;
        if url.is_empty() {
            return Err("empty_url");
        }
        let submission_time =
            DateTime::parse_from_rfc3339(submission_text.trim()).map_err(|_| "bad_timestamp")?;
        let verified = parse_bool(verified_text.trim()).ok_or("bad_bool")?;
        let online = parse_bool(online_text.trim()).ok_or("bad_bool")?;
        let verification_time = {
            let t = verification_text.trim();
            if t.is_empty() {
                None
            } else {
                Some(DateTime::parse_from_rfc3339(t).map_err(|_| "bad_timestamp")?)
            }
        };

        Ok(PhishRecord {
            phish_id,
            url,
            detail_url,
            submission_time,
            verified,
            verification_time,
            online,
            target,
        })
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    if s.eq_ignore_ascii_case("yes") || s.eq_ignore_ascii_case("true") || s == "1" {
        Some(true)
    } else if s.eq_ignore_ascii_case("no") || s.eq_ignore_ascii_case("false") || s == "0" {
        Some(false)
    } else {
        None
    }
}

impl<R: Read> Iterator for FeedReader<R> {
    type Item = PhishRecord;

    fn next(&mut self) -> Option<PhishRecord> {
        if self.done {
            return None;
        }
        loop {
            match self.reader.read_byte_record(&mut self.row) {
                Ok(false) => {
                    self.done = true;
                    return None;
                }
                Ok(true) => {
                    self.stats.rows_read += 1;
                    match self.parse_row() {
                        Ok(record) => {
                            self.stats.records_ok += 1;
                            return Some(record);
                        }
                        Err(kind) => self.stats.skip(kind),
                    }
                }
                Err(e) => {
                    self.stats.rows_read += 1;
                    self.stats.skip("csv_syntax");
                    if e.is_io_error() {
                        self.done = true;
                        return None;
                    }
                }
            }
        }
    }
}

/// Record predicate for feed subsetting.
#[derive(Debug, Clone, Default)]
pub struct RecordFilter {
    pub verified: Option<bool>,
    pub online: Option<bool>,
    pub years: Option<RangeInclusive<i32>>,
    /// Keep only records with a usable spoofed-organisation hint.
    pub require_target: bool,
}

impl RecordFilter {
    pub fn matches(&self, r: &PhishRecord) -> bool {
        if let Some(v) = self.verified {
            if r.verified != v {
                return false;
            }
        }
        if let Some(o) = self.online {
            if r.online != o {
                return false;
            }
        }
        if let Some(years) = &self.years {
            if !years.contains(&year_of(r)) {
                return false;
            }
        }
        if self.require_target && r.target_hint().is_none() {
            return false;
        }
        true
    }
}

/// Lazily yield matching records, preserving order.
pub fn filter_records<'a, I>(
    records: I,
    filter: &'a RecordFilter,
) -> impl Iterator<Item = PhishRecord> + 'a
where
    I: Iterator<Item = PhishRecord> + 'a,
{
    records.filter(move |r| filter.matches(r))
}

/// Download a feed to `destination`, verifying the payload is a non-empty,
/// header-parseable CSV before the file lands under its final name.
pub fn fetch_feed(
    endpoint: &str,
    destination: &Path,
    timeout: Duration,
) -> Result<PathBuf, FeedError> {
    let client = reqwest::blocking::Client::builder()
        .timeout(timeout)
        .build()
        .map_err(|e| FeedError::NetworkFailure(e.to_string()))?;
    let mut response = client
        .get(endpoint)
        .send()
        .map_err(|e| FeedError::NetworkFailure(e.to_string()))?;
    if !response.status().is_success() {
        return Err(FeedError::NetworkFailure(format!(
            "endpoint returned status {}",
            response.status()
        )));
    }

    let part = destination.with_extension("part");
    let mut out = File::create(&part).map_err(|source| FeedError::FileUnreadable {
        path: part.display().to_string(),
        source,
    })?;
    let written = io::copy(&mut response, &mut out)
        .map_err(|e| FeedError::NetworkFailure(e.to_string()))?;
    out.flush().map_err(|e| FeedError::NetworkFailure(e.to_string()))?;
    drop(out);

    let verdict = if written == 0 {
        Err(FeedError::NonCsvPayload("empty response body".into()))
    } else {
        match FeedReader::open(&part) {
            Ok(_) => Ok(()),
            Err(FeedError::HeaderMismatch { missing }) => Err(FeedError::NonCsvPayload(format!(
                "missing columns: {}",
                missing.join(", ")
            ))),
            Err(FeedError::NonCsvPayload(b)) => Err(FeedError::NonCsvPayload(b)),
            Err(other) => Err(other),
        }
    };
    match verdict {
        Ok(()) => {
            std::fs::rename(&part, destination).map_err(|source| FeedError::FileUnreadable {
                path: destination.display().to_string(),
                source,
            })?;
            Ok(destination.to_path_buf())
        }
        Err(e) => {
            let _ = std::fs::remove_file(&part);
            Err(e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    pub(crate) const HEADER: &str =
        "phish_id,url,phish_detail_url,submission_time,verified,verification_time,online,target";

    fn feed(body: &str) -> FeedReader<Cursor<Vec<u8>>> {
        FeedReader::from_reader(Cursor::new(format!("{HEADER}\n{body}").into_bytes())).unwrap()
    }

    #[test]
    fn well_formed_rows_all_load() {
        let mut r = feed(
            "1,http://a.io/x,http://pt/1,2019-01-02T03:04:05+00:00,yes,2019-01-02T04:00:00+00:00,yes,PayPal\n\
             2,http://b.io/y,http://pt/2,2018-06-01T00:00:00+00:00,yes,,no,Other\n\
             3,http://c.io/z,http://pt/3,2017-12-31T23:59:59+05:30,no,,yes,\n",
        );
        let records: Vec<_> = r.by_ref().collect();
        assert_eq!(records.len(), 3);
        assert_eq!(r.stats().rows_read, 3);
        assert_eq!(r.stats().rows_skipped, 0);
        assert_eq!(records[0].phish_id, 1);
        assert_eq!(records[0].target_hint(), Some("PayPal"));
        assert_eq!(records[1].target_hint(), None);
        assert_eq!(records[2].target_hint(), None);
        assert!(records[1].verification_time.is_none());
    }

    #[test]
    fn empty_url_rows_are_skipped_and_counted() {
        let mut r = feed(
            "1,http://a.io/x,d,2019-01-02T03:04:05+00:00,yes,,yes,Other\n\
             2,,d,2019-01-02T03:04:05+00:00,yes,,yes,Other\n\
             3,http://c.io/z,d,2019-01-02T03:04:05+00:00,yes,,yes,Other\n",
        );
        let records: Vec<_> = r.by_ref().collect();
        assert_eq!(records.len(), 2);
        let s = r.stats();
        assert_eq!(s.rows_read, 3);
        assert_eq!(s.rows_skipped, 1);
        assert_eq!(s.parse_failures_by_kind.get("empty_url"), Some(&1));
        assert_eq!(s.rows_read, s.records_ok + s.rows_skipped);
    }

    #[test]
    fn bad_rows_are_counted_by_kind() {
        let mut r = feed(
            "x,http://a.io,d,2019-01-02T03:04:05+00:00,yes,,yes,t\n\
             2,http://b.io,d,not-a-time,yes,,yes,t\n\
             3,http://c.io,d,2019-01-02T03:04:05+00:00,maybe,,yes,t\n\
             4,http://d.io,d,2019-01-02T03:04:05+00:00,yes,,yes\n\
             5,http://e.io,d,2019-05-05T00:00:00+00:00,yes,,yes,t\n",
        );
        let records: Vec<_> = r.by_ref().collect();
        assert_eq!(records.len(), 1);
        let s = r.stats();
        assert_eq!(s.parse_failures_by_kind.get("bad_id"), Some(&1));
        assert_eq!(s.parse_failures_by_kind.get("bad_timestamp"), Some(&1));
        assert_eq!(s.parse_failures_by_kind.get("bad_bool"), Some(&1));
        assert_eq!(s.parse_failures_by_kind.get("field_count"), Some(&1));
        assert_eq!(s.rows_read, s.records_ok + s.rows_skipped);
    }

    #[test]
    fn header_order_does_not_matter() {
        let text = "url,phish_id,target,online,verification_time,verified,submission_time,phish_detail_url\n\
                    http://a.io/x,7,PayPal,yes,,yes,2019-01-02T03:04:05+00:00,d\n";
        let mut r = FeedReader::from_reader(Cursor::new(text.as_bytes().to_vec())).unwrap();
        let rec = r.next().unwrap();
        assert_eq!(rec.phish_id, 7);
        assert_eq!(rec.url, "http://a.io/x");
        assert_eq!(rec.detail_url, "d");
    }

    #[test]
    fn missing_columns_are_reported() {
        let err = FeedReader::from_reader(Cursor::new(b"phish_id,url\n1,x\n".to_vec()))
            .err()
            .unwrap();
        match err {
            FeedError::HeaderMismatch { missing } => {
                assert!(missing.contains(&"submission_time".to_string()));
                assert!(missing.contains(&"target".to_string()));
                assert_eq!(missing.len(), 6);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn year_respects_the_zone_offset() {
        let mut r = feed(
            "1,http://a.io,d,2018-12-31T23:59:59+00:00,yes,,yes,t\n\
             2,http://b.io,d,2019-05-05T00:00:00+00:00,yes,,yes,t\n\
             3,http://c.io,d,2019-01-01T05:00:00+10:00,yes,,yes,t\n",
        );
        let years: Vec<i32> = r.by_ref().map(|rec| year_of(&rec)).collect();
        assert_eq!(years, vec![2018, 2019, 2019]);
    }

    #[test]
    fn invalid_utf8_is_replaced_and_counted() {
        let mut body = format!("{HEADER}\n1,http://a.io/").into_bytes();
        body.extend_from_slice(&[0xff, 0xfe]);
        body.extend_from_slice(b",d,2019-01-02T03:04:05+00:00,yes,,yes,t\n");
        let mut r = FeedReader::from_reader(Cursor::new(body)).unwrap();
        let rec = r.next().unwrap();
        assert!(rec.url.contains('\u{FFFD}'));
        assert_eq!(r.stats().encoding_replaced_rows, 1);
        assert_eq!(r.stats().records_ok, 1);
    }

    #[test]
    fn rfc4180_quoting() {
        let mut r = feed("1,\"http://a.io/x?a=1,b=2\",d,2019-01-02T03:04:05+00:00,yes,,yes,\"Bank, Big\"\n");
        let rec = r.next().unwrap();
        assert_eq!(rec.url, "http://a.io/x?a=1,b=2");
        assert_eq!(rec.target, "Bank, Big");
    }

    #[test]
    fn filters_compose() {
        let mut r = feed(
            "1,http://a.io,d,2015-06-01T00:00:00+00:00,yes,,yes,PayPal\n\
             2,http://b.io,d,2019-06-01T00:00:00+00:00,no,,yes,Other\n\
             3,http://c.io,d,2018-06-01T00:00:00+00:00,yes,,no,Apple\n\
             4,http://d.io,d,2008-06-01T00:00:00+00:00,yes,,yes,Other\n\
             5,http://e.io,d,2016-06-01T00:00:00+00:00,yes,,yes,Other\n",
        );
        let records: Vec<_> = r.by_ref().collect();
        let verified_only = RecordFilter {
            verified: Some(true),
            ..Default::default()
        };
        assert_eq!(
            filter_records(records.clone().into_iter(), &verified_only).count(),
            4
        );
        let in_range = RecordFilter {
            years: Some(2015..=2019),
            ..Default::default()
        };
        let got: Vec<u64> = filter_records(records.clone().into_iter(), &in_range)
            .map(|r| r.phish_id)
            .collect();
        assert_eq!(got, vec![1, 2, 3, 5]);
        let with_target = RecordFilter {
            require_target: true,
            ..Default::default()
        };
        assert_eq!(
            filter_records(records.into_iter(), &with_target).count(),
            2
        );
    }

    #[test]
    fn two_loads_are_identical() {
        let body = "1,http://a.io,d,2019-01-02T03:04:05+00:00,yes,,yes,t\n\
                    bad,row,here\n\
                    2,http://b.io,d,2019-01-02T03:04:05+00:00,yes,,yes,t\n";
        let mut a = feed(body);
        let ra: Vec<_> = a.by_ref().collect();
        let mut b = feed(body);
        let rb: Vec<_> = b.by_ref().collect();
        assert_eq!(ra, rb);
        assert_eq!(a.stats(), b.stats());
        assert_eq!(a.stats().rows_read, a.stats().records_ok + a.stats().rows_skipped);
    }
}
