//! Shared helpers for the integration suites: an independently written
//! RFC 3492 encoder used as the decode oracle, feed fixture builders, and a
//! one-shot HTTP server for fetch tests.

#![allow(dead_code)]

use std::io::{BufWriter, Read, Write};
use std::net::TcpListener;
use std::path::Path;
use std::thread::JoinHandle;

const BASE: u32 = 36;
const TMIN: u32 = 1;
const TMAX: u32 = 26;
const SKEW: u32 = 38;
const DAMP: u32 = 700;
const INITIAL_BIAS: u32 = 72;
const INITIAL_N: u32 = 128;

fn encode_digit(d: u32) -> char {
    if d < 26 {
        char::from_u32('a' as u32 + d).unwrap()
    } else {
        char::from_u32('0' as u32 + d - 26).unwrap()
    }
}

fn adapt(mut delta: u32, num_points: u32, first: bool) -> u32 {
    delta /= if first { DAMP } else { 2 };
    delta += delta / num_points;
    let mut k = 0;
    while delta > ((BASE - TMIN) * TMAX) / 2 {
        delta /= BASE - TMIN;
        k += BASE;
    }
    k + ((BASE - TMIN + 1) * delta) / (delta + SKEW)
}

/// RFC 3492 section 6.3 encoder, written against the RFC text only; the
/// oracle side of the decode round-trip checks.
pub fn punycode_encode_oracle(input: &str) -> Option<String> {
    let code_points: Vec<u32> = input.chars().map(|c| c as u32).collect();
    let mut output: String = input.chars().filter(|c| c.is_ascii()).collect();
    let b = output.chars().count() as u32;
    let input_len = code_points.len() as u32;
    if b > 0 {
        output.push('-');
    }

    let mut n = INITIAL_N;
    let mut delta: u32 = 0;
    let mut bias = INITIAL_BIAS;
    let mut h = b;
    while h < input_len {
        let m = *code_points.iter().filter(|&&c| c >= n).min()?;
        delta = delta.checked_add((m - n).checked_mul(h + 1)?)?;
        n = m;
        for &c in &code_points {
            if c < n {
                delta = delta.checked_add(1)?;
            }
            if c == n {
                let mut q = delta;
                let mut k = BASE;
                loop {
                    let t = if k <= bias + TMIN {
                        TMIN
                    } else if k >= bias + TMAX {
                        TMAX
                    } else {
                        k - bias
                    };
                    if q < t {
                        break;
                    }
                    output.push(encode_digit(t + (q - t) % (BASE - t)));
                    q = (q - t) / (BASE - t);
                    k += BASE;
                }
                output.push(encode_digit(q));
                bias = adapt(delta, h + 1, h == b);
                delta = 0;
                h += 1;
            }
        }
        delta = delta.checked_add(1)?;
        n = n.checked_add(1)?;
    }
    Some(output)
}

/// PhishTank-format CSV fixture builder.
pub struct FeedBuilder {
    text: String,
    next_id: u64,
}

impl Default for FeedBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl FeedBuilder {
    pub fn new() -> Self {
        FeedBuilder {
            text: String::from(
                "phish_id,url,phish_detail_url,submission_time,verified,verification_time,online,target\n",
            ),
            next_id: 1,
        }
    }

    pub fn push(&mut self, url: &str, time: &str, target: &str) -> &mut Self {
        let id = self.next_id;
        self.next_id += 1;
        let quoted_url = if url.contains(',') || url.contains('"') {
            format!("\"{}\"", url.replace('"', "\"\""))
        } else {
            url.to_string()
        };
        self.text.push_str(&format!(
            "{id},{quoted_url},http://phishtank.example/{id},{time},yes,,yes,{target}\n"
        ));
        self
    }

    /// `count` identical rows; keeps large fixtures fast to assemble.
    pub fn push_n(&mut self, count: usize, url: &str, time: &str, target: &str) -> &mut Self {
        for _ in 0..count {
            self.push(url, time, target);
        }
        self
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write_to(&self, path: &Path) {
        let file = std::fs::File::create(path).expect("create fixture");
        let mut w = BufWriter::new(file);
        w.write_all(self.text.as_bytes()).expect("write fixture");
        w.flush().expect("flush fixture");
    }
}

pub fn timestamp(year: i32) -> String {
    format!("{year}-03-15T12:00:00+00:00")
}

/// Serve exactly one HTTP response on a random local port, then exit.
pub fn serve_once(status_line: &str, content_type: &str, body: Vec<u8>) -> (String, JoinHandle<()>) {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind local port");
    let addr = listener.local_addr().unwrap();
    let response_head = format!(
        "{status_line}\r\nContent-Type: {content_type}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        body.len()
    );
    let handle = std::thread::spawn(move || {
        if let Ok((mut stream, _)) = listener.accept() {
            let mut buf = [0u8; 4096];
            let mut seen = Vec::new();
            while let Ok(n) = stream.read(&mut buf) {
                if n == 0 {
                    break;
                }
                seen.extend_from_slice(&buf[..n]);
                if seen.windows(4).any(|w| w == b"\r\n\r\n") {
                    break;
                }
            }
            let _ = stream.write_all(response_head.as_bytes());
            let _ = stream.write_all(&body);
            let _ = stream.flush();
        }
    });
    (format!("http://{addr}/feed.csv"), handle)
}
