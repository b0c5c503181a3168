//! RFC 3492 punycode decoding for `xn--` host labels.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PunycodeError {
    #[error("invalid punycode: {0}")]
    InvalidPunycode(&'static str),
}

const BASE: u32 = 36;
const TMIN: u32 = 1;
const TMAX: u32 = 26;
const SKEW: u32 = 38;
const DAMP: u32 = 700;
const INITIAL_BIAS: u32 = 72;
const INITIAL_N: u32 = 128;

fn decode_digit(c: char) -> Option<u32> {
    match c {
        'a'..='z' => Some(c as u32 - 'a' as u32),
        'A'..='Z' => Some(c as u32 - 'A' as u32),
        '0'..='9' => Some(c as u32 - '0' as u32 + 26),
        _ => None,
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

/// Decode an `xn--` label to its Unicode form.
///
/// The label must carry the ACE prefix (case-insensitive); the remainder is
/// decoded with the RFC 3492 procedure: code points before the last delimiter
/// are copied as-is, the rest is a generalized variable-length integer
/// sequence with bias adaptation. Overflow, out-of-range digits and non-basic
/// code points before the delimiter are rejected.
pub fn decode_punycode(label: &str) -> Result<String, PunycodeError> {
    let rest = strip_ace_prefix(label)
        .ok_or(PunycodeError::InvalidPunycode("missing xn-- prefix"))?;
    decode_rfc3492(rest)
}

fn strip_ace_prefix(label: &str) -> Option<&str> {
    if label.len() >= 4 && label[..4].eq_ignore_ascii_case("xn--") {
        Some(&label[4..])
    } else {
        None
    }
}

/// The bare RFC 3492 decode, without the ACE prefix.
pub(crate) fn decode_rfc3492(input: &str) -> Result<String, PunycodeError> {
    if !input.is_ascii() {
        return Err(PunycodeError::InvalidPunycode(
            "non-basic code point before delimiter",
        ));
    }

    // Everything before the last delimiter is basic output; the delimiter is
    // consumed only when it separates a non-empty basic part.
    let (mut output, extended): (Vec<char>, &str) = match input.rfind('-') {
        Some(0) | None => (Vec::new(), input),
        Some(i) => (input[..i].chars().collect(), &input[i + 1..]),
    };

    let mut n = INITIAL_N;
    let mut i: u32 = 0;
    let mut bias = INITIAL_BIAS;
    let mut chars = extended.chars();

    while let Some(first) = chars.next() {
        let old_i = i;
        let mut weight: u32 = 1;
        let mut k = BASE;
        let mut c = first;
        loop {
            let digit = decode_digit(c)
                .ok_or(PunycodeError::InvalidPunycode("out-of-range digit"))?;
            i = digit
                .checked_mul(weight)
                .and_then(|d| i.checked_add(d))
                .ok_or(PunycodeError::InvalidPunycode("overflow"))?;
            let threshold = if k <= bias + TMIN {
                TMIN
            } else if k >= bias + TMAX {
                TMAX
            } else {
                k - bias
            };
            if digit < threshold {
                break;
            }
            weight = weight
                .checked_mul(BASE - threshold)
                .ok_or(PunycodeError::InvalidPunycode("overflow"))?;
            k += BASE;
            c = chars
                .next()
                .ok_or(PunycodeError::InvalidPunycode("truncated digit sequence"))?;
        }
        let num_points = output.len() as u32 + 1;
        bias = adapt(i - old_i, num_points, old_i == 0);
        n = n
            .checked_add(i / num_points)
            .ok_or(PunycodeError::InvalidPunycode("overflow"))?;
        i %= num_points;
        let ch = char::from_u32(n)
            .ok_or(PunycodeError::InvalidPunycode("invalid code point"))?;
        output.insert(i as usize, ch);
        i += 1;
    }

    Ok(output.into_iter().collect())
}
