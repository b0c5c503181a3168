//! URL component model.
//!
//! Splits a raw URL string into the six classic components (scheme, netloc,
//! path, path parameters, query, fragment) without decoding anything: the
//! text a target user sees is exactly the text the detectors look at.
//! Percent-escapes stay verbatim, only the scheme is case-folded.

mod host;
mod suffix;

pub use host::{classify_host, HostKind};
pub use suffix::{
    extra_hostname_length, split_domain, DomainSplit, PublicSuffixSnapshot, SplitError,
};

pub(crate) use suffix::fnv1a64;

use thiserror::Error;

/// Errors raised while splitting a raw URL. Each carries the byte offset of
/// the offending position in the input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("missing or malformed scheme at byte {0}")]
    MissingScheme(usize),
    #[error("empty host at byte {0}")]
    EmptyHost(usize),
    #[error("illegal character in authority at byte {0}")]
    IllegalCharacterInAuthority(usize),
}

/// The six URL components: scheme, netloc, path, path parameters, query,
/// fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Component {
    Scheme,
    Netloc,
    Path,
    Params,
    Query,
    Fragment,
}

impl Component {
    pub const ALL: [Component; 6] = [
        Component::Scheme,
        Component::Netloc,
        Component::Path,
        Component::Params,
        Component::Query,
        Component::Fragment,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Component::Scheme => "Scheme",
            Component::Netloc => "Netloc",
            Component::Path => "Path",
            Component::Params => "Parameters",
            Component::Query => "Query",
            Component::Fragment => "Fragment",
        }
    }
}

/// Which optional delimiters appeared in the input, so that
/// [`ParsedUrl::recombine`] can reproduce an equivalent string even when the
/// delimited component is empty (e.g. a trailing `?`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Delims {
    port: bool,
    params: bool,
    query: bool,
    fragment: bool,
}

/// One URL split into components. Components absent from the input are empty
/// strings; `port` and `userinfo` are `None` when absent.
///
/// Equality is component-wise with an ASCII-case-insensitive host; `raw` and
/// the recorded delimiters are bookkeeping and do not take part.
#[derive(Debug, Clone)]
pub struct ParsedUrl {
    /// Original input, byte for byte.
    pub raw: String,
    /// Lowercased scheme.
    pub scheme: String,
    /// Netloc without userinfo and port, case preserved. Bracketed for IPv6
    /// literals.
    pub host: String,
    pub port: Option<u16>,
    pub userinfo: Option<String>,
    pub path: String,
    /// `;`-delimited parameter segment of the last path element.
    pub params: String,
    pub query: String,
    pub fragment: String,
    delims: Delims,
}

impl PartialEq for ParsedUrl {
    fn eq(&self, other: &Self) -> bool {
        self.scheme == other.scheme
            && self.host.eq_ignore_ascii_case(&other.host)
            && self.port == other.port
            && self.userinfo == other.userinfo
            && self.path == other.path
            && self.params == other.params
            && self.query == other.query
            && self.fragment == other.fragment
    }
}

impl Eq for ParsedUrl {}

impl ParsedUrl {
    /// True when the component carries text. Scheme and netloc are present on
    /// every successfully parsed URL.
    pub fn component_present(&self, c: Component) -> bool {
        match c {
            Component::Scheme => true,
            Component::Netloc => true,
            Component::Path => !self.path.is_empty(),
            Component::Params => !self.params.is_empty(),
            Component::Query => !self.query.is_empty(),
            Component::Fragment => !self.fragment.is_empty(),
        }
    }

    /// Reassemble the components with the delimiters recorded at parse time.
    /// The result re-parses to a `ParsedUrl` equal to `self`.
    pub fn recombine(&self) -> String {
        let mut s = String::with_capacity(self.raw.len());
        s.push_str(&self.scheme);
        s.push_str("://");
        if let Some(u) = &self.userinfo {
            s.push_str(u);
            s.push('@');
        }
        s.push_str(&self.host);
        if let Some(p) = self.port {
            s.push(':');
            s.push_str(&p.to_string());
        } else if self.delims.port {
            s.push(':');
        }
        s.push_str(&self.path);
        if self.delims.params {
            s.push(';');
            s.push_str(&self.params);
        }
        if self.delims.query {
            s.push('?');
            s.push_str(&self.query);
        }
        if self.delims.fragment {
            s.push('#');
            s.push_str(&self.fragment);
        }
        s
    }

    /// Character length of the raw URL.
    pub fn char_len(&self) -> usize {
        self.raw.chars().count()
    }
}

fn is_scheme_byte(b: u8, first: bool) -> bool {
    if first {
        b.is_ascii_alphabetic()
    } else {
        b.is_ascii_alphanumeric() || matches!(b, b'+' | b'-' | b'.')
    }
}

fn is_authority_byte(b: u8) -> bool {
    // unreserved / pct / sub-delims / ':' '@' and IPv6 brackets; anything
    // non-ASCII is let through for IDN hosts
    b >= 0x80
        || b.is_ascii_alphanumeric()
        || matches!(
            b,
            b'-' | b'.'
                | b'_'
                | b'~'
                | b'%'
                | b'!'
                | b'$'
                | b'&'
                | b'\''
                | b'('
                | b')'
                | b'*'
                | b'+'
                | b','
                | b';'
                | b'='
                | b':'
                | b'@'
                | b'['
                | b']'
        )
}

/// Split a raw URL into its six components.
///
/// Never panics on arbitrary input: every string either parses or yields a
/// typed [`ParseError`]. Percent-escapes are preserved verbatim; the scheme
/// is lowercased; everything else keeps its case.
pub fn parse_url(raw: &str) -> Result<ParsedUrl, ParseError> {
    let bytes = raw.as_bytes();
    if bytes.is_empty() {
        return Err(ParseError::MissingScheme(0));
    }

    let mut colon = None;
    for (i, &b) in bytes.iter().enumerate() {
        if b == b':' {
            if i == 0 {
                return Err(ParseError::MissingScheme(0));
            }
            colon = Some(i);
            break;
        }
        if !is_scheme_byte(b, i == 0) {
            return Err(ParseError::MissingScheme(i));
        }
    }
    let colon = colon.ok_or(ParseError::MissingScheme(raw.len()))?;
    let scheme = raw[..colon].to_ascii_lowercase();

    let after = colon + 1;
    if !raw[after..].starts_with("//") {
        return Err(ParseError::EmptyHost(after));
    }
    let auth_start = after + 2;
    let auth_end = bytes[auth_start..]
        .iter()
        .position(|&b| matches!(b, b'/' | b'?' | b'#'))
        .map(|p| auth_start + p)
        .unwrap_or(bytes.len());
    let authority = &raw[auth_start..auth_end];
    if authority.is_empty() {
        return Err(ParseError::EmptyHost(auth_start));
    }
    for (off, &b) in authority.as_bytes().iter().enumerate() {
        if !is_authority_byte(b) {
            return Err(ParseError::IllegalCharacterInAuthority(auth_start + off));
        }
    }

    let (userinfo, hostport, hp_start) = match authority.rfind('@') {
        Some(at) => (
            Some(authority[..at].to_string()),
            &authority[at + 1..],
            auth_start + at + 1,
        ),
        None => (None, authority, auth_start),
    };
    let (host, port, port_delim) = split_host_port(hostport, hp_start)?;
    if host.is_empty() {
        return Err(ParseError::EmptyHost(hp_start));
    }

    let rest = &raw[auth_end..];
    let (before_frag, fragment, has_fragment) = match rest.find('#') {
        Some(i) => (&rest[..i], rest[i + 1..].to_string(), true),
        None => (rest, String::new(), false),
    };
    let (path_full, query, has_query) = match before_frag.find('?') {
        Some(i) => (&before_frag[..i], before_frag[i + 1..].to_string(), true),
        None => (before_frag, String::new(), false),
    };
    let (path, params, has_params) = split_params(path_full);

    Ok(ParsedUrl {
        raw: raw.to_string(),
        scheme,
        host: host.to_string(),
        port,
        userinfo,
        path,
        params,
        query,
        fragment,
        delims: Delims {
            port: port_delim,
            params: has_params,
            query: has_query,
            fragment: has_fragment,
        },
    })
}

fn split_host_port(hp: &str, base: usize) -> Result<(&str, Option<u16>, bool), ParseError> {
    if let Some(inner) = hp.strip_prefix('[') {
        let close = inner
            .find(']')
            .ok_or(ParseError::IllegalCharacterInAuthority(base))?;
        if inner[..close].contains('[') {
            return Err(ParseError::IllegalCharacterInAuthority(base + 1));
        }
        let host_end = close + 2; // both brackets, as an index into hp
        let host = &hp[..host_end];
        let tail = &hp[host_end..];
        if tail.is_empty() {
            return Ok((host, None, false));
        }
        let port_text = tail
            .strip_prefix(':')
            .ok_or(ParseError::IllegalCharacterInAuthority(base + host_end))?;
        let (port, delim) = parse_port(port_text, base + host_end + 1)?;
        return Ok((host, port, delim));
    }
    if let Some(pos) = hp.find(['[', ']']) {
        return Err(ParseError::IllegalCharacterInAuthority(base + pos));
    }
    match hp.rfind(':') {
        Some(c) => {
            let (port, delim) = parse_port(&hp[c + 1..], base + c + 1)?;
            Ok((&hp[..c], port, delim))
        }
        None => Ok((hp, None, false)),
    }
}

fn parse_port(text: &str, off: usize) -> Result<(Option<u16>, bool), ParseError> {
    if text.is_empty() {
        return Ok((None, true));
    }
    if let Some(bad) = text.bytes().position(|b| !b.is_ascii_digit()) {
        return Err(ParseError::IllegalCharacterInAuthority(off + bad));
    }
    text.parse::<u16>()
        .map(|p| (Some(p), true))
        .map_err(|_| ParseError::IllegalCharacterInAuthority(off))
}

fn split_params(path_full: &str) -> (String, String, bool) {
    let seg_start = path_full.rfind('/').map(|i| i + 1).unwrap_or(0);
    match path_full[seg_start..].find(';') {
        Some(j) => {
            let at = seg_start + j;
            (
                path_full[..at].to_string(),
                path_full[at + 1..].to_string(),
                true,
            )
        }
        None => (path_full.to_string(), String::new(), false),
    }
}
