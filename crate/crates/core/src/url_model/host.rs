//! Host classification: IPv4 obfuscation forms, IPv6 literals, IDN forms and
//! plain registered names.

/// What kind of netloc a host string is. The four IPv4 kinds carry the
/// normalized dotted-quad rendering of the 32-bit value encoded by the
/// original text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HostKind {
    /// Plain decimal dotted quad, e.g. `67.210.122.222`.
    DottedQuadIp { normalized_ip: String },
    /// Whole-host hexadecimal dword, e.g. `0x43D27ADE`.
    HexIp { normalized_ip: String },
    /// Whole-host decimal dword, e.g. `1137867486`.
    DecimalIp { normalized_ip: String },
    /// Dotted form with octal or hex octets, e.g. `010.0x43.122.222`.
    OctalOrMixedIp { normalized_ip: String },
    /// Bracketed IPv6 literal.
    Ipv6,
    /// At least one label starts with `xn--`.
    PunycodeIdn,
    /// Host contains non-ASCII text.
    UnicodeIdn,
    /// Anything else: an ordinary registered name.
    RegisteredName,
}

impl HostKind {
    /// True for the four IPv4 obfuscation forms.
    pub fn is_ipv4(&self) -> bool {
        matches!(
            self,
            HostKind::DottedQuadIp { .. }
                | HostKind::HexIp { .. }
                | HostKind::DecimalIp { .. }
                | HostKind::OctalOrMixedIp { .. }
        )
    }

    /// True for any IP form, v4 or v6.
    pub fn is_ip(&self) -> bool {
        self.is_ipv4() || matches!(self, HostKind::Ipv6)
    }

    pub fn is_idn(&self) -> bool {
        matches!(self, HostKind::PunycodeIdn | HostKind::UnicodeIdn)
    }

    /// Normalized dotted quad, present exactly for the IPv4 kinds.
    pub fn normalized_ip(&self) -> Option<&str> {
        match self {
            HostKind::DottedQuadIp { normalized_ip }
            | HostKind::HexIp { normalized_ip }
            | HostKind::DecimalIp { normalized_ip }
            | HostKind::OctalOrMixedIp { normalized_ip } => Some(normalized_ip),
            _ => None,
        }
    }
}

enum Radix {
    Dec,
    Hex,
    Oct,
}

/// C-style numeric octet: plain decimal, `0x` hex, or leading-zero octal.
fn parse_octet(s: &str) -> Option<(u32, Radix)> {
    if s.is_empty() {
        return None;
    }
    if let Some(h) = s.strip_prefix("0x") {
        if h.is_empty() || !h.bytes().all(|b| b.is_ascii_hexdigit()) {
            return None;
        }
        return u32::from_str_radix(h, 16).ok().map(|v| (v, Radix::Hex));
    }
    if s == "0" {
        return Some((0, Radix::Dec));
    }
    if let Some(o) = s.strip_prefix('0') {
        if !o.bytes().all(|b| (b'0'..=b'7').contains(&b)) {
            return None;
        }
        return u32::from_str_radix(o, 8).ok().map(|v| (v, Radix::Oct));
    }
    if !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok().map(|v| (v, Radix::Dec))
}

fn dotted(v: u32) -> String {
    format!(
        "{}.{}.{}.{}",
        (v >> 24) & 0xff,
        (v >> 16) & 0xff,
        (v >> 8) & 0xff,
        v & 0xff
    )
}

/// Classify a host string from a successful parse. Total: every input maps
/// to exactly one kind.
///
/// Pure-digit hosts count as a decimal dword only for values in
/// `256..=u32::MAX`; shorter values would shadow degenerate one-label names.
pub fn classify_host(host: &str) -> HostKind {
    if host.len() > 2 && host.starts_with('[') && host.ends_with(']') {
        return HostKind::Ipv6;
    }
    let lower = host.to_ascii_lowercase();
    if host.is_ascii() {
        let parts: Vec<&str> = lower.split('.').collect();
        if parts.len() == 4 && parts.iter().all(|p| !p.is_empty()) {
            if let Some(octets) = parts
                .iter()
                .map(|p| parse_octet(p))
                .collect::<Option<Vec<_>>>()
            {
                if octets.iter().all(|(v, _)| *v <= 255) {
                    let value = octets.iter().fold(0u32, |acc, (v, _)| (acc << 8) | v);
                    let normalized_ip = dotted(value);
                    return if octets.iter().all(|(_, r)| matches!(r, Radix::Dec)) {
                        HostKind::DottedQuadIp { normalized_ip }
                    } else {
                        HostKind::OctalOrMixedIp { normalized_ip }
                    };
                }
            }
        }
        if parts.len() == 1 {
            let p = parts[0];
            if let Some(h) = p.strip_prefix("0x") {
                if !h.is_empty() && h.bytes().all(|b| b.is_ascii_hexdigit()) {
                    if let Ok(v) = u32::from_str_radix(h, 16) {
                        return HostKind::HexIp {
                            normalized_ip: dotted(v),
                        };
                    }
                }
            } else if p.bytes().all(|b| b.is_ascii_digit()) {
                if let Ok(v) = p.parse::<u64>() {
                    if (256..=u32::MAX as u64).contains(&v) {
                        return HostKind::DecimalIp {
                            normalized_ip: dotted(v as u32),
                        };
                    }
                }
            }
        }
    }
    if lower.split('.').any(|l| l.starts_with("xn--")) {
        return HostKind::PunycodeIdn;
    }
    if !host.is_ascii() {
        return HostKind::UnicodeIdn;
    }
    HostKind::RegisteredName
}
