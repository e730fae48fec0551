//! Base-URL inference.
//!
//! Every invocation URL of one web API shares a prefix: scheme, host, and
//! often a path like `/v2`. Given the URLs that survived classification,
//! [`infer_base_url`] recovers that prefix as the longest common prefix of
//! the URL paths, computed at whole-segment granularity — a character-level
//! LCP of `/v1/postcodes` and `/v2/stations` would yield the nonsensical
//! `/v`.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::{Error, Result};

/// The inferred base URL of an API.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BaseUrl {
    /// `http` or `https`.
    pub scheme: String,
    /// Lowercase host, including a port when it is not the scheme default.
    pub host: String,
    /// Empty, or a path starting with `/` and never ending with `/`.
    pub base_path: String,
}

impl BaseUrl {
    pub fn new(scheme: &str, host: &str, base_path: &str) -> BaseUrl {
        let mut base_path = base_path.trim_end_matches('/').to_string();
        if !base_path.is_empty() && !base_path.starts_with('/') {
            base_path.insert(0, '/');
        }
        BaseUrl {
            scheme: scheme.to_ascii_lowercase(),
            host: host.to_ascii_lowercase(),
            base_path,
        }
    }

    /// The full prefix form, e.g. `https://api.github.com` or
    /// `https://api.example.com/v2`. Never ends with `/`.
    pub fn full(&self) -> String {
        format!("{}://{}{}", self.scheme, self.host, self.base_path)
    }

    /// Path segments of `base_path`.
    pub fn path_segments(&self) -> Vec<&str> {
        self.base_path.split('/').filter(|s| !s.is_empty()).collect()
    }
}

impl std::fmt::Display for BaseUrl {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.full())
    }
}

/// A URL reduced to comparable parts. Parsing is done by hand because
/// documented URLs legally contain `{}`/`<>` markers that strict URL
/// parsers reject or percent-encode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct NormalizedUrl {
    pub scheme: String,
    pub host: String,
    pub segments: Vec<String>,
}

/// Parse and normalize: lowercase scheme and host, strip default ports and
/// userinfo, drop query and fragment, split the path into nonempty
/// segments. Returns `None` for anything that is not a plausible
/// `http(s)` URL.
pub(crate) fn normalize_url(raw: &str) -> Option<NormalizedUrl> {
    let lower_prefix = raw.get(..8.min(raw.len()))?.to_ascii_lowercase();
    let (scheme, rest) = if lower_prefix.starts_with("https://") {
        ("https", &raw[8..])
    } else if lower_prefix.starts_with("http://") {
        ("http", &raw[7..])
    } else {
        return None;
    };
    let authority_end = rest.find(['/', '?', '#']).unwrap_or(rest.len());
    let authority = &rest[..authority_end];
    let host_port = authority.rsplit('@').next().unwrap_or(authority);
    if host_port.is_empty() || host_port.contains(|c| "{}[]()<>".contains(c)) {
        return None;
    }
    let mut host = host_port.to_ascii_lowercase();
    let default_port = match scheme {
        "http" => ":80",
        _ => ":443",
    };
    if let Some(stripped) = host.strip_suffix(default_port) {
        host = stripped.to_string();
    }
    if host.is_empty() || !host.contains(|c: char| c.is_ascii_alphanumeric()) {
        return None;
    }
    let after_authority = &rest[authority_end..];
    let path_end = after_authority.find(['?', '#']).unwrap_or(after_authority.len());
    let path = &after_authority[..path_end];
    let segments = path
        .split('/')
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect();
    Some(NormalizedUrl {
        scheme: scheme.to_string(),
        host,
        segments,
    })
}

fn segment_is_parameterish(seg: &str) -> bool {
    seg.starts_with(':') || seg.contains(|c| "{}[]()<>".contains(c))
}

/// Infer the base URL shared by `api_urls`.
///
/// When the inputs span several hosts (classifier false positives do
/// happen), the most frequent host wins and a warning is logged; ties go
/// to the lexicographically smallest host. The base path is the longest
/// run of leading path segments that are identical across every URL of
/// the winning host and contain no parameter markers. A lone distinct URL
/// yields an empty base path — a single full request URL is almost never
/// itself the base URL.
pub fn infer_base_url(api_urls: &[String]) -> Result<BaseUrl> {
    let mut distinct: BTreeSet<NormalizedUrl> = BTreeSet::new();
    for raw in api_urls {
        match normalize_url(raw) {
            Some(n) => {
                distinct.insert(n);
            }
            None => log::warn!("ignoring unparseable candidate URL {raw:?}"),
        }
    }
    if distinct.is_empty() {
        return Err(Error::NoApiUrls);
    }

    let mut host_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for n in &distinct {
        *host_counts.entry(n.host.as_str()).or_default() += 1;
    }
    // Max count; ties resolved toward the lexicographically smallest host,
    // which BTreeMap iteration order gives us for free.
    let winner = host_counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(host, _)| host.to_string())
        .expect("nonempty distinct set");
    if host_counts.len() > 1 {
        log::warn!(
            "candidate URLs span {} hosts; majority host {} wins",
            host_counts.len(),
            winner
        );
    }

    let winning: Vec<&NormalizedUrl> = distinct.iter().filter(|n| n.host == winner).collect();

    let mut scheme_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for n in &winning {
        *scheme_counts.entry(n.scheme.as_str()).or_default() += 1;
    }
    let scheme = scheme_counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(s, _)| s.to_string())
        .expect("nonempty winning set");
    if scheme_counts.len() > 1 {
        log::warn!("mixed schemes on host {winner}; using {scheme}");
    }

    let base_path = if winning.len() == 1 {
        String::new()
    } else {
        let min_len = winning.iter().map(|n| n.segments.len()).min().unwrap_or(0);
        let mut shared = Vec::new();
        'outer: for i in 0..min_len {
            let seg = &winning[0].segments[i];
            if segment_is_parameterish(seg) {
                break;
            }
            for n in &winning[1..] {
                if &n.segments[i] != seg {
                    break 'outer;
                }
            }
            shared.push(seg.as_str());
        }
        if shared.is_empty() {
            String::new()
        } else {
            format!("/{}", shared.join("/"))
        }
    };

    Ok(BaseUrl {
        scheme,
        host: winner,
        base_path,
    })
}
