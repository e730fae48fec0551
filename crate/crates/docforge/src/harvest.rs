//! Candidate-URL extraction and featurization.
//!
//! Step one of the pipeline: walk the rendered text of every page, pull
//! out everything that looks like a URL, and describe each occurrence with
//! the features a classifier can act on — where the URL sat in the page
//! (link text? code sample? inside a JSON example?) and what the URL
//! itself looks like (query string? version segment? template markers?).

use std::sync::LazyLock;
use std::time::Duration;

use regex::Regex;

use crate::baseurl::normalize_url;
use crate::corpus::{self, Page};
use crate::dom::PageDom;
use crate::tokenize;

/// A URL occurrence in rendered documentation text.
///
/// `raw` is the string exactly as documented — case, markers and all. The
/// three flags describe the occurrence context, not the URL.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateUrl {
    pub raw: String,
    pub page_url: String,
    /// The token is link text inside an `<a href=...>` element.
    pub clickable: bool,
    /// Some ancestor is `<code>`.
    pub in_code_tag: bool,
    /// Some ancestor's text parses as a JSON object or array.
    pub within_json: bool,
}

/// The classifier's input: eight documented features, with the probe
/// category one-hot encoded into three dimensions for ten in total.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FeatureVector {
    pub clickable: bool,
    pub code_tag: bool,
    pub within_json: bool,
    pub same_domain_with_doc_link: bool,
    pub query_parameter: bool,
    /// 0–3: how many of the REST conventions ("rest", "api", a version
    /// path segment) the URL exhibits.
    pub api_convention: u8,
    pub path_template: bool,
    pub probe_json: bool,
    pub probe_auth: bool,
    pub probe_other: bool,
}

/// Dimension names in the fixed order used everywhere a vector becomes an
/// array: model files, training, prediction.
pub const FEATURE_ORDER: [&str; 10] = [
    "clickable",
    "code_tag",
    "within_json",
    "same_domain_with_doc_link",
    "query_parameter",
    "api_convention",
    "path_template",
    "probe_json",
    "probe_auth",
    "probe_other",
];

impl FeatureVector {
    pub fn to_array(self) -> [f64; 10] {
        [
            self.clickable as u8 as f64,
            self.code_tag as u8 as f64,
            self.within_json as u8 as f64,
            self.same_domain_with_doc_link as u8 as f64,
            self.query_parameter as u8 as f64,
            self.api_convention as f64,
            self.path_template as u8 as f64,
            self.probe_json as u8 as f64,
            self.probe_auth as u8 as f64,
            self.probe_other as u8 as f64,
        ]
    }
}

/// Outcome of probing a URL with one GET request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeResult {
    /// The response body parsed as JSON.
    JsonBody,
    /// Status 401/407, or a body complaining about certificates.
    AuthError,
    /// Anything else, including network failure.
    Other,
    /// Probing disabled or URL not probeable (template markers).
    NotProbed,
}

/// Extract every candidate URL from one page.
///
/// Tokens come from rendered text only — `href` attribute values and
/// `<script>`/`<style>` content never produce candidates. One URL string
/// may appear several times; occurrences are deduplicated per distinct
/// context flag combination, in first-seen order.
pub fn extract_candidates(page: &Page) -> Vec<CandidateUrl> {
    let dom = PageDom::parse(&page.html);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for token in tokenize::find_absolute_urls(dom.page_text()) {
        if !tokenize::is_plausible_url(&token.text) {
            continue;
        }
        let run = dom.run_at(token.start);
        let ctx = dom.context_of(run.element);
        let key = (
            token.text.clone(),
            ctx.clickable,
            ctx.in_code_tag,
            ctx.within_json,
        );
        if seen.insert(key) {
            out.push(CandidateUrl {
                raw: token.text,
                page_url: page.url.clone(),
                clickable: ctx.clickable,
                in_code_tag: ctx.in_code_tag,
                within_json: ctx.within_json,
            });
        }
    }
    out
}

static VERSION_SEGMENT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(?:v|version)[0-9.]+$").expect("valid regex"));

fn segment_is_template_marker(seg: &str) -> bool {
    if seg.len() > 1 && seg.starts_with(':') {
        return true;
    }
    [('{', '}'), ('[', ']'), ('<', '>'), ('(', ')')]
        .iter()
        .any(|&(open, close)| {
            seg.len() >= 2 && seg.starts_with(open) && seg.ends_with(close)
        })
}

/// Compute the feature vector for one candidate occurrence.
pub fn featurize(candidate: &CandidateUrl, probe: ProbeResult) -> FeatureVector {
    let lower = candidate.raw.to_ascii_lowercase();
    let norm = normalize_url(&candidate.raw);
    let segments: Vec<String> = norm.map(|n| n.segments).unwrap_or_default();

    let mut api_convention = 0u8;
    if lower.contains("rest") {
        api_convention += 1;
    }
    if lower.contains("api") {
        api_convention += 1;
    }
    if segments
        .iter()
        .any(|s| VERSION_SEGMENT.is_match(&s.to_ascii_lowercase()))
    {
        api_convention += 1;
    }

    let candidate_host = normalize_url(&candidate.raw).map(|n| n.host);
    let page_host = normalize_url(&candidate.page_url).map(|n| n.host);
    let same_domain = match (candidate_host, page_host) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    };

    FeatureVector {
        clickable: candidate.clickable,
        code_tag: candidate.in_code_tag,
        within_json: candidate.within_json,
        same_domain_with_doc_link: same_domain,
        query_parameter: candidate.raw.contains('?') || candidate.raw.contains('='),
        api_convention,
        path_template: segments.iter().any(|s| segment_is_template_marker(s)),
        probe_json: probe == ProbeResult::JsonBody,
        probe_auth: probe == ProbeResult::AuthError,
        probe_other: probe == ProbeResult::Other,
    }
}

/// Probe a URL with a single short GET request.
///
/// Auth failures are checked first: a 401 with a JSON error body is an
/// auth error, not a JSON response. Template-bearing URLs are never
/// probed — the server would see literal braces.
pub fn probe(url: &str, enabled: bool) -> ProbeResult {
    if !enabled || url.contains(|c| "{}[]()<>".contains(c)) {
        return ProbeResult::NotProbed;
    }
    let Ok(client) = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(5))
        .user_agent(corpus::user_agent())
        .build()
    else {
        return ProbeResult::Other;
    };
    let Ok(response) = client.get(url).send() else {
        return ProbeResult::Other;
    };
    let status = response.status().as_u16();
    let body = response.text().unwrap_or_default();
    if status == 401 || status == 407 || body.contains("Invalid certificate") {
        return ProbeResult::AuthError;
    }
    let trimmed = body.trim();
    if !trimmed.is_empty() && serde_json::from_str::<serde_json::Value>(trimmed).is_ok() {
        return ProbeResult::JsonBody;
    }
    ProbeResult::Other
}
