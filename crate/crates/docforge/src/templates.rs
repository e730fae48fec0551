//! Path-template inference.
//!
//! Documentation rarely spells out every endpoint as a clean template.
//! Some pages write `/users/{username}/repos`, others only show concrete
//! invocations like `https://api.github.com/users/alice/repos`. This module
//! reconciles both: endpoint paths are clustered bottom-up (single-linkage,
//! agglomerative) under a distance that rewards aligned literals and
//! discounts parameter positions, and every cluster collapses into one
//! template. Literal values observed opposite a parameter (`alice` under
//! `{username}`) are remembered and re-applied, so a later round can merge
//! paths that only ever appeared in concrete form.

use std::collections::{BTreeMap, BTreeSet};

use crate::baseurl::{normalize_url, BaseUrl};
use crate::corpus::Page;
use crate::dom::PageDom;
use crate::tokenize;

/// One path segment: a fixed literal or a named parameter.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PathSegment {
    /// Fixed text, e.g. `users`. Never contains `/` or marker characters.
    Literal(String),
    /// A placeholder, e.g. `{username}` or `:id`.
    Parameter {
        /// Name without markers. Synthesized names look like `param2`.
        name: String,
        /// True when the name comes from the documentation (an explicit
        /// marker or a value propagated from one); false when synthesized.
        documented: bool,
    },
}

impl PathSegment {
    pub fn is_parameter(&self) -> bool {
        matches!(self, PathSegment::Parameter { .. })
    }

    /// Canonical rendering: literals verbatim, parameters as `{name}`.
    pub fn render(&self) -> String {
        match self {
            PathSegment::Literal(t) => t.clone(),
            PathSegment::Parameter { name, .. } => format!("{{{name}}}"),
        }
    }
}

const MARKER_CHARS: &[char] = &['{', '}', '[', ']', '(', ')', '<', '>'];

/// Interpret one raw segment string. Marker-enclosed (`{id}`, `<id>`, ...)
/// and `:`-prefixed segments become parameters carrying the documented
/// name; a degenerate marker segment with no usable name gets a
/// synthesized one from its position.
pub(crate) fn segment_from_text(raw: &str, position: usize) -> PathSegment {
    if let Some(name) = raw.strip_prefix(':') {
        if !name.is_empty() {
            return PathSegment::Parameter {
                name: name.to_string(),
                documented: true,
            };
        }
    }
    let enclosed = [('{', '}'), ('[', ']'), ('<', '>'), ('(', ')')]
        .iter()
        .find_map(|&(open, close)| {
            let inner = raw.strip_prefix(open)?.strip_suffix(close)?;
            Some(inner)
        });
    if let Some(inner) = enclosed {
        let name: String = inner.chars().filter(|c| !MARKER_CHARS.contains(c)).collect();
        if !name.is_empty() {
            return PathSegment::Parameter {
                name,
                documented: true,
            };
        }
        return PathSegment::Parameter {
            name: format!("param{position}"),
            documented: false,
        };
    }
    if raw.contains(MARKER_CHARS) {
        // Markers glued mid-segment ("user{id}"): still a parameter, best
        // name we can give it is the text minus the markers.
        let name: String = raw.chars().filter(|c| !MARKER_CHARS.contains(c)).collect();
        if !name.is_empty() {
            return PathSegment::Parameter {
                name,
                documented: true,
            };
        }
        return PathSegment::Parameter {
            name: format!("param{position}"),
            documented: false,
        };
    }
    PathSegment::Literal(raw.to_string())
}

/// Parse raw segment strings into [`PathSegment`]s. Returns `None` when
/// the list is empty.
pub(crate) fn segments_from_raw<S: AsRef<str>>(raw: &[S]) -> Option<Vec<PathSegment>> {
    if raw.is_empty() {
        return None;
    }
    Some(
        raw.iter()
            .enumerate()
            .map(|(i, s)| segment_from_text(s.as_ref(), i))
            .collect(),
    )
}

/// An endpoint path plus where it was seen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub segments: Vec<PathSegment>,
    /// URL of the page the path came from ("" when synthesized in tests).
    pub origin_page: String,
    /// The string exactly as documented.
    pub origin_raw: String,
}

impl Path {
    pub fn new(segments: Vec<PathSegment>, origin_page: &str, origin_raw: &str) -> Path {
        debug_assert!(!segments.is_empty());
        Path {
            segments,
            origin_page: origin_page.to_string(),
            origin_raw: origin_raw.to_string(),
        }
    }

    /// Canonical rendering with a leading `/`.
    pub fn render(&self) -> String {
        render_segments(&self.segments)
    }
}

pub(crate) fn render_segments(segments: &[PathSegment]) -> String {
    let mut out = String::new();
    for seg in segments {
        out.push('/');
        out.push_str(&seg.render());
    }
    out
}

/// A group of paths believed to invoke the same endpoint. Members are
/// kept sorted by canonical rendering and always share one segment count.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub members: Vec<Path>,
}

impl Cluster {
    fn singleton(path: Path) -> Cluster {
        Cluster {
            members: vec![path],
        }
    }

    /// Concatenated member renderings; used as a deterministic sort key.
    fn key(&self) -> String {
        let mut key = String::new();
        for m in &self.members {
            key.push_str(&m.render());
            key.push('\n');
        }
        key
    }
}

/// Clustering parameters. `threshold` is the strict merge bound; the
/// `param_discount` is the similarity credit for a position where either
/// side is a parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringConfig {
    pub threshold: f64,
    pub param_discount: f64,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        ClusteringConfig {
            threshold: 1.0,
            param_discount: 0.8,
        }
    }
}

/// A finished path template.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PathTemplate {
    pub segments: Vec<PathSegment>,
}

impl PathTemplate {
    pub fn new(segments: Vec<PathSegment>) -> PathTemplate {
        debug_assert!(!segments.is_empty());
        PathTemplate { segments }
    }

    /// Canonical rendering, e.g. `/users/{username}/repos`.
    pub fn render(&self) -> String {
        render_segments(&self.segments)
    }

    /// Parameter names in order of appearance.
    pub fn parameter_names(&self) -> Vec<&str> {
        self.segments
            .iter()
            .filter_map(|s| match s {
                PathSegment::Parameter { name, .. } => Some(name.as_str()),
                PathSegment::Literal(_) => None,
            })
            .collect()
    }
}

impl std::fmt::Display for PathTemplate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

/// Derive paths from classified absolute URLs by cutting off the base URL.
///
/// URLs outside the base URL contribute nothing (a warning is logged);
/// queries and fragments are dropped; a URL identical to the base URL has
/// no residual path and is skipped.
pub fn paths_from_urls(api_urls: &[String], base: &BaseUrl) -> Vec<Path> {
    let base_segments: Vec<String> = base
        .path_segments()
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut out = Vec::new();
    for raw in api_urls {
        let Some(norm) = normalize_url(raw) else {
            log::warn!("skipping unparseable URL {raw:?}");
            continue;
        };
        if norm.scheme != base.scheme || norm.host != base.host {
            log::warn!("skipping {raw:?}: outside base URL {}", base.full());
            continue;
        }
        if norm.segments.len() < base_segments.len()
            || norm.segments[..base_segments.len()] != base_segments[..]
        {
            log::warn!("skipping {raw:?}: path not under base path {:?}", base.base_path);
            continue;
        }
        let residual = &norm.segments[base_segments.len()..];
        let Some(segments) = segments_from_raw(residual) else {
            continue;
        };
        out.push(Path::new(segments, "", raw));
    }
    out
}

/// Harvest relative-path mentions (`GET /users/:id/posts`) from the
/// rendered text of documentation pages.
pub fn paths_from_relative_mentions(pages: &[Page]) -> Vec<Path> {
    let mut out = Vec::new();
    for page in pages {
        let dom = PageDom::parse(&page.html);
        for token in tokenize::find_relative_paths(dom.page_text()) {
            let raw_segments: Vec<&str> = token
                .text
                .split('/')
                .filter(|s| !s.is_empty())
                .collect();
            let Some(segments) = segments_from_raw(&raw_segments) else {
                continue;
            };
            out.push(Path::new(segments, &page.url, &token.text));
        }
    }
    out
}

/// Similarity credit for a position where either side is a parameter.
const PARAM_DISCOUNT: f64 = 0.8;

/// Distance between two segment lists.
///
/// Lists of different lengths are infinitely far apart. Otherwise each
/// position contributes similarity: a full point when both sides are equal
/// literals, a discounted point when either side is a parameter, nothing
/// for mismatched literals. The distance is the length minus the
/// similarity, so 0.0 means identical.
pub fn dist_singles(s1: &[PathSegment], s2: &[PathSegment]) -> f64 {
    dist_singles_with(s1, s2, PARAM_DISCOUNT)
}

fn dist_singles_with(s1: &[PathSegment], s2: &[PathSegment], discount: f64) -> f64 {
    if s1.len() != s2.len() {
        return f64::INFINITY;
    }
    let mut sim = 0.0;
    for (a, b) in s1.iter().zip(s2) {
        match (a, b) {
            (PathSegment::Literal(x), PathSegment::Literal(y)) if x == y => sim += 1.0,
            (PathSegment::Literal(_), PathSegment::Literal(_)) => {}
            _ => sim += discount,
        }
    }
    s1.len() as f64 - sim
}

/// Single-linkage distance: the minimum [`dist_singles`] over the member
/// cross-product.
pub fn cluster_dist(c1: &Cluster, c2: &Cluster) -> f64 {
    cluster_dist_with(c1, c2, PARAM_DISCOUNT)
}

fn cluster_dist_with(c1: &Cluster, c2: &Cluster, discount: f64) -> f64 {
    let mut min = f64::INFINITY;
    for a in &c1.members {
        for b in &c2.members {
            let d = dist_singles_with(&a.segments, &b.segments, discount);
            if d < min {
                min = d;
            }
        }
    }
    min
}

/// Bottom-up single-linkage clustering with a strict merge threshold.
///
/// Every path starts as its own cluster; the closest pair merges while its
/// distance is strictly below `config.threshold`. Equal distances are
/// resolved toward the pair whose concatenated member renderings compare
/// lexicographically smallest, which makes the procedure deterministic.
/// Input paths are deduplicated by canonical rendering first — the same
/// mention on fifty pages is still one piece of evidence.
pub fn hierarchical_clustering(paths: &[Path], config: &ClusteringConfig) -> Vec<Cluster> {
    let mut seen = BTreeSet::new();
    let mut clusters: Vec<Cluster> = Vec::new();
    for p in paths {
        if seen.insert(p.render()) {
            clusters.push(Cluster::singleton(p.clone()));
        }
    }

    while clusters.len() > 1 {
        let mut best: Option<(f64, String, usize, usize)> = None;
        for i in 0..clusters.len() {
            for j in (i + 1)..clusters.len() {
                let d = cluster_dist_with(&clusters[i], &clusters[j], config.param_discount);
                if d >= config.threshold {
                    continue;
                }
                let (ka, kb) = {
                    let ki = clusters[i].key();
                    let kj = clusters[j].key();
                    if ki <= kj {
                        (ki, kj)
                    } else {
                        (kj, ki)
                    }
                };
                let pair_key = format!("{ka}\u{1}{kb}");
                let better = match &best {
                    None => true,
                    Some((bd, bk, _, _)) => d < *bd || (d == *bd && pair_key < *bk),
                };
                if better {
                    best = Some((d, pair_key, i, j));
                }
            }
        }
        let Some((_, _, i, j)) = best else {
            break;
        };
        let absorbed = clusters.remove(j);
        clusters[i].members.extend(absorbed.members);
        clusters[i].members.sort_by_key(|m| m.render());
    }

    for c in &mut clusters {
        c.members.sort_by_key(|m| m.render());
    }
    clusters.sort_by_key(|c| c.key());
    clusters
}

/// Literal values observed at parameter positions within one cluster:
/// for every member pair where one side has a parameter at position `i`
/// and the other a literal, the literal text is an instantiated value.
pub fn infer_parameter_value(cluster: &Cluster) -> BTreeSet<String> {
    parameter_bindings(cluster)
        .into_iter()
        .map(|b| b.value)
        .collect()
}

/// A parameter value together with the parameter it instantiates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct ValueBinding {
    value: String,
    /// Sorts documented names ahead of synthesized ones.
    synthesized: bool,
    name: String,
}

fn parameter_bindings(cluster: &Cluster) -> Vec<ValueBinding> {
    let mut out = BTreeSet::new();
    for with_param in &cluster.members {
        for with_literal in &cluster.members {
            if with_param.segments.len() != with_literal.segments.len() {
                continue;
            }
            for (a, b) in with_param.segments.iter().zip(&with_literal.segments) {
                if let (PathSegment::Parameter { name, documented }, PathSegment::Literal(value)) =
                    (a, b)
                {
                    out.insert(ValueBinding {
                        value: value.clone(),
                        synthesized: !documented,
                        name: name.clone(),
                    });
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Replace every literal segment whose text is a known parameter value
/// with the parameter it instantiates.
fn annotate(path: &Path, known: &BTreeMap<String, (String, bool)>) -> Path {
    let segments = path
        .segments
        .iter()
        .map(|seg| match seg {
            PathSegment::Literal(text) => match known.get(text) {
                Some((name, documented)) => PathSegment::Parameter {
                    name: name.clone(),
                    documented: *documented,
                },
                None => seg.clone(),
            },
            p => p.clone(),
        })
        .collect();
    Path {
        segments,
        origin_page: path.origin_page.clone(),
        origin_raw: path.origin_raw.clone(),
    }
}

/// Collapse one final cluster into a template.
///
/// A position is a parameter when any member has a parameter there; the
/// name comes from the first member (in rendering order) that documents
/// one, falling back to `param<i>`. All-literal positions are guaranteed
/// identical across members: a merge chain never crosses a literal
/// mismatch without a parameter in between.
fn template_of(cluster: &Cluster) -> PathTemplate {
    let len = cluster.members[0].segments.len();
    let mut segments = Vec::with_capacity(len);
    for i in 0..len {
        let mut documented_name: Option<&str> = None;
        let mut any_parameter = false;
        for m in &cluster.members {
            if let PathSegment::Parameter { name, documented } = &m.segments[i] {
                any_parameter = true;
                if *documented && documented_name.is_none() {
                    documented_name = Some(name);
                }
            }
        }
        if any_parameter {
            segments.push(match documented_name {
                Some(name) => PathSegment::Parameter {
                    name: name.to_string(),
                    documented: true,
                },
                None => PathSegment::Parameter {
                    name: format!("param{i}"),
                    documented: false,
                },
            });
        } else {
            segments.push(cluster.members[0].segments[i].clone());
        }
    }
    PathTemplate::new(segments)
}

/// Infer templates by clustering to a fixed point.
///
/// Each round annotates known parameter values, deduplicates, clusters,
/// and collects newly observed values (with the parameter name they
/// instantiate, so `alice` seen under `{username}` makes *other* `alice`
/// segments render as `{username}` too). The loop ends when a round
/// learns no new value; the final round's clusters become the templates,
/// deduplicated and sorted by rendering.
pub fn iterate_templates(paths: &[Path], config: &ClusteringConfig) -> Vec<PathTemplate> {
    if paths.is_empty() {
        return Vec::new();
    }
    // value -> (parameter name, name was documented)
    let mut known: BTreeMap<String, (String, bool)> = BTreeMap::new();
    let mut clusters;
    loop {
        let annotated: Vec<Path> = paths.iter().map(|p| annotate(p, &known)).collect();
        clusters = hierarchical_clustering(&annotated, config);

        let before = known.len();
        let mut bindings: Vec<ValueBinding> = Vec::new();
        for c in &clusters {
            bindings.extend(parameter_bindings(c));
        }
        // Deterministic preference: documented names first, then
        // lexicographic; the first binding per value wins.
        bindings.sort();
        for b in bindings {
            known
                .entry(b.value)
                .or_insert_with(|| (b.name, !b.synthesized));
        }
        if known.len() == before {
            break;
        }
    }

    let mut rendered = BTreeSet::new();
    let mut templates: Vec<PathTemplate> = Vec::new();
    for c in &clusters {
        let t = template_of(c);
        if rendered.insert(t.render()) {
            templates.push(t);
        }
    }
    templates.sort_by_key(|t| t.render());
    templates
}
