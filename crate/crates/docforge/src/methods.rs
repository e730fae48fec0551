//! HTTP-method extraction from description blocks.
//!
//! Knowing *that* `/users/{username}/repos` is an endpoint says nothing
//! about how to call it. The documentation's answer lives in the prose
//! around the places the path is mentioned. This module finds those
//! places — the "gray nodes", the deepest DOM nodes whose rendered text
//! mentions a matching URL or path — grows each into a description block
//! by taking in siblings and then the parent (stopping before it would
//! swallow another gray node's territory), and scans the collected text
//! for the seven HTTP method names. No mention of any method defaults to
//! GET.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;

use crate::baseurl::{normalize_url, BaseUrl};
use crate::corpus::Page;
use crate::dom::PageDom;
use crate::templates::{PathSegment, PathTemplate};
use crate::tokenize;

/// The seven HTTP methods the extractor recognizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Delete,
    Get,
    Head,
    Options,
    Patch,
    Post,
    Put,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Delete,
        Method::Get,
        Method::Head,
        Method::Options,
        Method::Patch,
        Method::Post,
        Method::Put,
    ];

    pub fn as_upper(self) -> &'static str {
        match self {
            Method::Delete => "DELETE",
            Method::Get => "GET",
            Method::Head => "HEAD",
            Method::Options => "OPTIONS",
            Method::Patch => "PATCH",
            Method::Post => "POST",
            Method::Put => "PUT",
        }
    }

    pub fn as_lower(self) -> &'static str {
        match self {
            Method::Delete => "delete",
            Method::Get => "get",
            Method::Head => "head",
            Method::Options => "options",
            Method::Patch => "patch",
            Method::Post => "post",
            Method::Put => "put",
        }
    }

    /// Case-insensitive lookup, for reading method keys out of existing
    /// specification documents.
    pub fn from_name(name: &str) -> Option<Method> {
        let lower = name.to_ascii_lowercase();
        Method::ALL.into_iter().find(|m| m.as_lower() == lower)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_upper())
    }
}

/// The text gathered around one template's mentions.
#[derive(Debug, Clone)]
pub struct DescriptionBlock {
    pub template: PathTemplate,
    /// Rendered text of the block's nodes, in document order.
    pub text: String,
    /// Pages that contributed text. Filled by the cross-page combiner;
    /// a single-page lookup leaves it empty.
    pub source_pages: BTreeSet<String>,
}

/// A path template together with the methods its documentation names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endpoint {
    pub template: PathTemplate,
    /// Never empty — GET is the default when nothing is documented.
    pub methods: BTreeSet<Method>,
}

/// Does a text token refer to this template?
///
/// Absolute tokens must sit under the base URL and are truncated to their
/// residual path; relative tokens may carry the base path as a prefix and
/// lose it when they do. The residual matches when the segment counts
/// agree, literal segments are byte-equal, and every parameter position
/// aligns with some nonempty segment — a concrete value, a marker form,
/// or a `:`-name all count.
pub fn template_matches(text_token: &str, template: &PathTemplate, base: &BaseUrl) -> bool {
    let residual: Vec<String> = if let Some(norm) = normalize_url(text_token) {
        if norm.scheme != base.scheme || norm.host != base.host {
            return false;
        }
        let base_segments = base.path_segments();
        if norm.segments.len() < base_segments.len()
            || !norm.segments[..base_segments.len()]
                .iter()
                .zip(&base_segments)
                .all(|(a, b)| a == b)
        {
            return false;
        }
        norm.segments[base_segments.len()..].to_vec()
    } else if text_token.starts_with('/') {
        let body = text_token
            .split(['?', '#'])
            .next()
            .unwrap_or(text_token);
        let mut segments: Vec<String> = body
            .split('/')
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        let base_segments = base.path_segments();
        if !base_segments.is_empty()
            && segments.len() > base_segments.len()
            && segments[..base_segments.len()]
                .iter()
                .zip(&base_segments)
                .all(|(a, b)| a == b)
        {
            segments.drain(..base_segments.len());
        }
        segments
    } else {
        return false;
    };

    if residual.len() != template.segments.len() {
        return false;
    }
    residual
        .iter()
        .zip(&template.segments)
        .all(|(token_seg, template_seg)| match template_seg {
            PathSegment::Literal(text) => token_seg == text,
            // Any nonempty segment instantiates a parameter, and path
            // splitting never yields empty segments.
            PathSegment::Parameter { .. } => true,
        })
}

/// Which templates does this node's rendered text mention?
fn matching_templates(
    text: &str,
    templates: &[PathTemplate],
    base: &BaseUrl,
) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    if templates.is_empty() {
        return out;
    }
    let mut tokens: Vec<String> = tokenize::find_absolute_urls(text)
        .into_iter()
        .map(|t| t.text)
        .collect();
    tokens.extend(
        tokenize::find_relative_paths(text)
            .into_iter()
            .map(|t| t.text),
    );
    for token in tokens {
        for (i, template) in templates.iter().enumerate() {
            if !out.contains(&i) && template_matches(&token, template, base) {
                out.insert(i);
            }
        }
        if out.len() == templates.len() {
            break;
        }
    }
    out
}

/// Per-page block location for all templates at once.
///
/// Gray nodes for *all* templates share one claiming pass, which keeps
/// blocks disjoint even when neighboring endpoints are documented side by
/// side: expansion stops at nodes that are (or contain, or were already
/// claimed by) other gray nodes. Returns, per template, the concatenated
/// text of the blocks whose gray node mentioned it.
fn locate_blocks_on_page(
    dom: &PageDom,
    templates: &[PathTemplate],
    base: &BaseUrl,
) -> Vec<Option<String>> {
    let node_count = dom.nodes().len();
    let mut mentions: Vec<BTreeSet<usize>> = Vec::with_capacity(node_count);
    for node in dom.nodes() {
        mentions.push(matching_templates(&node.rendered_text, templates, base));
    }

    // Deepest mentioning nodes: no descendant mentions anything.
    let mut has_mentioning_descendant = vec![false; node_count];
    for id in (0..node_count).rev() {
        for &child in &dom.node(id).children {
            if !mentions[child].is_empty() || has_mentioning_descendant[child] {
                has_mentioning_descendant[id] = true;
                break;
            }
        }
    }
    let grays: Vec<usize> = (0..node_count)
        .filter(|&id| !mentions[id].is_empty() && !has_mentioning_descendant[id])
        .collect();
    let gray_set: BTreeSet<usize> = grays.iter().copied().collect();

    // A node is off-limits for expansion when it is another gray node or
    // contains one: pulling it in would swallow that node's own block.
    let contains_or_is_gray = |node: usize, own: usize| -> bool {
        gray_set
            .iter()
            .any(|&g| g != own && (g == node || dom.is_ancestor(node, g)))
    };

    let mut claimed: BTreeSet<usize> = BTreeSet::new();
    let mut per_template: Vec<Vec<String>> = vec![Vec::new(); templates.len()];
    for &gray in &grays {
        let mut block = vec![gray];
        claimed.insert(gray);
        if let Some(parent) = dom.node(gray).parent {
            let siblings = &dom.node(parent).children;
            let position = dom.child_index(gray);
            let mut aborted = false;
            // Closest-first toward the start, then onward past the node.
            let before = (0..position).rev();
            let after = (position + 1)..siblings.len();
            for i in before.chain(after) {
                let sibling = siblings[i];
                if contains_or_is_gray(sibling, gray) || claimed.contains(&sibling) {
                    aborted = true;
                    break;
                }
                block.push(sibling);
                claimed.insert(sibling);
            }
            // The parent joins unless it also contains some other gray
            // node (a sibling abort implies exactly that) or is claimed.
            if !aborted && !contains_or_is_gray(parent, gray) && !claimed.contains(&parent) {
                block.push(parent);
                claimed.insert(parent);
            }
        }
        block.sort_unstable();
        let text: Vec<&str> = block
            .iter()
            .map(|&id| dom.node(id).rendered_text.as_str())
            .collect();
        let text = text.join("\n");
        for &t in &mentions[gray] {
            per_template[t].push(text.clone());
        }
    }

    per_template
        .into_iter()
        .map(|blocks| {
            if blocks.is_empty() {
                None
            } else {
                Some(blocks.join("\n"))
            }
        })
        .collect()
}

/// Locate one template's description block within one page.
///
/// Returns `None` when nothing on the page mentions the template. The
/// block's `source_pages` is left empty here — the page URL belongs to
/// the caller combining several pages.
pub fn locate_description_block(
    page_dom: &PageDom,
    template: &PathTemplate,
    base: &BaseUrl,
) -> Option<DescriptionBlock> {
    let blocks = locate_blocks_on_page(page_dom, std::slice::from_ref(template), base);
    blocks.into_iter().next().flatten().map(|text| DescriptionBlock {
        template: template.clone(),
        text,
        source_pages: BTreeSet::new(),
    })
}

static METHOD_TOKEN: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(GET|POST|PUT|DELETE|OPTIONS|HEAD|PATCH)\b").expect("valid regex")
});

/// Read the method set out of a block. Methods must appear as uppercase
/// whole words — "get the user" in prose proves nothing. An absent block
/// or a block naming no method yields {GET}.
pub fn extract_methods(block: Option<&DescriptionBlock>) -> BTreeSet<Method> {
    let mut methods = BTreeSet::new();
    if let Some(block) = block {
        for capture in METHOD_TOKEN.find_iter(&block.text) {
            if let Some(m) = Method::ALL
                .into_iter()
                .find(|m| m.as_upper() == capture.as_str())
            {
                methods.insert(m);
            }
        }
    }
    if methods.is_empty() {
        methods.insert(Method::Get);
    }
    methods
}

/// Combine block location and method extraction across a whole corpus:
/// one endpoint per template, with blocks from every page that mentions
/// it concatenated in fetch order before the method scan.
pub fn endpoints_for_templates(
    pages: &[Page],
    templates: &[PathTemplate],
    base: &BaseUrl,
) -> Vec<Endpoint> {
    let mut texts: Vec<Vec<String>> = vec![Vec::new(); templates.len()];
    let mut sources: Vec<BTreeSet<String>> = vec![BTreeSet::new(); templates.len()];
    for page in pages {
        let dom = PageDom::parse(&page.html);
        for (i, text) in locate_blocks_on_page(&dom, templates, base)
            .into_iter()
            .enumerate()
        {
            if let Some(text) = text {
                texts[i].push(text);
                sources[i].insert(page.url.clone());
            }
        }
    }
    templates
        .iter()
        .enumerate()
        .map(|(i, template)| {
            let block = if texts[i].is_empty() {
                None
            } else {
                Some(DescriptionBlock {
                    template: template.clone(),
                    text: texts[i].join("\n"),
                    source_pages: std::mem::take(&mut sources[i]),
                })
            };
            Endpoint {
                template: template.clone(),
                methods: extract_methods(block.as_ref()),
            }
        })
        .collect()
}

/// Convenience used by tests and the diff renderer.
pub fn method_set(methods: &[Method]) -> BTreeSet<Method> {
    methods.iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::templates::segments_from_raw;

    fn template(path: &str) -> PathTemplate {
        let raw: Vec<&str> = path.split('/').filter(|s| !s.is_empty()).collect();
        PathTemplate::new(segments_from_raw(&raw).unwrap())
    }

    fn base() -> BaseUrl {
        BaseUrl::new("https", "api.github.com", "")
    }

    #[test]
    fn absolute_token_matches_template() {
        let t = template("/users/{username}/orgs");
        assert!(template_matches(
            "https://api.github.com/users/alice/orgs",
            &t,
            &base()
        ));
        assert!(!template_matches(
            "https://other.host/users/alice/orgs",
            &t,
            &base()
        ));
    }

    #[test]
    fn template_token_matches_itself() {
        let t = template("/users/{username}/orgs");
        assert!(template_matches("/users/{username}/orgs", &t, &base()));
        assert!(template_matches("/users/:login/orgs", &t, &base()));
    }

    #[test]
    fn length_and_literal_mismatches() {
        let t = template("/users/{username}/orgs");
        assert!(!template_matches("/users/alice", &t, &base()));
        assert!(!template_matches("/repos/alice/orgs", &t, &base()));
    }

    #[test]
    fn relative_token_may_carry_base_path() {
        let base = BaseUrl::new("https", "api.example.com", "/v2");
        let t = template("/books");
        assert!(template_matches("/v2/books", &t, &base));
        assert!(template_matches("/books", &t, &base));
        assert!(template_matches("https://api.example.com/v2/books?x=1", &t, &base));
        assert!(!template_matches("https://api.example.com/books", &t, &base));
    }

    #[test]
    fn methods_from_block_text() {
        let block = DescriptionBlock {
            template: template("/x"),
            text: "Use POST or PUT to update".to_string(),
            source_pages: BTreeSet::new(),
        };
        assert_eq!(
            extract_methods(Some(&block)),
            method_set(&[Method::Post, Method::Put])
        );
    }

    #[test]
    fn default_is_get() {
        assert_eq!(extract_methods(None), method_set(&[Method::Get]));
        let block = DescriptionBlock {
            template: template("/x"),
            text: "Retrieve the resource described above.".to_string(),
            source_pages: BTreeSet::new(),
        };
        assert_eq!(extract_methods(Some(&block)), method_set(&[Method::Get]));
    }

    #[test]
    fn lowercase_and_embedded_words_do_not_count() {
        let block = DescriptionBlock {
            template: template("/x"),
            text: "get the user, then delete it; GETAWAY; OUTPUTS".to_string(),
            source_pages: BTreeSet::new(),
        };
        assert_eq!(extract_methods(Some(&block)), method_set(&[Method::Get]));
    }

    fn page(html: &str) -> Page {
        Page {
            url: "file:///doc.html".to_string(),
            html: html.to_string(),
            fetch_order: 0,
        }
    }

    #[test]
    fn block_expands_to_siblings_and_parent() {
        let html = "<html><body><section>\
                    <p>Repository listings support pagination.</p>\
                    <p>Send a GET request to https://api.github.com/users/alice/orgs to list.</p>\
                    <p>Responses are JSON arrays.</p>\
                    </section></body></html>";
        let dom = PageDom::parse(html);
        let t = template("/users/{username}/orgs");
        let block = locate_description_block(&dom, &t, &base()).unwrap();
        assert!(block.text.contains("pagination"));
        assert!(block.text.contains("JSON arrays"));
        // The parent <section> is included too (its text repeats the lot).
        assert!(block.text.contains("GET"));
    }

    #[test]
    fn adjacent_gray_nodes_stay_disjoint() {
        // Two endpoints documented side by side under one parent: each
        // block must stop before swallowing the other's mention.
        let html = "<html><body><div>\
                    <p>alpha POST marker</p>\
                    <p>https://api.github.com/users/alice/orgs</p>\
                    <p>https://api.github.com/repos/vmg/redcarpet</p>\
                    <p>omega PUT marker</p>\
                    </div></body></html>";
        let dom = PageDom::parse(html);
        let orgs = template("/users/{username}/orgs");
        let repos = template("/repos/{owner}/{repo}");
        let b1 = locate_blocks_on_page(&dom, &[orgs.clone(), repos.clone()], &base());
        let orgs_text = b1[0].as_ref().unwrap();
        let repos_text = b1[1].as_ref().unwrap();
        // First gray claims the left neighbor and aborts at the second
        // gray; the parent stays out on both sides.
        assert!(orgs_text.contains("POST"));
        assert!(!orgs_text.contains("PUT"));
        // Second gray aborts immediately (left neighbor already claimed),
        // so it keeps only itself.
        assert!(!repos_text.contains("POST"));
        assert!(!repos_text.contains("PUT"));
    }

    #[test]
    fn global_banner_outside_every_block_is_invisible() {
        // A site-wide note ("everything is POST!") that no block reaches
        // must not leak into any endpoint's methods.
        let html = "<html><body>\
                    <p>All API calls should be made with HTTP POST.</p>\
                    <section>\
                    <h3>Info</h3>\
                    <p>https://api.github.com/users/alice/orgs</p>\
                    </section>\
                    </body></html>";
        let dom = PageDom::parse(html);
        let t = template("/users/{username}/orgs");
        let block = locate_description_block(&dom, &t, &base()).unwrap();
        assert!(!block.text.contains("POST"));
        let endpoints = endpoints_for_templates(
            &[page(html)],
            std::slice::from_ref(&t),
            &base(),
        );
        assert_eq!(endpoints[0].methods, method_set(&[Method::Get]));
    }

    #[test]
    fn blocks_concatenate_across_pages() {
        let page_one = page(
            "<html><body><section><p>Create with POST.</p>\
             <p>https://api.github.com/users/alice/orgs</p></section></body></html>",
        );
        let mut page_two = page(
            "<html><body><section><p>Replace with PUT.</p>\
             <p>https://api.github.com/users/alice/orgs</p></section></body></html>",
        );
        page_two.url = "file:///two.html".to_string();
        page_two.fetch_order = 1;
        let t = template("/users/{username}/orgs");
        let endpoints = endpoints_for_templates(
            &[page_one, page_two],
            std::slice::from_ref(&t),
            &base(),
        );
        assert_eq!(
            endpoints[0].methods,
            method_set(&[Method::Post, Method::Put])
        );
    }

    #[test]
    fn no_mention_defaults_to_get() {
        let endpoints = endpoints_for_templates(
            &[page("<html><body><p>nothing here</p></body></html>")],
            &[template("/users/{username}/orgs")],
            &base(),
        );
        assert_eq!(endpoints[0].methods, method_set(&[Method::Get]));
    }

    #[test]
    fn method_names_parse_case_insensitively() {
        assert_eq!(Method::from_name("get"), Some(Method::Get));
        assert_eq!(Method::from_name("DELETE"), Some(Method::Delete));
        assert_eq!(Method::from_name("Patch"), Some(Method::Patch));
        assert_eq!(Method::from_name("parameters"), None);
    }
}
