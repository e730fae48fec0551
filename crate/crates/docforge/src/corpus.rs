//! Acquiring documentation pages.
//!
//! Two sources feed the pipeline: a breadth-first crawl of a live
//! documentation site, and a directory of saved HTML files. Both produce
//! the same `Page` records in a deterministic order — fetch order for
//! crawls, byte-lexicographic relative path order for directories — so
//! everything downstream behaves identically regardless of origin. An
//! optional on-disk cache makes repeated crawls of the same site cheap
//! and reproducible.

use std::collections::{BTreeSet, VecDeque};
use std::path::{Path, PathBuf};
use std::time::Duration;

use sha2::{Digest, Sha256};
use url::Url;

use crate::error::{Error, Result};

/// One fetched or loaded documentation page.
#[derive(Debug, Clone)]
pub struct Page {
    /// The fetched URL, or `file:///<relative path>` for loaded files.
    pub url: String,
    /// Decoded HTML.
    pub html: String,
    /// Position in the corpus ordering, starting at zero.
    pub fetch_order: usize,
}

/// Crawl parameters. `new` fills in conservative defaults.
#[derive(Debug, Clone)]
pub struct CrawlConfig {
    pub seed: String,
    pub max_pages: usize,
    pub max_depth: usize,
    /// Politeness delay between network fetches.
    pub delay_ms: u64,
    pub same_host_only: bool,
}

impl CrawlConfig {
    pub fn new(seed: &str) -> CrawlConfig {
        CrawlConfig {
            seed: seed.to_string(),
            max_pages: 200,
            max_depth: 3,
            delay_ms: 250,
            same_host_only: true,
        }
    }
}

/// The User-Agent header for all outbound requests. Overridable through
/// the `DOCFORGE_USER_AGENT` environment variable.
pub fn user_agent() -> String {
    std::env::var("DOCFORGE_USER_AGENT").unwrap_or_else(|_| {
        format!(
            "docforge/{} (web API documentation extractor)",
            env!("CARGO_PKG_VERSION")
        )
    })
}

/// Decode raw HTTP body bytes to text.
///
/// A `<meta charset>` (or `http-equiv` content-type) declaration in the
/// first kilobyte wins; otherwise the bytes are read as UTF-8 with
/// replacement. Header-declared charsets are ignored on purpose: cached
/// bodies carry no headers, and live and cached runs must decode
/// identically.
pub(crate) fn decode_html(bytes: &[u8]) -> String {
    let prefix_len = bytes.len().min(1024);
    let prefix: String = bytes[..prefix_len]
        .iter()
        .map(|&b| if b.is_ascii() { b as char } else { '\u{FFFD}' })
        .collect();
    let lower = prefix.to_ascii_lowercase();
    if let Some(idx) = lower.find("charset") {
        let rest = &lower[idx + "charset".len()..];
        let rest = rest.trim_start();
        if let Some(rest) = rest.strip_prefix('=') {
            let rest = rest.trim_start().trim_start_matches(['"', '\'']);
            let label: String = rest
                .chars()
                .take_while(|c| c.is_ascii_alphanumeric() || *c == '-' || *c == '_')
                .collect();
            if !label.is_empty() {
                if let Some(encoding) = encoding_rs::Encoding::for_label(label.as_bytes()) {
                    let (text, _, _) = encoding.decode(bytes);
                    return text.into_owned();
                }
            }
        }
    }
    String::from_utf8_lossy(bytes).into_owned()
}

/// Load every `.html`/`.htm` file under a directory, recursively.
///
/// Pages are ordered by their relative path, byte-lexicographically,
/// and carry synthetic `file:///` URLs built from those paths. An empty
/// directory is an error — there is nothing to extract from.
pub fn load_dir(dir: &Path) -> Result<Vec<Page>> {
    let mut entries: Vec<(String, PathBuf)> = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::Corpus {
            path: dir.to_path_buf(),
            reason: e.to_string(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let is_html = entry
            .path()
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.eq_ignore_ascii_case("html") || e.eq_ignore_ascii_case("htm"))
            .unwrap_or(false);
        if !is_html {
            continue;
        }
        let relative = entry
            .path()
            .strip_prefix(dir)
            .unwrap_or(entry.path())
            .to_string_lossy()
            .replace('\\', "/");
        entries.push((relative, entry.path().to_path_buf()));
    }
    entries.sort_by(|a, b| a.0.cmp(&b.0));

    let mut pages = Vec::with_capacity(entries.len());
    for (relative, path) in entries {
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) => {
                log::warn!("skipping unreadable file {}: {e}", path.display());
                continue;
            }
        };
        pages.push(Page {
            url: format!("file:///{relative}"),
            html: decode_html(&bytes),
            fetch_order: pages.len(),
        });
    }
    if pages.is_empty() {
        return Err(Error::Corpus {
            path: dir.to_path_buf(),
            reason: "no .html files found".to_string(),
        });
    }
    Ok(pages)
}

fn cache_path(cache_dir: &Path, url: &Url) -> PathBuf {
    let digest = Sha256::digest(url.as_str().as_bytes());
    let mut name = String::with_capacity(69);
    for byte in digest {
        name.push_str(&format!("{byte:02x}"));
    }
    name.push_str(".html");
    cache_dir.join(name)
}

/// Extract same-crawl links from a page, in document order.
fn page_links(html: &str, page_url: &Url, config: &CrawlConfig, seed: &Url) -> Vec<Url> {
    let document = scraper::Html::parse_document(html);
    let selector = scraper::Selector::parse("a[href]").expect("valid selector");
    let mut links = Vec::new();
    for anchor in document.select(&selector) {
        let Some(href) = anchor.value().attr("href") else {
            continue;
        };
        let Ok(mut target) = page_url.join(href) else {
            continue;
        };
        if target.scheme() != "http" && target.scheme() != "https" {
            continue;
        }
        target.set_fragment(None);
        if config.same_host_only && target.host_str() != seed.host_str() {
            continue;
        }
        links.push(target);
    }
    links
}

struct Fetcher {
    client: reqwest::blocking::Client,
    cache_dir: Option<PathBuf>,
    delay: Duration,
    fetched_any: bool,
}

impl Fetcher {
    fn new(cache_dir: Option<&Path>, delay_ms: u64) -> Result<Fetcher> {
        if let Some(dir) = cache_dir {
            std::fs::create_dir_all(dir)?;
        }
        let client = reqwest::blocking::Client::builder()
            .user_agent(user_agent())
            .timeout(Duration::from_secs(15))
            .build()
            .map_err(|e| Error::Crawl(format!("building HTTP client: {e}")))?;
        Ok(Fetcher {
            client,
            cache_dir: cache_dir.map(Path::to_path_buf),
            delay: Duration::from_millis(delay_ms),
            fetched_any: false,
        })
    }

    /// Fetch one URL's body, consulting and filling the cache.
    /// `Ok(None)` means the response was not an HTML document.
    fn fetch(&mut self, url: &Url) -> std::result::Result<Option<Vec<u8>>, String> {
        if let Some(dir) = &self.cache_dir {
            let path = cache_path(dir, url);
            if let Ok(bytes) = std::fs::read(&path) {
                log::debug!("cache hit for {url}");
                return Ok(Some(bytes));
            }
        }
        if self.fetched_any && !self.delay.is_zero() {
            std::thread::sleep(self.delay);
        }
        self.fetched_any = true;
        let response = self
            .client
            .get(url.clone())
            .send()
            .map_err(|e| format!("request failed: {e}"))?;
        let status = response.status();
        if !status.is_success() {
            return Err(format!("HTTP status {status}"));
        }
        let content_type = response
            .headers()
            .get(reqwest::header::CONTENT_TYPE)
            .and_then(|v| v.to_str().ok())
            .unwrap_or("text/html")
            .to_ascii_lowercase();
        if !content_type.contains("html") {
            log::debug!("skipping non-HTML content type {content_type:?} at {url}");
            return Ok(None);
        }
        let bytes = response
            .bytes()
            .map_err(|e| format!("reading body: {e}"))?
            .to_vec();
        if let Some(dir) = &self.cache_dir {
            let path = cache_path(dir, url);
            if let Err(e) = std::fs::write(&path, &bytes) {
                log::warn!("cannot write cache file {}: {e}", path.display());
            }
        }
        Ok(Some(bytes))
    }
}

/// Crawl without a cache. See [`crawl_with_cache`].
pub fn crawl(config: &CrawlConfig) -> Result<Vec<Page>> {
    crawl_with_cache(config, None)
}

/// Breadth-first crawl from the seed URL.
///
/// The seed failing is fatal; any later page failing is logged and
/// skipped. Fragments are stripped before the seen-check, pages are
/// capped at `max_pages`, link depth at `max_depth`, and (by default)
/// only the seed's host is followed. With a cache directory, bodies are
/// stored under the SHA-256 of their URL and reused on later runs.
pub fn crawl_with_cache(config: &CrawlConfig, cache_dir: Option<&Path>) -> Result<Vec<Page>> {
    let mut seed = Url::parse(&config.seed)
        .map_err(|e| Error::Crawl(format!("invalid seed URL {:?}: {e}", config.seed)))?;
    if seed.scheme() != "http" && seed.scheme() != "https" {
        return Err(Error::Crawl(format!(
            "seed URL must be http(s), got {:?}",
            config.seed
        )));
    }
    if seed.host_str().is_none() {
        return Err(Error::Crawl(format!("seed URL has no host: {:?}", config.seed)));
    }
    seed.set_fragment(None);

    let mut fetcher = Fetcher::new(cache_dir, config.delay_ms)?;
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut queue: VecDeque<(Url, usize)> = VecDeque::new();
    let mut pages: Vec<Page> = Vec::new();

    seen.insert(seed.as_str().to_string());
    queue.push_back((seed.clone(), 0));

    while let Some((url, depth)) = queue.pop_front() {
        if pages.len() >= config.max_pages {
            break;
        }
        let bytes = match fetcher.fetch(&url) {
            Ok(Some(bytes)) => bytes,
            Ok(None) => continue,
            Err(reason) => {
                if pages.is_empty() && url == seed {
                    return Err(Error::Crawl(format!("fetching seed {url}: {reason}")));
                }
                log::warn!("skipping {url}: {reason}");
                continue;
            }
        };
        let html = decode_html(&bytes);
        log::info!("fetched {url} ({} bytes, depth {depth})", bytes.len());
        if depth < config.max_depth {
            for link in page_links(&html, &url, config, &seed) {
                let key = link.as_str().to_string();
                if seen.insert(key) {
                    queue.push_back((link, depth + 1));
                }
            }
        }
        pages.push(Page {
            url: url.as_str().to_string(),
            html,
            fetch_order: pages.len(),
        });
    }

    if pages.is_empty() {
        return Err(Error::Crawl("crawl produced no pages".to_string()));
    }
    Ok(pages)
}
