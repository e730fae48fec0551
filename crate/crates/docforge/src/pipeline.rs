//! The end-to-end extraction pipeline.
//!
//! Pages go in; a specification comes out. The stages — candidate
//! harvesting, classification, base-URL inference, template clustering,
//! method extraction — live in their own modules; this one only wires
//! them together and keeps the bookkeeping that the CLI reports.

use std::collections::{BTreeMap, BTreeSet};

use crate::baseurl::infer_base_url;
use crate::classifier::{predict, LinearModel};
use crate::corpus::Page;
use crate::error::Result;
use crate::harvest::{self, ProbeResult};
use crate::methods::endpoints_for_templates;
use crate::specio::ApiSpec;
use crate::templates::{
    iterate_templates, paths_from_relative_mentions, paths_from_urls, ClusteringConfig,
};

/// What an extraction run produced, with counts for the summary line.
#[derive(Debug)]
pub struct Extraction {
    pub spec: ApiSpec,
    pub pages: usize,
    pub candidates: usize,
    pub api_urls: usize,
    pub templates: usize,
}

/// Run the full pipeline over an already-acquired corpus.
///
/// `probe_enabled` turns on live HTTP probing of candidate URLs — off by
/// default, since it fires requests at the documented API itself. Fails
/// with [`crate::Error::NoApiUrls`] when the classifier accepts nothing.
pub fn extract_spec(
    pages: &[Page],
    model: &LinearModel,
    probe_enabled: bool,
    source: &str,
) -> Result<Extraction> {
    let mut candidates = Vec::new();
    for page in pages {
        candidates.extend(harvest::extract_candidates(page));
    }
    log::info!(
        "{} candidate URLs across {} pages",
        candidates.len(),
        pages.len()
    );

    // One probe per distinct URL, shared across contexts.
    let mut probes: BTreeMap<&str, ProbeResult> = BTreeMap::new();
    let mut api_urls: BTreeSet<String> = BTreeSet::new();
    for candidate in &candidates {
        let probe = *probes
            .entry(candidate.raw.as_str())
            .or_insert_with(|| harvest::probe(&candidate.raw, probe_enabled));
        let features = harvest::featurize(candidate, probe);
        if predict(model, features) {
            api_urls.insert(candidate.raw.clone());
        }
    }
    let api_urls: Vec<String> = api_urls.into_iter().collect();
    log::info!("{} distinct URLs classified as API URLs", api_urls.len());

    let base = infer_base_url(&api_urls)?;
    log::info!("base URL: {base}");

    let mut paths = paths_from_urls(&api_urls, &base);
    paths.extend(paths_from_relative_mentions(pages));
    let templates = iterate_templates(&paths, &ClusteringConfig::default());
    log::info!("{} path templates from {} paths", templates.len(), paths.len());

    let endpoints = endpoints_for_templates(pages, &templates, &base);
    let spec = ApiSpec::new(base, endpoints, source);
    Ok(Extraction {
        pages: pages.len(),
        candidates: candidates.len(),
        api_urls: api_urls.len(),
        templates: templates.len(),
        spec,
    })
}
