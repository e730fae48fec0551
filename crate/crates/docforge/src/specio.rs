//! Reading and writing specification documents.
//!
//! The output format is the familiar Swagger 2.0 shape — `host`,
//! `basePath`, `schemes`, and a `paths` object whose keys are template
//! renderings and whose children are lowercase method names. Emission is
//! deterministic: objects serialize with sorted keys, so the same
//! extraction always produces byte-identical JSON. The parser is
//! deliberately forgiving about everything the differ does not need
//! (response schemas, descriptions, vendor extensions) and strict about
//! the parts it does: a document without a host cannot be compared.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::baseurl::BaseUrl;
use crate::error::{Error, Result};
use crate::methods::{Endpoint, Method};
use crate::templates::{segment_from_text, PathSegment, PathTemplate};

/// A complete extracted (or loaded) API specification.
#[derive(Debug, Clone)]
pub struct ApiSpec {
    pub base: BaseUrl,
    /// Sorted by template rendering, each rendering unique.
    pub endpoints: Vec<Endpoint>,
    /// Where the spec came from — seed URL, corpus directory, or the
    /// `info.title` of a loaded document.
    pub source: String,
}

impl ApiSpec {
    /// Build a spec, enforcing the ordering invariant: endpoints sort by
    /// rendering and duplicates merge their method sets.
    pub fn new(base: BaseUrl, endpoints: Vec<Endpoint>, source: &str) -> ApiSpec {
        let mut by_rendering: BTreeMap<String, Endpoint> = BTreeMap::new();
        for endpoint in endpoints {
            let key = endpoint.template.render();
            match by_rendering.get_mut(&key) {
                Some(existing) => existing.methods.extend(endpoint.methods.iter().copied()),
                None => {
                    by_rendering.insert(key, endpoint);
                }
            }
        }
        ApiSpec {
            base,
            endpoints: by_rendering.into_values().collect(),
            source: source.to_string(),
        }
    }
}

/// Serialize a spec to pretty-printed JSON with sorted keys and a
/// trailing newline.
pub fn emit(spec: &ApiSpec) -> String {
    let mut paths = Map::new();
    for endpoint in &spec.endpoints {
        let mut item = Map::new();
        for method in &endpoint.methods {
            item.insert(method.as_lower().to_string(), json!({}));
        }
        let parameters: Vec<Value> = endpoint
            .template
            .parameter_names()
            .into_iter()
            .map(|name| {
                json!({
                    "in": "path",
                    "name": name,
                    "required": true,
                    "type": "string",
                })
            })
            .collect();
        if !parameters.is_empty() {
            item.insert("parameters".to_string(), Value::Array(parameters));
        }
        paths.insert(endpoint.template.render(), Value::Object(item));
    }
    let document = json!({
        "swagger": "2.0",
        "info": {
            "title": spec.source,
            "version": "extracted",
        },
        "host": spec.base.host,
        "basePath": spec.base.base_path,
        "schemes": [spec.base.scheme],
        "paths": Value::Object(paths),
    });
    let mut text = serde_json::to_string_pretty(&document).expect("JSON value serializes");
    text.push('\n');
    text
}

/// Write a spec to a file.
pub fn save(spec: &ApiSpec, path: &Path) -> Result<()> {
    std::fs::write(path, emit(spec))?;
    Ok(())
}

fn string_field(value: &Value, key: &str) -> Option<String> {
    value.get(key).and_then(Value::as_str).map(str::to_string)
}

/// Parse a specification document.
///
/// Tolerates missing `paths` (an empty spec), unknown keys everywhere,
/// and any casing on method names. Fails on malformed JSON (with the
/// offending line and column) and on a missing or empty `host`.
pub fn parse(text: &str) -> Result<ApiSpec> {
    let document: Value = serde_json::from_str(text).map_err(|e| Error::SpecParse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if !document.is_object() {
        return Err(Error::SpecInvalid("top level is not an object".to_string()));
    }

    let host = string_field(&document, "host")
        .filter(|h| !h.trim().is_empty())
        .ok_or_else(|| Error::SpecInvalid("missing required field \"host\"".to_string()))?;

    let scheme = match document
        .get("schemes")
        .and_then(Value::as_array)
        .and_then(|a| a.first())
        .and_then(Value::as_str)
    {
        Some(s) => {
            let lower = s.to_ascii_lowercase();
            if lower == "http" || lower == "https" {
                lower
            } else {
                log::warn!("unsupported scheme {s:?}; assuming https");
                "https".to_string()
            }
        }
        None => "https".to_string(),
    };

    let base_path = string_field(&document, "basePath").unwrap_or_default();
    let source = document
        .get("info")
        .and_then(|info| info.get("title"))
        .and_then(Value::as_str)
        .unwrap_or("")
        .to_string();

    let mut endpoints = Vec::new();
    if let Some(paths) = document.get("paths") {
        let paths = paths
            .as_object()
            .ok_or_else(|| Error::SpecInvalid("\"paths\" is not an object".to_string()))?;
        for (raw_path, item) in paths {
            let raw_segments: Vec<&str> =
                raw_path.split('/').filter(|s| !s.is_empty()).collect();
            if raw_segments.is_empty() {
                log::warn!("ignoring empty path key {raw_path:?}");
                continue;
            }
            let segments: Vec<PathSegment> = raw_segments
                .iter()
                .enumerate()
                .map(|(i, raw)| segment_from_text(raw, i))
                .collect();
            let template = PathTemplate::new(segments);
            let Some(item) = item.as_object() else {
                log::warn!("ignoring non-object path item for {raw_path:?}");
                continue;
            };
            let mut methods = BTreeSet::new();
            for key in item.keys() {
                if let Some(method) = Method::from_name(key) {
                    methods.insert(method);
                }
            }
            if methods.is_empty() {
                // A path item carrying only parameters or extensions
                // documents no operation; there is nothing to compare.
                continue;
            }
            endpoints.push(Endpoint { template, methods });
        }
    }

    Ok(ApiSpec::new(
        BaseUrl::new(&scheme, &host, &base_path),
        endpoints,
        &source,
    ))
}

/// Load a specification from a file.
pub fn load(path: &Path) -> Result<ApiSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Corpus {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    parse(&text)
}
