//! Comparing a generated specification against an existing one.
//!
//! Two specs rarely agree on parameter *names* — one says `{username}`,
//! the other `{login}` — so templates are matched by shape: literal
//! segments must be byte-equal, parameter positions must line up, names
//! are ignored. Within a shape group the renderings pair off in sorted
//! order; whatever cannot pair is reported as present on one side only.
//! Matched pairs additionally compare their method sets.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::methods::{Endpoint, Method};
use crate::specio::ApiSpec;
use crate::templates::PathSegment;

/// A matched template pair whose method sets disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodMismatch {
    /// The generated side's rendering of the template.
    pub template: String,
    pub generated: Vec<Method>,
    pub existing: Vec<Method>,
}

/// Everything the comparison found.
#[derive(Debug, Clone)]
pub struct DiffReport {
    pub base_url_match: bool,
    pub generated_base: String,
    pub existing_base: String,
    /// Pairs of (generated rendering, existing rendering), sorted.
    pub template_matches: Vec<(String, String)>,
    pub generated_only: Vec<String>,
    pub existing_only: Vec<String>,
    pub method_mismatches: Vec<MethodMismatch>,
}

impl DiffReport {
    /// Anything worth failing a build over?
    pub fn has_mismatch(&self) -> bool {
        !self.base_url_match
            || !self.generated_only.is_empty()
            || !self.existing_only.is_empty()
            || !self.method_mismatches.is_empty()
    }
}

/// The shape key: parameter names erased, literals kept verbatim.
///
/// Literal segments cannot contain `/`, so joining with `/` is
/// unambiguous; the `=` prefix keeps a literal `*` distinct from a
/// parameter position.
fn shape_key(endpoint: &Endpoint) -> String {
    endpoint
        .template
        .segments
        .iter()
        .map(|segment| match segment {
            PathSegment::Literal(text) => format!("={text}"),
            PathSegment::Parameter { .. } => "*".to_string(),
        })
        .collect::<Vec<_>>()
        .join("/")
}

/// Compare two specs structurally.
pub fn diff_specs(generated: &ApiSpec, existing: &ApiSpec) -> DiffReport {
    let mut groups: BTreeMap<String, (Vec<&Endpoint>, Vec<&Endpoint>)> = BTreeMap::new();
    for endpoint in &generated.endpoints {
        groups.entry(shape_key(endpoint)).or_default().0.push(endpoint);
    }
    for endpoint in &existing.endpoints {
        groups.entry(shape_key(endpoint)).or_default().1.push(endpoint);
    }

    let mut template_matches = Vec::new();
    let mut generated_only = Vec::new();
    let mut existing_only = Vec::new();
    let mut method_mismatches = Vec::new();

    for (gen_side, exist_side) in groups.into_values() {
        // Spec endpoints are already sorted by rendering; group members
        // inherit that order, so pairing is deterministic.
        let paired = gen_side.len().min(exist_side.len());
        for i in 0..paired {
            let g = gen_side[i];
            let e = exist_side[i];
            template_matches.push((g.template.render(), e.template.render()));
            if g.methods != e.methods {
                method_mismatches.push(MethodMismatch {
                    template: g.template.render(),
                    generated: g.methods.iter().copied().collect(),
                    existing: e.methods.iter().copied().collect(),
                });
            }
        }
        for g in &gen_side[paired..] {
            generated_only.push(g.template.render());
        }
        for e in &exist_side[paired..] {
            existing_only.push(e.template.render());
        }
    }

    template_matches.sort();
    generated_only.sort();
    existing_only.sort();
    method_mismatches.sort_by(|a, b| a.template.cmp(&b.template));

    DiffReport {
        base_url_match: generated.base.full() == existing.base.full(),
        generated_base: generated.base.full(),
        existing_base: existing.base.full(),
        template_matches,
        generated_only,
        existing_only,
        method_mismatches,
    }
}

fn method_names(methods: &[Method]) -> Vec<Value> {
    methods.iter().map(|m| json!(m.as_upper())).collect()
}

/// Machine-readable report: sorted keys, pretty-printed, trailing
/// newline — the same determinism contract as spec emission.
pub fn render_report(report: &DiffReport) -> String {
    let matches: Vec<Value> = report
        .template_matches
        .iter()
        .map(|(g, e)| json!({"generated": g, "existing": e}))
        .collect();
    let mismatches: Vec<Value> = report
        .method_mismatches
        .iter()
        .map(|m| {
            json!({
                "template": m.template,
                "generated": method_names(&m.generated),
                "existing": method_names(&m.existing),
            })
        })
        .collect();
    let document = json!({
        "base_url": {
            "match": report.base_url_match,
            "generated": report.generated_base,
            "existing": report.existing_base,
        },
        "counts": {
            "matches": report.template_matches.len(),
            "generated_only": report.generated_only.len(),
            "existing_only": report.existing_only.len(),
            "method_mismatches": report.method_mismatches.len(),
        },
        "matches": matches,
        "generated_only": report.generated_only,
        "existing_only": report.existing_only,
        "method_mismatches": mismatches,
    });
    let mut text = serde_json::to_string_pretty(&document).expect("JSON value serializes");
    text.push('\n');
    text
}

/// Human-readable one-screen summary.
pub fn summary(report: &DiffReport) -> String {
    let mut out = String::new();
    if report.base_url_match {
        out.push_str(&format!("base URL: match ({})\n", report.generated_base));
    } else {
        out.push_str(&format!(
            "base URL: MISMATCH (generated {} / existing {})\n",
            report.generated_base, report.existing_base
        ));
    }
    out.push_str(&format!(
        "matched templates: {}\n",
        report.template_matches.len()
    ));
    out.push_str(&format!("generated only: {}\n", report.generated_only.len()));
    for t in &report.generated_only {
        out.push_str(&format!("  + {t}\n"));
    }
    out.push_str(&format!("existing only: {}\n", report.existing_only.len()));
    for t in &report.existing_only {
        out.push_str(&format!("  - {t}\n"));
    }
    out.push_str(&format!(
        "method mismatches: {}\n",
        report.method_mismatches.len()
    ));
    for m in &report.method_mismatches {
        let g: Vec<&str> = m.generated.iter().map(|x| x.as_upper()).collect();
        let e: Vec<&str> = m.existing.iter().map(|x| x.as_upper()).collect();
        out.push_str(&format!(
            "  ! {} generated=[{}] existing=[{}]\n",
            m.template,
            g.join(", "),
            e.join(", ")
        ));
    }
    out
}
