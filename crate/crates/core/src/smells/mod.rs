//! Client-side smell scanners: credential leaks, embedded languages and
//! insecure transport.

mod rules;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use crate::model::{JsonNode, JsonSchema, Scheme, WebApiUrl};
use crate::source::Span;

pub use rules::{EmbeddedLanguage, LanguageMatch, RegexRule, RuleError, RuleSet, TABLE};

/// The paper's six terms followed by three common synonyms.
pub const SENSITIVE_KEYS: &[&str] = &[
    "key", "token", "user", "username", "password", "pw", "apikey", "api_key", "secret",
];

pub const EVIDENCE_LIMIT: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE", tag = "type", content = "language")]
pub enum SmellKind {
    CredentialLeak,
    EmbeddedLanguage(EmbeddedLanguage),
    InsecureTransport,
}

impl SmellKind {
    pub fn note(self) -> &'static str {
        match self {
            SmellKind::CredentialLeak => {
                "statically stored credentials can be extracted from the app and used to misuse the service"
            }
            SmellKind::EmbeddedLanguage(_) => {
                "code assembled from external input may let an attacker alter the app, its storage or the server"
            }
            SmellKind::InsecureTransport => "anyone on the path can read or alter the plain-text messages",
        }
    }
}

/// Where a finding comes from: a source position and, for URL-based
/// findings, the rendered URL.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Location {
    pub unit_path: PathBuf,
    pub span: Span,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SmellFinding {
    pub kind: SmellKind,
    pub evidence: String,
    pub location: Location,
    pub note: &'static str,
}

impl SmellFinding {
    pub fn new(kind: SmellKind, evidence: &str, location: Location) -> Self {
        SmellFinding {
            kind,
            evidence: truncate_evidence(evidence),
            location,
            note: kind.note(),
        }
    }
}

/// Keeps the first and last 100 characters of long evidence, so that both
/// ends of a match survive.
pub fn truncate_evidence(s: &str) -> String {
    let n = s.chars().count();
    if n <= EVIDENCE_LIMIT {
        return s.to_string();
    }
    let half = EVIDENCE_LIMIT / 2;
    let head: String = s.chars().take(half).collect();
    let tail: String = s.chars().skip(n - half).collect();
    head + &tail
}

pub fn scan_embedded_languages(text: &str) -> Vec<(EmbeddedLanguage, std::ops::Range<usize>)> {
    RuleSet::table()
        .scan(text)
        .into_iter()
        .map(|m| (m.language, m.span))
        .collect()
}

fn is_sensitive(key: &str) -> bool {
    SENSITIVE_KEYS.iter().any(|k| k.eq_ignore_ascii_case(key.trim()))
}

fn url_location(u: &WebApiUrl) -> Location {
    let site = u.provenance.first();
    Location {
        unit_path: site.map(|s| s.unit_path.clone()).unwrap_or_default(),
        span: site.map(|s| s.span).unwrap_or_default(),
        url: Some(u.render()),
    }
}

fn schema_location(s: &JsonSchema) -> Location {
    Location {
        unit_path: s.provenance.unit_path.clone(),
        span: s.provenance.span,
        url: None,
    }
}

fn sort(findings: &mut [SmellFinding]) {
    findings.sort_by(|a, b| (&a.location, a.kind, &a.evidence).cmp(&(&b.location, b.kind, &b.evidence)));
}

/// Query or JSON keys naming a credential whose value is a concrete literal.
pub fn scan_credentials(urls: &[WebApiUrl], schemas: &[JsonSchema]) -> Vec<SmellFinding> {
    let mut out = Vec::new();
    for u in urls {
        for e in &u.endpoints {
            for (k, v) in &e.queries {
                let Some(key) = k.as_literal() else { continue };
                if is_sensitive(key) && v.is_resolved() && !v.is_empty() {
                    out.push(SmellFinding::new(
                        SmellKind::CredentialLeak,
                        &format!("{key}={}", v.render_url()),
                        url_location(u),
                    ));
                }
            }
        }
    }
    for s in schemas {
        s.root.for_each_entry(&mut |k, v| {
            if is_sensitive(k) && v.is_concrete_scalar() {
                let value = match v {
                    JsonNode::String(sv) => sv.render_json(),
                    other => other.render(),
                };
                out.push(SmellFinding::new(
                    SmellKind::CredentialLeak,
                    &format!("{k}={value}"),
                    schema_location(s),
                ));
            }
        });
    }
    sort(&mut out);
    out
}

/// Plain HTTP and WebSocket URLs. URLs whose scheme was only assumed are
/// skipped.
pub fn scan_transport(urls: &[WebApiUrl]) -> Vec<SmellFinding> {
    let mut out: Vec<SmellFinding> = urls
        .iter()
        .filter(|u| !u.scheme_assumed && matches!(u.scheme, Scheme::Http | Scheme::Ws))
        .map(|u| SmellFinding::new(SmellKind::InsecureTransport, &u.base_url(), url_location(u)))
        .collect();
    sort(&mut out);
    out
}

fn language_findings(rules: &RuleSet, text: &str, location: &Location, out: &mut Vec<SmellFinding>) {
    for m in rules.scan(text) {
        out.push(SmellFinding::new(
            SmellKind::EmbeddedLanguage(m.language),
            &text[m.span],
            location.clone(),
        ));
    }
}

/// Embedded-language hits over report strings: rendered URLs, header
/// values and concrete JSON strings.
pub fn scan_report_strings(rules: &RuleSet, urls: &[WebApiUrl], schemas: &[JsonSchema]) -> Vec<SmellFinding> {
    let mut out = Vec::new();
    for u in urls {
        let loc = url_location(u);
        language_findings(rules, &u.render(), &loc, &mut out);
        for h in u.provenance.iter().flat_map(|s| &s.headers) {
            language_findings(rules, &h.value.render_url(), &loc, &mut out);
        }
    }
    for s in schemas {
        let loc = schema_location(s);
        s.root.for_each_string(&mut |v| {
            if let Some(text) = v.as_literal() {
                language_findings(rules, text, &loc, &mut out);
            }
        });
    }
    sort(&mut out);
    out
}

/// Embedded-language hits over raw string literals of a source file.
pub fn scan_source_strings(
    rules: &RuleSet,
    unit_path: &std::path::Path,
    literals: &[(Span, String)],
) -> Vec<SmellFinding> {
    let mut out = Vec::new();
    for (span, text) in literals {
        let loc = Location {
            unit_path: unit_path.to_path_buf(),
            span: *span,
            url: None,
        };
        language_findings(rules, text, &loc, &mut out);
    }
    sort(&mut out);
    out
}

/// Hits per language over a set of findings.
pub fn language_counts(findings: &[SmellFinding]) -> BTreeMap<EmbeddedLanguage, usize> {
    let mut out: BTreeMap<EmbeddedLanguage, usize> = EmbeddedLanguage::ALL.iter().map(|l| (*l, 0)).collect();
    for f in findings {
        if let SmellKind::EmbeddedLanguage(l) = f.kind {
            *out.entry(l).or_default() += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests;
