//! Plain-text record format.

use std::fmt::Write;

use super::{JsonSchema, WebApiUrl};

fn label(out: &mut String, name: &str, value: &str) {
    let _ = write!(out, "{name}: \n{value}\n");
}

/// One URL record. Lines end in LF; labels carry a trailing space.
pub fn render_url_record(url: &WebApiUrl) -> String {
    let mut out = String::new();
    let site = url.provenance.first();
    label(
        &mut out,
        "Path",
        &site.map(|s| s.unit_path.display().to_string()).unwrap_or_default(),
    );
    label(&mut out, "Library", site.map(|s| s.library.label()).unwrap_or_default());
    label(&mut out, "Scheme", &format!("{}://", url.scheme));
    label(&mut out, "Authority", &url.authority.render_url());
    label(&mut out, "Base URL", &url.base_url());
    out.push_str("Endpoints: \n");
    for e in &url.endpoints {
        let _ = writeln!(out, "    Path: {}", e.path());
        out.push_str("    Queries: \n");
        for (k, v) in &e.queries {
            let _ = writeln!(out, "        Query key: {k}, query value: {v}");
        }
        out.push_str("    Fragments: \n");
        for f in &e.fragments {
            let _ = writeln!(out, "        Fragment: {f}");
        }
        out.push_str("    HTTP Methods: \n");
        for m in &e.http_methods {
            let _ = writeln!(out, "        HTTP Method: {m}");
        }
    }
    let headers: Vec<_> = url.provenance.iter().flat_map(|s| &s.headers).collect();
    if !headers.is_empty() {
        out.push_str("Headers: \n");
        for h in headers {
            let _ = writeln!(out, "    Header key: {}, header value: {}", h.key, h.value);
        }
    }
    out
}

pub fn render_json_record(schema: &JsonSchema) -> String {
    let mut out = String::new();
    label(&mut out, "Path", &schema.provenance.unit_path.display().to_string());
    label(&mut out, "Library", schema.provenance.library.label());
    label(&mut out, "JSON Object", &schema.render());
    out
}
