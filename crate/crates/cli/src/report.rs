//! Report serializers: canonical text records, structured JSON and CSV.

use serde::Serialize;

use apimine_core::model::{
    dedup, render_json_record, render_url_record, round2, stats, AggregateStats, Scheme, WebApiUrl,
};
use apimine_core::smells::{language_counts, EmbeddedLanguage, SmellKind};

use crate::analyze::AppReport;

pub const REPORT_VERSION: u32 = 1;

/// URL records then JSON records, separated by blank lines.
pub fn render_text(report: &AppReport) -> String {
    let records: Vec<String> = report
        .endpoints
        .iter()
        .map(render_url_record)
        .chain(report.schemas.iter().map(render_json_record))
        .collect();
    records.join("\n")
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Structured<'a> {
    report_version: u32,
    #[serde(flatten)]
    report: &'a AppReport,
    stats: AggregateStats,
}

fn sorted_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report serializes");
    let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
    s.push('\n');
    s
}

/// One JSON document per app with keys in sorted order.
pub fn render_structured(report: &AppReport) -> String {
    sorted_json(&Structured {
        report_version: REPORT_VERSION,
        report,
        stats: report.stats(),
    })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DistinctUrl {
    url: String,
    occurrences: usize,
    apps: Vec<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Corpus<'a> {
    report_version: u32,
    apps: Vec<&'a str>,
    partial_apps: Vec<&'a str>,
    dropped_duplicates: &'a [String],
    stats: AggregateStats,
    distinct_urls: Vec<DistinctUrl>,
}

/// Corpus summary: cross-app dedup happens only here.
pub fn render_corpus(reports: &[AppReport], dropped: &[String]) -> String {
    let mut all: Vec<WebApiUrl> = Vec::new();
    let mut owner: Vec<(String, &str)> = Vec::new();
    for r in reports {
        for u in &r.endpoints {
            owner.push((u.dedup_key(), r.app_id.as_str()));
            all.push(u.clone());
        }
    }
    let distinct = dedup(&all)
        .into_iter()
        .map(|u| {
            let key = u.dedup_key();
            let mut apps: Vec<String> = owner
                .iter()
                .filter(|(k, _)| *k == key)
                .map(|(_, a)| a.to_string())
                .collect();
            apps.dedup();
            DistinctUrl {
                url: u.render(),
                occurrences: u.provenance.len(),
                apps,
            }
        })
        .collect();
    sorted_json(&Corpus {
        report_version: REPORT_VERSION,
        apps: reports.iter().map(|r| r.app_id.as_str()).collect(),
        partial_apps: reports
            .iter()
            .filter(|r| r.partial)
            .map(|r| r.app_id.as_str())
            .collect(),
        dropped_duplicates: dropped,
        stats: corpus_stats(reports),
        distinct_urls: distinct,
    })
}

pub fn corpus_stats(reports: &[AppReport]) -> AggregateStats {
    let all: Vec<WebApiUrl> = reports.iter().flat_map(|r| r.endpoints.iter().cloned()).collect();
    stats(&all)
}

pub const CSV_HEADER: [&str; 19] = [
    "appId",
    "totalUrls",
    "distinctUrls",
    "http",
    "https",
    "ws",
    "wss",
    "meanSegments",
    "meanQueryPairs",
    "fragmentsUsed",
    "sqlHits",
    "jsHits",
    "htmlHits",
    "bashHits",
    "phpHits",
    "pythonHits",
    "rubyHits",
    "credentialLeaks",
    "partial",
];

/// Row for the given id, stats and findings.
fn csv_row(app_id: &str, s: &AggregateStats, reports: &[&AppReport]) -> Vec<String> {
    let findings: Vec<_> = reports.iter().flat_map(|r| r.client_findings.iter().cloned()).collect();
    let langs = language_counts(&findings);
    let lang = |l: EmbeddedLanguage| langs.get(&l).copied().unwrap_or(0).to_string();
    let scheme = |x: Scheme| s.scheme_counts.get(&x).copied().unwrap_or(0).to_string();
    let leaks = findings.iter().filter(|f| f.kind == SmellKind::CredentialLeak).count();
    vec![
        app_id.to_string(),
        s.total_urls.to_string(),
        s.distinct_urls.to_string(),
        scheme(Scheme::Http),
        scheme(Scheme::Https),
        scheme(Scheme::Ws),
        scheme(Scheme::Wss),
        format!("{:.2}", round2(s.mean_segments)),
        format!("{:.2}", round2(s.mean_query_pairs)),
        s.fragments_used.to_string(),
        lang(EmbeddedLanguage::Sql),
        lang(EmbeddedLanguage::Javascript),
        lang(EmbeddedLanguage::Html),
        lang(EmbeddedLanguage::Bash),
        lang(EmbeddedLanguage::Php),
        lang(EmbeddedLanguage::Python),
        lang(EmbeddedLanguage::Ruby),
        leaks.to_string(),
        reports.iter().any(|r| r.partial).to_string(),
    ]
}

pub const CORPUS_ROW_ID: &str = "ALL";

/// One row per app and a final corpus row.
pub fn render_csv(reports: &[AppReport]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in reports {
        w.write_record(csv_row(&r.app_id, &r.stats(), &[r]))
            .expect("in-memory write");
    }
    let refs: Vec<&AppReport> = reports.iter().collect();
    w.write_record(csv_row(CORPUS_ROW_ID, &corpus_stats(reports), &refs))
        .expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("csv is utf-8")
}
