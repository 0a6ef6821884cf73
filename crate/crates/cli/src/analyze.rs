//! Per-app pipeline: parse, extract, scan. Stops between files once the
//! app's time budget is spent and keeps what it has.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::Serialize;

use apimine_core::extract::{extract_unit, string_literals, CorpusScope, ExtractOptions};
use apimine_core::model::{stats, AggregateStats, JsonSchema, LibraryId, WebApiUrl};
use apimine_core::smells::{
    scan_credentials, scan_report_strings, scan_source_strings, scan_transport, RuleSet, SmellFinding,
};
use apimine_core::source::{parse_bytes, SourceUnit};
use apimine_probe::ServerFinding;

use crate::apps::{declared_dependencies, java_files, AppDir};

#[derive(Debug, Clone)]
pub struct AnalyzeOptions<'a> {
    pub extract: ExtractOptions,
    pub time_budget: Duration,
    pub rules: &'a RuleSet,
    /// Also scan every string literal in the sources for embedded languages.
    pub scan_source_strings: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Timings {
    pub parse: Duration,
    pub extract: Duration,
    pub scan: Duration,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AppReport {
    pub app_id: String,
    pub directory: String,
    pub package: Option<String>,
    pub version: Option<String>,
    pub dependencies: Vec<String>,
    pub libraries: BTreeSet<LibraryId>,
    pub files: usize,
    pub parse_errors: usize,
    pub endpoints: Vec<WebApiUrl>,
    pub schemas: Vec<JsonSchema>,
    pub client_findings: Vec<SmellFinding>,
    pub probe_findings: Vec<ServerFinding>,
    pub partial: bool,
    pub partial_reasons: Vec<String>,
    #[serde(skip)]
    pub timings: Timings,
}

impl AppReport {
    pub fn stats(&self) -> AggregateStats {
        stats(&self.endpoints)
    }
}

/// Path relative to the input root with `/` separators.
pub fn display_path(path: &Path, root: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

pub fn analyze_app(app: &AppDir, root: &Path, opts: &AnalyzeOptions) -> AppReport {
    let start = Instant::now();
    let over = || start.elapsed() > opts.time_budget;
    let mut report = AppReport {
        app_id: app.app_id.clone(),
        directory: app.dir_name.clone(),
        package: app.package.clone(),
        version: app.version.clone(),
        dependencies: declared_dependencies(&app.path),
        libraries: BTreeSet::new(),
        files: 0,
        parse_errors: 0,
        endpoints: Vec::new(),
        schemas: Vec::new(),
        client_findings: Vec::new(),
        probe_findings: Vec::new(),
        partial: false,
        partial_reasons: Vec::new(),
        timings: Timings::default(),
    };

    let files = java_files(&app.path);
    report.files = files.len();
    let mut units: Vec<SourceUnit> = Vec::with_capacity(files.len());
    for (i, f) in files.iter().enumerate() {
        if over() {
            report
                .partial_reasons
                .push(format!("time budget spent after parsing {i} of {} files", files.len()));
            break;
        }
        match std::fs::read(f) {
            Ok(bytes) => units.push(parse_bytes(&bytes, display_path(f, root))),
            Err(e) => report.partial_reasons.push(format!("{}: {e}", display_path(f, root))),
        }
    }
    report.parse_errors = units.iter().map(|u| u.parse_errors.len()).sum();
    report.timings.parse = start.elapsed();

    let t = Instant::now();
    let corpus = CorpusScope::new(&units, opts.extract);
    for (i, u) in units.iter().enumerate() {
        if over() {
            report.partial_reasons.push(format!(
                "time budget spent after extracting {i} of {} files",
                units.len()
            ));
            break;
        }
        let x = extract_unit(u, &corpus);
        if x.budget_exhausted {
            report
                .partial_reasons
                .push(format!("resolution limit reached in {}", u.path.display()));
        }
        report.libraries.extend(x.libraries);
        report.endpoints.extend(x.urls);
        report.schemas.extend(x.schemas);
    }
    report.timings.extract = t.elapsed();

    let t = Instant::now();
    let mut findings = scan_credentials(&report.endpoints, &report.schemas);
    findings.extend(scan_transport(&report.endpoints));
    findings.extend(scan_report_strings(opts.rules, &report.endpoints, &report.schemas));
    if opts.scan_source_strings {
        for u in &units {
            findings.extend(scan_source_strings(opts.rules, &u.path, &string_literals(u)));
        }
    }
    findings.sort_by(|a, b| (&a.location, a.kind, &a.evidence).cmp(&(&b.location, b.kind, &b.evidence)));
    report.client_findings = findings;
    report.timings.scan = t.elapsed();

    report.partial = !report.partial_reasons.is_empty();
    report
}
