//! Corpus runner: discovers apps, analyzes them on a bounded pool, probes
//! if asked to, and writes the reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use thiserror::Error;

use apimine_core::extract::ExtractOptions;
use apimine_core::model::{parse_url, Scheme};
use apimine_core::reconstruct::StringValue;
use apimine_core::smells::{RuleError, RuleSet};
use apimine_probe::{
    evaluate, https_counterpart, probe_all, target, ProbeConfig, ProbeResult, Transport, UreqTransport,
};

use crate::analyze::{analyze_app, AnalyzeOptions, AppReport};
use crate::apps::discover;
use crate::report::{render_corpus, render_csv, render_structured, render_text};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Text,
    Structured,
    Csv,
}

impl Format {
    pub const ALL: [Format; 3] = [Format::Text, Format::Structured, Format::Csv];
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input_root: PathBuf,
    pub output_dir: PathBuf,
    pub formats: Vec<Format>,
    pub time_budget: Duration,
    pub resolution_limit: usize,
    pub probe: ProbeConfig,
    pub parallelism: usize,
    pub rules: Option<PathBuf>,
    pub corpus_candidates: bool,
    pub scan_source_strings: bool,
}

impl RunConfig {
    pub fn new(input_root: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            input_root: input_root.into(),
            output_dir: output_dir.into(),
            formats: Format::ALL.to_vec(),
            time_budget: Duration::from_secs(30 * 60),
            resolution_limit: 15,
            probe: ProbeConfig::default(),
            parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
            rules: None,
            corpus_candidates: false,
            scan_source_strings: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("input directory `{0}` does not exist or is not a directory")]
    MissingInput(PathBuf),
    #[error("time budget must be greater than zero")]
    ZeroBudget,
    #[error("resolution limit must be greater than zero")]
    ZeroResolutionLimit,
    #[error("cannot load rules: {0}")]
    Rules(#[from] RuleError),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl RunError {
    fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> RunError {
        let context = context.into();
        move |source| RunError::Io { context, source }
    }
}

#[derive(Debug)]
pub struct RunSummary {
    pub reports: Vec<AppReport>,
    pub dropped: Vec<String>,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.reports.iter().any(|r| r.partial) {
            2
        } else {
            0
        }
    }
}

/// Exit code for a finished or failed run.
pub fn exit_code(result: &Result<RunSummary, RunError>) -> i32 {
    match result {
        Ok(s) => s.exit_code(),
        Err(_) => 1,
    }
}

pub fn run(cfg: &RunConfig) -> Result<RunSummary, RunError> {
    let transport = UreqTransport::default();
    run_with(cfg, &transport)
}

pub fn run_with(cfg: &RunConfig, transport: &(dyn Transport + Sync)) -> Result<RunSummary, RunError> {
    if !cfg.input_root.is_dir() {
        return Err(RunError::MissingInput(cfg.input_root.clone()));
    }
    if cfg.time_budget.is_zero() {
        return Err(RunError::ZeroBudget);
    }
    if cfg.resolution_limit == 0 {
        return Err(RunError::ZeroResolutionLimit);
    }
    let loaded;
    let rules = match &cfg.rules {
        Some(p) => {
            loaded = RuleSet::load(p)?;
            &loaded
        }
        None => RuleSet::table(),
    };
    let (apps, dropped) = discover(&cfg.input_root).map_err(RunError::io(cfg.input_root.display().to_string()))?;

    let opts = AnalyzeOptions {
        extract: ExtractOptions {
            resolution_limit: cfg.resolution_limit,
            corpus_candidates: cfg.corpus_candidates,
            ..ExtractOptions::default()
        },
        time_budget: cfg.time_budget,
        rules,
        scan_source_strings: cfg.scan_source_strings,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism.max(1))
        .build()?;
    let mut reports: Vec<AppReport> = pool.install(|| {
        apps.par_iter()
            .map(|a| analyze_app(a, &cfg.input_root, &opts))
            .collect()
    });

    if cfg.probe.enabled {
        probe_reports(&mut reports, &cfg.probe, transport, cfg.parallelism);
    }

    write_outputs(cfg, &reports, &dropped)?;
    Ok(RunSummary { reports, dropped })
}

/// Probes every distinct probe-able endpoint once, plus the https
/// counterpart of each http endpoint, and files the findings under every
/// app that uses the endpoint.
fn probe_reports(reports: &mut [AppReport], cfg: &ProbeConfig, transport: &(dyn Transport + Sync), workers: usize) {
    let mut targets: BTreeMap<String, ()> = BTreeMap::new();
    for r in reports.iter() {
        for u in &r.endpoints {
            if !matches!(u.scheme, Scheme::Http | Scheme::Https) {
                continue;
            }
            let Ok(t) = target(u) else { continue };
            if let Some(h) = https_counterpart(&t) {
                targets.insert(h.to_string(), ());
            }
            targets.insert(t.to_string(), ());
        }
    }
    let list: Vec<String> = targets.into_keys().collect();
    let urls: Vec<_> = list
        .iter()
        .filter_map(|s| parse_url(&StringValue::literal(s.clone())).ok())
        .collect();
    let results: BTreeMap<String, ProbeResult> = probe_all(&urls, cfg, transport, workers)
        .into_iter()
        .zip(&list)
        .filter_map(|(r, s)| r.ok().map(|r| (s.clone(), r)))
        .collect();

    for r in reports.iter_mut() {
        let mut findings = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for u in &r.endpoints {
            let Ok(t) = target(u) else { continue };
            if !seen.insert(t.to_string()) {
                continue;
            }
            let Some(res) = results.get(t.as_str()) else { continue };
            let paired = https_counterpart(&t).and_then(|h| results.get(h.as_str()));
            findings.extend(evaluate(res, paired));
        }
        findings.sort_by(|a, b| (&a.url, a.smell).cmp(&(&b.url, b.smell)));
        r.probe_findings = findings;
    }
}

fn file_stem(app_id: &str) -> String {
    app_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn write(path: &Path, text: &str) -> Result<(), RunError> {
    std::fs::write(path, text).map_err(RunError::io(path.display().to_string()))
}

fn write_outputs(cfg: &RunConfig, reports: &[AppReport], dropped: &[String]) -> Result<(), RunError> {
    let out = &cfg.output_dir;
    std::fs::create_dir_all(out).map_err(RunError::io(out.display().to_string()))?;
    for format in &cfg.formats {
        match format {
            Format::Text => {
                let dir = out.join("text");
                std::fs::create_dir_all(&dir).map_err(RunError::io(dir.display().to_string()))?;
                for r in reports {
                    write(&dir.join(format!("{}.txt", file_stem(&r.app_id))), &render_text(r))?;
                }
            }
            Format::Structured => {
                let dir = out.join("structured");
                std::fs::create_dir_all(&dir).map_err(RunError::io(dir.display().to_string()))?;
                for r in reports {
                    write(
                        &dir.join(format!("{}.json", file_stem(&r.app_id))),
                        &render_structured(r),
                    )?;
                }
                write(&out.join("corpus.json"), &render_corpus(reports, dropped))?;
            }
            Format::Csv => write(&out.join("stats.csv"), &render_csv(reports))?,
        }
    }
    Ok(())
}
