use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, ValueEnum};

use apimine_cli::run::{exit_code, run, Format, RunConfig};
use apimine_probe::ProbeConfig;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Structured,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Structured => Format::Structured,
            FormatArg::Csv => Format::Csv,
        }
    }
}

/// Mines web API endpoints and JSON schemas from Android app sources and
/// flags security smells.
#[derive(Debug, Parser)]
#[command(name = "apimine", version)]
struct Args {
    /// Directory with one subdirectory per app.
    #[arg(long, env = "APIMINE_INPUT")]
    input: PathBuf,

    /// Directory the reports are written to.
    #[arg(long, env = "APIMINE_OUTPUT", default_value = "apimine-out")]
    output: PathBuf,

    /// Report formats to write; all of them when omitted.
    #[arg(long, value_enum, env = "APIMINE_FORMAT", value_delimiter = ',')]
    format: Vec<FormatArg>,

    /// Analysis time per app, in minutes.
    #[arg(long, env = "APIMINE_TIME_BUDGET", default_value_t = 30.0)]
    time_budget: f64,

    /// Maximum resolution steps for one expression.
    #[arg(long, env = "APIMINE_RESOLUTION_LIMIT", default_value_t = 15)]
    resolution_limit: usize,

    /// Send one GET to each resolved endpoint and check the responses.
    #[arg(long, env = "APIMINE_PROBE")]
    probe: bool,

    /// Host pattern that may be probed, `host` or `*.domain`. Loopback is
    /// always allowed.
    #[arg(long, env = "APIMINE_ALLOW_HOST", value_delimiter = ',')]
    allow_host: Vec<String>,

    /// Apps analyzed in parallel.
    #[arg(long, env = "APIMINE_JOBS")]
    jobs: Option<usize>,

    /// Embedded-language rules, one `LANGUAGE<TAB>regex` per line.
    #[arg(long, env = "APIMINE_RULES")]
    rules: Option<PathBuf>,

    /// Guess unresolved names from declarations anywhere in the app.
    #[arg(long, env = "APIMINE_CORPUS_CANDIDATES")]
    corpus_candidates: bool,

    /// Scan every string literal for embedded languages, not just report strings.
    #[arg(long, env = "APIMINE_SCAN_SOURCE_STRINGS")]
    scan_source_strings: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if !(args.time_budget.is_finite() && args.time_budget > 0.0) {
        eprintln!("apimine: --time-budget must be a positive number of minutes");
        return ExitCode::from(1);
    }
    let mut cfg = RunConfig::new(args.input, args.output);
    if !args.format.is_empty() {
        cfg.formats = args.format.into_iter().map(Format::from).collect();
        cfg.formats.sort();
        cfg.formats.dedup();
    }
    cfg.time_budget = Duration::from_secs_f64(args.time_budget * 60.0);
    cfg.resolution_limit = args.resolution_limit;
    cfg.probe = ProbeConfig {
        enabled: args.probe,
        allowlist: args.allow_host,
        ..ProbeConfig::default()
    };
    if let Some(j) = args.jobs {
        cfg.parallelism = j.max(1);
    }
    cfg.rules = args.rules;
    cfg.corpus_candidates = args.corpus_candidates;
    cfg.scan_source_strings = args.scan_source_strings;

    let result = run(&cfg);
    match &result {
        Ok(s) => {
            let partial: Vec<_> = s
                .reports
                .iter()
                .filter(|r| r.partial)
                .map(|r| r.app_id.as_str())
                .collect();
            eprintln!(
                "apimine: {} apps, {} endpoints, reports in {}",
                s.reports.len(),
                s.reports.iter().map(|r| r.endpoints.len()).sum::<usize>(),
                cfg.output_dir.display()
            );
            if !s.dropped.is_empty() {
                eprintln!("apimine: skipped older duplicates: {}", s.dropped.join(", "));
            }
            if !partial.is_empty() {
                eprintln!("apimine: partial results for: {}", partial.join(", "));
            }
        }
        Err(e) => eprintln!("apimine: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
