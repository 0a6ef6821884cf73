//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use walkdir::WalkDir;

use apimine_cli::run::{run, run_with, RunConfig, RunSummary};
use apimine_core::extract::{extract_unit, CorpusScope, ExtractOptions};
use apimine_core::model::{dedup, parse_url, LibraryId, WebApiUrl};
use apimine_core::reconstruct::{
    jaro_winkler, ResolutionBudget, SimilarityConfig, StringValue, DEFAULT_MAX_ITERATIONS,
};
use apimine_core::smells::{EmbeddedLanguage, RuleSet};
use apimine_core::source::parse_unit;
use apimine_probe::mock::{LoopbackTransport, MockFixture, MockServer};
use apimine_probe::{evaluate, probe, probe_all, CountingTransport, Pacer, ProbeConfig, ServerSmell};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn corpus_run(out: &Path) -> RunSummary {
    let cfg = RunConfig {
        parallelism: 4,
        ..RunConfig::new(fixtures().join("corpus"), out)
    };
    run(&cfg).expect("corpus run")
}

fn tsv(name: &str) -> Vec<Vec<String>> {
    std::fs::read_to_string(fixtures().join(name))
        .unwrap()
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

const LISTING_1: &str = concat!(
    "Path: \n",
    "retrofit_users/src/UserService.java\n",
    "Library: \n",
    "com.squareup.retrofit\n",
    "Scheme: \n",
    "http://\n",
    "Authority: \n",
    "retrofiturl.com\n",
    "Base URL: \n",
    "http://retrofiturl.com\n",
    "Endpoints: \n",
    "    Path: api/loadUsers\n",
    "    Queries: \n",
    "        Query key: position, query value: <String>\n",
    "        Query key: order, query value: <String>\n",
    "    Fragments: \n",
    "    HTTP Methods: \n",
    "        HTTP Method: GET\n",
);

const LISTING_2_OBJECT: &str = r#"{"address":{"street":"<STRING>","number":<NUMBER_INT>},"name":"Bob"}"#;

fn listing_fidelity() {
    let out = tempfile::tempdir().unwrap();
    corpus_run(out.path());
    let text = std::fs::read_to_string(out.path().join("text/com.example.retrofitusers.txt")).unwrap();
    assert_eq!(text, LISTING_1);

    let moshi = std::fs::read_to_string(out.path().join("text/com.example.moshiprofile.txt")).unwrap();
    let expected = format!(
        "Path: \nmoshi_profile/src/User.java\nLibrary: \ncom.squareup.moshi\nJSON Object: \n{LISTING_2_OBJECT}\n"
    );
    assert_eq!(moshi, expected);
    assert!(moshi.contains("<STRING>") && !moshi.contains("<String>"));
    assert!(text.contains("<String>") && !text.contains("<STRING>"));
}

fn method_label(u: &WebApiUrl) -> String {
    let methods: Vec<String> = u.endpoints[0].http_methods.iter().map(|m| m.to_string()).collect();
    if methods.is_empty() {
        "-".into()
    } else {
        methods.join(",")
    }
}

fn extraction_recall() {
    let out = tempfile::tempdir().unwrap();
    let summary = corpus_run(out.path());
    assert!(summary.reports.len() >= 20, "{} apps", summary.reports.len());

    let truth: BTreeMap<(String, String, String), String> = tsv("ground_truth.tsv")
        .into_iter()
        .map(|r| ((r[0].clone(), r[1].clone(), r[3].clone()), r[2].clone()))
        .collect();
    assert!(truth.len() >= 40, "{} planted endpoints", truth.len());

    let mut found: BTreeMap<(String, String, String), String> = BTreeMap::new();
    let mut records = 0usize;
    for r in &summary.reports {
        for u in &r.endpoints {
            records += 1;
            let lib = u.provenance[0].library.label().to_string();
            found.insert((r.app_id.clone(), lib, u.render()), method_label(u));
        }
    }
    let missing: Vec<_> = truth.keys().filter(|k| !found.contains_key(*k)).collect();
    assert!(missing.is_empty(), "missed planted endpoints: {missing:?}");
    for (k, method) in &truth {
        assert_eq!(&found[k], method, "method of {k:?}");
    }
    let extra: Vec<_> = found.keys().filter(|k| !truth.contains_key(*k)).collect();
    assert!(
        extra.len() * 100 <= records * 5,
        "{} non-planted records of {records}: {extra:?}",
        extra.len()
    );

    let schemas: BTreeSet<(String, String, String)> = tsv("expected_schemas.tsv")
        .into_iter()
        .map(|r| (r[0].clone(), r[1].clone(), r[2].clone()))
        .collect();
    let got: BTreeSet<(String, String, String)> = summary
        .reports
        .iter()
        .flat_map(|r| {
            r.schemas
                .iter()
                .map(|s| (r.app_id.clone(), s.provenance.library.label().to_string(), s.render()))
        })
        .collect();
    assert_eq!(got, schemas);

    let mut covered = BTreeSet::new();
    for row in tsv("planted_libraries.tsv") {
        let report = summary.reports.iter().find(|r| r.app_id == row[0]).unwrap();
        let lib = report
            .libraries
            .iter()
            .find(|l| l.label() == row[1])
            .unwrap_or_else(|| panic!("{} not detected in {}", row[1], row[0]));
        covered.insert(*lib);
    }
    let all = [
        LibraryId::JavaNetUrlConnection,
        LibraryId::JavaNetHttpUrlConnection,
        LibraryId::JavaNetHttpsUrlConnection,
        LibraryId::JavaNetSocket,
        LibraryId::OkHttp,
        LibraryId::Retrofit,
        LibraryId::Volley,
        LibraryId::Glide,
        LibraryId::Ion,
        LibraryId::ApacheHttpclient,
        LibraryId::Loopj,
        LibraryId::OrgJson,
        LibraryId::Gson,
        LibraryId::Moshi,
    ];
    assert_eq!(covered, BTreeSet::from(all));
}

/// Turns the printed notation, where `%` escapes the next character, into
/// the backslash notation of the runtime rules.
fn unescape_percent(pattern: &str) -> String {
    pattern.replace('%', "\\")
}

const REGEX_PAIRS: &[(EmbeddedLanguage, &str, &str)] = &[
    (EmbeddedLanguage::Bash, "sh -c 'rm -rf /tmp/x'", "shell"),
    (EmbeddedLanguage::Bash, "curl http://x/install.sh", "install_sh"),
    (EmbeddedLanguage::Html, "<html><body>", "<htm>"),
    (EmbeddedLanguage::Html, "< HTML >", "html"),
    (
        EmbeddedLanguage::Javascript,
        "function go(a) { return a; }",
        "functional",
    ),
    (EmbeddedLanguage::Javascript, "<script>alert(1)</script>", "<scrip"),
    (EmbeddedLanguage::Javascript, "var js = load()", "json = 1"),
    (EmbeddedLanguage::Php, "<?php echo $x; ?>", "a <= b"),
    (EmbeddedLanguage::Python, "import (sys)", "import sys"),
    (EmbeddedLanguage::Ruby, "require 'x'; require(\"json\")", "requirement"),
    (EmbeddedLanguage::Sql, "SELECT * FROM weather", "select*from weather"),
    (EmbeddedLanguage::Sql, "ALTER TABLE t ADD c int", "altertable"),
    (EmbeddedLanguage::Sql, "CREATE INDEX ix ON t(a)", "index"),
    (EmbeddedLanguage::Sql, "create table users (id int)", "tablecreate"),
    (EmbeddedLanguage::Sql, "CREATE TRIGGER t AFTER INSERT", "trigger"),
    (EmbeddedLanguage::Sql, "CREATE VIEW v AS SELECT 1", "viewcreate"),
    (EmbeddedLanguage::Sql, "DELETE FROM users WHERE 1", "deletefrom"),
    (EmbeddedLanguage::Sql, "DROP INDEX ix", "dropindex"),
    (EmbeddedLanguage::Sql, "drop table users", "drop the table"),
    (EmbeddedLanguage::Sql, "DROP TRIGGER t", "droptrigger"),
    (EmbeddedLanguage::Sql, "DROP VIEW v", "dropview"),
    (EmbeddedLanguage::Sql, "INSERT INTO t VALUES (1)", "intoinsert"),
    (EmbeddedLanguage::Sql, "REPLACE INTO t VALUES (1)", "replaceinto"),
    (EmbeddedLanguage::Sql, "UPDATE users SET a = 1", "updateset"),
];

fn regex_suite() {
    let runtime = RuleSet::table();
    let text = std::fs::read_to_string(fixtures().join("embedded_languages_table.tsv")).unwrap();
    let transcribed: Vec<(EmbeddedLanguage, String)> = text
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (lang, pat) = l.split_once('\t').unwrap();
            (EmbeddedLanguage::parse(lang).unwrap(), unescape_percent(pat))
        })
        .collect();
    let live: Vec<(EmbeddedLanguage, String)> = runtime
        .rules()
        .iter()
        .map(|r| (r.language, r.pattern.clone()))
        .collect();
    assert_eq!(live, transcribed, "runtime rules differ from the table transcription");

    let (mut positives, mut negatives) = (0, 0);
    for rule in runtime.rules() {
        let covered = REGEX_PAIRS
            .iter()
            .any(|(l, pos, neg)| *l == rule.language && rule.is_match(pos) && !rule.is_match(neg));
        assert!(covered, "no positive/negative pair for {}", rule.pattern);
    }
    for (lang, pos, neg) in REGEX_PAIRS {
        let hits: BTreeSet<EmbeddedLanguage> = runtime.scan(pos).iter().map(|m| m.language).collect();
        assert!(hits.contains(lang), "{pos:?} should be {lang}");
        positives += 1;
        let neg_hits: Vec<_> = runtime
            .rules()
            .iter()
            .filter(|r| r.language == *lang && r.is_match(neg))
            .map(|r| r.pattern.clone())
            .collect();
        assert!(neg_hits.is_empty(), "{neg:?} matched {neg_hits:?}");
        negatives += 1;
    }
    assert!(positives >= 15 && negatives >= 15);
    let sql = runtime.scan("SELECT * FROM weather");
    assert!(sql.iter().any(|m| m.language == EmbeddedLanguage::Sql));
    let html = runtime.scan("<html><body>");
    assert!(html.iter().any(|m| m.language == EmbeddedLanguage::Html));
}

/// Brute-force Jaro-Winkler: every character of `a` scans the whole of
/// `b` and checks the distance itself; transpositions are counted by
/// pairing the k-th matched character of each side.
fn oracle_jaro_winkler(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let longer = a.len().max(b.len()) as i64;
    let reach = (longer / 2 - 1).max(0);
    let mut taken = vec![false; b.len()];
    let mut a_hits = vec![false; a.len()];
    for i in 0..a.len() {
        for j in 0..b.len() {
            let dist = (i as i64 - j as i64).abs();
            if dist <= reach && !taken[j] && a[i] == b[j] {
                taken[j] = true;
                a_hits[i] = true;
                break;
            }
        }
    }
    let sa: Vec<char> = (0..a.len()).filter(|&i| a_hits[i]).map(|i| a[i]).collect();
    let sb: Vec<char> = (0..b.len()).filter(|&j| taken[j]).map(|j| b[j]).collect();
    let m = sa.len();
    if m == 0 {
        return 0.0;
    }
    let mut out_of_order = 0;
    for k in 0..m {
        if sa[k] != sb[k] {
            out_of_order += 1;
        }
    }
    let t = (out_of_order / 2) as f64;
    let mf = m as f64;
    let jaro = (mf / a.len() as f64 + mf / b.len() as f64 + (mf - t) / mf) / 3.0;
    let mut prefix = 0;
    while prefix < 4 && prefix < a.len() && prefix < b.len() && a[prefix] == b[prefix] {
        prefix += 1;
    }
    jaro + prefix as f64 * 0.1 * (1.0 - jaro)
}

fn jaro_winkler_oracle() {
    let cfg = SimilarityConfig::default();
    let mut runner = TestRunner::new(Config {
        cases: 10_000,
        failure_persistence: None,
        ..Config::default()
    });
    let word = prop_oneof!["[abc]{0,12}", "[a-zA-Z]{0,12}", "[a-f0-9_]{0,12}"];
    let count = std::cell::Cell::new(0usize);
    runner
        .run(&(word.clone(), word), |(a, b)| {
            count.set(count.get() + 1);
            let got = jaro_winkler(&a, &b, &cfg);
            let want = oracle_jaro_winkler(&a, &b);
            prop_assert!((got - want).abs() <= 1e-12, "{a:?} {b:?}: {got} vs {want}");
            prop_assert!((jaro_winkler(&b, &a, &cfg) - got).abs() <= 1e-12);
            Ok(())
        })
        .unwrap();
    assert_eq!(count.get(), 10_000);
    let martha = jaro_winkler("MARTHA", "MARHTA", &cfg);
    assert!((martha - 0.9611).abs() <= 1e-4, "{martha}");
}

fn extract_java(src: &str, limit: usize) -> (Vec<WebApiUrl>, bool) {
    let units = vec![parse_unit(src, "T.java")];
    let opts = ExtractOptions {
        resolution_limit: limit,
        ..ExtractOptions::default()
    };
    let corpus = CorpusScope::new(&units, opts);
    let x = extract_unit(&units[0], &corpus);
    (x.urls, x.budget_exhausted)
}

fn reconstruction_defaults() {
    assert_eq!(DEFAULT_MAX_ITERATIONS, 15);
    assert_eq!(ResolutionBudget::default().max_iterations, 15);
    assert_eq!(ExtractOptions::default().resolution_limit, 15);
    assert_eq!(RunConfig::new("in", "out").resolution_limit, 15);

    let numeric = prop_oneof![
        Just("int"),
        Just("long"),
        Just("short"),
        Just("byte"),
        Just("Integer"),
        Just("Long")
    ];
    let name = "q[a-z]{1,6}";
    let mut runner = TestRunner::new(Config {
        cases: 256,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&(numeric, name, any::<bool>()), |(ty, var, as_field)| {
            let flag = format!("{var}Flag");
            let src = if as_field {
                format!(
                    "import java.net.URL;\nclass T {{ {ty} {var}; boolean {flag};\n void m() throws Exception {{ new URL(\"http://h.example/p?n=\" + {var} + \"&b=\" + {flag}); }} }}"
                )
            } else {
                format!(
                    "import java.net.URL;\nclass T {{ void m({ty} {var}, boolean {flag}) throws Exception {{ new URL(\"http://h.example/p?n=\" + {var} + \"&b=\" + {flag}); }} }}"
                )
            };
            let (urls, exhausted) = extract_java(&src, 15);
            prop_assert!(!exhausted);
            prop_assert_eq!(urls.len(), 1);
            prop_assert_eq!(urls[0].render(), "http://h.example/p?n=0&b=true");
            Ok(())
        })
        .unwrap();

    let mut runner = TestRunner::new(Config {
        cases: 128,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&(1usize..8, 1usize..40), |(ring, limit)| {
            let mut fields = String::new();
            for i in 0..ring {
                fields.push_str(&format!("static String f{i} = f{} + \"/s{i}\";\n", (i + 1) % ring));
            }
            let src = format!(
                "import java.net.URL;\nclass T {{\n{fields}void m() throws Exception {{ new URL(\"http://cycle.example/\" + f0); }} }}"
            );
            let start = Instant::now();
            let (urls, exhausted) = extract_java(&src, limit);
            prop_assert!(start.elapsed() < Duration::from_secs(2));
            prop_assert!(exhausted);
            prop_assert_eq!(urls.len(), 1);
            prop_assert!(!urls[0].endpoints[0].path_segments.iter().all(StringValue::is_resolved));
            prop_assert!(urls[0].render().contains("<String>"));
            Ok(())
        })
        .unwrap();

    let (urls, exhausted) = extract_java(
        "import java.net.URL;\nclass T { static String a = b + \"/x\"; static String b = a + \"/y\"; void m() throws Exception { new URL(\"http://c.example/\" + a); } }",
        15,
    );
    assert!(exhausted);
    let segments = urls[0].endpoints[0].path_segments.len();
    assert!(segments <= 16, "{segments} segments");
}

fn url_text() -> impl Strategy<Value = String> {
    let scheme = prop_oneof![Just("http"), Just("https"), Just("ws"), Just("wss")];
    let host = (
        "[a-z][a-z0-9-]{0,8}",
        prop::collection::vec("[a-z]{2,5}", 1..3),
        prop::option::of(1u16..65535),
    )
        .prop_map(|(h, labels, port)| {
            let mut s = format!("{h}.{}", labels.join("."));
            if let Some(p) = port {
                s.push_str(&format!(":{p}"));
            }
            s
        });
    let segments = prop::collection::vec("[A-Za-z0-9_.~-]{1,8}", 0..5);
    let queries = prop::collection::vec(("[a-z_]{1,6}", "[A-Za-z0-9%._-]{1,8}"), 0..4);
    let fragment = prop::option::of("[a-z0-9]{1,6}");
    (scheme, host, segments, queries, fragment).prop_map(|(s, h, segs, qs, f)| {
        let mut u = format!("{s}://{h}");
        for seg in &segs {
            u.push('/');
            u.push_str(seg);
        }
        if !qs.is_empty() {
            let pairs: Vec<String> = qs.iter().map(|(k, v)| format!("{k}={v}")).collect();
            u.push('?');
            u.push_str(&pairs.join("&"));
        }
        if let Some(f) = f {
            u.push('#');
            u.push_str(&f);
        }
        u
    })
}

fn url_round_trip() {
    let mut runner = TestRunner::new(Config {
        cases: 10_000,
        failure_persistence: None,
        ..Config::default()
    });
    let count = std::cell::Cell::new(0usize);
    runner
        .run(&url_text(), |text| {
            count.set(count.get() + 1);
            let u = parse_url(&StringValue::literal(text.clone())).unwrap();
            prop_assert!(!u.incomplete);
            prop_assert_eq!(u.render(), text.clone());
            let again = parse_url(&StringValue::literal(u.render())).unwrap();
            prop_assert_eq!(again, u);
            Ok(())
        })
        .unwrap();
    assert_eq!(count.get(), 10_000);

    let mut runner = TestRunner::new(Config {
        cases: 500,
        failure_persistence: None,
        ..Config::default()
    });
    let corpus = prop::collection::vec((url_text(), 1usize..4), 0..30);
    runner
        .run(&corpus, |items| {
            let urls: Vec<WebApiUrl> = items
                .iter()
                .flat_map(|(t, n)| std::iter::repeat_n(parse_url(&StringValue::literal(t.clone())).unwrap(), *n))
                .collect();
            let once = dedup(&urls);
            prop_assert_eq!(dedup(&once), once.clone());
            let keys: BTreeSet<String> = urls.iter().map(|u| u.dedup_key()).collect();
            prop_assert_eq!(once.len(), keys.len());
            Ok(())
        })
        .unwrap();
}

fn stats_oracle() {
    let out = tempfile::tempdir().unwrap();
    corpus_run(out.path());
    let produced = std::fs::read_to_string(out.path().join("stats.csv")).unwrap();
    let expected = std::fs::read_to_string(fixtures().join("expected_stats.csv")).unwrap();
    let produced: Vec<String> = produced
        .lines()
        .map(|l| l.split(',').take(10).collect::<Vec<_>>().join(","))
        .collect();
    let expected: Vec<&str> = expected.lines().collect();
    assert_eq!(produced, expected);
}

fn probe_matrix() {
    let fixture = MockFixture::load(&fixtures().join("../../../probe/tests/fixtures/mock_matrix.json")).unwrap();
    let server = MockServer::start(fixture).unwrap();
    let cfg = ProbeConfig {
        enabled: true,
        per_host_delay: Duration::ZERO,
        timeout: Duration::from_secs(5),
        ..ProbeConfig::default()
    };
    let pacer = Pacer::new(Duration::ZERO);
    let smells = |scheme: &str, path: &str| -> Vec<ServerSmell> {
        let url = parse_url(&StringValue::literal(server.url(scheme, path))).unwrap();
        let r = probe(&url, &cfg, &LoopbackTransport, &pacer).unwrap();
        let paired = (scheme == "http")
            .then(|| parse_url(&StringValue::literal(server.url("https", path))).unwrap())
            .map(|h| probe(&h, &cfg, &LoopbackTransport, &pacer).unwrap());
        evaluate(&r, paired.as_ref()).into_iter().map(|f| f.smell).collect()
    };
    assert_eq!(smells("https", "/version"), [ServerSmell::VersionDisclosure]);
    assert_eq!(smells("https", "/error"), [ServerSmell::ImplementationDisclosure]);
    assert_eq!(smells("http", "/plain"), [ServerSmell::MissingHttpsRedirect]);
    assert_eq!(smells("https", "/nohsts"), [ServerSmell::MissingHsts]);
    assert_eq!(
        smells("https", "/admin/users"),
        [ServerSmell::LackOfAccessControlCandidate]
    );
    assert!(smells("http", "/hardened").is_empty());
    assert!(smells("https", "/secure/hardened").is_empty());
    assert!(server.requests().iter().all(|r| r.method == "GET"));

    let stub = CountingTransport::default();
    let disabled = ProbeConfig::default();
    assert!(!disabled.enabled);
    let urls: Vec<WebApiUrl> = ["/version", "/plain", "/hardened"]
        .iter()
        .map(|p| parse_url(&StringValue::literal(server.url("http", p))).unwrap())
        .collect();
    assert!(probe_all(&urls, &disabled, &stub, 4).iter().all(Result::is_err));
    let out = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        parallelism: 4,
        ..RunConfig::new(fixtures().join("corpus"), out.path())
    };
    run_with(&cfg, &stub).unwrap();
    assert_eq!(stub.count(), 0);
}

fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file())
        .map(|e| {
            (
                e.path().strip_prefix(root).unwrap().to_path_buf(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn determinism() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = corpus_run(a.path());
    let cfg = RunConfig {
        parallelism: 1,
        ..RunConfig::new(fixtures().join("corpus"), b.path())
    };
    run(&cfg).unwrap();
    let (ta, tb) = (tree(a.path()), tree(b.path()));
    assert!(ta.len() >= first.reports.len() * 2 + 2);
    assert_eq!(ta.keys().collect::<Vec<_>>(), tb.keys().collect::<Vec<_>>());
    for (path, bytes) in &ta {
        assert!(tb[path] == *bytes, "{} differs", path.display());
    }
    assert!(first.reports.iter().all(|r| r.probe_findings.is_empty()));
}

type Criterion = (u8, &'static str, fn(), Option<Duration>);

fn panic_message(e: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = e.downcast_ref::<String>() {
        s.clone()
    } else if let Some(s) = e.downcast_ref::<&str>() {
        s.to_string()
    } else {
        "panicked".into()
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "listing fidelity", listing_fidelity, Some(Duration::from_secs(5))),
        (
            2,
            "extraction recall on fixtures",
            extraction_recall,
            Some(Duration::from_secs(60)),
        ),
        (3, "embedded-language regex suite", regex_suite, None),
        (4, "Jaro-Winkler oracle equivalence", jaro_winkler_oracle, None),
        (5, "reconstruction defaults", reconstruction_defaults, None),
        (6, "URL model round-trip", url_round_trip, None),
        (7, "stats oracle", stats_oracle, None),
        (
            8,
            "server-probe mock matrix",
            probe_matrix,
            Some(Duration::from_secs(10)),
        ),
        (9, "determinism", determinism, None),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check));
        let elapsed = start.elapsed();
        let verdict = match (outcome, limit) {
            (Err(e), _) => Err(panic_message(e.as_ref())),
            (Ok(()), Some(l)) if elapsed > l => Err(format!("took {elapsed:?}, limit {l:?}")),
            (Ok(()), _) => Ok(()),
        };
        match verdict {
            Ok(()) => println!("criterion {n} ({name}): PASS in {:.2}s", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL in {:.2}s: {why}", elapsed.as_secs_f64());
            }
        }
    }
    let _ = std::panic::take_hook();
    if failed > 0 {
        println!("{failed} of 9 acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 9 acceptance criteria passed");
}
