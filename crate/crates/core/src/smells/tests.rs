use proptest::prelude::*;

use super::*;
use crate::model::{parse_url, ExtractionSite, LibraryId};
use crate::reconstruct::{Part, PlaceholderKind, StringValue};

/// The table rows as typeset, two columns per row.
const TYPESET: &str = r"Bash 	& sh[ ]+ 	& SQL 	& alter[ ]+table \\
 	& \%.sh 	&  	& create[ ]+.*index \\ \cline{1-2}
HTML 	& \%\textless[ ]*html[ ]*\%\textgreater 	&  	& create[ ]+.*table \\ \cline{1-2}
JavaScript 	& function[\^{}\%(]*\%([\^{}\%)]*\%) 	&  	& create[ ]+.*trigger \\
 	& \%\textless[ ]*script 	&  	& create[ ]+.*view \\
 	& js[ ]*= 	&  	& delete[ ]+from \\ \cline{1-2}
PHP 	& \%\textless\%? 	&  	& drop[ ]+index \\ \cline{1-2}
Python 	& import[ ]+\%(.*\%) 	&  	& drop[ ]+table \\ \cline{1-2}
Ruby 	& require[ ]*\%(.*\%) 	&  	& drop[ ]+trigger \\
	&	&  	& drop[ ]+view \\
	&	&  	& insert[ ]+.*into \\
	&	&  	& replace[ ]+into \\
	&	&  	& select[ ]+.*[ ]+from \\
	&	&  	& update[ ]+.+[ ]+set \\";

fn untypeset(cell: &str) -> String {
    cell.trim()
        .replace(r"\textless", "<")
        .replace(r"\textgreater", ">")
        .replace(r"\^{}", "^")
        .replace(r"\%", r"\")
}

fn typeset_rules() -> Vec<(EmbeddedLanguage, String)> {
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut current = None;
    for row in TYPESET.lines() {
        let row = row.split(r"\\").next().unwrap();
        let cells: Vec<&str> = row.split('&').collect();
        if !cells[0].trim().is_empty() {
            current = EmbeddedLanguage::parse(cells[0]);
        }
        if !cells[1].trim().is_empty() {
            left.push((current.unwrap(), untypeset(cells[1])));
        }
        if !cells[3].trim().is_empty() {
            right.push((EmbeddedLanguage::Sql, untypeset(cells[3])));
        }
    }
    left.extend(right);
    left
}

#[test]
fn runtime_rules_match_table() {
    let runtime: Vec<(EmbeddedLanguage, String)> = RuleSet::default()
        .rules()
        .iter()
        .map(|r| (r.language, r.pattern.clone()))
        .collect();
    assert_eq!(runtime, typeset_rules());
    assert_eq!(runtime.len(), 23);
    assert!(RuleSet::default().rules().iter().all(|r| r.case_insensitive));
}

/// One positive and one negative example per table row, in table order.
pub(crate) const PAIRS: &[(&str, &str)] = &[
    ("bash -c ls; sh -c ls", "shell"),
    ("run ./deploy.sh now", "deploy_sh"),
    ("<html><body>", "<htm>"),
    ("function foo(a, b) { return a; }", "function without parens"),
    ("< script src=x>", "<scrip>"),
    ("js = 1", "json=1"),
    ("<?php echo 1; ?>", "a < b ? c : d"),
    ("import (os)", "import os"),
    ("require('net')", "required field"),
    ("ALTER TABLE users ADD x", "alter the table"),
    ("create unique index ix on t", "index created"),
    ("CREATE TABLE t (a int)", "table create"),
    ("create trigger trg", "trigger created"),
    ("create or replace view v", "view create"),
    ("DELETE FROM users", "delete users"),
    ("drop index ix", "dropindex"),
    ("drop   table users", "droptable users"),
    ("DROP TRIGGER t", "trigger drop"),
    ("drop view v", "dropview v"),
    ("insert into t values (1)", "into insert"),
    ("REPLACE INTO t VALUES (1)", "replaceinto"),
    ("SELECT * FROM weather", "select*from weather"),
    ("update users set a=1", "update set"),
];

#[test]
fn each_rule_has_positive_and_negative() {
    let set = RuleSet::default();
    for (rule, (pos, neg)) in set.rules().iter().zip(PAIRS) {
        assert!(rule.is_match(pos), "{} should match {pos:?}", rule.pattern);
        assert!(!rule.is_match(neg), "{} should not match {neg:?}", rule.pattern);
    }
}

#[test]
fn scan_examples() {
    let langs = |t: &str| {
        scan_embedded_languages(t)
            .into_iter()
            .map(|(l, _)| l)
            .collect::<Vec<_>>()
    };
    assert_eq!(langs("SELECT * FROM weather"), [EmbeddedLanguage::Sql]);
    let html = scan_embedded_languages("<html><body>");
    assert_eq!(html, [(EmbeddedLanguage::Html, 0..6)]);
    assert!(langs("hello world").is_empty());
    assert_eq!(langs("drop   table users"), [EmbeddedLanguage::Sql]);
}

#[test]
fn overlapping_languages_all_reported() {
    let found: Vec<_> = scan_embedded_languages("<script>function f(){}</script><?")
        .into_iter()
        .map(|(l, _)| l)
        .collect();
    assert!(found.contains(&EmbeddedLanguage::Javascript));
    assert!(found.contains(&EmbeddedLanguage::Php));
}

fn url(s: &str) -> WebApiUrl {
    let mut u = parse_url(&StringValue::literal(s)).unwrap();
    u.provenance.push(ExtractionSite::new(LibraryId::OkHttp, "A.java", "A"));
    u
}

fn with_query(key: &str, value: StringValue) -> WebApiUrl {
    let mut v = StringValue::literal(format!("https://a.com/login?{key}="));
    v.append(value);
    let mut u = parse_url(&v).unwrap();
    u.provenance.push(ExtractionSite::new(LibraryId::OkHttp, "A.java", "A"));
    u
}

#[test]
fn credential_examples() {
    let leak = scan_credentials(&[with_query("password", StringValue::literal("hunter2"))], &[]);
    assert_eq!(leak.len(), 1);
    assert_eq!(leak[0].kind, SmellKind::CredentialLeak);
    assert_eq!(leak[0].evidence, "password=hunter2");
    let hidden = StringValue::placeholder(PlaceholderKind::String, Some("pw".into()));
    assert!(scan_credentials(&[with_query("password", hidden)], &[]).is_empty());
    assert!(scan_credentials(&[with_query("page", StringValue::literal("2"))], &[]).is_empty());
    assert_eq!(
        scan_credentials(&[with_query("API_KEY", StringValue::literal("x1"))], &[]).len(),
        1
    );
}

#[test]
fn credential_in_schema() {
    let mut root = JsonNode::object();
    root.put("user".into(), JsonNode::String(StringValue::literal("admin")));
    root.put("token".into(), JsonNode::Placeholder(PlaceholderKind::String));
    let schema = JsonSchema {
        root,
        provenance: ExtractionSite::new(LibraryId::OrgJson, "B.java", "B"),
    };
    let f = scan_credentials(&[], &[schema]);
    assert_eq!(f.len(), 1);
    assert_eq!(f[0].evidence, "user=admin");
}

#[test]
fn transport_examples() {
    assert_eq!(scan_transport(&[url("http://a.com")]).len(), 1);
    assert!(scan_transport(&[url("https://a.com")]).is_empty());
    assert_eq!(scan_transport(&[url("ws://a.com")]).len(), 1);
    assert!(scan_transport(&[url("wss://a.com")]).is_empty());
    let mut assumed = parse_url(&StringValue::from_parts(vec![Part::Literal("a.com/x".into())])).unwrap();
    assumed
        .provenance
        .push(ExtractionSite::new(LibraryId::OkHttp, "A.java", "A"));
    assert!(scan_transport(&[assumed]).is_empty());
}

#[test]
fn report_strings_cover_urls_and_schemas() {
    let rules = RuleSet::default();
    let u = with_query("q", StringValue::literal("select%20*%20from%20t"));
    assert!(scan_report_strings(&rules, &[u], &[]).is_empty());
    let u = url("http://a.com/run?cmd=drop table users");
    let f = scan_report_strings(&rules, &[u], &[]);
    assert_eq!(f.len(), 1);
    assert_eq!(f[0].kind, SmellKind::EmbeddedLanguage(EmbeddedLanguage::Sql));
    assert_eq!(language_counts(&f)[&EmbeddedLanguage::Sql], 1);
}

#[test]
fn evidence_is_truncated_at_both_ends() {
    let long = format!("select {} from t", "x".repeat(500));
    assert_eq!(truncate_evidence(&long).chars().count(), EVIDENCE_LIMIT);
    let f = scan_source_strings(
        &RuleSet::default(),
        std::path::Path::new("A.java"),
        &[(Span::default(), long)],
    );
    assert_eq!(f.len(), 1);
    assert!(f[0].evidence.starts_with("select "));
    assert!(f[0].evidence.ends_with(" from"));
}

fn text() -> impl Strategy<Value = String> {
    let words = prop::sample::select(vec![
        "select", "from", "drop", "table", "<", ">", "html", "script", "?", "(", ")", "function", "js", "=", "sh",
        ".sh", "import", "require", "update", "set", "into", "insert", "create", "view", " ", "  ", "x",
    ]);
    prop::collection::vec(prop_oneof![words.prop_map(str::to_string), "[ -~]{0,6}"], 0..40).prop_map(|v| v.concat())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn evidence_rematches(t in text(), pad in 0usize..300) {
        let t = format!("{}{t}", " ".repeat(pad));
        let rules = RuleSet::table();
        let findings = scan_source_strings(rules, std::path::Path::new("A.java"), &[(Span::default(), t)]);
        for f in findings {
            let SmellKind::EmbeddedLanguage(lang) = f.kind else { unreachable!() };
            prop_assert!(f.evidence.chars().count() <= EVIDENCE_LIMIT);
            prop_assert!(
                rules.rules().iter().any(|r| r.language == lang && r.is_match(&f.evidence)),
                "{:?}", f.evidence
            );
        }
    }

    #[test]
    fn appending_keeps_prefix_findings(a in text(), b in text()) {
        let before = scan_embedded_languages(&a);
        let after = scan_embedded_languages(&format!("{a}{b}"));
        for (lang, _) in &before {
            prop_assert!(after.iter().any(|(l, _)| l == lang));
        }
        let count = |v: &[(EmbeddedLanguage, std::ops::Range<usize>)], l| v.iter().filter(|(x, _)| *x == l).count();
        for l in EmbeddedLanguage::ALL {
            prop_assert!(count(&after, l) >= count(&before, l).min(1));
        }
    }
}
