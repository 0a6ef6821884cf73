use regex::Regex;
use serde::Serialize;
use url::Url;

use apimine_core::smells::SENSITIVE_KEYS;

use crate::ProbeResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ServerSmell {
    ImplementationDisclosure,
    VersionDisclosure,
    LackOfAccessControlCandidate,
    MissingHttpsRedirect,
    MissingHsts,
}

impl ServerSmell {
    pub fn note(self) -> &'static str {
        match self {
            ServerSmell::ImplementationDisclosure => "error details reveal implementation internals",
            ServerSmell::VersionDisclosure => "software versions can be looked up for known vulnerabilities",
            ServerSmell::LackOfAccessControlCandidate => {
                "sensitive-looking resource served without authentication; needs manual review"
            }
            ServerSmell::MissingHttpsRedirect => "plain HTTP is served without a redirect to HTTPS",
            ServerSmell::MissingHsts => "clients are not told to stay on HTTPS",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ServerFinding {
    pub smell: ServerSmell,
    pub url: String,
    pub evidence: String,
    pub note: &'static str,
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub version_headers: Vec<String>,
    pub disclosure_patterns: Vec<Regex>,
    pub sensitive_path_tokens: Vec<String>,
    pub auth_query_keys: Vec<String>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        let patterns = [
            r"at [A-Za-z_$][\w$]*(\.[\w$]+)+\(",
            r"Exception",
            r"Traceback \(most recent call last\)",
            r"Fatal error:.*on line",
        ];
        let mut auth: Vec<String> = SENSITIVE_KEYS.iter().map(|s| s.to_string()).collect();
        auth.extend(["auth", "access_token", "session", "signature"].map(String::from));
        EvalConfig {
            version_headers: ["engine", "server", "x-aspnet-version", "x-powered-by"]
                .map(String::from)
                .to_vec(),
            disclosure_patterns: patterns.iter().map(|p| Regex::new(p).expect("valid pattern")).collect(),
            sensitive_path_tokens: ["user", "account", "admin", "transaction", "location", "sql"]
                .map(String::from)
                .to_vec(),
            auth_query_keys: auth,
        }
    }
}

fn version_token() -> &'static Regex {
    static RE: std::sync::OnceLock<Regex> = std::sync::OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(^|[/ ])\d").expect("valid pattern"))
}

fn hsts_ok(value: &str) -> bool {
    value.split(';').any(|d| {
        let d = d.trim();
        d.len() > 8
            && d[..8].eq_ignore_ascii_case("max-age=")
            && d[8..].trim_matches('"').parse::<u64>().is_ok_and(|n| n >= 1)
    })
}

pub fn evaluate(result: &ProbeResult, paired_https: Option<&ProbeResult>) -> Vec<ServerFinding> {
    evaluate_with(result, paired_https, &EvalConfig::default())
}

/// Checks one probe result. Without a response (connection-level error)
/// nothing can be judged and no finding is produced.
pub fn evaluate_with(result: &ProbeResult, paired_https: Option<&ProbeResult>, cfg: &EvalConfig) -> Vec<ServerFinding> {
    let mut out = Vec::new();
    let Some(status) = result.status else { return out };
    let Ok(url) = Url::parse(&result.url) else { return out };
    let mut push = |smell: ServerSmell, evidence: String| {
        out.push(ServerFinding {
            smell,
            url: result.url.clone(),
            evidence,
            note: smell.note(),
        })
    };

    for (k, v) in &result.headers {
        if cfg.version_headers.iter().any(|h| h.eq_ignore_ascii_case(k)) && version_token().is_match(v) {
            push(ServerSmell::VersionDisclosure, format!("{k}: {v}"));
        }
    }

    if let Some(m) = cfg
        .disclosure_patterns
        .iter()
        .find_map(|p| p.find(&result.body_snippet))
    {
        push(ServerSmell::ImplementationDisclosure, m.as_str().to_string());
    }

    match url.scheme() {
        "http" => {
            let host = url.host_str();
            let upgraded = result
                .redirect_chain
                .iter()
                .any(|(_, loc)| Url::parse(loc).is_ok_and(|l| l.scheme() == "https" && l.host_str() == host));
            if !upgraded {
                let evidence = match paired_https.and_then(|p| p.status) {
                    Some(s) => format!("{status} over http; https answers {s}"),
                    None => format!("{status} over http"),
                };
                push(ServerSmell::MissingHttpsRedirect, evidence);
            }
        }
        "https" if !result.header("strict-transport-security").is_some_and(hsts_ok) => {
            push(
                ServerSmell::MissingHsts,
                format!("{status} without Strict-Transport-Security"),
            );
        }
        _ => {}
    }

    if status == 200 && result.header("www-authenticate").is_none() {
        let auth_query = url
            .query_pairs()
            .any(|(k, _)| cfg.auth_query_keys.iter().any(|a| a.eq_ignore_ascii_case(&k)));
        let path = url.path().to_ascii_lowercase();
        let token = cfg
            .sensitive_path_tokens
            .iter()
            .find(|t| path.contains(&t.to_ascii_lowercase()));
        if let (false, Some(t)) = (auth_query, token) {
            push(
                ServerSmell::LackOfAccessControlCandidate,
                format!("200 without authentication on path containing `{t}`"),
            );
        }
    }
    out
}
