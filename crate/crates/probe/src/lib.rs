//! Opt-in prober that sends a single GET to mined URLs and checks the
//! responses for server-side smells. Disabled unless explicitly enabled;
//! non-loopback hosts must be allowlisted.

mod evaluate;
pub mod mock;
mod pacer;
mod transport;

use std::time::Duration;

use serde::Serialize;
use thiserror::Error;
use url::{Host, Url};

use apimine_core::model::WebApiUrl;

pub use evaluate::{evaluate, evaluate_with, EvalConfig, ServerFinding, ServerSmell};
pub use pacer::Pacer;
pub use transport::{CountingTransport, NetError, NetErrorKind, RawResponse, Request, Transport, UreqTransport};

pub const USER_AGENT: &str = concat!("apimine-probe/", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeConfig {
    pub enabled: bool,
    /// Host patterns: `example.com` matches exactly, `*.example.com` matches
    /// any subdomain.
    pub allowlist: Vec<String>,
    pub timeout: Duration,
    pub max_redirects: usize,
    pub per_host_delay: Duration,
    pub user_agent: String,
    pub body_cap: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            enabled: false,
            allowlist: Vec::new(),
            timeout: Duration::from_secs(10),
            max_redirects: 5,
            per_host_delay: Duration::from_secs(1),
            user_agent: USER_AGENT.to_string(),
            body_cap: 64 * 1024,
        }
    }
}

pub fn is_loopback(host: &Host<&str>) -> bool {
    match host {
        Host::Domain(d) => d.eq_ignore_ascii_case("localhost"),
        Host::Ipv4(ip) => ip.is_loopback(),
        Host::Ipv6(ip) => ip.is_loopback() || ip.to_ipv4_mapped().is_some_and(|v4| v4.is_loopback()),
    }
}

fn pattern_matches(pattern: &str, host: &str) -> bool {
    let pattern = pattern.trim().to_ascii_lowercase();
    let host = host.trim_start_matches('[').trim_end_matches(']').to_ascii_lowercase();
    match pattern.strip_prefix("*.") {
        Some(suffix) => host.len() > suffix.len() && host.ends_with(&format!(".{suffix}")),
        None => pattern.trim_start_matches('[').trim_end_matches(']') == host,
    }
}

impl ProbeConfig {
    /// Loopback is always permitted; anything else must match the allowlist.
    pub fn permits(&self, url: &Url) -> bool {
        let Some(host) = url.host() else { return false };
        if is_loopback(&host) {
            return true;
        }
        let name = host.to_string();
        self.allowlist.iter().any(|p| pattern_matches(p, &name))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyViolation {
    #[error("probing is disabled")]
    Disabled,
    #[error("`{0}` has unresolved parts")]
    Unresolved(String),
    #[error("`{0}` is not a valid URL")]
    Invalid(String),
    #[error("host of `{0}` is neither loopback nor allowlisted")]
    NotAllowed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeResult {
    pub url: String,
    pub transport: String,
    pub status: Option<u16>,
    pub headers: Vec<(String, String)>,
    pub body_snippet: String,
    pub redirect_chain: Vec<(u16, String)>,
    pub error: Option<NetErrorKind>,
}

impl ProbeResult {
    fn empty(url: &Url) -> Self {
        ProbeResult {
            url: url.to_string(),
            transport: "http/1.1".into(),
            status: None,
            headers: Vec::new(),
            body_snippet: String::new(),
            redirect_chain: Vec::new(),
            error: None,
        }
    }

    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }
}

fn snippet(body: &[u8], cap: usize) -> String {
    let mut s = String::from_utf8_lossy(&body[..body.len().min(cap)]).into_owned();
    if s.len() > cap {
        let mut end = cap;
        while !s.is_char_boundary(end) {
            end -= 1;
        }
        s.truncate(end);
    }
    s
}

/// The URL that would be requested for `url`: the first endpoint with
/// placeholder values rendered as text.
pub fn target(url: &WebApiUrl) -> Result<Url, PolicyViolation> {
    let text = url.render();
    if url.scheme_assumed || !url.authority.is_resolved() || url.authority.is_empty() {
        return Err(PolicyViolation::Unresolved(text));
    }
    Url::parse(&text).map_err(|_| PolicyViolation::Invalid(text))
}

/// One GET to `url`, following redirects by hand. Network failures are part
/// of the result; only policy failures are errors, and then nothing is sent.
pub fn probe(
    url: &WebApiUrl,
    cfg: &ProbeConfig,
    transport: &dyn Transport,
    pacer: &Pacer,
) -> Result<ProbeResult, PolicyViolation> {
    if !cfg.enabled {
        return Err(PolicyViolation::Disabled);
    }
    let start = target(url)?;
    probe_url(&start, cfg, transport, pacer)
}

pub fn probe_url(
    start: &Url,
    cfg: &ProbeConfig,
    transport: &dyn Transport,
    pacer: &Pacer,
) -> Result<ProbeResult, PolicyViolation> {
    if !cfg.enabled {
        return Err(PolicyViolation::Disabled);
    }
    if !matches!(start.scheme(), "http" | "https") {
        return Err(PolicyViolation::Invalid(start.to_string()));
    }
    if !cfg.permits(start) {
        return Err(PolicyViolation::NotAllowed(start.to_string()));
    }
    let mut result = ProbeResult::empty(start);
    let mut current = start.clone();
    loop {
        pacer.wait(current.host_str().unwrap_or_default());
        let req = Request {
            url: &current,
            user_agent: &cfg.user_agent,
            timeout: cfg.timeout,
            body_cap: cfg.body_cap,
        };
        let resp = match transport.get(&req) {
            Ok(r) => r,
            Err(e) => {
                result.error = Some(e.kind);
                return Ok(result);
            }
        };
        let location = (300..400)
            .contains(&resp.status)
            .then(|| resp.header("location"))
            .flatten()
            .and_then(|l| current.join(l).ok());
        match location {
            Some(next) if result.redirect_chain.len() < cfg.max_redirects => {
                result.redirect_chain.push((resp.status, next.to_string()));
                let allowed = matches!(next.scheme(), "http" | "https") && cfg.permits(&next);
                if !allowed {
                    result.status = Some(resp.status);
                    result.headers = resp.headers;
                    result.body_snippet = snippet(&resp.body, cfg.body_cap);
                    return Ok(result);
                }
                current = next;
            }
            _ => {
                result.status = Some(resp.status);
                result.headers = resp.headers;
                result.body_snippet = snippet(&resp.body, cfg.body_cap);
                return Ok(result);
            }
        }
    }
}

fn host_key(url: &WebApiUrl) -> String {
    target(url)
        .ok()
        .and_then(|u| u.host_str().map(str::to_string))
        .unwrap_or_default()
}

/// Probes a batch: hosts are spread over at most `workers` threads, and the
/// URLs of one host are probed in order on one thread.
pub fn probe_all(
    urls: &[WebApiUrl],
    cfg: &ProbeConfig,
    transport: &(dyn Transport + Sync),
    workers: usize,
) -> Vec<Result<ProbeResult, PolicyViolation>> {
    if !cfg.enabled {
        return urls.iter().map(|_| Err(PolicyViolation::Disabled)).collect();
    }
    let pacer = Pacer::new(cfg.per_host_delay);
    let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
    for (i, u) in urls.iter().enumerate() {
        let h = host_key(u);
        match groups.iter_mut().find(|(k, _)| *k == h) {
            Some((_, v)) => v.push(i),
            None => groups.push((h, vec![i])),
        }
    }
    let workers = workers.max(1).min(groups.len().max(1));
    let mut out: Vec<Option<Result<ProbeResult, PolicyViolation>>> = vec![None; urls.len()];
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let mine: Vec<usize> = groups
                    .iter()
                    .enumerate()
                    .filter(|(g, _)| g % workers == w)
                    .flat_map(|(_, (_, v))| v.iter().copied())
                    .collect();
                let pacer = &pacer;
                s.spawn(move || {
                    mine.into_iter()
                        .map(|i| (i, probe(&urls[i], cfg, transport, pacer)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("probe worker panicked") {
                out[i] = Some(r);
            }
        }
    });
    out.into_iter().map(|r| r.expect("every url probed")).collect()
}

/// The `https` counterpart of an `http` URL.
pub fn https_counterpart(url: &Url) -> Option<Url> {
    if url.scheme() != "http" {
        return None;
    }
    let mut u = url.clone();
    u.set_scheme("https").ok()?;
    if url.port() == Some(80) {
        let _ = u.set_port(None);
    }
    Some(u)
}
