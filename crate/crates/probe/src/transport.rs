use std::io::Read;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Serialize;
use url::Url;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NetErrorKind {
    Timeout,
    Dns,
    Tls,
    Refused,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind:?}: {message}")]
pub struct NetError {
    pub kind: NetErrorKind,
    pub message: String,
}

impl NetError {
    pub fn new(kind: NetErrorKind, message: impl Into<String>) -> Self {
        NetError {
            kind,
            message: message.into(),
        }
    }

    pub fn from_io(e: &std::io::Error) -> Self {
        use std::io::ErrorKind as K;
        let kind = match e.kind() {
            K::TimedOut | K::WouldBlock => NetErrorKind::Timeout,
            K::ConnectionRefused => NetErrorKind::Refused,
            _ => NetErrorKind::Other,
        };
        NetError::new(kind, e.to_string())
    }
}

/// A single GET. Transports never follow redirects themselves.
#[derive(Debug, Clone, Copy)]
pub struct Request<'a> {
    pub url: &'a Url,
    pub user_agent: &'a str,
    pub timeout: Duration,
    pub body_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawResponse {
    pub status: u16,
    pub headers: Vec<(String, String)>,
    /// At most `body_cap` bytes.
    pub body: Vec<u8>,
}

impl RawResponse {
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }
}

pub trait Transport: Send + Sync {
    fn get(&self, req: &Request) -> Result<RawResponse, NetError>;
}

/// Blocking HTTP client with certificate validation on.
pub struct UreqTransport {
    agent: ureq::Agent,
}

impl Default for UreqTransport {
    fn default() -> Self {
        UreqTransport {
            agent: ureq::AgentBuilder::new().redirects(0).build(),
        }
    }
}

fn classify(e: &ureq::Transport) -> NetErrorKind {
    let text = e.to_string().to_ascii_lowercase();
    match e.kind() {
        ureq::ErrorKind::Dns => NetErrorKind::Dns,
        _ if text.contains("certificate") || text.contains("tls") || text.contains("handshake") => NetErrorKind::Tls,
        _ if text.contains("timed out") || text.contains("timeout") => NetErrorKind::Timeout,
        ureq::ErrorKind::ConnectionFailed if text.contains("refused") => NetErrorKind::Refused,
        ureq::ErrorKind::ConnectionFailed => NetErrorKind::Refused,
        _ => NetErrorKind::Other,
    }
}

impl Transport for UreqTransport {
    fn get(&self, req: &Request) -> Result<RawResponse, NetError> {
        let call = self
            .agent
            .request_url("GET", req.url)
            .timeout(req.timeout)
            .set("User-Agent", req.user_agent)
            .set("Accept", "*/*")
            .call();
        let resp = match call {
            Ok(r) => r,
            Err(ureq::Error::Status(_, r)) => r,
            Err(ureq::Error::Transport(t)) => return Err(NetError::new(classify(&t), t.to_string())),
        };
        let status = resp.status();
        let mut headers = Vec::new();
        for name in resp.headers_names() {
            for v in resp.all(&name) {
                headers.push((name.clone(), v.to_string()));
            }
        }
        let mut body = Vec::new();
        resp.into_reader()
            .take(req.body_cap as u64)
            .read_to_end(&mut body)
            .map_err(|e| NetError::from_io(&e))?;
        Ok(RawResponse { status, headers, body })
    }
}

/// Records every request and answers from a fixed response; used to check
/// that no traffic happens when it must not.
#[derive(Default)]
pub struct CountingTransport {
    pub response: RawResponse,
    log: Mutex<Vec<(String, Instant)>>,
}

impl CountingTransport {
    pub fn new(response: RawResponse) -> Self {
        CountingTransport {
            response,
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn count(&self) -> usize {
        self.log.lock().unwrap().len()
    }

    /// (url, time) of each request in the order received.
    pub fn requests(&self) -> Vec<(String, Instant)> {
        self.log.lock().unwrap().clone()
    }
}

impl Transport for CountingTransport {
    fn get(&self, req: &Request) -> Result<RawResponse, NetError> {
        self.log.lock().unwrap().push((req.url.to_string(), Instant::now()));
        Ok(self.response.clone())
    }
}
