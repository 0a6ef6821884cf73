//! Loopback test harness: a tiny HTTP/1.1 server that serves scripted
//! responses, and a transport that reaches it for both `http` and `https`
//! URLs over plain TCP.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream};
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use serde::Deserialize;
use url::Host;

use crate::transport::{NetError, NetErrorKind, RawResponse, Request, Transport};

/// One scripted reply. `{authority}` in header values and body is replaced
/// by the server's `host:port`.
#[derive(Debug, Clone, Deserialize)]
pub struct MockRoute {
    pub path: String,
    #[serde(default = "ok")]
    pub status: u16,
    #[serde(default)]
    pub headers: Vec<(String, String)>,
    #[serde(default)]
    pub body: String,
}

fn ok() -> u16 {
    200
}

#[derive(Debug, Clone, Deserialize, Default)]
pub struct MockFixture {
    pub routes: Vec<MockRoute>,
}

impl MockFixture {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(std::io::Error::other)
    }

    fn route(&self, target: &str) -> Option<&MockRoute> {
        let path = target.split('?').next().unwrap_or(target);
        self.routes
            .iter()
            .find(|r| r.path == target)
            .or_else(|| self.routes.iter().find(|r| r.path == path))
    }
}

/// A request as seen by the mock.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeenRequest {
    pub method: String,
    pub target: String,
    pub headers: Vec<(String, String)>,
}

pub struct MockServer {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    seen: Arc<Mutex<Vec<SeenRequest>>>,
    handle: Option<JoinHandle<()>>,
}

impl MockServer {
    pub fn start(fixture: MockFixture) -> std::io::Result<Self> {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let addr = listener.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let seen = Arc::new(Mutex::new(Vec::new()));
        let handle = {
            let stop = stop.clone();
            let seen = seen.clone();
            std::thread::spawn(move || {
                for conn in listener.incoming() {
                    if stop.load(Ordering::SeqCst) {
                        break;
                    }
                    if let Ok(stream) = conn {
                        let _ = serve(stream, &fixture, addr, &seen);
                    }
                }
            })
        };
        Ok(MockServer {
            addr,
            stop,
            seen,
            handle: Some(handle),
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self, scheme: &str, path: &str) -> String {
        format!("{scheme}://{}{path}", self.addr)
    }

    pub fn requests(&self) -> Vec<SeenRequest> {
        self.seen.lock().unwrap().clone()
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn serve(
    stream: TcpStream,
    fixture: &MockFixture,
    addr: SocketAddr,
    seen: &Mutex<Vec<SeenRequest>>,
) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let mut parts = line.split_whitespace();
    let method = parts.next().unwrap_or_default().to_string();
    let target = parts.next().unwrap_or("/").to_string();
    let mut headers = Vec::new();
    loop {
        let mut h = String::new();
        if reader.read_line(&mut h)? == 0 || h.trim().is_empty() {
            break;
        }
        if let Some((k, v)) = h.split_once(':') {
            headers.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    seen.lock().unwrap().push(SeenRequest {
        method,
        target: target.clone(),
        headers,
    });

    let authority = addr.to_string();
    let (status, hdrs, body) = match fixture.route(&target) {
        Some(r) => (
            r.status,
            r.headers
                .iter()
                .map(|(k, v)| (k.clone(), v.replace("{authority}", &authority)))
                .collect::<Vec<_>>(),
            r.body.replace("{authority}", &authority),
        ),
        None => (404, Vec::new(), String::new()),
    };
    let mut out = format!("HTTP/1.1 {status} X\r\n");
    for (k, v) in &hdrs {
        out.push_str(&format!("{k}: {v}\r\n"));
    }
    out.push_str(&format!(
        "Content-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    ));
    let mut stream = stream;
    stream.write_all(out.as_bytes())?;
    stream.flush()?;
    let _ = stream.shutdown(Shutdown::Write);
    Ok(())
}

/// Speaks plain HTTP/1.1 to loopback hosts only, whatever the URL scheme.
#[derive(Debug, Default)]
pub struct LoopbackTransport;

impl Transport for LoopbackTransport {
    fn get(&self, req: &Request) -> Result<RawResponse, NetError> {
        let url = req.url;
        let host = url.host().ok_or_else(|| NetError::new(NetErrorKind::Dns, "no host"))?;
        if !crate::is_loopback(&host) {
            return Err(NetError::new(NetErrorKind::Other, "not a loopback host"));
        }
        let ip = match host {
            Host::Domain(_) => "127.0.0.1".to_string(),
            Host::Ipv4(ip) => ip.to_string(),
            Host::Ipv6(ip) => format!("[{ip}]"),
        };
        let port = url.port_or_known_default().unwrap_or(80);
        let addr: SocketAddr = format!("{ip}:{port}")
            .parse()
            .map_err(|_| NetError::new(NetErrorKind::Other, "bad address"))?;
        let mut stream = TcpStream::connect_timeout(&addr, req.timeout).map_err(|e| NetError::from_io(&e))?;
        let io = |e: std::io::Error| NetError::from_io(&e);
        stream.set_read_timeout(Some(req.timeout)).map_err(io)?;
        let mut target = url.path().to_string();
        if let Some(q) = url.query() {
            target.push('?');
            target.push_str(q);
        }
        let head = format!(
            "GET {target} HTTP/1.1\r\nHost: {}\r\nUser-Agent: {}\r\nAccept: */*\r\nConnection: close\r\n\r\n",
            url.authority(),
            req.user_agent
        );
        stream.write_all(head.as_bytes()).map_err(io)?;
        let mut raw = Vec::new();
        stream.read_to_end(&mut raw).map_err(io)?;
        parse_response(&raw, req.body_cap)
    }
}

fn parse_response(raw: &[u8], cap: usize) -> Result<RawResponse, NetError> {
    let bad = || NetError::new(NetErrorKind::Other, "malformed response");
    let split = raw.windows(4).position(|w| w == b"\r\n\r\n").ok_or_else(bad)?;
    let head = String::from_utf8_lossy(&raw[..split]);
    let mut lines = head.split("\r\n");
    let status = lines
        .next()
        .and_then(|l| l.split_whitespace().nth(1))
        .and_then(|s| s.parse().ok())
        .ok_or_else(bad)?;
    let headers = lines
        .filter_map(|l| l.split_once(':'))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect();
    let body = &raw[split + 4..];
    Ok(RawResponse {
        status,
        headers,
        body: body[..body.len().min(cap)].to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn response_parsing() {
        let r = parse_response(b"HTTP/1.1 301 Moved\r\nLocation: /x\r\nA: b: c\r\n\r\nbody", 2).unwrap();
        assert_eq!(r.status, 301);
        assert_eq!(r.header("location"), Some("/x"));
        assert_eq!(r.header("a"), Some("b: c"));
        assert_eq!(r.body, b"bo");
        assert!(parse_response(b"garbage", 10).is_err());
    }

    #[test]
    fn route_lookup_prefers_exact_target() {
        let f = MockFixture::from_json(r#"{"routes":[{"path":"/a"},{"path":"/a?x=1","status":500}]}"#).unwrap();
        assert_eq!(f.route("/a?x=1").unwrap().status, 500);
        assert_eq!(f.route("/a?y=2").unwrap().status, 200);
        assert!(f.route("/b").is_none());
    }
}
