use std::path::Path;
use std::time::Duration;

use apimine_core::model::parse_url;
use apimine_core::reconstruct::StringValue;
use apimine_probe::mock::{LoopbackTransport, MockFixture, MockServer};
use apimine_probe::*;
use url::Url;

fn fixture() -> MockFixture {
    MockFixture::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mock_matrix.json")).unwrap()
}

fn enabled() -> ProbeConfig {
    ProbeConfig {
        enabled: true,
        per_host_delay: Duration::ZERO,
        timeout: Duration::from_secs(5),
        ..ProbeConfig::default()
    }
}

fn smells_at(server: &MockServer, scheme: &str, path: &str) -> Vec<ServerSmell> {
    let url = Url::parse(&server.url(scheme, path)).unwrap();
    let r = probe_url(&url, &enabled(), &LoopbackTransport, &Pacer::new(Duration::ZERO)).unwrap();
    assert!(r.error.is_none(), "{r:?}");
    evaluate(&r, None).into_iter().map(|f| f.smell).collect()
}

#[test]
fn each_misconfigured_endpoint_shows_its_smell() {
    let server = MockServer::start(fixture()).unwrap();
    assert_eq!(
        smells_at(&server, "https", "/version"),
        [ServerSmell::VersionDisclosure]
    );
    assert_eq!(
        smells_at(&server, "https", "/error"),
        [ServerSmell::ImplementationDisclosure]
    );
    assert_eq!(
        smells_at(&server, "http", "/plain"),
        [ServerSmell::MissingHttpsRedirect]
    );
    assert_eq!(smells_at(&server, "https", "/nohsts"), [ServerSmell::MissingHsts]);
    assert_eq!(
        smells_at(&server, "https", "/admin/users"),
        [ServerSmell::LackOfAccessControlCandidate]
    );
    assert!(server.requests().iter().all(|r| r.method == "GET"));
}

#[test]
fn hardened_endpoint_is_clean() {
    let server = MockServer::start(fixture()).unwrap();
    assert!(smells_at(&server, "http", "/hardened").is_empty());
    assert!(smells_at(&server, "https", "/secure/hardened").is_empty());
}

#[test]
fn redirect_chain_is_recorded() {
    let server = MockServer::start(fixture()).unwrap();
    let url = Url::parse(&server.url("http", "/hardened")).unwrap();
    let r = probe_url(&url, &enabled(), &LoopbackTransport, &Pacer::new(Duration::ZERO)).unwrap();
    assert_eq!(r.redirect_chain, [(301, server.url("https", "/secure/hardened"))]);
    assert_eq!(r.status, Some(500));
}

#[test]
fn redirect_chain_is_capped() {
    let looping =
        MockFixture::from_json(r#"{"routes":[{"path":"/r","status":302,"headers":[["Location","/r"]]}]}"#).unwrap();
    let server = MockServer::start(looping).unwrap();
    let cfg = ProbeConfig {
        max_redirects: 3,
        ..enabled()
    };
    let url = Url::parse(&server.url("http", "/r")).unwrap();
    let r = probe_url(&url, &cfg, &LoopbackTransport, &Pacer::new(Duration::ZERO)).unwrap();
    assert_eq!(r.redirect_chain.len(), 3);
    assert_eq!(r.status, Some(302));
    assert_eq!(server.requests().len(), 4);
}

#[test]
fn echo_headers_are_kept() {
    let server = MockServer::start(fixture()).unwrap();
    let url = Url::parse(&server.url("https", "/version")).unwrap();
    let r = probe_url(&url, &enabled(), &LoopbackTransport, &Pacer::new(Duration::ZERO)).unwrap();
    assert_eq!(r.status, Some(200));
    assert_eq!(r.header("x-powered-by"), Some("PHP/5.5.23"));
    assert!(r.headers.len() >= 4);
    let seen = &server.requests()[0];
    let ua = seen
        .headers
        .iter()
        .find(|(k, _)| k.eq_ignore_ascii_case("user-agent"))
        .unwrap();
    assert_eq!(ua.1, USER_AGENT);
}

#[test]
fn real_client_against_mock() {
    let server = MockServer::start(fixture()).unwrap();
    let web = parse_url(&StringValue::literal(server.url("http", "/plain?position=<String>"))).unwrap();
    let r = probe(&web, &enabled(), &UreqTransport::default(), &Pacer::new(Duration::ZERO)).unwrap();
    assert_eq!(r.status, Some(200));
    assert_eq!(r.body_snippet, "ok");
    let seen = &server.requests()[0];
    assert_eq!(seen.method, "GET");
    assert!(seen.target.starts_with("/plain?position="));
}

#[test]
fn refused_connection_is_data() {
    let port = {
        let l = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        l.local_addr().unwrap().port()
    };
    let url = Url::parse(&format!("http://127.0.0.1:{port}/x")).unwrap();
    let r = probe_url(&url, &enabled(), &UreqTransport::default(), &Pacer::new(Duration::ZERO)).unwrap();
    assert_eq!(r.error, Some(NetErrorKind::Refused));
    assert!(r.status.is_none());
    assert!(evaluate(&r, None).is_empty());
}

#[test]
fn disabled_sends_nothing() {
    let t = CountingTransport::default();
    let urls: Vec<_> = ["http://127.0.0.1/a", "https://example.com/b"]
        .iter()
        .map(|u| parse_url(&StringValue::literal(*u)).unwrap())
        .collect();
    let cfg = ProbeConfig::default();
    assert!(!cfg.enabled);
    for r in probe_all(&urls, &cfg, &t, 4) {
        assert_eq!(r, Err(PolicyViolation::Disabled));
    }
    assert_eq!(
        probe(&urls[0], &cfg, &t, &Pacer::new(Duration::ZERO)),
        Err(PolicyViolation::Disabled)
    );
    assert_eq!(t.count(), 0);
}

#[test]
fn policy_blocks_without_sending() {
    let t = CountingTransport::default();
    let pacer = Pacer::new(Duration::ZERO);
    let remote = parse_url(&StringValue::literal("https://example.com/b")).unwrap();
    assert!(matches!(
        probe(&remote, &enabled(), &t, &pacer),
        Err(PolicyViolation::NotAllowed(_))
    ));
    let mut hole = StringValue::literal("https://");
    hole.push(apimine_core::reconstruct::Part::Placeholder {
        kind: apimine_core::reconstruct::PlaceholderKind::String,
        source: Some("host".into()),
    });
    let unresolved = parse_url(&hole).unwrap();
    assert!(matches!(
        probe(&unresolved, &enabled(), &t, &pacer),
        Err(PolicyViolation::Unresolved(_))
    ));
    assert_eq!(t.count(), 0);
    let allowed = ProbeConfig {
        allowlist: vec!["*.example.com".into(), "example.com".into()],
        ..enabled()
    };
    assert!(probe(&remote, &allowed, &t, &pacer).is_ok());
    assert_eq!(t.count(), 1);
}

#[test]
fn batch_paces_each_host() {
    let t = CountingTransport::new(RawResponse {
        status: 200,
        ..RawResponse::default()
    });
    let delay = Duration::from_millis(30);
    let cfg = ProbeConfig {
        per_host_delay: delay,
        ..enabled()
    };
    let urls: Vec<_> = [
        "http://127.0.0.1/a",
        "http://localhost/b",
        "http://127.0.0.1/c",
        "http://localhost/d",
        "http://127.0.0.1/e",
    ]
    .iter()
    .map(|u| parse_url(&StringValue::literal(*u)).unwrap())
    .collect();
    let results = probe_all(&urls, &cfg, &t, 4);
    assert!(results.iter().all(|r| r.as_ref().is_ok_and(|r| r.status == Some(200))));
    let log = t.requests();
    assert_eq!(log.len(), 5);
    for host in ["127.0.0.1", "localhost"] {
        let times: Vec<_> = log.iter().filter(|(u, _)| u.contains(host)).map(|(_, t)| *t).collect();
        for w in times.windows(2) {
            assert!(w[1] - w[0] >= delay - Duration::from_millis(1), "{:?}", w[1] - w[0]);
        }
    }
}
