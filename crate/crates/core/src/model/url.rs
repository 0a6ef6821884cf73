use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::{ExtractionSite, HttpMethod};
use crate::reconstruct::{Part, StringValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Http,
    Https,
    Ws,
    Wss,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Http, Scheme::Https, Scheme::Ws, Scheme::Wss];

    pub fn parse(s: &str) -> Option<Scheme> {
        Some(match s.to_ascii_lowercase().as_str() {
            "http" => Scheme::Http,
            "https" => Scheme::Https,
            "ws" => Scheme::Ws,
            "wss" => Scheme::Wss,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Http => "http",
            Scheme::Https => "https",
            Scheme::Ws => "ws",
            Scheme::Wss => "wss",
        }
    }

    pub fn is_secure(self) -> bool {
        matches!(self, Scheme::Https | Scheme::Wss)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Endpoint {
    pub path_segments: Vec<StringValue>,
    pub queries: Vec<(StringValue, StringValue)>,
    pub fragments: Vec<StringValue>,
    pub http_methods: BTreeSet<HttpMethod>,
    /// Path contains a `{name}` template segment.
    pub parameterized: bool,
}

impl Endpoint {
    pub fn path(&self) -> String {
        join(&self.path_segments, "/")
    }

    fn is_resolved(&self) -> bool {
        self.path_segments.iter().all(StringValue::is_resolved)
            && self.queries.iter().all(|(k, v)| k.is_resolved() && v.is_resolved())
            && self.fragments.iter().all(StringValue::is_resolved)
    }

    /// Path, query and fragment part of the URL (everything after the authority).
    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.path_segments {
            out.push('/');
            out.push_str(&s.render_url());
        }
        for (i, (k, v)) in self.queries.iter().enumerate() {
            out.push(if i == 0 { '?' } else { '&' });
            out.push_str(&k.render_url());
            if !v.is_empty() {
                out.push('=');
                out.push_str(&v.render_url());
            }
        }
        for f in &self.fragments {
            out.push('#');
            out.push_str(&f.render_url());
        }
        out
    }

    fn identity_key(&self) -> String {
        let path: Vec<String> = self.path_segments.iter().map(StringValue::identity_key).collect();
        let mut keys: Vec<String> = self.queries.iter().map(|(k, _)| k.identity_key()).collect();
        keys.sort();
        format!("/{}?{}", path.join("/"), keys.join("&"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WebApiUrl {
    pub scheme: Scheme,
    pub authority: StringValue,
    pub endpoints: Vec<Endpoint>,
    pub provenance: Vec<ExtractionSite>,
    /// Scheme or authority could not be determined.
    pub incomplete: bool,
    /// No scheme was present; `http` was assumed.
    pub scheme_assumed: bool,
}

impl WebApiUrl {
    pub fn new(scheme: Scheme, authority: StringValue) -> Self {
        WebApiUrl {
            scheme,
            authority,
            endpoints: Vec::new(),
            provenance: Vec::new(),
            incomplete: false,
            scheme_assumed: false,
        }
    }

    pub fn base_url(&self) -> String {
        format!("{}://{}", self.scheme, self.authority.render_url())
    }

    /// Full URL of the first endpoint (or the base URL if there is none).
    pub fn render(&self) -> String {
        let mut out = self.base_url();
        if let Some(e) = self.endpoints.first() {
            out.push_str(&e.render());
        }
        out
    }

    pub fn is_resolved(&self) -> bool {
        self.authority.is_resolved() && self.endpoints.iter().all(Endpoint::is_resolved)
    }

    /// Path ends in a static-content extension (`.html`, `.png`, ...).
    pub fn likely_static(&self) -> bool {
        const EXT: [&str; 6] = [".html", ".htm", ".jpg", ".png", ".css", ".js"];
        self.endpoints.iter().any(|e| {
            e.path_segments.last().is_some_and(|s| {
                let last = s.render_url().to_ascii_lowercase();
                EXT.iter().any(|x| last.ends_with(x))
            })
        })
    }

    pub fn dedup_key(&self) -> String {
        let eps: Vec<String> = self.endpoints.iter().map(Endpoint::identity_key).collect();
        format!("{}://{}{}", self.scheme, self.authority.identity_key(), eps.join("|"))
    }

    pub fn sort_key(&self) -> Option<&ExtractionSite> {
        self.provenance.first()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UrlError {
    #[error("scheme `{0}` is not a web scheme")]
    NotWebScheme(String),
    #[error("value has no literal content")]
    Empty,
}

/// A literal character or an opaque placeholder.
#[derive(Clone)]
enum Atom {
    Char(char),
    Hole(Part),
}

fn atoms(value: &StringValue) -> Vec<Atom> {
    let mut out = Vec::new();
    for p in value.parts() {
        match p {
            Part::Literal(s) => out.extend(s.chars().map(Atom::Char)),
            other => out.push(Atom::Hole(other.clone())),
        }
    }
    out
}

fn to_value(atoms: &[Atom]) -> StringValue {
    let mut v = StringValue::new();
    let mut buf = String::new();
    for a in atoms {
        match a {
            Atom::Char(c) => buf.push(*c),
            Atom::Hole(p) => {
                v.push(Part::Literal(std::mem::take(&mut buf)));
                v.push(p.clone());
            }
        }
    }
    v.push(Part::Literal(buf));
    v
}

fn is_char(a: &Atom, set: &[char]) -> bool {
    matches!(a, Atom::Char(c) if set.contains(c))
}

fn split(atoms: &[Atom], sep: char) -> impl Iterator<Item = &[Atom]> {
    atoms.split(move |a| is_char(a, &[sep])).filter(|s| !s.is_empty())
}

/// Splits a reconstructed value into URL components. Delimiters are only
/// recognized inside literal parts.
pub fn parse_url(value: &StringValue) -> Result<WebApiUrl, UrlError> {
    if value.is_empty() || value.is_all_placeholder() {
        return Err(UrlError::Empty);
    }
    let all = atoms(value);
    let start = all
        .iter()
        .position(|a| !is_char(a, &[' ', '\t', '\n', '\r']))
        .unwrap_or(all.len());
    let end = all
        .iter()
        .rposition(|a| !is_char(a, &[' ', '\t', '\n', '\r']))
        .map_or(start, |i| i + 1);
    let mut rest = &all[start..end];
    if rest.is_empty() {
        return Err(UrlError::Empty);
    }

    let mut scheme = None;
    let mut scheme_assumed = false;
    let lead: String = rest
        .iter()
        .map_while(|a| match a {
            Atom::Char(c) if c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.') => Some(*c),
            _ => None,
        })
        .collect();
    let after_lead = &rest[lead.chars().count()..];
    let starts_alpha = lead.chars().next().is_some_and(|c| c.is_ascii_alphabetic());
    if starts_alpha && after_lead.first().is_some_and(|a| is_char(a, &[':'])) {
        let has_slashes = after_lead.len() >= 3 && is_char(&after_lead[1], &['/']) && is_char(&after_lead[2], &['/']);
        let port_follows = matches!(after_lead.get(1), Some(Atom::Char(c)) if c.is_ascii_digit());
        if has_slashes {
            scheme = Some(Scheme::parse(&lead).ok_or_else(|| UrlError::NotWebScheme(lead.to_ascii_lowercase()))?);
            rest = &after_lead[3..];
        } else if !port_follows {
            return Err(UrlError::NotWebScheme(lead.to_ascii_lowercase()));
        }
    }
    if scheme.is_none() {
        scheme_assumed = true;
        if rest.len() >= 2 && is_char(&rest[0], &['/']) && is_char(&rest[1], &['/']) {
            rest = &rest[2..];
        }
    }

    let auth_end = rest
        .iter()
        .position(|a| is_char(a, &['/', '?', '#']))
        .unwrap_or(rest.len());
    let authority = to_value(&rest[..auth_end]);
    rest = &rest[auth_end..];

    let path_end = rest.iter().position(|a| is_char(a, &['?', '#'])).unwrap_or(rest.len());
    let path_segments: Vec<StringValue> = split(&rest[..path_end], '/').map(to_value).collect();
    rest = &rest[path_end..];

    let mut queries = Vec::new();
    if rest.first().is_some_and(|a| is_char(a, &['?'])) {
        let q_end = rest.iter().position(|a| is_char(a, &['#'])).unwrap_or(rest.len());
        for pair in split(&rest[1..q_end], '&') {
            match pair.iter().position(|a| is_char(a, &['='])) {
                Some(i) => queries.push((to_value(&pair[..i]), to_value(&pair[i + 1..]))),
                None => queries.push((to_value(pair), StringValue::new())),
            }
        }
        rest = &rest[q_end..];
    }
    let fragments: Vec<StringValue> = split(rest, '#').map(to_value).collect();

    let parameterized = path_segments.iter().any(|s| {
        let r = s.render_url();
        r.starts_with('{') && r.ends_with('}')
    });
    let incomplete = scheme_assumed || authority.is_empty() || !authority.is_resolved();
    Ok(WebApiUrl {
        scheme: scheme.unwrap_or(Scheme::Http),
        authority,
        endpoints: vec![Endpoint {
            path_segments,
            queries,
            fragments,
            http_methods: BTreeSet::new(),
            parameterized,
        }],
        provenance: Vec::new(),
        incomplete,
        scheme_assumed,
    })
}

/// Collapses URLs with equal (scheme, authority, path, sorted query keys).
/// The first occurrence is kept and absorbs the HTTP methods and
/// provenance of later duplicates.
pub fn dedup(urls: &[WebApiUrl]) -> Vec<WebApiUrl> {
    let mut out: Vec<WebApiUrl> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for u in urls {
        let key = u.dedup_key();
        match index.get(&key) {
            Some(&i) => {
                let rep = &mut out[i];
                for (re, e) in rep.endpoints.iter_mut().zip(&u.endpoints) {
                    re.http_methods.extend(e.http_methods.iter().copied());
                }
                for p in &u.provenance {
                    if !rep.provenance.contains(p) {
                        rep.provenance.push(p.clone());
                    }
                }
            }
            None => {
                index.insert(key, out.len());
                out.push(u.clone());
            }
        }
    }
    out
}

fn join(values: &[StringValue], sep: &str) -> String {
    values.iter().map(StringValue::render_url).collect::<Vec<_>>().join(sep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reconstruct::PlaceholderKind;
    use proptest::prelude::*;

    fn lit(s: &str) -> StringValue {
        StringValue::literal(s)
    }

    fn ph(name: &str) -> StringValue {
        StringValue::placeholder(PlaceholderKind::String, Some(name.into()))
    }

    #[test]
    fn listing_style_url() {
        let v = lit("http://retrofiturl.com/api/loadUsers?position=")
            .concat(ph("p"))
            .concat(lit("#top"));
        let u = parse_url(&v).unwrap();
        assert_eq!(u.scheme, Scheme::Http);
        assert_eq!(u.authority, lit("retrofiturl.com"));
        let e = &u.endpoints[0];
        assert_eq!(e.path_segments, vec![lit("api"), lit("loadUsers")]);
        assert_eq!(e.queries, vec![(lit("position"), ph("p"))]);
        assert_eq!(e.fragments, vec![lit("top")]);
        assert_eq!(u.base_url(), "http://retrofiturl.com");
        assert!(!u.incomplete);
    }

    #[test]
    fn bare_and_bad_schemes() {
        let u = parse_url(&lit("https://a.b")).unwrap();
        let e = &u.endpoints[0];
        assert!(e.path_segments.is_empty() && e.queries.is_empty() && e.fragments.is_empty());
        assert_eq!(
            parse_url(&lit("ftp://x.y/z")),
            Err(UrlError::NotWebScheme("ftp".into()))
        );
        assert_eq!(
            parse_url(&lit("file:///etc")),
            Err(UrlError::NotWebScheme("file".into()))
        );
        assert_eq!(
            parse_url(&lit("mailto:a@b.c")),
            Err(UrlError::NotWebScheme("mailto".into()))
        );
        assert_eq!(parse_url(&ph("u")), Err(UrlError::Empty));
        assert_eq!(parse_url(&lit("")), Err(UrlError::Empty));
    }

    #[test]
    fn missing_scheme_and_placeholder_authority() {
        let u = parse_url(&lit("localhost:8080//a//b")).unwrap();
        assert!(u.scheme_assumed && u.incomplete);
        assert_eq!(u.authority, lit("localhost:8080"));
        assert_eq!(u.endpoints[0].path(), "a/b");
        let u = parse_url(&ph("base").concat(lit("/users/{id}"))).unwrap();
        assert!(u.incomplete);
        assert_eq!(u.authority.render_url(), "<String>");
        assert!(u.endpoints[0].parameterized);
    }

    #[test]
    fn placeholder_never_splits() {
        let v = lit("https://h.io/").concat(ph("seg")).concat(lit("x/y?a&b=#f1##f2"));
        let u = parse_url(&v).unwrap();
        let e = &u.endpoints[0];
        assert_eq!(e.path_segments.len(), 2);
        assert_eq!(e.path_segments[0].render_url(), "<String>x");
        assert_eq!(e.queries, vec![(lit("a"), lit("")), (lit("b"), lit(""))]);
        assert_eq!(e.fragments, vec![lit("f1"), lit("f2")]);
    }

    fn with_site(mut u: WebApiUrl, file: &str) -> WebApiUrl {
        u.provenance
            .push(ExtractionSite::new(super::super::LibraryId::Retrofit, file, "A"));
        u
    }

    #[test]
    fn dedup_examples() {
        let a = with_site(parse_url(&lit("http://a.com/x?k=1")).unwrap(), "A.java");
        let b = with_site(parse_url(&lit("http://a.com/x?k=1")).unwrap(), "B.java");
        let d = dedup(&[a.clone(), b]);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].provenance.len(), 2);
        let c = parse_url(&lit("http://a.com/y")).unwrap();
        assert_eq!(dedup(&[a.clone(), c]).len(), 2);
        let p1 = parse_url(&lit("http://a.com/x?k=").concat(ph("one"))).unwrap();
        let p2 = parse_url(&lit("http://a.com/x?k=").concat(ph("two"))).unwrap();
        assert_eq!(dedup(&[p1, p2]).len(), 1);
    }

    fn url_strategy() -> impl Strategy<Value = WebApiUrl> {
        let word = "[A-Za-z0-9._~-]{1,8}";
        (
            prop::sample::select(Scheme::ALL.to_vec()),
            "[a-z0-9-]{1,10}(\\.[a-z]{2,4}){0,2}(:[0-9]{1,5})?",
            prop::collection::vec(word, 0..5),
            prop::collection::vec((word, "[A-Za-z0-9._~=-]{0,8}"), 0..4),
            prop::collection::vec(word, 0..3),
        )
            .prop_map(|(scheme, host, segs, qs, frags)| {
                let mut u = WebApiUrl::new(scheme, lit(&host));
                u.endpoints.push(Endpoint {
                    parameterized: false,
                    path_segments: segs.iter().map(|s| lit(s)).collect(),
                    queries: qs.iter().map(|(k, v)| (lit(k), lit(v))).collect(),
                    fragments: frags.iter().map(|s| lit(s)).collect(),
                    http_methods: BTreeSet::new(),
                });
                u
            })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(u in url_strategy()) {
            let back = parse_url(&lit(&u.render())).unwrap();
            prop_assert_eq!(back, u);
        }

        #[test]
        fn dedup_is_idempotent(urls in prop::collection::vec(url_strategy(), 0..20)) {
            let mut doubled = urls.clone();
            doubled.extend(urls.iter().cloned());
            let once = dedup(&doubled);
            prop_assert!(once.len() <= doubled.len());
            prop_assert_eq!(dedup(&once), once.clone());
            prop_assert!(once.len() <= urls.len());
        }
    }
}
