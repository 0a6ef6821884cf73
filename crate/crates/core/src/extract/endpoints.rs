use crate::model::{parse_url, Endpoint, ExtractionSite, Header, HttpMethod, LibraryId, Scheme, UrlError, WebApiUrl};
use crate::reconstruct::{PlaceholderKind, StringValue};
use crate::source::{DeclaredType, Expr, ExprKind, Scope};

use super::walk::{bodies, call_parts, simple, Body};
use super::{retrofit, Ctx};

const APACHE_REQUESTS: &[(&str, Option<HttpMethod>)] = &[
    ("HttpGet", Some(HttpMethod::Get)),
    ("HttpPost", Some(HttpMethod::Post)),
    ("HttpPut", Some(HttpMethod::Put)),
    ("HttpDelete", Some(HttpMethod::Delete)),
    ("HttpPatch", Some(HttpMethod::Patch)),
    ("HttpHead", Some(HttpMethod::Head)),
    ("HttpOptions", None),
];

const LOOPJ_CLIENTS: &[&str] = &["AsyncHttpClient", "SyncHttpClient"];

/// A located URL expression before it is parsed.
struct Found {
    site: ExtractionSite,
    value: StringValue,
}

pub(crate) fn extract(ctx: &Ctx) -> Vec<WebApiUrl> {
    let mut urls = Vec::new();
    for body in bodies(ctx.unit) {
        let mut found = Vec::new();
        from_constructors(ctx, &body, &mut found);
        from_chains(ctx, &body, &mut found);
        found.sort_by_key(|f| f.site.span.start);
        decorate(ctx, &body, &mut found);
        urls.extend(found.into_iter().filter_map(|f| to_url(f.value, f.site)));
    }
    if ctx.has(LibraryId::Retrofit) {
        for ty in &ctx.unit.types {
            urls.extend(retrofit::interface_endpoints(ctx, ty));
        }
    }
    urls
}

/// Parses a reconstructed value into a record for `site`. Values without
/// any literal text still yield an incomplete record; non-web schemes are
/// dropped.
pub(crate) fn to_url(value: StringValue, site: ExtractionSite) -> Option<WebApiUrl> {
    let mut url = match parse_url(&value) {
        Ok(u) => u,
        Err(UrlError::NotWebScheme(_)) => return None,
        Err(UrlError::Empty) => {
            let authority = if value.is_empty() {
                StringValue::placeholder(PlaceholderKind::String, None)
            } else {
                value
            };
            let mut u = WebApiUrl::new(Scheme::Http, authority);
            u.endpoints.push(Endpoint::default());
            u.incomplete = true;
            u.scheme_assumed = true;
            u
        }
    };
    if let Some(m) = site.http_method {
        for e in &mut url.endpoints {
            e.http_methods.insert(m);
        }
    }
    url.provenance.push(site);
    Some(url)
}

fn java_net_lib(ctx: &Ctx) -> Option<LibraryId> {
    [
        LibraryId::JavaNetHttpsUrlConnection,
        LibraryId::JavaNetHttpUrlConnection,
        LibraryId::JavaNetUrlConnection,
    ]
    .into_iter()
    .find(|l| ctx.has(*l))
}

/// False for arguments that are clearly not URL strings (resource ids,
/// numbers, files).
pub(crate) fn maybe_url(e: &Expr, scope: &Scope) -> bool {
    match &e.kind {
        ExprKind::NumberLiteral { .. } | ExprKind::BoolLiteral(_) | ExprKind::NullLiteral => false,
        ExprKind::FieldAccess { .. } => e
            .qualified_name()
            .is_none_or(|q| !(q.starts_with("R.") || q.contains(".R."))),
        ExprKind::NameRef(n) => match scope.lookup(n).map(|d| &d.declared_type) {
            Some(DeclaredType::Object(t)) => matches!(
                t.as_str(),
                "Uri" | "URL" | "URI" | "HttpUrl" | "StringBuilder" | "StringBuffer" | "Object"
            ),
            Some(t) => matches!(t, DeclaredType::String | DeclaredType::Unknown),
            None => true,
        },
        _ => true,
    }
}

fn method_constant(e: &Expr) -> Option<HttpMethod> {
    match &e.kind {
        ExprKind::FieldAccess { name, .. } => HttpMethod::parse(name),
        ExprKind::NumberLiteral { text, .. } => match text.as_str() {
            "0" => Some(HttpMethod::Get),
            "1" => Some(HttpMethod::Post),
            "2" => Some(HttpMethod::Put),
            "3" => Some(HttpMethod::Delete),
            "4" => Some(HttpMethod::Head),
            "7" => Some(HttpMethod::Patch),
            _ => None,
        },
        _ => None,
    }
}

fn is_method_arg(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::FieldAccess { .. } => e.qualified_name().is_some_and(|q| q.contains("Method.")),
        ExprKind::NumberLiteral { .. } => true,
        _ => false,
    }
}

fn header(ctx: &Ctx, scope: &Scope, k: &Expr, v: &Expr) -> Header {
    Header {
        key: ctx.value(k, scope),
        value: ctx.value(v, scope),
    }
}

fn from_constructors(ctx: &Ctx, body: &Body, out: &mut Vec<Found>) {
    let scope = &body.scope;
    for e in &body.exprs {
        let ExprKind::New {
            type_name,
            args,
            body: anon,
        } = &e.kind
        else {
            continue;
        };
        let name = simple(type_name);
        if name == "URL" && (type_name == "java.net.URL" || java_net_lib(ctx).is_some()) {
            let lib = java_net_lib(ctx).unwrap_or(LibraryId::JavaNetUrlConnection);
            if args.first().is_some_and(|a| maybe_url(a, scope)) {
                out.push(Found {
                    site: ctx.site(lib, body, e.span, Some(e)),
                    value: ctx.value(e, scope),
                });
            }
        } else if ctx.has(LibraryId::Volley) && name.ends_with("Request") {
            let (method, rest) = match args.first() {
                Some(a) if is_method_arg(a) => (method_constant(a), &args[1..]),
                _ => (Some(HttpMethod::Get), &args[..]),
            };
            let Some(url) = rest.first().filter(|a| maybe_url(a, scope)) else {
                continue;
            };
            let mut site = ctx.site(LibraryId::Volley, body, e.span, Some(e));
            site.http_method = method;
            if let Some(anon) = anon {
                for m in anon.methods.iter().filter(|m| m.name == "getHeaders") {
                    let mut calls = Vec::new();
                    for s in m.body.iter().flatten() {
                        s.walk_exprs(&mut |x| calls.push(x));
                    }
                    for c in calls {
                        if let Some(("put", [k, v])) = call_parts(c) {
                            site.headers.push(header(ctx, scope, k, v));
                        }
                    }
                }
            }
            out.push(Found {
                site,
                value: ctx.value(url, scope),
            });
        } else if ctx.has(LibraryId::ApacheHttpclient) {
            let Some((_, method)) = APACHE_REQUESTS.iter().find(|(n, _)| *n == name) else {
                continue;
            };
            let Some(url) = args.first().filter(|a| maybe_url(a, scope)) else {
                continue;
            };
            let mut site = ctx.site(LibraryId::ApacheHttpclient, body, e.span, Some(e));
            site.http_method = *method;
            out.push(Found {
                site,
                value: ctx.value(url, scope),
            });
        }
    }
}

/// Calls that configure an OkHttp request, taken from the chain itself and,
/// when the chain starts at a builder variable, from all calls on it.
fn okhttp_calls<'e>(top: &'e Expr, body: &'e Body) -> Vec<&'e Expr> {
    let mut calls = top.call_chain();
    if let ExprKind::NameRef(var) = &top.chain_root().kind {
        if let Some(decl) = body.scope.lookup(var) {
            let extra: Vec<&Expr> = decl
                .invocations
                .iter()
                .flat_map(|i| i.call.call_chain())
                .chain(decl.assignments.iter().flat_map(|a| a.value.call_chain()))
                .collect();
            calls.extend(extra);
        }
    }
    calls
}

fn okhttp_method(calls: &[&Expr]) -> HttpMethod {
    let mut method = HttpMethod::Get;
    for c in calls {
        match call_parts(c) {
            Some(("method", [m, ..])) => {
                if let Some(x) = m.as_str_literal().and_then(HttpMethod::parse) {
                    method = x;
                }
            }
            Some((n, args)) if args.len() <= 1 => {
                if let Some(x) = HttpMethod::parse(n) {
                    method = x;
                }
            }
            _ => {}
        }
    }
    method
}

fn from_chains(ctx: &Ctx, body: &Body, out: &mut Vec<Found>) {
    let scope = &body.scope;
    for top in body.chain_tops() {
        let chain = top.call_chain();
        let root = top.chain_root();
        let root_name = root.qualified_name().unwrap_or_default();

        if ctx.has(LibraryId::OkHttp) {
            if let Some(url_call) = chain.iter().find(|c| matches!(call_parts(c), Some(("url", [_])))) {
                let Some((_, [arg])) = call_parts(url_call) else {
                    unreachable!()
                };
                let calls = okhttp_calls(top, body);
                let mut site = ctx.site(LibraryId::OkHttp, body, url_call.span, Some(url_call));
                site.http_method = Some(okhttp_method(&calls));
                for c in &calls {
                    if let Some(("addHeader" | "header", [k, v])) = call_parts(c) {
                        site.headers.push(header(ctx, scope, k, v));
                    }
                }
                out.push(Found {
                    site,
                    value: ctx.value(arg, scope),
                });
                continue;
            }
        }

        let loader = match simple(&root_name) {
            "Glide" | "GlideApp" if ctx.has(LibraryId::Glide) => Some(LibraryId::Glide),
            "Ion" if ctx.has(LibraryId::Ion) => Some(LibraryId::Ion),
            _ => None,
        };
        if let Some(lib) = loader {
            for c in &chain {
                let (method, url) = match call_parts(c) {
                    Some(("load", [u])) => (HttpMethod::Get, u),
                    Some(("load", [m, u])) if lib == LibraryId::Ion => (
                        m.as_str_literal()
                            .and_then(HttpMethod::parse)
                            .unwrap_or(HttpMethod::Get),
                        u,
                    ),
                    _ => continue,
                };
                if !maybe_url(url, scope) {
                    continue;
                }
                let mut site = ctx.site(lib, body, c.span, Some(c));
                site.http_method = Some(method);
                out.push(Found {
                    site,
                    value: ctx.value(url, scope),
                });
            }
            continue;
        }

        if ctx.has(LibraryId::Loopj) {
            for c in &chain {
                let ExprKind::MethodCall {
                    receiver: Some(recv),
                    name,
                    args,
                } = &c.kind
                else {
                    continue;
                };
                let Some(method) = HttpMethod::parse(name) else {
                    continue;
                };
                if !is_loopj_client(recv, scope) {
                    continue;
                }
                let url = args
                    .iter()
                    .find(|a| !is_context(a, scope))
                    .filter(|a| maybe_url(a, scope));
                let Some(url) = url else { continue };
                let mut site = ctx.site(LibraryId::Loopj, body, c.span, Some(c));
                site.http_method = Some(method);
                out.push(Found {
                    site,
                    value: ctx.value(url, scope),
                });
            }
        }
    }
}

fn is_loopj_client(recv: &Expr, scope: &Scope) -> bool {
    match &recv.kind {
        ExprKind::New { type_name, .. } => LOOPJ_CLIENTS.contains(&simple(type_name)),
        ExprKind::NameRef(n) => scope
            .lookup(n)
            .is_some_and(|d| LOOPJ_CLIENTS.contains(&simple(&d.type_name))),
        ExprKind::FieldAccess { name, .. } => scope
            .lookup_field(name)
            .is_some_and(|d| LOOPJ_CLIENTS.contains(&simple(&d.type_name))),
        _ => false,
    }
}

fn is_context(e: &Expr, scope: &Scope) -> bool {
    match &e.kind {
        ExprKind::NameRef(n) if n == "this" => true,
        ExprKind::FieldAccess { name, .. } if name == "this" => true,
        ExprKind::MethodCall { name, .. } => name.ends_with("Context") || name == "getActivity",
        ExprKind::NameRef(n) => {
            let lower = n.to_ascii_lowercase();
            lower == "context"
                || lower == "ctx"
                || lower == "mcontext"
                || lower == "activity"
                || scope.lookup(n).is_some_and(|d| {
                    let t = simple(&d.type_name);
                    t.ends_with("Context") || t.ends_with("Activity")
                })
        }
        _ => false,
    }
}

/// Attaches `setRequestMethod`, request properties and Apache headers to
/// the nearest preceding site of the matching library in the same body.
fn decorate(ctx: &Ctx, body: &Body, found: &mut [Found]) {
    let scope = &body.scope;
    for e in &body.exprs {
        let ExprKind::MethodCall {
            receiver: Some(recv),
            name,
            args,
        } = &e.kind
        else {
            continue;
        };
        if !matches!(recv.kind, ExprKind::NameRef(_) | ExprKind::FieldAccess { .. }) {
            continue;
        }
        let java_net = |l: LibraryId| {
            matches!(
                l,
                LibraryId::JavaNetUrlConnection
                    | LibraryId::JavaNetHttpUrlConnection
                    | LibraryId::JavaNetHttpsUrlConnection
            )
        };
        let target = |pred: &dyn Fn(LibraryId) -> bool, found: &mut [Found]| -> Option<usize> {
            found
                .iter()
                .rposition(|f| f.site.span.start < e.span.start && pred(f.site.library))
        };
        match (name.as_str(), args.as_slice()) {
            ("setRequestMethod", [m]) => {
                let method = ctx.value(m, scope).as_literal().and_then(HttpMethod::parse);
                if let (Some(method), Some(i)) = (method, target(&java_net, found)) {
                    found[i].site.http_method = Some(method);
                }
            }
            ("setRequestProperty" | "addRequestProperty", [k, v]) => {
                if let Some(i) = target(&java_net, found) {
                    found[i].site.headers.push(header(ctx, scope, k, v));
                }
            }
            ("addHeader" | "setHeader", [k, v]) => {
                if let Some(i) = target(&|l| l == LibraryId::ApacheHttpclient, found) {
                    found[i].site.headers.push(header(ctx, scope, k, v));
                }
            }
            _ => {}
        }
    }
}
