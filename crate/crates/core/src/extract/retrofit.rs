use crate::model::{ExtractionSite, Header, HttpMethod, LibraryId, WebApiUrl};
use crate::reconstruct::{Part, PlaceholderKind, StringValue};
use crate::source::{build_type_scope, Annotation, DeclaredType, Expr, ExprKind, MethodDecl, TypeDecl};

use super::endpoints::to_url;
use super::walk::{bodies, call_parts, class_literal, Body};
use super::Ctx;

/// A `.baseUrl(x)` call and, when it can be paired, the service interface
/// created from the same builder.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrofitBase {
    pub value: StringValue,
    pub interface: Option<String>,
}

const BASE_CALLS: &[&str] = &["baseUrl", "setEndpoint"];

fn created_interface(chain: &[&Expr]) -> Option<String> {
    chain.iter().find_map(|c| match call_parts(c) {
        Some(("create", [arg])) => class_literal(arg).map(str::to_string),
        _ => None,
    })
}

fn root_var(e: &Expr) -> Option<&str> {
    match &e.chain_root().kind {
        ExprKind::NameRef(n) => Some(n),
        _ => None,
    }
}

pub(crate) fn collect_bases(ctx: &Ctx) -> Vec<RetrofitBase> {
    let all: Vec<Body> = bodies(ctx.unit);
    // Builders stored in a variable: (variable, base value).
    let mut stored: Vec<(String, StringValue)> = Vec::new();
    let mut creates: Vec<(String, String)> = Vec::new();
    let mut out = Vec::new();
    for body in &all {
        for top in body.chain_tops() {
            let chain = top.call_chain();
            let iface = created_interface(&chain);
            let base = chain.iter().find_map(|c| match call_parts(c) {
                Some((n, [arg])) if BASE_CALLS.contains(&n) => Some(arg),
                _ => None,
            });
            match (base, iface) {
                (Some(arg), iface) => {
                    let value = ctx.value(arg, &body.scope);
                    match (iface, body.binder(top)) {
                        (None, Some(var)) => stored.push((var.to_string(), value)),
                        (iface, _) => out.push(RetrofitBase {
                            value,
                            interface: iface,
                        }),
                    }
                }
                (None, Some(iface)) => {
                    if let Some(var) = root_var(top) {
                        creates.push((var.to_string(), iface));
                    }
                }
                (None, None) => {}
            }
        }
    }
    for (var, value) in stored {
        let paired: Vec<&String> = creates.iter().filter(|(v, _)| *v == var).map(|(_, i)| i).collect();
        if paired.is_empty() {
            out.push(RetrofitBase { value, interface: None });
            continue;
        }
        for iface in paired {
            out.push(RetrofitBase {
                value: value.clone(),
                interface: Some(iface.clone()),
            });
        }
    }
    out
}

fn bases_for(ctx: &Ctx, iface: &str) -> Vec<StringValue> {
    let all = ctx.corpus.retrofit_bases();
    let pick = |pred: &dyn Fn(&RetrofitBase) -> bool| -> Vec<StringValue> {
        let mut v: Vec<StringValue> = Vec::new();
        for b in all.iter().filter(|b| pred(b)) {
            if !v.contains(&b.value) {
                v.push(b.value.clone());
            }
        }
        v
    };
    let paired = pick(&|b| b.interface.as_deref() == Some(iface));
    if !paired.is_empty() {
        return paired;
    }
    let unpaired = pick(&|b| b.interface.is_none());
    if !unpaired.is_empty() {
        return unpaired;
    }
    pick(&|_| true)
}

fn http_annotation(a: &Annotation) -> Option<(HttpMethod, Option<&Expr>)> {
    match a.simple_name() {
        "HTTP" => {
            let method = a
                .arg("method")
                .and_then(Expr::as_str_literal)
                .and_then(HttpMethod::parse)?;
            Some((method, a.arg("path")))
        }
        name => HttpMethod::parse(name)
            .filter(|_| name.chars().all(|c| c.is_ascii_uppercase()))
            .map(|m| (m, a.value())),
    }
}

fn joined(base: &StringValue, path: StringValue) -> StringValue {
    let base_slash = matches!(base.parts().last(), Some(Part::Literal(s)) if s.ends_with('/'));
    let path_slash = matches!(path.parts().first(), Some(Part::Literal(s)) if s.starts_with('/'));
    let mut out = base.clone();
    match (base_slash, path_slash) {
        (true, true) => {
            let mut parts = path.into_parts();
            if let Some(Part::Literal(s)) = parts.first_mut() {
                s.remove(0);
            }
            out.append(StringValue::from_parts(parts));
        }
        (false, false) if !path.is_empty() => {
            out.push(Part::Literal("/".into()));
            out.append(path);
        }
        _ => out.append(path),
    }
    out
}

fn typed_value(t: &DeclaredType, name: &str) -> StringValue {
    match t {
        DeclaredType::NumberInt | DeclaredType::NumberFloat => StringValue::literal("0"),
        DeclaredType::Boolean => StringValue::literal("true"),
        _ => StringValue::placeholder(PlaceholderKind::String, Some(name.to_string())),
    }
}

/// One record per annotated interface method and applicable base URL.
pub(crate) fn interface_endpoints(ctx: &Ctx, ty: &TypeDecl) -> Vec<WebApiUrl> {
    let scope = build_type_scope(ty);
    let mut out = Vec::new();
    for m in &ty.methods {
        let Some((method, path_expr)) = m.annotations.iter().find_map(http_annotation) else {
            continue;
        };
        let path = path_expr.map(|e| ctx.value(e, &scope)).unwrap_or_default();
        let mut query = StringValue::new();
        let mut headers = Vec::new();
        let mut has_query = path
            .parts()
            .iter()
            .any(|p| matches!(p, Part::Literal(s) if s.contains('?')));
        for p in &m.params {
            for a in &p.annotations {
                let key = a.value().map(|e| ctx.value(e, &scope));
                match (a.simple_name(), key) {
                    ("Query", Some(k)) => {
                        query.push(Part::Literal(if has_query { "&" } else { "?" }.into()));
                        has_query = true;
                        query.append(k);
                        query.push(Part::Literal("=".into()));
                        query.append(typed_value(&p.declared_type, &p.name));
                    }
                    ("Header", Some(k)) => headers.push(Header {
                        key: k,
                        value: StringValue::placeholder(PlaceholderKind::String, Some(p.name.clone())),
                    }),
                    _ => {}
                }
            }
        }
        for a in m.annotations.iter().filter(|a| a.simple_name() == "Headers") {
            let mut lines = Vec::new();
            match a.value().map(|v| &v.kind) {
                Some(ExprKind::ArrayInit(items)) => lines.extend(items.iter()),
                Some(_) => lines.extend(a.value()),
                None => {}
            }
            for l in lines {
                let text = ctx.value(l, &scope).render_url();
                if let Some((k, v)) = text.split_once(':') {
                    headers.push(Header {
                        key: StringValue::literal(k.trim()),
                        value: StringValue::literal(v.trim()),
                    });
                }
            }
        }

        let absolute = path
            .parts()
            .iter()
            .any(|p| matches!(p, Part::Literal(s) if s.contains("://")));
        let bases = if absolute {
            vec![StringValue::new()]
        } else {
            let b = bases_for(ctx, &ty.name);
            if b.is_empty() {
                vec![StringValue::placeholder(
                    PlaceholderKind::String,
                    Some("baseUrl".into()),
                )]
            } else {
                b
            }
        };
        for base in bases {
            let full = if absolute {
                path.clone()
            } else {
                joined(&base, path.clone())
            }
            .concat(query.clone());
            let mut site = site_for(ctx, ty, m);
            site.http_method = Some(method);
            site.headers = headers.clone();
            out.extend(to_url(full, site));
        }
    }
    out
}

fn site_for(ctx: &Ctx, ty: &TypeDecl, m: &MethodDecl) -> ExtractionSite {
    let mut s = ExtractionSite::new(LibraryId::Retrofit, ctx.unit.path.clone(), ty.name.clone());
    s.method_name = Some(m.name.clone());
    s.span = m.span;
    s
}
