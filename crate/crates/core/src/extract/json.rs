use std::collections::HashSet;

use crate::model::{ExtractionSite, JsonNode, JsonSchema, LibraryId};
use crate::reconstruct::{number_text, PlaceholderKind, StringValue};
use crate::source::{DeclKind, Declaration, DeclaredType, Expr, ExprKind, FieldDecl, Span, TypeDecl, TypeKind};

use super::walk::{bodies, call_parts, class_literal, simple, unit_exprs, Body};
use super::Ctx;

const MAX_DEPTH: usize = 16;
const ARRAY_TYPES: &[&str] = &[
    "List",
    "ArrayList",
    "LinkedList",
    "Set",
    "HashSet",
    "TreeSet",
    "Collection",
    "Iterable",
    "JSONArray",
    "JsonArray",
];
const MAP_TYPES: &[&str] = &["Map", "HashMap", "TreeMap", "LinkedHashMap", "JSONObject", "JsonObject"];

pub(crate) fn extract(ctx: &Ctx) -> Vec<JsonSchema> {
    let mut out = Vec::new();
    if ctx.has(LibraryId::OrgJson) {
        for body in bodies(ctx.unit) {
            org_json(ctx, &body, &mut out);
        }
    }
    for ty in &ctx.unit.types {
        if let Some(lib) = model_library(ctx, ty) {
            let mut visiting = vec![ty.name.clone()];
            let root = class_schema(ctx, ty, &mut visiting);
            let mut site = ExtractionSite::new(lib, ctx.unit.path.clone(), ty.name.clone());
            site.span = ty.span;
            out.push(JsonSchema { root, provenance: site });
        }
    }
    out
}

/// Classes named in `X.class` arguments of adapter and (de)serialization
/// calls, or constructed inline as a `toJson` argument, with the library
/// doing the binding.
pub(crate) fn bound_classes(ctx: &Ctx) -> Vec<(String, LibraryId)> {
    let gson = ctx.has(LibraryId::Gson);
    let moshi = ctx.has(LibraryId::Moshi);
    if !gson && !moshi {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (_, e) in unit_exprs(ctx.unit) {
        let Some((name, args)) = call_parts(e) else { continue };
        let lib = match name {
            "adapter" if moshi => LibraryId::Moshi,
            "fromJson" | "toJson" | "toJsonTree" | "getAdapter" => {
                if gson {
                    LibraryId::Gson
                } else {
                    LibraryId::Moshi
                }
            }
            _ => continue,
        };
        let serialized = matches!(name, "toJson" | "toJsonTree");
        out.extend(
            args.iter()
                .filter_map(|a| match &a.kind {
                    ExprKind::New { type_name, .. } if serialized => Some(simple(type_name)),
                    _ => class_literal(a),
                })
                .map(|c| (c.to_string(), lib)),
        );
    }
    out
}

fn model_library(ctx: &Ctx, ty: &TypeDecl) -> Option<LibraryId> {
    if !matches!(ty.kind, TypeKind::Class | TypeKind::Record) {
        return None;
    }
    if let Some(lib) = ctx.corpus.json_bound.get(&ty.name) {
        return Some(*lib);
    }
    let annotated = |names: &[&str]| {
        ty.fields
            .iter()
            .any(|f| f.annotations.iter().any(|a| names.contains(&a.simple_name())))
    };
    if ty.annotations.iter().any(|a| a.simple_name() == "JsonClass") || annotated(&["Json"]) {
        return Some(LibraryId::Moshi);
    }
    if annotated(&["SerializedName", "Expose"]) {
        return Some(if ctx.has(LibraryId::Gson) || !ctx.has(LibraryId::Moshi) {
            LibraryId::Gson
        } else {
            LibraryId::Moshi
        });
    }
    None
}

fn field_key(f: &FieldDecl) -> String {
    f.annotations
        .iter()
        .find_map(|a| match a.simple_name() {
            "SerializedName" => a.value().and_then(Expr::as_str_literal),
            "Json" => a.arg("name").and_then(Expr::as_str_literal),
            _ => None,
        })
        .unwrap_or(&f.name)
        .to_string()
}

/// Object schema of a model class: fields in declaration order, static and
/// transient fields skipped.
fn class_schema(ctx: &Ctx, ty: &TypeDecl, visiting: &mut Vec<String>) -> JsonNode {
    let mut obj = JsonNode::object();
    for f in &ty.fields {
        if f.modifiers.is_static || f.modifiers.is_transient {
            continue;
        }
        let value = match f.initializer.as_ref().map(|e| &e.kind) {
            Some(ExprKind::StringLiteral(s)) => JsonNode::String(StringValue::literal(s.clone())),
            Some(ExprKind::NumberLiteral { text, .. }) => JsonNode::Number(number_text(text)),
            Some(ExprKind::BoolLiteral(b)) => JsonNode::Bool(*b),
            _ => type_schema(ctx, &f.type_name, &f.declared_type, visiting),
        };
        obj.put(field_key(f), value);
    }
    obj
}

fn type_schema(ctx: &Ctx, type_name: &str, declared: &DeclaredType, visiting: &mut Vec<String>) -> JsonNode {
    match declared {
        DeclaredType::String => return JsonNode::Placeholder(PlaceholderKind::String),
        DeclaredType::NumberInt => return JsonNode::Placeholder(PlaceholderKind::NumberInt),
        DeclaredType::NumberFloat => return JsonNode::Placeholder(PlaceholderKind::Number),
        DeclaredType::Boolean => return JsonNode::Placeholder(PlaceholderKind::Boolean),
        DeclaredType::Unknown => return JsonNode::Placeholder(PlaceholderKind::Null),
        DeclaredType::Object(_) => {}
    }
    let name = simple(type_name);
    if let Some(elem) = name.strip_suffix("[]") {
        let inner = type_schema(ctx, elem, &DeclaredType::from_type_name(elem), visiting);
        return JsonNode::Array(vec![inner]);
    }
    if matches!(name, "char" | "Character" | "Date" | "UUID") {
        return JsonNode::Placeholder(PlaceholderKind::String);
    }
    if ARRAY_TYPES.contains(&name) {
        return JsonNode::Array(Vec::new());
    }
    if MAP_TYPES.contains(&name) {
        return JsonNode::object();
    }
    match ctx.corpus.find_type(name) {
        Some((_, t)) if t.kind == TypeKind::Enum => JsonNode::Placeholder(PlaceholderKind::String),
        Some((_, t)) if visiting.len() < MAX_DEPTH && !visiting.contains(&t.name) => {
            visiting.push(t.name.clone());
            let node = class_schema(ctx, t, visiting);
            visiting.pop();
            node
        }
        _ => JsonNode::Placeholder(PlaceholderKind::Null),
    }
}

fn is_type(e: &Expr, name: &str) -> bool {
    matches!(&e.kind, ExprKind::New { type_name, .. } if simple(type_name) == name)
}

fn org_json(ctx: &Ctx, body: &Body, out: &mut Vec<JsonSchema>) {
    let scope = &body.scope;
    let mut nested: HashSet<&str> = HashSet::new();
    let mut nested_exprs: HashSet<*const Expr> = HashSet::new();
    for e in &body.exprs {
        if let Some(("put" | "accumulate" | "append", args)) = call_parts(e) {
            if let Some(v) = args.last() {
                if let ExprKind::NameRef(n) = &v.kind {
                    nested.insert(n);
                }
                nested_exprs.insert(v as *const Expr);
            }
        }
    }
    let conv = Converter { ctx, body };

    let mut roots: Vec<(&Declaration, Option<&Expr>)> = Vec::new();
    for d in scope.declarations() {
        let own = match body.method {
            Some(_) => d.kind != DeclKind::Field,
            None => d.kind == DeclKind::Field,
        };
        if !own || simple(&d.type_name) != "JSONObject" || nested.contains(d.name.as_str()) {
            continue;
        }
        let created = d
            .assignments
            .iter()
            .rev()
            .map(|a| &a.value)
            .find(|v| is_type(v.chain_root(), "JSONObject"));
        if let Some(v) = created {
            roots.push((d, Some(v)));
        }
    }
    roots.sort_by_key(|(d, _)| d.span.start);
    for (d, created) in roots {
        let mut visiting = Vec::new();
        let root = conv.object_of_var(d, &mut visiting);
        let span = created.map_or(d.span, |e| e.span);
        out.push(schema(ctx, body, root, span));
    }

    for top in body.chain_tops() {
        if body.binder(top).is_some() || nested_exprs.contains(&(top as *const Expr)) {
            continue;
        }
        if !is_type(top.chain_root(), "JSONObject") {
            continue;
        }
        let mut visiting = Vec::new();
        let root = conv.node(top, &mut visiting);
        out.push(schema(ctx, body, root, top.span));
    }
}

fn schema(ctx: &Ctx, body: &Body, root: JsonNode, span: Span) -> JsonSchema {
    let mut site = ctx.site(LibraryId::OrgJson, body, span, None);
    site.span = span;
    JsonSchema { root, provenance: site }
}

struct Converter<'a, 'b> {
    ctx: &'a Ctx<'b>,
    body: &'a Body<'a>,
}

impl Converter<'_, '_> {
    fn apply_puts(&self, target: &mut JsonNode, calls: &[&Expr], visiting: &mut Vec<String>) {
        for c in calls {
            match (call_parts(c), &mut *target) {
                (Some(("put" | "accumulate", [k, v])), JsonNode::Object(_)) => {
                    let key = self.ctx.value(k, &self.body.scope).render_json();
                    let value = self.node(v, visiting);
                    target.put(key, value);
                }
                (Some(("put", [v])), JsonNode::Array(items)) => items.push(self.node(v, visiting)),
                (Some(("put", [_, v])), JsonNode::Array(items)) => items.push(self.node(v, visiting)),
                _ => {}
            }
        }
    }

    fn container_of_var(&self, d: &Declaration, empty: JsonNode, visiting: &mut Vec<String>) -> JsonNode {
        if visiting.len() >= MAX_DEPTH || visiting.contains(&d.name) {
            return JsonNode::Placeholder(PlaceholderKind::Null);
        }
        visiting.push(d.name.clone());
        let mut node = empty;
        let created = d.assignments.iter().rev().find(|a| {
            let r = a.value.chain_root();
            is_type(r, "JSONObject") || is_type(r, "JSONArray")
        });
        let after = created.map_or(0, |a| a.pos);
        if let Some(a) = created {
            self.apply_puts(&mut node, &a.value.call_chain(), visiting);
        }
        for inv in d.invocations.iter().filter(|i| i.pos >= after) {
            self.apply_puts(&mut node, &inv.call.call_chain(), visiting);
        }
        visiting.pop();
        node
    }

    fn object_of_var(&self, d: &Declaration, visiting: &mut Vec<String>) -> JsonNode {
        self.container_of_var(d, JsonNode::object(), visiting)
    }

    fn node(&self, e: &Expr, visiting: &mut Vec<String>) -> JsonNode {
        let scope = &self.body.scope;
        let root = e.chain_root();
        if is_type(root, "JSONObject") || is_type(root, "JSONArray") {
            let mut node = if is_type(root, "JSONObject") {
                JsonNode::object()
            } else {
                JsonNode::Array(Vec::new())
            };
            self.apply_puts(&mut node, &e.call_chain(), visiting);
            return node;
        }
        match &e.kind {
            ExprKind::StringLiteral(s) => JsonNode::String(StringValue::literal(s.clone())),
            ExprKind::NumberLiteral { text, .. } => JsonNode::Number(number_text(text)),
            ExprKind::BoolLiteral(b) => JsonNode::Bool(*b),
            ExprKind::NullLiteral => JsonNode::Null,
            ExprKind::FieldAccess { name, .. } if name == "NULL" => JsonNode::Null,
            ExprKind::Binary { op, .. } => match op.as_str() {
                "==" | "!=" | "<" | ">" | "<=" | ">=" | "&&" | "||" | "instanceof" => {
                    JsonNode::Placeholder(PlaceholderKind::Boolean)
                }
                _ => JsonNode::Placeholder(PlaceholderKind::Number),
            },
            ExprKind::NameRef(n) => match scope.lookup(n) {
                Some(d) if simple(&d.type_name) == "JSONObject" => self.object_of_var(d, visiting),
                Some(d) if simple(&d.type_name) == "JSONArray" => {
                    self.container_of_var(d, JsonNode::Array(Vec::new()), visiting)
                }
                Some(d) => self.typed_leaf(e, d),
                None => JsonNode::from_value(self.ctx.value(e, scope)),
            },
            _ => JsonNode::from_value(self.ctx.value(e, scope)),
        }
    }

    /// Concrete value when the variable has a reaching assignment that
    /// resolves, otherwise a placeholder of its declared type.
    fn typed_leaf(&self, e: &Expr, d: &Declaration) -> JsonNode {
        let scope = &self.body.scope;
        let assigned = scope.reaching_assignment(d, e.span.start).is_some();
        let v = self.ctx.value(e, scope);
        let lit = v.as_literal().filter(|_| assigned).map(str::to_string);
        match d.declared_type {
            DeclaredType::NumberInt | DeclaredType::NumberFloat => match lit {
                Some(t) if t.parse::<f64>().is_ok() => JsonNode::Number(t),
                _ if d.declared_type == DeclaredType::NumberInt => JsonNode::Placeholder(PlaceholderKind::NumberInt),
                _ => JsonNode::Placeholder(PlaceholderKind::Number),
            },
            DeclaredType::Boolean => match lit.as_deref() {
                Some("true") => JsonNode::Bool(true),
                Some("false") => JsonNode::Bool(false),
                _ => JsonNode::Placeholder(PlaceholderKind::Boolean),
            },
            _ => JsonNode::from_value(v),
        }
    }
}
