use serde::Serialize;

use super::ExtractionSite;
use crate::reconstruct::{PlaceholderKind, StringValue};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JsonNode {
    /// Keys in insertion order; duplicates are replaced in place.
    Object(Vec<(String, JsonNode)>),
    Array(Vec<JsonNode>),
    /// A reconstructed string, possibly containing placeholders.
    String(StringValue),
    Number(String),
    Bool(bool),
    Null,
    Placeholder(PlaceholderKind),
}

impl JsonNode {
    pub fn object() -> Self {
        JsonNode::Object(Vec::new())
    }

    /// Inserts or replaces `key` on an object node; no-op otherwise.
    pub fn put(&mut self, key: String, value: JsonNode) {
        if let JsonNode::Object(entries) = self {
            match entries.iter_mut().find(|(k, _)| *k == key) {
                Some(slot) => slot.1 = value,
                None => entries.push((key, value)),
            }
        }
    }

    /// String node, collapsing a lone placeholder to its typed marker.
    pub fn from_value(v: StringValue) -> Self {
        if v.is_all_placeholder() && v.parts().len() == 1 {
            if let crate::reconstruct::Part::Placeholder { kind, .. } = &v.parts()[0] {
                return JsonNode::Placeholder(*kind);
            }
        }
        JsonNode::String(v)
    }

    /// Compact rendering. `<STRING>` is quoted as a string; the other
    /// markers appear bare.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out);
        out
    }

    fn render_into(&self, out: &mut String) {
        match self {
            JsonNode::Object(entries) => {
                out.push('{');
                for (i, (k, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&quote(k));
                    out.push(':');
                    v.render_into(out);
                }
                out.push('}');
            }
            JsonNode::Array(items) => {
                out.push('[');
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    v.render_into(out);
                }
                out.push(']');
            }
            JsonNode::String(v) => out.push_str(&quote(&v.render_json())),
            JsonNode::Number(n) => out.push_str(n),
            JsonNode::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            JsonNode::Null => out.push_str("null"),
            JsonNode::Placeholder(PlaceholderKind::String) => out.push_str("\"<STRING>\""),
            JsonNode::Placeholder(k) => out.push_str(k.json_marker()),
        }
    }

    /// Depth-first visit of every (key, value) pair of every object.
    pub fn for_each_entry<'a>(&'a self, f: &mut impl FnMut(&'a str, &'a JsonNode)) {
        match self {
            JsonNode::Object(entries) => {
                for (k, v) in entries {
                    f(k, v);
                    v.for_each_entry(f);
                }
            }
            JsonNode::Array(items) => items.iter().for_each(|v| v.for_each_entry(f)),
            _ => {}
        }
    }

    /// Every string leaf, including those nested in arrays.
    pub fn for_each_string<'a>(&'a self, f: &mut impl FnMut(&'a StringValue)) {
        match self {
            JsonNode::Object(entries) => entries.iter().for_each(|(_, v)| v.for_each_string(f)),
            JsonNode::Array(items) => items.iter().for_each(|v| v.for_each_string(f)),
            JsonNode::String(s) => f(s),
            _ => {}
        }
    }

    /// True for statically stored scalar values.
    pub fn is_concrete_scalar(&self) -> bool {
        match self {
            JsonNode::String(s) => s.is_resolved() && !s.render_json().is_empty(),
            JsonNode::Number(_) | JsonNode::Bool(_) => true,
            _ => false,
        }
    }
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).unwrap_or_else(|_| format!("\"{s}\""))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct JsonSchema {
    #[serde(serialize_with = "render_root")]
    pub root: JsonNode,
    pub provenance: ExtractionSite,
}

fn render_root<S: serde::Serializer>(root: &JsonNode, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&root.render())
}

impl JsonSchema {
    pub fn render(&self) -> String {
        self.root.render()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_markers() {
        let mut address = JsonNode::object();
        address.put("street".into(), JsonNode::Placeholder(PlaceholderKind::String));
        address.put("number".into(), JsonNode::Placeholder(PlaceholderKind::NumberInt));
        let mut user = JsonNode::object();
        user.put("address".into(), address);
        user.put("name".into(), JsonNode::String(StringValue::literal("Bob")));
        assert_eq!(
            user.render(),
            r#"{"address":{"street":"<STRING>","number":<NUMBER_INT>},"name":"Bob"}"#
        );
        let mut o = JsonNode::object();
        o.put("a".into(), JsonNode::Number("3".into()));
        o.put("b".into(), JsonNode::Array(vec![JsonNode::Bool(true), JsonNode::Null]));
        o.put("a".into(), JsonNode::Number("4".into()));
        assert_eq!(o.render(), r#"{"a":4,"b":[true,null]}"#);
        assert_eq!(JsonNode::object().render(), "{}");
    }
}
