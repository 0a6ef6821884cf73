use std::fmt;

use serde::{Serialize, Serializer};

/// Type of a value the analysis could not determine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PlaceholderKind {
    String,
    Number,
    NumberInt,
    Boolean,
    Null,
}

impl PlaceholderKind {
    /// Marker used in JSON schema output, e.g. `<STRING>`.
    pub fn json_marker(self) -> &'static str {
        match self {
            PlaceholderKind::String => "<STRING>",
            PlaceholderKind::Number => "<NUMBER>",
            PlaceholderKind::NumberInt => "<NUMBER_INT>",
            PlaceholderKind::Boolean => "<BOOLEAN>",
            PlaceholderKind::Null => "<NULL>",
        }
    }

    /// Marker used in URL reports, e.g. `<String>`.
    pub fn url_marker(self) -> &'static str {
        match self {
            PlaceholderKind::String => "<String>",
            PlaceholderKind::Number => "<Number>",
            PlaceholderKind::NumberInt => "<Integer>",
            PlaceholderKind::Boolean => "<Boolean>",
            PlaceholderKind::Null => "<Null>",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    Literal(String),
    /// Unresolved value; `source` names the variable it stands for.
    Placeholder {
        kind: PlaceholderKind,
        source: Option<String>,
    },
}

/// A reconstructed string: literal fragments and typed placeholders.
/// Adjacent literal parts are always coalesced.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StringValue {
    parts: Vec<Part>,
}

impl StringValue {
    pub fn new() -> Self {
        StringValue::default()
    }

    pub fn literal(text: impl Into<String>) -> Self {
        let mut v = StringValue::new();
        v.push(Part::Literal(text.into()));
        v
    }

    pub fn placeholder(kind: PlaceholderKind, source: Option<String>) -> Self {
        StringValue {
            parts: vec![Part::Placeholder { kind, source }],
        }
    }

    pub fn from_parts(parts: impl IntoIterator<Item = Part>) -> Self {
        let mut v = StringValue::new();
        for p in parts {
            v.push(p);
        }
        v
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<Part> {
        self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn push(&mut self, part: Part) {
        match (self.parts.last_mut(), part) {
            (_, Part::Literal(s)) if s.is_empty() => {}
            (Some(Part::Literal(prev)), Part::Literal(s)) => prev.push_str(&s),
            (_, p) => self.parts.push(p),
        }
    }

    pub fn append(&mut self, other: StringValue) {
        for p in other.parts {
            self.push(p);
        }
    }

    pub fn concat(mut self, other: StringValue) -> StringValue {
        self.append(other);
        self
    }

    /// True iff no part is a placeholder.
    pub fn is_resolved(&self) -> bool {
        !self.parts.iter().any(|p| matches!(p, Part::Placeholder { .. }))
    }

    pub fn is_all_placeholder(&self) -> bool {
        !self.parts.is_empty() && self.parts.iter().all(|p| matches!(p, Part::Placeholder { .. }))
    }

    pub fn as_literal(&self) -> Option<&str> {
        match self.parts.as_slice() {
            [] => Some(""),
            [Part::Literal(s)] => Some(s),
            _ => None,
        }
    }

    /// Rendering used in URL reports (`<String>`).
    pub fn render_url(&self) -> String {
        self.render_with(PlaceholderKind::url_marker)
    }

    /// Rendering used in JSON reports (`<STRING>`).
    pub fn render_json(&self) -> String {
        self.render_with(PlaceholderKind::json_marker)
    }

    fn render_with(&self, marker: fn(PlaceholderKind) -> &'static str) -> String {
        let mut out = String::new();
        for p in &self.parts {
            match p {
                Part::Literal(s) => out.push_str(s),
                Part::Placeholder { kind, .. } => out.push_str(marker(*kind)),
            }
        }
        out
    }

    /// Rendering that distinguishes placeholders by kind and source name.
    pub fn identity_key(&self) -> String {
        let mut out = String::new();
        for p in &self.parts {
            match p {
                Part::Literal(s) => out.push_str(s),
                Part::Placeholder { kind, source } => {
                    out.push('<');
                    out.push_str(kind.json_marker().trim_matches(['<', '>']));
                    if let Some(s) = source {
                        out.push(':');
                        out.push_str(s);
                    }
                    out.push('>');
                }
            }
        }
        out
    }
}

impl fmt::Display for StringValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_url())
    }
}

impl Serialize for StringValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render_url())
    }
}
